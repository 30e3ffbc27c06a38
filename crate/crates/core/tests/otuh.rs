use proptest::prelude::*;
use qds_core::gf2::{derive_irreducible, BitString, Gf2Poly};
use qds_core::otuh::{lfsr_next_state, matrix_apply, toeplitz_hash, toeplitz_matrix, ToeplitzSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_spec(rng: &mut ChaCha8Rng, n: usize, m: usize) -> ToeplitzSpec {
    let p = derive_irreducible(&BitString::random(rng, n)).unwrap();
    ToeplitzSpec::new(p, BitString::random(rng, n), m).unwrap()
}

fn bits(v: &[u8]) -> BitString {
    BitString::from_bits(v.iter().map(|&b| b == 1))
}

fn padded(p: &Gf2Poly, m: usize) -> BitString {
    let c = p.coeffs();
    BitString::from_bits((0..m).map(|i| i < c.len() && c.get(i)))
}

#[test]
fn hand_computed_columns() {
    let spec = ToeplitzSpec::new(Gf2Poly::from_u64(0b111), bits(&[1, 0]), 3).unwrap();
    let cols = toeplitz_matrix(&spec).unwrap();
    assert_eq!(cols, vec![bits(&[1, 0]), bits(&[1, 1]), bits(&[0, 1])]);
    assert_eq!(lfsr_next_state(&spec, &bits(&[1, 0])).unwrap(), bits(&[1, 1]));
    assert!(lfsr_next_state(&spec, &BitString::zeros(2)).unwrap().is_zero());
    assert!(lfsr_next_state(&spec, &BitString::zeros(3)).is_err());
}

#[test]
fn zero_and_unit_messages() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let spec = random_spec(&mut rng, 24, 100);
    assert!(toeplitz_hash(&spec, &BitString::zeros(100)).unwrap().is_zero());
    let mut e0 = BitString::zeros(100);
    e0.set(0, true);
    assert_eq!(&toeplitz_hash(&spec, &e0).unwrap(), spec.state());
    assert_eq!(&toeplitz_matrix(&spec).unwrap()[0], spec.state());
    assert!(toeplitz_hash(&spec, &BitString::zeros(99)).is_err());
}

#[test]
fn state_cycle_divides_field_order() {
    for low in 0u64..16 {
        let p = Gf2Poly::from_u64(0b1_0000 | low);
        let Ok(spec) = ToeplitzSpec::new(p, bits(&[1, 0, 1, 1]), 1) else { continue };
        let mut s = spec.state().clone();
        for _ in 0..15 {
            s = lfsr_next_state(&spec, &s).unwrap();
        }
        assert_eq!(&s, spec.state(), "p low bits {low:#b}");
    }
}

#[test]
fn matrix_and_streaming_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(1..=32);
        let spec = random_spec(&mut rng, n, m);
        let msg = BitString::random(&mut rng, m);
        let cols = toeplitz_matrix(&spec).unwrap();
        assert_eq!(matrix_apply(&cols, &msg).unwrap(), toeplitz_hash(&spec, &msg).unwrap());
    }
}

#[test]
fn collision_rate_within_axu_bound() {
    let (n, m, trials) = (16, 64, 100_000);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = BitString::random(&mut rng, m);
    let mut b = BitString::random(&mut rng, m);
    if a == b {
        b.flip(0);
    }
    let hits = (0..trials)
        .filter(|_| {
            let spec = random_spec(&mut rng, n, m);
            toeplitz_hash(&spec, &a).unwrap() == toeplitz_hash(&spec, &b).unwrap()
        })
        .count();
    let bound = m as f64 * 2f64.powi(1 - n as i32);
    let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
    let rate = hits as f64 / trials as f64;
    assert!(rate <= bound + 5.0 * sigma, "rate {rate} bound {bound}");
}

#[test]
fn specs_validated() {
    assert!(ToeplitzSpec::new(Gf2Poly::from_u64(0b101), bits(&[1, 0]), 4).is_err());
    assert!(ToeplitzSpec::new(Gf2Poly::from_u64(0b111), bits(&[1, 0, 0]), 4).is_err());
    assert!(ToeplitzSpec::new(Gf2Poly::from_u64(0b111), bits(&[1, 0]), 0).is_err());
}

proptest! {
    #[test]
    fn hash_is_linear(seed in any::<u64>(), n in 1usize..40, m in 1usize..300) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, n, m);
        let a = BitString::random(&mut rng, m);
        let b = BitString::random(&mut rng, m);
        let lhs = toeplitz_hash(&spec, &a.xor(&b).unwrap()).unwrap();
        let rhs = toeplitz_hash(&spec, &a).unwrap().xor(&toeplitz_hash(&spec, &b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiples_of_p_hash_to_zero(seed in any::<u64>(), n in 1usize..40, extra in 1usize..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = n + extra;
        let spec = random_spec(&mut rng, n, m);
        let q = Gf2Poly::from_coeffs(BitString::random(&mut rng, extra)).unwrap();
        let msg = padded(&spec.poly().mul(&q), m);
        prop_assert!(toeplitz_hash(&spec, &msg).unwrap().is_zero());
        let other = ToeplitzSpec::new(spec.poly().clone(), BitString::random(&mut rng, n), m).unwrap();
        prop_assert!(toeplitz_hash(&other, &msg).unwrap().is_zero());
    }
}
