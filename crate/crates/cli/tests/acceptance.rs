//! End-to-end acceptance battery. Prints one PASS/FAIL line per criterion.
//! Set `QDS_ACCEPTANCE_STRICT=1` to turn any FAIL into a test failure.

use qds_core::baseline::{failure_bounds, BaselineParams};
use qds_core::finitekey::{
    binary_entropy, binary_entropy_inv, chernoff_expected, chernoff_observed, forgery_test,
};
use qds_core::gf2::{derive_irreducible, is_irreducible, BitString, Gf2Poly};
use qds_core::messaging::{sign, split_keys, verify, Verdict};
use qds_core::otuh::{toeplitz_hash, ToeplitzSpec};
use qds_core::photonics::{compare_with_mc, mc_oracle, pairing_stats, ProtocolParams};
use qds_core::sweep::{
    analyze_async, analyze_baseline, async_max_distance, baseline_max_distance, distance_grid, entropy_profile,
    SweepOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

fn random_spec(r: &mut ChaCha12Rng, n: usize, m: usize) -> ToeplitzSpec {
    let p = derive_irreducible(&BitString::random(r, n)).unwrap();
    ToeplitzSpec::new(p, BitString::random(r, n), m).unwrap()
}

fn hash_kernel() -> Outcome {
    let mut r = rng(1);
    let (cases, mut kernel_bad, mut linear_bad) = (10_000, 0, 0);
    for t in 0..cases {
        let n = if t % 2 == 0 { 8 } else { 16 };
        let m = n + r.gen_range(1..=256);
        let spec = random_spec(&mut r, n, m);
        let q = Gf2Poly::from_coeffs(BitString::random(&mut r, m - n)).unwrap();
        let c = spec.poly().mul(&q);
        let msg = BitString::from_bits((0..m).map(|i| i < c.coeffs().len() && c.coeff(i)));
        kernel_bad += usize::from(!toeplitz_hash(&spec, &msg).unwrap().is_zero());
        let a = BitString::random(&mut r, m);
        let b = BitString::random(&mut r, m);
        let lhs = toeplitz_hash(&spec, &a.xor(&b).unwrap()).unwrap();
        let rhs = toeplitz_hash(&spec, &a).unwrap().xor(&toeplitz_hash(&spec, &b).unwrap()).unwrap();
        linear_bad += usize::from(lhs != rhs);
    }
    Outcome {
        pass: kernel_bad == 0 && linear_bad == 0,
        detail: format!("{kernel_bad} nonzero kernel hashes, {linear_bad} linearity failures over {cases} cases each"),
    }
}

fn forgery_rate() -> Outcome {
    let (n, m, trials) = (16usize, 64usize, 1_000_000u64);
    // Worst-case substitution: D is the product of as many distinct degree-n
    // irreducibles as fit in m bits.
    let mut d = Gf2Poly::one();
    let mut k = 0;
    let mut low = 1u64;
    while k < (m - 1) / n {
        let p = Gf2Poly::from_u64((1 << n) | low);
        if is_irreducible(&p).unwrap() {
            d = d.mul(&p);
            k += 1;
        }
        low += 2;
    }
    let d = BitString::from_bits((0..m).map(|i| i < d.coeffs().len() && d.coeff(i)));
    let mut r = rng(2);
    let mut hits = 0u64;
    for _ in 0..trials {
        let shares = split_keys(&mut r, n).unwrap();
        let doc = BitString::random(&mut r, m);
        let p_a = BitString::random(&mut r, n);
        let mut b = sign(&doc, &shares.alice, &p_a).unwrap();
        b.doc = b.doc.xor(&d).unwrap();
        hits += u64::from(verify(&b, &shares.charlie, &shares.bob).unwrap() == Verdict::Accept);
    }
    let bound = m as f64 * 2f64.powi(1 - n as i32);
    let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
    let rate = hits as f64 / trials as f64;
    Outcome {
        pass: rate <= bound + 5.0 * sigma,
        detail: format!("rate {rate:.3e} vs bound {bound:.3e} + 5 sigma {:.3e} ({hits} of {trials})", 5.0 * sigma),
    }
}

fn mc_oracle_check() -> Outcome {
    let bins = 10_000_000u64;
    let mut p = ProtocolParams::default().with_total_distance(50.0);
    p.pulses = bins as f64;
    let analytic = pairing_stats(&p).unwrap();
    let mc = mc_oracle(&p, bins, 16, &mut rng(3)).unwrap();
    let agree = compare_with_mc(&analytic, &mc);
    let worst = agree.iter().map(|a| a.z).fold(0.0, f64::max);
    Outcome {
        pass: agree.len() == 5 && worst <= 5.0,
        detail: agree.iter().map(|a| format!("{} z={:.2}", a.name, a.z)).collect::<Vec<_>>().join(", "),
    }
}

fn bound_identities() -> Outcome {
    let mut r = rng(4);
    let (mut bracket_bad, mut worst) = (0, 0.0f64);
    for _ in 0..10_000 {
        let x = 10f64.powf(r.gen_range(-3.0..12.0));
        let eps = 10f64.powf(r.gen_range(-15.0..-1.0));
        let (ol, ou) = chernoff_observed(x, eps);
        let (el, eu) = chernoff_expected(x, eps);
        bracket_bad += usize::from(!(ol <= x && x <= ou && el <= x && x <= eu));
        let h: f64 = r.gen_range(0.0..=0.5);
        worst = worst.max((binary_entropy_inv(binary_entropy(h).unwrap()).unwrap() - h).abs());
    }
    Outcome {
        pass: bracket_bad == 0 && worst <= 1e-10,
        detail: format!("{bracket_bad} bracket violations, worst round trip {worst:.2e}"),
    }
}

fn entropy_knee() -> Outcome {
    let p = ProtocolParams::default();
    let d = distance_grid(0.0, 600.0, 5.0).unwrap();
    let prof = entropy_profile(&p, &d, 0.5).unwrap();
    let at = |l: f64| prof.iter().find(|x| x.distance_km == l).unwrap();
    let (r_min, r_max) = (at(50.0).h_min_frac, at(50.0).h_max_frac);
    let knee = prof.iter().filter(|x| x.distance_km >= 50.0).find(|x| x.h_min_frac < 0.85 * r_min).map(|x| x.distance_km);
    let Some(knee) = knee else {
        return Outcome { pass: false, detail: "no knee below 600 km".into() };
    };
    let plateau = prof.iter().filter(|x| x.distance_km >= 50.0 && x.distance_km < knee);
    let drift = |f: &dyn Fn(&qds_core::sweep::ProfilePoint) -> f64, r: f64| {
        plateau.clone().map(|x| (f(x) / r - 1.0).abs()).fold(0.0, f64::max)
    };
    let dmin = drift(&|x| x.h_min_frac, r_min);
    let dmax = drift(&|x| x.h_max_frac, r_max);
    let tail = prof.last().unwrap().h_min_frac;
    let reach = async_max_distance(&p, &SweepOptions::default(), 5.0, 600.0).unwrap();
    let pass = dmin < 0.15 && dmax < 0.15 && (knee - 410.0).abs() <= 40.0 && tail < 0.1 * r_min && reach < 600.0 && reach >= knee - 40.0;
    Outcome {
        pass,
        detail: format!(
            "knee {knee} km, h_min/n_z drift {:.1}%, h_max/n_z drift {:.1}%, h_min/n_z at 600 km {tail:.2e}, last feasible {reach} km",
            100.0 * dmin,
            100.0 * dmax
        ),
    }
}

fn rate_comparison() -> Outcome {
    let opts = SweepOptions::default();
    let bp = BaselineParams::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [1e12, 1e13, 1e14] {
        let p = ProtocolParams { pulses: n, ..Default::default() };
        let a = async_max_distance(&p, &opts, 5.0, 800.0).unwrap();
        let b = baseline_max_distance(&p, &bp, &opts, 5.0, 800.0).unwrap();
        let ratio = if b > 0.0 { a / b } else { f64::INFINITY };
        let here = p.with_total_distance(100.0);
        let ra = analyze_async(&here, opts.m, opts.eps_target).unwrap().sizing.r_sig;
        let rb = analyze_baseline(&bp, &here, opts.m, opts.eps_target).unwrap().r_sig;
        let gain = if rb > 0.0 { ra / rb } else { 0.0 };
        pass &= (1.6..=2.4).contains(&ratio) && gain >= 1e5;
        parts.push(format!("N={n:.0e}: reach {a}/{b} km = {ratio:.2}, rate ratio at 100 km {gain:.2e}"));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn sizing_minimality() -> Outcome {
    let opts = SweepOptions::default();
    let bp = BaselineParams::default();
    let mut r = rng(7);
    let (mut checked_async, mut checked_base, mut bad) = (0, 0, Vec::new());
    while checked_async < 20 || checked_base < 20 {
        let n = [1e12, 1e13, 1e14][r.gen_range(0..3)];
        let l = r.gen_range(0.0..450.0);
        let p = ProtocolParams { pulses: n, ..Default::default() }.with_total_distance(l);
        if checked_async < 20 {
            if let Ok(a) = analyze_async(&p, opts.m, opts.eps_target) {
                if a.sizing.feasible {
                    checked_async += 1;
                    let k = a.sizing.n;
                    let ok = forgery_test(&a.est, &p, opts.m, opts.eps_target, k).unwrap().0
                        && (k == 1 || !forgery_test(&a.est, &p, opts.m, opts.eps_target, k - 1).unwrap().0)
                        && k as f64 <= a.est.n_z / 3.0;
                    if !ok {
                        bad.push(format!("async n={k} at {l:.1} km"));
                    }
                }
            }
        }
        if checked_base < 20 {
            let res = analyze_baseline(&bp, &p, opts.m, opts.eps_target).unwrap();
            if res.feasible {
                checked_base += 1;
                let ok = failure_bounds(&res, res.l).iter().all(|&b| b <= opts.eps_target)
                    && failure_bounds(&res, res.l - 1).iter().any(|&b| b > opts.eps_target);
                if !ok {
                    bad.push(format!("baseline L={} at {l:.1} km", res.l));
                }
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() { "20 async and 20 baseline points minimal".into() } else { bad.join(", ") },
    }
}

fn qds(args: &[&str]) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_qds")).args(args).output().expect("binary runs").status.code()
}

fn end_to_end() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let s = |p: &Path| p.to_str().unwrap().to_owned();
    let (doc, bundle) = (dir.path().join("doc"), dir.path().join("bundle"));
    let keys = |who: &str| s(&dir.path().join(format!("{who}.key")));
    let mut r = rng(8);
    let (trials, mut round_trip_ok, mut rejected) = (1000, true, 0);
    for t in 0..trials {
        let bytes: Vec<u8> = (0..r.gen_range(1..64)).map(|_| r.gen()).collect();
        std::fs::write(&doc, &bytes).unwrap();
        let seed = t.to_string();
        assert_eq!(qds(&["keygen", "--n", "32", "--out-dir", &s(dir.path()), "--seed", &seed]), Some(0));
        assert_eq!(qds(&["sign", "--doc", &s(&doc), "--key", &keys("alice"), "--out", &s(&bundle), "--seed", &seed]), Some(0));
        let check = || qds(&["verify", "--bundle", &s(&bundle), "--own", &keys("bob"), "--counterpart", &keys("charlie")]);
        round_trip_ok &= check() == Some(0);
        let mut b = std::fs::read(&bundle).unwrap();
        let bit = r.gen_range(0..bytes.len() * 8);
        b[12 + 8 + bit / 8] ^= 1 << (bit % 8);
        std::fs::write(&bundle, b).unwrap();
        rejected += usize::from(check() == Some(1));
    }
    Outcome {
        pass: round_trip_ok && rejected >= 999,
        detail: format!("round trips {}, tampered documents rejected {rejected} of {trials}", if round_trip_ok { "all accepted" } else { "FAILED" }),
    }
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 8] = [
        ("1 hash kernel and linearity", Duration::from_secs(10), hash_kernel),
        ("2 forgery rate", Duration::from_secs(60), forgery_rate),
        ("3 Monte Carlo vs analytic", Duration::from_secs(120), mc_oracle_check),
        ("4 bound identities", Duration::from_secs(5), bound_identities),
        ("5 entropy fractions and knee", Duration::from_secs(60), entropy_knee),
        ("6 reach and rate vs baseline", Duration::from_secs(300), rate_comparison),
        ("7 sizing minimality", Duration::from_secs(60), sizing_minimality),
        ("8 end-to-end demo", Duration::from_secs(30), end_to_end),
    ];
    let mut failed = Vec::new();
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took <= limit;
        println!(
            "{} {name}: {} [{:.1} s, limit {} s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
        if !pass {
            failed.push(name);
        }
    }
    println!("{} of 8 criteria passed", 8 - failed.len());
    if std::env::var_os("QDS_ACCEPTANCE_STRICT").is_some() && !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}
