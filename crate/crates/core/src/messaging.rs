//! Three-party signing and verification over one-time LFSR-Toeplitz hashes.
//!
//! Alice holds `(X_a, Y_a, Z_a)`; Bob and Charlie hold the `b` and `c` shares,
//! related by `X_a = X_b ^ X_c` (likewise for `Y` and `Z`). Alice signs with her
//! shares alone. A verifier can only reconstruct Alice's key after exchanging
//! shares with the other verifier.

use crate::error::{invalid, Result};
use crate::gf2::{derive_irreducible, BitString};
use crate::otuh::{toeplitz_hash, ToeplitzSpec};
use rand::seq::SliceRandom;
use rand::RngCore;
use std::collections::VecDeque;

/// One party's `(X, Y, Z)` strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartyKeys {
    pub x: BitString,
    pub y: BitString,
    pub z: BitString,
}

impl PartyKeys {
    pub fn n(&self) -> usize {
        self.x.len()
    }

    fn check(&self) -> Result<usize> {
        let n = self.x.len();
        if n == 0 || self.y.len() != n || self.z.len() != n {
            return Err(invalid("key strings must share one nonzero length"));
        }
        Ok(n)
    }

    fn xor(&self, other: &PartyKeys) -> Result<PartyKeys> {
        Ok(PartyKeys {
            x: self.x.xor(&other.x)?,
            y: self.y.xor(&other.y)?,
            z: self.z.xor(&other.z)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyShares {
    pub alice: PartyKeys,
    pub bob: PartyKeys,
    pub charlie: PartyKeys,
}

impl KeyShares {
    pub fn n(&self) -> usize {
        self.alice.n()
    }

    /// True when every Alice string is the XOR of the matching Bob and Charlie strings.
    pub fn is_consistent(&self) -> bool {
        self.bob
            .xor(&self.charlie)
            .map(|k| k == self.alice)
            .unwrap_or(false)
    }
}

/// Seeded permutation of a key string, standing in for the post-correction shuffle.
pub fn shuffle_key<R: RngCore + ?Sized>(key: &BitString, rng: &mut R) -> BitString {
    let mut idx: Vec<usize> = (0..key.len()).collect();
    idx.shuffle(rng);
    BitString::from_bits(idx.into_iter().map(|i| key.get(i)))
}

/// Draws the six independent shares, then fills Alice's from the XOR relation.
pub fn split_keys<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> Result<KeyShares> {
    if n == 0 {
        return Err(invalid("key length must be at least one bit"));
    }
    let raw = shuffle_key(&BitString::random(rng, 6 * n), rng);
    let part = |k: usize| raw.slice(k * n, n);
    let bob = PartyKeys { x: part(0), y: part(1), z: part(2) };
    let charlie = PartyKeys { x: part(3), y: part(4), z: part(5) };
    let alice = bob.xor(&charlie)?;
    Ok(KeyShares { alice, bob, charlie })
}

/// The transmitted triple `{Sig, P, Doc}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureBundle {
    pub doc: BitString,
    pub sig: BitString,
    pub p_enc: BitString,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

fn hash_with(p_bits: &BitString, y: &BitString, doc: &BitString) -> Result<BitString> {
    let p = derive_irreducible(p_bits)?;
    let spec = ToeplitzSpec::new(p, y.clone(), doc.len())?;
    toeplitz_hash(&spec, doc)
}

pub fn sign(doc: &BitString, alice: &PartyKeys, p_a: &BitString) -> Result<SignatureBundle> {
    let n = alice.check()?;
    if p_a.len() != n {
        return Err(invalid(format!("p_a has {} bits, keys have {n}", p_a.len())));
    }
    if doc.is_empty() {
        return Err(invalid("document must hold at least one bit"));
    }
    let digest = hash_with(p_a, &alice.y, doc)?;
    Ok(SignatureBundle {
        doc: doc.clone(),
        sig: digest.xor(&alice.z)?,
        p_enc: p_a.xor(&alice.x)?,
    })
}

pub fn verify(bundle: &SignatureBundle, own: &PartyKeys, counterpart: &PartyKeys) -> Result<Verdict> {
    let n = own.check()?;
    if counterpart.check()? != n || bundle.sig.len() != n || bundle.p_enc.len() != n {
        return Err(invalid("bundle and share lengths disagree"));
    }
    if bundle.doc.is_empty() {
        return Err(invalid("document must hold at least one bit"));
    }
    let k = own.xor(counterpart)?;
    let p = bundle.p_enc.xor(&k.x)?;
    let expected = bundle.sig.xor(&k.z)?;
    let actual = hash_with(&p, &k.y, &bundle.doc)?;
    Ok(if actual == expected { Verdict::Accept } else { Verdict::Reject })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThreePartyOutcome {
    pub bob: Verdict,
    pub charlie: Verdict,
}

#[derive(Clone, Debug)]
enum Message {
    Bundle(SignatureBundle),
    Shares(PartyKeys),
}

#[derive(Default)]
struct Inbox(VecDeque<Message>);

impl Inbox {
    fn bundle(&mut self) -> Result<SignatureBundle> {
        let pos = self.0.iter().position(|m| matches!(m, Message::Bundle(_)));
        match pos.and_then(|i| self.0.remove(i)) {
            Some(Message::Bundle(b)) => Ok(b),
            _ => Err(invalid("expected a signature bundle")),
        }
    }

    fn shares(&mut self) -> Result<PartyKeys> {
        let pos = self.0.iter().position(|m| matches!(m, Message::Shares(_)));
        match pos.and_then(|i| self.0.remove(i)) {
            Some(Message::Shares(k)) => Ok(k),
            _ => Err(invalid("expected key shares")),
        }
    }
}

/// Mutation applied to the bundle on the Bob to Charlie leg.
pub type Tamper<'a> = &'a dyn Fn(&mut SignatureBundle);

/// Alice signs and sends to Bob; Bob and Charlie swap shares; Bob verifies and
/// forwards the bundle to Charlie through `tamper`; Charlie verifies.
pub fn run_three_party(
    doc: &BitString,
    shares: &KeyShares,
    p_a: &BitString,
    tamper: Option<Tamper<'_>>,
) -> Result<ThreePartyOutcome> {
    let mut bob_in = Inbox::default();
    let mut charlie_in = Inbox::default();

    bob_in.0.push_back(Message::Bundle(sign(doc, &shares.alice, p_a)?));

    let received = bob_in.bundle()?;
    charlie_in.0.push_back(Message::Shares(shares.bob.clone()));
    bob_in.0.push_back(Message::Shares(shares.charlie.clone()));

    let from_charlie = bob_in.shares()?;
    let bob = verify(&received, &shares.bob, &from_charlie)?;

    let mut forwarded = received;
    if let Some(t) = tamper {
        t(&mut forwarded);
    }
    charlie_in.0.push_back(Message::Bundle(forwarded));

    let from_bob = charlie_in.shares()?;
    let bundle = charlie_in.bundle()?;
    let charlie = verify(&bundle, &shares.charlie, &from_bob)?;
    Ok(ThreePartyOutcome { bob, charlie })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecurityBounds {
    pub m: usize,
    pub h_n: f64,
    pub eps_cor: f64,
    pub eps_prime: f64,
    pub eps_rob: f64,
    pub eps_rep: f64,
    pub eps_for: f64,
    pub eps_total: f64,
}

pub fn security_bounds(m: usize, h_n: f64, eps_cor: f64, eps_prime: f64) -> SecurityBounds {
    let clamp = |x: f64| x.clamp(0.0, 1.0);
    let eps_for = clamp(m as f64 * (1.0 - h_n).exp2());
    let eps_rep = clamp(2.0 * eps_prime);
    let eps_rob = clamp(2.0 * eps_cor + 2.0 * eps_prime);
    SecurityBounds {
        m,
        h_n,
        eps_cor,
        eps_prime,
        eps_rob,
        eps_rep,
        eps_for,
        eps_total: eps_rob.max(eps_rep).max(eps_for),
    }
}

/// Leading bytes of a bundle file.
pub const BUNDLE_MAGIC: [u8; 4] = *b"QDSB";
/// Leading bytes of a share file.
pub const SHARES_MAGIC: [u8; 4] = *b"QDSK";

fn container(magic: [u8; 4], n: usize, m: usize, parts: &[&BitString]) -> Vec<u8> {
    let mut out = magic.to_vec();
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(m as u32).to_le_bytes());
    for p in parts {
        out.extend_from_slice(&p.to_bytes());
    }
    out
}

fn parse_container(bytes: &[u8], magic: [u8; 4], lens: impl Fn(usize, usize) -> Vec<usize>) -> Result<Vec<BitString>> {
    if bytes.len() < 12 || bytes[..4] != magic {
        return Err(invalid("missing or wrong magic header"));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    let m = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let mut rest = &bytes[12..];
    let mut out = Vec::new();
    for len in lens(n, m) {
        let k = len.div_ceil(8);
        if rest.len() < k {
            return Err(invalid("truncated container"));
        }
        out.push(BitString::from_bytes(&rest[..k], len)?);
        rest = &rest[k..];
    }
    if !rest.is_empty() {
        return Err(invalid(format!("{} trailing bytes", rest.len())));
    }
    Ok(out)
}

impl SignatureBundle {
    /// Magic, `n` and `m` as little-endian `u32`, then `Sig`, `P`, `Doc` bit-packed.
    pub fn to_bytes(&self) -> Vec<u8> {
        container(BUNDLE_MAGIC, self.sig.len(), self.doc.len(), &[&self.sig, &self.p_enc, &self.doc])
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut v = parse_container(bytes, BUNDLE_MAGIC, |n, m| vec![n, n, m])?;
        let doc = v.pop().expect("three parts");
        let p_enc = v.pop().expect("three parts");
        let sig = v.pop().expect("three parts");
        if sig.is_empty() || doc.is_empty() {
            return Err(invalid("empty signature or document"));
        }
        Ok(SignatureBundle { doc, sig, p_enc })
    }
}

impl PartyKeys {
    /// Same container as bundles with `m = 0`, then `X`, `Y`, `Z`.
    pub fn to_bytes(&self) -> Vec<u8> {
        container(SHARES_MAGIC, self.n(), 0, &[&self.x, &self.y, &self.z])
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut v = parse_container(bytes, SHARES_MAGIC, |n, _| vec![n, n, n])?;
        let z = v.pop().expect("three parts");
        let y = v.pop().expect("three parts");
        let x = v.pop().expect("three parts");
        let k = PartyKeys { x, y, z };
        k.check()?;
        Ok(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shares_satisfy_xor_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = split_keys(&mut rng, 40).unwrap();
        assert!(s.is_consistent());
        assert!(split_keys(&mut rng, 0).is_err());
        let again = split_keys(&mut ChaCha8Rng::seed_from_u64(1), 40).unwrap();
        assert_eq!(again, split_keys(&mut ChaCha8Rng::seed_from_u64(1), 40).unwrap());
    }

    #[test]
    fn zero_doc_and_zero_pad_give_zero_signature() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut s = split_keys(&mut rng, 16).unwrap();
        s.alice.z = BitString::zeros(16);
        let p_a = BitString::random(&mut rng, 16);
        let b = sign(&BitString::zeros(50), &s.alice, &p_a).unwrap();
        assert!(b.sig.is_zero());
    }

    #[test]
    fn security_bound_substitutions() {
        let b = security_bounds(1000, 44.0, 1e-10, 1e-10);
        assert!((b.eps_for - 1000.0 * 2f64.powi(-43)).abs() < 1e-22);
        assert!((b.eps_rob - 4e-10).abs() < 1e-24);
        assert!((b.eps_rep - 2e-10).abs() < 1e-24);
        assert_eq!(b.eps_total, b.eps_rob);
        assert_eq!(security_bounds(1, 0.0, 1e-10, 1e-10).eps_for, 1.0);
    }

    #[test]
    fn bundle_round_trip_and_truncation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = split_keys(&mut rng, 13).unwrap();
        let doc = BitString::random(&mut rng, 77);
        let b = sign(&doc, &s.alice, &BitString::random(&mut rng, 13)).unwrap();
        let bytes = b.to_bytes();
        assert_eq!(SignatureBundle::from_bytes(&bytes).unwrap(), b);
        assert!(SignatureBundle::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert_eq!(PartyKeys::from_bytes(&s.bob.to_bytes()).unwrap(), s.bob);
        assert!(PartyKeys::from_bytes(&bytes).is_err());
    }
}
