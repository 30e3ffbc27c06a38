//! File-based key generation, signing and verification.

use anyhow::{bail, Context, Result};
use qds_core::gf2::BitString;
use qds_core::messaging::{sign, split_keys, verify, PartyKeys, SignatureBundle, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::path::{Path, PathBuf};

pub const PARTIES: [&str; 3] = ["alice", "bob", "charlie"];

/// Document file contents as bits, least significant bit of each byte first.
pub fn document_bits(bytes: &[u8]) -> Result<BitString> {
    if bytes.is_empty() {
        bail!("document is empty");
    }
    Ok(BitString::from_bytes(bytes, bytes.len() * 8)?)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

pub fn read_keys(path: &Path) -> Result<PartyKeys> {
    PartyKeys::from_bytes(&read(path)?).with_context(|| format!("parsing key file {}", path.display()))
}

/// Writes `alice.key`, `bob.key` and `charlie.key` into `dir`.
pub fn keygen(dir: &Path, n: usize, seed: u64) -> Result<Vec<PathBuf>> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let shares = split_keys(&mut rng, n)?;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut paths = Vec::new();
    for (name, keys) in PARTIES.iter().zip([&shares.alice, &shares.bob, &shares.charlie]) {
        let p = dir.join(format!("{name}.key"));
        std::fs::write(&p, keys.to_bytes()).with_context(|| format!("writing {}", p.display()))?;
        paths.push(p);
    }
    Ok(paths)
}

pub fn sign_file(doc: &Path, key: &Path, seed: u64) -> Result<SignatureBundle> {
    let doc = document_bits(&read(doc)?)?;
    let alice = read_keys(key)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let p_a = BitString::random(&mut rng, alice.n());
    Ok(sign(&doc, &alice, &p_a)?)
}

pub fn verify_file(bundle: &Path, own: &Path, counterpart: &Path) -> Result<Verdict> {
    let b = SignatureBundle::from_bytes(&read(bundle)?).with_context(|| format!("parsing bundle {}", bundle.display()))?;
    let own = read_keys(own)?;
    let other = read_keys(counterpart)?;
    Ok(verify(&b, &own, &other)?)
}
