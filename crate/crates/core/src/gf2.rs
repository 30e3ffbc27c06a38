//! Bit strings and polynomials over GF(2).
//!
//! Bit `i` of a [`BitString`] is the coefficient of `x^i` when the string is
//! read as a polynomial, and element `M_i` when it is read as a document.
//! The same convention is used by every serializer in the crate.

use crate::error::{invalid, Result};
use rand::RngCore;
use sha2::{Digest, Sha256};
use std::fmt;

const W: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(W)
}

/// Fixed-length vector of bits.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString { words: vec![0; words_for(len)], len }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut out = BitString::zeros(0);
        for b in bits {
            out.push(b);
        }
        out
    }

    /// Low `len` bits of `value` (`len <= 64`).
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= W, "from_u64 holds at most 64 bits");
        let mut s = BitString { words: vec![value; words_for(len)], len };
        s.trim();
        s
    }

    pub fn random<R: RngCore + ?Sized>(rng: &mut R, len: usize) -> Self {
        let mut s = BitString {
            words: (0..words_for(len)).map(|_| rng.next_u64()).collect(),
            len,
        };
        s.trim();
        s
    }

    pub(crate) fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(words_for(len), 0);
        let mut s = BitString { words, len };
        s.trim();
        s
    }

    fn trim(&mut self) {
        let r = self.len % W;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / W] >> (i % W)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % W);
        if v {
            self.words[i / W] |= mask;
        } else {
            self.words[i / W] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / W] ^= 1u64 << (i % W);
    }

    pub fn push(&mut self, b: bool) {
        if self.len % W == 0 {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, b);
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &BitString) -> Result<()> {
        if self.len != other.len {
            return Err(invalid(format!(
                "xor of bit strings with lengths {} and {}",
                self.len, other.len
            )));
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
        Ok(())
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Sub-string `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> BitString {
        assert!(start + len <= self.len, "slice out of range");
        BitString::from_bits((start..start + len).map(|i| self.get(i)))
    }

    /// Packs bits low-bit-first into `ceil(len / 8)` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8);
        (0..nbytes)
            .map(|k| (self.words[k / 8] >> (8 * (k % 8))) as u8)
            .collect()
    }

    /// Inverse of [`BitString::to_bytes`]. Padding bits in the final byte must be zero.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<BitString> {
        if bytes.len() != len.div_ceil(8) {
            return Err(invalid(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            )));
        }
        let mut words = vec![0u64; words_for(len)];
        for (k, &b) in bytes.iter().enumerate() {
            words[k / 8] |= (b as u64) << (8 * (k % 8));
        }
        let s = BitString::from_words(words.clone(), len);
        if s.words != words {
            return Err(invalid("nonzero padding bits"));
        }
        Ok(s)
    }

    /// `"<len>:<hex>"`, bytes as produced by [`BitString::to_bytes`].
    pub fn to_hex(&self) -> String {
        let mut out = format!("{}:", self.len);
        for b in self.to_bytes() {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }

    pub fn from_hex(text: &str) -> Result<BitString> {
        let (len, hex) = text
            .trim()
            .split_once(':')
            .ok_or_else(|| invalid("hex bit string lacks a length prefix"))?;
        let len: usize = len
            .parse()
            .map_err(|_| invalid(format!("bad length prefix {len:?}")))?;
        if hex.len() % 2 != 0 {
            return Err(invalid("odd number of hex digits"));
        }
        let bytes = (0..hex.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&hex[i..i + 2], 16))
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map_err(|e| invalid(format!("bad hex digit: {e}")))?;
        BitString::from_bytes(&bytes, len)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(")?;
        for b in self.iter() {
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")")
    }
}

// Word-vector polynomial kernels. Inputs may carry high zero words.

fn degree_of(w: &[u64]) -> Option<usize> {
    w.iter()
        .rposition(|&x| x != 0)
        .map(|i| i * W + 63 - w[i].leading_zeros() as usize)
}

fn xor_shifted(acc: &mut [u64], src: &[u64], shift: usize) {
    let (ws, bs) = (shift / W, shift % W);
    for (i, &s) in src.iter().enumerate() {
        if s == 0 {
            continue;
        }
        acc[i + ws] ^= s << bs;
        if bs != 0 && i + ws + 1 < acc.len() {
            acc[i + ws + 1] ^= s >> (W - bs);
        }
    }
}

fn clmul(a: &[u64], b: &[u64]) -> Vec<u64> {
    let (Some(da), Some(db)) = (degree_of(a), degree_of(b)) else {
        return vec![0];
    };
    let mut out = vec![0u64; words_for(da + db + 1) + 1];
    let bw = &b[..words_for(db + 1)];
    for i in 0..=da {
        if (a[i / W] >> (i % W)) & 1 == 1 {
            xor_shifted(&mut out, bw, i);
        }
    }
    out
}

fn rem_words(a: &[u64], m: &[u64]) -> Vec<u64> {
    let dm = degree_of(m).expect("nonzero modulus");
    let mut r = a.to_vec();
    let mw = &m[..words_for(dm + 1)];
    while let Some(dr) = degree_of(&r) {
        if dr < dm {
            break;
        }
        xor_shifted(&mut r, mw, dr - dm);
    }
    r.truncate(words_for(dm.max(1)));
    if r.is_empty() {
        r.push(0);
    }
    r
}

fn gcd_words(a: &[u64], b: &[u64]) -> Vec<u64> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while degree_of(&b).is_some() {
        let r = rem_words(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// Polynomial over GF(2). The stored coefficient string has length `deg + 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Poly {
    coeffs: BitString,
}

impl Gf2Poly {
    /// Takes the coefficients as given: `deg = coeffs.len() - 1`, even if the
    /// top coefficient is zero (a non-monic polynomial).
    pub fn from_coeffs(coeffs: BitString) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("a polynomial needs at least one coefficient"));
        }
        Ok(Gf2Poly { coeffs })
    }

    fn from_words_normalized(w: Vec<u64>) -> Self {
        let len = degree_of(&w).map_or(1, |d| d + 1);
        Gf2Poly { coeffs: BitString::from_words(w, len) }
    }

    /// Polynomial whose coefficient bits are the bits of `bits`.
    pub fn from_u64(bits: u64) -> Self {
        Self::from_words_normalized(vec![bits])
    }

    pub fn zero() -> Self {
        Self::from_u64(0)
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn monomial(k: usize) -> Self {
        let mut c = BitString::zeros(k + 1);
        c.set(k, true);
        Gf2Poly { coeffs: c }
    }

    pub fn deg(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &BitString {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> bool {
        i < self.coeffs.len() && self.coeffs.get(i)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.get(self.deg())
    }

    /// Degree of the nonzero part, ignoring stored leading zeros.
    pub fn effective_deg(&self) -> Option<usize> {
        degree_of(self.coeffs.words())
    }

    pub fn to_u64(&self) -> Option<u64> {
        match self.effective_deg() {
            Some(d) if d >= W => None,
            _ => Some(self.coeffs.words()[0]),
        }
    }

    pub fn add(&self, other: &Gf2Poly) -> Gf2Poly {
        let n = self.coeffs.words().len().max(other.coeffs.words().len());
        let mut w = vec![0u64; n];
        for (i, x) in self.coeffs.words().iter().enumerate() {
            w[i] ^= x;
        }
        for (i, x) in other.coeffs.words().iter().enumerate() {
            w[i] ^= x;
        }
        Self::from_words_normalized(w)
    }

    pub fn mul(&self, other: &Gf2Poly) -> Gf2Poly {
        Self::from_words_normalized(clmul(self.coeffs.words(), other.coeffs.words()))
    }

    pub fn rem(&self, modulus: &Gf2Poly) -> Result<Gf2Poly> {
        if modulus.is_zero() {
            return Err(invalid("zero modulus"));
        }
        Ok(Self::from_words_normalized(rem_words(
            self.coeffs.words(),
            modulus.coeffs.words(),
        )))
    }

    pub fn gcd(&self, other: &Gf2Poly) -> Gf2Poly {
        Self::from_words_normalized(gcd_words(self.coeffs.words(), other.coeffs.words()))
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = (0..=self.deg())
            .rev()
            .filter(|&i| self.coeffs.get(i))
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// `(a * b) mod modulus`.
pub fn poly_mul_mod(a: &Gf2Poly, b: &Gf2Poly, modulus: &Gf2Poly) -> Result<Gf2Poly> {
    match modulus.effective_deg() {
        None => Err(invalid("zero modulus")),
        Some(0) => Err(invalid("modulus must have degree at least 1")),
        Some(_) => a.rem(modulus)?.mul(&b.rem(modulus)?).rem(modulus),
    }
}

fn mulmod_u64(a: u64, b: u64, m: u64, dm: u32) -> u64 {
    let mut acc = 0u64;
    let mut a = a;
    let mut b = b;
    let top = 1u64 << dm;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= m;
        }
    }
    acc
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let db = 63 - b.leading_zeros();
        while a != 0 && 63 - a.leading_zeros() >= db {
            a ^= b << (63 - a.leading_zeros() - db);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

fn irreducible_small(p: u64, n: u32) -> bool {
    // gcd(p, x^(2^i) - x) = 1 for i = 1..=n/2.
    let mut xp = 0b10u64;
    for _ in 1..=n / 2 {
        xp = mulmod_u64(xp, xp, p, n);
        if gcd_u64(p, xp ^ 0b10) != 1 {
            return false;
        }
    }
    true
}

/// Distinct-degree irreducibility test.
pub fn is_irreducible(p: &Gf2Poly) -> Result<bool> {
    if !p.is_monic() || p.is_zero() {
        return Err(invalid(format!("{p:?} is not monic")));
    }
    let n = p.deg();
    if n == 0 {
        return Err(invalid("constant polynomials have no irreducibility verdict"));
    }
    if n == 1 {
        return Ok(true);
    }
    if n < 63 {
        return Ok(irreducible_small(p.coeffs.words()[0], n as u32));
    }
    let pw = p.coeffs.words();
    let x = {
        let mut w = vec![0u64; pw.len()];
        w[0] = 0b10;
        w
    };
    let mut xp = x.clone();
    for _ in 1..=n / 2 {
        xp = rem_words(&clmul(&xp, &xp), pw);
        let mut diff = xp.clone();
        diff.resize(pw.len(), 0);
        diff[0] ^= 0b10;
        let g = gcd_words(pw, &diff);
        if degree_of(&g) != Some(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn expand_seed(seed: &BitString, counter: u64) -> BitString {
    let n = seed.len();
    let mut bytes = Vec::with_capacity(n.div_ceil(8));
    let mut block = 0u64;
    while bytes.len() < n.div_ceil(8) {
        let mut h = Sha256::new();
        h.update(b"qds-irreducible");
        h.update((n as u64).to_le_bytes());
        h.update(seed.to_bytes());
        h.update(counter.to_le_bytes());
        h.update(block.to_le_bytes());
        bytes.extend_from_slice(&h.finalize());
        block += 1;
    }
    bytes.truncate(n.div_ceil(8));
    let r = n % 8;
    if r != 0 {
        *bytes.last_mut().expect("n >= 1") &= (1u8 << r) - 1;
    }
    BitString::from_bytes(&bytes, n).expect("sized above")
}

fn candidate(low: &BitString) -> Gf2Poly {
    let n = low.len();
    let mut c = BitString::zeros(n + 1);
    for i in 0..n {
        c.set(i, low.get(i));
    }
    c.set(0, true);
    c.set(n, true);
    Gf2Poly { coeffs: c }
}

/// Deterministic monic irreducible polynomial of degree `seed.len()`.
///
/// The seed supplies the low coefficients with `p_0` forced to one. A reducible
/// candidate is replaced by the next block of a SHA-256 counter-mode expansion
/// of the seed. Every irreducible is reachable and, for a uniform seed, each
/// appears with probability close to `1 / I_n`.
pub fn derive_irreducible(seed: &BitString) -> Result<Gf2Poly> {
    if seed.is_empty() {
        return Err(invalid("seed must hold at least one bit"));
    }
    if seed.len() == 1 {
        // x and x + 1 are both irreducible; p_0 = 1 picks x + 1.
        return Ok(candidate(seed));
    }
    let mut p = candidate(seed);
    let mut counter = 0u64;
    while !is_irreducible(&p)? {
        p = candidate(&expand_seed(seed, counter));
        counter += 1;
    }
    Ok(p)
}
