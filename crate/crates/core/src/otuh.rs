//! LFSR-based Toeplitz hashing.
//!
//! The hash matrix has columns `s_0, s_1, ..., s_{m-1}` with `s_{i+1} = W s_i`,
//! where `W` is the companion matrix of `p(x)`: its first row is
//! `(p_{n-1}, ..., p_0)` and the remaining rows shift the state down by one.
//! Position `j` of a state vector is bit `j` of its [`BitString`].

use crate::error::{invalid, Error, Result};
use crate::gf2::{is_irreducible, BitString, Gf2Poly};

/// Largest `n * m` the explicit matrix path will materialize.
pub const MATRIX_LIMIT: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToeplitzSpec {
    p: Gf2Poly,
    s: BitString,
    m: usize,
    // Bit j holds p_{n-1-j}, the feedback tap applied to state position j.
    taps: BitString,
}

impl ToeplitzSpec {
    pub fn new(p: Gf2Poly, s: BitString, m: usize) -> Result<Self> {
        let n = p.deg();
        if s.len() != n {
            return Err(invalid(format!("state has {} bits, polynomial degree is {n}", s.len())));
        }
        if m == 0 {
            return Err(invalid("message length must be at least one bit"));
        }
        if !is_irreducible(&p)? {
            return Err(invalid(format!("{p:?} is reducible")));
        }
        let taps = BitString::from_bits((0..n).map(|j| p.coeff(n - 1 - j)));
        Ok(ToeplitzSpec { p, s, m, taps })
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn poly(&self) -> &Gf2Poly {
        &self.p
    }

    pub fn state(&self) -> &BitString {
        &self.s
    }
}

fn step(taps: &[u64], state: &mut [u64], n: usize) {
    let fb = taps
        .iter()
        .zip(state.iter())
        .fold(0u32, |acc, (t, s)| acc ^ (t & s).count_ones())
        & 1;
    let mut carry = fb as u64;
    for w in state.iter_mut() {
        let out = *w >> 63;
        *w = (*w << 1) | carry;
        carry = out;
    }
    let r = n % 64;
    if r != 0 {
        if let Some(last) = state.last_mut() {
            *last &= (1u64 << r) - 1;
        }
    }
}

/// `W s_i`: prepend the feedback bit `p . s_i` and drop the last element.
pub fn lfsr_next_state(spec: &ToeplitzSpec, s_i: &BitString) -> Result<BitString> {
    let n = spec.n();
    if s_i.len() != n {
        return Err(invalid(format!("state has {} bits, expected {n}", s_i.len())));
    }
    let mut w = s_i.words().to_vec();
    step(spec.taps.words(), &mut w, n);
    Ok(BitString::from_words(w, n))
}

/// Streaming evaluation of `sum_i M_i s_i`.
pub fn toeplitz_hash(spec: &ToeplitzSpec, msg: &BitString) -> Result<BitString> {
    if msg.len() != spec.m {
        return Err(invalid(format!(
            "message has {} bits, spec expects {}",
            msg.len(),
            spec.m
        )));
    }
    let n = spec.n();
    let taps = spec.taps.words();
    let mut state = spec.s.words().to_vec();
    let mut acc = vec![0u64; state.len()];
    for i in 0..msg.len() {
        if msg.get(i) {
            for (a, s) in acc.iter_mut().zip(&state) {
                *a ^= s;
            }
        }
        if i + 1 < msg.len() {
            step(taps, &mut state, n);
        }
    }
    Ok(BitString::from_words(acc, n))
}

/// Columns `s_0 .. s_{m-1}` of the hash matrix. Test path only.
pub fn toeplitz_matrix(spec: &ToeplitzSpec) -> Result<Vec<BitString>> {
    let n = spec.n();
    if n.saturating_mul(spec.m) > MATRIX_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "{n} x {} matrix exceeds {MATRIX_LIMIT} bits",
            spec.m
        )));
    }
    let mut cols = Vec::with_capacity(spec.m);
    let mut s = spec.s.clone();
    for _ in 0..spec.m {
        let next = lfsr_next_state(spec, &s)?;
        cols.push(s);
        s = next;
    }
    Ok(cols)
}

/// Matrix-vector product over GF(2) for the column form returned by [`toeplitz_matrix`].
pub fn matrix_apply(cols: &[BitString], msg: &BitString) -> Result<BitString> {
    if cols.len() != msg.len() {
        return Err(invalid("matrix width does not match message length"));
    }
    let n = cols.first().map_or(0, |c| c.len());
    let mut acc = BitString::zeros(n);
    for (i, c) in cols.iter().enumerate() {
        if msg.get(i) {
            acc.xor_assign(c)?;
        }
    }
    Ok(acc)
}
