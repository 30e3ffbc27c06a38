//! Finite-key estimation: concentration bounds, decoy-state estimates, the
//! entropy budget and the minimum signature length.

use crate::error::{invalid, Error, Result};
use crate::messaging::{security_bounds, SecurityBounds};
use crate::photonics::{is_filtered, Intensity, PairingStats, ProtocolParams, Total};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Bounds an observed count given its expectation.
    ObservedFromExpected,
    /// Bounds an expectation given an observed count.
    ExpectedFromObserved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChernoffBound {
    pub beta: f64,
    pub direction: Direction,
    pub sense: Sense,
}

impl ChernoffBound {
    pub fn new(eps: f64, direction: Direction, sense: Sense) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(invalid(format!("eps = {eps} must lie in (0, 1)")));
        }
        Ok(ChernoffBound { beta: (1.0 / eps).ln(), direction, sense })
    }

    pub fn apply(&self, x: f64) -> f64 {
        let b = self.beta;
        let x = x.max(0.0);
        match (self.direction, self.sense) {
            (Direction::ObservedFromExpected, Sense::Upper) => x + b / 2.0 + (2.0 * b * x + b * b / 4.0).sqrt(),
            (Direction::ObservedFromExpected, Sense::Lower) => (x - (2.0 * b * x).sqrt()).max(0.0),
            (Direction::ExpectedFromObserved, Sense::Upper) => x + b + (2.0 * b * x + b * b).sqrt(),
            (Direction::ExpectedFromObserved, Sense::Lower) => {
                (x - b / 2.0 - (2.0 * b * x + b * b / 4.0).sqrt()).max(0.0)
            }
        }
    }
}

fn beta(eps: f64) -> f64 {
    (1.0 / eps).ln()
}

/// `(lower, upper)` range of the observed value around expectation `x_star`.
pub fn chernoff_observed(x_star: f64, eps: f64) -> (f64, f64) {
    let b = beta(eps);
    let x = x_star.max(0.0);
    ((x - (2.0 * b * x).sqrt()).max(0.0), x + b / 2.0 + (2.0 * b * x + b * b / 4.0).sqrt())
}

/// `(lower, upper)` range of the expectation given observed count `x`.
pub fn chernoff_expected(x: f64, eps: f64) -> (f64, f64) {
    let b = beta(eps);
    let x = x.max(0.0);
    (
        (x - b / 2.0 - (2.0 * b * x + b * b / 4.0).sqrt()).max(0.0),
        x + b + (2.0 * b * x + b * b).sqrt(),
    )
}

/// Random-sampling-without-replacement correction.
pub fn gamma_u(n: f64, k: f64, lambda: f64, eps: f64) -> Result<f64> {
    if !(n > 0.0 && k > 0.0) {
        return Err(invalid(format!("gamma_u needs positive sizes, got n = {n}, k = {k}")));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(invalid(format!("gamma_u diverges at lambda = {lambda}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps = {eps} must lie in (0, 1)")));
    }
    let s = n + k;
    let a = n.max(k);
    let g = (s / (n * k) * (s / (2.0 * PI * n * k * lambda * (1.0 - lambda) * eps * eps)).ln()).max(0.0);
    let num = (1.0 - 2.0 * lambda) * a * g / s + (a * a * g * g / (s * s) + 4.0 * lambda * (1.0 - lambda) * g).sqrt();
    Ok(num / (2.0 + 2.0 * a * a * g / (s * s)))
}

pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(invalid(format!("binary entropy of {x}")));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

/// Root of `H(x) = y` in `[0, 1/2]`.
pub fn binary_entropy_inv(y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(invalid(format!("inverse binary entropy of {y}")));
    }
    if y == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid)? < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Entropy with rates clamped into `[0, 1/2]`.
pub(crate) fn h_sat(x: f64) -> f64 {
    if x >= 0.5 {
        1.0
    } else if x <= 0.0 {
        0.0
    } else {
        binary_entropy(x).expect("in range")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatedParams {
    pub n_z: f64,
    pub e_z: f64,
    pub s0_z_low: f64,
    pub s11_z_low: f64,
    pub phi11_z_up: f64,
    pub s11_x_low: f64,
    pub e11_x_up: f64,
    pub t11_x_up: f64,
    pub m0_2nu_low: f64,
    pub mu_prime: f64,
    pub nu_prime: f64,
    /// Set when the phase-error bound reaches 1/2, leaving no extractable entropy.
    pub degenerate: bool,
}

/// Probability that a kept pair falls in the set `[ta, tb]`.
pub fn set_probability(params: &ProtocolParams, ta: Total, tb: Total) -> f64 {
    let (mu, nu) = (Intensity::Mu, Intensity::Nu);
    let p_s = 1.0 - params.prob_a(mu) * params.prob_b(nu) - params.prob_a(nu) * params.prob_b(mu);
    let mut s = 0.0;
    for &(ae, al) in ta.splits() {
        for &(be, bl) in tb.splits() {
            if is_filtered(ae, be) || is_filtered(al, bl) {
                continue;
            }
            s += params.prob_a(ae) * params.prob_b(be) / p_s * (params.prob_a(al) * params.prob_b(bl) / p_s);
        }
    }
    s
}

/// `(mu', nu')` branch selection.
pub fn primed_intensities(params: &ProtocolParams) -> (f64, f64) {
    if params.mu_a / params.mu_b <= params.nu_a / params.nu_b {
        (params.mu_a, params.nu_a)
    } else {
        (params.mu_b, params.nu_b)
    }
}

pub fn estimate(params: &ProtocolParams, stats: &PairingStats) -> Result<EstimatedParams> {
    use Total::{Mu, Nu, TwoNu, O};
    let eps = params.eps;
    let n_z = stats.n(Mu, Mu);
    if !(n_z > 0.0) {
        return Err(Error::NoKey("the [mu, mu] set is empty".into()));
    }
    let p = |a, b| set_probability(params, a, b);
    let lo = |a, b| chernoff_expected(stats.n(a, b), eps).0;
    let hi = |a, b| chernoff_expected(stats.n(a, b), eps).1;
    let (mu_a, mu_b, nu_a, nu_b) = (params.mu_a, params.mu_b, params.nu_a, params.nu_b);

    let s0_star = (-mu_a).exp() * p(Mu, Mu) / p(O, Mu) * lo(O, Mu);
    let s0 = chernoff_observed(s0_star, eps).0;

    let (mp, np) = primed_intensities(params);
    let braces = mu_a * mu_b * mp
        * ((nu_a + nu_b).exp() * lo(Nu, Nu) / p(Nu, Nu) - nu_b.exp() * hi(O, Nu) / p(O, Nu)
            - nu_a.exp() * hi(Nu, O) / p(Nu, O)
            + lo(O, O) / p(O, O))
        - nu_a * nu_b * np
            * ((mu_a + mu_b).exp() * hi(Mu, Mu) / p(Mu, Mu) - mu_b.exp() * lo(O, Mu) / p(O, Mu)
                - mu_a.exp() * lo(Mu, O) / p(Mu, O)
                + lo(O, O) / p(O, O));
    let s11_star = ((-mu_a - mu_b).exp() * p(Mu, Mu) / (nu_a * nu_b * (mp - np)) * braces).max(0.0);
    let s11 = chernoff_observed(s11_star, eps).0;

    let s11x_star =
        ((-2.0 * nu_a - 2.0 * nu_b).exp() * 4.0 * p(TwoNu, TwoNu) / (mu_a * mu_b * (mp - np)) * braces).max(0.0);
    let s11x = chernoff_observed(s11x_star, eps).0;

    let p22 = p(TwoNu, TwoNu);
    let m0_star = ((-2.0 * nu_a).exp() * p22 / (2.0 * p(O, TwoNu)) * lo(O, TwoNu)
        + (-2.0 * nu_b).exp() * p22 / (2.0 * p(TwoNu, O)) * lo(TwoNu, O)
        - (-2.0 * nu_a - 2.0 * nu_b).exp() * p22 / (2.0 * p(O, O)) * hi(O, O))
    .max(0.0);
    let m0 = chernoff_observed(m0_star, eps).0;
    let t11 = (stats.m_x - m0).max(0.0);

    let (e11, phi) = if s11x > 0.0 && s11 > 0.0 {
        let e11 = (t11 / s11x).min(1.0);
        // The correction diverges at a zero observed rate; one error in the
        // sample is the resolution of the estimate.
        let lambda = e11.max(1.0 / s11x);
        let phi = if lambda < 1.0 {
            e11 + gamma_u(s11, s11x, lambda, params.eps_e)?
        } else {
            1.0
        };
        (e11, phi.min(1.0))
    } else {
        (if s11x > 0.0 { (t11 / s11x).min(1.0) } else { 1.0 }, 1.0)
    };

    Ok(EstimatedParams {
        n_z,
        e_z: (stats.m_z / n_z).clamp(0.0, 1.0),
        s0_z_low: s0,
        s11_z_low: s11.min(n_z - s0).max(0.0),
        phi11_z_up: phi,
        s11_x_low: s11x,
        e11_x_up: e11,
        t11_x_up: t11,
        m0_2nu_low: m0,
        mu_prime: mp,
        nu_prime: np,
        degenerate: phi >= 0.5,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyBudget {
    pub h_min_eps: f64,
    pub h_max_cor: f64,
    pub h_total: f64,
    pub h_min_frac: f64,
    pub h_max_frac: f64,
    /// Composite secrecy parameter, a diagnostic only.
    pub eps_sec: f64,
}

pub fn entropy_budget(est: &EstimatedParams, params: &ProtocolParams) -> EntropyBudget {
    let eps = params.eps;
    let h_min = est.s0_z_low + est.s11_z_low * (1.0 - h_sat(est.phi11_z_up)) - 2.0 * (2.0 / (eps * eps)).log2();
    let h_max = est.n_z * params.f * h_sat(est.e_z) + (2.0 / eps).log2();
    let frac = |h: f64| if est.n_z > 0.0 { (h / est.n_z).clamp(0.0, 1.0) } else { 0.0 };
    EntropyBudget {
        h_min_eps: h_min,
        h_max_cor: h_max,
        h_total: h_min - h_max,
        h_min_frac: frac(h_min),
        h_max_frac: frac(h_max),
        eps_sec: 2.0 * (5.0 * eps + 2.0 * params.eps_e),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubgroupBounds {
    pub s0_zn_low: f64,
    pub s11_zn_low: f64,
    pub phi11_zn_up: f64,
}

fn scaled_lower(n: f64, total: f64, count: f64, eps: f64) -> Result<f64> {
    let rate = count / total;
    if !(rate > 0.0) {
        return Ok(0.0);
    }
    if rate >= 1.0 {
        return Ok(n);
    }
    Ok((n * (rate - gamma_u(n, total - n, rate, eps)?)).max(0.0))
}

/// Bounds for an `n`-bit group drawn without replacement from the raw key.
pub fn subgroup_bounds(est: &EstimatedParams, n: f64, eps: f64) -> Result<SubgroupBounds> {
    if !(n >= 1.0 && n < est.n_z) {
        return Err(invalid(format!("group size {n} must lie in [1, n_z = {})", est.n_z)));
    }
    let s0 = scaled_lower(n, est.n_z, est.s0_z_low, eps)?;
    let s11 = scaled_lower(n, est.n_z, est.s11_z_low, eps)?;
    let rest = est.s11_z_low - s11;
    let phi = est.phi11_z_up;
    let phi_n = if s11 > 0.0 && rest > 0.0 && phi > 0.0 && phi < 0.5 {
        (phi + gamma_u(s11, rest, phi, eps)?).min(1.0)
    } else {
        1.0
    };
    Ok(SubgroupBounds { s0_zn_low: s0, s11_zn_low: s11, phi11_zn_up: phi_n })
}

/// Unknown information about an `n`-bit group, and its subgroup bounds.
pub fn group_entropy(est: &EstimatedParams, params: &ProtocolParams, n: u64) -> Result<(f64, SubgroupBounds)> {
    let b = subgroup_bounds(est, n as f64, params.eps)?;
    let h = b.s0_zn_low + b.s11_zn_low * (1.0 - h_sat(b.phi11_zn_up)) - n as f64 * params.f * h_sat(est.e_z);
    Ok((h, b))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignatureSizing {
    pub n: u64,
    pub h_n: f64,
    pub s0_zn_low: f64,
    pub s11_zn_low: f64,
    pub phi11_zn_up: f64,
    /// `n_z / (3n)`: signatures obtainable from one raw key; zero when infeasible.
    pub r_sig: f64,
    pub feasible: bool,
    pub bounds: SecurityBounds,
}

/// Whether an `n`-bit group meets the forgery target; the bounds come from
/// the same entropy value that decides it.
pub fn forgery_test(
    est: &EstimatedParams,
    params: &ProtocolParams,
    m: usize,
    eps_target: f64,
    n: u64,
) -> Result<(bool, f64, SubgroupBounds, SecurityBounds)> {
    let (h, b) = group_entropy(est, params, n)?;
    let sb = security_bounds(m, h, params.eps, params.eps);
    Ok((sb.eps_for <= eps_target, h, b, sb))
}

/// Smallest `n <= n_z / 3` whose forgery bound meets `eps_target`.
///
/// Only the forgery bound depends on `n`; the robustness and repudiation
/// bounds are fixed by the failure probabilities and reported as they are.
pub fn signature_length(
    est: &EstimatedParams,
    params: &ProtocolParams,
    m: usize,
    eps_target: f64,
) -> Result<SignatureSizing> {
    if m == 0 {
        return Err(invalid("document length must be positive"));
    }
    let infeasible = || SignatureSizing {
        n: 0,
        h_n: 0.0,
        s0_zn_low: 0.0,
        s11_zn_low: 0.0,
        phi11_zn_up: 1.0,
        r_sig: 0.0,
        feasible: false,
        bounds: security_bounds(m, 0.0, params.eps, params.eps),
    };
    let cap = (est.n_z / 3.0).floor() as u64;
    if cap < 1 || est.degenerate {
        return Ok(infeasible());
    }
    let pass = |n: u64| -> Result<bool> { Ok(forgery_test(est, params, m, eps_target, n)?.0) };

    let mut hi = 1u64;
    while hi < cap && !pass(hi)? {
        hi = (hi * 2).min(cap);
    }
    if !pass(hi)? {
        return Ok(infeasible());
    }
    let mut lo = hi / 2;
    if lo >= 1 && pass(lo)? {
        lo = 0;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pass(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    while hi > 1 && pass(hi - 1)? {
        hi -= 1;
    }
    let (_, h, b, sb) = forgery_test(est, params, m, eps_target, hi)?;
    Ok(SignatureSizing {
        n: hi,
        h_n: h,
        s0_zn_low: b.s0_zn_low,
        s11_zn_low: b.s11_zn_low,
        phi11_zn_up: b.phi11_zn_up,
        r_sig: est.n_z / (3.0 * hi as f64),
        feasible: true,
        bounds: sb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chernoff_reference_points() {
        assert_eq!(chernoff_observed(0.0, 1e-3), (0.0, (1e3f64).ln()));
        let (lo, _) = chernoff_observed(1e6, 1e-10);
        assert!((lo - 993_214.0).abs() < 1.0);
        let (lo, hi) = chernoff_expected(0.0, 1e-3);
        assert_eq!(lo, 0.0);
        assert!((hi - 2.0 * (1e3f64).ln()).abs() < 1e-12);
        let (_, hi) = chernoff_expected(1e4, 1e-10);
        assert!((hi - 10_702.0).abs() < 1.0);
    }

    #[test]
    fn chernoff_struct_matches_functions() {
        let x = 1234.5;
        let b = ChernoffBound::new(1e-7, Direction::ExpectedFromObserved, Sense::Upper).unwrap();
        assert_eq!(b.apply(x), chernoff_expected(x, 1e-7).1);
        let b = ChernoffBound::new(1e-7, Direction::ObservedFromExpected, Sense::Lower).unwrap();
        assert_eq!(b.apply(x), chernoff_observed(x, 1e-7).0);
        assert!(ChernoffBound::new(0.0, Direction::ExpectedFromObserved, Sense::Lower).is_err());
    }

    #[test]
    fn gamma_u_domain() {
        assert!(gamma_u(10.0, 10.0, 0.0, 0.1).is_err());
        assert!(gamma_u(10.0, 10.0, 1.0, 0.1).is_err());
        let g = gamma_u(1e6, 1e6, 0.01, 1e-10).unwrap();
        assert!(g.is_finite() && g > 0.0 && g < 1.0);
    }

    #[test]
    fn entropy_endpoints() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert!((binary_entropy_inv(binary_entropy(0.11).unwrap()).unwrap() - 0.11).abs() < 1e-10);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy_inv(-0.1).is_err());
        assert!((binary_entropy_inv(1.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn primed_branch_follows_ratio_order() {
        let p = ProtocolParams { mu_a: 0.4, mu_b: 0.2, nu_a: 0.1, nu_b: 0.1, ..Default::default() };
        assert_eq!(primed_intensities(&p), (0.2, 0.1));
        let q = ProtocolParams { mu_a: 0.2, mu_b: 0.4, nu_a: 0.1, nu_b: 0.1, ..Default::default() };
        assert_eq!(primed_intensities(&q), (0.2, 0.1));
        let r = ProtocolParams { mu_a: 0.2, mu_b: 0.4, nu_a: 0.02, nu_b: 0.1, ..Default::default() };
        assert_eq!(primed_intensities(&r), (0.4, 0.1));
    }
}
