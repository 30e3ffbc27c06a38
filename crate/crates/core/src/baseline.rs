//! Four-intensity MDI-QDS comparator: yields, decoy bounds with a double scan,
//! and signature sizing from the error-rate gap.

use crate::error::{invalid, Result};
use crate::finitekey::{binary_entropy_inv, chernoff_expected, chernoff_observed, h_sat};
use crate::photonics::{bessel_i0_minus_one, ProtocolParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Mu,
    Nu,
    Omega,
    O,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::Mu, Level::Nu, Level::Omega, Level::O];

    fn idx(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineParams {
    pub mu_a: f64,
    pub nu_a: f64,
    pub omega_a: f64,
    pub mu_b: f64,
    pub nu_b: f64,
    pub omega_b: f64,
    pub p_mu_a: f64,
    pub p_nu_a: f64,
    pub p_omega_a: f64,
    pub p_mu_b: f64,
    pub p_nu_b: f64,
    pub p_omega_b: f64,
    /// Grid points per scan axis.
    pub grid: usize,
}

impl Default for BaselineParams {
    fn default() -> Self {
        BaselineParams {
            mu_a: 0.5,
            nu_a: 0.1,
            omega_a: 0.02,
            mu_b: 0.5,
            nu_b: 0.1,
            omega_b: 0.02,
            p_mu_a: 0.25,
            p_nu_a: 0.25,
            p_omega_a: 0.25,
            p_mu_b: 0.25,
            p_nu_b: 0.25,
            p_omega_b: 0.25,
            grid: 64,
        }
    }
}

impl BaselineParams {
    pub fn intensity_a(&self, k: Level) -> f64 {
        match k {
            Level::Mu => self.mu_a,
            Level::Nu => self.nu_a,
            Level::Omega => self.omega_a,
            Level::O => 0.0,
        }
    }

    pub fn intensity_b(&self, k: Level) -> f64 {
        match k {
            Level::Mu => self.mu_b,
            Level::Nu => self.nu_b,
            Level::Omega => self.omega_b,
            Level::O => 0.0,
        }
    }

    pub fn prob_a(&self, k: Level) -> f64 {
        match k {
            Level::Mu => self.p_mu_a,
            Level::Nu => self.p_nu_a,
            Level::Omega => self.p_omega_a,
            Level::O => 1.0 - self.p_mu_a - self.p_nu_a - self.p_omega_a,
        }
    }

    pub fn prob_b(&self, k: Level) -> f64 {
        match k {
            Level::Mu => self.p_mu_b,
            Level::Nu => self.p_nu_b,
            Level::Omega => self.p_omega_b,
            Level::O => 1.0 - self.p_mu_b - self.p_nu_b - self.p_omega_b,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (who, m, n, w) in [("a", self.mu_a, self.nu_a, self.omega_a), ("b", self.mu_b, self.nu_b, self.omega_b)] {
            if !(m > n && n > w && w > 0.0 && m.is_finite()) {
                return Err(invalid(format!("baseline intensities for {who} must satisfy mu > nu > omega > 0")));
            }
        }
        for k in Level::ALL {
            for (who, p) in [("a", self.prob_a(k)), ("b", self.prob_b(k))] {
                if !(p > 0.0 && p < 1.0) {
                    return Err(invalid(format!("baseline probability of {k:?} for {who} is {p}")));
                }
            }
        }
        if self.grid < 2 {
            return Err(invalid("scan grid needs at least two points per axis"));
        }
        Ok(())
    }
}

/// Expected detection and error counts for every intensity pair.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineYields {
    pub n_z: [[f64; 4]; 4],
    pub m_z: [[f64; 4]; 4],
    pub n_x: [[f64; 4]; 4],
    pub m_x: [[f64; 4]; 4],
}

impl BaselineYields {
    pub fn nz(&self, a: Level, b: Level) -> f64 {
        self.n_z[a.idx()][b.idx()]
    }
    pub fn mz(&self, a: Level, b: Level) -> f64 {
        self.m_z[a.idx()][b.idx()]
    }
    pub fn nx(&self, a: Level, b: Level) -> f64 {
        self.n_x[a.idx()][b.idx()]
    }
    pub fn mx(&self, a: Level, b: Level) -> f64 {
        self.m_x[a.idx()][b.idx()]
    }
}

/// Channel transmittances including detector efficiency.
fn channel(common: &ProtocolParams) -> (f64, f64) {
    (common.eta_a() * common.eta_d_l, common.eta_b() * common.eta_d_l)
}

// The closed forms are rearranged so that small intensities and dark-count
// rates do not cancel: 1 - (1-pd)e^-t = pd - (1-pd)expm1(-t), and the X-basis
// brackets are written around (y - I0(z/2))^2 with I0 - 1 kept separate.
pub fn baseline_yields(bp: &BaselineParams, common: &ProtocolParams) -> Result<BaselineYields> {
    let (ea, eb) = channel(common);
    let pd = common.p_d_l;
    let n = common.pulses;
    let miss = |t: f64| pd - (1.0 - pd) * (-t).exp_m1();
    let mut y = BaselineYields { n_z: [[0.0; 4]; 4], m_z: [[0.0; 4]; 4], n_x: [[0.0; 4]; 4], m_x: [[0.0; 4]; 4] };
    for a in Level::ALL {
        for b in Level::ALL {
            let (xa, xb) = (bp.intensity_a(a) * ea, bp.intensity_b(b) * eb);
            let pre = 2.0 * n * bp.prob_a(a) * bp.prob_b(b);
            let root = (xa * xb).sqrt();
            let (v, u) = (bessel_i0_minus_one(root)?, bessel_i0_minus_one(root / 2.0)?);
            let e = (-(xa + xb) / 2.0).exp();
            let dark = pd * (v + miss((xa + xb) / 2.0));
            let both = miss(xa / 2.0) * miss(xb / 2.0);
            let yy = (1.0 - pd) * (-(xa + xb) / 4.0).exp();
            let gap = miss((xa + xb) / 4.0) + u;
            let (i, j) = (a.idx(), b.idx());
            y.n_z[i][j] = pre * (1.0 - pd).powi(2) * e * (dark + both);
            y.m_z[i][j] = pre * (1.0 - pd).powi(2) * e * dark;
            y.n_x[i][j] = pre * yy * yy * (2.0 * gap * gap + (v - 4.0 * u - 2.0 * u * u));
            y.m_x[i][j] = pre * yy * yy * (gap * gap - u * (2.0 + u) + common.e_d * v);
        }
    }
    Ok(y)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaselineResult {
    pub n_z: f64,
    pub e_z: f64,
    pub e_z_up: f64,
    pub n0_z_low: f64,
    pub n11_z_low: f64,
    pub phi11_z_up: f64,
    /// Secure-key terms at the scan minimum, before error-correction leakage.
    pub h_min: f64,
    /// Error-correction leakage plus the correctness term.
    pub h_max: f64,
    /// Minimum over the scan of the key-length expression, `h_min - h_max`.
    pub key_bits: f64,
    /// Scan argmin `(H, M)`.
    pub h_hat: f64,
    pub m_hat: f64,
    pub p_e: f64,
    pub s_a: f64,
    pub s_v: f64,
    /// Signature length in bits; zero when infeasible.
    pub l: u64,
    /// `n_z / (2 L m)`: signatures per run; zero when infeasible.
    pub r_sig: f64,
    pub feasible: bool,
}

struct ScanInputs {
    coef: f64,
    p_plus: f64,
    p_minus: f64,
    t_scale: f64,
    ratio: f64,
    n0: f64,
    penalty: f64,
    leak: f64,
    eps: f64,
}

struct Cell {
    key: f64,
    h_min: f64,
    n11: f64,
    phi: f64,
}

impl ScanInputs {
    fn eval(&self, h: f64, m: f64) -> Cell {
        let n11 = chernoff_observed((self.coef * (self.p_plus - self.p_minus + m - h)).max(0.0), self.eps).0;
        let t11x = (self.t_scale * (m - h / 2.0)).max(0.0);
        let t11z = chernoff_observed(self.ratio * t11x, self.eps).1;
        let phi = if n11 > 0.0 { (t11z / n11).min(0.5) } else { 0.5 };
        let h_min = self.n0 + n11 * (1.0 - h_sat(phi)) - self.penalty;
        Cell { key: h_min - self.leak, h_min, n11, phi }
    }
}

fn linspace(lo: f64, hi: f64, k: usize, i: usize) -> f64 {
    lo + (hi - lo) * i as f64 / (k - 1) as f64
}

/// Smallest `L` with `2 exp(-gap^2 L) <= eps_target`.
pub fn min_length(gap: f64, eps_target: f64) -> Option<u64> {
    if !(gap > 0.0) || !(eps_target > 0.0 && eps_target < 2.0) {
        return None;
    }
    let ok = |l: u64| 2.0 * (-(gap * gap) * l as f64).exp() <= eps_target;
    let guess = ((2.0 / eps_target).ln() / (gap * gap)).ceil();
    if !(guess < 1e18) {
        return None;
    }
    let mut l = (guess as u64).max(1);
    while !ok(l) {
        l += 1;
    }
    while l > 1 && ok(l - 1) {
        l -= 1;
    }
    Some(l)
}

pub fn double_scan(
    bp: &BaselineParams,
    common: &ProtocolParams,
    yields: &BaselineYields,
    m: usize,
    eps_target: f64,
) -> Result<BaselineResult> {
    use Level::{Mu, Nu, Omega, O};
    if bp.grid < 2 {
        return Err(invalid("scan grid needs at least two points per axis"));
    }
    if m == 0 {
        return Err(invalid("document length must be positive"));
    }
    for t in [&yields.n_z, &yields.m_z, &yields.n_x, &yields.m_x] {
        if t.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite yield"));
        }
    }
    let eps = common.eps;
    let el = |x: f64| chernoff_expected(x, eps).0;
    let eu = |x: f64| chernoff_expected(x, eps).1;
    let pp = |a: Level, b: Level| bp.prob_a(a) * bp.prob_b(b);
    let (mu_a, mu_b, nu_a, nu_b, om_a, om_b) = (bp.mu_a, bp.mu_b, bp.nu_a, bp.nu_b, bp.omega_a, bp.omega_b);

    let n_z = yields.nz(Mu, Mu);
    let e_z = if n_z > 0.0 { yields.mz(Mu, Mu) / n_z } else { 0.0 };
    let e_z_up = if n_z > 0.0 { (eu(yields.mz(Mu, Mu)) / n_z).min(1.0) } else { 1.0 };

    let n0_star = f64::max(
        (-mu_a).exp() * bp.p_mu_a / bp.prob_a(O) * el(yields.nz(O, Mu)),
        (-mu_b).exp() * bp.p_mu_b / bp.prob_b(O) * el(yields.nz(Mu, O)),
    );
    let n0 = chernoff_observed(n0_star, eps).0;

    let (wp, np) = if om_a / om_b <= nu_a / nu_b { (om_a, nu_a) } else { (om_b, nu_b) };
    let c3w = om_a * om_b * wp;
    let c3n = nu_a * nu_b * np;
    // The prefactor's sign decides which side of each count bounds n11 from below.
    let up = wp <= np;
    let lo_p = |x: f64| if up { eu(x) } else { el(x) };
    let hi_p = |x: f64| if up { el(x) } else { eu(x) };
    let p_plus = c3w * (nu_a + nu_b).exp() * lo_p(yields.nx(Nu, Nu) - yields.mx(Nu, Nu)) / pp(Nu, Nu)
        + c3n * om_a.exp() * lo_p(yields.nx(Omega, O)) / pp(Omega, O)
        + c3n * om_b.exp() * lo_p(yields.nx(O, Omega)) / pp(O, Omega);
    let p_minus = c3n * (om_a + om_b).exp() * hi_p(yields.nx(Omega, Omega)) / pp(Omega, Omega)
        + c3n * hi_p(yields.nx(O, O)) / pp(O, O);
    let m_scale = c3w * (nu_a + nu_b).exp() / pp(Nu, Nu);
    let (m_lo, m_hi) = (m_scale * el(yields.mx(Nu, Nu)), m_scale * eu(yields.mx(Nu, Nu)));
    let h_of = |lo: bool| {
        let b1 = |x: f64| if lo { el(x) } else { eu(x) };
        let b2 = |x: f64| if lo { eu(x) } else { el(x) };
        c3w * (nu_b.exp() * b1(yields.nx(O, Nu)) / pp(O, Nu) + nu_a.exp() * b1(yields.nx(Nu, O)) / pp(Nu, O)
            - b2(yields.nx(O, O)) / pp(O, O))
    };
    let (h_lo, h_hi) = (h_of(true), h_of(false));

    let mumu = mu_a * mu_b * (-mu_a - mu_b).exp() * pp(Mu, Mu);
    let inputs = ScanInputs {
        coef: mumu / (nu_a * nu_b * om_a * om_b * (wp - np)),
        p_plus,
        p_minus,
        t_scale: pp(Nu, Nu) / (c3w * (nu_a + nu_b).exp()),
        ratio: mumu / (nu_a * nu_b * (-nu_a - nu_b).exp() * pp(Nu, Nu)),
        n0,
        penalty: 2.0 * (2.0 / (eps * eps)).log2() + 2.0 * (1.0 / (2.0 * eps)).log2(),
        leak: n_z * common.f * h_sat(e_z) + (2.0 / eps).log2(),
        eps,
    };

    let k = bp.grid;
    let scan = |hl: f64, hh: f64, ml: f64, mh: f64| -> (usize, usize, Cell) {
        let mut best: Option<(usize, usize, Cell)> = None;
        for i in 0..k {
            let h = linspace(hl, hh, k, i);
            for j in 0..k {
                let c = inputs.eval(h, linspace(ml, mh, k, j));
                if best.as_ref().is_none_or(|b| c.key < b.2.key) {
                    best = Some((i, j, c));
                }
            }
        }
        best.expect("grid is non-empty")
    };
    let (i, j, coarse) = scan(h_lo, h_hi, m_lo, m_hi);
    let (dh, dm) = ((h_hi - h_lo) / (k - 1) as f64, (m_hi - m_lo) / (k - 1) as f64);
    let (hc, mc) = (linspace(h_lo, h_hi, k, i), linspace(m_lo, m_hi, k, j));
    let (ri, rj, fine) = scan(
        (hc - dh).max(h_lo),
        (hc + dh).min(h_hi),
        (mc - dm).max(m_lo),
        (mc + dm).min(m_hi),
    );
    let (best, h_hat, m_hat) = if fine.key < coarse.key {
        let h = linspace((hc - dh).max(h_lo), (hc + dh).min(h_hi), k, ri);
        let m = linspace((mc - dm).max(m_lo), (mc + dm).min(m_hi), k, rj);
        (fine, h, m)
    } else {
        (coarse, hc, mc)
    };

    let (c0, c1) = if n_z > 0.0 { (n0 / n_z, best.n11 / n_z) } else { (0.0, 0.0) };
    let p_e = binary_entropy_inv((c0 + c1 * (1.0 - h_sat(best.phi))).clamp(0.0, 1.0))?;
    let gap = (p_e - e_z_up) / 4.0;
    let length = if gap > 0.0 { min_length(gap, eps_target) } else { None };
    let (l, r_sig, feasible) = match length {
        Some(l) => (l, n_z / (2.0 * l as f64 * m as f64), true),
        None => (0, 0.0, false),
    };
    Ok(BaselineResult {
        n_z,
        e_z,
        e_z_up,
        n0_z_low: n0,
        n11_z_low: best.n11,
        phi11_z_up: best.phi,
        h_min: best.h_min,
        h_max: inputs.leak,
        key_bits: best.key,
        h_hat,
        m_hat,
        p_e,
        s_a: e_z_up + gap,
        s_v: e_z_up + 3.0 * gap,
        l,
        r_sig,
        feasible,
    })
}

/// The three failure bounds at signature length `l`, in the order honest
/// abort, repudiation, forgery.
pub fn failure_bounds(res: &BaselineResult, l: u64) -> [f64; 3] {
    let lf = l as f64;
    [
        2.0 * (-(res.s_a - res.e_z_up).powi(2) * lf).exp(),
        2.0 * (-((res.s_a - res.s_v) / 2.0).powi(2) * lf).exp(),
        2.0 * (-(res.p_e - res.s_v).powi(2) * lf).exp(),
    ]
}
