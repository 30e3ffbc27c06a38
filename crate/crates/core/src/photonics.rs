//! Analytic channel, detector and pairing model, with a pulse-level Monte Carlo
//! oracle for cross-checking it.

use crate::error::{invalid, Error, Result};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Panels used by every phase quadrature.
pub const SIMPSON_PANELS: usize = 2048;
/// Largest Monte Carlo run accepted by [`mc_oracle`].
pub const MC_MAX_BINS: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolParams {
    pub eta_d_l: f64,
    pub eta_d_r: f64,
    pub p_d_l: f64,
    pub p_d_r: f64,
    /// Error-correction efficiency.
    pub f: f64,
    /// Fiber attenuation, dB/km.
    pub alpha_f: f64,
    pub e_d: f64,
    /// Shared value of the smoothing, correctness and estimation failure probabilities.
    pub eps: f64,
    /// Failure probability of the phase-error sampling step.
    pub eps_e: f64,
    /// Clock frequency, Hz.
    pub clock_hz: f64,
    pub phase_slices: u32,
    /// Pairing window, seconds.
    pub t_c: f64,
    /// Number of transmitted pulse pairs N.
    pub pulses: f64,
    pub mu_a: f64,
    pub nu_a: f64,
    pub mu_b: f64,
    pub nu_b: f64,
    pub p_mu_a: f64,
    pub p_nu_a: f64,
    pub p_mu_b: f64,
    pub p_nu_b: f64,
    /// Alice and Bob to measurement node, km.
    pub l_a: f64,
    pub l_b: f64,
    /// Residual phase drift between the two bins of a pair, radians.
    pub delta: f64,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            eta_d_l: 0.80,
            eta_d_r: 0.80,
            p_d_l: 2.5e-10,
            p_d_r: 2.5e-10,
            f: 1.1,
            alpha_f: 0.16,
            e_d: 0.04,
            eps: 1e-10,
            eps_e: 1e-10,
            clock_hz: 1e9,
            phase_slices: 16,
            t_c: 1e-5,
            pulses: 1e12,
            mu_a: 0.15,
            nu_a: 0.05,
            mu_b: 0.15,
            nu_b: 0.05,
            p_mu_a: 0.3,
            p_nu_a: 0.2,
            p_mu_b: 0.3,
            p_nu_b: 0.2,
            l_a: 50.0,
            l_b: 50.0,
            delta: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Intensity {
    Mu,
    Nu,
    O,
}

impl Intensity {
    pub const ALL: [Intensity; 3] = [Intensity::Mu, Intensity::Nu, Intensity::O];

    fn idx(self) -> usize {
        self as usize
    }
}

/// Summed intensity of one party over the two bins of a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Total {
    O,
    Nu,
    Mu,
    TwoNu,
}

impl Total {
    pub const ALL: [Total; 4] = [Total::O, Total::Nu, Total::Mu, Total::TwoNu];

    /// `(early, late)` intensity splits that add up to this total.
    pub fn splits(self) -> &'static [(Intensity, Intensity)] {
        use Intensity::*;
        match self {
            Total::O => &[(O, O)],
            Total::Nu => &[(Nu, O), (O, Nu)],
            Total::Mu => &[(Mu, O), (O, Mu)],
            Total::TwoNu => &[(Nu, Nu)],
        }
    }

    pub fn of(early: Intensity, late: Intensity) -> Option<Total> {
        Total::ALL
            .into_iter()
            .find(|t| t.splits().contains(&(early, late)))
    }

    pub fn label(self) -> &'static str {
        match self {
            Total::O => "o",
            Total::Nu => "nu",
            Total::Mu => "mu",
            Total::TwoNu => "2nu",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Detector {
    L,
    R,
}

/// Clicks with this intensity combination are discarded after the announcement.
pub fn is_filtered(a: Intensity, b: Intensity) -> bool {
    matches!((a, b), (Intensity::Mu, Intensity::Nu) | (Intensity::Nu, Intensity::Mu))
}

impl ProtocolParams {
    pub fn eta_a(&self) -> f64 {
        10f64.powf(-self.alpha_f * self.l_a / 10.0)
    }

    pub fn eta_b(&self) -> f64 {
        10f64.powf(-self.alpha_f * self.l_b / 10.0)
    }

    /// Pairing window in clock bins.
    pub fn n_tc(&self) -> f64 {
        self.clock_hz * self.t_c
    }

    pub fn with_total_distance(&self, l: f64) -> ProtocolParams {
        self.with_split_distance(l, 0.5)
    }

    /// Places `split * l` on Alice's side and the rest on Bob's.
    pub fn with_split_distance(&self, l: f64, split: f64) -> ProtocolParams {
        ProtocolParams { l_a: l * split, l_b: l * (1.0 - split), ..self.clone() }
    }

    pub fn intensity_a(&self, k: Intensity) -> f64 {
        match k {
            Intensity::Mu => self.mu_a,
            Intensity::Nu => self.nu_a,
            Intensity::O => 0.0,
        }
    }

    pub fn intensity_b(&self, k: Intensity) -> f64 {
        match k {
            Intensity::Mu => self.mu_b,
            Intensity::Nu => self.nu_b,
            Intensity::O => 0.0,
        }
    }

    pub fn prob_a(&self, k: Intensity) -> f64 {
        match k {
            Intensity::Mu => self.p_mu_a,
            Intensity::Nu => self.p_nu_a,
            Intensity::O => 1.0 - self.p_mu_a - self.p_nu_a,
        }
    }

    pub fn prob_b(&self, k: Intensity) -> f64 {
        match k {
            Intensity::Mu => self.p_mu_b,
            Intensity::Nu => self.p_nu_b,
            Intensity::O => 1.0 - self.p_mu_b - self.p_nu_b,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64, lo_open: bool| -> Result<()> {
            let ok = if lo_open { v > 0.0 && v <= 1.0 } else { (0.0..1.0).contains(&v) };
            if ok {
                Ok(())
            } else {
                Err(invalid(format!("{name} = {v} out of range")))
            }
        };
        unit("eta_d_l", self.eta_d_l, true)?;
        unit("eta_d_r", self.eta_d_r, true)?;
        unit("p_d_l", self.p_d_l, false)?;
        unit("p_d_r", self.p_d_r, false)?;
        unit("e_d", self.e_d, false)?;
        for (name, v) in [("eps", self.eps), ("eps_e", self.eps_e)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(invalid(format!("{name} = {v} must lie in (0, 1)")));
            }
        }
        if !(self.alpha_f > 0.0) {
            return Err(invalid("alpha_f must be positive"));
        }
        if !(self.f >= 1.0) {
            return Err(invalid("error-correction efficiency f must be at least 1"));
        }
        if self.phase_slices < 2 || self.phase_slices % 2 != 0 {
            return Err(invalid("phase_slices must be an even number >= 2"));
        }
        if !(self.clock_hz > 0.0 && self.t_c >= 0.0 && self.pulses >= 0.0) {
            return Err(invalid("clock_hz, t_c and pulses must be nonnegative"));
        }
        if !(self.l_a >= 0.0 && self.l_b >= 0.0) {
            return Err(invalid("distances must be nonnegative"));
        }
        for (party, mu, nu, pm, pn) in [
            ("a", self.mu_a, self.nu_a, self.p_mu_a, self.p_nu_a),
            ("b", self.mu_b, self.nu_b, self.p_mu_b, self.p_nu_b),
        ] {
            if !(mu > nu && nu > 0.0) {
                return Err(invalid(format!("party {party}: need mu > nu > 0")));
            }
            if !(pm > 0.0 && pn > 0.0 && pm + pn < 1.0) {
                return Err(invalid(format!("party {party}: probabilities must be positive and sum below 1")));
            }
        }
        Ok(())
    }
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(invalid(format!("bessel_i0 of non-finite {x}")));
    }
    let x = x.abs();
    if x <= 30.0 {
        let q = x * x / 4.0;
        let (mut term, mut sum, mut k) = (1.0f64, 1.0f64, 0.0f64);
        loop {
            k += 1.0;
            term *= q / (k * k);
            sum += term;
            if term < 1e-17 * sum {
                return Ok(sum);
            }
        }
    }
    let (mut term, mut sum, mut k) = (1.0f64, 1.0f64, 0.0f64);
    loop {
        k += 1.0;
        let next = term * (2.0 * k - 1.0).powi(2) / (8.0 * k * x);
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    Ok(sum * x.exp() / (2.0 * PI * x).sqrt())
}

fn i0m1(x: f64) -> f64 {
    bessel_i0_minus_one(x).expect("finite argument")
}

/// `I0(x) - 1`, accurate near zero where `I0(x)` rounds to one.
pub fn bessel_i0_minus_one(x: f64) -> Result<f64> {
    if !(x.abs() < 1.0) {
        return Ok(bessel_i0(x)? - 1.0);
    }
    let q = x * x / 4.0;
    let (mut term, mut sum, mut k) = (q, q, 1.0f64);
    while term > 1e-17 * sum {
        k += 1.0;
        term *= q / (k * k);
        sum += term;
    }
    Ok(sum)
}

/// Composite Simpson rule on `[a, b]` with [`SIMPSON_PANELS`] panels.
pub fn simpson(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let n = SIMPSON_PANELS;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[derive(Clone, Copy, Debug)]
struct Gain {
    x: f64,
    /// Half the received intensity before detector efficiency.
    h: f64,
    y_l: f64,
    y_r: f64,
    pd_l: f64,
    pd_r: f64,
    eta_l: f64,
    eta_r: f64,
}

/// `1 - (1 - pd) e^{-t}` without cancellation for small `pd` and `t`.
fn click(pd: f64, t: f64) -> f64 {
    pd - (1.0 - pd) * (-t).exp_m1()
}

impl Gain {
    fn new(k_a: f64, k_b: f64, p: &ProtocolParams) -> Gain {
        let (ea, eb) = (p.eta_a(), p.eta_b());
        let s = ea * k_a + eb * k_b;
        Gain {
            x: (ea * k_a * eb * k_b).sqrt(),
            h: s / 2.0,
            y_l: (1.0 - p.p_d_l) * (-p.eta_d_l * s / 2.0).exp(),
            y_r: (1.0 - p.p_d_r) * (-p.eta_d_r * s / 2.0).exp(),
            pd_l: p.p_d_l,
            pd_r: p.p_d_r,
            eta_l: p.eta_d_l,
            eta_r: p.eta_d_r,
        }
    }

    fn theta(&self, theta: f64, det: Detector) -> f64 {
        let c = theta.cos() * self.x;
        // The mean photon number at each detector is eta (h -/+ c) >= 0.
        let v = match det {
            Detector::L => self.y_r * (self.eta_r * c).exp() * click(self.pd_l, self.eta_l * (self.h + c)),
            Detector::R => self.y_l * (-self.eta_l * c).exp() * click(self.pd_r, self.eta_r * (self.h - c)),
        };
        v.max(0.0)
    }

    fn total(&self) -> f64 {
        let (ml, mr) = (click(self.pd_l, self.eta_l * self.h), click(self.pd_r, self.eta_r * self.h));
        let v = self.y_l * mr
            + self.y_r * ml
            + self.y_l * i0m1(self.eta_l * self.x)
            + self.y_r * i0m1(self.eta_r * self.x)
            - 2.0 * self.y_l * self.y_r * i0m1((self.eta_l - self.eta_r) * self.x);
        v.max(0.0)
    }
}

/// Probability that only `det` clicks when the phase difference is `theta`.
pub fn gain_theta(k_a: f64, k_b: f64, theta: f64, det: Detector, params: &ProtocolParams) -> f64 {
    Gain::new(k_a, k_b, params).theta(theta, det)
}

/// Phase-averaged single-detector click probability, closed Bessel form.
pub fn overall_gain(k_a: f64, k_b: f64, params: &ProtocolParams) -> f64 {
    Gain::new(k_a, k_b, params).total()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairingStats {
    pub q_tot: f64,
    pub q_tc: f64,
    pub n_tot: f64,
    /// Mean pairing interval, seconds.
    pub t_mean: f64,
    /// Expected set sizes indexed by `[Total as usize][Total as usize]`.
    pub n_sets: [[f64; 4]; 4],
    /// Expected errors in the `[mu, mu]` set.
    pub m_z: f64,
    /// Expected errors in the `[2nu, 2nu]` set.
    pub m_x: f64,
    /// `q_(k_a|k_b)` indexed by [`Intensity`].
    pub gains: [[f64; 3]; 3],
}

impl PairingStats {
    pub fn n(&self, a: Total, b: Total) -> f64 {
        self.n_sets[a as usize][b as usize]
    }
}

pub fn pairing_stats(params: &ProtocolParams) -> Result<PairingStats> {
    let mut gains = [[0.0; 3]; 3];
    for a in Intensity::ALL {
        for b in Intensity::ALL {
            gains[a.idx()][b.idx()] = overall_gain(params.intensity_a(a), params.intensity_b(b), params);
        }
    }
    let w = |a: Intensity, b: Intensity| params.prob_a(a) * params.prob_b(b) * gains[a.idx()][b.idx()];
    let mut q_tot = 0.0;
    for a in Intensity::ALL {
        for b in Intensity::ALL {
            if !is_filtered(a, b) {
                q_tot += w(a, b);
            }
        }
    }
    if !(q_tot > 0.0) {
        return Err(Error::DegenerateChannel("no click events survive filtering".into()));
    }
    let n_tc = params.n_tc();
    let q_tc = -(n_tc * (-q_tot).ln_1p()).exp_m1();
    let (n_tot, t_mean) = if q_tc > 0.0 {
        (
            params.pulses * q_tot / (1.0 + 1.0 / q_tc),
            (1.0 - n_tc * q_tot * (1.0 / q_tc - 1.0)) / (params.clock_hz * q_tot),
        )
    } else {
        (0.0, 0.0)
    };

    let mut n_sets = [[0.0; 4]; 4];
    for ta in Total::ALL {
        for tb in Total::ALL {
            let mut s = 0.0;
            for &(ae, al) in ta.splits() {
                for &(be, bl) in tb.splits() {
                    if is_filtered(ae, be) || is_filtered(al, bl) {
                        continue;
                    }
                    s += w(ae, be) * w(al, bl);
                }
            }
            n_sets[ta as usize][tb as usize] = n_tot * s / (q_tot * q_tot);
        }
    }

    let g = Gain::new(params.nu_a, params.nu_b, params);
    let pp = (params.p_nu_a * params.p_nu_b / q_tot).powi(2);
    let pre = n_tot / (params.phase_slices as f64 * PI);
    let q = |t: f64| g.theta(t, Detector::L) + g.theta(t, Detector::R);
    n_sets[Total::TwoNu as usize][Total::TwoNu as usize] = pre * pp * simpson(0.0, 2.0 * PI, |t| q(t) * q(t));
    let (d, ed) = (params.delta, params.e_d);
    let m_x = pre
        * pp
        * simpson(0.0, 2.0 * PI, |t| {
            let (l0, r0) = (g.theta(t, Detector::L), g.theta(t, Detector::R));
            let (l1, r1) = (g.theta(t + d, Detector::L), g.theta(t + d, Detector::R));
            (1.0 - ed) * (l0 * r1 + r0 * l1) + ed * (l0 * l1 + r0 * r1)
        });
    let (mu, o) = (Intensity::Mu, Intensity::O);
    let m_z = n_tot * 2.0 * w(mu, mu) * w(o, o) / (q_tot * q_tot);

    Ok(PairingStats { q_tot, q_tc, n_tot, t_mean, n_sets, m_z, m_x, gains })
}

/// Empirical value with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct McStats {
    pub bins: u64,
    pub clicks: u64,
    pub q_tot: Estimate,
    pub n_tot: Estimate,
    pub n_mumu: Estimate,
    pub n_2nu2nu: Estimate,
    pub m_mumu: Estimate,
    pub m_2nu2nu: Estimate,
}

#[derive(Clone, Copy)]
struct Click {
    t: u64,
    ka: Intensity,
    kb: Intensity,
    // Announced phase-slice difference j_a - j_b mod M.
    dphase: u32,
    det: Detector,
}

#[derive(Default, Clone, Copy)]
struct Counts {
    clicks: u64,
    pairs: u64,
    n_mumu: u64,
    m_mumu: u64,
    n_2nu2nu: u64,
    m_2nu2nu: u64,
}

impl Counts {
    fn add(self, o: Counts) -> Counts {
        Counts {
            clicks: self.clicks + o.clicks,
            pairs: self.pairs + o.pairs,
            n_mumu: self.n_mumu + o.n_mumu,
            m_mumu: self.m_mumu + o.m_mumu,
            n_2nu2nu: self.n_2nu2nu + o.n_2nu2nu,
            m_2nu2nu: self.m_2nu2nu + o.m_2nu2nu,
        }
    }
}

/// Whether a phase-matched X-basis pair records an error before misalignment.
/// Equal slice differences expect different detectors; differences of `pi`
/// expect the same detector. The remaining `pi`/different-detector pattern is
/// the no-error outcome.
fn x_basis_error(phase_flip: bool, same_detector: bool) -> bool {
    if phase_flip {
        same_detector
    } else {
        !same_detector
    }
}

fn pick(u: f64, probs: &[f64; 3]) -> Intensity {
    if u < probs[0] {
        Intensity::Mu
    } else if u < probs[0] + probs[1] {
        Intensity::Nu
    } else {
        Intensity::O
    }
}

fn run_shard(params: &ProtocolParams, table: &[[f64; 2]], bins: u64, seed: u64) -> Counts {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let m = params.phase_slices;
    let pa = [params.p_mu_a, params.p_nu_a, params.prob_a(Intensity::O)];
    let pb = [params.p_mu_b, params.p_nu_b, params.prob_b(Intensity::O)];
    let window = params.n_tc();
    let mut c = Counts::default();
    let mut pending: Option<Click> = None;
    for t in 0..bins {
        let ka = pick(rng.gen(), &pa);
        let kb = pick(rng.gen(), &pb);
        let ja: u32 = rng.gen_range(0..m);
        let jb: u32 = rng.gen_range(0..m);
        let dphase = (ja + m - jb) % m;
        let [pl, pr] = table[(ka.idx() * 3 + kb.idx()) * m as usize + dphase as usize];
        let u: f64 = rng.gen();
        let det = if u < pl {
            Detector::L
        } else if u < pl + pr {
            Detector::R
        } else {
            continue;
        };
        if is_filtered(ka, kb) {
            continue;
        }
        c.clicks += 1;
        let click = Click { t, ka, kb, dphase, det };
        match pending.take() {
            Some(e) if ((t - e.t) as f64) <= window => {
                c.pairs += 1;
                classify(&mut c, &e, &click, m, params.e_d, &mut rng);
            }
            _ => pending = Some(click),
        }
    }
    c
}

fn classify(c: &mut Counts, e: &Click, l: &Click, m: u32, e_d: f64, rng: &mut impl Rng) {
    let ta = Total::of(e.ka, l.ka);
    let tb = Total::of(e.kb, l.kb);
    match (ta, tb) {
        (Some(Total::Mu), Some(Total::Mu)) => {
            c.n_mumu += 1;
            let alice_early = e.ka == Intensity::Mu;
            let bob_early = e.kb == Intensity::Mu;
            if alice_early == bob_early {
                c.m_mumu += 1;
            }
        }
        (Some(Total::TwoNu), Some(Total::TwoNu)) => {
            let diff = (l.dphase + m - e.dphase) % m;
            let phase_flip = match diff {
                0 => false,
                d if d == m / 2 => true,
                _ => return,
            };
            c.n_2nu2nu += 1;
            let mut err = x_basis_error(phase_flip, e.det == l.det);
            if rng.gen::<f64>() < e_d {
                err = !err;
            }
            if err {
                c.m_2nu2nu += 1;
            }
        }
        _ => {}
    }
}

/// Pulse-level simulation of preparation, clicks, filtering, pairing and sifting.
///
/// Bins are split into `shards` independent streams, each seeded from `rng`,
/// and the counts are summed. Residual phase drift is not simulated.
pub fn mc_oracle<R: RngCore + ?Sized>(
    params: &ProtocolParams,
    n_bins: u64,
    shards: usize,
    rng: &mut R,
) -> Result<McStats> {
    if n_bins > MC_MAX_BINS {
        return Err(Error::ResourceLimit(format!("{n_bins} bins exceeds {MC_MAX_BINS}")));
    }
    let shards = shards.max(1) as u64;
    let m = params.phase_slices as usize;
    let mut table = vec![[0.0f64; 2]; 9 * m];
    for a in Intensity::ALL {
        for b in Intensity::ALL {
            let g = Gain::new(params.intensity_a(a), params.intensity_b(b), params);
            for d in 0..m {
                let th = 2.0 * PI * d as f64 / m as f64;
                table[(a.idx() * 3 + b.idx()) * m + d] = [g.theta(th, Detector::L), g.theta(th, Detector::R)];
            }
        }
    }
    let seeds: Vec<u64> = (0..shards).map(|_| rng.next_u64()).collect();
    let counts = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let bins = n_bins / shards + u64::from((i as u64) < n_bins % shards);
            run_shard(params, &table, bins, s)
        })
        .reduce(Counts::default, Counts::add);
    let poisson = |k: u64| Estimate { value: k as f64, se: (k as f64).sqrt() };
    let q = if n_bins > 0 { counts.clicks as f64 / n_bins as f64 } else { 0.0 };
    Ok(McStats {
        bins: n_bins,
        clicks: counts.clicks,
        q_tot: Estimate {
            value: q,
            se: if n_bins > 0 { (q * (1.0 - q) / n_bins as f64).sqrt() } else { 0.0 },
        },
        n_tot: poisson(counts.pairs),
        n_mumu: poisson(counts.n_mumu),
        n_2nu2nu: poisson(counts.n_2nu2nu),
        m_mumu: poisson(counts.m_mumu),
        m_2nu2nu: poisson(counts.m_2nu2nu),
    })
}

/// One analytic-versus-empirical comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct Agreement {
    pub name: &'static str,
    pub analytic: f64,
    pub empirical: f64,
    /// Standard error under the analytic value.
    pub sigma: f64,
    /// `|empirical - analytic| / sigma`.
    pub z: f64,
}

/// Compares a Monte Carlo run with the analytic model evaluated at `N = bins`.
pub fn compare_with_mc(analytic: &PairingStats, mc: &McStats) -> Vec<Agreement> {
    let bins = mc.bins as f64;
    let entry = |name, a: f64, e: f64, sigma: f64| {
        let z = if sigma > 0.0 {
            (e - a).abs() / sigma
        } else if (e - a).abs() == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Agreement { name, analytic: a, empirical: e, sigma, z }
    };
    let count = |name, a: f64, e: &Estimate| entry(name, a, e.value, a.max(0.0).sqrt());
    vec![
        entry(
            "q_tot",
            analytic.q_tot,
            mc.q_tot.value,
            (analytic.q_tot * (1.0 - analytic.q_tot) / bins).sqrt(),
        ),
        count("n_mumu", analytic.n(Total::Mu, Total::Mu), &mc.n_mumu),
        count("n_2nu2nu", analytic.n(Total::TwoNu, Total::TwoNu), &mc.n_2nu2nu),
        count("m_mumu", analytic.m_z, &mc.m_mumu),
        count("m_2nu2nu", analytic.m_x, &mc.m_2nu2nu),
    ]
}
