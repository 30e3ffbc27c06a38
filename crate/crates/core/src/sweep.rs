//! Distance sweeps for both protocols.

use crate::baseline::{baseline_yields, double_scan, BaselineParams, BaselineResult};
use crate::error::{invalid, Error, Result};
use crate::optimize::{optimize_async, optimize_baseline, OptimizerGrid};
use crate::finitekey::{entropy_budget, estimate, signature_length, EntropyBudget, EstimatedParams, SignatureSizing};
use crate::photonics::{pairing_stats, PairingStats, ProtocolParams};
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub struct AsyncAnalysis {
    pub stats: PairingStats,
    pub est: EstimatedParams,
    pub budget: EntropyBudget,
    pub sizing: SignatureSizing,
}

pub fn analyze_async(params: &ProtocolParams, m: usize, eps_target: f64) -> Result<AsyncAnalysis> {
    params.validate()?;
    let stats = pairing_stats(params)?;
    let est = estimate(params, &stats)?;
    let budget = entropy_budget(&est, params);
    let sizing = signature_length(&est, params, m, eps_target)?;
    Ok(AsyncAnalysis { stats, est, budget, sizing })
}

pub fn analyze_baseline(
    bp: &BaselineParams,
    common: &ProtocolParams,
    m: usize,
    eps_target: f64,
) -> Result<BaselineResult> {
    bp.validate()?;
    common.validate()?;
    let y = baseline_yields(bp, common)?;
    double_scan(bp, common, &y, m, eps_target)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    /// Document length in bits.
    pub m: usize,
    pub eps_target: f64,
    /// Fraction of the total distance on Alice's side.
    pub split: f64,
    pub optimize: Option<OptimizerGrid>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { m: 1000, eps_target: 1e-10, split: 0.5, optimize: None }
    }
}

/// `l_min, l_min + step, ...` with `l_max` always included as the last point.
pub fn distance_grid(l_min: f64, l_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(l_min >= 0.0 && l_min <= l_max && l_max.is_finite()) {
        return Err(invalid(format!("distance range [{l_min}, {l_max}] is empty or negative")));
    }
    if !(step > 0.0) {
        return Err(invalid(format!("step {step} must be positive")));
    }
    let mut out = Vec::new();
    let mut i = 0u64;
    loop {
        let l = l_min + i as f64 * step;
        if l >= l_max - 1e-9 * step {
            break;
        }
        out.push(l);
        i += 1;
    }
    out.push(l_max);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfilePoint {
    pub distance_km: f64,
    pub n_z: f64,
    pub h_min_eps: f64,
    pub h_max_cor: f64,
    pub h_total: f64,
    pub h_min_frac: f64,
    pub h_max_frac: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    Async,
    Baseline,
}

impl Protocol {
    pub fn label(self) -> &'static str {
        match self {
            Protocol::Async => "async",
            Protocol::Baseline => "baseline",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateRow {
    pub distance_km: f64,
    pub pulses: f64,
    pub protocol: Protocol,
    /// Signatures per transmitted pulse pair.
    pub r_sig: f64,
    /// Signatures per run.
    pub signatures: f64,
    /// Signature length in bits.
    pub n: u64,
    pub n_z: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub h_total: f64,
    pub feasible: bool,
}

fn no_key(e: &Error) -> bool {
    matches!(e, Error::NoKey(_) | Error::DegenerateChannel(_))
}

pub fn profile_point(params: &ProtocolParams, l: f64, split: f64) -> Result<ProfilePoint> {
    let p = params.with_split_distance(l, split);
    p.validate()?;
    match pairing_stats(&p).and_then(|s| estimate(&p, &s)) {
        Ok(est) => {
            let b = entropy_budget(&est, &p);
            Ok(ProfilePoint {
                distance_km: l,
                n_z: est.n_z,
                h_min_eps: b.h_min_eps,
                h_max_cor: b.h_max_cor,
                h_total: b.h_total,
                h_min_frac: b.h_min_frac,
                h_max_frac: b.h_max_frac,
            })
        }
        Err(e) if no_key(&e) => Ok(ProfilePoint {
            distance_km: l,
            n_z: 0.0,
            h_min_eps: 0.0,
            h_max_cor: 0.0,
            h_total: 0.0,
            h_min_frac: 0.0,
            h_max_frac: 0.0,
        }),
        Err(e) => Err(e),
    }
}

/// Entropy profile at each distance, in input order.
pub fn entropy_profile(params: &ProtocolParams, distances: &[f64], split: f64) -> Result<Vec<ProfilePoint>> {
    distances.par_iter().map(|&l| profile_point(params, l, split)).collect()
}

/// Async and baseline rows at one distance.
pub fn rate_rows(params: &ProtocolParams, bp: &BaselineParams, l: f64, opts: &SweepOptions) -> Result<[RateRow; 2]> {
    let mut p = params.with_split_distance(l, opts.split);
    let mut bp = bp.clone();
    if let Some(g) = &opts.optimize {
        p = optimize_async(&p, opts.m, opts.eps_target, g);
        bp = optimize_baseline(&bp, &p, opts.m, opts.eps_target, g);
    }
    let pulses = p.pulses;
    let a = match analyze_async(&p, opts.m, opts.eps_target) {
        Ok(a) => RateRow {
            distance_km: l,
            pulses,
            protocol: Protocol::Async,
            r_sig: a.sizing.r_sig / pulses,
            signatures: a.sizing.r_sig,
            n: a.sizing.n,
            n_z: a.est.n_z,
            h_min: a.budget.h_min_eps,
            h_max: a.budget.h_max_cor,
            h_total: a.budget.h_total,
            feasible: a.sizing.feasible,
        },
        Err(e) if no_key(&e) => RateRow {
            distance_km: l,
            pulses,
            protocol: Protocol::Async,
            r_sig: 0.0,
            signatures: 0.0,
            n: 0,
            n_z: 0.0,
            h_min: 0.0,
            h_max: 0.0,
            h_total: 0.0,
            feasible: false,
        },
        Err(e) => return Err(e),
    };
    let r = analyze_baseline(&bp, &p, opts.m, opts.eps_target)?;
    let b = RateRow {
        distance_km: l,
        pulses,
        protocol: Protocol::Baseline,
        r_sig: r.r_sig / pulses,
        signatures: r.r_sig,
        n: r.l,
        n_z: r.n_z,
        h_min: r.h_min,
        h_max: r.h_max,
        h_total: r.key_bits,
        feasible: r.feasible,
    };
    Ok([a, b])
}

/// Rows ordered by pulse count, then distance, then protocol.
pub fn rate_curve(
    params: &ProtocolParams,
    bp: &BaselineParams,
    distances: &[f64],
    pulses: &[f64],
    opts: &SweepOptions,
) -> Result<Vec<RateRow>> {
    let jobs: Vec<(f64, f64)> = pulses.iter().flat_map(|&n| distances.iter().map(move |&l| (n, l))).collect();
    let rows: Vec<[RateRow; 2]> = jobs
        .par_iter()
        .map(|&(n, l)| rate_rows(&ProtocolParams { pulses: n, ..params.clone() }, bp, l, opts))
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Largest distance on a `step` km grid up to `limit` at which `feasible` holds.
pub fn max_distance(step: f64, limit: f64, feasible: impl Fn(f64) -> Result<bool> + Sync) -> Result<f64> {
    let grid = distance_grid(0.0, limit, step)?;
    let ok: Vec<bool> = grid.par_iter().map(|&l| feasible(l)).collect::<Result<_>>()?;
    Ok(grid.iter().zip(&ok).filter(|(_, &f)| f).map(|(l, _)| *l).fold(0.0, f64::max))
}

pub fn async_max_distance(params: &ProtocolParams, opts: &SweepOptions, step: f64, limit: f64) -> Result<f64> {
    max_distance(step, limit, |l| {
        match analyze_async(&params.with_split_distance(l, opts.split), opts.m, opts.eps_target) {
            Ok(a) => Ok(a.sizing.feasible),
            Err(e) if no_key(&e) => Ok(false),
            Err(e) => Err(e),
        }
    })
}

pub fn baseline_max_distance(
    params: &ProtocolParams,
    bp: &BaselineParams,
    opts: &SweepOptions,
    step: f64,
    limit: f64,
) -> Result<f64> {
    max_distance(step, limit, |l| {
        Ok(analyze_baseline(bp, &params.with_split_distance(l, opts.split), opts.m, opts.eps_target)?.feasible)
    })
}
