//! Deterministic intensity search: a coarse grid followed by a shrinking
//! coordinate pattern search.

use crate::baseline::BaselineParams;
use crate::photonics::ProtocolParams;
use crate::sweep::{analyze_async, analyze_baseline};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerGrid {
    /// Grid points per axis in the coarse pass.
    pub points: usize,
    /// Pattern-search iterations after the coarse pass.
    pub rounds: usize,
    /// Lower corner of `(mu, nu, p_mu, p_nu)`.
    pub lo: [f64; 4],
    pub hi: [f64; 4],
}

impl Default for OptimizerGrid {
    fn default() -> Self {
        OptimizerGrid { points: 5, rounds: 40, lo: [0.05, 0.01, 0.05, 0.05], hi: [0.8, 0.3, 0.8, 0.8] }
    }
}

/// Maximizes `f` over the box. Returns the argmax and its value; ties keep
/// the earlier point in grid order.
pub fn maximize(f: impl Fn([f64; 4]) -> f64 + Sync, grid: &OptimizerGrid) -> ([f64; 4], f64) {
    let k = grid.points.max(2);
    let axis = |d: usize, i: usize| grid.lo[d] + (grid.hi[d] - grid.lo[d]) * i as f64 / (k - 1) as f64;
    let cells: Vec<[f64; 4]> = (0..k.pow(4))
        .map(|c| [axis(0, c / k.pow(3)), axis(1, c / k.pow(2) % k), axis(2, c / k % k), axis(3, c % k)])
        .collect();
    let vals: Vec<f64> = cells.par_iter().map(|&x| f(x)).collect();
    let mut best = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v > vals[best] {
            best = i;
        }
    }
    let (mut x, mut fx) = (cells[best], vals[best]);
    let mut step: [f64; 4] = std::array::from_fn(|d| (grid.hi[d] - grid.lo[d]) / (k - 1) as f64 / 2.0);
    for _ in 0..grid.rounds {
        let mut moved = false;
        for d in 0..4 {
            for sign in [1.0, -1.0] {
                let mut y = x;
                y[d] = (y[d] + sign * step[d]).clamp(grid.lo[d], grid.hi[d]);
                let fy = f(y);
                if fy > fx {
                    (x, fx, moved) = (y, fy, true);
                    break;
                }
            }
        }
        if !moved {
            step.iter_mut().for_each(|s| *s /= 2.0);
        }
    }
    (x, fx)
}

fn admissible(x: [f64; 4]) -> bool {
    x[0] > x[1] && x[1] > 0.0 && x[2] > 0.0 && x[3] > 0.0 && x[2] + x[3] < 0.95
}

/// Symmetric intensities and probabilities maximizing the signature count.
pub fn optimize_async(params: &ProtocolParams, m: usize, eps_target: f64, grid: &OptimizerGrid) -> ProtocolParams {
    let with = |x: [f64; 4]| ProtocolParams {
        mu_a: x[0],
        mu_b: x[0],
        nu_a: x[1],
        nu_b: x[1],
        p_mu_a: x[2],
        p_mu_b: x[2],
        p_nu_a: x[3],
        p_nu_b: x[3],
        ..params.clone()
    };
    let (x, v) = maximize(
        |x| {
            if !admissible(x) {
                return f64::NEG_INFINITY;
            }
            analyze_async(&with(x), m, eps_target).map_or(0.0, |a| a.sizing.r_sig)
        },
        grid,
    );
    if v > 0.0 {
        with(x)
    } else {
        params.clone()
    }
}

/// Same search for the baseline; `omega` and its probability stay fixed.
pub fn optimize_baseline(
    bp: &BaselineParams,
    common: &ProtocolParams,
    m: usize,
    eps_target: f64,
    grid: &OptimizerGrid,
) -> BaselineParams {
    let with = |x: [f64; 4]| BaselineParams {
        mu_a: x[0],
        mu_b: x[0],
        nu_a: x[1],
        nu_b: x[1],
        p_mu_a: x[2],
        p_mu_b: x[2],
        p_nu_a: x[3],
        p_nu_b: x[3],
        ..bp.clone()
    };
    let (x, v) = maximize(
        |x| {
            let cand = with(x);
            if !admissible(x) || cand.validate().is_err() {
                return f64::NEG_INFINITY;
            }
            analyze_baseline(&cand, common, m, eps_target).map_or(0.0, |r| r.r_sig)
        },
        grid,
    );
    if v > 0.0 {
        with(x)
    } else {
        bp.clone()
    }
}
