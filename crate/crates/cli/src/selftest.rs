//! Self-test battery with a machine-readable report.

use crate::config::Config;
use anyhow::Result;
use qds_core::finitekey::{binary_entropy, binary_entropy_inv, chernoff_expected, chernoff_observed, forgery_test};
use qds_core::gf2::{derive_irreducible, BitString, Gf2Poly};
use qds_core::messaging::{run_three_party, security_bounds, split_keys, Verdict};
use qds_core::otuh::{toeplitz_hash, ToeplitzSpec};
use qds_core::photonics::{compare_with_mc, mc_oracle, pairing_stats};
use qds_core::sweep::analyze_async;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

/// Deliberate model errors for checking that the battery notices them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Flip the sign of the dark-count probability in the analytic model.
    PdSign,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub deviation: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Dark-count probability used by the Monte Carlo probe, large enough that
/// dark counts move every compared statistic by many standard errors.
pub const PROBE_P_D: f64 = 1e-3;

fn mc_check(cfg: &Config, fault: Option<Fault>) -> Result<Check> {
    let mut truth = cfg.protocol().with_total_distance(50.0);
    truth.p_d_l = truth.p_d_l.max(PROBE_P_D);
    truth.p_d_r = truth.p_d_r.max(PROBE_P_D);
    truth.pulses = cfg.selftest_bins as f64;
    let mut model = truth.clone();
    if fault == Some(Fault::PdSign) {
        model.p_d_l = -model.p_d_l;
        model.p_d_r = -model.p_d_r;
    }
    let analytic = pairing_stats(&model)?;
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mc = mc_oracle(&truth, cfg.selftest_bins, 16, &mut rng)?;
    let agree = compare_with_mc(&analytic, &mc);
    let worst = agree.iter().map(|a| if a.z.is_finite() { a.z } else { f64::MAX }).fold(0.0, f64::max);
    let detail = agree.iter().map(|a| format!("{}: z = {:.2}", a.name, a.z)).collect::<Vec<_>>().join("; ");
    Ok(Check { name: "mc_vs_analytic".into(), passed: worst <= 5.0, deviation: worst, threshold: 5.0, detail })
}

fn chernoff_check(rng: &mut ChaCha12Rng) -> Check {
    let mut bad = 0;
    for _ in 0..10_000 {
        let x = 10f64.powf(rng.gen_range(-2.0..9.0));
        let eps = 10f64.powf(rng.gen_range(-15.0..-1.0));
        let (ol, ou) = chernoff_observed(x, eps);
        let (el, eu) = chernoff_expected(x, eps);
        if !(ol <= x && x <= ou && el <= x && x <= eu) {
            bad += 1;
        }
    }
    Check {
        name: "chernoff_bracket".into(),
        passed: bad == 0,
        deviation: bad as f64,
        threshold: 0.0,
        detail: "violations over 10000 draws".into(),
    }
}

fn entropy_check(rng: &mut ChaCha12Rng) -> Result<Check> {
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let x: f64 = rng.gen_range(0.0..0.5);
        worst = worst.max((binary_entropy_inv(binary_entropy(x)?)? - x).abs());
    }
    Ok(Check {
        name: "entropy_round_trip".into(),
        passed: worst < 1e-10,
        deviation: worst,
        threshold: 1e-10,
        detail: "max |inv(H(x)) - x| over 10000 draws".into(),
    })
}

fn random_spec(rng: &mut ChaCha12Rng, n: usize, m: usize) -> Result<ToeplitzSpec> {
    let p = derive_irreducible(&BitString::random(rng, n))?;
    Ok(ToeplitzSpec::new(p, BitString::random(rng, n), m)?)
}

fn hash_check(rng: &mut ChaCha12Rng) -> Result<Check> {
    let mut bad = 0usize;
    let trials = 1000;
    for t in 0..trials {
        let n = if t % 2 == 0 { 8 } else { 16 };
        let m = 64;
        let spec = random_spec(rng, n, m)?;
        let q = Gf2Poly::from_coeffs(BitString::random(rng, m - n))?;
        let mut kernel = spec.poly().mul(&q).coeffs().clone();
        while kernel.len() < m {
            kernel.push(false);
        }
        let kernel = kernel.slice(0, m);
        if !toeplitz_hash(&spec, &kernel)?.is_zero() {
            bad += 1;
        }
        let a = BitString::random(rng, m);
        let b = BitString::random(rng, m);
        let lhs = toeplitz_hash(&spec, &a.xor(&b)?)?;
        let rhs = toeplitz_hash(&spec, &a)?.xor(&toeplitz_hash(&spec, &b)?)?;
        if lhs != rhs {
            bad += 1;
        }
    }
    Ok(Check {
        name: "hash_kernel_linearity".into(),
        passed: bad == 0,
        deviation: bad as f64,
        threshold: 0.0,
        detail: format!("failures over {trials} kernel and {trials} linearity cases"),
    })
}

fn messaging_check(rng: &mut ChaCha12Rng) -> Result<Check> {
    let mut bad = 0usize;
    let trials = 200;
    for _ in 0..trials {
        let shares = split_keys(rng, 32)?;
        let doc = BitString::random(rng, 256);
        let p_a = BitString::random(rng, 32);
        let ok = run_three_party(&doc, &shares, &p_a, None)?;
        if ok.bob != Verdict::Accept || ok.charlie != Verdict::Accept {
            bad += 1;
        }
        let pos = rng.gen_range(0..256);
        let tampered = run_three_party(&doc, &shares, &p_a, Some(&|b| b.doc.flip(pos)))?;
        if tampered.charlie == Verdict::Accept {
            bad += 1;
        }
    }
    Ok(Check {
        name: "sign_verify".into(),
        passed: bad == 0,
        deviation: bad as f64,
        threshold: 0.0,
        detail: format!("wrong verdicts over {trials} honest and {trials} tampered runs"),
    })
}

fn sizing_check(cfg: &Config) -> Result<Check> {
    let p = cfg.protocol().with_split_distance(100.0, cfg.split);
    let a = analyze_async(&p, cfg.m, cfg.eps_target)?;
    let s = a.sizing;
    let minimal = s.feasible
        && forgery_test(&a.est, &p, cfg.m, cfg.eps_target, s.n)?.0
        && (s.n == 1 || !forgery_test(&a.est, &p, cfg.m, cfg.eps_target, s.n - 1)?.0);
    let eps_for = security_bounds(cfg.m, s.h_n, p.eps, p.eps).eps_for;
    Ok(Check {
        name: "signature_sizing".into(),
        passed: minimal,
        deviation: eps_for,
        threshold: cfg.eps_target,
        detail: format!("n = {} at 100 km", s.n),
    })
}

pub fn run(cfg: &Config, fault: Option<Fault>) -> Result<Report> {
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let checks = vec![
        mc_check(cfg, fault)?,
        chernoff_check(&mut rng),
        entropy_check(&mut rng)?,
        hash_check(&mut rng)?,
        messaging_check(&mut rng)?,
        sizing_check(cfg)?,
    ];
    Ok(Report { passed: checks.iter().all(|c| c.passed), checks })
}
