//! Flat TOML configuration. Every key doubles as a command-line flag.

use anyhow::{bail, Context, Result};
use qds_core::baseline::BaselineParams;
use qds_core::optimize::OptimizerGrid;
use qds_core::photonics::ProtocolParams;
use qds_core::sweep::SweepOptions;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Environment variable naming a config file when `--config` is absent.
pub const CONFIG_ENV: &str = "QDS_CONFIG";

macro_rules! config_keys {
    ($($(#[doc = $doc:literal])* $key:ident: $ty:ty = $default:expr;)*) => {
        #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
        #[serde(default, deny_unknown_fields)]
        pub struct Config {
            $($(#[doc = $doc])* pub $key: $ty,)*
        }

        impl Default for Config {
            fn default() -> Self {
                let p = ProtocolParams::default();
                let b = BaselineParams::default();
                let _ = (&p, &b);
                Config { $($key: $default(&p, &b),)* }
            }
        }

        /// Per-key overrides, applied after the config file.
        #[derive(Clone, Debug, Default, clap::Args)]
        #[command(next_help_heading = "Parameters")]
        pub struct Overrides {
            $($(#[doc = $doc])* #[arg(long)] pub $key: Option<$ty>,)*
        }

        impl Config {
            pub fn apply(&mut self, o: &Overrides) {
                $(if let Some(v) = &o.$key { self.$key = v.clone(); })*
            }
        }
    };
}

config_keys! {
    /// Detector efficiency, left detector.
    eta_d_l: f64 = |p: &ProtocolParams, _| p.eta_d_l;
    /// Detector efficiency, right detector.
    eta_d_r: f64 = |p: &ProtocolParams, _| p.eta_d_r;
    /// Dark-count probability per bin, left detector.
    p_d_l: f64 = |p: &ProtocolParams, _| p.p_d_l;
    /// Dark-count probability per bin, right detector.
    p_d_r: f64 = |p: &ProtocolParams, _| p.p_d_r;
    /// Error-correction efficiency.
    f: f64 = |p: &ProtocolParams, _| p.f;
    /// Fiber loss in dB/km.
    alpha_f: f64 = |p: &ProtocolParams, _| p.alpha_f;
    /// Misalignment error rate.
    e_d: f64 = |p: &ProtocolParams, _| p.e_d;
    /// Smoothing, correctness and estimation failure probability.
    eps: f64 = |p: &ProtocolParams, _| p.eps;
    /// Phase-error sampling failure probability.
    eps_e: f64 = |p: &ProtocolParams, _| p.eps_e;
    /// Clock rate in Hz.
    clock_hz: f64 = |p: &ProtocolParams, _| p.clock_hz;
    /// Number of global phase slices.
    phase_slices: u32 = |p: &ProtocolParams, _| p.phase_slices;
    /// Pairing window in seconds.
    t_c: f64 = |p: &ProtocolParams, _| p.t_c;
    /// Transmitted pulse pairs.
    pulses: f64 = |p: &ProtocolParams, _| p.pulses;
    mu_a: f64 = |p: &ProtocolParams, _| p.mu_a;
    nu_a: f64 = |p: &ProtocolParams, _| p.nu_a;
    mu_b: f64 = |p: &ProtocolParams, _| p.mu_b;
    nu_b: f64 = |p: &ProtocolParams, _| p.nu_b;
    p_mu_a: f64 = |p: &ProtocolParams, _| p.p_mu_a;
    p_nu_a: f64 = |p: &ProtocolParams, _| p.p_nu_a;
    p_mu_b: f64 = |p: &ProtocolParams, _| p.p_mu_b;
    p_nu_b: f64 = |p: &ProtocolParams, _| p.p_nu_b;
    /// Phase drift between paired bins, radians.
    delta: f64 = |p: &ProtocolParams, _| p.delta;
    /// Fraction of the total distance on Alice's side.
    split: f64 = |_, _| 0.5;
    baseline_mu_a: f64 = |_, b: &BaselineParams| b.mu_a;
    baseline_nu_a: f64 = |_, b: &BaselineParams| b.nu_a;
    baseline_omega_a: f64 = |_, b: &BaselineParams| b.omega_a;
    baseline_mu_b: f64 = |_, b: &BaselineParams| b.mu_b;
    baseline_nu_b: f64 = |_, b: &BaselineParams| b.nu_b;
    baseline_omega_b: f64 = |_, b: &BaselineParams| b.omega_b;
    baseline_p_mu_a: f64 = |_, b: &BaselineParams| b.p_mu_a;
    baseline_p_nu_a: f64 = |_, b: &BaselineParams| b.p_nu_a;
    baseline_p_omega_a: f64 = |_, b: &BaselineParams| b.p_omega_a;
    baseline_p_mu_b: f64 = |_, b: &BaselineParams| b.p_mu_b;
    baseline_p_nu_b: f64 = |_, b: &BaselineParams| b.p_nu_b;
    baseline_p_omega_b: f64 = |_, b: &BaselineParams| b.p_omega_b;
    /// Double-scan grid points per axis.
    baseline_grid: usize = |_, b: &BaselineParams| b.grid;
    /// Document length in bits.
    m: usize = |_, _| 1000;
    /// Target forgery probability for signature sizing.
    eps_target: f64 = |_, _| 1e-10;
    /// Search intensities and probabilities per sweep point.
    optimize: bool = |_, _| false;
    /// Seed for every random choice the tool makes.
    seed: u64 = |_, _| 1;
    /// Monte Carlo bins in the self-test.
    selftest_bins: u64 = |_, _| 2_000_000;
}

impl Config {
    pub fn protocol(&self) -> ProtocolParams {
        ProtocolParams {
            eta_d_l: self.eta_d_l,
            eta_d_r: self.eta_d_r,
            p_d_l: self.p_d_l,
            p_d_r: self.p_d_r,
            f: self.f,
            alpha_f: self.alpha_f,
            e_d: self.e_d,
            eps: self.eps,
            eps_e: self.eps_e,
            clock_hz: self.clock_hz,
            phase_slices: self.phase_slices,
            t_c: self.t_c,
            pulses: self.pulses,
            mu_a: self.mu_a,
            nu_a: self.nu_a,
            mu_b: self.mu_b,
            nu_b: self.nu_b,
            p_mu_a: self.p_mu_a,
            p_nu_a: self.p_nu_a,
            p_mu_b: self.p_mu_b,
            p_nu_b: self.p_nu_b,
            l_a: ProtocolParams::default().l_a,
            l_b: ProtocolParams::default().l_b,
            delta: self.delta,
        }
    }

    pub fn baseline(&self) -> BaselineParams {
        BaselineParams {
            mu_a: self.baseline_mu_a,
            nu_a: self.baseline_nu_a,
            omega_a: self.baseline_omega_a,
            mu_b: self.baseline_mu_b,
            nu_b: self.baseline_nu_b,
            omega_b: self.baseline_omega_b,
            p_mu_a: self.baseline_p_mu_a,
            p_nu_a: self.baseline_p_nu_a,
            p_omega_a: self.baseline_p_omega_a,
            p_mu_b: self.baseline_p_mu_b,
            p_nu_b: self.baseline_p_nu_b,
            p_omega_b: self.baseline_p_omega_b,
            grid: self.baseline_grid,
        }
    }

    pub fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            m: self.m,
            eps_target: self.eps_target,
            split: self.split,
            optimize: self.optimize.then(OptimizerGrid::default),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.split) {
            bail!("split = {} must lie in [0, 1]", self.split);
        }
        if self.m == 0 {
            bail!("m must be positive");
        }
        if !(self.eps_target > 0.0 && self.eps_target < 1.0) {
            bail!("eps_target = {} must lie in (0, 1)", self.eps_target);
        }
        self.protocol().validate().context("invalid protocol parameters")?;
        self.baseline().validate().context("invalid baseline parameters")?;
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Config> {
        toml::from_str(text).map_err(|e| anyhow::anyhow!("configuration error: {e}"))
    }

    /// Reads `path`, or the file named by `QDS_CONFIG`, or falls back to defaults.
    pub fn load(path: Option<&Path>) -> Result<Config> {
        let path: Option<PathBuf> = path.map(Path::to_path_buf).or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                Config::from_toml(&text).with_context(|| format!("in {}", p.display()))
            }
            None => Ok(Config::default()),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }
}
