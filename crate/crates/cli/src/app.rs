use crate::config::{Config, Overrides, CONFIG_ENV};
use crate::csv::{profile_csv, rate_csv};
use crate::{demo, selftest};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qds_core::messaging::Verdict;
use qds_core::sweep::{distance_grid, entropy_profile, rate_curve};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "qds", version, about = "Asynchronous MDI quantum digital signatures: rate simulation and a signing demo")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Setup {
    /// TOML config file; falls back to $QDS_CONFIG, then built-in defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct Range {
    /// First total distance, km.
    #[arg(long, default_value_t = 0.0)]
    pub l_min: f64,
    /// Last total distance, km; always included.
    #[arg(long, default_value_t = 600.0)]
    pub l_max: f64,
    #[arg(long, default_value_t = 10.0)]
    pub step: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Signature rate against distance for both protocols, as CSV.
    RateCurve {
        #[command(flatten)]
        range: Range,
        /// Pulse counts to sweep; defaults to the configured `pulses`.
        #[arg(long, value_delimiter = ',')]
        pulses_list: Vec<f64>,
        #[command(flatten)]
        setup: Setup,
    },
    /// Smooth min- and max-entropy against distance, as CSV.
    EntropyProfile {
        #[command(flatten)]
        range: Range,
        #[command(flatten)]
        setup: Setup,
    },
    /// Generate correlated key shares for Alice, Bob and Charlie.
    Keygen {
        /// Key length per share component, bits.
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Sign a document with Alice's shares.
    Sign {
        #[arg(long)]
        doc: PathBuf,
        #[arg(long)]
        key: PathBuf,
        /// Bundle output file.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Verify a bundle. Exits 0 on accept, 1 on reject, 2 on malformed input.
    Verify {
        #[arg(long)]
        bundle: PathBuf,
        /// The verifier's own shares.
        #[arg(long)]
        own: PathBuf,
        /// Shares received from the other recipient.
        #[arg(long)]
        counterpart: PathBuf,
    },
    /// Run the self-test battery and print a JSON report.
    Selftest {
        #[command(flatten)]
        setup: Setup,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<selftest::Fault>,
    },
    /// Print the effective configuration as TOML.
    Config {
        #[command(flatten)]
        setup: Setup,
    },
}

/// Exit status for malformed input and other errors.
pub const EXIT_ERROR: u8 = 2;

fn load(setup: &Setup) -> Result<Config> {
    let mut cfg = Config::load(setup.config.as_deref())
        .with_context(|| format!("loading configuration (flag --config or ${CONFIG_ENV})"))?;
    cfg.apply(&setup.overrides);
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(text.as_bytes())?;
            s.flush()?;
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::RateCurve { range, pulses_list, setup } => {
            let cfg = load(&setup)?;
            let pulses = if pulses_list.is_empty() { vec![cfg.pulses] } else { pulses_list };
            if pulses.iter().any(|n| !(*n > 0.0)) {
                bail!("pulse counts must be positive");
            }
            let d = distance_grid(range.l_min, range.l_max, range.step)?;
            let rows = rate_curve(&cfg.protocol(), &cfg.baseline(), &d, &pulses, &cfg.sweep_options())?;
            emit(setup.out.as_deref(), &rate_csv(&rows))?;
        }
        Command::EntropyProfile { range, setup } => {
            let cfg = load(&setup)?;
            let d = distance_grid(range.l_min, range.l_max, range.step)?;
            let pts = entropy_profile(&cfg.protocol(), &d, cfg.split)?;
            emit(setup.out.as_deref(), &profile_csv(&pts, cfg.pulses))?;
        }
        Command::Keygen { n, out_dir, seed } => {
            for p in demo::keygen(&out_dir, n, seed)? {
                println!("{}", p.display());
            }
        }
        Command::Sign { doc, key, out, seed } => {
            let bundle = demo::sign_file(&doc, &key, seed)?;
            std::fs::write(&out, bundle.to_bytes()).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Verify { bundle, own, counterpart } => {
            let v = demo::verify_file(&bundle, &own, &counterpart)?;
            println!("{}", if v == Verdict::Accept { "accept" } else { "reject" });
            return Ok(ExitCode::from(if v == Verdict::Accept { 0 } else { 1 }));
        }
        Command::Selftest { setup, inject_fault } => {
            let cfg = load(&setup)?;
            let report = selftest::run(&cfg, inject_fault)?;
            let text = serde_json::to_string_pretty(&report)? + "\n";
            emit(setup.out.as_deref(), &text)?;
            return Ok(ExitCode::from(if report.passed { 0 } else { 1 }));
        }
        Command::Config { setup } => {
            let cfg = load(&setup)?;
            emit(setup.out.as_deref(), &cfg.to_toml())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
