//! Stability-chart front end: harmonic coefficient tables, Hill-truncation
//! determinants, boundary branches, monodromy chart scans, and a
//! cross-checking verification suite.

// Guards written as `!(x > 0)` must also reject NaN, which `x <= 0` does not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use std::process::ExitCode;

use config::RunConfig;

/// CLI failure with its process exit code: 1 for verification failures,
/// 2 for input errors.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: u8,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 2,
        }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 1,
        }
    }
}

impl From<strutt::Error> for CliError {
    fn from(e: strutt::Error) -> Self {
        CliError::input(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "strutt",
    version,
    about = "Stability boundaries for second-order oscillators with periodic coefficients and memory kernels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Kernel definition JSON file.
    #[arg(long)]
    kernel: Option<String>,
    /// Run configuration JSON file.
    #[arg(long)]
    config: Option<String>,
    /// Output directory (data files plus manifest.json).
    #[arg(long)]
    out: Option<String>,
    /// Truncation halfwidth N.
    #[arg(long)]
    order: Option<usize>,
    /// Quadrature rule sizes as "nodes,panels".
    #[arg(long)]
    quad: Option<String>,
    /// Coefficient backend: closed | quad.
    #[arg(long)]
    backend: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate kernel harmonic coefficients over a window.
    Coeffs {
        #[command(flatten)]
        common: CommonArgs,
        /// Solution family: periodic | antiperiodic.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        theta: Option<f64>,
        /// Floquet shift as "re,im".
        #[arg(long)]
        gamma: Option<String>,
    },
    /// Hill-truncation determinants for orders 1..=N.
    Det {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        a0: Option<f64>,
        #[arg(long)]
        a1: Option<f64>,
        #[arg(long)]
        gamma: Option<String>,
    },
    /// Boundary-branch sweep (quasistatic, periodic, antiperiodic, sideAB,
    /// sideAC, vertexA, vertexB, vertexC).
    Boundary {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        branch: Option<String>,
        #[arg(long)]
        a0: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Monodromy chart scan over (theta, a1) at fixed a0.
    Scan {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        a0: Option<f64>,
        /// Grid resolution as "n_theta,n_a1".
        #[arg(long)]
        resolution: Option<String>,
    },
    /// Cross-module verification suite.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated check names; empty string selects nothing.
        #[arg(long)]
        checks: Option<String>,
    },
}

fn parse_pair(text: &str, what: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::input(format!("{what} must be 're,im'-style pair")));
    }
    let a = parts[0]
        .trim()
        .parse::<f64>()
        .map_err(|e| CliError::input(format!("{what}: {e}")))?;
    let b = parts[1]
        .trim()
        .parse::<f64>()
        .map_err(|e| CliError::input(format!("{what}: {e}")))?;
    Ok((a, b))
}

fn apply_common(config: &mut RunConfig, common: &CommonArgs) -> Result<(), CliError> {
    if let Some(k) = &common.kernel {
        config.kernel = Some(k.clone());
    }
    if let Some(o) = &common.out {
        config.out = Some(o.clone());
    }
    if let Some(n) = common.order {
        config.order = n;
    }
    if let Some(q) = &common.quad {
        let (n, m) = parse_pair(q, "--quad")?;
        if n.fract() != 0.0 || m.fract() != 0.0 || n < 1.0 || m < 1.0 {
            return Err(CliError::input("--quad needs positive integers 'nodes,panels'"));
        }
        config.quadrature.nodes = n as usize;
        config.quadrature.panels = m as usize;
    }
    if let Some(b) = &common.backend {
        config.backend = b.clone();
    }
    Ok(())
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Coeffs {
            common,
            mode,
            theta,
            gamma,
        } => {
            let mut config = RunConfig::load(common.config.as_deref())?;
            apply_common(&mut config, &common)?;
            if let Some(m) = mode {
                config.mode = m;
            }
            if let Some(t) = theta {
                config.theta = t;
            }
            if let Some(g) = gamma {
                let (re, im) = parse_pair(&g, "--gamma")?;
                config.gamma = [re, im];
            }
            commands::cmd_coeffs(&config)
        }
        Command::Det {
            common,
            mode,
            theta,
            a0,
            a1,
            gamma,
        } => {
            let mut config = RunConfig::load(common.config.as_deref())?;
            apply_common(&mut config, &common)?;
            if let Some(m) = mode {
                config.mode = m;
            }
            if let Some(t) = theta {
                config.theta = t;
            }
            if let Some(v) = a0 {
                config.a0 = v;
            }
            if let Some(v) = a1 {
                config.a1 = v;
            }
            if let Some(g) = gamma {
                let (re, im) = parse_pair(&g, "--gamma")?;
                config.gamma = [re, im];
            }
            commands::cmd_det(&config)
        }
        Command::Boundary {
            common,
            branch,
            a0,
            omega,
            lambda,
            theta,
        } => {
            let mut config = RunConfig::load(common.config.as_deref())?;
            apply_common(&mut config, &common)?;
            if let Some(b) = branch {
                config.branch = Some(b);
            }
            if let Some(v) = a0 {
                config.a0 = v;
            }
            if let Some(v) = omega {
                config.omega = v;
            }
            if let Some(v) = lambda {
                config.lambda = v;
            }
            if let Some(v) = theta {
                config.theta = v;
            }
            commands::cmd_boundary(&config)
        }
        Command::Scan {
            common,
            a0,
            resolution,
        } => {
            let mut config = RunConfig::load(common.config.as_deref())?;
            apply_common(&mut config, &common)?;
            if let Some(v) = a0 {
                config.a0 = v;
            }
            if let Some(r) = resolution {
                let (nt, na) = parse_pair(&r, "--resolution")?;
                if nt.fract() != 0.0 || na.fract() != 0.0 || nt < 0.0 || na < 0.0 {
                    return Err(CliError::input("--resolution needs integers 'n_theta,n_a1'"));
                }
                config.scan_resolution = [nt as usize, na as usize];
            }
            commands::cmd_scan(&config)
        }
        Command::Verify { common, checks } => {
            let mut config = RunConfig::load(common.config.as_deref())?;
            apply_common(&mut config, &common)?;
            let selection = checks.map(|c| {
                c.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect::<Vec<_>>()
            });
            commands::cmd_verify(&config, selection)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
