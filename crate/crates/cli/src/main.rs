//! Command-line front end for the semicircle spectral toolkit.
//!
//! Exit codes: 0 when every report passes, 1 when any report fails,
//! 2 on usage or configuration errors.

mod commands;
mod config;
mod output;
mod spec;

use clap::{Args, Parser, Subcommand};
use commands::{execute, execute_suite, CommandKind, RunParams};
use config::KeyValueConfig;
use output::Format;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "semicircle",
    version,
    about = "Verifies spectral variance inequalities for the semicircular law and convex-potential ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Variance bounded by the derivative's semicircular norm
    Poincare(RunArgs),
    /// Alternating variance expansion with exact remainder
    Refine(RunArgs),
    /// Interpolation pairing against the variance
    Interpolate(RunArgs),
    /// Equilibrium support, density and energy diagnostics
    Equilibrium(RunArgs),
    /// Curvature-weighted variance bound for a convex potential
    #[command(name = "brascamp-lieb")]
    BrascampLieb(RunArgs),
    /// Half-line bound for potentials with a logarithmic term
    Wishart(RunArgs),
    /// Galerkin resolvent form across potentials
    #[command(name = "v-independence")]
    VIndependence(RunArgs),
    /// Monte-Carlo fluctuation cross-check
    #[command(name = "mc-fluctuations")]
    McFluctuations(RunArgs),
    /// Run a JSON suite of verifications (default battery when no file)
    Suite(SuiteArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Test function: x, x^k, exp, cosh, 1/x, 1/(c-x), cheb:a0,a1,... or mono:c0,c1,...
    #[arg(long = "fn")]
    function: Option<String>,
    /// Potential: expression like "x^2/2+x^4/20" (suffixes ;log_s=S and
    /// ;domain=half-line|real-line|lo:hi) or a JSON record; repeatable
    #[arg(long)]
    potential: Vec<String>,
    /// Projection degree for the test function [default: 24; wishart: 160]
    #[arg(long)]
    degree: Option<usize>,
    /// Galerkin dimension for resolvent solves [default: 40]
    #[arg(long = "galerkin-dim")]
    galerkin_dim: Option<usize>,
    /// Override of the quadrature node count where applicable
    #[arg(long = "quad-nodes")]
    quad_nodes: Option<usize>,
    /// Number of expansion terms [default: 4]
    #[arg(long)]
    kmax: Option<usize>,
    /// Matrix size for Monte-Carlo sampling [default: 64]
    #[arg(long = "mc-n")]
    mc_n: Option<usize>,
    /// Number of Monte-Carlo samples [default: 400]
    #[arg(long = "mc-samples")]
    mc_samples: Option<usize>,
    /// RNG seed [default: 1]
    #[arg(long)]
    seed: Option<u64>,
    /// Pass/fail tolerance override
    #[arg(long)]
    tol: Option<f64>,
    /// Output format
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Write reports to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Key-value config file supplying defaults for unset flags
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// JSON suite file; the built-in battery runs when omitted
    file: Option<PathBuf>,
    /// Tolerance override applied to every entry
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_args_to_params(args: &RunArgs) -> anyhow::Result<RunParams> {
    let mut params = RunParams {
        function: args.function.clone(),
        potentials: args.potential.clone(),
        degree: args.degree,
        galerkin_dim: args.galerkin_dim,
        quad_nodes: args.quad_nodes,
        kmax: args.kmax,
        mc_n: args.mc_n,
        mc_samples: args.mc_samples,
        seed: args.seed,
        tol: args.tol,
    };
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let cfg = KeyValueConfig::parse(&text)?;
        params.apply_config(&cfg)?;
    }
    Ok(params)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = |kind: CommandKind, args: &RunArgs| -> anyhow::Result<(Vec<_>, Format, Option<PathBuf>)> {
        let params = run_args_to_params(args)?;
        let reports = execute(kind, &params)?;
        Ok((reports, args.format, args.out.clone()))
    };
    let outcome = match &cli.command {
        Command::Poincare(a) => run(CommandKind::Poincare, a),
        Command::Refine(a) => run(CommandKind::Refine, a),
        Command::Interpolate(a) => run(CommandKind::Interpolate, a),
        Command::Equilibrium(a) => run(CommandKind::Equilibrium, a),
        Command::BrascampLieb(a) => run(CommandKind::BrascampLieb, a),
        Command::Wishart(a) => run(CommandKind::Wishart, a),
        Command::VIndependence(a) => run(CommandKind::VIndependence, a),
        Command::McFluctuations(a) => run(CommandKind::McFluctuations, a),
        Command::Suite(a) => (|| {
            let entries = match &a.file {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| {
                        anyhow::anyhow!("cannot read suite {}: {e}", path.display())
                    })?;
                    config::parse_suite(&text)?
                }
                None => config::default_suite(),
            };
            let reports = execute_suite(&entries, a.tol)?;
            Ok((reports, a.format, a.out.clone()))
        })(),
    };
    match outcome {
        Ok((reports, format, out)) => {
            if let Err(err) = output::emit(&reports, format, out.as_deref()) {
                eprintln!("error: {err}");
                return ExitCode::from(2);
            }
            if reports.iter().all(|r| r.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
