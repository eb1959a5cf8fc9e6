use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spectraplex_cli::commands::{
    cmd_estimator_stats, cmd_report, cmd_run, cmd_validate, cmd_vs, RunArgs, StatsArgs, VsArgs,
};

/// Equilibrium learning in quantum games: matrix multiplicative weights
/// with full, two-query, or single-outcome payoff feedback.
#[derive(Parser)]
#[command(name = "spectraplex", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a game description and print every structural check.
    Validate {
        /// Builtin fixture name (matching-pennies, dominant) or a game file.
        #[arg(long)]
        game: String,
    },
    /// Run seeded learning dynamics and emit trajectory CSVs plus a summary.
    Run {
        /// Builtin fixture name or a game file.
        #[arg(long)]
        game: String,
        /// mmw (full information), 3mw-2pe (two queries), 3mw-1pe (bandit).
        #[arg(long)]
        algo: String,
        /// theorem, constant:STEP,RADIUS, or power:STEP0,P,RADIUS0,Q.
        #[arg(long)]
        schedule: String,
        /// Horizon: number of iterates.
        #[arg(long = "T")]
        horizon: u64,
        /// Number of independent seeded runs.
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        /// Base seed; per-run seeds are derived by index.
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        /// Output directory for CSV files and the manifest.
        #[arg(long)]
        out: PathBuf,
        /// Keep every k-th recorded iterate (the final one always stays).
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Scale of the random traceless initial duals; 0 starts uniform.
        #[arg(long, default_value_t = 0.0)]
        initial_dual_scale: f64,
    },
    /// Audit estimator moments over a list of exploration radii.
    EstimatorStats {
        #[arg(long)]
        game: String,
        /// Estimator to audit: mmw, 3mw-2pe, or 3mw-1pe.
        #[arg(long)]
        algo: String,
        /// Comma-separated exploration radii, e.g. 0.2,0.1,0.05.
        #[arg(long)]
        deltas: String,
        /// Monte Carlo samples per radius (at least 10000).
        #[arg(long, default_value_t = 100_000)]
        n_mc: usize,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Probe last-iterate convergence to an equilibrium candidate under a
    /// vanishing schedule.
    Vs {
        #[arg(long)]
        game: String,
        /// Estimator driving the runs (default: bandit feedback).
        #[arg(long, default_value = "3mw-1pe")]
        algo: String,
        /// Must vanish: power:STEP0,P,RADIUS0,Q.
        #[arg(long)]
        schedule: String,
        #[arg(long = "T")]
        horizon: u64,
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        /// A seed succeeds when its final divergence is below this.
        #[arg(long, default_value_t = 1e-2)]
        threshold: f64,
        #[arg(long, default_value_t = 0.0)]
        initial_dual_scale: f64,
        /// Radius of the stability probe around the candidate.
        #[arg(long, default_value_t = 0.1)]
        cert_radius: f64,
        /// Profiles the stability probe samples.
        #[arg(long, default_value_t = 1000)]
        cert_samples: usize,
        /// Optional directory for a per-seed CSV and manifest.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize an existing run directory.
    Report {
        /// Directory a run command wrote.
        #[arg(long)]
        out: PathBuf,
        /// Summary rows to print.
        #[arg(long, default_value_t = 5)]
        tail: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Validate { game } => cmd_validate(&game).map(Some),
        Command::Run {
            game,
            algo,
            schedule,
            horizon,
            seeds,
            base_seed,
            out,
            stride,
            initial_dual_scale,
        } => cmd_run(&RunArgs {
            game,
            algo,
            schedule,
            horizon,
            seeds,
            base_seed,
            out,
            stride,
            initial_dual_scale,
        })
        .map(|()| None),
        Command::EstimatorStats {
            game,
            algo,
            deltas,
            n_mc,
            base_seed,
            out,
        } => cmd_estimator_stats(&StatsArgs {
            game,
            algo,
            deltas,
            n_mc,
            base_seed,
            out,
        })
        .map(|()| None),
        Command::Vs {
            game,
            algo,
            schedule,
            horizon,
            seeds,
            base_seed,
            threshold,
            initial_dual_scale,
            cert_radius,
            cert_samples,
            out,
        } => cmd_vs(&VsArgs {
            game,
            algo,
            schedule,
            horizon,
            seeds,
            base_seed,
            threshold,
            initial_dual_scale,
            cert_radius,
            cert_samples,
            out,
        })
        .map(|()| None),
        Command::Report { out, tail } => cmd_report(&out, tail).map(|()| None),
    };
    match outcome {
        Ok(Some(code)) => ExitCode::from(code as u8),
        Ok(None) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
