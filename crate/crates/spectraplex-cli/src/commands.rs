//! The five subcommands: validate, run, estimator-stats, vs, report.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use spectraplex::analysis::{estimator_moments, rate_fit, summarize_runs, vs_success_rate, SummaryRow};
use spectraplex::error::Error;
use spectraplex::fixtures;
use spectraplex::game::{uniform_profile, vs_certificate, QuantumGame, ValidationReport};
use spectraplex::learning::{
    require_vs_schedule, run, EstimatorKind, ExplorationGeometry, RunOptions, RunResult, Schedule,
};
use spectraplex::seeding::stream_seed;

use crate::config::{
    algo_name, check_feasible, derive_seeds, game_content_id, parse_algo, parse_schedule,
    resolve_schedule, Manifest, RunConfigEcho, ScheduleChoice, ScheduleEcho,
};
use crate::csvio;
use crate::error::{io_err, CliError, Result};
use crate::gamefile::{load_spec, resolve_game};

fn print_report(report: &ValidationReport) {
    for line in &report.lines {
        let verdict = if line.passed { "pass" } else { "FAIL" };
        println!("{verdict}  {}: {}", line.name, line.detail);
    }
}

/// Validate a game description and print every structural check.
/// Returns the process exit code: 0 iff all checks pass.
pub fn cmd_validate(source: &str) -> Result<i32> {
    let report = if fixtures::FIXTURE_NAMES.contains(&source) {
        fixtures::by_name(source)
            .map_err(CliError::Lib)?
            .validation_report()
    } else {
        let (report, _) = load_spec(Path::new(source))?.check();
        report
    };
    print_report(&report);
    if report.ok() {
        println!("{source}: valid");
        Ok(0)
    } else {
        println!("{source}: invalid");
        Ok(1)
    }
}

/// Flags of the `run` subcommand.
#[derive(Clone, Debug)]
pub struct RunArgs {
    pub game: String,
    pub algo: String,
    pub schedule: String,
    pub horizon: u64,
    pub seeds: usize,
    pub base_seed: u64,
    pub out: PathBuf,
    pub stride: usize,
    pub initial_dual_scale: f64,
}

struct RunBlock {
    game: QuantumGame,
    kind: EstimatorKind,
    echo: ScheduleEcho,
    seeds: Vec<u64>,
    results: Vec<RunResult>,
}

/// Resolve a run configuration, check feasibility, and execute every seed
/// on the worker pool; results come back in seed order.
fn execute_block(
    game_flag: &str,
    algo_flag: &str,
    schedule_flag: &str,
    horizon: u64,
    seed_count: usize,
    base_seed: u64,
    initial_dual_scale: f64,
) -> Result<RunBlock> {
    if seed_count == 0 {
        return Err(CliError::BadFlag("need at least one seed".into()));
    }
    let kind = parse_algo(algo_flag)?;
    let choice = parse_schedule(schedule_flag)?;
    let game = resolve_game(game_flag)?;
    if kind == EstimatorKind::OnePoint && !game.has_povm() {
        return Err(CliError::Lib(Error::BanditNeedsPovm));
    }
    let (schedule, tuning) = resolve_schedule(choice, kind, &game, horizon)?;
    let geometry = ExplorationGeometry::new(game.dims()).map_err(CliError::Lib)?;
    check_feasible(&schedule, kind, horizon, &geometry)?;
    let echo = ScheduleEcho::new(schedule_flag, &schedule, tuning.as_ref());

    let seeds = derive_seeds(base_seed, seed_count);
    let results: std::result::Result<Vec<RunResult>, Error> = seeds
        .par_iter()
        .map(|&seed| {
            run(
                &game,
                &RunOptions {
                    estimator: kind,
                    schedule,
                    horizon,
                    seed,
                    initial_dual_scale,
                    reference: None,
                },
            )
        })
        .collect();
    Ok(RunBlock {
        game,
        kind,
        echo,
        seeds,
        results: results.map_err(CliError::Lib)?,
    })
}

/// Theorem gap guarantee at each recorded iterate, NaN where no guarantee
/// applies (explicit schedules, or iterates below the feasible horizon).
fn bound_curve(
    game: &QuantumGame,
    kind: EstimatorKind,
    theorem: bool,
    ts: &[u64],
) -> Result<Vec<f64>> {
    if !theorem {
        return Ok(vec![f64::NAN; ts.len()]);
    }
    let constants = game.constants().map_err(CliError::Lib)?;
    Ok(ts
        .iter()
        .map(|&t| {
            spectraplex::learning::theorem_tuning(kind, &constants, game.dims(), t)
                .map(|tuning| tuning.gap_bound)
                .unwrap_or(f64::NAN)
        })
        .collect())
}

fn summary_rows_to_csv(
    rows: &[SummaryRow],
    bounds: &[f64],
    slope: f64,
    stride: usize,
) -> (Vec<String>, Vec<Vec<String>>) {
    let header: Vec<String> = [
        "t",
        "gap_mean",
        "gap_q10",
        "gap_median",
        "gap_q90",
        "bregman_mean",
        "bregman_median",
        "gap_bound",
        "rate_slope",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let last = rows.len().saturating_sub(1);
    let body = rows
        .iter()
        .zip(bounds)
        .enumerate()
        .filter(|(idx, _)| idx % stride == 0 || *idx == last)
        .map(|(_, (row, &bound))| {
            vec![
                row.t.to_string(),
                csvio::cell(row.gap_mean),
                csvio::cell(row.gap_q10),
                csvio::cell(row.gap_median),
                csvio::cell(row.gap_q90),
                csvio::cell(row.bregman_mean),
                csvio::cell(row.bregman_median),
                csvio::cell(bound),
                csvio::cell(slope),
            ]
        })
        .collect();
    (header, body)
}

/// Run a seed block and emit per-seed trajectories, a cross-seed summary,
/// and the reproducibility manifest.
pub fn cmd_run(args: &RunArgs) -> Result<()> {
    if args.stride == 0 {
        return Err(CliError::BadFlag("stride must be at least 1".into()));
    }
    let block = execute_block(
        &args.game,
        &args.algo,
        &args.schedule,
        args.horizon,
        args.seeds,
        args.base_seed,
        args.initial_dual_scale,
    )?;

    std::fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
    let players = block.game.num_players();
    let mut outputs = Vec::with_capacity(block.results.len() + 1);
    for (idx, result) in block.results.iter().enumerate() {
        let name = format!("seed_{idx:03}.csv");
        csvio::write(
            &args.out.join(&name),
            &csvio::trajectory_header(players),
            &csvio::trajectory_rows(result, args.stride),
        )?;
        outputs.push(name);
    }

    let rows = summarize_runs(&block.results).map_err(CliError::Lib)?;
    let ts: Vec<u64> = rows.iter().map(|r| r.t).collect();
    let theorem = args.schedule == "theorem";
    let bounds = bound_curve(&block.game, block.kind, theorem, &ts)?;
    let ts_f: Vec<f64> = ts.iter().map(|&t| t as f64).collect();
    let gap_means: Vec<f64> = rows.iter().map(|r| r.gap_mean).collect();
    let slope = rate_fit(&ts_f, &gap_means)
        .map(|fit| fit.slope)
        .unwrap_or(f64::NAN);

    let (header, body) = summary_rows_to_csv(&rows, &bounds, slope, args.stride);
    csvio::write(&args.out.join("summary.csv"), &header, &body)?;
    outputs.push("summary.csv".to_string());

    let manifest = Manifest::new(
        RunConfigEcho {
            command: "run",
            game: args.game.clone(),
            game_content: game_content_id(&args.game)?,
            algo: algo_name(block.kind),
            schedule: block.echo.clone(),
            horizon: args.horizon,
            seed_count: args.seeds,
            base_seed: args.base_seed,
            stride: args.stride,
            initial_dual_scale: args.initial_dual_scale,
        },
        block.seeds.clone(),
        outputs,
    );
    let manifest_path = args.out.join("manifest.json");
    std::fs::write(&manifest_path, manifest.to_json()).map_err(io_err(&manifest_path))?;

    let last = rows.last().expect("a run records at least one iterate");
    println!(
        "ran {} on {} for T = {}, {} seeds",
        algo_name(block.kind),
        args.game,
        args.horizon,
        args.seeds
    );
    match block.echo.gap_bound {
        Some(bound) => println!(
            "final mean gap {:.4e} (theorem bound {:.4e}), mean divergence {:.4e}",
            last.gap_mean, bound, last.bregman_mean
        ),
        None => println!(
            "final mean gap {:.4e}, mean divergence {:.4e}",
            last.gap_mean, last.bregman_mean
        ),
    }
    if slope.is_nan() {
        println!("rate slope undefined for this configuration");
    } else {
        println!("rate slope {slope:.4} over the recorded tail");
    }
    println!(
        "wrote {} trajectory files, summary.csv, manifest.json ({}) in {}",
        block.results.len(),
        &manifest.config_hash[..12],
        args.out.display()
    );
    Ok(())
}

/// Flags of the `estimator-stats` subcommand.
#[derive(Clone, Debug)]
pub struct StatsArgs {
    pub game: String,
    pub algo: String,
    pub deltas: String,
    pub n_mc: usize,
    pub base_seed: u64,
    pub out: PathBuf,
}

/// Audit an estimator's empirical moments over a list of exploration radii
/// and emit one CSV row per radius.
pub fn cmd_estimator_stats(args: &StatsArgs) -> Result<()> {
    let kind = parse_algo(&args.algo)?;
    let game = resolve_game(&args.game)?;
    if kind == EstimatorKind::OnePoint && !game.has_povm() {
        return Err(CliError::Lib(Error::BanditNeedsPovm));
    }
    let deltas: Vec<f64> = args
        .deltas
        .split(',')
        .map(|field| field.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| {
            CliError::BadFlag(format!(
                "expected a comma-separated radius list, got {:?}",
                args.deltas
            ))
        })?;
    if deltas.is_empty() {
        return Err(CliError::BadFlag("need at least one radius".into()));
    }
    let geometry = ExplorationGeometry::new(game.dims()).map_err(CliError::Lib)?;
    for &delta in &deltas {
        if kind != EstimatorKind::FullInfo && !(delta > 0.0 && delta < geometry.min_radius()) {
            return Err(CliError::Lib(Error::InfeasibleSchedule(format!(
                "radius {delta:e} outside (0, {:.6e})",
                geometry.min_radius()
            ))));
        }
    }

    // Audits evaluate at the uniform profile, the canonical interior point.
    let profile = uniform_profile(game.dims());
    let header: Vec<String> = [
        "kind",
        "delta",
        "samples",
        "bias_norm",
        "bias_bound",
        "bias_se",
        "bias_pass",
        "second_moment",
        "second_bound",
        "second_se",
        "second_pass",
        "max_norm",
        "max_norm_bound",
        "max_pass",
        "pass",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut rows = Vec::with_capacity(deltas.len());
    for (idx, &delta) in deltas.iter().enumerate() {
        let report = estimator_moments(
            &game,
            &profile,
            kind,
            delta,
            args.n_mc,
            stream_seed(args.base_seed, idx as u64),
        )
        .map_err(CliError::Lib)?;
        println!(
            "delta {:.4e}: bias {:.4e} vs {:.4e} ({}), second moment {:.4e} vs {:.4e} ({}), \
             max norm {:.4e} vs {:.4e} ({})",
            delta,
            report.bias_norm,
            report.bias_bound,
            if report.bias_ok { "pass" } else { "FAIL" },
            report.second_moment,
            report.second_bound,
            if report.second_ok { "pass" } else { "FAIL" },
            report.max_norm,
            report.max_norm_bound,
            if report.max_ok { "pass" } else { "FAIL" },
        );
        rows.push(vec![
            algo_name(kind).to_string(),
            csvio::cell(report.delta),
            report.samples.to_string(),
            csvio::cell(report.bias_norm),
            csvio::cell(report.bias_bound),
            csvio::cell(report.bias_se),
            u8::from(report.bias_ok).to_string(),
            csvio::cell(report.second_moment),
            csvio::cell(report.second_bound),
            csvio::cell(report.second_se),
            u8::from(report.second_ok).to_string(),
            csvio::cell(report.max_norm),
            csvio::cell(report.max_norm_bound),
            u8::from(report.max_ok).to_string(),
            u8::from(report.ok()).to_string(),
        ]);
    }
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
    }
    csvio::write(&args.out, &header, &rows)?;
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}

/// Flags of the `vs` subcommand.
#[derive(Clone, Debug)]
pub struct VsArgs {
    pub game: String,
    pub algo: String,
    pub schedule: String,
    pub horizon: u64,
    pub seeds: usize,
    pub base_seed: u64,
    pub threshold: f64,
    pub initial_dual_scale: f64,
    pub cert_radius: f64,
    pub cert_samples: usize,
    pub out: Option<PathBuf>,
}

/// Probe last-iterate convergence to an equilibrium candidate under a
/// vanishing schedule: series verdicts, a stability certificate, per-seed
/// final divergences, and the success fraction.
pub fn cmd_vs(args: &VsArgs) -> Result<()> {
    let choice = parse_schedule(&args.schedule)?;
    let ScheduleChoice::Explicit(schedule @ Schedule::Power {
        step0,
        step_exp,
        radius0,
        radius_exp,
    }) = choice
    else {
        return Err(CliError::BadFlag(
            "stability runs need an explicit vanishing schedule: \
             power:STEP0,STEP_EXP,RADIUS0,RADIUS_EXP"
                .into(),
        ));
    };
    require_vs_schedule(step_exp, radius_exp).map_err(CliError::Lib)?;

    let game = resolve_game(&args.game)?;
    let eq = game
        .equilibrium()
        .ok_or_else(|| {
            CliError::Lib(Error::InvalidGame(
                "stability runs need an equilibrium candidate; builtin fixtures carry one, \
                 game files set \"equilibrium\""
                    .into(),
            ))
        })?
        .to_vec();

    println!(
        "schedule: gamma_t = {step0} / t^{step_exp}, delta_t = {radius0} / t^{radius_exp}"
    );
    println!("  step series diverges, bias series converges, variance series converges");

    let certificate = vs_certificate(
        &game,
        &eq,
        args.cert_radius,
        args.cert_samples,
        stream_seed(args.base_seed, args.seeds as u64),
    )
    .map_err(CliError::Lib)?;
    if certificate.plausible {
        println!(
            "certificate at radius {:.2e}: inner products in [{:.4e}, {:.4e}] over {} profiles \
             (plausible)",
            certificate.radius, certificate.min_inner, certificate.max_inner, certificate.samples
        );
    } else {
        println!(
            "warning: certificate at radius {:.2e} found a nonnegative inner product \
             (max {:.4e}); the candidate may not be stable, proceeding anyway",
            certificate.radius, certificate.max_inner
        );
    }

    let block = execute_block(
        &args.game,
        &args.algo,
        &args.schedule,
        args.horizon,
        args.seeds,
        args.base_seed,
        args.initial_dual_scale,
    )?;
    let mut finals = Vec::with_capacity(block.results.len());
    for (idx, result) in block.results.iter().enumerate() {
        println!("seed {idx}: final divergence {:.4e}", result.final_bregman);
        finals.push(result.final_bregman);
    }
    let fraction = vs_success_rate(&finals, args.threshold).map_err(CliError::Lib)?;
    let hits = finals.iter().filter(|&&v| v < args.threshold).count();
    println!(
        "success fraction below {:.1e}: {:.2} ({} of {} seeds)",
        args.threshold,
        fraction,
        hits,
        finals.len()
    );

    if let Some(out) = &args.out {
        std::fs::create_dir_all(out).map_err(io_err(out))?;
        let header: Vec<String> = ["seed_index", "seed", "final_bregman"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let rows: Vec<Vec<String>> = block
            .seeds
            .iter()
            .zip(&finals)
            .enumerate()
            .map(|(idx, (&seed, &v))| vec![idx.to_string(), seed.to_string(), csvio::cell(v)])
            .collect();
        csvio::write(&out.join("vs.csv"), &header, &rows)?;
        let manifest = Manifest::new(
            RunConfigEcho {
                command: "vs",
                game: args.game.clone(),
                game_content: game_content_id(&args.game)?,
                algo: algo_name(block.kind),
                schedule: ScheduleEcho::new(&args.schedule, &schedule, None),
                horizon: args.horizon,
                seed_count: args.seeds,
                base_seed: args.base_seed,
                stride: 1,
                initial_dual_scale: args.initial_dual_scale,
            },
            block.seeds.clone(),
            vec!["vs.csv".to_string()],
        );
        let manifest_path = out.join("manifest.json");
        std::fs::write(&manifest_path, manifest.to_json()).map_err(io_err(&manifest_path))?;
        println!("wrote vs.csv, manifest.json in {}", out.display());
    }
    Ok(())
}

/// Summarize an existing run directory: manifest identity, the tail of the
/// summary table, and a freshly fitted decay rate.
pub fn cmd_report(out: &Path, tail: usize) -> Result<()> {
    let manifest_path = out.join("manifest.json");
    let text = std::fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
    let manifest: serde_json::Value =
        serde_json::from_str(&text).map_err(|source| CliError::Parse {
            path: manifest_path.clone(),
            source,
        })?;
    let config = &manifest["config"];
    println!(
        "run {} on {}: algo {}, schedule {}, T = {}, {} seeds (config {})",
        config["command"].as_str().unwrap_or("?"),
        config["game"].as_str().unwrap_or("?"),
        config["algo"].as_str().unwrap_or("?"),
        config["schedule"]["flag"].as_str().unwrap_or("?"),
        config["horizon"],
        config["seed_count"],
        manifest["config_hash"].as_str().unwrap_or("?")
    );

    let summary_path = out.join("summary.csv");
    let (header, rows) = csvio::read(&summary_path)?;
    if rows.is_empty() {
        return Err(CliError::BadFlag(format!(
            "{}: no data rows",
            summary_path.display()
        )));
    }
    println!("{}", header.join("  "));
    let start = rows.len().saturating_sub(tail.max(1));
    for row in &rows[start..] {
        let cells: Vec<String> = header
            .iter()
            .zip(row)
            .map(|(name, &v)| {
                if name == "t" {
                    format!("{}", v as u64)
                } else {
                    format!("{v:.4e}")
                }
            })
            .collect();
        println!("{}", cells.join("  "));
    }

    let t_col = csvio::column(&header, "t")?;
    let gap_col = csvio::column(&header, "gap_mean")?;
    let ts: Vec<f64> = rows.iter().map(|r| r[t_col]).collect();
    let gaps: Vec<f64> = rows.iter().map(|r| r[gap_col]).collect();
    match rate_fit(&ts, &gaps) {
        Ok(fit) => println!(
            "rate slope {:.4} over {} tail points",
            fit.slope, fit.points
        ),
        Err(_) => println!("rate slope undefined for this series"),
    }
    Ok(())
}
