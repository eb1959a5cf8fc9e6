//! Flag parsing, schedule feasibility, and the reproducibility manifest.

use serde::Serialize;
use sha2::{Digest, Sha256};
use spectraplex::error::Error;
use spectraplex::game::QuantumGame;
use spectraplex::learning::{theorem_tuning, EstimatorKind, ExplorationGeometry, Schedule, TheoremTuning};
use spectraplex::seeding::stream_seed;

use crate::error::{CliError, Result};

/// Algorithm names accepted by `--algo`.
pub const ALGO_NAMES: [&str; 3] = ["mmw", "3mw-2pe", "3mw-1pe"];

/// Parse an `--algo` value.
pub fn parse_algo(text: &str) -> Result<EstimatorKind> {
    match text {
        "mmw" => Ok(EstimatorKind::FullInfo),
        "3mw-2pe" => Ok(EstimatorKind::TwoPoint),
        "3mw-1pe" => Ok(EstimatorKind::OnePoint),
        other => Err(CliError::BadFlag(format!(
            "unknown algorithm {other:?}; available: {}",
            ALGO_NAMES.join(", ")
        ))),
    }
}

/// Algorithm name for an estimator kind (inverse of [`parse_algo`]).
pub fn algo_name(kind: EstimatorKind) -> &'static str {
    match kind {
        EstimatorKind::FullInfo => "mmw",
        EstimatorKind::TwoPoint => "3mw-2pe",
        EstimatorKind::OnePoint => "3mw-1pe",
    }
}

/// A `--schedule` value before horizon resolution.
#[derive(Clone, Copy, Debug)]
pub enum ScheduleChoice {
    /// Horizon-matched constant tuning with its gap guarantee.
    Theorem,
    Explicit(Schedule),
}

fn parse_numbers(text: &str, expect: usize, usage: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(',')
        .map(|field| field.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::BadFlag(format!("expected {usage}, got {text:?}")))?;
    if values.len() != expect {
        return Err(CliError::BadFlag(format!(
            "expected {usage}, got {} numbers",
            values.len()
        )));
    }
    Ok(values)
}

/// Parse a `--schedule` value: `theorem`, `constant:STEP,RADIUS`, or
/// `power:STEP0,STEP_EXP,RADIUS0,RADIUS_EXP`.
pub fn parse_schedule(text: &str) -> Result<ScheduleChoice> {
    if text == "theorem" {
        return Ok(ScheduleChoice::Theorem);
    }
    if let Some(params) = text.strip_prefix("constant:") {
        let v = parse_numbers(params, 2, "constant:STEP,RADIUS")?;
        return Ok(ScheduleChoice::Explicit(Schedule::Constant {
            step: v[0],
            radius: v[1],
        }));
    }
    if let Some(params) = text.strip_prefix("power:") {
        let v = parse_numbers(params, 4, "power:STEP0,STEP_EXP,RADIUS0,RADIUS_EXP")?;
        return Ok(ScheduleChoice::Explicit(Schedule::Power {
            step0: v[0],
            step_exp: v[1],
            radius0: v[2],
            radius_exp: v[3],
        }));
    }
    Err(CliError::BadFlag(format!(
        "unknown schedule {text:?}; use theorem, constant:STEP,RADIUS, or \
         power:STEP0,STEP_EXP,RADIUS0,RADIUS_EXP"
    )))
}

/// Resolve a schedule choice at a horizon, surfacing the theorem guarantee
/// when one applies.
pub fn resolve_schedule(
    choice: ScheduleChoice,
    kind: EstimatorKind,
    game: &QuantumGame,
    horizon: u64,
) -> Result<(Schedule, Option<TheoremTuning>)> {
    match choice {
        ScheduleChoice::Theorem => {
            let constants = game.constants()?;
            let tuning = theorem_tuning(kind, &constants, game.dims(), horizon)?;
            Ok((tuning.schedule, Some(tuning)))
        }
        ScheduleChoice::Explicit(schedule) => Ok((schedule, None)),
    }
}

/// Reject a schedule the run could not execute: nonpositive or nonfinite
/// steps, or an exploration radius outside `(0, r_min)` for the payoff
/// estimators. Power schedules are monotone in `t`, so checking both
/// endpoints covers every iterate.
pub fn check_feasible(
    schedule: &Schedule,
    kind: EstimatorKind,
    horizon: u64,
    geometry: &ExplorationGeometry,
) -> Result<()> {
    let r_min = geometry.min_radius();
    for &t in &[1u64, horizon.max(1)] {
        let gamma = schedule.step(t);
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(CliError::Lib(Error::InfeasibleSchedule(format!(
                "step gamma_t = {gamma:e} at t = {t}; steps must be positive and finite"
            ))));
        }
        let delta = schedule.radius(t);
        match kind {
            EstimatorKind::FullInfo => {
                if !(delta >= 0.0) {
                    return Err(CliError::Lib(Error::InfeasibleSchedule(format!(
                        "radius delta_t = {delta:e} at t = {t}; radii must be nonnegative"
                    ))));
                }
            }
            EstimatorKind::TwoPoint | EstimatorKind::OnePoint => {
                if !(delta > 0.0) || !delta.is_finite() {
                    return Err(CliError::Lib(Error::InfeasibleSchedule(format!(
                        "radius delta_t = {delta:e} at t = {t}; payoff-based estimators need a \
                         positive exploration radius"
                    ))));
                }
                if delta >= r_min {
                    return Err(CliError::Lib(Error::InfeasibleSchedule(format!(
                        "radius delta_t = {delta:.6e} at t = {t} reaches the safety radius \
                         {r_min:.6e}; the pivoted play could leave the feasible set"
                    ))));
                }
            }
        }
    }
    Ok(())
}

/// Seeds for a block of runs: the documented splitmix expansion of the base
/// seed by run index.
pub fn derive_seeds(base_seed: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| stream_seed(base_seed, i)).collect()
}

/// Schedule parameters as recorded in the manifest.
#[derive(Clone, Debug, Serialize)]
pub struct ScheduleEcho {
    /// The `--schedule` flag verbatim.
    pub flag: String,
    pub kind: &'static str,
    pub step_t1: f64,
    pub radius_t1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_horizon: Option<u64>,
}

impl ScheduleEcho {
    pub fn new(flag: &str, schedule: &Schedule, tuning: Option<&TheoremTuning>) -> Self {
        ScheduleEcho {
            flag: flag.to_string(),
            kind: match schedule {
                Schedule::Constant { .. } => "constant",
                Schedule::Power { .. } => "power",
            },
            step_t1: schedule.step(1),
            radius_t1: schedule.radius(1),
            gap_bound: tuning.map(|t| t.gap_bound),
            min_horizon: tuning.map(|t| t.min_horizon),
        }
    }
}

/// Everything that determines a run block's outputs.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfigEcho {
    pub command: &'static str,
    /// The `--game` flag verbatim.
    pub game: String,
    /// `builtin:NAME` or the SHA-256 of the game file bytes.
    pub game_content: String,
    pub algo: &'static str,
    pub schedule: ScheduleEcho,
    pub horizon: u64,
    pub seed_count: usize,
    pub base_seed: u64,
    pub stride: usize,
    pub initial_dual_scale: f64,
}

/// The manifest written next to a run block's CSV files.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool_version: &'static str,
    pub config: RunConfigEcho,
    /// SHA-256 of the serialized config; identical hashes mean identical
    /// CSV outputs.
    pub config_hash: String,
    /// Per-run seeds, expanded from the base seed by run index.
    pub seeds: Vec<u64>,
    /// Output files, relative to the manifest's directory.
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(config: RunConfigEcho, seeds: Vec<u64>, outputs: Vec<String>) -> Self {
        let config_hash = sha256_hex(
            serde_json::to_string(&config)
                .expect("config echo always serializes")
                .as_bytes(),
        );
        Manifest {
            tool_version: env!("CARGO_PKG_VERSION"),
            config,
            config_hash,
            seeds,
            outputs,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("the manifest always serializes");
        text.push('\n');
        text
    }
}

/// Lowercase hex SHA-256 digest.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Content identifier for the `--game` flag: builtin fixtures by name, game
/// files by digest of their bytes.
pub fn game_content_id(source: &str) -> Result<String> {
    if spectraplex::fixtures::FIXTURE_NAMES.contains(&source) {
        return Ok(format!("builtin:{source}"));
    }
    let bytes = std::fs::read(source).map_err(crate::error::io_err(source))?;
    Ok(sha256_hex(&bytes))
}
