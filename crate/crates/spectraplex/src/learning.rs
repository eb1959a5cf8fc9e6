//! Matrix multiplicative weights and its payoff-based variants.
//!
//! Every player keeps a dual score matrix `Y_i` and plays its Gibbs state
//! `X_i = exp(Y_i) / tr exp(Y_i)`. One learning step is
//!
//! ```text
//! Y_i ← Y_i + γ_t Z_i,
//! ```
//!
//! where `Z_i` is a gradient signal produced by one of three feedback
//! models:
//!
//! - **full information**: `Z_i = V_i(X)`, the exact individual gradient;
//! - **two-point**: each player perturbs a pivoted strategy along a random
//!   basis direction; the payoff difference of the `+δ` and `−δ` plays,
//!   rescaled by `D_i / 2δ`, estimates the directional derivative;
//! - **one-point**: the profile is played once at `+δ`, a single joint
//!   measurement outcome is drawn, and each player rescales its own
//!   realized payoff by `D_i / δ` along its direction.
//!
//! The module also provides the theorem-matched step/radius tunings with
//! their ergodic gap guarantees, vanishing-step schedule checks for
//! last-iterate convergence, the quantum relative entropy (Bregman
//! divergence of von Neumann entropy), and a per-step energy audit of the
//! inequality
//!
//! ```text
//! D(P, X_{t+1}) ≤ D(P, X_t) + γ ⟨Z, X_t − P⟩ + γ²‖Z‖²/2
//! ```
//!
//! that drives both the regret and the stability analyses.

use crate::basis::{perturb, pivot, safety_params, BasisSet, SafetyParams, TangentDirection};
use crate::error::{Error, Result};
use crate::game::QuantumGame;
use crate::hermitian::{DensityMatrix, HermitianMatrix};
use crate::seeding::stream_rng;
use rand::Rng;

/// Eigenvalues of the second Bregman argument are clamped to this floor
/// before taking logarithms.
pub const BREGMAN_EIG_FLOOR: f64 = 1e-15;

/// Feedback model of a learning run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimatorKind {
    /// Exact individual gradients every step.
    FullInfo,
    /// Two payoff queries per step (pivoted `±δ` plays).
    TwoPoint,
    /// One joint play and a single sampled measurement outcome per step.
    OnePoint,
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::FullInfo => "full-info",
            EstimatorKind::TwoPoint => "two-point",
            EstimatorKind::OnePoint => "one-point",
        }
    }
}

/// Step and exploration-radius schedule, indexed by `t = 1, 2, ...`.
#[derive(Clone, Copy, Debug)]
pub enum Schedule {
    /// `γ_t = step`, `δ_t = radius`.
    Constant { step: f64, radius: f64 },
    /// `γ_t = step0 / t^step_exp`, `δ_t = radius0 / t^radius_exp`.
    Power {
        step0: f64,
        step_exp: f64,
        radius0: f64,
        radius_exp: f64,
    },
}

impl Schedule {
    pub fn step(&self, t: u64) -> f64 {
        match *self {
            Schedule::Constant { step, .. } => step,
            Schedule::Power {
                step0, step_exp, ..
            } => step0 * (t as f64).powf(-step_exp),
        }
    }

    pub fn radius(&self, t: u64) -> f64 {
        match *self {
            Schedule::Constant { radius, .. } => radius,
            Schedule::Power {
                radius0,
                radius_exp,
                ..
            } => radius0 * (t as f64).powf(-radius_exp),
        }
    }
}

/// Verdict on the three series conditions a vanishing schedule
/// `γ_t ∝ t^{-p}`, `δ_t ∝ t^{-q}` must satisfy for last-iterate
/// convergence to a stable equilibrium.
#[derive(Clone, Copy, Debug)]
pub struct ScheduleVerdict {
    /// `Σ γ_t = ∞`, i.e. `p ≤ 1`.
    pub step_diverges: bool,
    /// `Σ γ_t δ_t < ∞`, i.e. `p + q > 1`.
    pub bias_converges: bool,
    /// `Σ (γ_t / δ_t)² < ∞`, i.e. `2(p − q) > 1`.
    pub ratio_converges: bool,
}

impl ScheduleVerdict {
    pub fn ok(&self) -> bool {
        self.step_diverges && self.bias_converges && self.ratio_converges
    }
}

/// Evaluate the three series conditions for exponents `(p, q)`.
pub fn vs_schedule_verdict(step_exp: f64, radius_exp: f64) -> ScheduleVerdict {
    ScheduleVerdict {
        step_diverges: step_exp <= 1.0,
        bias_converges: step_exp + radius_exp > 1.0,
        ratio_converges: 2.0 * (step_exp - radius_exp) > 1.0,
    }
}

/// Error unless `(p, q)` satisfies all three series conditions; the message
/// names every failing series.
pub fn require_vs_schedule(step_exp: f64, radius_exp: f64) -> Result<()> {
    let verdict = vs_schedule_verdict(step_exp, radius_exp);
    if verdict.ok() {
        return Ok(());
    }
    let mut failures = Vec::new();
    if !verdict.step_diverges {
        failures.push(format!(
            "step series Σ γ_t must diverge (needs p ≤ 1, got p = {step_exp})"
        ));
    }
    if !verdict.bias_converges {
        failures.push(format!(
            "bias series Σ γ_t δ_t must converge (needs p + q > 1, got p + q = {})",
            step_exp + radius_exp
        ));
    }
    if !verdict.ratio_converges {
        failures.push(format!(
            "variance series Σ (γ_t/δ_t)² must converge (needs 2(p − q) > 1, got 2(p − q) = {})",
            2.0 * (step_exp - radius_exp)
        ));
    }
    Err(Error::InfeasibleSchedule(failures.join("; ")))
}

/// A theorem-matched tuning: the constant schedule plus the ergodic
/// duality-gap guarantee it earns at the given horizon.
#[derive(Clone, Copy, Debug)]
pub struct TheoremTuning {
    pub schedule: Schedule,
    /// Guaranteed bound on the duality gap of the time-averaged profile.
    pub gap_bound: f64,
    /// Smallest horizon at which the tuned radius clears the safety radius.
    pub min_horizon: u64,
}

/// Exploration machinery shared by the payoff-based estimators: one tangent
/// basis and one safety pair per player.
#[derive(Clone, Debug)]
pub struct ExplorationGeometry {
    pub bases: Vec<BasisSet>,
    pub safeties: Vec<SafetyParams>,
}

impl ExplorationGeometry {
    pub fn new(dims: &[usize]) -> Result<Self> {
        let bases = dims.iter().map(|&d| BasisSet::new(d)).collect();
        let safeties = dims
            .iter()
            .map(|&d| safety_params(d))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { bases, safeties })
    }

    /// Largest basis size `D_i = d_i² − 1` across players.
    pub fn max_directions(&self) -> usize {
        self.bases.iter().map(BasisSet::len).max().unwrap_or(0)
    }

    /// Smallest safety radius across players; every `δ_t` must stay below it.
    pub fn min_radius(&self) -> f64 {
        self.safeties
            .iter()
            .map(SafetyParams::radius)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Compute the theorem-matched schedule and gap guarantee for a feedback
/// model at a given horizon.
///
/// For the payoff-based models the tuned radius shrinks like a power of
/// `1/T`, so short horizons can be infeasible: the radius would not clear
/// the safety radius. The error then reports the smallest feasible horizon.
pub fn theorem_tuning(
    kind: EstimatorKind,
    constants: &crate::game::GameConstants,
    dims: &[usize],
    horizon: u64,
) -> Result<TheoremTuning> {
    if horizon == 0 {
        return Err(Error::InsufficientSamples {
            got: 0,
            need: 1,
            what: "learning horizon",
        });
    }
    let geometry = ExplorationGeometry::new(dims)?;
    let d_max = geometry.max_directions() as f64;
    let r_min = geometry.min_radius();
    let t = horizon as f64;
    let h = constants.entropy_budget;
    let l = constants.lipschitz;
    let l2 = constants.smoothness;
    let b = constants.payoff_bound;

    match kind {
        EstimatorKind::FullInfo => {
            let step = (2.0 * h / t).sqrt() / l;
            Ok(TheoremTuning {
                schedule: Schedule::Constant { step, radius: 0.0 },
                gap_bound: l * (2.0 * h / t).sqrt(),
                min_horizon: 1,
            })
        }
        EstimatorKind::TwoPoint => {
            let factor = (h / (8.0 * t)).sqrt();
            let step = factor / (d_max * l);
            let radius = (l / l2) * factor;
            let min_horizon = (h * l * l / (8.0 * l2 * l2 * r_min * r_min)).floor() as u64 + 1;
            if radius >= r_min {
                return Err(Error::HorizonTooShort {
                    delta: radius,
                    radius: r_min,
                    horizon,
                    min_horizon,
                });
            }
            Ok(TheoremTuning {
                schedule: Schedule::Constant { step, radius },
                gap_bound: 8.0 * d_max * l * (2.0 * h / t).sqrt(),
                min_horizon,
            })
        }
        EstimatorKind::OnePoint => {
            let kappa = h / (2.0 * t);
            let step = kappa.powf(0.75) / (2.0 * d_max * (b * l2).sqrt());
            let radius = kappa.powf(0.25) * (b / (4.0 * l2)).sqrt();
            let min_horizon =
                (h * b * b / (32.0 * l2 * l2 * r_min.powi(4))).floor() as u64 + 1;
            if radius >= r_min {
                return Err(Error::HorizonTooShort {
                    delta: radius,
                    radius: r_min,
                    horizon,
                    min_horizon,
                });
            }
            Ok(TheoremTuning {
                schedule: Schedule::Constant { step, radius },
                gap_bound: 2.0f64.powf(0.75) * 8.0 * h.powf(0.25) * d_max * (b * l2).sqrt()
                    / t.powf(0.25),
                min_horizon,
            })
        }
    }
}

/// One gradient signal for every player, with its stacked Frobenius norm.
#[derive(Clone, Debug)]
pub struct GradientEstimate {
    pub z: Vec<HermitianMatrix>,
    /// `sqrt(Σ_i ‖Z_i‖_F²)`.
    pub norm: f64,
}

fn stacked_norm(z: &[HermitianMatrix]) -> f64 {
    z.iter()
        .map(|m| m.frob_norm().powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Produce one gradient signal at the profile `x` under the given feedback
/// model.
///
/// Draw order from `rng` is fixed: player 0's direction first, then player
/// 1's, and so on; the one-point model draws the shared measurement outcome
/// last. Two-point directions use an element draw followed by a sign draw;
/// one-point directions use a single draw over the signed elements.
pub fn estimate_gradient(
    game: &QuantumGame,
    x: &[DensityMatrix],
    kind: EstimatorKind,
    delta: f64,
    geometry: &ExplorationGeometry,
    rng: &mut impl Rng,
) -> Result<GradientEstimate> {
    if kind == EstimatorKind::FullInfo {
        let z = game.gradient_profile(x)?;
        let norm = stacked_norm(&z);
        return Ok(GradientEstimate { z, norm });
    }
    if delta <= 0.0 {
        return Err(Error::InfeasibleSchedule(format!(
            "payoff-based estimation needs a positive exploration radius, got {delta}"
        )));
    }
    let n = x.len();
    let signed = kind == EstimatorKind::OnePoint;
    let mut directions: Vec<TangentDirection> = Vec::with_capacity(n);
    for basis in geometry.bases.iter().take(n) {
        directions.push(basis.sample_direction(rng, signed)?);
    }

    let z: Vec<HermitianMatrix> = match kind {
        EstimatorKind::TwoPoint => {
            let mut plus = Vec::with_capacity(n);
            let mut minus = Vec::with_capacity(n);
            for i in 0..n {
                let pivoted = pivot(&x[i], &geometry.safeties[i], delta)?;
                plus.push(perturb(&pivoted, &directions[i], delta)?);
                minus.push(perturb(&pivoted, &directions[i], -delta)?);
            }
            let u_plus = game.payoffs(&plus)?;
            let u_minus = game.payoffs(&minus)?;
            (0..n)
                .map(|i| {
                    let d_i = geometry.bases[i].len() as f64;
                    let coeff = d_i / (2.0 * delta)
                        * (u_plus[i] - u_minus[i])
                        * directions[i].sign as f64;
                    directions[i].matrix.scale(coeff)
                })
                .collect()
        }
        EstimatorKind::OnePoint => {
            let outcomes = game.outcomes().ok_or(Error::BanditNeedsPovm)?;
            let mut played = Vec::with_capacity(n);
            for i in 0..n {
                let pivoted = pivot(&x[i], &geometry.safeties[i], delta)?;
                played.push(perturb(&pivoted, &directions[i], delta)?);
            }
            let omega = game.sample_outcome(&played, rng)?;
            let payoffs = &outcomes[omega].payoffs;
            (0..n)
                .map(|i| {
                    let d_i = geometry.bases[i].len() as f64;
                    let coeff = d_i / delta * payoffs[i] * directions[i].sign as f64;
                    directions[i].matrix.scale(coeff)
                })
                .collect()
        }
        EstimatorKind::FullInfo => unreachable!("handled above"),
    };
    let norm = stacked_norm(&z);
    Ok(GradientEstimate { z, norm })
}

/// The log-sum-exp of a dual score's spectrum, plus the induced Gibbs
/// strategy and its exact matrix logarithm `Y − lse(Y) I`.
fn gibbs_state(y: &HermitianMatrix) -> Result<(DensityMatrix, HermitianMatrix, f64)> {
    let eig = y.eigh()?;
    let top = eig.max_value();
    let weights: Vec<f64> = eig.values().iter().map(|&l| (l - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    let lse = top + total.ln();
    let spectrum: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let x = DensityMatrix::new(eig.assemble(&spectrum))?;
    let mut log_x = y.clone();
    log_x.axpy(-lse, &HermitianMatrix::identity(y.dim()))?;
    Ok((x, log_x, lse))
}

/// Dual scores and the Gibbs strategies they induce, one per player.
#[derive(Clone, Debug)]
pub struct LearnerState {
    y: Vec<HermitianMatrix>,
    x: Vec<DensityMatrix>,
    log_x: Vec<HermitianMatrix>,
}

impl LearnerState {
    /// Zero duals: every player starts at the maximally mixed strategy.
    pub fn new(dims: &[usize]) -> Self {
        let y: Vec<HermitianMatrix> = dims.iter().map(|&d| HermitianMatrix::zeros(d)).collect();
        Self::with_duals(y).expect("zero duals are always valid")
    }

    /// Start from explicit dual scores.
    pub fn with_duals(y: Vec<HermitianMatrix>) -> Result<Self> {
        let mut x = Vec::with_capacity(y.len());
        let mut log_x = Vec::with_capacity(y.len());
        for yi in &y {
            let (xi, li, _) = gibbs_state(yi)?;
            x.push(xi);
            log_x.push(li);
        }
        Ok(Self { y, x, log_x })
    }

    #[inline]
    pub fn strategies(&self) -> &[DensityMatrix] {
        &self.x
    }

    #[inline]
    pub fn duals(&self) -> &[HermitianMatrix] {
        &self.y
    }

    /// Exact matrix logarithms of the current strategies.
    #[inline]
    pub fn log_strategies(&self) -> &[HermitianMatrix] {
        &self.log_x
    }

    /// One multiplicative-weights step: `Y_i += γ Z_i`, re-exponentiate.
    pub fn step(&mut self, z: &[HermitianMatrix], gamma: f64) -> Result<()> {
        if z.len() != self.y.len() {
            return Err(Error::DimMismatch(format!(
                "{} gradient signals for {} players",
                z.len(),
                self.y.len()
            )));
        }
        for (i, zi) in z.iter().enumerate() {
            self.y[i].axpy(gamma, zi)?;
            let (xi, li, _) = gibbs_state(&self.y[i])?;
            self.x[i] = xi;
            self.log_x[i] = li;
        }
        Ok(())
    }
}

/// A random traceless dual score `scale · Σ_a g_a W_a` with standard normal
/// coefficients; its expected squared norm is `scale² D`.
pub fn random_dual(basis: &BasisSet, scale: f64, rng: &mut impl Rng) -> HermitianMatrix {
    let mut y = HermitianMatrix::zeros(basis.dim());
    for element in basis.elements() {
        let g: f64 = {
            // Box-Muller as in `game::random_density`; kept local so dual
            // draws and density draws consume the stream identically.
            let u: f64 = 1.0 - rng.gen::<f64>();
            let v: f64 = rng.gen();
            (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
        };
        y.axpy(scale * g, element).expect("basis dims match");
    }
    y
}

/// Quantum relative entropy `D(P ‖ X) = tr(P log P) − tr(P log X)` of one
/// player pair, together with the number of clamped eigenvalues of `X`.
///
/// Eigenvalues of `X` below [`BREGMAN_EIG_FLOOR`] are clamped up to the
/// floor; `P`'s zero eigenvalues contribute `0 log 0 = 0`.
pub fn bregman_pair(p: &DensityMatrix, x: &DensityMatrix) -> Result<(f64, usize)> {
    if p.dim() != x.dim() {
        return Err(Error::DimMismatch(format!(
            "relative entropy of dims {} and {}",
            p.dim(),
            x.dim()
        )));
    }
    let pe = p.hermitian().eigh()?;
    let mut entropy = 0.0;
    for &l in pe.values() {
        if l > 0.0 {
            entropy += l * l.ln();
        }
    }
    let xe = x.hermitian().eigh()?;
    let mut clamped = 0usize;
    let logs: Vec<f64> = xe
        .values()
        .iter()
        .map(|&l| {
            let floored = if l < BREGMAN_EIG_FLOOR {
                clamped += 1;
                BREGMAN_EIG_FLOOR
            } else {
                l
            };
            floored.ln()
        })
        .collect();
    let log_x = xe.assemble(&logs);
    let cross = p.matrix().trace_product(log_x.matrix())?.re;
    Ok((entropy - cross, clamped))
}

/// Sum of [`bregman_pair`] over a profile.
pub fn bregman_profile(p: &[DensityMatrix], x: &[DensityMatrix]) -> Result<(f64, usize)> {
    if p.len() != x.len() {
        return Err(Error::DimMismatch(format!(
            "profiles have {} and {} strategies",
            p.len(),
            x.len()
        )));
    }
    let mut value = 0.0;
    let mut clamped = 0;
    for (pi, xi) in p.iter().zip(x) {
        let (v, c) = bregman_pair(pi, xi)?;
        value += v;
        clamped += c;
    }
    Ok((value, clamped))
}

/// Residual of the per-step energy inequality for the transition
/// `before → after` driven by signal `z` at step size `gamma`:
///
/// ```text
/// D(P, before) + γ ⟨Z, before − P⟩ + γ²‖Z‖²/2 − D(P, after)
/// ```
///
/// Nonnegative in exact arithmetic whenever `after` is the multiplicative-
/// weights update of `before`.
pub fn energy_residual(
    reference: &[DensityMatrix],
    before: &[DensityMatrix],
    after: &[DensityMatrix],
    z: &[HermitianMatrix],
    gamma: f64,
) -> Result<f64> {
    let (d_before, _) = bregman_profile(reference, before)?;
    let (d_after, _) = bregman_profile(reference, after)?;
    let mut inner = 0.0;
    for i in 0..z.len() {
        let shift = before[i].hermitian().sub(reference[i].hermitian())?;
        inner += z[i].inner(&shift)?;
    }
    let z_sq: f64 = z.iter().map(|m| m.frob_norm().powi(2)).sum();
    Ok(d_before + gamma * inner + 0.5 * gamma * gamma * z_sq - d_after)
}

/// Configuration of one learning run.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub estimator: EstimatorKind,
    pub schedule: Schedule,
    /// Number of iterates `T`; the run makes `T − 1` transitions.
    pub horizon: u64,
    pub seed: u64,
    /// Scale of the random traceless initial duals; `0` starts every player
    /// at the maximally mixed strategy.
    pub initial_dual_scale: f64,
    /// Reference profile for the entropy diagnostics; defaults to the
    /// game's equilibrium, falling back to the uniform profile.
    pub reference: Option<Vec<DensityMatrix>>,
}

/// One recorded iterate of a run.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub t: u64,
    /// Duality gap of the time-averaged profile (NaN unless zero-sum).
    pub gap_avg: f64,
    /// Duality gap of the current iterate (NaN unless zero-sum).
    pub gap_last: f64,
    /// Relative entropy `D(reference ‖ X_t)`.
    pub bregman: f64,
    /// Expected payoffs of the current iterate.
    pub payoffs: Vec<f64>,
    /// Energy-inequality residual of the transition leaving this iterate
    /// (NaN for the final iterate, which makes no transition).
    pub energy_residual: f64,
    /// Step size γ_t of that transition.
    pub gamma: f64,
    /// Exploration radius δ_t of that transition.
    pub delta: f64,
}

/// Everything a finished run reports.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub records: Vec<RunRecord>,
    pub final_profile: Vec<DensityMatrix>,
    pub averaged_profile: Vec<DensityMatrix>,
    /// `D(reference ‖ X_T)`.
    pub final_bregman: f64,
    /// Duality gap of the averaged profile (NaN unless zero-sum).
    pub final_gap_avg: f64,
    /// Smallest energy residual over all transitions (infinite when `T = 1`).
    pub min_energy_residual: f64,
}

/// Iterates at which a run of the given horizon records diagnostics:
/// every iterate up to 10⁴, then a geometric grid of about 24 points per
/// decade, always including 1 and the horizon itself.
pub fn record_grid(horizon: u64) -> Vec<u64> {
    if horizon <= 10_000 {
        return (1..=horizon).collect();
    }
    let mut grid = Vec::new();
    let mut k = 0u32;
    loop {
        let value = 10f64.powf(k as f64 / 24.0).round() as u64;
        if value >= horizon {
            break;
        }
        grid.push(value.max(1));
        k += 1;
    }
    grid.push(horizon);
    grid.dedup();
    grid
}

/// Run the learning dynamics on a game.
///
/// The run is fully determined by `options`: the same configuration always
/// produces identical records. All randomness (initial duals, exploration
/// directions, measurement outcomes) comes from one counter-based stream
/// seeded by `options.seed`.
pub fn run(game: &QuantumGame, options: &RunOptions) -> Result<RunResult> {
    if options.horizon == 0 {
        return Err(Error::InsufficientSamples {
            got: 0,
            need: 1,
            what: "learning horizon",
        });
    }
    if options.estimator == EstimatorKind::OnePoint && !game.has_povm() {
        return Err(Error::BanditNeedsPovm);
    }
    let n = game.num_players();
    let geometry = ExplorationGeometry::new(game.dims())?;
    let reference: Vec<DensityMatrix> = match &options.reference {
        Some(p) => p.clone(),
        None => match game.equilibrium() {
            Some(eq) => eq.to_vec(),
            None => crate::game::uniform_profile(game.dims()),
        },
    };
    game.check_profile(&reference)?;

    let mut rng = stream_rng(options.seed, 0);

    let mut duals: Vec<HermitianMatrix> = game
        .dims()
        .iter()
        .map(|&d| HermitianMatrix::zeros(d))
        .collect();
    if options.initial_dual_scale != 0.0 {
        for (i, basis) in geometry.bases.iter().enumerate() {
            duals[i] = random_dual(basis, options.initial_dual_scale, &mut rng);
        }
    }
    let mut state = LearnerState::with_duals(duals)?;

    // tr(P log P) is constant along the run.
    let mut reference_entropy = 0.0;
    for p in &reference {
        for &l in p.hermitian().eigh()?.values() {
            if l > 0.0 {
                reference_entropy += l * l.ln();
            }
        }
    }
    // D(P, X_t) via the exact logs the Gibbs construction provides.
    let divergence = |state: &LearnerState| -> Result<f64> {
        let mut cross = 0.0;
        for (p, log_x) in reference.iter().zip(state.log_strategies()) {
            cross += p.hermitian().inner(log_x)?;
        }
        Ok(reference_entropy - cross)
    };

    let mut average: Vec<HermitianMatrix> = state
        .strategies()
        .iter()
        .map(|x| x.hermitian().clone())
        .collect();
    let averaged_profile = |average: &[HermitianMatrix], t: u64| -> Vec<DensityMatrix> {
        average
            .iter()
            .map(|s| DensityMatrix::trusted(s.scale(1.0 / t as f64)))
            .collect()
    };

    let grid = record_grid(options.horizon);
    let mut grid_cursor = 0usize;
    let mut records: Vec<RunRecord> = Vec::with_capacity(grid.len());
    let mut bregman_now = divergence(&state)?;
    let mut min_energy_residual = f64::INFINITY;
    let zero_sum = game.is_zero_sum() && n == 2;

    for t in 1..=options.horizon {
        let gamma = options.schedule.step(t);
        let delta = options.schedule.radius(t);

        let mut recorded_index = None;
        if grid_cursor < grid.len() && grid[grid_cursor] == t {
            grid_cursor += 1;
            let averaged = averaged_profile(&average, t);
            let (gap_avg, gap_last) = if zero_sum {
                (
                    game.duality_gap(&averaged)?,
                    game.duality_gap(state.strategies())?,
                )
            } else {
                (f64::NAN, f64::NAN)
            };
            records.push(RunRecord {
                t,
                gap_avg,
                gap_last,
                bregman: bregman_now,
                payoffs: game.payoffs(state.strategies())?,
                energy_residual: f64::NAN,
                gamma,
                delta,
            });
            recorded_index = Some(records.len() - 1);
        }

        if t == options.horizon {
            break;
        }

        let estimate =
            estimate_gradient(game, state.strategies(), options.estimator, delta, &geometry, &mut rng)?;
        let mut inner = 0.0;
        for i in 0..n {
            let shift = state.strategies()[i]
                .hermitian()
                .sub(reference[i].hermitian())?;
            inner += estimate.z[i].inner(&shift)?;
        }
        let d_before = bregman_now;

        state.step(&estimate.z, gamma)?;
        for (sum, x) in average.iter_mut().zip(state.strategies()) {
            sum.axpy(1.0, x.hermitian())?;
        }
        bregman_now = divergence(&state)?;

        let residual =
            d_before + gamma * inner + 0.5 * gamma * gamma * estimate.norm.powi(2) - bregman_now;
        min_energy_residual = min_energy_residual.min(residual);
        if let Some(idx) = recorded_index {
            records[idx].energy_residual = residual;
        }
    }

    let final_gap_avg = records
        .last()
        .map(|r| r.gap_avg)
        .unwrap_or(f64::NAN);
    Ok(RunResult {
        final_profile: state.strategies().to_vec(),
        averaged_profile: averaged_profile(&average, options.horizon),
        final_bregman: bregman_now,
        final_gap_avg,
        min_energy_residual,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::{random_profile, uniform_profile};
    use crate::hermitian::eigen::softmax_density;

    #[test]
    fn single_step_matches_frozen_logistic_weights() {
        let mut state = LearnerState::new(&[2]);
        let z = vec![HermitianMatrix::from_real_diag(&[1.0, 0.0])];
        state.step(&z, 1.0).unwrap();
        let x = &state.strategies()[0];
        assert!((x.matrix().get(0, 0).re - 0.7310585786300049).abs() < 1e-12);
        assert!((x.matrix().get(1, 1).re - 0.2689414213699951).abs() < 1e-12);
    }

    #[test]
    fn gibbs_logs_agree_with_clamped_divergence() {
        let mut rng = stream_rng(3, 0);
        let basis = BasisSet::new(3);
        let y = vec![random_dual(&basis, 2.0, &mut rng)];
        let state = LearnerState::with_duals(y).unwrap();
        let p = crate::game::random_density(3, &mut rng);
        let via_logs = {
            let mut entropy = 0.0;
            for &l in p.hermitian().eigh().unwrap().values() {
                if l > 0.0 {
                    entropy += l * l.ln();
                }
            }
            entropy - p.hermitian().inner(&state.log_strategies()[0]).unwrap()
        };
        let (via_matrices, clamped) = bregman_pair(&p, &state.strategies()[0]).unwrap();
        assert_eq!(clamped, 0);
        assert!((via_logs - via_matrices).abs() < 1e-10);
    }

    #[test]
    fn relative_entropy_of_pure_state_to_center_is_log_two() {
        let p = DensityMatrix::basis_state(2, 0);
        let x = DensityMatrix::maximally_mixed(2);
        let (value, clamped) = bregman_pair(&p, &x).unwrap();
        assert!((value - 0.6931471805599453).abs() < 1e-14);
        assert_eq!(clamped, 0);
        let (zero, _) = bregman_pair(&x, &x).unwrap();
        assert!(zero.abs() < 1e-14);
    }

    #[test]
    fn pinsker_inequality_holds_on_random_pairs() {
        let mut rng = stream_rng(9, 0);
        for _ in 0..50 {
            let p = crate::game::random_density(3, &mut rng);
            let x = crate::game::random_density(3, &mut rng);
            let (div, _) = bregman_pair(&p, &x).unwrap();
            let dist_sq = p
                .hermitian()
                .sub(x.hermitian())
                .unwrap()
                .frob_norm()
                .powi(2);
            assert!(div + 1e-12 >= 0.5 * dist_sq);
        }
    }

    #[test]
    fn energy_residual_is_nonnegative_on_random_transitions() {
        let mut rng = stream_rng(17, 0);
        let basis = BasisSet::new(3);
        for trial in 0..50 {
            let y = vec![
                random_dual(&basis, 1.5, &mut rng),
                random_dual(&basis, 0.5, &mut rng),
            ];
            let mut state = LearnerState::with_duals(y).unwrap();
            let before = state.strategies().to_vec();
            let z = vec![
                random_dual(&basis, 3.0, &mut rng),
                random_dual(&basis, 3.0, &mut rng),
            ];
            let gamma = 0.05 + 0.05 * (trial as f64 % 7.0);
            state.step(&z, gamma).unwrap();
            let reference = vec![
                crate::game::random_density(3, &mut rng),
                crate::game::random_density(3, &mut rng),
            ];
            let residual =
                energy_residual(&reference, &before, state.strategies(), &z, gamma).unwrap();
            assert!(residual >= -1e-8, "residual {residual} in trial {trial}");
        }
    }

    #[test]
    fn gibbs_state_matches_spectral_softmax() {
        let mut rng = stream_rng(23, 0);
        let basis = BasisSet::new(4);
        for _ in 0..10 {
            let y = random_dual(&basis, 5.0, &mut rng);
            let via_gibbs = gibbs_state(&y).unwrap().0;
            let via_softmax = softmax_density(&y).unwrap();
            assert!(
                via_gibbs
                    .matrix()
                    .max_abs_diff(via_softmax.matrix())
                    .unwrap()
                    < 1e-12
            );
        }
    }

    #[test]
    fn theorem_tunings_match_frozen_matching_pennies_values() {
        let game = fixtures::matching_pennies();
        let constants = game.constants().unwrap();
        let dims = game.dims();

        let full = theorem_tuning(EstimatorKind::FullInfo, &constants, dims, 10_000).unwrap();
        match full.schedule {
            Schedule::Constant { step, radius } => {
                assert!((step - 0.008325546111576978).abs() < 1e-15);
                assert_eq!(radius, 0.0);
            }
            _ => panic!("expected constant schedule"),
        }
        assert!((full.gap_bound - 0.03330218444630791).abs() < 1e-15);

        let two = theorem_tuning(EstimatorKind::TwoPoint, &constants, dims, 10_000).unwrap();
        match two.schedule {
            Schedule::Constant { step, radius } => {
                assert!((step - 0.0006937955092980816).abs() < 1e-15);
                assert!((radius - 0.0029435250562886866).abs() < 1e-15);
            }
            _ => panic!("expected constant schedule"),
        }
        assert!((two.gap_bound - 0.7992524267113899).abs() < 1e-12);
        assert_eq!(two.min_horizon, 1);

        let one = theorem_tuning(EstimatorKind::OnePoint, &constants, dims, 10_000).unwrap();
        match one.schedule {
            Schedule::Constant { step, radius } => {
                assert!((step - 7.528272809280096e-5).abs() < 1e-15);
                assert!((radius - 0.02712713151205213).abs() < 1e-14);
            }
            _ => panic!("expected constant schedule"),
        }
        assert!((one.gap_bound - 7.365803000183556).abs() < 1e-12);
        assert_eq!(one.min_horizon, 1);
    }

    #[test]
    fn schedule_conditions_separate_known_exponent_pairs() {
        assert!(vs_schedule_verdict(0.9, 0.2).ok());
        assert!(require_vs_schedule(0.9, 0.2).is_ok());

        let v = vs_schedule_verdict(0.5, 0.2);
        assert!(!v.ok());
        assert!(!v.ratio_converges);
        assert!(!v.bias_converges);

        let v = vs_schedule_verdict(1.2, 0.2);
        assert!(!v.ok());
        assert!(!v.step_diverges);
        assert!(v.bias_converges && v.ratio_converges);

        match require_vs_schedule(1.2, 0.2) {
            Err(Error::InfeasibleSchedule(msg)) => assert!(msg.contains("diverge")),
            other => panic!("expected schedule rejection, got {other:?}"),
        }
    }

    #[test]
    fn horizon_one_run_reports_the_starting_point_only() {
        let game = fixtures::matching_pennies();
        let result = run(
            &game,
            &RunOptions {
                estimator: EstimatorKind::FullInfo,
                schedule: Schedule::Constant {
                    step: 0.1,
                    radius: 0.0,
                },
                horizon: 1,
                seed: 0,
                initial_dual_scale: 0.0,
                reference: None,
            },
        )
        .unwrap();
        assert_eq!(result.records.len(), 1);
        assert!(result.min_energy_residual.is_infinite());
        let x = &result.final_profile[0];
        assert!(
            x.matrix()
                .max_abs_diff(uniform_profile(game.dims())[0].matrix())
                .unwrap()
                < 1e-15
        );
        assert!(result.final_gap_avg.abs() < 1e-12);
        assert!(result.records[0].energy_residual.is_nan());
    }

    #[test]
    fn identical_options_give_identical_runs() {
        let game = fixtures::matching_pennies();
        let options = RunOptions {
            estimator: EstimatorKind::OnePoint,
            schedule: Schedule::Power {
                step0: 0.2,
                step_exp: 0.9,
                radius0: 0.3,
                radius_exp: 0.2,
            },
            horizon: 200,
            seed: 77,
            initial_dual_scale: 0.25,
            reference: None,
        };
        let a = run(&game, &options).unwrap();
        let b = run(&game, &options).unwrap();
        assert_eq!(a.records.len(), b.records.len());
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.t, rb.t);
            assert_eq!(ra.gap_avg.to_bits(), rb.gap_avg.to_bits());
            assert_eq!(ra.bregman.to_bits(), rb.bregman.to_bits());
            assert_eq!(ra.energy_residual.to_bits(), rb.energy_residual.to_bits());
        }
        for (xa, xb) in a.final_profile.iter().zip(&b.final_profile) {
            assert!(xa.matrix().max_abs_diff(xb.matrix()).unwrap() == 0.0);
        }
    }

    #[test]
    fn bandit_run_rejects_observable_only_games() {
        let mp = fixtures::matching_pennies();
        let game = QuantumGame::from_observables(
            mp.dims().to_vec(),
            mp.observables().to_vec(),
            true,
        )
        .unwrap();
        let options = RunOptions {
            estimator: EstimatorKind::OnePoint,
            schedule: Schedule::Constant {
                step: 0.1,
                radius: 0.1,
            },
            horizon: 10,
            seed: 0,
            initial_dual_scale: 0.0,
            reference: Some(uniform_profile(game.dims())),
        };
        assert!(matches!(run(&game, &options), Err(Error::BanditNeedsPovm)));
    }

    #[test]
    fn estimator_radius_must_be_positive_and_below_safety() {
        let game = fixtures::matching_pennies();
        let geometry = ExplorationGeometry::new(game.dims()).unwrap();
        let x = uniform_profile(game.dims());
        let mut rng = stream_rng(1, 0);
        assert!(estimate_gradient(
            &game,
            &x,
            EstimatorKind::TwoPoint,
            0.0,
            &geometry,
            &mut rng
        )
        .is_err());
        assert!(estimate_gradient(
            &game,
            &x,
            EstimatorKind::TwoPoint,
            geometry.min_radius(),
            &geometry,
            &mut rng
        )
        .is_err());
        assert!(estimate_gradient(
            &game,
            &x,
            EstimatorKind::TwoPoint,
            0.5 * geometry.min_radius(),
            &geometry,
            &mut rng
        )
        .is_ok());
    }

    #[test]
    fn record_grid_covers_endpoints_and_stays_sorted() {
        assert_eq!(record_grid(1), vec![1]);
        assert_eq!(record_grid(5), vec![1, 2, 3, 4, 5]);
        let grid = record_grid(100_000);
        assert_eq!(*grid.first().unwrap(), 1);
        assert_eq!(*grid.last().unwrap(), 100_000);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        assert!(grid.len() > 100 && grid.len() < 150);
    }

    #[test]
    fn two_point_estimate_is_frozen_at_the_saddle_without_initial_duals() {
        // The payoff difference of mirrored perturbations cancels exactly at
        // the uniform saddle of matching pennies, so the estimate is zero
        // and the dynamics cannot leave the starting point.
        let game = fixtures::matching_pennies();
        let geometry = ExplorationGeometry::new(game.dims()).unwrap();
        let x = uniform_profile(game.dims());
        let mut rng = stream_rng(123, 0);
        for _ in 0..20 {
            let est = estimate_gradient(
                &game,
                &x,
                EstimatorKind::TwoPoint,
                0.1,
                &geometry,
                &mut rng,
            )
            .unwrap();
            assert!(est.norm < 1e-12);
        }
    }

    #[test]
    fn full_info_estimate_matches_gradient_profile() {
        let game = fixtures::dominant();
        let geometry = ExplorationGeometry::new(game.dims()).unwrap();
        let mut rng = stream_rng(4, 0);
        let x = random_profile(game.dims(), &mut rng);
        let est = estimate_gradient(&game, &x, EstimatorKind::FullInfo, 0.0, &geometry, &mut rng)
            .unwrap();
        let exact = game.gradient_profile(&x).unwrap();
        for (a, b) in est.z.iter().zip(&exact) {
            assert!(a.matrix().max_abs_diff(b.matrix()).unwrap() < 1e-15);
        }
    }
}
