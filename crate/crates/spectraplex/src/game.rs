//! Quantum games in normal form.
//!
//! A game couples `N` players, each choosing a density matrix `X_i` on a
//! `d_i`-level system, through a payoff structure on the product space.
//! Two descriptions are supported:
//!
//! - **measurement form**: a joint POVM `{P_ω}` with a payoff vector
//!   `u(ω)` per outcome; expected payoffs are `u_i(X) = Σ_ω u_i(ω) tr(P_ω X⊗)`
//!   where `X⊗ = X_1 ⊗ ... ⊗ X_N`;
//! - **observable form**: one Hermitian payoff observable `W_i` per player,
//!   `u_i(X) = tr(W_i X⊗)`.
//!
//! The measurement form always induces observables `W_i = Σ_ω u_i(ω) P_ω`,
//! so every game carries observables internally; only the measurement form
//! supports sampling single outcomes (the feedback channel of the bandit
//! learners).
//!
//! Each payoff is multilinear in the profile, so player `i`'s individual
//! gradient is the partial contraction `V_i(X) = tr_{-i}(W_i X_{-i}⊗)` with
//! `u_i(X) = tr(V_i(X) X_i)`.

use crate::error::{Error, Result};
use crate::hermitian::{
    partial_contraction, C64, ComplexMatrix, DensityMatrix, HermitianMatrix,
};
use crate::seeding::stream_rng;
use rand::Rng;

/// Absolute tolerance for the structural game checks (completeness,
/// zero-sum balance, equilibrium consistency).
pub const GAME_TOL: f64 = 1e-10;

/// Most negative eigenvalue allowed for a measurement element.
pub const POVM_EIG_TOL: f64 = -1e-10;

/// Largest tolerated probability defect (negative mass or trace error)
/// before outcome sampling refuses to proceed.
pub const PROBABILITY_DEFECT_TOL: f64 = 1e-8;

/// A sampled stability inner product must fall below this threshold to
/// count as strictly negative.
pub const VS_STRICT_TOL: f64 = 1e-10;

const CONSTANTS_MC_SEED: u64 = 0x47A3_0C5E_11D2_90BF;
const CONSTANTS_MC_SAMPLES: usize = 200;

/// One measurement outcome: a POVM element and the payoff it pays each player.
#[derive(Clone, Debug)]
pub struct Outcome {
    /// POVM element on the product space (PSD, and the elements sum to I).
    pub element: HermitianMatrix,
    /// `payoffs[i]` is what player `i` receives when this outcome occurs.
    pub payoffs: Vec<f64>,
}

impl Outcome {
    pub fn new(element: HermitianMatrix, payoffs: Vec<f64>) -> Self {
        Self { element, payoffs }
    }
}

/// One structural check with its verdict.
#[derive(Clone, Debug)]
pub struct CheckLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of running every structural check on a game description.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub lines: Vec<CheckLine>,
}

impl ValidationReport {
    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.lines.push(CheckLine {
            name,
            passed,
            detail,
        });
    }

    pub fn ok(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckLine> {
        self.lines.iter().find(|l| !l.passed)
    }
}

/// An `N`-player quantum game over density-matrix strategies.
#[derive(Clone, Debug)]
pub struct QuantumGame {
    dims: Vec<usize>,
    /// Present only for games given in measurement form.
    outcomes: Option<Vec<Outcome>>,
    /// Payoff observables, one per player, on the product space.
    observables: Vec<HermitianMatrix>,
    zero_sum: bool,
    equilibrium: Option<Vec<DensityMatrix>>,
}

fn dims_product(dims: &[usize]) -> usize {
    dims.iter().product()
}

fn check_players(report: &mut ValidationReport, dims: &[usize]) {
    report.push(
        "player count",
        !dims.is_empty(),
        format!("{} players", dims.len()),
    );
    let all_nontrivial = dims.iter().all(|&d| d >= 2);
    report.push(
        "strategy dimensions",
        !dims.is_empty() && all_nontrivial,
        format!("dims {:?}, each must be at least 2", dims),
    );
}

/// Run every structural check on a measurement-form description.
pub fn validate_povm_spec(
    dims: &[usize],
    outcomes: &[Outcome],
    zero_sum: bool,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    check_players(&mut report, dims);
    let product = dims_product(dims);
    let n = dims.len();

    report.push(
        "outcome count",
        !outcomes.is_empty(),
        format!("{} outcomes", outcomes.len()),
    );

    let payoffs_ok = outcomes
        .iter()
        .all(|o| o.payoffs.len() == n && o.payoffs.iter().all(|u| u.is_finite()));
    report.push(
        "payoff vectors",
        payoffs_ok,
        format!("each outcome must pay all {n} players a finite amount"),
    );

    let dims_ok = outcomes.iter().all(|o| o.element.dim() == product);
    report.push(
        "element dimensions",
        dims_ok,
        format!("each element must act on the {product}-dimensional product space"),
    );

    let mut worst_min = f64::INFINITY;
    for o in outcomes {
        if let Ok(eig) = o.element.eigh() {
            worst_min = worst_min.min(eig.min_value());
        } else {
            worst_min = f64::NEG_INFINITY;
        }
    }
    report.push(
        "element positivity",
        !outcomes.is_empty() && worst_min >= POVM_EIG_TOL,
        format!("smallest element eigenvalue {worst_min:.3e}, tolerance {POVM_EIG_TOL:.1e}"),
    );

    let completeness = if dims_ok && !outcomes.is_empty() {
        let mut sum = HermitianMatrix::zeros(product);
        for o in outcomes {
            sum.axpy(1.0, &o.element).expect("dims checked above");
        }
        sum.matrix()
            .max_abs_diff(HermitianMatrix::identity(product).matrix())
            .expect("dims checked above")
    } else {
        f64::INFINITY
    };
    report.push(
        "completeness",
        completeness <= GAME_TOL,
        format!("‖Σ P_ω − I‖_max = {completeness:.3e}, tolerance {GAME_TOL:.1e}"),
    );

    if zero_sum {
        let two_players = n == 2;
        let worst_balance = outcomes
            .iter()
            .filter(|o| o.payoffs.len() == n)
            .map(|o| o.payoffs.iter().sum::<f64>().abs())
            .fold(0.0f64, f64::max);
        report.push(
            "zero-sum balance",
            two_players && payoffs_ok && worst_balance <= GAME_TOL,
            format!(
                "two players required ({n} given), worst outcome payoff sum {worst_balance:.3e}"
            ),
        );
    }

    report
}

/// Run every structural check on an observable-form description.
pub fn validate_observable_spec(
    dims: &[usize],
    observables: &[HermitianMatrix],
    zero_sum: bool,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    check_players(&mut report, dims);
    let product = dims_product(dims);
    let n = dims.len();

    report.push(
        "observable count",
        observables.len() == n,
        format!("{} observables for {} players", observables.len(), n),
    );

    let dims_ok = observables.iter().all(|w| w.dim() == product);
    report.push(
        "observable dimensions",
        dims_ok,
        format!("each observable must act on the {product}-dimensional product space"),
    );

    if zero_sum {
        let balance = if dims_ok && observables.len() == n && n == 2 {
            let mut sum = HermitianMatrix::zeros(product);
            for w in observables {
                sum.axpy(1.0, w).expect("dims checked above");
            }
            sum.frob_norm()
        } else {
            f64::INFINITY
        };
        report.push(
            "zero-sum balance",
            balance <= GAME_TOL,
            format!("two players required ({n} given), ‖W_1 + W_2‖_F = {balance:.3e}"),
        );
    }

    report
}

fn reject(report: &ValidationReport) -> Error {
    let line = report.first_failure().expect("called only on failure");
    if line.name == "zero-sum balance" {
        Error::NotZeroSum(line.detail.clone())
    } else {
        Error::InvalidGame(format!("{}: {}", line.name, line.detail))
    }
}

impl QuantumGame {
    /// Build a game from a joint measurement and per-outcome payoffs.
    pub fn from_povm(dims: Vec<usize>, outcomes: Vec<Outcome>, zero_sum: bool) -> Result<Self> {
        let report = validate_povm_spec(&dims, &outcomes, zero_sum);
        if !report.ok() {
            return Err(reject(&report));
        }
        let product = dims_product(&dims);
        let n = dims.len();
        let mut observables = vec![HermitianMatrix::zeros(product); n];
        for o in &outcomes {
            for (i, w) in observables.iter_mut().enumerate() {
                w.axpy(o.payoffs[i], &o.element)?;
            }
        }
        Ok(Self {
            dims,
            outcomes: Some(outcomes),
            observables,
            zero_sum,
            equilibrium: None,
        })
    }

    /// Build a game directly from payoff observables.
    pub fn from_observables(
        dims: Vec<usize>,
        observables: Vec<HermitianMatrix>,
        zero_sum: bool,
    ) -> Result<Self> {
        let report = validate_observable_spec(&dims, &observables, zero_sum);
        if !report.ok() {
            return Err(reject(&report));
        }
        Ok(Self {
            dims,
            outcomes: None,
            observables,
            zero_sum,
            equilibrium: None,
        })
    }

    /// Attach a known equilibrium profile (used as the reference point of
    /// convergence diagnostics).
    pub fn with_equilibrium(mut self, equilibrium: Vec<DensityMatrix>) -> Result<Self> {
        self.check_profile(&equilibrium)?;
        self.equilibrium = Some(equilibrium);
        Ok(self)
    }

    /// Re-run the structural checks on the stored description.
    pub fn validation_report(&self) -> ValidationReport {
        match &self.outcomes {
            Some(outcomes) => validate_povm_spec(&self.dims, outcomes, self.zero_sum),
            None => validate_observable_spec(&self.dims, &self.observables, self.zero_sum),
        }
    }

    #[inline]
    pub fn num_players(&self) -> usize {
        self.dims.len()
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    #[inline]
    pub fn dim_product(&self) -> usize {
        dims_product(&self.dims)
    }

    #[inline]
    pub fn is_zero_sum(&self) -> bool {
        self.zero_sum
    }

    #[inline]
    pub fn has_povm(&self) -> bool {
        self.outcomes.is_some()
    }

    #[inline]
    pub fn outcomes(&self) -> Option<&[Outcome]> {
        self.outcomes.as_deref()
    }

    #[inline]
    pub fn observable(&self, player: usize) -> &HermitianMatrix {
        &self.observables[player]
    }

    #[inline]
    pub fn observables(&self) -> &[HermitianMatrix] {
        &self.observables
    }

    #[inline]
    pub fn equilibrium(&self) -> Option<&[DensityMatrix]> {
        self.equilibrium.as_deref()
    }

    /// Check a profile against the game's player dimensions.
    pub fn check_profile(&self, profile: &[DensityMatrix]) -> Result<()> {
        if profile.len() != self.dims.len() {
            return Err(Error::DimMismatch(format!(
                "profile has {} strategies for {} players",
                profile.len(),
                self.dims.len()
            )));
        }
        for (i, (x, &d)) in profile.iter().zip(&self.dims).enumerate() {
            if x.dim() != d {
                return Err(Error::DimMismatch(format!(
                    "player {i} strategy has dim {} but the game expects {d}",
                    x.dim()
                )));
            }
        }
        Ok(())
    }

    /// Player `i`'s individual payoff gradient `V_i(X)` at the profile.
    pub fn payoff_gradient(
        &self,
        profile: &[DensityMatrix],
        player: usize,
    ) -> Result<HermitianMatrix> {
        self.check_profile(profile)?;
        partial_contraction(&self.observables[player], profile, player)
    }

    /// Every player's individual gradient at the profile.
    pub fn gradient_profile(&self, profile: &[DensityMatrix]) -> Result<Vec<HermitianMatrix>> {
        self.check_profile(profile)?;
        (0..self.dims.len())
            .map(|i| partial_contraction(&self.observables[i], profile, i))
            .collect()
    }

    /// Player `i`'s expected payoff at the profile.
    pub fn payoff(&self, profile: &[DensityMatrix], player: usize) -> Result<f64> {
        let v = self.payoff_gradient(profile, player)?;
        Ok(v.matrix().trace_product(profile[player].matrix())?.re)
    }

    /// Every player's expected payoff at the profile.
    pub fn payoffs(&self, profile: &[DensityMatrix]) -> Result<Vec<f64>> {
        (0..self.dims.len())
            .map(|i| self.payoff(profile, i))
            .collect()
    }

    /// Outcome probabilities under the joint measurement at the profile.
    ///
    /// Requires measurement form. Tiny negative masses and trace errors from
    /// rounding are clamped and renormalized; a defect beyond
    /// [`PROBABILITY_DEFECT_TOL`] is an error.
    pub fn outcome_distribution(&self, profile: &[DensityMatrix]) -> Result<Vec<f64>> {
        let outcomes = self.outcomes.as_ref().ok_or(Error::BanditNeedsPovm)?;
        self.check_profile(profile)?;
        let raw = outcomes
            .iter()
            .map(|o| profile_expectation(&o.element, profile))
            .collect::<Result<Vec<f64>>>()?;
        normalize_distribution(&raw)
    }

    /// Draw one measurement outcome at the profile; returns its index.
    pub fn sample_outcome(&self, profile: &[DensityMatrix], rng: &mut impl Rng) -> Result<usize> {
        let p = self.outcome_distribution(profile)?;
        let u: f64 = rng.gen();
        let mut cum = 0.0;
        for (i, &pi) in p.iter().enumerate() {
            cum += pi;
            if u < cum {
                return Ok(i);
            }
        }
        Ok(p.len() - 1)
    }

    /// Duality gap of a two-player zero-sum game at the profile:
    /// `λ_max(V_1(X)) + λ_max(V_2(X))`.
    ///
    /// This equals `max_{X_1'} u_1(X_1', X_2) − min_{X_2'} u_1(X_1, X_2')`;
    /// it is nonnegative everywhere and zero exactly at equilibrium.
    pub fn duality_gap(&self, profile: &[DensityMatrix]) -> Result<f64> {
        if !self.zero_sum || self.dims.len() != 2 {
            return Err(Error::NotZeroSum(format!(
                "duality gap needs a two-player zero-sum game ({} players, zero_sum = {})",
                self.dims.len(),
                self.zero_sum
            )));
        }
        let v1 = self.payoff_gradient(profile, 0)?;
        let v2 = self.payoff_gradient(profile, 1)?;
        Ok(v1.eigh()?.max_value() + v2.eigh()?.max_value())
    }

    /// Analytic payoff constants of the game, cross-checked by sampling.
    pub fn constants(&self) -> Result<GameConstants> {
        let n = self.dims.len();

        let payoff_bound = match &self.outcomes {
            Some(outcomes) => outcomes
                .iter()
                .flat_map(|o| o.payoffs.iter())
                .fold(0.0f64, |m, &u| m.max(u.abs())),
            None => {
                let mut m = 0.0f64;
                for w in &self.observables {
                    m = m.max(w.op_norm()?);
                }
                m
            }
        };

        let mut grad_sq = 0.0;
        let mut frob_sq_sum = 0.0;
        for (i, w) in self.observables.iter().enumerate() {
            let frob_sq = w.frob_norm().powi(2);
            let op = w.op_norm()?;
            grad_sq += (self.dims[i] as f64 * op * op).min(frob_sq);
            frob_sq_sum += frob_sq;
        }
        let lipschitz = grad_sq.sqrt();
        let smoothness = ((n as f64 - 1.0).max(0.0) * frob_sq_sum).sqrt();

        let entropy_budget = self.dims.iter().map(|&d| (d as f64).ln()).sum();

        let mut rng = stream_rng(CONSTANTS_MC_SEED, 0);
        let mut lipschitz_mc = 0.0f64;
        for _ in 0..CONSTANTS_MC_SAMPLES {
            let x = random_profile(&self.dims, &mut rng);
            let g = self.gradient_profile(&x)?;
            let norm_sq: f64 = g.iter().map(|v| v.frob_norm().powi(2)).sum();
            lipschitz_mc = lipschitz_mc.max(norm_sq.sqrt());
        }
        let mut smoothness_mc = 0.0f64;
        for _ in 0..CONSTANTS_MC_SAMPLES {
            let x = random_profile(&self.dims, &mut rng);
            let y = random_profile(&self.dims, &mut rng);
            let dist = profile_distance(&x, &y)?;
            if dist < 1e-9 {
                continue;
            }
            let gx = self.gradient_profile(&x)?;
            let gy = self.gradient_profile(&y)?;
            let mut diff_sq = 0.0;
            for (a, b) in gx.iter().zip(&gy) {
                diff_sq += a.sub(b)?.frob_norm().powi(2);
            }
            smoothness_mc = smoothness_mc.max(diff_sq.sqrt() / dist);
        }

        Ok(GameConstants {
            payoff_bound,
            lipschitz,
            lipschitz_mc,
            smoothness,
            smoothness_mc,
            strong_convexity: 1.0,
            entropy_budget,
        })
    }
}

/// Payoff regularity constants used to tune step sizes and bounds.
///
/// The `_mc` fields are sampled lower estimates of the quantity the matching
/// analytic field bounds; they are reported for cross-checking and never used
/// for tuning.
#[derive(Clone, Copy, Debug)]
pub struct GameConstants {
    /// Largest payoff magnitude a single play can produce.
    pub payoff_bound: f64,
    /// Bound on the Frobenius norm of the stacked gradient profile.
    pub lipschitz: f64,
    /// Largest sampled gradient-profile norm.
    pub lipschitz_mc: f64,
    /// Bound on the Lipschitz modulus of the gradient profile map.
    pub smoothness: f64,
    /// Largest sampled gradient difference ratio.
    pub smoothness_mc: f64,
    /// Modulus of the entropy regularizer (always 1 here).
    pub strong_convexity: f64,
    /// `Σ_i log d_i`: the largest relative entropy any profile can have to
    /// the uniform profile.
    pub entropy_budget: f64,
}

/// `tr(W (X_1 ⊗ ... ⊗ X_N))` without forming the product-space tensor.
pub fn profile_expectation(w: &HermitianMatrix, profile: &[DensityMatrix]) -> Result<f64> {
    if profile.is_empty() {
        return Err(Error::DimMismatch(
            "expectation needs at least one strategy".into(),
        ));
    }
    let v = partial_contraction(w, profile, 0)?;
    Ok(v.matrix().trace_product(profile[0].matrix())?.re)
}

/// Clamp rounding noise off a raw probability vector and renormalize.
///
/// Fails with the observed defect when negative mass or the trace error
/// exceeds [`PROBABILITY_DEFECT_TOL`].
pub fn normalize_distribution(raw: &[f64]) -> Result<Vec<f64>> {
    let sum: f64 = raw.iter().sum();
    let worst_negative = raw.iter().fold(0.0f64, |m, &p| m.max(-p));
    let defect = (sum - 1.0).abs().max(worst_negative);
    if !(defect <= PROBABILITY_DEFECT_TOL) {
        return Err(Error::ProbabilityDefect { sum, defect });
    }
    let clamped: Vec<f64> = raw.iter().map(|&p| p.max(0.0)).collect();
    let mass: f64 = clamped.iter().sum();
    Ok(clamped.into_iter().map(|p| p / mass).collect())
}

/// The uniform profile `(I/d_1, ..., I/d_N)`.
pub fn uniform_profile(dims: &[usize]) -> Vec<DensityMatrix> {
    dims.iter()
        .map(|&d| DensityMatrix::maximally_mixed(d))
        .collect()
}

/// Frobenius distance between two profiles,
/// `sqrt(Σ_i ‖X_i − Y_i‖_F²)`.
pub fn profile_distance(a: &[DensityMatrix], b: &[DensityMatrix]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimMismatch(format!(
            "profiles have {} and {} strategies",
            a.len(),
            b.len()
        )));
    }
    let mut sq = 0.0;
    for (x, y) in a.iter().zip(b) {
        sq += x.hermitian().sub(y.hermitian())?.frob_norm().powi(2);
    }
    Ok(sq.sqrt())
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller; 1 - u keeps the argument of ln strictly positive.
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

/// A random full-rank density matrix: `G G† / tr(G G†)` with Gaussian `G`.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let mut g = ComplexMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            g.set(r, c, C64::new(standard_normal(rng), standard_normal(rng)));
        }
    }
    let gg = g.matmul(&g.adjoint()).expect("square by construction");
    let trace = gg.trace().re;
    let h = HermitianMatrix::hermitize(gg.scale(1.0 / trace));
    DensityMatrix::trusted(h)
}

/// A profile of independent random density matrices.
pub fn random_profile(dims: &[usize], rng: &mut impl Rng) -> Vec<DensityMatrix> {
    dims.iter().map(|&d| random_density(d, rng)).collect()
}

/// Result of probing variational stability by sampling.
#[derive(Clone, Copy, Debug)]
pub struct VsCertificate {
    pub samples: usize,
    /// Neighborhood radius the probe profiles were drawn from.
    pub radius: f64,
    /// Smallest sampled value of `Σ_i ⟨V_i(X), X_i − X_i*⟩`.
    pub min_inner: f64,
    /// Largest sampled value; stability demands it be strictly negative.
    pub max_inner: f64,
    pub plausible: bool,
}

/// Probe local variational stability of a candidate profile `at`.
///
/// Samples profiles `X ≠ at` within the given Frobenius `radius` of the
/// candidate and evaluates `m(X) = Σ_i ⟨V_i(X), X_i − at_i⟩`; stability
/// with respect to `at` requires `m(X) ≤ 0` with equality only at `at`
/// itself. The certificate is `plausible` when every sampled value is
/// strictly negative (below `-`[`VS_STRICT_TOL`]), which sampled profiles
/// virtually never violate for a strictly stable point.
pub fn vs_certificate(
    game: &QuantumGame,
    at: &[DensityMatrix],
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<VsCertificate> {
    game.check_profile(at)?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidGame(format!(
            "stability probe radius must be positive and finite, got {radius}"
        )));
    }
    if samples == 0 {
        return Err(Error::InsufficientSamples {
            got: 0,
            need: 1,
            what: "stability probe profiles",
        });
    }
    let mut rng = stream_rng(seed, 0);
    let mut min_inner = f64::INFINITY;
    let mut max_inner = f64::NEG_INFINITY;
    for _ in 0..samples {
        // A random profile picks the direction; blending toward it stays
        // on the spectraplex, and the half-open draw keeps X off `at`.
        let toward = random_profile(game.dims(), &mut rng);
        let span = profile_distance(&toward, at)?;
        let reach = (1.0 - rng.gen::<f64>()) * radius;
        let weight = (reach / span.max(f64::MIN_POSITIVE)).min(1.0);
        let x: Vec<DensityMatrix> = at
            .iter()
            .zip(&toward)
            .map(|(a, y)| {
                let mut h = a.hermitian().scale(1.0 - weight);
                h.axpy(weight, y.hermitian())?;
                Ok(DensityMatrix::trusted(h))
            })
            .collect::<Result<_>>()?;
        let g = game.gradient_profile(&x)?;
        let mut inner = 0.0;
        for i in 0..x.len() {
            let shift = x[i].hermitian().sub(at[i].hermitian())?;
            inner += g[i].inner(&shift)?;
        }
        min_inner = min_inner.min(inner);
        max_inner = max_inner.max(inner);
    }
    Ok(VsCertificate {
        samples,
        radius,
        min_inner,
        max_inner,
        plausible: max_inner <= -VS_STRICT_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn normalize_accepts_rounding_noise_and_rejects_real_defects() {
        let p = normalize_distribution(&[0.5 + 3e-9, 0.5 - 1e-9, -1e-9]).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(p[2] == 0.0);
        match normalize_distribution(&[0.6, 0.6]) {
            Err(Error::ProbabilityDefect { defect, .. }) => assert!(defect > 0.19),
            other => panic!("expected probability defect, got {other:?}"),
        }
        assert!(normalize_distribution(&[0.5, 0.5, -1e-6]).is_err());
    }

    #[test]
    fn payoff_matches_expectation_route() {
        let game = fixtures::matching_pennies();
        let mut rng = stream_rng(7, 0);
        for _ in 0..20 {
            let x = random_profile(game.dims(), &mut rng);
            let via_gradient = game.payoff(&x, 0).unwrap();
            let via_expectation = profile_expectation(game.observable(0), &x).unwrap();
            assert!((via_gradient - via_expectation).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_sum_payoffs_cancel_on_random_profiles() {
        let game = fixtures::matching_pennies();
        let mut rng = stream_rng(11, 0);
        for _ in 0..20 {
            let x = random_profile(game.dims(), &mut rng);
            let u = game.payoffs(&x).unwrap();
            assert!((u[0] + u[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_requires_measurement_form() {
        let game = fixtures::matching_pennies();
        let obs_only = QuantumGame::from_observables(
            game.dims().to_vec(),
            game.observables().to_vec(),
            true,
        )
        .unwrap();
        let x = uniform_profile(obs_only.dims());
        assert!(matches!(
            obs_only.outcome_distribution(&x),
            Err(Error::BanditNeedsPovm)
        ));
    }

    #[test]
    fn outcome_distribution_is_uniform_at_the_center() {
        let game = fixtures::matching_pennies();
        let p = game
            .outcome_distribution(&uniform_profile(game.dims()))
            .unwrap();
        assert_eq!(p.len(), 4);
        for &pi in &p {
            assert!((pi - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn random_density_is_reproducible_and_valid() {
        let mut a = stream_rng(42, 3);
        let mut b = stream_rng(42, 3);
        let x = random_density(4, &mut a);
        let y = random_density(4, &mut b);
        assert!(x.matrix().max_abs_diff(y.matrix()).unwrap() == 0.0);
        assert!((x.hermitian().trace() - 1.0).abs() < 1e-12);
        assert!(x.hermitian().eigh().unwrap().min_value() > -1e-14);
    }

    #[test]
    fn rejects_incomplete_measurement() {
        let game = fixtures::matching_pennies();
        let mut outcomes = game.outcomes().unwrap().to_vec();
        outcomes.pop();
        let report = validate_povm_spec(game.dims(), &outcomes, true);
        assert!(!report.ok());
        assert_eq!(report.first_failure().unwrap().name, "completeness");
        assert!(QuantumGame::from_povm(game.dims().to_vec(), outcomes, true).is_err());
    }

    #[test]
    fn rejects_unbalanced_zero_sum_claim() {
        let game = fixtures::matching_pennies();
        let mut outcomes = game.outcomes().unwrap().to_vec();
        outcomes[0].payoffs[1] = outcomes[0].payoffs[0];
        match QuantumGame::from_povm(game.dims().to_vec(), outcomes, true) {
            Err(Error::NotZeroSum(_)) => {}
            other => panic!("expected zero-sum rejection, got {other:?}"),
        }
    }
}
