//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by matrix algebra, game validation, and learning loops.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two operands (or a matrix and an expected shape) disagree in dimension.
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    /// A matrix failed the Hermitian check `max |A - A†| <= 1e-12`.
    #[error("matrix {name} is not Hermitian: entrywise defect {defect:.3e} exceeds {tol:.0e}")]
    NotHermitian { name: String, defect: f64, tol: f64 },

    /// A matrix failed the density-matrix invariants (PSD within -1e-10, unit trace within 1e-10).
    #[error("not a density matrix: {0}")]
    NotDensity(String),

    /// The cyclic Jacobi sweep failed to reduce the off-diagonal mass below tolerance.
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off_mass:.3e})")]
    EigenNoConvergence { sweeps: usize, off_mass: f64 },

    /// Matrix logarithm of a matrix with an eigenvalue at or below the domain floor.
    #[error("matrix logarithm undefined: eigenvalue {value:.6e} at or below floor {floor:.0e}")]
    LogDomain { value: f64, floor: f64 },

    /// Tangent bases and safety parameters need dimension at least 2.
    #[error("traceless tangent basis is degenerate for dimension {0}; need dimension >= 2")]
    DegenerateDimension(usize),

    /// Sampling from an empty direction set.
    #[error("cannot sample a direction from an empty basis")]
    EmptyBasis,

    /// An exploration radius outside the feasible range `[0, r)`.
    #[error(
        "exploration radius {delta:.6e} outside [0, {radius:.6e}) for dimension {dim}; \
         the perturbed strategy could leave the feasible set"
    )]
    RadiusOutOfRange { delta: f64, radius: f64, dim: usize },

    /// Game description failed validation; the report lists each violation.
    #[error("game validation failed:\n{0}")]
    InvalidGame(String),

    /// Bandit (one-point) feedback needs per-outcome payoffs, i.e. a measurement game.
    #[error("bandit mode requires POVM form: one-point feedback samples a measurement outcome")]
    BanditNeedsPovm,

    /// Requested operation is only defined for two-player zero-sum games.
    #[error("operation requires a two-player zero-sum game: {0}")]
    NotZeroSum(String),

    /// Outcome probabilities drifted too far from a distribution to repair.
    #[error("outcome probabilities sum to {sum:.12} (defect {defect:.3e} exceeds 1e-8); invalid game state")]
    ProbabilityDefect { sum: f64, defect: f64 },

    /// Horizon-tuned exploration radius collides with the safety radius.
    #[error(
        "tuned exploration radius {delta:.6e} at horizon T = {horizon} reaches the safety \
         radius {radius:.6e}; smallest feasible horizon is T = {min_horizon}"
    )]
    HorizonTooShort {
        delta: f64,
        radius: f64,
        horizon: u64,
        min_horizon: u64,
    },

    /// A schedule parameter is unusable (non-positive step, radius >= safety radius, ...).
    #[error("infeasible schedule: {0}")]
    InfeasibleSchedule(String),

    /// Statistical routine invoked with too little data to be meaningful.
    #[error("insufficient samples: {got} provided, {need} required for {what}")]
    InsufficientSamples {
        got: usize,
        need: usize,
        what: &'static str,
    },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
