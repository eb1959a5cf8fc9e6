//! Learning dynamics over density-matrix strategy spaces.
//!
//! This crate simulates repeated play in finite quantum games, where each
//! player's mixed strategy is a density matrix (the *spectraplex*: Hermitian,
//! positive semidefinite, unit trace). It provides:
//!
//! - a small dense complex linear-algebra kernel with a reproducible Jacobi
//!   eigensolver ([`hermitian`]),
//! - orthonormal traceless direction bases and the safety geometry that keeps
//!   perturbed strategies feasible ([`basis`]),
//! - the game model: payoff observables or measurement (POVM) descriptions,
//!   payoff gradients, duality gap, and problem constants ([`game`]),
//! - matrix multiplicative-weights dynamics under full, two-point, and
//!   one-point (bandit) payoff feedback, with per-step energy audits
//!   ([`learning`]),
//! - statistics for the resulting trajectories: estimator moment audits,
//!   power-law rate fits, cross-seed aggregation ([`analysis`]).
//!
//! All randomness flows through caller-supplied RNGs; [`seeding`] derives
//! independent per-run streams from a base seed so whole experiment sweeps
//! are reproducible bit for bit.

pub mod analysis;
pub mod basis;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod hermitian;
pub mod learning;
pub mod seeding;

pub use error::{Error, Result};
pub use hermitian::eigen::{mat_exp, mat_log, softmax_density, EigenDecomposition};
pub use hermitian::{
    kron, kron2, partial_contraction, C64, ComplexMatrix, DensityMatrix, HermitianMatrix,
};
