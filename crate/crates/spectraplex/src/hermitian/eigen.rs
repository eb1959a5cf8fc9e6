//! Spectral decomposition of Hermitian matrices and the functions built on it.
//!
//! The eigensolver is a cyclic Jacobi sweep with complex plane rotations:
//! each rotation zeroes one off-diagonal pair, sweeps run in a fixed
//! deterministic order (row-major over the upper triangle), and iteration
//! stops once the off-diagonal Frobenius mass drops below tolerance.
//! Jacobi is unconditionally stable for Hermitian input and exactly
//! reproducible, which matters more here than speed: every matrix in this
//! crate is at most a few dozen rows.

use super::{c_re, C64, ComplexMatrix, DensityMatrix, HermitianMatrix};
use crate::error::{Error, Result};

/// Off-diagonal Frobenius mass below which the sweep is considered converged.
///
/// Scaled by `||A||_F` so the stopping test is invariant under rescaling;
/// an absolute floor would leave tiny matrices (such as `exp(H)` for very
/// negative `H`) undiagonalized.
pub const JACOBI_TOL: f64 = 1e-13;
/// Hard cap on sweeps; Jacobi converges quadratically, so hitting this means
/// the input was not Hermitian to begin with.
pub const JACOBI_MAX_SWEEPS: usize = 64;
/// Eigenvalue floor below which the matrix logarithm refuses to evaluate.
pub const LOG_EIG_FLOOR: f64 = 1e-300;

/// Eigendecomposition `A = U diag(λ) U†` with eigenvalues in ascending order.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    values: Vec<f64>,
    /// Unitary whose columns are the eigenvectors, ordered like `values`.
    vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// Eigenvalues, ascending.
    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Eigenvector matrix; column `k` belongs to `values()[k]`.
    #[inline]
    pub fn vectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    /// Smallest eigenvalue.
    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    /// Largest eigenvalue.
    pub fn max_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Reassemble `U diag(spectrum) U†` with a caller-supplied spectrum,
    /// ordered like [`values`](Self::values).
    pub fn assemble(&self, spectrum: &[f64]) -> HermitianMatrix {
        assert_eq!(spectrum.len(), self.values.len(), "spectrum length");
        let d = self.values.len();
        let u = &self.vectors;
        let mut out = ComplexMatrix::zeros(d);
        for (k, &fk) in spectrum.iter().enumerate() {
            if fk == 0.0 {
                continue;
            }
            for i in 0..d {
                let uik = u.get(i, k);
                for j in 0..d {
                    let v = out.get(i, j) + fk * uik * u.get(j, k).conj();
                    out.set(i, j, v);
                }
            }
        }
        HermitianMatrix::hermitize(out)
    }

    /// Reassemble `U f(λ) U†` for a real scalar function `f`.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let spectrum: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        self.assemble(&spectrum)
    }

    /// Reassemble the original matrix, `U diag(λ) U†`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        self.assemble(&self.values)
    }
}

impl HermitianMatrix {
    /// Eigendecomposition by cyclic Jacobi rotations.
    pub fn eigh(&self) -> Result<EigenDecomposition> {
        jacobi_eigh(self.matrix())
    }

    /// Largest absolute eigenvalue (operator norm of a Hermitian matrix).
    pub fn op_norm(&self) -> Result<f64> {
        let eig = self.eigh()?;
        Ok(eig.min_value().abs().max(eig.max_value().abs()))
    }
}

fn off_diagonal_mass(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += a.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One complex Jacobi rotation zeroing the `(p, q)` pair of `a`,
/// accumulated into the eigenvector matrix `v`.
///
/// With `a_pq = m e^{iφ}`, the unitary is the phased plane rotation
/// `U = [[c e^{iφ}, s e^{iφ}], [-s, c]]` on rows/columns `(p, q)`, where
/// `(c, s)` is the classical real rotation for the symmetric 2x2 block
/// `[[a_pp, m], [m, a_qq]]`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let m = apq.norm();
    if m < 1e-300 {
        return;
    }
    let phase = apq / m; // e^{iφ}
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;

    // Stable rotation choice (smaller root of t² + 2 t θ - 1 = 0).
    let theta = (aqq - app) / (2.0 * m);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let d = a.dim();
    let gp = phase * c; // U[p][p]
    let gq = phase * s; // U[p][q]

    // A <- A U  (columns p, q).
    for i in 0..d {
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        a.set(i, p, aip * gp - aiq * c_re(s));
        a.set(i, q, aip * gq + aiq * c_re(c));
    }
    // A <- U† A  (rows p, q).
    for j in 0..d {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, apj * gp.conj() - aqj * c_re(s));
        a.set(q, j, apj * gq.conj() + aqj * c_re(c));
    }
    // The pivot pair is exactly zero after the similarity; clear the rounding.
    a.set(p, q, C64::new(0.0, 0.0));
    a.set(q, p, C64::new(0.0, 0.0));
    let dp = a.get(p, p);
    let dq = a.get(q, q);
    a.set(p, p, c_re(dp.re));
    a.set(q, q, c_re(dq.re));

    // V <- V U.
    for i in 0..d {
        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.set(i, p, vip * gp - viq * c_re(s));
        v.set(i, q, vip * gq + viq * c_re(c));
    }
}

fn jacobi_eigh(input: &ComplexMatrix) -> Result<EigenDecomposition> {
    let d = input.dim();
    if d == 0 {
        return Err(Error::DimMismatch("eigh of empty matrix".into()));
    }
    let mut a = input.clone();
    let mut v = ComplexMatrix::identity(d);
    // The floor keeps the tolerance positive for the zero matrix.
    let tol = JACOBI_TOL * input.frob_norm().max(f64::MIN_POSITIVE);

    let mut converged = d == 1;
    let mut sweeps = 0;
    while !converged {
        // Fixed sweep order keeps the decomposition bit-reproducible.
        for p in 0..d - 1 {
            for q in p + 1..d {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        if off_diagonal_mass(&a) < tol {
            converged = true;
        } else if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNoConvergence {
                sweeps,
                off_mass: off_diagonal_mass(&a),
            });
        }
    }

    // Ascending eigenvalue order, stable for ties.
    let mut order: Vec<usize> = (0..d).collect();
    let raw: Vec<f64> = (0..d).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));

    let values: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let mut vectors = ComplexMatrix::zeros(d);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..d {
            vectors.set(row, new_col, v.get(row, old_col));
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Matrix exponential of a Hermitian matrix via its eigendecomposition.
pub fn mat_exp(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(h.eigh()?.apply_spectral(f64::exp))
}

/// Matrix logarithm of a positive-definite Hermitian matrix.
///
/// Errors once any eigenvalue is at or below [`LOG_EIG_FLOOR`]; callers that
/// must tolerate near-singular densities clamp eigenvalues themselves before
/// taking logs (see the Bregman divergence).
pub fn mat_log(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = h.eigh()?;
    let min = eig.min_value();
    if min <= LOG_EIG_FLOOR {
        return Err(Error::LogDomain {
            value: min,
            floor: LOG_EIG_FLOOR,
        });
    }
    Ok(eig.apply_spectral(f64::ln))
}

/// Normalized matrix exponential `exp(Y) / tr exp(Y)`: the softmax map from
/// dual (score) matrices onto the spectraplex.
///
/// The spectrum is shifted by its maximum before exponentiation, which leaves
/// the result mathematically unchanged but keeps every intermediate in
/// `(0, 1]`, so no finite input overflows.
pub fn softmax_density(y: &HermitianMatrix) -> Result<DensityMatrix> {
    let eig = y.eigh()?;
    let shift = eig.max_value();
    let weights: Vec<f64> = eig.values().iter().map(|l| (l - shift).exp()).collect();
    let total: f64 = weights.iter().sum();
    let spectrum: Vec<f64> = weights.iter().map(|w| w / total).collect();
    DensityMatrix::new(eig.assemble(&spectrum))
}
