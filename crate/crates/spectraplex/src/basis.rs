//! Orthonormal traceless direction bases and the safety geometry of the
//! spectraplex.
//!
//! A strategy perturbed for payoff exploration must stay a density matrix.
//! Two ingredients make that work:
//!
//! - an orthonormal basis `{W_a}` of the traceless Hermitian matrices
//!   (dimension `d² - 1`), so random directions cover the whole tangent
//!   space with known statistics;
//! - a safety pair `(R, r)`: pivoting toward the center `R = I/d` by
//!   `δ/r` guarantees `X̂ ± δ W_a` is positive semidefinite for every basis
//!   direction and every `δ < r`.
//!
//! The basis is built in a fixed canonical order (diagonal differences by
//! ascending size, then symmetric pairs in lexicographic order, then
//! antisymmetric pairs), so direction indices mean the same thing across
//! runs, seeds, and serialized diagnostics.

use crate::error::{Error, Result};
use crate::hermitian::{c_re, C64, ComplexMatrix, DensityMatrix, HermitianMatrix};
use rand::Rng;

/// One exploration direction: an orthonormal basis element plus a sign.
///
/// `matrix` is always the unsigned basis element; consumers apply `sign`
/// where the estimator formula calls for it.
#[derive(Clone, Debug)]
pub struct TangentDirection {
    /// Unsigned basis element (unit Frobenius norm, traceless).
    pub matrix: HermitianMatrix,
    /// Position of the element in the canonical basis order.
    pub index: usize,
    /// +1 or -1.
    pub sign: i8,
}

impl TangentDirection {
    /// The sign-applied direction `sign * matrix`.
    pub fn signed_matrix(&self) -> HermitianMatrix {
        self.matrix.scale(self.sign as f64)
    }
}

/// Orthonormal basis of traceless Hermitian matrices on a `dim`-level system.
///
/// Empty for `dim = 1` (the spectraplex is a single point there).
#[derive(Clone, Debug)]
pub struct BasisSet {
    dim: usize,
    elements: Vec<HermitianMatrix>,
}

impl BasisSet {
    /// Build the canonical basis for the given dimension.
    pub fn new(dim: usize) -> Self {
        let mut elements = Vec::with_capacity(dim * dim - 1);

        // Diagonal family: (E_11 + ... + E_jj - j E_{j+1,j+1}) / sqrt(j(j+1)).
        for j in 1..dim {
            let mut diag = vec![0.0; dim];
            let norm = (j as f64 * (j as f64 + 1.0)).sqrt();
            for entry in diag.iter_mut().take(j) {
                *entry = 1.0 / norm;
            }
            diag[j] = -(j as f64) / norm;
            elements.push(HermitianMatrix::from_real_diag(&diag));
        }

        // Symmetric pairs (E_kl + E_lk)/sqrt(2), lexicographic (k, l), k < l.
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        for k in 0..dim {
            for l in k + 1..dim {
                let mut m = ComplexMatrix::zeros(dim);
                m.set(k, l, c_re(inv_sqrt2));
                m.set(l, k, c_re(inv_sqrt2));
                elements.push(HermitianMatrix::hermitize(m));
            }
        }

        // Antisymmetric pairs (i E_kl - i E_lk)/sqrt(2), same pair order.
        for k in 0..dim {
            for l in k + 1..dim {
                let mut m = ComplexMatrix::zeros(dim);
                m.set(k, l, C64::new(0.0, inv_sqrt2));
                m.set(l, k, C64::new(0.0, -inv_sqrt2));
                elements.push(HermitianMatrix::hermitize(m));
            }
        }

        Self { dim, elements }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis elements, `dim² - 1`.
    #[inline]
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    #[inline]
    pub fn element(&self, index: usize) -> &HermitianMatrix {
        &self.elements[index]
    }

    #[inline]
    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    /// Draw a direction.
    ///
    /// - `signed = false`: basis element uniform over the `D` elements, then
    ///   an independent fair sign (two RNG draws, in that order).
    /// - `signed = true`: uniform over the `2D` signed elements (one draw).
    pub fn sample_direction(&self, rng: &mut impl Rng, signed: bool) -> Result<TangentDirection> {
        let n = self.elements.len();
        if n == 0 {
            return Err(Error::EmptyBasis);
        }
        let (index, sign) = if signed {
            let k = rng.gen_range(0..2 * n);
            (k % n, if k < n { 1 } else { -1 })
        } else {
            let index = rng.gen_range(0..n);
            let sign = if rng.gen_range(0..2u8) == 0 { 1 } else { -1 };
            (index, sign)
        };
        Ok(TangentDirection {
            matrix: self.elements[index].clone(),
            index,
            sign,
        })
    }
}

/// Safety pair for feasible exploration on a `dim`-level system.
#[derive(Clone, Debug)]
pub struct SafetyParams {
    dim: usize,
    /// The center of the spectraplex, `I / dim`.
    reference: DensityMatrix,
    /// Largest radius such that `R + r W` is PSD for every signed basis
    /// element: `min(1/sqrt(d(d-1)), sqrt(2)/d)`.
    radius: f64,
}

impl SafetyParams {
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn reference(&self) -> &DensityMatrix {
        &self.reference
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Compute the safety pair `(R, r)` for the given dimension.
///
/// Errors for `dim < 2`: a one-level system has no tangent directions, so no
/// meaningful exploration radius exists.
pub fn safety_params(dim: usize) -> Result<SafetyParams> {
    if dim < 2 {
        return Err(Error::DegenerateDimension(dim));
    }
    let d = dim as f64;
    let radius = (1.0 / (d * (d - 1.0)).sqrt()).min(std::f64::consts::SQRT_2 / d);
    Ok(SafetyParams {
        dim,
        reference: DensityMatrix::maximally_mixed(dim),
        radius,
    })
}

/// Pivot a strategy toward the center: `X̂ = X + (δ/r)(R - X)`.
///
/// For `δ ∈ [0, r)` the pivoted point satisfies
/// `X̂ ± δW = (1 - δ/r) X + (δ/r)(R ± rW)`, a convex combination of density
/// matrices, hence feasible for every signed basis direction `W`.
pub fn pivot(x: &DensityMatrix, params: &SafetyParams, delta: f64) -> Result<DensityMatrix> {
    if x.dim() != params.dim() {
        return Err(Error::DimMismatch(format!(
            "strategy dim {} vs safety params dim {}",
            x.dim(),
            params.dim()
        )));
    }
    if !(0.0..params.radius).contains(&delta) {
        return Err(Error::RadiusOutOfRange {
            delta,
            radius: params.radius,
            dim: params.dim,
        });
    }
    if delta == 0.0 {
        return Ok(x.clone());
    }
    let lambda = delta / params.radius;
    let blended = x
        .hermitian()
        .scale(1.0 - lambda)
        .add(&params.reference.hermitian().scale(lambda))?;
    Ok(DensityMatrix::trusted(blended))
}

/// The perturbed play `X̂ + sign δ W`, validated as a density matrix.
pub fn perturb(
    pivoted: &DensityMatrix,
    direction: &TangentDirection,
    delta: f64,
) -> Result<DensityMatrix> {
    let mut h = pivoted.hermitian().clone();
    h.axpy(delta * direction.sign as f64, &direction.matrix)?;
    DensityMatrix::new(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_is_empty_for_dim_one() {
        let b = BasisSet::new(1);
        assert_eq!(b.len(), 0);
        let mut rng = crate::seeding::stream_rng(1, 0);
        assert!(b.sample_direction(&mut rng, false).is_err());
    }

    #[test]
    fn qubit_basis_matches_scaled_pauli_matrices() {
        let b = BasisSet::new(2);
        assert_eq!(b.len(), 3);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // diag(1, -1)/sqrt(2)
        let z = ComplexMatrix::from_real_diag(&[s, -s]);
        assert!(b.element(0).matrix().max_abs_diff(&z).unwrap() < 1e-15);
        // (E01 + E10)/sqrt(2)
        let mut x = ComplexMatrix::zeros(2);
        x.set(0, 1, c_re(s));
        x.set(1, 0, c_re(s));
        assert!(b.element(1).matrix().max_abs_diff(&x).unwrap() < 1e-15);
        // (i E01 - i E10)/sqrt(2)
        let mut y = ComplexMatrix::zeros(2);
        y.set(0, 1, C64::new(0.0, s));
        y.set(1, 0, C64::new(0.0, -s));
        assert!(b.element(2).matrix().max_abs_diff(&y).unwrap() < 1e-15);
    }

    #[test]
    fn safety_radius_frozen_values() {
        assert!((safety_params(2).unwrap().radius() - 0.7071067811865475).abs() < 1e-12);
        assert!((safety_params(3).unwrap().radius() - 0.4082482904638631).abs() < 1e-12);
        assert!((safety_params(4).unwrap().radius() - 0.2886751345948129).abs() < 1e-12);
        assert!(safety_params(1).is_err());
        assert!(safety_params(0).is_err());
    }

    #[test]
    fn pivot_at_zero_radius_is_identity_map() {
        let params = safety_params(3).unwrap();
        let x = DensityMatrix::basis_state(3, 1);
        let pivoted = pivot(&x, &params, 0.0).unwrap();
        assert_eq!(pivoted.matrix(), x.matrix());
    }

    #[test]
    fn pivot_rejects_radius_at_or_beyond_safety() {
        let params = safety_params(2).unwrap();
        let x = DensityMatrix::maximally_mixed(2);
        assert!(pivot(&x, &params, params.radius()).is_err());
        assert!(pivot(&x, &params, -0.1).is_err());
        assert!(pivot(&x, &params, 0.5 * params.radius()).is_ok());
    }
}
