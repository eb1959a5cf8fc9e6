//! Dense complex matrices and the Hermitian / density-matrix types built on them.
//!
//! Everything here is a small, square, row-major matrix over `Complex<f64>`.
//! The learning code never needs dimensions beyond a handful of qudits, so the
//! representation favors clarity and numerical transparency over performance.
//!
//! Type ladder:
//! - [`ComplexMatrix`]: arbitrary square complex matrix.
//! - [`HermitianMatrix`]: entrywise equal to its adjoint within `1e-12`;
//!   stored exactly Hermitian (symmetrized on construction).
//! - [`DensityMatrix`]: Hermitian, eigenvalues >= -1e-10, trace within 1e-10 of 1.
//!
//! Spectral routines (eigendecomposition, `exp`, `log`, softmax) live in
//! [`eigen`](self::eigen) and are re-exported from the crate root.

pub mod eigen;

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Entrywise tolerance for the Hermitian check `max |A - A†|`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalue floor for the density-matrix PSD check.
pub const DENSITY_EIG_TOL: f64 = -1e-10;
/// Trace tolerance for the density-matrix normalization check.
pub const DENSITY_TRACE_TOL: f64 = 1e-10;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Shorthand for a real complex scalar.
#[inline]
pub fn c_re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Identity matrix of the given dimension.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, c_re(1.0));
        }
        m
    }

    /// Build from rows; every row must have the same length as the row count.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimMismatch(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    /// Diagonal matrix with the given real entries.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m.set(i, i, c_re(x));
        }
        m
    }

    /// Matrix dimension (row and column count).
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Raw row-major entries.
    #[inline]
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    fn check_same_dim(&self, other: &Self, op: &str) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(format!(
                "{op}: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    /// Entrywise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "add")?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            dim: self.dim,
            data,
        })
    }

    /// Entrywise difference.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "sub")?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            dim: self.dim,
            data,
        })
    }

    /// In-place `self += factor * other`, the hot path of dual-variable updates.
    pub fn axpy(&mut self, factor: f64, other: &Self) -> Result<()> {
        self.check_same_dim(other, "axpy")?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
        Ok(())
    }

    /// Scale by a real factor.
    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    /// Scale by a complex factor.
    pub fn scale_complex(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "matmul")?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self.get(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Trace.
    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Trace of the product `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        self.check_same_dim(other, "trace_product")?;
        let d = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..d {
            for c in 0..d {
                acc += self.get(r, c) * other.get(c, r);
            }
        }
        Ok(acc)
    }

    /// Frobenius inner product `tr(self† * other)`.
    pub fn frob_inner(&self, other: &Self) -> Result<C64> {
        self.check_same_dim(other, "frob_inner")?;
        let mut acc = C64::new(0.0, 0.0);
        for (a, b) in self.data.iter().zip(&other.data) {
            acc += a.conj() * b;
        }
        Ok(acc)
    }

    /// Frobenius norm.
    pub fn frob_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise deviation from the adjoint, `max |A - A†|`.
    pub fn hermitian_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in i..d {
                let diff = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(diff);
            }
        }
        worst
    }

    /// Largest entrywise absolute difference to another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other, "max_abs_diff")?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Projection onto the Hermitian part, `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        let mut out = self.add(&adj).expect("same dim");
        for v in &mut out.data {
            *v *= 0.5;
        }
        // Diagonal of a Hermitian matrix is exactly real.
        for i in 0..out.dim {
            let v = out.get(i, i);
            out.set(i, i, c_re(v.re));
        }
        out
    }
}

/// Kronecker product of two matrices.
pub fn kron2(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let d = da * db;
    let mut out = ComplexMatrix::zeros(d);
    for ra in 0..da {
        for ca in 0..da {
            let va = a.get(ra, ca);
            if va.norm_sqr() == 0.0 {
                continue;
            }
            for rb in 0..db {
                for cb in 0..db {
                    out.set(ra * db + rb, ca * db + cb, va * b.get(rb, cb));
                }
            }
        }
    }
    out
}

/// n-fold Kronecker product, left to right. Errors on an empty factor list.
pub fn kron(factors: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::DimMismatch("kron of zero factors".into()))?;
    let mut acc = (*first).clone();
    for f in rest {
        acc = kron2(&acc, f);
    }
    Ok(acc)
}

/// Hermitian matrix: entrywise self-adjoint within [`HERMITIAN_TOL`].
///
/// The stored matrix is the exact Hermitian part of the input, so downstream
/// spectral code never sees asymmetry beyond the rounding of `(A + A†)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Validate and wrap a matrix. Fails if `max |A - A†| > 1e-12`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::labeled(m, "matrix")
    }

    /// Like [`new`](Self::new), with a caller-supplied name for error messages.
    pub fn labeled(m: ComplexMatrix, name: &str) -> Result<Self> {
        let defect = m.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian {
                name: name.to_string(),
                defect,
                tol: HERMITIAN_TOL,
            });
        }
        Ok(Self(m.hermitian_part()))
    }

    /// Zero matrix.
    pub fn zeros(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim))
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    /// Diagonal matrix with real entries.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self(ComplexMatrix::from_real_diag(diag))
    }

    /// Wrap without the defect check; caller guarantees Hermitian-ness.
    ///
    /// Still symmetrizes, so a provably-Hermitian-up-to-rounding input
    /// (spectral reassembly, convex combinations, ...) becomes exact.
    pub(crate) fn hermitize(m: ComplexMatrix) -> Self {
        Self(m.hermitian_part())
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Real trace.
    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Frobenius norm.
    pub fn frob_norm(&self) -> f64 {
        self.0.frob_norm()
    }

    /// Real Frobenius inner product with another Hermitian matrix.
    ///
    /// `tr(A B)` is real for Hermitian `A`, `B`; the imaginary rounding
    /// residue is dropped.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        Ok(self.0.frob_inner(&other.0)?.re)
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.add(&other.0)?))
    }

    /// `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.sub(&other.0)?))
    }

    /// `self * factor` for real `factor` (Hermitian-preserving).
    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.scale(factor))
    }

    /// In-place `self += factor * other`.
    pub fn axpy(&mut self, factor: f64, other: &Self) -> Result<()> {
        self.0.axpy(factor, &other.0)
    }
}

/// Density matrix: Hermitian, PSD within `-1e-10`, unit trace within `1e-10`.
///
/// The quantum analogue of a mixed strategy; the set of all of them
/// (the spectraplex) is the feasible region of every learning loop here.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    /// Validate and wrap a Hermitian matrix.
    pub fn new(h: HermitianMatrix) -> Result<Self> {
        let eig = h.eigh()?;
        let min_eig = eig.values().first().copied().unwrap_or(0.0);
        if min_eig < DENSITY_EIG_TOL {
            return Err(Error::NotDensity(format!(
                "minimum eigenvalue {min_eig:.6e} below tolerance {DENSITY_EIG_TOL:.0e}"
            )));
        }
        let trace = h.trace();
        if (trace - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::NotDensity(format!(
                "trace {trace:.12} deviates from 1 by more than {DENSITY_TRACE_TOL:.0e}"
            )));
        }
        Ok(Self(h))
    }

    /// Validate a raw complex matrix (Hermitian check included).
    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?)
    }

    /// The maximally mixed state `I / d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self(HermitianMatrix::from_real_diag(&vec![1.0 / dim as f64; dim]))
    }

    /// Pure state `|psi><psi|` from a state vector (normalized internally).
    pub fn pure_state(ket: &[C64]) -> Result<Self> {
        let norm2: f64 = ket.iter().map(|a| a.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::NotDensity("zero state vector".into()));
        }
        let dim = ket.len();
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, ket[i] * ket[j].conj() / norm2);
            }
        }
        Ok(Self(HermitianMatrix::hermitize(m)))
    }

    /// Pure state on the computational basis vector `|index>`.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut diag = vec![0.0; dim];
        diag[index] = 1.0;
        Self(HermitianMatrix::from_real_diag(&diag))
    }

    /// Wrap without validation; caller guarantees the invariants hold.
    pub(crate) fn trusted(h: HermitianMatrix) -> Self {
        Self(h)
    }

    #[inline]
    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        self.0.matrix()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// Partial contraction of a product-space observable against all players but one.
///
/// For `W` on the tensor product of the players' spaces and a strategy profile
/// `X = (X_1, ..., X_N)`, returns the unique matrix `G_i` on player `i`'s space
/// with
///
/// ```text
/// tr(G_i Y) = tr(W  X_1 ⊗ ... ⊗ X_{i-1} ⊗ Y ⊗ X_{i+1} ⊗ ... ⊗ X_N)   for all Y.
/// ```
///
/// This is the individual payoff gradient when `W` is a payoff observable:
/// `tr(G_i X_i)` recovers the full payoff.
pub fn partial_contraction(
    w: &HermitianMatrix,
    profile: &[DensityMatrix],
    slot: usize,
) -> Result<HermitianMatrix> {
    let dims: Vec<usize> = profile.iter().map(|x| x.dim()).collect();
    let product: usize = dims.iter().product();
    if w.dim() != product {
        return Err(Error::DimMismatch(format!(
            "observable dim {} vs product of player dims {}",
            w.dim(),
            product
        )));
    }
    if slot >= profile.len() {
        return Err(Error::DimMismatch(format!(
            "player index {slot} out of range for {} players",
            profile.len()
        )));
    }

    let n = dims.len();
    let d_i = dims[slot];
    let wm = w.matrix();

    // Digit decomposition of a product-space index, row-major over players.
    let digits = |mut idx: usize| -> Vec<usize> {
        let mut out = vec![0usize; n];
        for j in (0..n).rev() {
            out[j] = idx % dims[j];
            idx /= dims[j];
        }
        out
    };

    let mut g = ComplexMatrix::zeros(d_i);
    for r in 0..product {
        let rd = digits(r);
        for c in 0..product {
            let wv = wm.get(r, c);
            if wv.norm_sqr() == 0.0 {
                continue;
            }
            let cd = digits(c);
            // tr(W (X_1 ⊗ ... ⊗ X_N)) = Σ_{r,c} W[r,c] Π_j X_j[c_j, r_j];
            // holding player i's factor symbolic leaves the coefficient below.
            let mut coeff = wv;
            for j in 0..n {
                if j != slot {
                    coeff *= profile[j].matrix().get(cd[j], rd[j]);
                }
            }
            let prev = g.get(rd[slot], cd[slot]);
            g.set(rd[slot], cd[slot], prev + coeff);
        }
    }
    // Hermitian by construction (W Hermitian, X_j Hermitian); symmetrize rounding.
    Ok(HermitianMatrix::hermitize(g))
}
