//! Dense complex-matrix kernel.
//!
//! Everything downstream works with square complex matrices, certified
//! Hermitian operators, and a single spectral primitive: the Hermitian
//! eigendecomposition. The matrix square root and unitary evolution are both
//! derived from it rather than from iterative schemes, so their accuracy is
//! tied to one well-understood routine.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use std::ops::Deref;

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

pub const ONE: C64 = Complex::new(1.0, 0.0);
pub const I: C64 = Complex::new(0.0, 1.0);

/// Square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(CMat);

impl ComplexMatrix {
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(ComplexMatrix(mat))
    }

    /// Builds from row-major nested data; rows must all have the same length.
    pub fn from_nested(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
            return Err(Error::NotSquare { rows: n, cols });
        }
        let mat = CMat::from_fn(n, n, |i, j| rows[i][j]);
        ComplexMatrix::new(mat)
    }

    pub fn identity(dim: usize) -> Self {
        ComplexMatrix(CMat::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix(CMat::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }
}

impl Deref for ComplexMatrix {
    type Target = CMat;

    fn deref(&self) -> &CMat {
        &self.0
    }
}

/// Hermitian matrix, symmetrized at construction.
///
/// The stored matrix is exactly `(a + a^dagger) / 2` of the input, so traces
/// of products of these operators are real up to rounding. The defect of the
/// raw input is kept for diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    mat: CMat,
    defect: f64,
}

impl HermitianOperator {
    /// Certifies hermiticity within `1e-12 * max(|entry|, 1)` and symmetrizes.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let mat = m.into_inner();
        let defect = hermiticity_defect(&mat);
        let scale = mat.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let tolerance = tol::HERMITICITY_REL * scale;
        if defect > tolerance {
            return Err(Error::NotHermitian {
                defect,
                tol: tolerance,
            });
        }
        Ok(HermitianOperator {
            mat: symmetrize(&mat),
            defect,
        })
    }

    /// Wraps a matrix already known to be exactly symmetrized.
    ///
    /// Used internally where hermiticity holds by construction (commutator
    /// chains, spectral recompositions, real multiples of the identity).
    pub(crate) fn from_symmetrized(mat: CMat, defect: f64) -> Self {
        debug_assert!(hermiticity_defect(&mat) == 0.0);
        HermitianOperator { mat, defect }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    /// Largest entrywise deviation of the raw input from its adjoint.
    pub fn hermiticity_defect(&self) -> f64 {
        self.defect
    }

    pub fn into_complex(self) -> ComplexMatrix {
        ComplexMatrix(self.mat)
    }
}

/// Largest entrywise deviation from the adjoint.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Exact symmetrization `(m + m^dagger) / 2`.
pub(crate) fn symmetrize(m: &CMat) -> CMat {
    let n = m.nrows();
    CMat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

fn check_same_dim(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// Hilbert-Schmidt inner product `tr(a^dagger b)`, conjugate-linear in `a`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    check_same_dim(a.dim(), b.dim())?;
    let mut acc = C64::new(0.0, 0.0);
    for (x, y) in a.matrix().iter().zip(b.matrix().iter()) {
        acc += x.conj() * y;
    }
    Ok(acc)
}

/// `tr(a^dagger b)` on raw storage, entrywise; O(dim^2).
pub(crate) fn hs_inner_raw(a: &CMat, b: &CMat) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.conj() * y;
    }
    acc
}

/// `tr(a b)` without forming the product; O(dim^2).
pub(crate) fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// `tr(a b)` for operators whose product must have a real trace.
///
/// An imaginary residue above the abort threshold indicates corrupted inputs
/// and is surfaced instead of being dropped.
pub(crate) fn real_trace_product(a: &CMat, b: &CMat, context: &'static str) -> Result<f64> {
    let t = trace_product(a, b);
    if t.im.abs() > tol::IMAG_RESIDUE_ABORT * t.re.abs().max(1.0) {
        return Err(Error::ImaginaryResidue {
            context,
            residue: t.im,
        });
    }
    Ok(t.re)
}

/// Hilbert-Schmidt inner product of two Hermitian operators, reported real.
pub fn hs_inner_real(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    check_same_dim(a.dim(), b.dim())?;
    // tr(a^dagger b) = tr(a b) for Hermitian a.
    real_trace_product(a.matrix(), b.matrix(), "hs_inner_real")
}

/// Eigendecomposition of a Hermitian operator.
///
/// Eigenvalues ascend; `vectors` holds the matching orthonormal eigenvectors
/// as columns, so `m = V diag(lambda) V^dagger`.
pub struct Eigh {
    pub values: DVector<f64>,
    pub vectors: CMat,
}

/// Spectral decomposition, the sole spectral primitive of the crate.
pub fn eigh(h: &HermitianOperator) -> Eigh {
    let se = h.matrix().clone().symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = DVector::from_fn(n, |i, _| se.eigenvalues[order[i]]);
    let vectors = CMat::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
    Eigh { values, vectors }
}

/// Recomposes `V f(lambda) V^dagger` and symmetrizes away rounding skew.
fn spectral_map(e: &Eigh, f: impl Fn(f64) -> f64) -> CMat {
    let n = e.values.len();
    let diag = CMat::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(f(e.values[i]), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let m = &e.vectors * diag * e.vectors.adjoint();
    symmetrize(&m)
}

/// Positive-semidefinite square root via the spectral decomposition.
///
/// Eigenvalues in `[-1e-12, 0)` are clamped to zero; anything lower rejects
/// the input. Eigenvalues below `1e-14` of the largest are snapped to zero
/// so that rank-deficient inputs (pure states) do not leak amplified solver
/// noise into the root.
pub fn matrix_sqrt(a: &HermitianOperator) -> Result<HermitianOperator> {
    let e = eigh(a);
    let min = e.values.min();
    if min < tol::PSD_EIGEN_FLOOR {
        return Err(Error::NotPositiveSemidefinite { eigenvalue: min });
    }
    let snap = tol::SQRT_EIGEN_SNAP * e.values.max().max(0.0);
    let root = spectral_map(&e, |l| if l <= snap { 0.0 } else { l.sqrt() });
    Ok(HermitianOperator::from_symmetrized(root, 0.0))
}

/// Commutator `[a, b] = ab - ba`.
pub fn commutator(a: &HermitianOperator, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_same_dim(a.dim(), b.dim())?;
    let m = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    Ok(ComplexMatrix(m))
}

pub(crate) fn commutator_raw(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub(crate) fn anticommutator_raw(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

/// Nested commutator `ad_h^n[x]`; `n = 0` returns `x` unchanged.
pub fn ad_power(h: &HermitianOperator, x: &ComplexMatrix, n: u32) -> Result<ComplexMatrix> {
    check_same_dim(h.dim(), x.dim())?;
    let mut acc = x.matrix().clone();
    for _ in 0..n {
        acc = commutator_raw(h.matrix(), &acc);
    }
    Ok(ComplexMatrix(acc))
}

/// Conjugation `exp(-i h t) x exp(i h t)` through the eigendecomposition of `h`.
pub fn unitary_evolve(h: &HermitianOperator, x: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    check_same_dim(h.dim(), x.dim())?;
    let e = eigh(h);
    let n = e.values.len();
    let phases = CMat::from_fn(n, n, |i, j| {
        if i == j {
            let phi = -e.values[i] * t;
            C64::new(phi.cos(), phi.sin())
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let u = &e.vectors * phases * e.vectors.adjoint();
    let m = &u * x.matrix() * u.adjoint();
    Ok(ComplexMatrix(m))
}

/// Removes the state expectation: `x - tr(x xi xi) * id`.
///
/// `xi` is the square-root factor of a unit-trace state, so the subtracted
/// scalar is the mean of `x` in that state.
pub fn center_operator(x: &HermitianOperator, xi: &HermitianOperator) -> Result<HermitianOperator> {
    check_same_dim(x.dim(), xi.dim())?;
    let rho = xi.matrix() * xi.matrix();
    let mean = real_trace_product(x.matrix(), &rho, "center_operator mean")?;
    let n = x.dim();
    let mat = CMat::from_fn(n, n, |i, j| {
        if i == j {
            x.matrix()[(i, j)] - C64::new(mean, 0.0)
        } else {
            x.matrix()[(i, j)]
        }
    });
    Ok(HermitianOperator::from_symmetrized(
        symmetrize(&mat),
        x.defect,
    ))
}
