//! Numerical tolerances used across the crate.
//!
//! Every module pulls its thresholds from here so that the determinant route
//! and the Gram-Schmidt oracle classify degeneracy identically and the test
//! suite pins the same values the library enforces.

/// Hermiticity defect admitted at construction, relative to `max(|entry|, 1)`.
pub const HERMITICITY_REL: f64 = 1e-12;

/// Most negative eigenvalue admitted when certifying positive semidefiniteness.
pub const PSD_EIGEN_FLOOR: f64 = -1e-12;

/// Residual admitted for `sqrt(a) * sqrt(a) = a`, entrywise.
pub const SQRT_RESIDUAL: f64 = 1e-10;

/// Eigenvalues below this fraction of the largest one are snapped to exact
/// zero before square-rooting. The root amplifies solver noise as `1/sqrt`,
/// so an eigenvalue of order 1e-19 that is pure noise would otherwise inject
/// a 3e-10 spurious component. Genuine populations sit far above this line.
pub const SQRT_EIGEN_SNAP: f64 = 1e-14;

/// Trace deviation from one admitted on density-matrix input; inside this band
/// the matrix is renormalized exactly.
pub const TRACE_ADMIT: f64 = 1e-8;

/// Trace deviation guaranteed after renormalization.
pub const TRACE_STRICT: f64 = 1e-12;

/// Deviation of `tr(xi xi)` from one admitted on a square-root embedding.
pub const UNIT_HS_NORM: f64 = 1e-10;

/// Imaginary residue on a trace that aborts the computation instead of being
/// silently discarded.
pub const IMAG_RESIDUE_ABORT: f64 = 1e-10;

/// Admitted disagreement between the two skew-information formulas.
pub const WYSI_CROSSCHECK: f64 = 1e-10;

/// An odd order `n` is degenerate when `D_2n <= GRAM_DEGENERACY_REL * s` where
/// `s` is the product of the Gram diagonal `mu_2 * mu_6 * ... * mu_2n`.
pub const GRAM_DEGENERACY_REL: f64 = 1e-10;

/// Absolute floor on `mu_2` below which the parameter is not identifiable.
/// The relative degeneracy rule is self-referential at order one, so the
/// Fisher scalar gets an absolute cutoff instead.
pub const FISHER_FLOOR: f64 = 1e-12;

/// Smallest eigenvalue below which a random mixed state is regenerated with
/// the next seed.
pub const RANDOM_EIGEN_REGEN: f64 = 1e-10;

/// Deviation from unit sum inside which diagonal state weights are normalized
/// silently; beyond it the spec is rejected.
pub const WEIGHT_NORMALIZE: f64 = 1e-8;

/// Shared degeneracy classifier for an odd-chain Gram determinant.
///
/// `diag_product` is the product of the Gram diagonal entries for the same
/// order, which sets the scale of a non-degenerate determinant.
pub fn gram_degenerate(d2n: f64, diag_product: f64, rel: f64) -> bool {
    d2n <= rel * diag_product
}
