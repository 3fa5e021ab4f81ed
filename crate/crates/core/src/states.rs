//! Density matrices, square-root embeddings, and reference ensembles.
//!
//! A [`DensityMatrix`] certifies unit trace and positive semidefiniteness; a
//! [`SqrtState`] is its matrix square root, the actual coordinate used by the
//! moment machinery. [`ConjugatePair`] packages the truncated position and
//! momentum ladder operators together with the localized defect the
//! truncation introduces into the canonical commutator.

use std::hash::{Hash, Hasher};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matcore::{
    self, eigh, matrix_sqrt, real_trace_product, unitary_evolve, CMat, ComplexMatrix,
    HermitianOperator, C64, I,
};
use crate::tol;

/// Unit-trace positive-semidefinite Hermitian matrix.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    op: HermitianOperator,
    purity: f64,
    eigen_floor: f64,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMat {
        self.op.matrix()
    }

    /// `tr(rho^2)`, in `(1/dim, 1]` up to rounding.
    pub fn purity(&self) -> f64 {
        self.purity
    }

    /// Smallest eigenvalue found at certification (may be a tiny negative).
    pub fn eigen_floor(&self) -> f64 {
        self.eigen_floor
    }

    /// Conjugates by `exp(-i h t)`; purity and spectrum are preserved.
    pub fn evolve(&self, h: &HermitianOperator, t: f64) -> Result<DensityMatrix> {
        let m = unitary_evolve(h, &self.op.clone().into_complex(), t)?;
        make_density(m)
    }
}

/// Certifies a matrix as a density matrix.
///
/// The trace may deviate from one by up to `1e-8`; inside that band the
/// matrix is renormalized exactly. Eigenvalues down to `-1e-12` are accepted
/// as rounding debris.
pub fn make_density(m: ComplexMatrix) -> Result<DensityMatrix> {
    let op = HermitianOperator::new(m)?;
    let trace = op.matrix().trace().re;
    let deviation = (trace - 1.0).abs();
    if deviation > tol::TRACE_ADMIT {
        return Err(Error::TraceDeviationTooLarge {
            deviation,
            tol: tol::TRACE_ADMIT,
        });
    }
    let normalized = op.matrix() / C64::new(trace, 0.0);
    let op = HermitianOperator::new(ComplexMatrix::new(normalized)?)?;
    debug_assert!((op.matrix().trace().re - 1.0).abs() <= tol::TRACE_STRICT);

    let eigen_floor = eigh(&op).values.min();
    if eigen_floor < tol::PSD_EIGEN_FLOOR {
        return Err(Error::NotPositiveSemidefinite {
            eigenvalue: eigen_floor,
        });
    }
    let purity = real_trace_product(op.matrix(), op.matrix(), "purity")?;
    Ok(DensityMatrix {
        op,
        purity,
        eigen_floor,
    })
}

/// Builds a density matrix from nonnegative diagonal weights.
///
/// Weight sums within `1e-8` of one are normalized silently; anything further
/// off is rejected so that a typo in a problem document cannot pass as a
/// state.
pub fn diagonal_density(weights: &[f64]) -> Result<DensityMatrix> {
    if weights.len() < 2 {
        return Err(Error::UnsupportedDimension {
            dim: weights.len(),
            reason: "a state needs dimension >= 2",
        });
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::NotPositiveSemidefinite { eigenvalue: *w });
    }
    let sum: f64 = weights.iter().sum();
    let deviation = (sum - 1.0).abs();
    if deviation > tol::WEIGHT_NORMALIZE {
        return Err(Error::TraceDeviationTooLarge {
            deviation,
            tol: tol::WEIGHT_NORMALIZE,
        });
    }
    let n = weights.len();
    let mat = CMat::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(weights[i] / sum, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    make_density(ComplexMatrix::new(mat)?)
}

/// Normalized geometric ladder weights `w_n ~ ratio^n`.
///
/// With `ratio` well below one the population of the top truncation levels
/// is negligible, which is what makes finite ladders faithful stand-ins for
/// the untruncated oscillator.
pub fn geometric_ladder_weights(dim: usize, ratio: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..dim).map(|n| ratio.powi(n as i32)).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / sum).collect()
}

/// Square root of a density matrix; a unit vector of the Hilbert-Schmidt
/// sphere (`tr(xi xi) = 1`).
#[derive(Clone, Debug)]
pub struct SqrtState {
    xi: HermitianOperator,
    source_hash: u64,
}

impl SqrtState {
    pub fn dim(&self) -> usize {
        self.xi.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.xi
    }

    pub fn matrix(&self) -> &CMat {
        self.xi.matrix()
    }

    /// Fingerprint of the density matrix this embedding was taken from.
    pub fn source_hash(&self) -> u64 {
        self.source_hash
    }

    /// The state `xi xi` this embedding represents.
    pub fn density(&self) -> Result<DensityMatrix> {
        let rho = self.xi.matrix() * self.xi.matrix();
        make_density(ComplexMatrix::new(rho)?)
    }

    /// Conjugates the embedding by `exp(-i h t)`.
    ///
    /// Conjugation commutes with the square root, so this is the embedding of
    /// the evolved state without a second root extraction.
    pub fn evolve(&self, h: &HermitianOperator, t: f64) -> Result<SqrtState> {
        let m = unitary_evolve(h, &self.xi.clone().into_complex(), t)?;
        let xi = HermitianOperator::new(m)?;
        wrap_sqrt(xi)
    }
}

fn fingerprint(m: &CMat) -> u64 {
    let mut hasher = std::collections::hash_map::DefaultHasher::new();
    m.nrows().hash(&mut hasher);
    for z in m.iter() {
        z.re.to_bits().hash(&mut hasher);
        z.im.to_bits().hash(&mut hasher);
    }
    hasher.finish()
}

fn wrap_sqrt(xi: HermitianOperator) -> Result<SqrtState> {
    let norm = real_trace_product(xi.matrix(), xi.matrix(), "sqrt-state norm")?;
    let drift = (norm - 1.0).abs();
    if drift > tol::UNIT_HS_NORM {
        return Err(Error::Inconsistent {
            context: "square-root embedding left the unit sphere",
            delta: drift,
        });
    }
    let rho = xi.matrix() * xi.matrix();
    let source_hash = fingerprint(&rho);
    Ok(SqrtState { xi, source_hash })
}

/// Embeds a density matrix on the Hilbert-Schmidt sphere via its square root.
pub fn sqrt_embed(rho: &DensityMatrix) -> Result<SqrtState> {
    let xi = matrix_sqrt(rho.operator())?;
    wrap_sqrt(xi)
}

fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre(dim: usize, rng: &mut ChaCha8Rng) -> CMat {
    CMat::from_fn(dim, dim, |_, _| complex_normal(rng))
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::UnsupportedDimension {
            dim,
            reason: "ensembles need dimension >= 2",
        });
    }
    Ok(())
}

/// Ginibre-induced random mixed state `G G^dagger / tr(G G^dagger)`.
///
/// Deterministic for a given `(dim, seed)`. Draws whose smallest eigenvalue
/// falls under `1e-10` are discarded and redrawn with the incremented seed so
/// downstream square roots stay well conditioned.
pub fn random_mixed(dim: usize, seed: u64) -> Result<DensityMatrix> {
    check_dim(dim)?;
    let mut seed = seed;
    for _ in 0..64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = ginibre(dim, &mut rng);
        let raw = &g * g.adjoint();
        let trace = raw.trace().re;
        let rho = make_density(ComplexMatrix::new(raw / C64::new(trace, 0.0))?)?;
        if rho.eigen_floor() >= tol::RANDOM_EIGEN_REGEN {
            return Ok(rho);
        }
        seed = seed.wrapping_add(1);
    }
    Err(Error::Inconsistent {
        context: "random mixed state regeneration did not converge",
        delta: tol::RANDOM_EIGEN_REGEN,
    })
}

/// GUE-like random Hamiltonian `(G + G^dagger) / 2`, rescaled to unit
/// spectral norm. Deterministic for a given `(dim, seed)`.
pub fn random_hamiltonian(dim: usize, seed: u64) -> Result<HermitianOperator> {
    check_dim(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ginibre(dim, &mut rng);
    let h = HermitianOperator::new(ComplexMatrix::new(matcore::symmetrize(&g))?)?;
    let e = eigh(&h);
    let norm = e.values[0].abs().max(e.values[dim - 1].abs());
    if norm == 0.0 {
        return Err(Error::Inconsistent {
            context: "random Hamiltonian collapsed to zero",
            delta: 0.0,
        });
    }
    let scaled = h.matrix() / C64::new(norm, 0.0);
    HermitianOperator::new(ComplexMatrix::new(scaled)?)
}

/// Haar-like random pure state, as the projector onto a Gaussian vector.
pub fn random_pure(dim: usize, seed: u64) -> Result<DensityMatrix> {
    check_dim(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<C64> = (0..dim).map(|_| complex_normal(&mut rng)).collect();
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    let mat = CMat::from_fn(dim, dim, |i, j| v[i] * v[j].conj());
    make_density(ComplexMatrix::new(mat)?)
}

/// Truncated canonical pair: a momentum-like generator and the position-like
/// estimator conjugate to it, on a `dim`-level ladder.
///
/// The truncation breaks `i[h, t_est] = id` only in a corner block; `defect`
/// records the full deviation and `boundary_band` how many top levels it
/// touches.
#[derive(Clone, Debug)]
pub struct ConjugatePair {
    h: HermitianOperator,
    t_est: HermitianOperator,
    defect: ComplexMatrix,
    boundary_band: usize,
}

impl ConjugatePair {
    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// Momentum-like generator.
    pub fn h(&self) -> &HermitianOperator {
        &self.h
    }

    /// Position-like estimator.
    pub fn t_est(&self) -> &HermitianOperator {
        &self.t_est
    }

    /// `i [h, t_est] - id`, exactly `-dim` at the top corner and zero
    /// elsewhere up to rounding.
    pub fn defect(&self) -> &ComplexMatrix {
        &self.defect
    }

    pub fn boundary_band(&self) -> usize {
        self.boundary_band
    }
}

/// Builds the truncated conjugate pair on `dim >= 8` ladder levels.
pub fn truncated_conjugate_pair(dim: usize) -> Result<ConjugatePair> {
    if dim < 8 {
        return Err(Error::UnsupportedDimension {
            dim,
            reason: "truncated conjugate pair needs dim >= 8",
        });
    }
    // x = (a + a^dagger)/sqrt(2), p = i(a^dagger - a)/sqrt(2) with
    // a|n> = sqrt(n)|n-1>; both are exactly Hermitian by construction.
    let ladder = |n: usize| ((n + 1) as f64 / 2.0).sqrt();
    let x = CMat::from_fn(dim, dim, |i, j| {
        if i + 1 == j {
            C64::new(ladder(i), 0.0)
        } else if j + 1 == i {
            C64::new(ladder(j), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let p = CMat::from_fn(dim, dim, |i, j| {
        if i + 1 == j {
            C64::new(0.0, -ladder(i))
        } else if j + 1 == i {
            C64::new(0.0, ladder(j))
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let t_est = HermitianOperator::new(ComplexMatrix::new(x)?)?;
    let h = HermitianOperator::new(ComplexMatrix::new(p)?)?;

    let comm = matcore::commutator(&h, &t_est.clone().into_complex())?;
    let defect_mat = comm.matrix() * I - CMat::identity(dim, dim);
    let defect = ComplexMatrix::new(defect_mat)?;
    Ok(ConjugatePair {
        h,
        t_est,
        defect,
        boundary_band: 2,
    })
}

/// True when the population of `rho` on the top `boundary_band + 2` ladder
/// levels stays at or below `eps`, so the truncation defect cannot reach the
/// state at working precision.
pub fn boundary_safe(rho: &DensityMatrix, pair: &ConjugatePair, eps: f64) -> bool {
    assert_eq!(rho.dim(), pair.dim(), "state and pair dimensions differ");
    let dim = rho.dim();
    let guard = (pair.boundary_band + 2).min(dim);
    let tail: f64 = (dim - guard..dim).map(|k| rho.matrix()[(k, k)].re).sum();
    tail <= eps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::hermiticity_defect;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn diag2(a: f64, b: f64) -> ComplexMatrix {
        ComplexMatrix::from_nested(&[vec![r(a), r(0.0)], vec![r(0.0), r(b)]]).unwrap()
    }

    #[test]
    fn accepts_and_renormalizes_near_unit_trace() {
        let eps = 5e-9;
        let rho = make_density(diag2(0.75 * (1.0 + eps), 0.25 * (1.0 + eps))).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() <= tol::TRACE_STRICT);
        assert!((rho.purity() - 0.625).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_trace_and_negativity() {
        assert!(matches!(
            make_density(diag2(0.8, 0.3)),
            Err(Error::TraceDeviationTooLarge { .. })
        ));
        assert!(matches!(
            make_density(diag2(1.5, -0.5)),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn purity_range() {
        let mixed = make_density(diag2(0.5, 0.5)).unwrap();
        assert!((mixed.purity() - 0.5).abs() < 1e-14);
        let pure = make_density(diag2(1.0, 0.0)).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-14);
        assert_eq!(pure.eigen_floor(), 0.0);
    }

    #[test]
    fn sqrt_embed_reference_values() {
        let rho = make_density(diag2(0.75, 0.25)).unwrap();
        let xi = sqrt_embed(&rho).unwrap();
        assert!((xi.matrix()[(0, 0)].re - 0.75f64.sqrt()).abs() < 1e-15);
        assert!((xi.matrix()[(1, 1)].re - 0.5).abs() < 1e-15);
        let norm = xi.matrix().iter().map(|z| z.norm_sqr()).sum::<f64>();
        assert!((norm - 1.0).abs() < tol::UNIT_HS_NORM);
    }

    #[test]
    fn pure_state_is_its_own_root() {
        let rho = make_density(diag2(1.0, 0.0)).unwrap();
        let xi = sqrt_embed(&rho).unwrap();
        let diff = xi.matrix() - rho.matrix();
        assert!(diff.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn source_hash_tracks_state_identity() {
        let a = sqrt_embed(&make_density(diag2(0.75, 0.25)).unwrap()).unwrap();
        let b = sqrt_embed(&make_density(diag2(0.75, 0.25)).unwrap()).unwrap();
        let c = sqrt_embed(&make_density(diag2(0.7, 0.3)).unwrap()).unwrap();
        assert_eq!(a.source_hash(), b.source_hash());
        assert_ne!(a.source_hash(), c.source_hash());
    }

    #[test]
    fn evolution_stays_on_sphere() {
        let rho = random_mixed(4, 9).unwrap();
        let h = random_hamiltonian(4, 11).unwrap();
        let xi = sqrt_embed(&rho).unwrap();
        let moved = xi.evolve(&h, 0.8).unwrap();
        let norm = real_trace_product(moved.matrix(), moved.matrix(), "test").unwrap();
        assert!((norm - 1.0).abs() < tol::UNIT_HS_NORM);
        let rho_t = moved.density().unwrap();
        assert!((rho_t.purity() - rho.purity()).abs() < 1e-10);
    }

    #[test]
    fn ensembles_are_deterministic() {
        let a = random_mixed(5, 42).unwrap();
        let b = random_mixed(5, 42).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let c = random_mixed(5, 43).unwrap();
        assert_ne!(a.matrix(), c.matrix());

        let ha = random_hamiltonian(5, 7).unwrap();
        let hb = random_hamiltonian(5, 7).unwrap();
        assert_eq!(ha.matrix(), hb.matrix());
    }

    #[test]
    fn random_mixed_is_well_conditioned() {
        for seed in 0..20 {
            let rho = random_mixed(6, seed).unwrap();
            assert!(rho.eigen_floor() >= tol::RANDOM_EIGEN_REGEN);
            assert!((rho.matrix().trace().re - 1.0).abs() <= tol::TRACE_STRICT);
        }
    }

    #[test]
    fn random_hamiltonian_unit_spectral_norm() {
        let h = random_hamiltonian(6, 3).unwrap();
        let e = eigh(&h);
        let norm = e.values[0].abs().max(e.values[5].abs());
        assert!((norm - 1.0).abs() < 1e-12);
        assert_eq!(hermiticity_defect(h.matrix()), 0.0);
    }

    #[test]
    fn random_pure_is_pure() {
        let rho = random_pure(7, 5).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conjugate_pair_needs_eight_levels() {
        assert!(matches!(
            truncated_conjugate_pair(7),
            Err(Error::UnsupportedDimension { dim: 7, .. })
        ));
        assert!(truncated_conjugate_pair(8).is_ok());
    }

    #[test]
    fn conjugate_defect_is_cornered() {
        let pair = truncated_conjugate_pair(16).unwrap();
        let d = pair.defect().matrix();
        // i[h, t] - id = -dim at the top corner, zero elsewhere.
        assert!((d[(15, 15)].re + 16.0).abs() < 1e-12);
        for i in 0..14 {
            for j in 0..14 {
                assert!(d[(i, j)].norm() <= 1e-12, "defect leaked to ({i},{j})");
            }
        }
    }

    #[test]
    fn boundary_safety_thresholds() {
        let dim = 16;
        let pair = truncated_conjugate_pair(dim).unwrap();

        let mut ground = vec![0.0; dim];
        ground[0] = 1.0;
        let ground = diagonal_density(&ground).unwrap();
        assert!(boundary_safe(&ground, &pair, 1e-8));

        let mixed = diagonal_density(&vec![1.0 / dim as f64; dim]).unwrap();
        assert!(!boundary_safe(&mixed, &pair, 1e-8));

        let geometric = |ratio: f64| {
            let raw: Vec<f64> = (0..dim).map(|k| ratio.powi(k as i32)).collect();
            let sum: f64 = raw.iter().sum();
            diagonal_density(&raw.iter().map(|w| w / sum).collect::<Vec<_>>()).unwrap()
        };
        // Exact tails: 0.2^12 (1 - 0.2^4) / (1 - 0.2^16) ~ 4.09e-9 passes,
        // the same expression at ratio 0.3 ~ 5.3e-7 does not.
        assert!(boundary_safe(&geometric(0.2), &pair, 1e-8));
        assert!(!boundary_safe(&geometric(0.3), &pair, 1e-8));
    }
}
