//! First- and second-kind statistics and the derivative chain of an evolving
//! square-root embedding.
//!
//! For an observable `X` and embedding `xi` the second-kind covariance
//! `delta^2 X = tr(X xi X xi) - mean^2` splits the ordinary variance into a
//! classical part and the Wigner-Yanase skew information
//! `Var[X] - delta^2 X = -tr([xi, X]^2) / 2`.
//!
//! Under `xi_t = exp(-i h t) xi exp(i h t)` the n-th time derivative is
//! `(-i)^n ad_h^n[xi]`, a Hermitian matrix. Even moments `mu_2n` are the
//! squared norms of these derivatives; they drive every bound downstream.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matcore::{
    center_operator, commutator_raw, real_trace_product, CMat, HermitianOperator, C64,
};
use crate::states::SqrtState;
use crate::tol;

/// First/second-kind statistics of one observable in one state.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct StatSummary {
    pub mean: f64,
    pub variance: f64,
    /// Second-kind covariance `tr(X xi X xi) - mean^2`.
    pub delta_sq: f64,
    /// Wigner-Yanase skew information, `variance - delta_sq`.
    pub wysi: f64,
}

/// Expectation `tr(xi X xi)` of a Hermitian observable.
pub fn expectation(x: &HermitianOperator, xi: &SqrtState) -> Result<f64> {
    if x.dim() != xi.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: xi.dim(),
        });
    }
    let rho = xi.matrix() * xi.matrix();
    real_trace_product(x.matrix(), &rho, "expectation")
}

/// Mean, variance, second-kind covariance and skew information of `x`.
///
/// The skew information is evaluated both as `variance - delta_sq` and as
/// `-tr([xi, x]^2) / 2`; disagreement beyond `1e-10` aborts, since it means
/// the inputs are not the certified objects they claim to be.
pub fn stat_summary(x: &HermitianOperator, xi: &SqrtState) -> Result<StatSummary> {
    let mean = expectation(x, xi)?;
    let rho = xi.matrix() * xi.matrix();
    let xsq = x.matrix() * x.matrix();
    let second = real_trace_product(&xsq, &rho, "variance")?;
    let variance = second - mean * mean;

    let xxi = x.matrix() * xi.matrix();
    let delta_sq = real_trace_product(&xxi, &xxi, "delta_sq")? - mean * mean;

    let wysi = variance - delta_sq;
    let comm = commutator_raw(xi.matrix(), x.matrix());
    let wysi_comm = -0.5 * real_trace_product(&comm, &comm, "skew information")?;
    let delta = (wysi - wysi_comm).abs();
    if delta > tol::WYSI_CROSSCHECK * wysi.abs().max(1.0) {
        return Err(Error::Inconsistent {
            context: "skew information dual formulas",
            delta,
        });
    }
    Ok(StatSummary {
        mean,
        variance,
        delta_sq,
        wysi,
    })
}

/// Time-derivative chain of an evolving embedding.
///
/// `vector(0)` is the embedding itself; `vector(n)` is the n-th derivative
/// `(-i)^n ad_h^n[xi]` with the generator centered in the state, each one
/// Hermitian by construction.
#[derive(Clone, Debug)]
pub struct DerivativeStack {
    vectors: Vec<HermitianOperator>,
}

impl DerivativeStack {
    /// Highest derivative order held.
    pub fn order(&self) -> usize {
        self.vectors.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn vector(&self, n: usize) -> &HermitianOperator {
        &self.vectors[n]
    }

    pub fn vectors(&self) -> &[HermitianOperator] {
        &self.vectors
    }

    /// The embedding the chain was built from.
    pub fn xi(&self) -> &HermitianOperator {
        &self.vectors[0]
    }
}

/// Builds the derivative chain up to order `n_max >= 1`.
///
/// Each step is `v_n = -i [h_centered, v_{n-1}]`, which realizes the cyclic
/// sign pattern (-i, -1, +i, +1) of `(-i)^n ad^n` without accumulating
/// explicit powers.
pub fn derivative_stack(
    xi: &SqrtState,
    h: &HermitianOperator,
    n_max: usize,
) -> Result<DerivativeStack> {
    if n_max == 0 {
        return Err(Error::UnsupportedOrder {
            order: 0,
            reason: "derivative chain needs n_max >= 1",
        });
    }
    if xi.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            left: xi.dim(),
            right: h.dim(),
        });
    }
    let centered = center_operator(h, xi.operator())?;
    let minus_i = C64::new(0.0, -1.0);
    let mut vectors = Vec::with_capacity(n_max + 1);
    vectors.push(xi.operator().clone());
    for n in 1..=n_max {
        let raw = commutator_raw(centered.matrix(), vectors[n - 1].matrix());
        let v = HermitianOperator::new(crate::matcore::ComplexMatrix::new(raw * minus_i)?)?;
        vectors.push(v);
    }
    Ok(DerivativeStack { vectors })
}

/// Even moments and odd-pair cross norms of a derivative chain.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    mu: BTreeMap<usize, f64>,
    cross: BTreeMap<(usize, usize), f64>,
}

impl MomentTable {
    /// Looks up `mu_index`; even indices from 2 up to twice the chain order.
    pub fn mu(&self, index: usize) -> Result<f64> {
        self.mu
            .get(&index)
            .copied()
            .ok_or(Error::MissingMoment { index })
    }

    /// Largest moment index held.
    pub fn max_index(&self) -> usize {
        self.mu.keys().next_back().copied().unwrap_or(0)
    }

    pub fn mu_map(&self) -> &BTreeMap<usize, f64> {
        &self.mu
    }

    /// Cross norms `tr(v_r v_s)` for odd `r < s`.
    pub fn cross_map(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.cross
    }

    /// Builds a table from explicit even moments, for synthetic sequences.
    pub fn from_even_moments(entries: &[(usize, f64)]) -> Result<MomentTable> {
        let mut mu = BTreeMap::new();
        for &(index, value) in entries {
            if index == 0 || index % 2 != 0 {
                return Err(Error::UnsupportedOrder {
                    order: index,
                    reason: "moment indices must be positive even integers",
                });
            }
            mu.insert(index, value);
        }
        Ok(MomentTable {
            mu,
            cross: BTreeMap::new(),
        })
    }
}

/// Reads the chain norms into a moment table.
///
/// Every trace is checked for imaginary residue; a residue above `1e-10`
/// aborts the computation rather than being dropped.
pub fn moment_table(stack: &DerivativeStack) -> Result<MomentTable> {
    let mut mu = BTreeMap::new();
    for n in 1..=stack.order() {
        let v = stack.vector(n).matrix();
        mu.insert(2 * n, real_trace_product(v, v, "moment table")?);
    }
    let mut cross = BTreeMap::new();
    for r in (1..=stack.order()).step_by(2) {
        for s in ((r + 2)..=stack.order()).step_by(2) {
            let t = real_trace_product(
                stack.vector(r).matrix(),
                stack.vector(s).matrix(),
                "moment table cross",
            )?;
            cross.insert((r, s), t);
        }
    }
    Ok(MomentTable { mu, cross })
}

/// Closed forms for `mu_2`, `mu_4`, `mu_6` as polynomials in the centered
/// generator, bypassing the derivative chain.
pub fn closed_form_moments(xi: &SqrtState, h: &HermitianOperator) -> Result<[f64; 3]> {
    if xi.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            left: xi.dim(),
            right: h.dim(),
        });
    }
    let hc = center_operator(h, xi.operator())?;
    let x = xi.matrix();

    // w[k] = h^k xi, so tr(h^a xi h^b xi) = tr(w[a] w[b]).
    let mut w: Vec<CMat> = Vec::with_capacity(7);
    w.push(x.clone());
    for k in 1..=6 {
        w.push(hc.matrix() * &w[k - 1]);
    }
    let t = |a: usize, b: usize| real_trace_product(&w[a], &w[b], "closed-form moments");

    let mu2 = 2.0 * (t(2, 0)? - t(1, 1)?);
    let mu4 = 2.0 * (t(4, 0)? - 4.0 * t(3, 1)? + 3.0 * t(2, 2)?);
    let mu6 = 2.0 * (t(6, 0)? - 6.0 * t(5, 1)? + 15.0 * t(4, 2)? - 10.0 * t(3, 3)?);
    Ok([mu2, mu4, mu6])
}

/// Fisher-metric scalar of the time parameter, `2 mu_2`.
pub fn fisher_metric_scalar(stack: &DerivativeStack) -> Result<f64> {
    let v = stack.vector(1).matrix();
    Ok(2.0 * real_trace_product(v, v, "fisher scalar")?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{hs_inner, unitary_evolve, ComplexMatrix};
    use crate::states::{make_density, random_hamiltonian, random_mixed, random_pure, sqrt_embed};

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn qubit() -> (SqrtState, HermitianOperator) {
        let rho = make_density(
            ComplexMatrix::from_nested(&[vec![r(0.75), r(0.0)], vec![r(0.0), r(0.25)]]).unwrap(),
        )
        .unwrap();
        let h = HermitianOperator::new(
            ComplexMatrix::from_nested(&[vec![r(0.0), r(0.5)], vec![r(0.5), r(0.0)]]).unwrap(),
        )
        .unwrap();
        (sqrt_embed(&rho).unwrap(), h)
    }

    // (sqrt(3) - 1) / 4, the single off-diagonal scale of the qubit chain.
    const C: f64 = 0.18301270189221933;

    #[test]
    fn qubit_summary_reference_values() {
        let (xi, h) = qubit();
        let s = stat_summary(&h, &xi).unwrap();
        assert!(s.mean.abs() < 1e-15);
        assert!((s.variance - 0.25).abs() < 1e-15);
        assert!((s.delta_sq - 0.21650635094610965).abs() < 1e-15);
        assert!((s.wysi - 0.03349364905389032).abs() < 1e-15);
        assert!((s.wysi - C * C).abs() < 1e-15);
    }

    #[test]
    fn expectation_matches_cyclic_form() {
        let rho = random_mixed(5, 21).unwrap();
        let h = random_hamiltonian(5, 22).unwrap();
        let xi = sqrt_embed(&rho).unwrap();
        let direct = expectation(&h, &xi).unwrap();
        let cyclic = real_trace_product(h.matrix(), rho.matrix(), "test").unwrap();
        assert!((direct - cyclic).abs() < 1e-12);
    }

    #[test]
    fn qubit_chain_reference_values() {
        let (xi, h) = qubit();
        let stack = derivative_stack(&xi, &h, 3).unwrap();
        // v1 = [[0, ic], [-ic, 0]], v2 = [[-c, 0], [0, c]], v3 = -v1.
        assert!((stack.vector(1).matrix()[(0, 1)] - C64::new(0.0, C)).norm() < 1e-15);
        assert!((stack.vector(2).matrix()[(0, 0)] - r(-C)).norm() < 1e-15);
        assert!((stack.vector(3).matrix()[(0, 1)] - C64::new(0.0, -C)).norm() < 1e-15);

        let table = moment_table(&stack).unwrap();
        let mu = 0.06698729810778065; // 2 c^2
        assert!((table.mu(2).unwrap() - mu).abs() < 1e-15);
        assert!((table.mu(4).unwrap() - mu).abs() < 1e-15);
        assert!((table.mu(6).unwrap() - mu).abs() < 1e-15);
        assert!((table.cross_map()[&(1, 3)] + mu).abs() < 1e-15);

        assert!((fisher_metric_scalar(&stack).unwrap() - 2.0 * mu).abs() < 1e-15);
    }

    #[test]
    fn first_derivative_matches_finite_difference() {
        let rho = random_mixed(4, 3).unwrap();
        let h = random_hamiltonian(4, 4).unwrap();
        let xi = sqrt_embed(&rho).unwrap();
        let stack = derivative_stack(&xi, &h, 1).unwrap();

        let step = 1e-5;
        let x = xi.operator().clone().into_complex();
        let plus = unitary_evolve(&h, &x, step).unwrap();
        let minus = unitary_evolve(&h, &x, -step).unwrap();
        let fd = (plus.matrix() - minus.matrix()) / C64::new(2.0 * step, 0.0);
        let err = (fd - stack.vector(1).matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "first-derivative mismatch {err:e}");
    }

    #[test]
    fn second_derivative_matches_finite_difference() {
        let rho = random_mixed(3, 8).unwrap();
        let h = random_hamiltonian(3, 9).unwrap();
        let xi = sqrt_embed(&rho).unwrap();
        let stack = derivative_stack(&xi, &h, 2).unwrap();

        let step = 1e-3;
        let x = xi.operator().clone().into_complex();
        let plus = unitary_evolve(&h, &x, step).unwrap();
        let minus = unitary_evolve(&h, &x, -step).unwrap();
        let fd = (plus.matrix() + minus.matrix() - x.matrix() * C64::new(2.0, 0.0))
            / C64::new(step * step, 0.0);
        let err = (fd - stack.vector(2).matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-5, "second-derivative mismatch {err:e}");
    }

    #[test]
    fn chain_norm_equals_twice_skew_information() {
        let rho = random_mixed(6, 17).unwrap();
        let h = random_hamiltonian(6, 18).unwrap();
        let xi = sqrt_embed(&rho).unwrap();
        let stack = derivative_stack(&xi, &h, 1).unwrap();
        let table = moment_table(&stack).unwrap();
        let s = stat_summary(&h, &xi).unwrap();
        assert!((table.mu(2).unwrap() - 2.0 * s.wysi).abs() < 1e-10);
    }

    #[test]
    fn closed_forms_match_chain_route() {
        for seed in 0..5 {
            let dim = 3 + (seed as usize % 4);
            let rho = random_mixed(dim, 100 + seed).unwrap();
            let h = random_hamiltonian(dim, 200 + seed).unwrap();
            let xi = sqrt_embed(&rho).unwrap();
            let stack = derivative_stack(&xi, &h, 3).unwrap();
            let table = moment_table(&stack).unwrap();
            let [mu2, mu4, mu6] = closed_form_moments(&xi, &h).unwrap();
            for (direct, closed) in [
                (table.mu(2).unwrap(), mu2),
                (table.mu(4).unwrap(), mu4),
                (table.mu(6).unwrap(), mu6),
            ] {
                assert!(
                    (direct - closed).abs() <= 1e-9 * direct.abs().max(1e-30),
                    "moment mismatch: {direct} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn moments_are_invariant_under_evolution() {
        let rho = random_mixed(5, 31).unwrap();
        let h = random_hamiltonian(5, 32).unwrap();
        let xi = sqrt_embed(&rho).unwrap();
        let t0 = moment_table(&derivative_stack(&xi, &h, 5).unwrap()).unwrap();
        let moved = xi.evolve(&h, 0.7).unwrap();
        let t1 = moment_table(&derivative_stack(&moved, &h, 5).unwrap()).unwrap();
        for (idx, v0) in t0.mu_map() {
            let v1 = t1.mu_map()[idx];
            assert!(
                (v0 - v1).abs() <= 1e-8 * v0.abs().max(1e-30),
                "mu_{idx} drifted: {v0} vs {v1}"
            );
        }
    }

    #[test]
    fn consecutive_orthogonality_and_sign_law() {
        let rho = random_mixed(6, 41).unwrap();
        let h = random_hamiltonian(6, 42).unwrap();
        let xi = sqrt_embed(&rho).unwrap();
        let stack = derivative_stack(&xi, &h, 5).unwrap();
        let table = moment_table(&stack).unwrap();

        for n in 0..stack.order() {
            let a = stack.vector(n).clone().into_complex();
            let b = stack.vector(n + 1).clone().into_complex();
            let ip = hs_inner(&a, &b).unwrap();
            assert!(ip.norm() < 1e-10, "orders {n},{} not orthogonal", n + 1);
        }
        // tr(v_r v_s) = (-1)^((s-r)/2) mu_{r+s} for odd r < s.
        for (&(rr, ss), &value) in table.cross_map() {
            let sign = if ((ss - rr) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let expect = sign * table.mu(rr + ss).unwrap();
            assert!(
                (value - expect).abs() <= 1e-9 * expect.abs().max(1e-12),
                "sign law broken at ({rr},{ss})"
            );
        }
    }

    #[test]
    fn pure_states_have_no_second_kind_spread() {
        let rho = random_pure(5, 77).unwrap();
        let h = random_hamiltonian(5, 78).unwrap();
        let xi = sqrt_embed(&rho).unwrap();
        let s = stat_summary(&h, &xi).unwrap();
        assert!(s.delta_sq.abs() <= 1e-11, "delta_sq = {}", s.delta_sq);
        assert!(
            (s.wysi - s.variance).abs() <= 1e-11,
            "wysi = {}, variance = {}",
            s.wysi,
            s.variance
        );
    }

    #[test]
    fn missing_moment_is_reported() {
        let (xi, h) = qubit();
        let stack = derivative_stack(&xi, &h, 2).unwrap();
        let table = moment_table(&stack).unwrap();
        assert!(matches!(
            table.mu(6),
            Err(Error::MissingMoment { index: 6 })
        ));
    }

    #[test]
    fn synthetic_table_rejects_odd_indices() {
        assert!(MomentTable::from_even_moments(&[(2, 1.0), (3, 1.0)]).is_err());
        let t = MomentTable::from_even_moments(&[(2, 1.0), (4, 3.0)]).unwrap();
        assert_eq!(t.max_index(), 4);
    }
}
