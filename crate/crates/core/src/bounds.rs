//! Gram determinants of the odd derivative chain and the correction
//! hierarchy they generate.
//!
//! For odd `n` the determinant `D_2n` is built from the Hankel-style matrix
//! whose first row is `mu_2n, mu_{2n-2}, ..., mu_{n+1}`, each following row
//! shifted down by two. `N_n = D_2n / D_{2n-4}` is the squared norm of the
//! orthogonalized chain vector, `F_{n,k}` the projection coefficient of the
//! raw vector on it, and the recursion
//!
//! ```text
//! U_n = (-1)^((n-1)/2) n mu_{n-1} - sum_{k odd < n} F_{n,k} U_k
//! ```
//!
//! feeds the cumulative right-hand side `1/4 sum_k mu_2 U_k^2 / N_k` of the
//! uncertainty-product bound. Degenerate orders contribute nothing and are
//! reported as such; degeneracy is absorbing along the chain.

use nalgebra::DMatrix;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matcore::{anticommutator_raw, center_operator, real_trace_product, HermitianOperator};
use crate::states::{sqrt_embed, ConjugatePair, DensityMatrix};
use crate::statmoments::{stat_summary, DerivativeStack, MomentTable};
use crate::tol;

/// Determinant through LU with partial pivoting; input is the small
/// moment matrix, never larger than (n+1)/2 square.
fn det_lu(m: DMatrix<f64>) -> f64 {
    m.lu().determinant()
}

fn require_odd(n: usize) -> Result<()> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(Error::UnsupportedOrder {
            order: n,
            reason: "chain orders are odd",
        });
    }
    Ok(())
}

/// `D_2n` for odd `n`, via pivoted triangular factorization.
pub fn gram_determinant(table: &MomentTable, n: usize) -> Result<f64> {
    require_odd(n)?;
    let p = n.div_ceil(2);
    let mut m = DMatrix::<f64>::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            m[(i, j)] = table.mu(2 * n - 2 * i - 2 * j)?;
        }
    }
    Ok(det_lu(m))
}

/// One odd order of the chain with everything the recursion derived for it.
struct ChainOrder {
    d: f64,
    degenerate: bool,
    n_val: Option<f64>,
    u_val: Option<f64>,
    f_vals: BTreeMap<usize, f64>,
}

/// Walks odd orders 1..=n_max accumulating determinants, normalizers,
/// projection coefficients and the recursion values.
fn walk_chain(table: &MomentTable, n_max: usize, rel: f64) -> Result<BTreeMap<usize, ChainOrder>> {
    require_odd(n_max)?;
    let mu2 = table.mu(2)?;
    if mu2 <= tol::FISHER_FLOOR {
        return Err(Error::ZeroFisherInformation { mu2 });
    }
    let mut chain: BTreeMap<usize, ChainOrder> = BTreeMap::new();
    let mut diag_product = 1.0;
    let mut degenerate = false;
    let mut prev_d = 1.0; // D_{2n-4} telescopes from one at n = 1
    for n in (1..=n_max).step_by(2) {
        let d = gram_determinant(table, n)?;
        diag_product *= table.mu(2 * n)?;
        degenerate = degenerate || tol::gram_degenerate(d, diag_product, rel);
        let mut order = ChainOrder {
            d,
            degenerate,
            n_val: None,
            u_val: None,
            f_vals: BTreeMap::new(),
        };
        if !degenerate {
            let n_val = d / prev_d;
            // mu_0 = tr(xi xi) = 1 seeds the recursion with U_1 = 1.
            let mu_prev = if n == 1 { 1.0 } else { table.mu(n - 1)? };
            let m = (n - 1) / 2;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let mut u = sign * n as f64 * mu_prev;
            for k in (1..n).step_by(2) {
                let f = projection_coeff_with(table, n, k, rel)?;
                let u_k = chain[&k].u_val.expect("non-degenerate prefix");
                u -= f * u_k;
                order.f_vals.insert(k, f);
            }
            order.n_val = Some(n_val);
            order.u_val = Some(u);
            // The next ratio divides by this order's determinant.
            prev_d = d;
        }
        chain.insert(n, order);
    }
    Ok(chain)
}

/// Squared norm `N_n = D_2n / D_{2n-4}` of the orthogonalized chain vector.
pub fn normalizer(table: &MomentTable, n: usize) -> Result<f64> {
    normalizer_with(table, n, tol::GRAM_DEGENERACY_REL)
}

pub fn normalizer_with(table: &MomentTable, n: usize, rel: f64) -> Result<f64> {
    let chain = walk_chain(table, n, rel)?;
    for (&k, order) in &chain {
        if order.degenerate {
            return Err(Error::DegenerateGram { order: k });
        }
    }
    Ok(chain[&n].n_val.expect("checked non-degenerate"))
}

/// Projection coefficient `F_{n,k}` of chain vector `n` on orthogonalized
/// vector `k`, as a ratio of bordered determinants.
pub fn projection_coeff(table: &MomentTable, n: usize, k: usize) -> Result<f64> {
    projection_coeff_with(table, n, k, tol::GRAM_DEGENERACY_REL)
}

pub fn projection_coeff_with(table: &MomentTable, n: usize, k: usize, rel: f64) -> Result<f64> {
    require_odd(n)?;
    require_odd(k)?;
    if k + 2 > n {
        return Err(Error::UnsupportedOrder {
            order: k,
            reason: "projection index must satisfy k <= n - 2",
        });
    }
    let d2k = gram_determinant(table, k)?;
    let mut diag_product = 1.0;
    for j in (1..=k).step_by(2) {
        diag_product *= table.mu(2 * j)?;
    }
    if tol::gram_degenerate(d2k, diag_product, rel) {
        return Err(Error::DegenerateGram { order: k });
    }
    let p = k.div_ceil(2);
    let mut m = DMatrix::<f64>::zeros(p, p);
    for j in 0..p {
        m[(0, j)] = table.mu(n + k - 2 * j)?;
    }
    for i in 1..p {
        for j in 0..p {
            m[(i, j)] = table.mu(2 * k - 2 * i - 2 * j)?;
        }
    }
    let sign = if ((n + k) / 2 - 1).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    Ok(sign * det_lu(m) / d2k)
}

/// Recursion values `U_n` for odd orders up to `n_max`.
///
/// Degenerate orders are absent from the map; `U_1 = 1` always (seeded by
/// `mu_0 = 1`). Errors with `ZeroFisherInformation` when `mu_2` vanishes.
pub fn u_recursion(table: &MomentTable, n_max: usize) -> Result<BTreeMap<usize, f64>> {
    u_recursion_with(table, n_max, tol::GRAM_DEGENERACY_REL)
}

pub fn u_recursion_with(
    table: &MomentTable,
    n_max: usize,
    rel: f64,
) -> Result<BTreeMap<usize, f64>> {
    let chain = walk_chain(table, n_max, rel)?;
    Ok(chain
        .into_iter()
        .filter_map(|(n, order)| order.u_val.map(|u| (n, u)))
        .collect())
}

/// Everything the bound of one order reports.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    /// Odd orders evaluated, ascending.
    pub orders: Vec<usize>,
    /// `D_2n` keyed by `2n`, including degenerate orders.
    pub d_values: BTreeMap<usize, f64>,
    /// `N_n` keyed by `n`; degenerate orders are absent.
    pub n_values: BTreeMap<usize, f64>,
    /// `U_n` keyed by `n`; degenerate orders are absent.
    pub u_values: BTreeMap<usize, f64>,
    /// Per-order contribution `mu_2 U_n^2 / (4 N_n)`; zero when degenerate.
    pub terms: BTreeMap<usize, f64>,
    /// Sum of the terms; at least 1/4 and non-decreasing in the order.
    pub cumulative_rhs: f64,
    pub degenerate_orders: Vec<usize>,
    /// Conserved estimator contraction, when an estimator is attached.
    pub kappa: Option<f64>,
}

/// Cumulative bound through odd order `n_max`.
pub fn bound_of_order(table: &MomentTable, n_max: usize) -> Result<BoundReport> {
    bound_of_order_with(table, n_max, tol::GRAM_DEGENERACY_REL)
}

pub fn bound_of_order_with(table: &MomentTable, n_max: usize, rel: f64) -> Result<BoundReport> {
    let chain = walk_chain(table, n_max, rel)?;
    let mu2 = table.mu(2)?;
    let mut report = BoundReport {
        orders: chain.keys().copied().collect(),
        d_values: BTreeMap::new(),
        n_values: BTreeMap::new(),
        u_values: BTreeMap::new(),
        terms: BTreeMap::new(),
        cumulative_rhs: 0.0,
        degenerate_orders: Vec::new(),
        kappa: None,
    };
    for (&n, order) in &chain {
        report.d_values.insert(2 * n, order.d);
        if order.degenerate {
            report.degenerate_orders.push(n);
            report.terms.insert(n, 0.0);
            continue;
        }
        let n_val = order.n_val.expect("non-degenerate");
        let u = order.u_val.expect("non-degenerate");
        report.n_values.insert(n, n_val);
        report.u_values.insert(n, u);
        report.terms.insert(n, 0.25 * mu2 * u * u / n_val);
    }
    report.cumulative_rhs = report.terms.values().sum();
    Ok(report)
}

/// Mixed and symmetric second-kind uncertainty products for one state.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct UncertaintyProducts {
    /// `(Var T + delta^2 T)(Var H - delta^2 H)`, the quantity the chain bounds.
    pub mixed: f64,
    /// `Var T * Var H`, bounded below by `symmetric_rhs`.
    pub symmetric_lhs: f64,
    /// `1/4 + delta^2 T * delta^2 H`.
    pub symmetric_rhs: f64,
}

/// Evaluates both uncertainty products for an estimator/generator pair.
pub fn uncertainty_products(
    rho: &DensityMatrix,
    h: &HermitianOperator,
    t_est: &HermitianOperator,
) -> Result<UncertaintyProducts> {
    let xi = sqrt_embed(rho)?;
    let sh = stat_summary(h, &xi)?;
    let st = stat_summary(t_est, &xi)?;
    Ok(UncertaintyProducts {
        mixed: (st.variance + st.delta_sq) * (sh.variance - sh.delta_sq),
        symmetric_lhs: st.variance * sh.variance,
        symmetric_rhs: 0.25 + st.delta_sq * sh.delta_sq,
    })
}

/// The order-one product `(Var T + delta^2 T)(Var H - delta^2 H)` for a
/// conjugate pair; at least 1/4 when the pair conjugates on the state's
/// support.
pub fn order1_product(rho: &DensityMatrix, pair: &ConjugatePair) -> Result<f64> {
    Ok(uncertainty_products(rho, pair.h(), pair.t_est())?.mixed)
}

/// Measured-versus-expected value of one chain contraction.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ContractionCheck {
    pub measured: f64,
    pub expected: f64,
}

/// How faithfully the estimator conjugates the generator on this state.
#[derive(Clone, Debug, Serialize)]
pub struct ConjugationDiagnostics {
    /// Gradient contraction with the first chain vector; one under exact
    /// conjugation.
    pub projection: f64,
    /// Conserved contraction `tr(v_n T~ v_n)` per order; constant along the
    /// evolution when the pair conjugates.
    pub kappa_per_order: BTreeMap<usize, f64>,
    /// Symmetrized contraction `tr(t {xi, v_n})` against its conjugation
    /// value `(-1)^((n-1)/2) n mu_{n-1}`, odd orders.
    pub chain_contractions: BTreeMap<usize, ContractionCheck>,
}

/// Evaluates conjugation diagnostics of a pair on a derivative chain.
pub fn conjugation_diagnostics(
    pair: &ConjugatePair,
    stack: &DerivativeStack,
) -> Result<ConjugationDiagnostics> {
    if pair.dim() != stack.dim() {
        return Err(Error::DimensionMismatch {
            left: pair.dim(),
            right: stack.dim(),
        });
    }
    let xi = stack.xi();
    let t_centered = center_operator(pair.t_est(), xi)?;
    let grad = anticommutator_raw(t_centered.matrix(), xi.matrix());
    let projection = real_trace_product(&grad, stack.vector(1).matrix(), "projection")?;

    let mut kappa_per_order = BTreeMap::new();
    for n in 1..=stack.order() {
        let v = stack.vector(n).matrix();
        let tv = t_centered.matrix() * v;
        kappa_per_order.insert(n, real_trace_product(v, &tv, "kappa")?);
    }

    let mut chain_contractions = BTreeMap::new();
    for n in (1..=stack.order()).step_by(2) {
        let anti = anticommutator_raw(xi.matrix(), stack.vector(n).matrix());
        let measured = real_trace_product(pair.t_est().matrix(), &anti, "chain contraction")?;
        let m = (n - 1) / 2;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let mu_prev = if n == 1 {
            1.0
        } else {
            let v = stack.vector(m).matrix();
            real_trace_product(v, v, "chain contraction moment")?
        };
        let expected = sign * n as f64 * mu_prev;
        chain_contractions.insert(n, ContractionCheck { measured, expected });
    }
    Ok(ConjugationDiagnostics {
        projection,
        kappa_per_order,
        chain_contractions,
    })
}

/// Estimator-dependent even term of order two:
/// `(grad t . v)^2 / (2 |v|^2)` with `v = v_2 + mu_2 xi`, the second
/// derivative orthogonalized against the sphere point.
///
/// Excluded from `cumulative_rhs`; reported separately. Zero when the
/// orthogonalized vector degenerates.
pub fn estimator_term_even(
    t_est: &HermitianOperator,
    stack: &DerivativeStack,
    n: usize,
) -> Result<f64> {
    if n != 2 {
        return Err(Error::UnsupportedOrder {
            order: n,
            reason: "only the order-2 even term is defined",
        });
    }
    if stack.order() < 2 {
        return Err(Error::UnsupportedOrder {
            order: stack.order(),
            reason: "chain must reach order 2",
        });
    }
    let xi = stack.xi();
    let v1 = stack.vector(1).matrix();
    let v2 = stack.vector(2).matrix();
    let mu2 = real_trace_product(v1, v1, "even term mu2")?;
    let mu4 = real_trace_product(v2, v2, "even term mu4")?;
    let hat = v2 + xi.matrix() * nalgebra::Complex::new(mu2, 0.0);
    let norm_sq = real_trace_product(&hat, &hat, "even term norm")?;
    if tol::gram_degenerate(norm_sq, mu4, tol::GRAM_DEGENERACY_REL) {
        return Ok(0.0);
    }
    let t_centered = center_operator(t_est, xi)?;
    let grad = anticommutator_raw(t_centered.matrix(), xi.matrix());
    let c = real_trace_product(&grad, &hat, "even term contraction")?;
    Ok(c * c / (2.0 * norm_sq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{ComplexMatrix, C64};
    use crate::states::{make_density, random_hamiltonian, random_mixed, truncated_conjugate_pair};
    use crate::statmoments::{derivative_stack, moment_table};

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    /// Even moments of the standard normal: mu_2k = (2k-1)!!.
    ///
    /// The orthogonalized chain is then the odd Hermite system with
    /// N_n = n! and every recursion value beyond U_1 exactly zero, which
    /// pins the determinant formulas against textbook values.
    fn gaussian_table() -> MomentTable {
        MomentTable::from_even_moments(&[
            (2, 1.0),
            (4, 3.0),
            (6, 15.0),
            (8, 105.0),
            (10, 945.0),
            (12, 10395.0),
            (14, 135135.0),
        ])
        .unwrap()
    }

    /// Two-atom gap measure: weight 0.6 at 1 and 0.4 at 4 (squared gaps).
    fn two_atom_table() -> MomentTable {
        MomentTable::from_even_moments(&[(2, 2.2), (4, 7.0), (6, 26.2), (8, 103.0), (10, 410.2)])
            .unwrap()
    }

    #[test]
    fn gaussian_determinants_match_factorials() {
        let t = gaussian_table();
        // D_2n = product of k! over odd k <= n.
        assert!((gram_determinant(&t, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((gram_determinant(&t, 3).unwrap() - 6.0).abs() < 1e-10);
        assert!((gram_determinant(&t, 5).unwrap() - 720.0).abs() < 1e-7);
        assert!((gram_determinant(&t, 7).unwrap() - 3628800.0).abs() < 1e-3);

        assert!((normalizer(&t, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((normalizer(&t, 3).unwrap() - 6.0).abs() < 1e-10);
        assert!((normalizer(&t, 5).unwrap() - 120.0).abs() < 1e-8);
        assert!((normalizer(&t, 7).unwrap() - 5040.0).abs() < 1e-6);
    }

    #[test]
    fn gaussian_projections_match_hermite_coefficients() {
        let t = gaussian_table();
        // <x^n, He_k> / k! with the chain's alternating sign.
        assert!((projection_coeff(&t, 3, 1).unwrap() + 3.0).abs() < 1e-12);
        assert!((projection_coeff(&t, 5, 1).unwrap() - 15.0).abs() < 1e-12);
        assert!((projection_coeff(&t, 5, 3).unwrap() + 10.0).abs() < 1e-10);
        assert!((projection_coeff(&t, 7, 1).unwrap() + 105.0).abs() < 1e-12);
        assert!((projection_coeff(&t, 7, 3).unwrap() - 105.0).abs() < 1e-9);
        assert!((projection_coeff(&t, 7, 5).unwrap() + 21.0).abs() < 1e-9);
    }

    #[test]
    fn gaussian_recursion_vanishes_beyond_order_one() {
        let t = gaussian_table();
        let u = u_recursion(&t, 7).unwrap();
        assert_eq!(u[&1], 1.0);
        assert!(u[&3].abs() < 1e-12);
        assert!(u[&5].abs() < 1e-10);
        assert!(u[&7].abs() < 1e-8);

        let report = bound_of_order(&t, 7).unwrap();
        assert!((report.cumulative_rhs - 0.25).abs() < 1e-12);
        assert!(report.degenerate_orders.is_empty());
    }

    #[test]
    fn two_atom_chain_values() {
        let t = two_atom_table();
        // D_6 = mu_6 mu_2 - mu_4^2 = 26.2 * 2.2 - 49.
        let d6 = gram_determinant(&t, 3).unwrap();
        assert!((d6 - 8.64).abs() < 1e-12);
        assert!((normalizer(&t, 3).unwrap() - 8.64 / 2.2).abs() < 1e-12);

        let u = u_recursion(&t, 3).unwrap();
        assert!((u[&3] - (7.0 - 3.0 * 2.2 * 2.2) / 2.2).abs() < 1e-12);

        // A two-atom measure cannot support three orthogonal chain vectors.
        let report = bound_of_order(&t, 5).unwrap();
        assert_eq!(report.degenerate_orders, vec![5]);
        assert_eq!(report.terms[&5], 0.0);

        // Third-order closed form: 1/4 (1 + (mu4 - 3 mu2^2)^2 / D_6).
        let gap = 7.0 - 3.0 * 2.2 * 2.2;
        let closed = 0.25 * (1.0 + gap * gap / 8.64);
        let r3 = bound_of_order(&t, 3).unwrap();
        assert!((r3.cumulative_rhs - closed).abs() < 1e-12);
        assert!(r3.cumulative_rhs > 0.25);
    }

    #[test]
    fn qubit_degenerates_exactly_at_order_three() {
        let rho = make_density(
            ComplexMatrix::from_nested(&[vec![r(0.75), r(0.0)], vec![r(0.0), r(0.25)]]).unwrap(),
        )
        .unwrap();
        let h = HermitianOperator::new(
            ComplexMatrix::from_nested(&[vec![r(0.0), r(0.5)], vec![r(0.5), r(0.0)]]).unwrap(),
        )
        .unwrap();
        let xi = sqrt_embed(&rho).unwrap();
        let stack = derivative_stack(&xi, &h, 3).unwrap();
        let table = moment_table(&stack).unwrap();

        let report = bound_of_order(&table, 3).unwrap();
        assert_eq!(report.d_values[&6], 0.0);
        assert_eq!(report.degenerate_orders, vec![3]);
        assert_eq!(report.terms[&3], 0.0);
        assert_eq!(report.cumulative_rhs, 0.25);

        // The degenerate order refuses a normalizer but the report stands.
        assert!(matches!(
            normalizer(&table, 3),
            Err(Error::DegenerateGram { order: 3 })
        ));
        // F_{3,1} is still defined: -mu_4 / mu_2 = -1 here.
        assert!((projection_coeff(&table, 3, 1).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn commuting_pair_has_no_information() {
        let rho = make_density(
            ComplexMatrix::from_nested(&[vec![r(0.6), r(0.0)], vec![r(0.0), r(0.4)]]).unwrap(),
        )
        .unwrap();
        let h = HermitianOperator::new(
            ComplexMatrix::from_nested(&[vec![r(1.0), r(0.0)], vec![r(0.0), r(-1.0)]]).unwrap(),
        )
        .unwrap();
        let xi = sqrt_embed(&rho).unwrap();
        let stack = derivative_stack(&xi, &h, 3).unwrap();
        let table = moment_table(&stack).unwrap();
        assert!(matches!(
            bound_of_order(&table, 3),
            Err(Error::ZeroFisherInformation { .. })
        ));
    }

    #[test]
    fn cumulative_rhs_is_monotone() {
        let rho = random_mixed(6, 61).unwrap();
        let h = random_hamiltonian(6, 62).unwrap();
        let xi = sqrt_embed(&rho).unwrap();
        let stack = derivative_stack(&xi, &h, 7).unwrap();
        let table = moment_table(&stack).unwrap();
        let mut last = 0.0;
        for n_max in [1, 3, 5, 7] {
            let report = bound_of_order(&table, n_max).unwrap();
            assert!(
                report.cumulative_rhs >= last - 1e-12,
                "cumulative dropped at order {n_max}"
            );
            assert!(report.cumulative_rhs >= 0.25 - 1e-12);
            last = report.cumulative_rhs;
        }
    }

    #[test]
    fn determinants_stay_nonnegative() {
        for seed in 0..10 {
            let dim = 4 + (seed as usize % 5);
            let rho = random_mixed(dim, 300 + seed).unwrap();
            let h = random_hamiltonian(dim, 400 + seed).unwrap();
            let xi = sqrt_embed(&rho).unwrap();
            let stack = derivative_stack(&xi, &h, 7).unwrap();
            let table = moment_table(&stack).unwrap();
            let mut scale = 1.0;
            for n in [1usize, 3, 5, 7] {
                scale *= table.mu(2 * n).unwrap();
                let d = gram_determinant(&table, n).unwrap();
                assert!(d >= -1e-9 * scale, "D_{} = {d} below -1e-9 scale", 2 * n);
            }
        }
    }

    #[test]
    fn oscillator_diagnostics_reference() {
        let dim = 16;
        let pair = truncated_conjugate_pair(dim).unwrap();
        let weights = crate::states::geometric_ladder_weights(dim, 0.2);
        let rho = crate::states::diagonal_density(&weights).unwrap();
        let xi = sqrt_embed(&rho).unwrap();
        let stack = derivative_stack(&xi, pair.h(), 3).unwrap();

        let diag = conjugation_diagnostics(&pair, &stack).unwrap();
        assert!((diag.projection - 1.0).abs() < 1e-9);
        for (n, check) in &diag.chain_contractions {
            assert!(
                (check.measured - check.expected).abs() <= 1e-6 * check.expected.abs().max(1e-6),
                "contraction identity broken at order {n}"
            );
        }

        let product = order1_product(&rho, &pair).unwrap();
        // Geometric ladder states saturate the order-one bound exactly.
        assert!((product - 0.25).abs() < 1e-9);

        // Gaussian-weight ladders saturate the symmetric product as well;
        // only truncation noise separates the sides.
        let products = uncertainty_products(&rho, pair.h(), pair.t_est()).unwrap();
        assert!(products.symmetric_lhs >= products.symmetric_rhs - 1e-8);
        assert!((products.symmetric_lhs - products.symmetric_rhs).abs() < 1e-6);
    }

    #[test]
    fn even_term_is_nonnegative_and_order_checked() {
        let dim = 12;
        let pair = truncated_conjugate_pair(dim).unwrap();
        let rho = random_mixed(dim, 71).unwrap();
        let xi = sqrt_embed(&rho).unwrap();
        let stack = derivative_stack(&xi, pair.h(), 2).unwrap();
        let term = estimator_term_even(pair.t_est(), &stack, 2).unwrap();
        assert!(term >= 0.0);
        assert!(matches!(
            estimator_term_even(pair.t_est(), &stack, 4),
            Err(Error::UnsupportedOrder { order: 4, .. })
        ));
    }
}
