//! Self-verification suite: every structural identity the library's results
//! rest on, checked over randomized ensembles.
//!
//! Each property draws its own deterministic instances from the configured
//! seed, records the worst deviation it saw, and passes when that deviation
//! stays inside its tolerance. The CLI prints one line per property; the
//! suite is also what the integration tests drive.

use serde::Serialize;

use crate::bounds::{
    bound_of_order, conjugation_diagnostics, estimator_term_even, gram_determinant, normalizer,
    order1_product, projection_coeff, uncertainty_products,
};
use crate::error::Result;
use crate::matcore::{
    commutator_raw, real_trace_product, trace_product, ComplexMatrix, HermitianOperator,
};
use crate::oracle::{
    direct_bhattacharyya, estimator_gradient, min_variance_oracle, orthogonal_system,
};
use crate::problem::parse_spec;
use crate::states::{
    boundary_safe, diagonal_density, geometric_ladder_weights, make_density, random_hamiltonian,
    random_mixed, sqrt_embed, truncated_conjugate_pair, DensityMatrix,
};
use crate::statmoments::{
    closed_form_moments, derivative_stack, moment_table, stat_summary, DerivativeStack,
};

/// Knobs of one verification run.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Dimensions the random ensembles cycle through.
    pub dims: Vec<usize>,
    /// Random instances per property.
    pub samples: usize,
    /// Multiplies every tolerance; above one loosens, below one tightens.
    pub tolerance_scale: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 7,
            dims: (2..=8).collect(),
            samples: 120,
            tolerance_scale: 1.0,
        }
    }
}

/// Result of one named property.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub pass: bool,
    /// Worst deviation observed, in the property's own units.
    pub worst: f64,
    pub tolerance: f64,
    /// Individual checks folded into `worst`.
    pub cases: usize,
    /// Where the worst deviation occurred.
    pub detail: String,
}

struct Prop {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    cases: usize,
    detail: String,
}

impl Prop {
    fn new(name: &'static str, tolerance: f64, scale: f64) -> Self {
        Prop {
            name,
            tolerance: tolerance * scale,
            worst: 0.0,
            cases: 0,
            detail: String::new(),
        }
    }

    fn observe(&mut self, deviation: f64, detail: impl FnOnce() -> String) {
        self.cases += 1;
        let deviation = if deviation.is_finite() {
            deviation
        } else {
            f64::INFINITY
        };
        if deviation > self.worst || self.cases == 1 {
            self.worst = deviation;
            self.detail = detail();
        }
    }

    fn finish(self) -> PropertyOutcome {
        PropertyOutcome {
            pass: self.worst <= self.tolerance && self.cases > 0,
            name: self.name,
            worst: self.worst,
            tolerance: self.tolerance,
            cases: self.cases,
            detail: self.detail,
        }
    }
}

/// Deterministic per-property instance stream.
fn instances(
    cfg: &VerifyConfig,
    salt: u64,
    count: usize,
) -> Result<Vec<(usize, DensityMatrix, HermitianOperator)>> {
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let dim = cfg.dims[i % cfg.dims.len()];
        let base = cfg
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(salt.wrapping_mul(0x0010_0000_000F))
            .wrapping_add(2 * i as u64);
        let rho = random_mixed(dim, base)?;
        let h = random_hamiltonian(dim, base.wrapping_add(1))?;
        out.push((dim, rho, h));
    }
    Ok(out)
}

fn chain_for(rho: &DensityMatrix, h: &HermitianOperator, depth: usize) -> Result<DerivativeStack> {
    let xi = sqrt_embed(rho)?;
    derivative_stack(&xi, h, depth)
}

/// Runs every property and returns the outcomes in a fixed order.
pub fn run_verify(cfg: &VerifyConfig) -> Result<Vec<PropertyOutcome>> {
    Ok(vec![
        skew_information_dual_forms(cfg)?,
        fisher_matches_skew_information(cfg)?,
        derivative_matches_finite_difference(cfg)?,
        closed_form_moments_match_chain(cfg)?,
        moments_invariant_under_evolution(cfg)?,
        chain_orthogonality(cfg)?,
        chain_sign_law(cfg)?,
        normalizers_match_gram_schmidt(cfg)?,
        projections_match_gram_schmidt(cfg)?,
        degeneracy_routes_agree(cfg)?,
        determinants_nonnegative(cfg)?,
        bound_terms_nonnegative(cfg)?,
        bound_exceeds_quarter(cfg)?,
        order_three_closed_form(cfg)?,
        projection_sum_within_budget(cfg)?,
        variance_floor_complement(cfg)?,
        even_term_nonnegative(cfg)?,
        oscillator_gradient_projection(cfg)?,
        oscillator_order_one_saturation(cfg)?,
        oscillator_kappa_conserved(cfg)?,
        oscillator_contraction_identity(cfg)?,
        qubit_exact_degeneracy(cfg)?,
        schema_rejects_malformed_input(cfg)?,
    ])
}

/// `Var - delta^2` equals `-tr([xi, X]^2)/2` for every observable.
fn skew_information_dual_forms(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("skew_information_dual_forms", 1e-10, cfg.tolerance_scale);
    for (dim, rho, h) in instances(cfg, 1, cfg.samples)? {
        let xi = sqrt_embed(&rho)?;
        let s = stat_summary(&h, &xi)?;
        let comm = commutator_raw(xi.matrix(), h.matrix());
        let via_comm = -0.5 * real_trace_product(&comm, &comm, "verify wysi")?;
        let dev = (s.wysi - via_comm).abs() / s.wysi.abs().max(1.0);
        p.observe(dev, || format!("dim {dim}"));
    }
    Ok(p.finish())
}

/// The metric pullback `tr(xi' xi')` is twice the skew information of the
/// generator.
fn fisher_matches_skew_information(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new(
        "fisher_matches_skew_information",
        1e-10,
        cfg.tolerance_scale,
    );
    for (dim, rho, h) in instances(cfg, 2, cfg.samples)? {
        let xi = sqrt_embed(&rho)?;
        let s = stat_summary(&h, &xi)?;
        let stack = derivative_stack(&xi, &h, 1)?;
        let v1 = stack.vector(1).matrix();
        let mu2 = real_trace_product(v1, v1, "verify mu2")?;
        let dev = (mu2 - 2.0 * s.wysi).abs() / mu2.abs().max(1e-12);
        p.observe(dev, || format!("dim {dim}"));
    }
    Ok(p.finish())
}

/// The first chain vector is the actual time derivative of the evolving
/// embedding, checked against a central finite difference.
fn derivative_matches_finite_difference(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new(
        "derivative_matches_finite_difference",
        1e-8,
        cfg.tolerance_scale,
    );
    let step = 1e-5;
    let count = cfg.samples.min(40);
    for (dim, rho, h) in instances(cfg, 3, count)? {
        let xi = sqrt_embed(&rho)?;
        let stack = derivative_stack(&xi, &h, 1)?;
        let plus = xi.evolve(&h, step)?;
        let minus = xi.evolve(&h, -step)?;
        let fd = (plus.matrix() - minus.matrix()) / crate::matcore::C64::new(2.0 * step, 0.0);
        let diff = &fd - stack.vector(1).matrix();
        let dev = real_trace_product(&diff.adjoint(), &diff, "verify fd")?.sqrt();
        p.observe(dev, || format!("dim {dim}"));
    }
    Ok(p.finish())
}

/// The trace polynomials for `mu_2, mu_4, mu_6` agree with the iterated
/// commutator chain.
fn closed_form_moments_match_chain(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("closed_form_moments_match_chain", 1e-9, cfg.tolerance_scale);
    for (dim, rho, h) in instances(cfg, 4, cfg.samples)? {
        let xi = sqrt_embed(&rho)?;
        let cf = closed_form_moments(&xi, &h)?;
        let stack = derivative_stack(&xi, &h, 3)?;
        let table = moment_table(&stack)?;
        for (k, v) in [(2usize, cf[0]), (4, cf[1]), (6, cf[2])] {
            let mu = table.mu(k)?;
            let dev = (mu - v).abs() / mu.abs().max(1e-12);
            p.observe(dev, || format!("dim {dim}, mu_{k}"));
        }
    }
    Ok(p.finish())
}

/// Chain moments are constants of the motion.
fn moments_invariant_under_evolution(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new(
        "moments_invariant_under_evolution",
        1e-8,
        cfg.tolerance_scale,
    );
    let count = cfg.samples.min(60);
    for (dim, rho, h) in instances(cfg, 5, count)? {
        let xi = sqrt_embed(&rho)?;
        let base = moment_table(&derivative_stack(&xi, &h, 5)?)?;
        for t in [0.7, 1.9] {
            let evolved = xi.evolve(&h, t)?;
            let table = moment_table(&derivative_stack(&evolved, &h, 5)?)?;
            for (&k, &mu0) in base.mu_map() {
                let dev = (table.mu(k)? - mu0).abs() / mu0.abs().max(1e-12);
                p.observe(dev, || format!("dim {dim}, mu_{k}, t = {t}"));
            }
        }
    }
    Ok(p.finish())
}

/// Chain vectors of opposite parity are orthogonal.
fn chain_orthogonality(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("chain_orthogonality", 1e-10, cfg.tolerance_scale);
    for (dim, rho, h) in instances(cfg, 6, cfg.samples)? {
        let stack = chain_for(&rho, &h, 5)?;
        let table = moment_table(&stack)?;
        for (r, s) in [
            (0usize, 1usize),
            (1, 2),
            (2, 3),
            (0, 3),
            (1, 4),
            (0, 5),
            (3, 4),
        ] {
            let inner = trace_product(stack.vector(r).matrix(), stack.vector(s).matrix());
            let scale_r = if r == 0 { 1.0 } else { table.mu(2 * r)? };
            let scale_s = table.mu(2 * s)?;
            let dev = inner.norm() / (scale_r * scale_s).sqrt().max(1e-30);
            p.observe(dev, || format!("dim {dim}, orders ({r},{s})"));
        }
    }
    Ok(p.finish())
}

/// Same-parity contractions reproduce moments with alternating sign:
/// `tr(v_r v_s) = (-1)^((s-r)/2) mu_(r+s)`.
fn chain_sign_law(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("chain_sign_law", 1e-9, cfg.tolerance_scale);
    for (dim, rho, h) in instances(cfg, 7, cfg.samples)? {
        let stack = chain_for(&rho, &h, 7)?;
        let table = moment_table(&stack)?;
        for (r, s) in [
            (1usize, 3usize),
            (1, 5),
            (3, 5),
            (1, 7),
            (3, 7),
            (5, 7),
            (0, 2),
            (0, 4),
            (2, 4),
            (0, 6),
            (2, 6),
            (4, 6),
        ] {
            let inner = real_trace_product(
                stack.vector(r).matrix(),
                stack.vector(s).matrix(),
                "sign law",
            )?;
            let sign = if ((s - r) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let expect = sign * table.mu(r + s)?;
            let dev = (inner - expect).abs() / expect.abs().max(1e-12);
            p.observe(dev, || format!("dim {dim}, orders ({r},{s})"));
        }
    }
    Ok(p.finish())
}

/// Normalizers from determinant ratios equal Gram-Schmidt residual norms.
fn normalizers_match_gram_schmidt(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("normalizers_match_gram_schmidt", 1e-8, cfg.tolerance_scale);
    for (dim, rho, h) in instances(cfg, 8, cfg.samples)? {
        let stack = chain_for(&rho, &h, 7)?;
        let table = moment_table(&stack)?;
        let system = orthogonal_system(&stack)?;
        for n in [1usize, 3, 5, 7] {
            if system.vector(n).is_none() {
                continue;
            }
            let Ok(n_det) = normalizer(&table, n) else {
                continue;
            };
            let n_gs = system.norm_sq(n);
            let dev = (n_det - n_gs).abs() / n_det.abs().max(1e-30);
            p.observe(dev, || format!("dim {dim}, order {n}"));
        }
    }
    Ok(p.finish())
}

/// Projection coefficients from bordered determinants equal Gram-Schmidt
/// inner products.
fn projections_match_gram_schmidt(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("projections_match_gram_schmidt", 1e-8, cfg.tolerance_scale);
    for (dim, rho, h) in instances(cfg, 9, cfg.samples)? {
        let stack = chain_for(&rho, &h, 7)?;
        let table = moment_table(&stack)?;
        let system = orthogonal_system(&stack)?;
        for n in [3usize, 5, 7] {
            for k in (1..n).step_by(2) {
                let Some(psi) = system.vector(k) else {
                    continue;
                };
                let Ok(f_det) = projection_coeff(&table, n, k) else {
                    continue;
                };
                let f_gs = real_trace_product(psi, stack.vector(n).matrix(), "verify f")?
                    / system.norm_sq(k);
                let dev = (f_det - f_gs).abs() / f_det.abs().max(1.0);
                p.observe(dev, || format!("dim {dim}, coefficient ({n},{k})"));
            }
        }
    }
    Ok(p.finish())
}

/// Both routes classify exactly the same orders as degenerate.
fn degeneracy_routes_agree(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("degeneracy_routes_agree", 0.0, 1.0);
    for (dim, rho, h) in instances(cfg, 10, cfg.samples)? {
        let stack = chain_for(&rho, &h, 7)?;
        let table = moment_table(&stack)?;
        let system = orthogonal_system(&stack)?;
        let report = bound_of_order(&table, 7)?;
        for n in [1usize, 3, 5, 7] {
            let det_deg = report.degenerate_orders.contains(&n);
            let gs_deg = system.vector(n).is_none();
            let dev = if det_deg == gs_deg { 0.0 } else { 1.0 };
            p.observe(dev, || {
                format!("dim {dim}, order {n}: determinant {det_deg}, gram-schmidt {gs_deg}")
            });
        }
    }
    Ok(p.finish())
}

/// Gram determinants of a positive measure never go meaningfully negative.
fn determinants_nonnegative(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("determinants_nonnegative", 1e-9, cfg.tolerance_scale);
    for (dim, rho, h) in instances(cfg, 11, cfg.samples)? {
        let stack = chain_for(&rho, &h, 7)?;
        let table = moment_table(&stack)?;
        let mut scale = 1.0;
        for n in [1usize, 3, 5, 7] {
            scale *= table.mu(2 * n)?;
            let d = gram_determinant(&table, n)?;
            p.observe((-d / scale).max(0.0), || format!("dim {dim}, order {n}"));
        }
    }
    Ok(p.finish())
}

/// Every additive term of the cumulative bound is a square over a norm.
fn bound_terms_nonnegative(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("bound_terms_nonnegative", 0.0, 1.0);
    for (dim, rho, h) in instances(cfg, 12, cfg.samples)? {
        let stack = chain_for(&rho, &h, 7)?;
        let table = moment_table(&stack)?;
        let report = bound_of_order(&table, 7)?;
        for (&n, &term) in &report.terms {
            p.observe((-term).max(0.0), || format!("dim {dim}, order {n}"));
        }
    }
    Ok(p.finish())
}

/// The cumulative right-hand side never falls below the base value 1/4.
fn bound_exceeds_quarter(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("bound_exceeds_quarter", 1e-12, cfg.tolerance_scale);
    for (dim, rho, h) in instances(cfg, 13, cfg.samples)? {
        let stack = chain_for(&rho, &h, 7)?;
        let table = moment_table(&stack)?;
        let mut last = 0.25;
        for n_max in [1usize, 3, 5, 7] {
            let report = bound_of_order(&table, n_max)?;
            p.observe((0.25 - report.cumulative_rhs).max(0.0), || {
                format!("dim {dim}, order {n_max}: below 1/4")
            });
            p.observe((last - report.cumulative_rhs).max(0.0), || {
                format!("dim {dim}, order {n_max}: not monotone")
            });
            last = report.cumulative_rhs;
        }
    }
    Ok(p.finish())
}

/// At order three the cumulative bound collapses to
/// `1/4 (1 + (mu_4 - 3 mu_2^2)^2 / (mu_6 mu_2 - mu_4^2))`.
fn order_three_closed_form(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("order_three_closed_form", 1e-10, cfg.tolerance_scale);
    for (dim, rho, h) in instances(cfg, 14, cfg.samples)? {
        let stack = chain_for(&rho, &h, 3)?;
        let table = moment_table(&stack)?;
        let report = bound_of_order(&table, 3)?;
        if !report.degenerate_orders.is_empty() {
            continue;
        }
        let mu2 = table.mu(2)?;
        let mu4 = table.mu(4)?;
        let mu6 = table.mu(6)?;
        let gap = mu4 - 3.0 * mu2 * mu2;
        let closed = 0.25 * (1.0 + gap * gap / (mu6 * mu2 - mu4 * mu4));
        let dev = (report.cumulative_rhs - closed).abs() / closed.abs().max(1.0);
        p.observe(dev, || format!("dim {dim}"));
    }
    Ok(p.finish())
}

/// Projection sums never exceed what the gradient norm budgets (Bessel).
fn projection_sum_within_budget(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("projection_sum_within_budget", 1e-9, cfg.tolerance_scale);
    for (i, (dim, rho, h)) in instances(cfg, 15, cfg.samples)?.into_iter().enumerate() {
        let t_est = random_hamiltonian(dim, cfg.seed.wrapping_add(5000 + i as u64))?;
        let xi = sqrt_embed(&rho)?;
        let stack = derivative_stack(&xi, &h, 5)?;
        let system = orthogonal_system(&stack)?;
        let st = stat_summary(&t_est, &xi)?;
        let budget = st.variance + st.delta_sq;
        let direct = direct_bhattacharyya(&system, &t_est, &[1, 2, 3, 4, 5])?;
        let dev = (direct - budget) / budget.abs().max(1e-12);
        p.observe(dev.max(0.0), || format!("dim {dim}"));
    }
    Ok(p.finish())
}

/// The least-squares floor complements the projection sum exactly.
fn variance_floor_complement(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("variance_floor_complement", 1e-8, cfg.tolerance_scale);
    let count = cfg.samples.min(60);
    for (i, (dim, rho, h)) in instances(cfg, 16, count)?.into_iter().enumerate() {
        let t_est = random_hamiltonian(dim, cfg.seed.wrapping_add(6000 + i as u64))?;
        let xi = sqrt_embed(&rho)?;
        let stack = derivative_stack(&xi, &h, 5)?;
        let system = orthogonal_system(&stack)?;
        let grad = estimator_gradient(&t_est, system.xi())?;
        let grad_sq = real_trace_product(&grad, &grad, "verify floor")?;
        let direct = direct_bhattacharyya(&system, &t_est, &[1, 2, 3, 4, 5])?;
        let floor = min_variance_oracle(&system, &stack, &t_est, &[0, 1, 2, 3, 4, 5])?;
        let dev = (floor - (grad_sq - 2.0 * direct)).abs() / grad_sq.max(1.0);
        p.observe(dev, || format!("dim {dim}"));
        p.observe((-floor / grad_sq.max(1e-30)).max(0.0), || {
            format!("dim {dim}: negative floor")
        });
    }
    Ok(p.finish())
}

/// The estimator-dependent order-2 term is a ratio of squares.
fn even_term_nonnegative(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("even_term_nonnegative", 0.0, 1.0);
    for (i, (dim, rho, h)) in instances(cfg, 17, cfg.samples)?.into_iter().enumerate() {
        let t_est = random_hamiltonian(dim, cfg.seed.wrapping_add(7000 + i as u64))?;
        let stack = chain_for(&rho, &h, 2)?;
        let term = estimator_term_even(&t_est, &stack, 2)?;
        p.observe((-term).max(0.0), || format!("dim {dim}"));
    }
    Ok(p.finish())
}

fn ladder_cases() -> [(usize, f64); 3] {
    [(16, 0.15), (24, 0.2), (32, 0.25)]
}

/// On boundary-safe ladder states the gradient of the conjugate estimator
/// projects onto the first chain vector with coefficient one.
fn oscillator_gradient_projection(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("oscillator_gradient_projection", 1e-5, cfg.tolerance_scale);
    for (dim, ratio) in ladder_cases() {
        let pair = truncated_conjugate_pair(dim)?;
        let rho = diagonal_density(&geometric_ladder_weights(dim, ratio))?;
        if !boundary_safe(&rho, &pair, 1e-6) {
            p.observe(f64::INFINITY, || format!("dim {dim} not boundary safe"));
            continue;
        }
        let xi = sqrt_embed(&rho)?;
        let stack = derivative_stack(&xi, pair.h(), 1)?;
        let diag = conjugation_diagnostics(&pair, &stack)?;
        p.observe((diag.projection - 1.0).abs(), || {
            format!("dim {dim}, ratio {ratio}")
        });
    }
    Ok(p.finish())
}

/// Geometric ladder states saturate the order-one product at exactly 1/4.
fn oscillator_order_one_saturation(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("oscillator_order_one_saturation", 1e-6, cfg.tolerance_scale);
    for (dim, ratio) in ladder_cases() {
        let pair = truncated_conjugate_pair(dim)?;
        let rho = diagonal_density(&geometric_ladder_weights(dim, ratio))?;
        let product = order1_product(&rho, &pair)?;
        p.observe((product - 0.25).abs(), || {
            format!("dim {dim}, ratio {ratio}")
        });
        let both = uncertainty_products(&rho, pair.h(), pair.t_est())?;
        p.observe((both.symmetric_rhs - both.symmetric_lhs).max(0.0), || {
            format!("dim {dim}, ratio {ratio}: symmetric product below floor")
        });
    }
    Ok(p.finish())
}

/// A mixture of two ladders, one displaced, with no reflection symmetry;
/// its conserved contraction is visibly nonzero.
fn asymmetric_ladder_mixture(dim: usize) -> Result<DensityMatrix> {
    let pair = truncated_conjugate_pair(dim)?;
    let a = diagonal_density(&geometric_ladder_weights(dim, 0.15))?;
    let b = diagonal_density(&geometric_ladder_weights(dim, 0.3))?;
    // Displace the second component along position: the momentum operator
    // generates position shifts.
    let displaced =
        crate::matcore::unitary_evolve(pair.h(), &ComplexMatrix::new(b.matrix().clone())?, 0.8)?;
    let mix = a.matrix() * crate::matcore::C64::new(0.6, 0.0)
        + displaced.matrix() * crate::matcore::C64::new(0.4, 0.0);
    make_density(ComplexMatrix::new(mix)?)
}

/// The estimator contraction `tr(v_1 T~ v_1)` is a constant of the motion
/// for the conjugate pair, including on states with no special symmetry.
fn oscillator_kappa_conserved(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("oscillator_kappa_conserved", 1e-4, cfg.tolerance_scale);
    // The momentum generator translates the state along position, so the
    // grid's largest time sets how much truncation headroom is needed.
    let dim = 32;
    let pair = truncated_conjugate_pair(dim)?;
    let rho = asymmetric_ladder_mixture(dim)?;
    if !boundary_safe(&rho, &pair, 1e-6) {
        p.observe(f64::INFINITY, || "mixture not boundary safe".to_string());
        return Ok(p.finish());
    }
    let xi0 = sqrt_embed(&rho)?;
    let mut kappa0 = None;
    for t in [0.0, 0.3, 0.8, 1.5] {
        let xi = xi0.evolve(pair.h(), t)?;
        let stack = derivative_stack(&xi, pair.h(), 3)?;
        let diag = conjugation_diagnostics(&pair, &stack)?;
        let k = diag.kappa_per_order[&1];
        match kappa0 {
            None => {
                kappa0 = Some(k);
                // The probe is only meaningful if kappa is not trivially zero.
                p.observe(if k.abs() > 1e-3 { 0.0 } else { f64::INFINITY }, || {
                    format!("kappa(0) = {k} too close to zero to probe conservation")
                });
            }
            Some(k0) => {
                p.observe((k - k0).abs() / k0.abs().max(1e-12), || format!("t = {t}"));
            }
        }
    }
    Ok(p.finish())
}

/// Symmetrized chain contractions match their conjugation values on
/// boundary-safe states.
fn oscillator_contraction_identity(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("oscillator_contraction_identity", 1e-4, cfg.tolerance_scale);
    let dim = 24;
    let pair = truncated_conjugate_pair(dim)?;
    let rho = asymmetric_ladder_mixture(dim)?;
    let xi = sqrt_embed(&rho)?;
    let stack = derivative_stack(&xi, pair.h(), 3)?;
    let diag = conjugation_diagnostics(&pair, &stack)?;
    for (&n, check) in &diag.chain_contractions {
        let dev = (check.measured - check.expected).abs() / check.expected.abs().max(1e-6);
        p.observe(dev, || format!("order {n}"));
    }
    Ok(p.finish())
}

/// The frozen qubit instance degenerates at order three with an exactly
/// vanishing determinant and an exactly basic bound.
fn qubit_exact_degeneracy(_cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("qubit_exact_degeneracy", 0.0, 1.0);
    let rho = diagonal_density(&[0.75, 0.25])?;
    let h = HermitianOperator::new(ComplexMatrix::from_nested(&[
        vec![
            crate::matcore::C64::new(0.0, 0.0),
            crate::matcore::C64::new(0.5, 0.0),
        ],
        vec![
            crate::matcore::C64::new(0.5, 0.0),
            crate::matcore::C64::new(0.0, 0.0),
        ],
    ])?)?;
    let stack = chain_for(&rho, &h, 3)?;
    let table = moment_table(&stack)?;
    let report = bound_of_order(&table, 3)?;
    p.observe(report.d_values[&6].abs(), || "D_6 not exactly zero".into());
    p.observe((report.cumulative_rhs - 0.25).abs(), || {
        "cumulative bound not exactly 1/4".into()
    });
    p.observe(
        if report.degenerate_orders == vec![3] {
            0.0
        } else {
            1.0
        },
        || "order 3 not flagged degenerate".into(),
    );
    Ok(p.finish())
}

/// Malformed problem documents are rejected, each with a path.
fn schema_rejects_malformed_input(_cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut p = Prop::new("schema_rejects_malformed_input", 0.0, 1.0);
    let bad = [
        // Unknown top-level field.
        r#"{"schema_version":1,"dimension":2,"mystery":1,
            "hamiltonian":{"gue":{"seed":1}},"state":{"ginibre":{"seed":2}}}"#,
        // Unknown nested field.
        r#"{"schema_version":1,"dimension":2,
            "hamiltonian":{"gue":{"seed":1,"extra":2}},"state":{"ginibre":{"seed":2}}}"#,
        // Future schema version.
        r#"{"schema_version":99,"dimension":2,
            "hamiltonian":{"gue":{"seed":1}},"state":{"ginibre":{"seed":2}}}"#,
        // Even chain order.
        r#"{"schema_version":1,"dimension":2,"orders":[2],
            "hamiltonian":{"gue":{"seed":1}},"state":{"ginibre":{"seed":2}}}"#,
        // Conjugate estimator without the oscillator.
        r#"{"schema_version":1,"dimension":8,"estimator":"conjugate",
            "hamiltonian":{"gue":{"seed":1}},"state":{"ginibre":{"seed":2}}}"#,
        // Weights off normalization.
        r#"{"schema_version":1,"dimension":2,
            "hamiltonian":{"gue":{"seed":1}},"state":{"diagonal":{"weights":[0.7,0.2]}}}"#,
        // Oscillator below the minimum truncation.
        r#"{"schema_version":1,"dimension":4,
            "hamiltonian":"oscillator","state":{"ginibre":{"seed":2}}}"#,
    ];
    for (i, json) in bad.iter().enumerate() {
        let accepted = parse_spec(json).is_ok();
        p.observe(if accepted { 1.0 } else { 0.0 }, || {
            format!("malformed document {i} was accepted")
        });
    }
    Ok(p.finish())
}
