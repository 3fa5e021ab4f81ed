//! Second, determinant-free route to the bounds: explicit Gram-Schmidt in
//! Hilbert-Schmidt space.
//!
//! Orthogonalizing the derivative chain directly gives the normalizers as
//! residual norms and the projection coefficients as inner products, with no
//! determinant in sight. Agreement between this route and the moment-matrix
//! route in `bounds` is what the verification suite leans on.
//!
//! The same orthogonal system evaluates projection sums of the estimator
//! gradient, whose complement is the reachable variance floor.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::matcore::{
    anticommutator_raw, center_operator, hs_inner_raw, real_trace_product, trace_product, CMat,
    HermitianOperator, C64,
};
use crate::statmoments::DerivativeStack;
use crate::tol;

/// Gradient of the estimator expectation along the evolution,
/// `t~ xi + xi t~` with the estimator centered in the state.
pub fn estimator_gradient(t_est: &HermitianOperator, xi: &HermitianOperator) -> Result<CMat> {
    let centered = center_operator(t_est, xi)?;
    Ok(anticommutator_raw(centered.matrix(), xi.matrix()))
}

/// Derivative chain orthogonalized over all orders `0..=n_max`.
///
/// Built by modified Gram-Schmidt with one re-orthogonalization pass.
/// Orders whose residual collapses are dropped from the system (and from all
/// later projections); the collapse criterion multiplies residual norms per
/// parity class, which reproduces the determinant degeneracy rule because
/// the Gram determinant telescopes over exactly those residuals.
pub struct OrthogonalSystem {
    xi: HermitianOperator,
    vectors: Vec<Option<CMat>>,
    norms: Vec<f64>,
    degenerate_orders: Vec<usize>,
    parity_leak: f64,
}

impl OrthogonalSystem {
    /// Highest chain order held.
    pub fn order(&self) -> usize {
        self.vectors.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.xi.dim()
    }

    pub fn xi(&self) -> &HermitianOperator {
        &self.xi
    }

    /// Orthogonalized vector of order `n`; `None` once degenerate.
    pub fn vector(&self, n: usize) -> Option<&CMat> {
        self.vectors[n].as_ref()
    }

    /// Squared residual norm of order `n`; zero once degenerate.
    pub fn norm_sq(&self, n: usize) -> f64 {
        self.norms[n]
    }

    pub fn degenerate_orders(&self) -> &[usize] {
        &self.degenerate_orders
    }

    /// Largest cross-parity projection coefficient seen while sweeping.
    ///
    /// Odd and even orders span orthogonal sectors, so this is pure floating
    /// point noise; it is recorded to make that claim checkable.
    pub fn parity_leak(&self) -> f64 {
        self.parity_leak
    }
}

pub fn orthogonal_system(stack: &DerivativeStack) -> Result<OrthogonalSystem> {
    orthogonal_system_with(stack, tol::GRAM_DEGENERACY_REL)
}

pub fn orthogonal_system_with(stack: &DerivativeStack, rel: f64) -> Result<OrthogonalSystem> {
    let n_max = stack.order();
    let mut vectors: Vec<Option<CMat>> = Vec::with_capacity(n_max + 1);
    let mut norms = vec![0.0; n_max + 1];
    let mut degenerate_orders = Vec::new();
    let mut parity_leak: f64 = 0.0;
    // Residual and raw-norm products per parity class (even, odd).
    let mut resid_product = [1.0_f64, 1.0];
    let mut mu_product = [1.0_f64, 1.0];
    let mut parity_dead = [false, false];

    for k in 0..=n_max {
        let raw = stack.vector(k).matrix();
        let raw_norm_sq = real_trace_product(raw, raw, "chain norm")?;
        let parity = k % 2;
        let mut w = raw.clone();
        for _pass in 0..2 {
            for (j, prev) in vectors.iter().enumerate() {
                let Some(prev) = prev else { continue };
                let coeff = hs_inner_raw(prev, &w) / C64::new(norms[j], 0.0);
                if j % 2 != parity {
                    parity_leak = parity_leak.max(coeff.norm());
                }
                w -= prev * coeff;
            }
        }
        let resid = real_trace_product(&w, &w, "residual norm")?;
        if parity_dead[parity]
            || tol::gram_degenerate(
                resid_product[parity] * resid,
                mu_product[parity] * raw_norm_sq,
                rel,
            )
        {
            parity_dead[parity] = true;
            degenerate_orders.push(k);
            vectors.push(None);
            continue;
        }
        resid_product[parity] *= resid;
        mu_product[parity] *= raw_norm_sq;
        norms[k] = resid;
        vectors.push(Some(w));
    }
    Ok(OrthogonalSystem {
        xi: stack.xi().clone(),
        vectors,
        norms,
        degenerate_orders,
        parity_leak,
    })
}

fn check_orders(system: &OrthogonalSystem, orders: &[usize]) -> Result<()> {
    for &n in orders {
        if n > system.order() {
            return Err(Error::UnsupportedOrder {
                order: n,
                reason: "order exceeds the orthogonalized chain",
            });
        }
    }
    Ok(())
}

/// Projection sum `1/2 sum_n (grad t . w_n)^2 / |w_n|^2` of the estimator
/// gradient over the selected orthogonalized orders.
///
/// Degenerate orders contribute nothing. With the odd orders this is the
/// Gram-Schmidt evaluation of the cumulative bound; adding even orders
/// tightens the variance floor but depends on the estimator.
pub fn direct_bhattacharyya(
    system: &OrthogonalSystem,
    t_est: &HermitianOperator,
    orders: &[usize],
) -> Result<f64> {
    check_orders(system, orders)?;
    let grad = estimator_gradient(t_est, system.xi())?;
    let mut sum = 0.0;
    for &n in orders {
        let Some(v) = system.vector(n) else { continue };
        let c = real_trace_product(&grad, v, "gradient projection")?;
        sum += c * c / system.norm_sq(n);
    }
    Ok(0.5 * sum)
}

/// Squared distance from the gradient to the span of the selected raw chain
/// vectors, via the normal equations (solved by SVD, so degenerate chains
/// are handled by rank truncation).
///
/// With order zero included in the span this equals
/// `|grad t|^2 - 2 * direct_bhattacharyya` over the remaining orders: the
/// gradient has no component on the sphere point itself, but the
/// orthogonalized even vectors are defined relative to it. The two routes
/// share no intermediate values.
pub fn min_variance_oracle(
    system: &OrthogonalSystem,
    stack: &DerivativeStack,
    t_est: &HermitianOperator,
    orders: &[usize],
) -> Result<f64> {
    check_orders(system, orders)?;
    if system.dim() != stack.dim() {
        return Err(Error::DimensionMismatch {
            left: system.dim(),
            right: stack.dim(),
        });
    }
    let grad = estimator_gradient(t_est, system.xi())?;
    let grad_sq = real_trace_product(&grad, &grad, "gradient norm")?;
    if orders.is_empty() {
        return Ok(grad_sq);
    }
    let m = orders.len();
    let mut gram = nalgebra::DMatrix::<f64>::zeros(m, m);
    let mut rhs = DVector::<f64>::zeros(m);
    for (i, &a) in orders.iter().enumerate() {
        let va = stack.vector(a).matrix();
        rhs[i] = real_trace_product(va, &grad, "normal equations rhs")?;
        for (j, &b) in orders.iter().enumerate() {
            gram[(i, j)] = trace_product(va, stack.vector(b).matrix()).re;
        }
    }
    let scale = gram.diagonal().amax().max(1e-300);
    let svd = gram.svd(true, true);
    let coeff = svd
        .solve(&rhs, 1e-13 * scale)
        .map_err(|_| Error::Inconsistent {
            context: "normal equations solve",
            delta: f64::NAN,
        })?;
    Ok(grad_sq - rhs.dot(&coeff))
}
