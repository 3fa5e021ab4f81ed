//! Evaluation driver and the report artifacts it writes.
//!
//! `run_compute` realizes a problem specification, evolves the embedding to
//! each requested time, and evaluates moments, bounds and diagnostics there.
//! Reports serialize deterministically: map keys are ordered, nothing
//! records wall-clock state, and rerunning a spec reproduces the bytes.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bounds::{
    bound_of_order_with, conjugation_diagnostics, estimator_term_even, BoundReport,
    ConjugationDiagnostics, UncertaintyProducts,
};
use crate::error::Result;
use crate::matcore::real_trace_product;
use crate::problem::{ProblemSpec, SCHEMA_VERSION};
use crate::states::sqrt_embed;
use crate::statmoments::{
    closed_form_moments, derivative_stack, fisher_metric_scalar, moment_table, stat_summary,
    StatSummary,
};

/// Everything evaluated at one time point.
#[derive(Clone, Debug, Serialize)]
pub struct TimeRecord {
    pub time: f64,
    /// Even chain moments, keyed by index.
    pub mu: BTreeMap<usize, f64>,
    /// `[mu_2, mu_4, mu_6]` from the closed-form trace polynomials, when the
    /// chain is deep enough to compare.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_mu: Option<[f64; 3]>,
    /// Metric pullback along the evolution, `2 mu_2`.
    pub fisher_scalar: f64,
    pub stat_h: StatSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stat_t: Option<StatSummary>,
    pub bound: BoundReport,
    /// Estimator-dependent order-2 term, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub even_term_2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub products: Option<UncertaintyProducts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<ConjugationDiagnostics>,
}

/// One full `compute` run.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub generator: String,
    pub spec: ProblemSpec,
    pub records: Vec<TimeRecord>,
    /// Largest relative drift of each moment across the time grid; the
    /// moments are conserved, so this measures numerical error only.
    pub moment_drift: BTreeMap<usize, f64>,
}

/// Evaluates a validated specification over its time grid.
pub fn run_compute(spec: &ProblemSpec) -> Result<RunReport> {
    spec.validate()?;
    let instance = spec.realize()?;
    let n_max = *spec.orders.last().expect("validated non-empty");
    let depth = if spec.include_even_order_2 {
        n_max.max(2)
    } else {
        n_max
    };
    let xi0 = sqrt_embed(&instance.rho)?;

    let mut records = Vec::with_capacity(spec.times.len());
    for &time in &spec.times {
        let xi = xi0.evolve(&instance.h, time)?;
        let stack = derivative_stack(&xi, &instance.h, depth)?;
        let table = moment_table(&stack)?;
        let mut bound = bound_of_order_with(&table, n_max, spec.tolerances.degeneracy)?;
        let stat_h = stat_summary(&instance.h, &xi)?;

        let closed_form_mu = if depth >= 3 {
            Some(closed_form_moments(&xi, &instance.h)?)
        } else {
            None
        };

        let mut stat_t = None;
        let mut even_term_2 = None;
        let mut products = None;
        if let Some(t_est) = &instance.estimator {
            let st = stat_summary(t_est, &xi)?;
            products = Some(UncertaintyProducts {
                mixed: (st.variance + st.delta_sq) * (stat_h.variance - stat_h.delta_sq),
                symmetric_lhs: st.variance * stat_h.variance,
                symmetric_rhs: 0.25 + st.delta_sq * stat_h.delta_sq,
            });
            stat_t = Some(st);
            if spec.include_even_order_2 {
                even_term_2 = Some(estimator_term_even(t_est, &stack, 2)?);
            }
            // Conserved contraction of the first chain vector.
            let centered = crate::matcore::center_operator(t_est, stack.xi())?;
            let v1 = stack.vector(1).matrix();
            let tv = centered.matrix() * v1;
            bound.kappa = Some(real_trace_product(v1, &tv, "kappa")?);
        }

        let diagnostics = match &instance.pair {
            Some(pair) => Some(conjugation_diagnostics(pair, &stack)?),
            None => None,
        };

        records.push(TimeRecord {
            time,
            mu: table.mu_map().clone(),
            closed_form_mu,
            fisher_scalar: fisher_metric_scalar(&stack)?,
            stat_h,
            stat_t,
            bound,
            even_term_2,
            products,
            diagnostics,
        });
    }

    let mut moment_drift = BTreeMap::new();
    if let Some(first) = records.first() {
        for (&idx, &base) in &first.mu {
            let worst = records
                .iter()
                .map(|r| (r.mu[&idx] - base).abs())
                .fold(0.0, f64::max);
            moment_drift.insert(idx, worst / base.abs().max(1e-30));
        }
    }

    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        generator: format!("qcrb {}", env!("CARGO_PKG_VERSION")),
        spec: spec.clone(),
        records,
        moment_drift,
    })
}

/// Serializes a report as pretty JSON with a trailing newline.
pub fn report_to_json(report: &RunReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

fn sig(x: f64, precision: usize) -> String {
    format!("{:.*e}", precision.saturating_sub(1), x)
}

/// Flattens a report into one CSV row per time point.
///
/// Columns are fixed by the spec's orders; values absent at degenerate
/// orders stay empty. Numbers carry the spec's report precision.
pub fn report_to_csv(report: &RunReport) -> String {
    let p = report.spec.tolerances.report_precision;
    let n_max = *report.spec.orders.last().expect("validated non-empty");
    let odd: Vec<usize> = (1..=n_max).step_by(2).collect();
    let has_t = report.records.first().is_some_and(|r| r.stat_t.is_some());
    let has_even = report
        .records
        .first()
        .is_some_and(|r| r.even_term_2.is_some());

    let mut header: Vec<String> = vec!["time".into(), "fisher_scalar".into()];
    for n in 1..=n_max {
        header.push(format!("mu_{}", 2 * n));
    }
    for &n in &odd {
        header.push(format!("d_{}", 2 * n));
    }
    for &n in &odd {
        header.push(format!("n_{n}"));
    }
    for &n in &odd {
        header.push(format!("u_{n}"));
    }
    for &n in &odd {
        header.push(format!("term_{n}"));
    }
    header.push("cumulative_rhs".into());
    for field in ["mean_h", "var_h", "delta_sq_h", "wysi_h"] {
        header.push(field.into());
    }
    if has_t {
        for field in [
            "mean_t",
            "var_t",
            "delta_sq_t",
            "wysi_t",
            "product_mixed",
            "product_symmetric_lhs",
            "product_symmetric_rhs",
            "kappa",
        ] {
            header.push(field.into());
        }
    }
    if has_even {
        header.push("even_term_2".into());
    }

    let mut out = header.join(",");
    out.push('\n');
    for r in &report.records {
        let mut row: Vec<String> = vec![sig(r.time, p), sig(r.fisher_scalar, p)];
        for n in 1..=n_max {
            row.push(r.mu.get(&(2 * n)).map_or_else(String::new, |v| sig(*v, p)));
        }
        for &n in &odd {
            row.push(
                r.bound
                    .d_values
                    .get(&(2 * n))
                    .map_or_else(String::new, |v| sig(*v, p)),
            );
        }
        for &n in &odd {
            row.push(
                r.bound
                    .n_values
                    .get(&n)
                    .map_or_else(String::new, |v| sig(*v, p)),
            );
        }
        for &n in &odd {
            row.push(
                r.bound
                    .u_values
                    .get(&n)
                    .map_or_else(String::new, |v| sig(*v, p)),
            );
        }
        for &n in &odd {
            row.push(
                r.bound
                    .terms
                    .get(&n)
                    .map_or_else(String::new, |v| sig(*v, p)),
            );
        }
        row.push(sig(r.bound.cumulative_rhs, p));
        for v in [
            r.stat_h.mean,
            r.stat_h.variance,
            r.stat_h.delta_sq,
            r.stat_h.wysi,
        ] {
            row.push(sig(v, p));
        }
        if has_t {
            let st = r.stat_t.as_ref().expect("fixed columns");
            let pr = r.products.as_ref().expect("fixed columns");
            for v in [
                st.mean,
                st.variance,
                st.delta_sq,
                st.wysi,
                pr.mixed,
                pr.symmetric_lhs,
                pr.symmetric_rhs,
            ] {
                row.push(sig(v, p));
            }
            row.push(r.bound.kappa.map_or_else(String::new, |v| sig(v, p)));
        }
        if has_even {
            row.push(r.even_term_2.map_or_else(String::new, |v| sig(v, p)));
        }
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}
