//! Problem specifications: the JSON schema describing one estimation setup.
//!
//! A specification names a dimension, a generator, a state, optionally an
//! estimator, and the evaluation times and chain orders. Unknown fields are
//! rejected rather than ignored, and every schema error carries the JSON
//! path that caused it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{CMat, ComplexMatrix, HermitianOperator, C64};
use crate::states::{
    diagonal_density, make_density, random_hamiltonian, random_mixed, random_pure,
    truncated_conjugate_pair, ConjugatePair, DensityMatrix,
};
use crate::tol;

pub const SCHEMA_VERSION: u32 = 1;

/// Matrix entries as `[re, im]` pairs, row major.
pub type MatrixData = Vec<Vec<(f64, f64)>>;

/// Converts raw matrix data to a validated complex matrix.
pub fn data_to_matrix(data: &MatrixData) -> Result<ComplexMatrix> {
    let rows = data.len();
    for row in data {
        if row.len() != rows {
            return Err(Error::NotSquare {
                rows,
                cols: row.len(),
            });
        }
    }
    let mut m = CMat::zeros(rows, rows);
    for (i, row) in data.iter().enumerate() {
        for (j, &(re, im)) in row.iter().enumerate() {
            m[(i, j)] = C64::new(re, im);
        }
    }
    ComplexMatrix::new(m)
}

/// Serializes a complex matrix back into `[re, im]` rows.
pub fn matrix_to_data(m: &CMat) -> MatrixData {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| (m[(i, j)].re, m[(i, j)].im))
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExplicitMatrix {
    pub matrix: MatrixData,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SeedOnly {
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WeightList {
    pub weights: Vec<f64>,
}

/// Generator of the evolution.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianSpec {
    /// Hermitian matrix given entrywise.
    Explicit(ExplicitMatrix),
    /// Gaussian unitary ensemble draw, rescaled to unit spectral norm.
    Gue(SeedOnly),
    /// Truncated oscillator momentum; pairs with the `conjugate` estimator.
    Oscillator,
}

/// Initial state.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum StateSpec {
    /// Density matrix given entrywise.
    Explicit(ExplicitMatrix),
    /// Normalized Ginibre draw: full-rank mixed state.
    Ginibre(SeedOnly),
    /// Diagonal state with the given weights.
    Diagonal(WeightList),
    /// Haar-random pure state.
    PureHaar(SeedOnly),
}

/// Time estimator attached to the problem.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorSpec {
    /// Hermitian observable given entrywise.
    Explicit(ExplicitMatrix),
    /// Truncated oscillator position; requires the oscillator generator.
    Conjugate,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative threshold below which a Gram determinant counts as zero.
    pub degeneracy: f64,
    /// Significant digits written to reports.
    pub report_precision: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            degeneracy: tol::GRAM_DEGENERACY_REL,
            report_precision: 12,
        }
    }
}

fn default_times() -> Vec<f64> {
    vec![0.0]
}

fn default_orders() -> Vec<usize> {
    vec![1, 3]
}

/// One estimation problem, as read from disk.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub schema_version: u32,
    pub dimension: usize,
    pub hamiltonian: HamiltonianSpec,
    pub state: StateSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorSpec>,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    /// Odd chain orders to evaluate, ascending.
    #[serde(default = "default_orders")]
    pub orders: Vec<usize>,
    /// Also evaluate the estimator-dependent even term of order two.
    #[serde(default)]
    pub include_even_order_2: bool,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn schema_err(path: &str, reason: impl Into<String>) -> Error {
    Error::Schema {
        path: path.to_string(),
        reason: reason.into(),
    }
}

/// Parses and validates a specification from JSON text.
pub fn parse_spec(json: &str) -> Result<ProblemSpec> {
    let mut de = serde_json::Deserializer::from_str(json);
    let spec: ProblemSpec =
        serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Schema {
            path: e.path().to_string(),
            reason: e.inner().to_string(),
        })?;
    spec.validate()?;
    Ok(spec)
}

impl ProblemSpec {
    /// Structural validation beyond what deserialization enforces.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(schema_err(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, found {}", self.schema_version),
            ));
        }
        if self.dimension < 2 {
            return Err(schema_err("dimension", "must be at least 2"));
        }
        let oscillator = matches!(self.hamiltonian, HamiltonianSpec::Oscillator);
        if oscillator && self.dimension < 8 {
            return Err(schema_err(
                "hamiltonian",
                "oscillator truncation needs dimension at least 8",
            ));
        }
        if let HamiltonianSpec::Explicit(m) = &self.hamiltonian {
            check_matrix_shape("hamiltonian.explicit.matrix", &m.matrix, self.dimension)?;
        }
        match &self.state {
            StateSpec::Explicit(m) => {
                check_matrix_shape("state.explicit.matrix", &m.matrix, self.dimension)?;
            }
            StateSpec::Diagonal(w) => {
                if w.weights.len() != self.dimension {
                    return Err(schema_err(
                        "state.diagonal.weights",
                        format!(
                            "expected {} weights, found {}",
                            self.dimension,
                            w.weights.len()
                        ),
                    ));
                }
                let mut sum = 0.0;
                for (i, &w) in w.weights.iter().enumerate() {
                    if !w.is_finite() || w < 0.0 {
                        return Err(schema_err(
                            &format!("state.diagonal.weights[{i}]"),
                            "weights must be finite and nonnegative",
                        ));
                    }
                    sum += w;
                }
                if (sum - 1.0).abs() > tol::WEIGHT_NORMALIZE {
                    return Err(schema_err(
                        "state.diagonal.weights",
                        format!("weights sum to {sum}, expected 1"),
                    ));
                }
            }
            StateSpec::Ginibre(_) | StateSpec::PureHaar(_) => {}
        }
        match &self.estimator {
            Some(EstimatorSpec::Explicit(m)) => {
                check_matrix_shape("estimator.explicit.matrix", &m.matrix, self.dimension)?;
            }
            Some(EstimatorSpec::Conjugate) if !oscillator => {
                return Err(schema_err(
                    "estimator",
                    "the conjugate estimator requires the oscillator hamiltonian",
                ));
            }
            _ => {}
        }
        if self.times.is_empty() {
            return Err(schema_err("times", "at least one time is required"));
        }
        for (i, t) in self.times.iter().enumerate() {
            if !t.is_finite() {
                return Err(schema_err(&format!("times[{i}]"), "must be finite"));
            }
        }
        if self.orders.is_empty() {
            return Err(schema_err("orders", "at least one order is required"));
        }
        for (i, &n) in self.orders.iter().enumerate() {
            if n == 0 || n % 2 == 0 {
                return Err(schema_err(
                    &format!("orders[{i}]"),
                    "chain orders are odd; the order-2 term has its own flag",
                ));
            }
            if i > 0 && n <= self.orders[i - 1] {
                return Err(schema_err(
                    &format!("orders[{i}]"),
                    "orders must be strictly ascending",
                ));
            }
        }
        if !(self.tolerances.degeneracy.is_finite() && self.tolerances.degeneracy > 0.0) {
            return Err(schema_err(
                "tolerances.degeneracy",
                "must be finite and positive",
            ));
        }
        if self.tolerances.report_precision < 1 || self.tolerances.report_precision > 17 {
            return Err(schema_err(
                "tolerances.report_precision",
                "must lie between 1 and 17",
            ));
        }
        Ok(())
    }

    /// Builds the concrete matrices the specification describes.
    pub fn realize(&self) -> Result<ProblemInstance> {
        let pair = if matches!(self.hamiltonian, HamiltonianSpec::Oscillator) {
            Some(truncated_conjugate_pair(self.dimension)?)
        } else {
            None
        };
        let h = match &self.hamiltonian {
            HamiltonianSpec::Explicit(m) => HermitianOperator::new(data_to_matrix(&m.matrix)?)?,
            HamiltonianSpec::Gue(s) => random_hamiltonian(self.dimension, s.seed)?,
            HamiltonianSpec::Oscillator => pair.as_ref().expect("pair built above").h().clone(),
        };
        let rho = match &self.state {
            StateSpec::Explicit(m) => make_density(data_to_matrix(&m.matrix)?)?,
            StateSpec::Ginibre(s) => random_mixed(self.dimension, s.seed)?,
            StateSpec::Diagonal(w) => diagonal_density(&w.weights)?,
            StateSpec::PureHaar(s) => random_pure(self.dimension, s.seed)?,
        };
        let estimator = match &self.estimator {
            Some(EstimatorSpec::Explicit(m)) => {
                Some(HermitianOperator::new(data_to_matrix(&m.matrix)?)?)
            }
            Some(EstimatorSpec::Conjugate) => {
                Some(pair.as_ref().expect("validated").t_est().clone())
            }
            None => None,
        };
        Ok(ProblemInstance {
            rho,
            h,
            estimator,
            pair,
        })
    }
}

fn check_matrix_shape(path: &str, data: &MatrixData, dim: usize) -> Result<()> {
    if data.len() != dim {
        return Err(schema_err(
            path,
            format!("expected {dim} rows, found {}", data.len()),
        ));
    }
    for (i, row) in data.iter().enumerate() {
        if row.len() != dim {
            return Err(schema_err(
                &format!("{path}[{i}]"),
                format!("expected {dim} entries, found {}", row.len()),
            ));
        }
    }
    Ok(())
}

/// Concrete matrices realized from a specification.
pub struct ProblemInstance {
    pub rho: DensityMatrix,
    pub h: HermitianOperator,
    pub estimator: Option<HermitianOperator>,
    /// Present exactly when the generator is the truncated oscillator.
    pub pair: Option<ConjugatePair>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> String {
        r#"{
            "schema_version": 1,
            "dimension": 2,
            "hamiltonian": {"explicit": {"matrix": [[[0.0,0.0],[0.5,0.0]],[[0.5,0.0],[0.0,0.0]]]}},
            "state": {"diagonal": {"weights": [0.75, 0.25]}}
        }"#
        .to_string()
    }

    #[test]
    fn minimal_spec_parses_with_defaults() {
        let spec = parse_spec(&minimal_json()).unwrap();
        assert_eq!(spec.times, vec![0.0]);
        assert_eq!(spec.orders, vec![1, 3]);
        assert!(!spec.include_even_order_2);
        assert_eq!(spec.tolerances, Tolerances::default());
        let inst = spec.realize().unwrap();
        assert_eq!(inst.rho.dim(), 2);
        assert!(inst.pair.is_none());
        assert!(inst.estimator.is_none());
    }

    #[test]
    fn round_trip_preserves_spec() {
        let spec = parse_spec(&minimal_json()).unwrap();
        let json = serde_json::to_string_pretty(&spec).unwrap();
        let back = parse_spec(&json).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn unknown_field_is_rejected_with_path() {
        let json = minimal_json().replace(
            "\"dimension\": 2,",
            "\"dimension\": 2, \"extra_knob\": true,",
        );
        match parse_spec(&json) {
            Err(Error::Schema { reason, .. }) => {
                assert!(reason.contains("extra_knob"), "reason was: {reason}");
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn nested_unknown_field_carries_path() {
        let json = minimal_json().replace(
            "{\"weights\": [0.75, 0.25]}",
            "{\"weights\": [0.75, 0.25], \"label\": \"x\"}",
        );
        match parse_spec(&json) {
            Err(Error::Schema { path, .. }) => {
                assert!(path.contains("state"), "path was: {path}");
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn even_orders_are_rejected() {
        let json = minimal_json().replace("\"state\"", "\"orders\": [1, 2], \"state\"");
        match parse_spec(&json) {
            Err(Error::Schema { path, reason }) => {
                assert_eq!(path, "orders[1]");
                assert!(reason.contains("odd"));
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn conjugate_estimator_needs_oscillator() {
        let json = minimal_json().replace("\"state\"", "\"estimator\": \"conjugate\", \"state\"");
        match parse_spec(&json) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "estimator"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn oscillator_spec_realizes_the_pair() {
        let json = r#"{
            "schema_version": 1,
            "dimension": 16,
            "hamiltonian": "oscillator",
            "state": {"ginibre": {"seed": 5}},
            "estimator": "conjugate",
            "orders": [1, 3, 5]
        }"#;
        let spec = parse_spec(json).unwrap();
        let inst = spec.realize().unwrap();
        let pair = inst.pair.expect("oscillator pair");
        assert_eq!(pair.dim(), 16);
        let est = inst.estimator.expect("conjugate estimator");
        assert_eq!(est.matrix(), pair.t_est().matrix());
    }

    #[test]
    fn weight_sum_must_be_normalized() {
        let json = minimal_json().replace("[0.75, 0.25]", "[0.75, 0.35]");
        match parse_spec(&json) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "state.diagonal.weights"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn explicit_shapes_are_checked() {
        let json = minimal_json().replace("\"dimension\": 2", "\"dimension\": 3");
        match parse_spec(&json) {
            Err(Error::Schema { path, .. }) => {
                assert_eq!(path, "hamiltonian.explicit.matrix");
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn matrix_data_round_trips() {
        let m = data_to_matrix(&vec![
            vec![(0.0, 0.0), (0.5, -0.25)],
            vec![(0.5, 0.25), (1.0, 0.0)],
        ])
        .unwrap();
        let data = matrix_to_data(m.matrix());
        assert_eq!(data[1][0], (0.5, 0.25));
        assert_eq!(data[0][1], (0.5, -0.25));
    }
}
