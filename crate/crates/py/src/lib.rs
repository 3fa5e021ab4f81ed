//! Python bindings: the library's types and operations under `import qcrb`.
//!
//! Matrices cross the boundary as nested lists of Python complex numbers;
//! reports cross as plain dicts, mirroring the JSON the CLI writes.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyNone, PyString};

use qcrb_core::matcore::{CMat, ComplexMatrix};
use qcrb_core::problem::parse_spec;
use qcrb_core::report::{report_to_json, run_compute};
use qcrb_core::states::sqrt_embed;
use qcrb_core::statmoments::derivative_stack;
use qcrb_core::{bounds, oracle, states, statmoments, verify};

fn err(e: qcrb_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rows_to_matrix(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_nested(&rows).map_err(err)
}

fn matrix_to_rows(m: &CMat) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        serde_json::Value::Null => PyNone::get(py).to_owned().into_any(),
        serde_json::Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.into_any()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any()
            }
        }
        serde_json::Value::String(s) => PyString::new(py, s).into_any(),
        serde_json::Value::Array(xs) => {
            let list = PyList::empty(py);
            for x in xs {
                list.append(json_to_py(py, x)?)?;
            }
            list.into_any()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, x) in map {
                dict.set_item(k, json_to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize_to_py<'py, T: serde::Serialize>(
    py: Python<'py>,
    v: &T,
) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &value)
}

/// Density matrix: Hermitian, positive semidefinite, unit trace.
#[pyclass(frozen, name = "DensityMatrix")]
struct PyDensityMatrix {
    inner: states::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    /// Builds from nested `[re+im*1j]` rows; validates shape and positivity.
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let inner = states::make_density(rows_to_matrix(rows)?).map_err(err)?;
        Ok(PyDensityMatrix { inner })
    }

    /// Full-rank mixed state from the normalized Ginibre ensemble.
    #[staticmethod]
    fn ginibre(dim: usize, seed: u64) -> PyResult<Self> {
        Ok(PyDensityMatrix {
            inner: states::random_mixed(dim, seed).map_err(err)?,
        })
    }

    /// Haar-random pure state.
    #[staticmethod]
    fn pure_haar(dim: usize, seed: u64) -> PyResult<Self> {
        Ok(PyDensityMatrix {
            inner: states::random_pure(dim, seed).map_err(err)?,
        })
    }

    /// Diagonal state from weights summing to one.
    #[staticmethod]
    fn diagonal(weights: Vec<f64>) -> PyResult<Self> {
        Ok(PyDensityMatrix {
            inner: states::diagonal_density(&weights).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn purity(&self) -> f64 {
        self.inner.purity()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(self.inner.matrix())
    }

    /// Conjugates by `exp(-i h t)`.
    fn evolve(&self, h: &PyHermitianOperator, t: f64) -> PyResult<Self> {
        Ok(PyDensityMatrix {
            inner: self.inner.evolve(&h.inner, t).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "DensityMatrix(dim={}, purity={:.6})",
            self.inner.dim(),
            self.inner.purity()
        )
    }
}

/// Hermitian operator, certified at construction.
#[pyclass(frozen, name = "HermitianOperator")]
struct PyHermitianOperator {
    inner: qcrb_core::matcore::HermitianOperator,
}

#[pymethods]
impl PyHermitianOperator {
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let inner =
            qcrb_core::matcore::HermitianOperator::new(rows_to_matrix(rows)?).map_err(err)?;
        Ok(PyHermitianOperator { inner })
    }

    /// Gaussian unitary ensemble draw with unit spectral norm.
    #[staticmethod]
    fn gue(dim: usize, seed: u64) -> PyResult<Self> {
        Ok(PyHermitianOperator {
            inner: states::random_hamiltonian(dim, seed).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(self.inner.matrix())
    }

    fn __repr__(&self) -> String {
        format!("HermitianOperator(dim={})", self.inner.dim())
    }
}

/// Truncated oscillator pair: momentum generator and position estimator.
#[pyclass(frozen, name = "ConjugatePair")]
struct PyConjugatePair {
    inner: states::ConjugatePair,
}

#[pymethods]
impl PyConjugatePair {
    /// Builds the pair at the given truncation dimension (at least 8).
    #[staticmethod]
    fn truncated(dim: usize) -> PyResult<Self> {
        Ok(PyConjugatePair {
            inner: states::truncated_conjugate_pair(dim).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn h(&self) -> PyHermitianOperator {
        PyHermitianOperator {
            inner: self.inner.h().clone(),
        }
    }

    #[getter]
    fn t_est(&self) -> PyHermitianOperator {
        PyHermitianOperator {
            inner: self.inner.t_est().clone(),
        }
    }

    #[getter]
    fn boundary_band(&self) -> usize {
        self.inner.boundary_band()
    }

    /// Largest entry of `i [h, t_est] - I`; confined to the truncation corner.
    #[getter]
    fn defect_norm(&self) -> f64 {
        self.inner
            .defect()
            .matrix()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn __repr__(&self) -> String {
        format!("ConjugatePair(dim={})", self.inner.dim())
    }
}

/// Mean, variance, second-kind covariance and skew information of `x` in `rho`.
#[pyfunction]
fn stat_summary<'py>(
    py: Python<'py>,
    x: &PyHermitianOperator,
    rho: &PyDensityMatrix,
) -> PyResult<Bound<'py, PyAny>> {
    let xi = sqrt_embed(&rho.inner).map_err(err)?;
    let s = statmoments::stat_summary(&x.inner, &xi).map_err(err)?;
    serialize_to_py(py, &s)
}

/// Even chain moments `mu_2 .. mu_{2 n_max}` as a dict keyed by index.
#[pyfunction]
fn moments<'py>(
    py: Python<'py>,
    rho: &PyDensityMatrix,
    h: &PyHermitianOperator,
    n_max: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let xi = sqrt_embed(&rho.inner).map_err(err)?;
    let stack = derivative_stack(&xi, &h.inner, n_max).map_err(err)?;
    let table = statmoments::moment_table(&stack).map_err(err)?;
    let dict = PyDict::new(py);
    for (&k, &v) in table.mu_map() {
        dict.set_item(k, v)?;
    }
    Ok(dict.into_any())
}

/// `(mu_2, mu_4, mu_6)` from the closed-form trace polynomials.
#[pyfunction]
fn closed_form_moments(
    rho: &PyDensityMatrix,
    h: &PyHermitianOperator,
) -> PyResult<(f64, f64, f64)> {
    let xi = sqrt_embed(&rho.inner).map_err(err)?;
    let m = statmoments::closed_form_moments(&xi, &h.inner).map_err(err)?;
    Ok((m[0], m[1], m[2]))
}

/// Cumulative uncertainty-product bound through odd order `n_max`.
#[pyfunction]
#[pyo3(signature = (rho, h, n_max, degeneracy=1e-10))]
fn bound_report<'py>(
    py: Python<'py>,
    rho: &PyDensityMatrix,
    h: &PyHermitianOperator,
    n_max: usize,
    degeneracy: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let xi = sqrt_embed(&rho.inner).map_err(err)?;
    let stack = derivative_stack(&xi, &h.inner, n_max).map_err(err)?;
    let table = statmoments::moment_table(&stack).map_err(err)?;
    let report = bounds::bound_of_order_with(&table, n_max, degeneracy).map_err(err)?;
    serialize_to_py(py, &report)
}

/// Projection sum of the estimator gradient over orthogonalized chain orders.
#[pyfunction]
fn direct_bhattacharyya(
    rho: &PyDensityMatrix,
    h: &PyHermitianOperator,
    t_est: &PyHermitianOperator,
    orders: Vec<usize>,
) -> PyResult<f64> {
    let xi = sqrt_embed(&rho.inner).map_err(err)?;
    let depth = orders.iter().copied().max().unwrap_or(1).max(1);
    let stack = derivative_stack(&xi, &h.inner, depth).map_err(err)?;
    let system = oracle::orthogonal_system(&stack).map_err(err)?;
    oracle::direct_bhattacharyya(&system, &t_est.inner, &orders).map_err(err)
}

/// Least-squares distance from the estimator gradient to the chain span.
#[pyfunction]
fn min_variance(
    rho: &PyDensityMatrix,
    h: &PyHermitianOperator,
    t_est: &PyHermitianOperator,
    orders: Vec<usize>,
) -> PyResult<f64> {
    let xi = sqrt_embed(&rho.inner).map_err(err)?;
    let depth = orders.iter().copied().max().unwrap_or(1).max(1);
    let stack = derivative_stack(&xi, &h.inner, depth).map_err(err)?;
    let system = oracle::orthogonal_system(&stack).map_err(err)?;
    oracle::min_variance_oracle(&system, &stack, &t_est.inner, &orders).map_err(err)
}

/// Mixed and symmetric second-kind uncertainty products.
#[pyfunction]
fn uncertainty_products<'py>(
    py: Python<'py>,
    rho: &PyDensityMatrix,
    h: &PyHermitianOperator,
    t_est: &PyHermitianOperator,
) -> PyResult<Bound<'py, PyAny>> {
    let p = bounds::uncertainty_products(&rho.inner, &h.inner, &t_est.inner).map_err(err)?;
    serialize_to_py(py, &p)
}

/// Whether the state keeps the truncation boundary unpopulated.
#[pyfunction]
fn boundary_safe(rho: &PyDensityMatrix, pair: &PyConjugatePair, eps: f64) -> PyResult<bool> {
    if rho.inner.dim() != pair.inner.dim() {
        return Err(PyValueError::new_err(format!(
            "dimension mismatch: state {} vs pair {}",
            rho.inner.dim(),
            pair.inner.dim()
        )));
    }
    Ok(states::boundary_safe(&rho.inner, &pair.inner, eps))
}

/// Runs a problem document through the same pipeline as the CLI and returns
/// the JSON report text.
#[pyfunction]
fn compute_json(spec_json: &str) -> PyResult<String> {
    let spec = parse_spec(spec_json).map_err(err)?;
    let report = run_compute(&spec).map_err(err)?;
    report_to_json(&report).map_err(err)
}

/// Runs the self-verification suite; returns one dict per property.
#[pyfunction]
#[pyo3(signature = (seed=7, samples=40, tolerance_scale=1.0, dims=None))]
fn run_verify<'py>(
    py: Python<'py>,
    seed: u64,
    samples: usize,
    tolerance_scale: f64,
    dims: Option<Vec<usize>>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = verify::VerifyConfig {
        seed,
        samples,
        tolerance_scale,
        dims: dims.unwrap_or_else(|| (2..=8).collect()),
    };
    let outcomes = verify::run_verify(&cfg).map_err(err)?;
    serialize_to_py(py, &outcomes)
}

#[pymodule]
fn qcrb(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyHermitianOperator>()?;
    m.add_class::<PyConjugatePair>()?;
    m.add_function(wrap_pyfunction!(stat_summary, m)?)?;
    m.add_function(wrap_pyfunction!(moments, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_moments, m)?)?;
    m.add_function(wrap_pyfunction!(bound_report, m)?)?;
    m.add_function(wrap_pyfunction!(direct_bhattacharyya, m)?)?;
    m.add_function(wrap_pyfunction!(min_variance, m)?)?;
    m.add_function(wrap_pyfunction!(uncertainty_products, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_safe, m)?)?;
    m.add_function(wrap_pyfunction!(compute_json, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
