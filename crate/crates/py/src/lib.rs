//! Python bindings: model parameters, Ising states, error probabilities,
//! Chernoff bounds, information metrics and optimal-field searches.

use ising_discrim::discrimination;
use ising_discrim::fermion;
use ising_discrim::linalg::SymmetricMatrix;
use ising_discrim::optimize::{self, Metric, ScalingRelation};
use ising_discrim::{spin, Backend, Beta, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_) | Error::SizeOutOfRange { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

trait IntoPyResult<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPyResult<T> for ising_discrim::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// `float("inf")` selects ground states.
fn beta_of(beta: f64) -> PyResult<Beta> {
    if beta == f64::INFINITY {
        return Ok(Beta::Infinite);
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(PyValueError::new_err(format!("beta must be > 0 or inf, got {beta}")));
    }
    Ok(Beta::Finite(beta))
}

fn beta_to_f64(beta: Beta) -> f64 {
    beta.finite().unwrap_or(f64::INFINITY)
}

fn backend_of(name: &str) -> PyResult<Backend> {
    name.parse().py()
}

/// Periodic chain `H = -J Σ σˣσˣ - h Σ σᶻ` at inverse temperature `beta`.
#[pyclass(name = "ModelParams", frozen)]
struct PyModelParams {
    inner: ising_discrim::ModelParams,
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (coupling, field, size, beta = f64::INFINITY))]
    fn new(coupling: f64, field: f64, size: usize, beta: f64) -> PyResult<Self> {
        Ok(Self { inner: ising_discrim::ModelParams::new(coupling, field, size, beta_of(beta)?).py()? })
    }

    #[getter]
    fn coupling(&self) -> f64 {
        self.inner.coupling()
    }

    #[getter]
    fn field(&self) -> f64 {
        self.inner.field()
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    #[getter]
    fn beta(&self) -> f64 {
        beta_to_f64(self.inner.beta())
    }

    fn __repr__(&self) -> String {
        format!("ModelParams(J={}, h={}, L={}, beta={})", self.coupling(), self.field(), self.size(), self.inner.beta())
    }
}

/// Real symmetric density matrix with its spectral decomposition.
#[pyclass(name = "DensityMatrix", frozen)]
struct PyDensityMatrix {
    inner: spin::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    /// Builds a density matrix from a nested list of rows.
    #[staticmethod]
    fn from_rows(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("density matrix must be square"));
        }
        for i in 0..n {
            for j in 0..i {
                if (rows[i][j] - rows[j][i]).abs() > 1e-12 * (1.0 + rows[i][j].abs()) {
                    return Err(PyValueError::new_err(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        let m = SymmetricMatrix::from_upper(n, |i, j| rows[i][j]);
        Ok(Self { inner: spin::DensityMatrix::from_matrix(m).py()? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn trace(&self) -> f64 {
        self.inner.trace()
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.weights()
    }

    fn is_pure(&self) -> bool {
        self.inner.is_pure()
    }

    fn to_rows(&self) -> Vec<Vec<f64>> {
        self.inner.entries().to_rows()
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dim={})", self.dim())
    }
}

/// Metric split into Boltzmann-weight and eigenstate-rotation parts.
#[pyclass(name = "MetricValue", frozen, get_all)]
struct PyMetricValue {
    classical: f64,
    nonclassical: f64,
    total: f64,
}

impl From<fermion::MetricValue> for PyMetricValue {
    fn from(m: fermion::MetricValue) -> Self {
        Self { classical: m.classical, nonclassical: m.nonclassical, total: m.total }
    }
}

#[pymethods]
impl PyMetricValue {
    fn __repr__(&self) -> String {
        format!("MetricValue(classical={}, nonclassical={}, total={})", self.classical, self.nonclassical, self.total)
    }
}

#[pyclass(name = "DiscriminationResult", frozen, get_all)]
struct PyDiscriminationResult {
    p_error: f64,
    qcb: f64,
    s_star: f64,
}

#[pymethods]
impl PyDiscriminationResult {
    fn __repr__(&self) -> String {
        format!("DiscriminationResult(p_error={}, qcb={}, s_star={})", self.p_error, self.qcb, self.s_star)
    }
}

#[pyclass(name = "FieldOptimum", frozen, get_all)]
struct PyFieldOptimum {
    field: f64,
    value: f64,
    evaluations: usize,
}

impl From<optimize::FieldOptimum> for PyFieldOptimum {
    fn from(o: optimize::FieldOptimum) -> Self {
        Self { field: o.field, value: o.value, evaluations: o.evaluations }
    }
}

#[pymethods]
impl PyFieldOptimum {
    fn __repr__(&self) -> String {
        format!("FieldOptimum(field={}, value={}, evaluations={})", self.field, self.value, self.evaluations)
    }
}

#[pyclass(name = "ScalingReport", frozen, get_all)]
struct PyScalingReport {
    relation: String,
    trials: usize,
    max_violation: f64,
    passed: bool,
}

#[pymethods]
impl PyScalingReport {
    fn __repr__(&self) -> String {
        format!(
            "ScalingReport(relation={}, trials={}, max_violation={:e}, passed={})",
            self.relation, self.trials, self.max_violation, self.passed
        )
    }
}

/// Ground state for `beta = inf`, Gibbs state otherwise.
#[pyfunction]
fn state(params: &PyModelParams) -> PyResult<PyDensityMatrix> {
    Ok(PyDensityMatrix { inner: spin::state(&params.inner).py()? })
}

/// Eigenvalues of the chain Hamiltonian in ascending order.
#[pyfunction]
fn spectrum(params: &PyModelParams) -> PyResult<Vec<f64>> {
    Ok(spin::spectrum(&params.inner).py()?.energies().to_vec())
}

/// Helstrom error for priors `prior` and `1 - prior`.
#[pyfunction]
#[pyo3(signature = (rho1, rho2, prior = 0.5))]
fn helstrom_error(rho1: &PyDensityMatrix, rho2: &PyDensityMatrix, prior: f64) -> PyResult<f64> {
    discrimination::helstrom_error(&rho1.inner, &rho2.inner, prior).py()
}

/// Quantum Chernoff bound with the equal-prior Helstrom error.
#[pyfunction]
fn qcb(rho1: &PyDensityMatrix, rho2: &PyDensityMatrix) -> PyResult<PyDiscriminationResult> {
    let r = discrimination::qcb(&rho1.inner, &rho2.inner).py()?;
    Ok(PyDiscriminationResult { p_error: r.p_error, qcb: r.qcb, s_star: r.s_star })
}

/// Equal-prior Helstrom error for `n` identical copies.
#[pyfunction]
fn n_copy_error(rho1: &PyDensityMatrix, rho2: &PyDensityMatrix, n: usize) -> PyResult<f64> {
    discrimination::n_copy_error(&rho1.inner, &rho2.inner, n).py()
}

/// Equal-prior error between couplings `j1` and `j2` at field `h`.
#[pyfunction]
#[pyo3(signature = (j1, j2, h, size, beta = f64::INFINITY, backend = "auto"))]
fn pair_error(j1: f64, j2: f64, h: f64, size: usize, beta: f64, backend: &str) -> PyResult<f64> {
    optimize::pair_error(j1, j2, h, size, beta_of(beta)?, backend_of(backend)?).py()
}

/// Ground-state overlap `|⟨ψ(J₁)|ψ(J₂)⟩|` from the free-fermion solution.
#[pyfunction]
fn ground_overlap(j1: f64, j2: f64, h: f64, size: usize) -> PyResult<f64> {
    fermion::ground_overlap(j1, j2, h, size).py()
}

/// QCB metric; the fermionic backend has no Bures counterpart.
#[pyfunction]
#[pyo3(signature = (coupling, h, size, beta = f64::INFINITY, backend = "auto"))]
fn qcb_metric(coupling: f64, h: f64, size: usize, beta: f64, backend: &str) -> PyResult<f64> {
    optimize::metric_value(coupling, h, size, beta_of(beta)?, backend_of(backend)?).py()
}

/// Dense QCB and Bures metrics, each split into classical and nonclassical parts.
#[pyfunction]
#[pyo3(signature = (coupling, h, size, beta = f64::INFINITY, step = None))]
fn metric_pair(coupling: f64, h: f64, size: usize, beta: f64, step: Option<f64>) -> PyResult<(PyMetricValue, PyMetricValue)> {
    let family = discrimination::IsingFamily::new(h, size, beta_of(beta)?);
    let p = discrimination::metric_pair(&family, coupling, step).py()?;
    Ok((p.qcb.into(), p.bures.into()))
}

/// Free-fermion metric at finite temperature.
#[pyfunction]
fn metric_thermal(coupling: f64, h: f64, beta: f64, size: usize) -> PyResult<PyMetricValue> {
    Ok(fermion::metric_thermal(coupling, h, beta, size).py()?.into())
}

/// Free-fermion ground-state metric.
#[pyfunction]
fn metric_zero_t(coupling: f64, h: f64, size: usize) -> PyResult<f64> {
    fermion::metric_zero_t(coupling, h, size).py()
}

/// Field `h ≥ 0` minimizing the error between `j1` and `j2`.
#[pyfunction]
#[pyo3(signature = (j1, j2, size, beta = f64::INFINITY, backend = "auto"))]
fn optimal_field_pe(j1: f64, j2: f64, size: usize, beta: f64, backend: &str) -> PyResult<PyFieldOptimum> {
    Ok(optimize::optimal_field_pe(j1, j2, size, beta_of(beta)?, backend_of(backend)?).py()?.into())
}

/// Field `h ≥ 0` maximizing the QCB (or Bures) metric at `coupling`.
#[pyfunction]
#[pyo3(signature = (coupling, size, beta = f64::INFINITY, backend = "auto", metric = "qcb"))]
fn optimal_field_metric(coupling: f64, size: usize, beta: f64, backend: &str, metric: &str) -> PyResult<PyFieldOptimum> {
    let kind: Metric = metric.parse().py()?;
    let beta = beta_of(beta)?;
    let backend = backend_of(backend)?;
    let opt = match kind {
        Metric::Qcb => optimize::optimal_field_metric(coupling, size, beta, backend),
        Metric::Bures => {
            let bracket = optimize::Bracket::new(0.0, 3.0 * coupling, optimize::FIELD_TOL * coupling).py()?;
            optimize::optimal_field_metric_in(kind, coupling, size, beta, backend, bracket)
        }
    };
    Ok(opt.py()?.into())
}

/// Ratio of the field-maximized QCB and Bures metrics.
#[pyfunction]
fn gamma_ratio_of_maxima(coupling: f64, size: usize, beta: f64) -> PyResult<f64> {
    optimize::gamma_ratio_of_maxima(coupling, size, beta_of(beta)?).py()
}

/// Checks a scaling relation (`SC1`, `SC3`, `SC4`, `SPECTRUM_HOMOGENEITY`) on seeded samples.
#[pyfunction]
#[pyo3(signature = (relation, trials = 50, seed = 7))]
fn verify_scaling(relation: &str, trials: usize, seed: u64) -> PyResult<PyScalingReport> {
    let relation: ScalingRelation = relation.parse().py()?;
    let r = optimize::verify_scaling(relation, trials, seed).py()?;
    Ok(PyScalingReport { relation: r.relation.name().into(), trials: r.trials, max_violation: r.max_violation, passed: r.pass })
}

#[pymodule]
fn ising_discrim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyMetricValue>()?;
    m.add_class::<PyDiscriminationResult>()?;
    m.add_class::<PyFieldOptimum>()?;
    m.add_class::<PyScalingReport>()?;
    m.add_function(wrap_pyfunction!(state, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(helstrom_error, m)?)?;
    m.add_function(wrap_pyfunction!(qcb, m)?)?;
    m.add_function(wrap_pyfunction!(n_copy_error, m)?)?;
    m.add_function(wrap_pyfunction!(pair_error, m)?)?;
    m.add_function(wrap_pyfunction!(ground_overlap, m)?)?;
    m.add_function(wrap_pyfunction!(qcb_metric, m)?)?;
    m.add_function(wrap_pyfunction!(metric_pair, m)?)?;
    m.add_function(wrap_pyfunction!(metric_thermal, m)?)?;
    m.add_function(wrap_pyfunction!(metric_zero_t, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_field_pe, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_field_metric, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_ratio_of_maxima, m)?)?;
    m.add_function(wrap_pyfunction!(verify_scaling, m)?)?;
    Ok(())
}
