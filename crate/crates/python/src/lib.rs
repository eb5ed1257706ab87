//! Python bindings. States cross the boundary as nested lists of complex
//! numbers; result records come back as dicts.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use ssa::examples::{self, Example3Params};
use ssa::qcorr::{self, OptimizerConfig};
use ssa::qmat::{self, io, CMatrix, CVector};
use ssa::structure;

create_exception!(ssa_lab, CapabilityError, PyRuntimeError, "Request outside what the numerics support.");

fn to_py(e: ssa::Error) -> PyErr {
    match e {
        ssa::Error::Capability(m) => CapabilityError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn record<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn optimizer(restarts: usize, max_evals: usize, seed: u64, tol: f64) -> OptimizerConfig {
    OptimizerConfig {
        restarts,
        max_evals,
        seed,
        value_tol: tol,
        ..Default::default()
    }
}

#[pyclass(name = "DensityMatrix", module = "ssa_lab", from_py_object)]
#[derive(Clone)]
pub struct PyDensity(qmat::DensityMatrix);

#[pymethods]
impl PyDensity {
    #[new]
    fn new(matrix: Vec<Vec<Complex64>>, dims: Vec<usize>) -> PyResult<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        let m = CMatrix::from_fn(n, n, |i, j| matrix[i][j]);
        qmat::DensityMatrix::new(m, &dims).map(PyDensity).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyDensity(io::parse_state(text).map_err(to_py)?.into_density()))
    }

    #[staticmethod]
    fn maximally_mixed(dims: Vec<usize>) -> PyResult<Self> {
        qmat::DensityMatrix::maximally_mixed(&dims).map(PyDensity).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (dims, rank, seed))]
    fn random(dims: Vec<usize>, rank: usize, seed: u64) -> PyResult<Self> {
        qmat::random_density(&dims, rank, seed).map(PyDensity).map_err(to_py)
    }

    fn to_json(&self) -> String {
        io::density_to_json(&self.0)
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.0.dims().to_vec()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        let m = self.0.matrix();
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.0.eigenvalues()
    }

    fn partial_trace(&self, keep: Vec<usize>) -> PyResult<Self> {
        self.0.partial_trace(&keep).map(PyDensity).map_err(to_py)
    }

    fn entropy(&self) -> f64 {
        ssa::entropy::von_neumann_entropy(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dims={:?})", self.0.dims())
    }
}

#[pyclass(name = "PureState", module = "ssa_lab", from_py_object)]
#[derive(Clone)]
pub struct PyPure(qmat::PureStateVector);

#[pymethods]
impl PyPure {
    #[new]
    fn new(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> PyResult<Self> {
        qmat::PureStateVector::new(CVector::from_vec(amplitudes), &dims)
            .map(PyPure)
            .map_err(to_py)
    }

    #[staticmethod]
    fn random(dims: Vec<usize>, seed: u64) -> PyResult<Self> {
        qmat::random_pure(&dims, seed).map(PyPure).map_err(to_py)
    }

    fn to_json(&self) -> String {
        io::pure_to_json(&self.0)
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.0.dims().to_vec()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().iter().copied().collect()
    }

    fn density(&self) -> PyDensity {
        PyDensity(self.0.density())
    }

    fn reduced(&self, keep: Vec<usize>) -> PyResult<PyDensity> {
        self.0.reduced(&keep).map(PyDensity).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("PureState(dims={:?})", self.0.dims())
    }
}

#[pyclass(name = "SaturatingSpec", module = "ssa_lab", from_py_object)]
#[derive(Clone)]
pub struct PySpec(structure::SaturatingSpec);

#[pymethods]
impl PySpec {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        structure::SaturatingSpec::from_json(text).map(PySpec).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn dims(&self) -> [usize; 3] {
        self.0.dims()
    }

    #[getter]
    fn orthogonal(&self) -> bool {
        self.0.orthogonal
    }

    fn __len__(&self) -> usize {
        self.0.blocks.len()
    }

    fn build(&self) -> PyResult<PyDensity> {
        structure::build_saturating(&self.0).map(PyDensity).map_err(to_py)
    }

    /// Structured purification; returns `(state, d_E)`.
    fn purify(&self) -> PyResult<(PyPure, usize)> {
        let p = ssa::purify::purify_saturating(&self.0).map_err(to_py)?;
        Ok((PyPure(p.psi), p.d_e))
    }
}

#[pyfunction]
fn von_neumann_entropy(rho: &PyDensity) -> f64 {
    ssa::entropy::von_neumann_entropy(&rho.0)
}

#[pyfunction]
fn mutual_information(rho: &PyDensity) -> PyResult<f64> {
    ssa::entropy::mutual_information(&rho.0).map_err(to_py)
}

#[pyfunction]
fn conditional_entropy(rho: &PyDensity, conditioned_on: usize) -> PyResult<f64> {
    ssa::entropy::conditional_entropy(&rho.0, conditioned_on).map_err(to_py)
}

#[pyfunction]
fn t_gap(py: Python<'_>, rho: &PyDensity) -> PyResult<Py<PyAny>> {
    record(py, &ssa::entropy::t_gap(&rho.0).map_err(to_py)?)
}

/// Canonical purification; returns `(state, d_E)`.
#[pyfunction]
fn purify(rho: &PyDensity) -> PyResult<(PyPure, usize)> {
    let p = ssa::purify::purify(&rho.0).map_err(to_py)?;
    Ok((PyPure(p.psi), p.d_e))
}

/// `(ρ_AB̃, ρ_AC̃)` through the canonical purification.
#[pyfunction]
fn extend(rho: &PyDensity) -> PyResult<(PyDensity, PyDensity)> {
    let e = ssa::purify::extend(&rho.0).map_err(to_py)?;
    Ok((PyDensity(e.rho_a_btilde), PyDensity(e.rho_a_ctilde)))
}

#[pyfunction]
#[pyo3(signature = (rho, measured = 1, restarts = 20, max_evals = 2000, seed = 0, tol = 1e-10))]
fn discord(
    py: Python<'_>,
    rho: &PyDensity,
    measured: usize,
    restarts: usize,
    max_evals: usize,
    seed: u64,
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let cfg = optimizer(restarts, max_evals, seed, tol);
    let r = py.detach(|| qcorr::discord(&rho.0, measured, &cfg)).map_err(to_py)?;
    record(py, &r)
}

#[pyfunction]
fn concurrence(rho: &PyDensity) -> PyResult<f64> {
    qcorr::concurrence(&rho.0).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (rho, restarts = 20, max_evals = 2000, seed = 0, tol = 1e-10))]
fn eof(py: Python<'_>, rho: &PyDensity, restarts: usize, max_evals: usize, seed: u64, tol: f64) -> PyResult<Py<PyAny>> {
    let cfg = optimizer(restarts, max_evals, seed, tol);
    let r = py.detach(|| qcorr::eof(&rho.0, &cfg)).map_err(to_py)?;
    record(py, &r)
}

#[pyfunction]
#[pyo3(signature = (rho, restarts = 20, max_evals = 2000, seed = 0, tol = 1e-10))]
fn kw_gap(py: Python<'_>, rho: &PyDensity, restarts: usize, max_evals: usize, seed: u64, tol: f64) -> PyResult<Py<PyAny>> {
    let cfg = optimizer(restarts, max_evals, seed, tol);
    let r = py.detach(|| qcorr::kw_gap(&rho.0, &cfg)).map_err(to_py)?;
    record(py, &r)
}

#[pyfunction]
#[pyo3(signature = (rho, restarts = 20, max_evals = 2000, seed = 0, tol = 1e-10))]
fn theorem1_audit(
    py: Python<'_>,
    rho: &PyDensity,
    restarts: usize,
    max_evals: usize,
    seed: u64,
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let cfg = optimizer(restarts, max_evals, seed, tol);
    let r = py.detach(|| qcorr::theorem1_audit(&rho.0, &cfg)).map_err(to_py)?;
    record(py, &r)
}

#[pyfunction]
#[pyo3(signature = (rho, spec, tol = 1e-8))]
fn certify(py: Python<'_>, rho: &PyDensity, spec: &PySpec, tol: f64) -> PyResult<Py<PyAny>> {
    record(py, &structure::certify(&rho.0, &spec.0, tol))
}

fn params(p1: f64, alpha1: f64, beta2: f64, b: f64, lambda1: f64, lambda2: f64) -> Example3Params {
    Example3Params { p1, alpha1, beta2, b, lambda1, lambda2 }
}

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[pyfunction]
#[pyo3(signature = (p1 = 0.5, alpha1 = H, beta2 = 0.5, b = H, lambda1 = 0.5, lambda2 = 0.5))]
fn example3_state(p1: f64, alpha1: f64, beta2: f64, b: f64, lambda1: f64, lambda2: f64) -> PyResult<PyDensity> {
    examples::example3_state(&params(p1, alpha1, beta2, b, lambda1, lambda2))
        .map(PyDensity)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (p1 = 0.5, alpha1 = H, beta2 = 0.5, b = H, lambda1 = 0.5, lambda2 = 0.5))]
fn example3_spec(p1: f64, alpha1: f64, beta2: f64, b: f64, lambda1: f64, lambda2: f64) -> PyResult<PySpec> {
    examples::example3_spec(&params(p1, alpha1, beta2, b, lambda1, lambda2))
        .map(PySpec)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (p1 = 0.5, alpha1 = H, beta2 = 0.5, b = H, lambda1 = 0.5, lambda2 = 0.5))]
fn example3_t_closed_form(p1: f64, alpha1: f64, beta2: f64, b: f64, lambda1: f64, lambda2: f64) -> PyResult<f64> {
    examples::example3_t_closed_form(&params(p1, alpha1, beta2, b, lambda1, lambda2)).map_err(to_py)
}

/// CSV of one published surface, `'a'` or `'b'`.
#[pyfunction]
#[pyo3(signature = (figure, steps = 64))]
fn figure_sweep(py: Python<'_>, figure: char, steps: usize) -> PyResult<String> {
    let g = py.detach(|| examples::figure_sweep(figure, steps)).map_err(to_py)?;
    Ok(g.to_csv())
}

#[pymodule]
fn ssa_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CapabilityError", m.py().get_type::<CapabilityError>())?;
    m.add_class::<PyDensity>()?;
    m.add_class::<PyPure>()?;
    m.add_class::<PySpec>()?;
    m.add_function(wrap_pyfunction!(von_neumann_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(t_gap, m)?)?;
    m.add_function(wrap_pyfunction!(purify, m)?)?;
    m.add_function(wrap_pyfunction!(extend, m)?)?;
    m.add_function(wrap_pyfunction!(discord, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(eof, m)?)?;
    m.add_function(wrap_pyfunction!(kw_gap, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_audit, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(example3_state, m)?)?;
    m.add_function(wrap_pyfunction!(example3_spec, m)?)?;
    m.add_function(wrap_pyfunction!(example3_t_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(figure_sweep, m)?)?;
    Ok(())
}
