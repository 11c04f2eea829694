//! Python bindings for `kconn`.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use kconn::augment::edge_augmentation as ea;
use kconn::bench::{default_side, generate_instance, DatasetKind, GeneratorConfig};
use kconn::connectivity::{self, ConnectivityMethod};
use kconn::qcp::{build_qcp, export_qcp as export, fcr_lower_bound, ExportFormat};
use kconn::relocation::{verify_plan as verify, RestorationPlan};
use kconn::{build_comm_graph, Algorithm, Error};

create_exception!(pykconn, KconnError, PyException);

fn err(e: Error) -> PyErr {
    KconnError::new_err(e.to_string())
}

/// Robot positions with a shared communication radius.
#[pyclass(name = "Instance", module = "pykconn")]
pub struct PyInstance {
    inner: kconn::Instance,
}

#[pymethods]
impl PyInstance {
    #[new]
    fn new(positions: Vec<Vec<f64>>, h: f64) -> PyResult<Self> {
        Ok(PyInstance { inner: kconn::Instance::from_rows(h, &positions).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyInstance { inner: kconn::Instance::from_json(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.h()
    }

    #[getter]
    fn positions(&self) -> Vec<Vec<f64>> {
        self.inner.rows()
    }

    /// Links of the communication graph as `(i, j)` with `i < j`.
    fn edges(&self) -> Vec<(usize, usize)> {
        build_comm_graph(&self.inner).edges()
    }

    fn __repr__(&self) -> String {
        format!("Instance(n={}, dim={}, h={})", self.inner.n(), self.inner.dim(), self.inner.h())
    }
}

#[pyclass(name = "Plan", module = "pykconn")]
pub struct PyPlan {
    inner: RestorationPlan,
    #[pyo3(get)]
    algorithm: String,
}

#[pymethods]
impl PyPlan {
    #[getter]
    fn final_positions(&self) -> Vec<Vec<f64>> {
        let dim = self.inner.original.dim();
        self.inner.final_positions.iter().map(|p| p.coords(dim).to_vec()).collect()
    }

    #[getter]
    fn minmax(&self) -> f64 {
        self.inner.minmax
    }

    #[getter]
    fn total(&self) -> f64 {
        self.inner.total
    }

    #[getter]
    fn per_robot(&self) -> Vec<f64> {
        self.inner.per_robot_displacement.clone()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!("Plan(algorithm={}, minmax={}, total={})", self.algorithm, self.inner.minmax, self.inner.total)
    }
}

#[pyfunction]
#[pyo3(signature = (instance, k, method = "auto"))]
fn is_k_connected(instance: &PyInstance, k: usize, method: &str) -> PyResult<bool> {
    let method: ConnectivityMethod = method.parse().map_err(err)?;
    connectivity::is_k_connected(&build_comm_graph(&instance.inner), k, method).map_err(err)
}

#[pyfunction]
fn vertex_connectivity(instance: &PyInstance) -> PyResult<usize> {
    connectivity::vertex_connectivity(&build_comm_graph(&instance.inner)).map_err(err)
}

/// Augmentation edges as `(i, j, length)` in insertion order.
#[pyfunction]
fn edge_augmentation(instance: &PyInstance, k: usize) -> PyResult<Vec<(usize, usize, f64)>> {
    Ok(ea(&instance.inner, k).map_err(err)?.edges.iter().map(|e| (e.i, e.j, e.weight)).collect())
}

/// Runs `algo` and verifies the result; raises if the plan is invalid.
#[pyfunction]
#[pyo3(signature = (instance, k, algo = "eascr"))]
fn restore(instance: &PyInstance, k: usize, algo: &str) -> PyResult<PyPlan> {
    let algorithm: Algorithm = algo.parse().map_err(err)?;
    let r = kconn::restore(&instance.inner, k, algorithm).map_err(err)?;
    let report = r.verify(&instance.inner).map_err(err)?;
    if !report.passed() {
        return Err(KconnError::new_err(format!("plan failed verification: {}", report.summary())));
    }
    Ok(PyPlan { inner: r.plan, algorithm: algorithm.name().to_string() })
}

/// Whether `plan` makes the instance k-connected (link retention is not checked).
#[pyfunction]
fn verify_plan(instance: &PyInstance, plan: &PyPlan, k: usize) -> PyResult<bool> {
    Ok(verify(&instance.inner, &plan.inner, None, k).map_err(err)?.passed())
}

#[pyfunction]
fn lower_bound(instance: &PyInstance, k: usize) -> PyResult<f64> {
    fcr_lower_bound(&instance.inner, k).map_err(err)
}

#[pyfunction]
fn export_qcp(instance: &PyInstance, k: usize) -> PyResult<String> {
    Ok(export(&build_qcp(&instance.inner, k).map_err(err)?, ExportFormat::Text))
}

/// Seeded random connected instance.
#[pyfunction]
#[pyo3(signature = (n, seed = 0, kind = "uniform", h = 1.0, side = None))]
fn generate(n: usize, seed: u64, kind: &str, h: f64, side: Option<f64>) -> PyResult<PyInstance> {
    let kind: DatasetKind = kind.parse().map_err(err)?;
    let cfg = GeneratorConfig { kind, n, h, side: side.unwrap_or_else(|| default_side(n)), gmm: None, seed };
    Ok(PyInstance { inner: generate_instance(&cfg).map_err(err)? })
}

#[pymodule]
fn pykconn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("KconnError", m.py().get_type::<KconnError>())?;
    m.add_class::<PyInstance>()?;
    m.add_class::<PyPlan>()?;
    m.add_function(wrap_pyfunction!(is_k_connected, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_connectivity, m)?)?;
    m.add_function(wrap_pyfunction!(edge_augmentation, m)?)?;
    m.add_function(wrap_pyfunction!(restore, m)?)?;
    m.add_function(wrap_pyfunction!(verify_plan, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(export_qcp, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
