//! Python bindings: function specs, polar transforms, Φ, Santaló points,
//! regions and the verification suites. Structured results come back as dicts.

use polarlab_core::polar_integrals::{self as pi, Exponent, IntegrationConfig};
use polarlab_core::regions::RegionQuery;
use polarlab_core::santalo::{self, SolverConfig};
use polarlab_core::{transforms, verify, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn err(e: Error) -> PyErr {
    if e.is_input() || matches!(e, Error::Domain(_)) {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn exponent(s: &Bound<'_, PyAny>) -> PyResult<Exponent> {
    if let Ok(v) = s.extract::<f64>() {
        return Exponent::parse(&v.to_string()).map_err(err);
    }
    let text: String = s.extract()?;
    Exponent::parse(&text).map_err(err)
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn dict<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &value)
}

/// A validated function specification.
#[pyclass(name = "FunctionSpec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpec {
    inner: polarlab_core::FunctionSpec,
}

#[pymethods]
impl PySpec {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PySpec { inner: polarlab_core::FunctionSpec::from_json_str(text).map_err(err)? })
    }

    #[staticmethod]
    fn hhat(dimension: usize, s: f64) -> PyResult<Self> {
        Ok(PySpec { inner: polarlab_core::FunctionSpec::hhat(dimension, s).map_err(err)? })
    }

    #[staticmethod]
    fn gaussian(center: Vec<f64>, sigma: f64) -> PyResult<Self> {
        Ok(PySpec { inner: polarlab_core::FunctionSpec::gaussian(center, sigma).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn evaluate(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.evaluate(&x).map_err(err)
    }

    fn shifted(&self, offset: Vec<f64>) -> PyResult<Self> {
        Ok(PySpec { inner: self.inner.shifted(&offset).map_err(err)? })
    }

    /// f_s = (1 + log f / s)_+^s
    fn s_approx(&self, s: f64) -> PyResult<Self> {
        Ok(PySpec { inner: transforms::s_approx(&self.inner, s).map_err(err)? })
    }

    #[pyo3(signature = (resolution=48))]
    fn integrate(&self, resolution: usize) -> PyResult<f64> {
        Ok(pi::integrate_grid(&self.inner, &IntegrationConfig::with_resolution(resolution)).map_err(err)?.value)
    }

    fn __repr__(&self) -> String {
        format!("FunctionSpec({})", self.inner.to_json())
    }
}

#[pyfunction]
fn kappa(d: usize, s: f64) -> f64 {
    pi::kappa(d, s)
}

/// L_s f(y), or L_∞ f(y) for s = "inf".
#[pyfunction]
fn polar(spec: &PySpec, s: &Bound<'_, PyAny>, y: Vec<f64>) -> PyResult<f64> {
    match exponent(s)? {
        Exponent::Finite(s) => transforms::s_polar(&spec.inner, s, &y).map_err(err),
        Exponent::Infinite => transforms::log_polar(&spec.inner, &y).map_err(err),
    }
}

/// Φ(z) = ∫ L_s(f(· + z)): sphere formula for finite s, cubature for s = "inf".
#[pyfunction]
#[pyo3(signature = (spec, s, z, oracle=false))]
fn phi<'py>(py: Python<'py>, spec: &PySpec, s: &Bound<'py, PyAny>, z: Vec<f64>, oracle: bool) -> PyResult<Bound<'py, PyAny>> {
    let cfg = IntegrationConfig::default();
    let r = match exponent(s)? {
        Exponent::Finite(s) if oracle => pi::phi_oracle(&spec.inner, s, &z, &cfg),
        Exponent::Finite(s) => pi::SphereQuadrature::new(spec.inner.dimension(), s)
            .and_then(|q| pi::phi_sphere(&spec.inner, s, &z, &q)),
        Exponent::Infinite => pi::phi_log(&spec.inner, &z, &cfg),
    }
    .map_err(err)?;
    dict(py, &r)
}

#[pyfunction]
fn santalo_point<'py>(py: Python<'py>, spec: &PySpec, s: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let r = santalo::santalo_point(&spec.inner, exponent(s)?, &SolverConfig::default()).map_err(err)?;
    dict(py, &r)
}

/// λ-Santaló check for the hyperplane <normal, x> = offset.
#[pyfunction]
fn verify_santalo<'py>(py: Python<'py>, spec: &PySpec, s: f64, normal: Vec<f64>, offset: f64) -> PyResult<Bound<'py, PyAny>> {
    let h = santalo::Hyperplane::new(normal, offset).map_err(err)?;
    let r = santalo::verify_santalo(&spec.inner, s, &h, &IntegrationConfig::default()).map_err(err)?;
    dict(py, &r)
}

#[pyfunction]
fn region_membership<'py>(py: Python<'py>, spec: &PySpec, s: &Bound<'py, PyAny>, t: f64, z: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    let q = RegionQuery::new(&spec.inner, exponent(s)?, t, &IntegrationConfig::default()).map_err(err)?;
    dict(py, &q.membership(&z).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (spec, s, t, rays=64))]
fn region_boundary<'py>(py: Python<'py>, spec: &PySpec, s: &Bound<'py, PyAny>, t: f64, rays: usize) -> PyResult<Bound<'py, PyAny>> {
    let q = RegionQuery::new(&spec.inner, exponent(s)?, t, &IntegrationConfig::default()).map_err(err)?;
    let b = py.detach(|| q.boundary(rays)).map_err(err)?;
    dict(py, &b)
}

/// Runs a verification suite; returns the parsed JSONL records.
#[pyfunction]
#[pyo3(signature = (suite, seed=1))]
fn run_suite<'py>(py: Python<'py>, suite: &str, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| verify::run_suite(suite, seed)).map_err(err)?;
    dict(py, &r)
}

#[pymodule]
fn polarlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpec>()?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(polar, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(santalo_point, m)?)?;
    m.add_function(wrap_pyfunction!(verify_santalo, m)?)?;
    m.add_function(wrap_pyfunction!(region_membership, m)?)?;
    m.add_function(wrap_pyfunction!(region_boundary, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
