//! Python module `pgeneo`. Reports are returned as plain dicts built from the
//! same JSON the command-line tool prints.

use std::sync::Arc;

use pgeneo_core::builders::{digit_six_instance, squares_instance, SquaresConfig};
use pgeneo_core::covering::{greedy_net_from_matrix, DistanceMatrix};
use pgeneo_core::instance::Instance;
use pgeneo_core::metrics;
use pgeneo_core::operations::{is_operation, validate_perception_triple};
use pgeneo_core::pgeneo::check_restriction;
use pgeneo_core::{
    certify, right_action, DomainMap, Error, FiniteDomain, Measurement, MeasurementSpace, OperatorPair,
    PerceptionTriple, Tolerances,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn tolerances(delta_mem: f64, delta_num: f64) -> Tolerances {
    Tolerances { delta_mem, delta_num }
}

#[pyclass(name = "Domain", frozen)]
struct PyDomain(FiniteDomain);

#[pymethods]
impl PyDomain {
    #[new]
    fn new(labels: Vec<String>) -> PyResult<Self> {
        FiniteDomain::new(labels).map(PyDomain).map_err(err)
    }

    #[staticmethod]
    fn indexed(n: usize) -> PyResult<Self> {
        FiniteDomain::indexed(n).map(PyDomain).map_err(err)
    }

    #[getter]
    fn points(&self) -> Vec<String> {
        self.0.points().to_vec()
    }

    fn index_of(&self, label: &str) -> Option<usize> {
        self.0.index_of(label)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(name = "MeasurementSpace", frozen)]
struct PySpace(Arc<MeasurementSpace>);

#[pymethods]
impl PySpace {
    /// Rows within `delta_mem` of an earlier row are dropped.
    #[new]
    #[pyo3(signature = (label, domain, rows, delta_mem = Tolerances::DEFAULT_DELTA_MEM))]
    fn new(label: String, domain: PyRef<'_, PyDomain>, rows: Vec<Vec<f64>>, delta_mem: f64) -> PyResult<Self> {
        MeasurementSpace::from_values(label, &domain.0, rows, delta_mem)
            .map(|s| PySpace(Arc::new(s)))
            .map_err(err)
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label().to_string()
    }

    fn members(&self) -> Vec<Vec<f64>> {
        self.0.members().iter().map(|m| m.values().to_vec()).collect()
    }

    #[pyo3(signature = (values, delta_mem = Tolerances::DEFAULT_DELTA_MEM))]
    fn position(&self, values: Vec<f64>, delta_mem: f64) -> PyResult<Option<usize>> {
        let m = Measurement::new(self.0.domain(), values).map_err(err)?;
        Ok(self.0.position(&m, delta_mem))
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(name = "DomainMap", frozen)]
struct PyMap(DomainMap);

#[pymethods]
impl PyMap {
    #[new]
    fn new(domain: PyRef<'_, PyDomain>, perm: Vec<usize>) -> PyResult<Self> {
        DomainMap::new(&domain.0, perm).map(PyMap).map_err(err)
    }

    #[staticmethod]
    fn identity(domain: PyRef<'_, PyDomain>) -> Self {
        PyMap(DomainMap::identity(&domain.0))
    }

    #[getter]
    fn perm(&self) -> Vec<usize> {
        self.0.perm().to_vec()
    }

    /// `self ∘ other`, so that acting by the result equals acting by `self`
    /// and then by `other`.
    fn compose(&self, other: PyRef<'_, PyMap>) -> PyResult<Self> {
        self.0.compose(&other.0).map(PyMap).map_err(err)
    }

    fn inverse(&self) -> Self {
        PyMap(self.0.inverse())
    }

    fn is_identity(&self) -> bool {
        self.0.is_identity()
    }

    /// Right action on a value array: `(φs)[i] = φ[s(i)]`.
    fn act(&self, values: Vec<f64>) -> PyResult<Vec<f64>> {
        let m = Measurement::new(self.0.domain(), values).map_err(err)?;
        right_action(&m, &self.0).map(Measurement::into_values).map_err(err)
    }

    fn __eq__(&self, other: PyRef<'_, PyMap>) -> bool {
        self.0 == other.0
    }
}

#[pyclass(name = "PerceptionTriple", frozen)]
struct PyTriple(Arc<PerceptionTriple>);

#[pymethods]
impl PyTriple {
    #[new]
    fn new(phi: PyRef<'_, PySpace>, phi_prime: PyRef<'_, PySpace>, ops: Vec<PyRef<'_, PyMap>>) -> PyResult<Self> {
        let ops = ops.iter().map(|m| m.0.clone()).collect();
        PerceptionTriple::new(phi.0.clone(), phi_prime.0.clone(), ops)
            .map(|t| PyTriple(Arc::new(t)))
            .map_err(err)
    }

    #[getter]
    fn phi(&self) -> PySpace {
        PySpace(self.0.phi().clone())
    }

    #[getter]
    fn phi_prime(&self) -> PySpace {
        PySpace(self.0.phi_prime().clone())
    }

    #[getter]
    fn ops(&self) -> Vec<PyMap> {
        self.0.ops().iter().cloned().map(PyMap).collect()
    }

    #[pyo3(signature = (delta_mem = Tolerances::DEFAULT_DELTA_MEM))]
    fn validate(&self, py: Python<'_>, delta_mem: f64) -> PyResult<Py<PyAny>> {
        to_py(py, &validate_perception_triple(&self.0, delta_mem))
    }
}

#[pyclass(name = "OperatorPair", frozen)]
struct PyPair(OperatorPair);

#[pymethods]
impl PyPair {
    #[staticmethod]
    fn identity(triple: PyRef<'_, PyTriple>) -> Self {
        PyPair(OperatorPair::identity(triple.0.clone()))
    }

    fn f(&self) -> Vec<Vec<f64>> {
        self.0.f().images().iter().map(|m| m.values().to_vec()).collect()
    }

    fn f_prime(&self) -> Vec<Vec<f64>> {
        self.0.f_prime().images().iter().map(|m| m.values().to_vec()).collect()
    }

    #[pyo3(signature = (delta_mem = Tolerances::DEFAULT_DELTA_MEM, delta_num = Tolerances::DEFAULT_DELTA_NUM))]
    fn certify(&self, py: Python<'_>, delta_mem: f64, delta_num: f64) -> PyResult<Py<PyAny>> {
        to_py(py, &certify(&self.0, &tolerances(delta_mem, delta_num)))
    }

    #[pyo3(signature = (delta_mem = Tolerances::DEFAULT_DELTA_MEM, delta_num = Tolerances::DEFAULT_DELTA_NUM))]
    fn restriction(&self, py: Python<'_>, delta_mem: f64, delta_num: f64) -> PyResult<Py<PyAny>> {
        to_py(py, &check_restriction(&self.0, &tolerances(delta_mem, delta_num)))
    }
}

#[pyclass(name = "Instance", frozen)]
struct PyInstance(Instance);

#[pymethods]
impl PyInstance {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Instance::load(path).map(PyInstance).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Instance::parse(text).map(PyInstance).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.0.save(path).map_err(err)
    }

    fn domain(&self) -> PyDomain {
        PyDomain(self.0.domain().clone())
    }

    fn space(&self, name: &str) -> PyResult<PySpace> {
        self.0.space(name).map(|s| PySpace(s.clone())).map_err(err)
    }

    fn triple(&self, name: &str) -> PyResult<PyTriple> {
        self.0.triple(name).map(|t| PyTriple(t.clone())).map_err(err)
    }

    fn operator(&self, name: &str) -> PyResult<PyPair> {
        self.0.operator(name).map(|p| PyPair(p.clone())).map_err(err)
    }

    fn triple_names(&self) -> Vec<String> {
        self.0.triples().keys().cloned().collect()
    }

    fn operator_names(&self) -> Vec<String> {
        self.0.operators().keys().cloned().collect()
    }

    fn validate(&self, py: Python<'_>, triple: &str) -> PyResult<Py<PyAny>> {
        let t = self.0.triple(triple).map_err(err)?;
        to_py(py, &validate_perception_triple(t, self.0.tolerances().delta_mem))
    }

    fn certify(&self, py: Python<'_>, operator: &str) -> PyResult<Py<PyAny>> {
        let p = self.0.operator(operator).map_err(err)?;
        to_py(py, &certify(p, &self.0.tolerances()))
    }
}

#[pyfunction]
fn domain_pseudometric(space: PyRef<'_, PySpace>, x1: usize, x2: usize) -> PyResult<f64> {
    metrics::domain_pseudometric(&space.0, x1, x2).map(|r| r.value).map_err(err)
}

#[pyfunction]
fn aut_pseudometric(space: PyRef<'_, PySpace>, s1: PyRef<'_, PyMap>, s2: PyRef<'_, PyMap>) -> PyResult<f64> {
    metrics::aut_pseudometric(&space.0, &s1.0, &s2.0).map(|r| r.value).map_err(err)
}

#[pyfunction]
fn pgeneo_distance(p1: PyRef<'_, PyPair>, p2: PyRef<'_, PyPair>) -> PyResult<f64> {
    metrics::pgeneo_distance(&p1.0, &p2.0).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (s, phi, phi_prime, delta_mem = Tolerances::DEFAULT_DELTA_MEM))]
fn is_admissible(s: PyRef<'_, PyMap>, phi: PyRef<'_, PySpace>, phi_prime: PyRef<'_, PySpace>, delta_mem: f64) -> PyResult<bool> {
    is_operation(&s.0, &phi.0, &phi_prime.0, delta_mem)
        .map(|r| r.admissible)
        .map_err(err)
}

/// Greedy farthest-point ε-net of a square distance matrix.
#[pyfunction]
fn greedy_net(py: Python<'_>, distances: Vec<Vec<f64>>, epsilon: f64) -> PyResult<Py<PyAny>> {
    let n = distances.len();
    if distances.iter().any(|row| row.len() != n) {
        return Err(PyValueError::new_err("distance matrix must be square"));
    }
    let matrix = DistanceMatrix::build(n, |i, j| Ok(distances[i][j])).map_err(err)?;
    to_py(py, &greedy_net_from_matrix(&matrix, epsilon).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (grid = 16, side = 8, margin = 2, shift = (4, 4), naive = false))]
fn demo_squares(grid: usize, side: usize, margin: usize, shift: (isize, isize), naive: bool) -> PyResult<PyInstance> {
    let cfg = SquaresConfig {
        grid,
        side,
        margin,
        shift,
        naive_variant: naive,
    };
    let file = squares_instance(&cfg).map_err(err)?;
    Instance::from_file(file).map(PyInstance).map_err(err)
}

#[pyfunction]
fn demo_six() -> PyResult<PyInstance> {
    let file = digit_six_instance().map_err(err)?;
    Instance::from_file(file).map(PyInstance).map_err(err)
}

#[pymodule]
fn pgeneo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDomain>()?;
    m.add_class::<PySpace>()?;
    m.add_class::<PyMap>()?;
    m.add_class::<PyTriple>()?;
    m.add_class::<PyPair>()?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(domain_pseudometric, m)?)?;
    m.add_function(wrap_pyfunction!(aut_pseudometric, m)?)?;
    m.add_function(wrap_pyfunction!(pgeneo_distance, m)?)?;
    m.add_function(wrap_pyfunction!(is_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_net, m)?)?;
    m.add_function(wrap_pyfunction!(demo_squares, m)?)?;
    m.add_function(wrap_pyfunction!(demo_six, m)?)?;
    Ok(())
}
