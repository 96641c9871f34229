//! Python bindings. Rationals cross the boundary as `"p/q"` strings and
//! structured results as plain dicts and lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};
use serde_json::Value;

use kslab::cbd;
use kslab::io::SystemFile;
use kslab::jpd::{self, CorrelationTriple, DEFAULT_PRODUCT_BUDGET};
use kslab::ks::{self, SearchOptions};
use kslab::linalg::canonical_ray;
use kslab::qset::{self, FiniteStructure, Kind, DEFAULT_AUTOMORPHISM_BUDGET};
use kslab::valuation::{self, Assignment, QsetModeOptions};
use kslab::Rational;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (None, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for x in items {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, x) in map {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn serde_to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(v).map_err(err)?)
}

fn rational(s: &str) -> PyResult<Rational> {
    s.parse().map_err(err)
}

fn triple(exy: &str, exz: &str, eyz: &str) -> PyResult<CorrelationTriple> {
    CorrelationTriple::new(rational(exy)?, rational(exz)?, rational(eyz)?).map_err(err)
}

/// A Kochen-Specker instance: rays grouped into contexts.
#[pyclass(name = "KsInstance", module = "kslab_py", frozen)]
struct PyKsInstance {
    inner: ks::KsInstance,
}

#[pymethods]
impl PyKsInstance {
    /// `contexts` is a list of contexts, each a list of integer vectors.
    #[new]
    fn new(dimension: usize, contexts: Vec<Vec<Vec<i64>>>) -> PyResult<Self> {
        ks::KsInstance::from_context_vectors(dimension, contexts)
            .map(|inner| PyKsInstance { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn cabello() -> Self {
        PyKsInstance {
            inner: ks::builtin_cabello(),
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = SystemFile::from_json(text).and_then(|f| f.ks_instance()).map_err(err)?;
        Ok(PyKsInstance { inner })
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn rays(&self) -> Vec<Vec<i64>> {
        self.inner.rays().iter().map(|r| r.components().to_vec()).collect()
    }

    fn contexts(&self) -> Vec<Vec<usize>> {
        self.inner.contexts().iter().map(|c| c.ray_ids().to_vec()).collect()
    }

    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        serde_to_py(py, &ks::validate_instance(&self.inner))
    }

    #[pyo3(signature = (limit=None, node_budget=None))]
    fn search<'py>(&self, py: Python<'py>, limit: Option<usize>, node_budget: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        let out = ks::search_valuations(&self.inner, SearchOptions { limit, node_budget }).map_err(err)?;
        serde_to_py(py, &out)
    }

    fn parity_certificate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        serde_to_py(py, &ks::parity_certificate(&self.inner))
    }

    fn classical_mode<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        serde_to_py(py, &valuation::classical_mode(&self.inner).map_err(err)?)
    }

    /// Per-context valuation family; `seed` picks the true rays at random.
    #[pyo3(signature = (seed=None, cardinality=None))]
    fn qset_mode(&self, seed: Option<u64>, cardinality: Option<u64>) -> PyResult<PyFamily> {
        let opts = QsetModeOptions {
            cardinality,
            assignment: seed.map_or(Assignment::FirstRay, Assignment::Seeded),
            ..Default::default()
        };
        let inner = valuation::qset_mode_with(&self.inner, &opts).map_err(err)?;
        Ok(PyFamily { inner })
    }

    /// `(ray_id, probability)` pairs for a 0-based context.
    fn born_probabilities(&self, state: Vec<i64>, context: usize) -> PyResult<Vec<(usize, String)>> {
        let psi = canonical_ray(&state).map_err(err)?;
        let probs = valuation::born_probabilities(&self.inner, &psi, context).map_err(err)?;
        Ok(probs.into_iter().map(|(id, p)| (id, p.to_string())).collect())
    }

    fn simulate(&self, state: Vec<i64>, context: usize, seed: u64) -> PyResult<usize> {
        let psi = canonical_ray(&state).map_err(err)?;
        valuation::simulate_context_run(&self.inner, &psi, context, seed).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "KsInstance(dimension={}, rays={}, contexts={})",
            self.inner.dimension(),
            self.inner.rays().len(),
            self.inner.contexts().len()
        )
    }
}

/// A family of per-context valuations borne by strong singletons.
#[pyclass(name = "ValuationFamily", module = "kslab_py", frozen)]
struct PyFamily {
    inner: valuation::ContextualValuationFamily,
}

#[pymethods]
impl PyFamily {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(|inner| PyFamily { inner }).map_err(err)
    }

    fn verify(&self) -> bool {
        valuation::verify_family(&self.inner)
    }

    #[getter]
    fn bearer_count(&self) -> usize {
        self.inner.bearer_count()
    }

    fn value(&self, context: usize, ray: usize) -> Option<u8> {
        self.inner.value(context, ray)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(err)
    }
}

/// Observables with per-context joint distributions.
#[pyclass(name = "MeasurementSystem", module = "kslab_py", frozen)]
struct PySystem {
    inner: jpd::MeasurementSystem,
}

#[pymethods]
impl PySystem {
    /// Accepts a full system file or a bare measurement-system block.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        if let Ok(file) = SystemFile::from_json(text) {
            let inner = file.measurement_system().map_err(err)?.clone();
            return Ok(PySystem { inner });
        }
        serde_json::from_str(text).map(|inner| PySystem { inner }).map_err(err)
    }

    /// Three ±1 observables in pairs with the given correlations.
    #[staticmethod]
    fn pairwise_pm1(exy: &str, exz: &str, eyz: &str) -> PyResult<Self> {
        Ok(PySystem {
            inner: jpd::MeasurementSystem::pairwise_pm1(&triple(exy, exz, eyz)?),
        })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(err)
    }

    #[pyo3(signature = (budget=DEFAULT_PRODUCT_BUDGET))]
    fn feasibility<'py>(&self, py: Python<'py>, budget: u64) -> PyResult<Bound<'py, PyAny>> {
        serde_to_py(py, &jpd::feasibility_general(&self.inner, budget).map_err(err)?)
    }

    /// Returns the split system and the split map.
    fn split<'py>(&self, py: Python<'py>) -> PyResult<(PySystem, Bound<'py, PyAny>)> {
        let (inner, map) = cbd::split_by_context(&self.inner);
        Ok((PySystem { inner }, serde_to_py(py, &map)?))
    }

    #[pyo3(signature = (budget=DEFAULT_PRODUCT_BUDGET))]
    fn verify_split_feasible<'py>(&self, py: Python<'py>, budget: u64) -> PyResult<Bound<'py, PyAny>> {
        serde_to_py(py, &cbd::verify_split_feasible(&self.inner, budget).map_err(err)?)
    }
}

/// A finite quasi-set, visible only through kind multiplicities.
#[pyclass(name = "Qset", module = "kslab_py", frozen)]
struct PyQset {
    inner: qset::Qset,
}

fn kind(name: &str) -> PyResult<Kind> {
    Kind::new(name).map_err(err)
}

#[pymethods]
impl PyQset {
    #[new]
    fn new(multiplicities: Vec<(String, i64)>) -> PyResult<Self> {
        let spec = multiplicities
            .into_iter()
            .map(|(k, m)| Ok((kind(&k)?, m)))
            .collect::<PyResult<Vec<_>>>()?;
        qset::new_qset(&spec).map(|inner| PyQset { inner }).map_err(err)
    }

    #[getter]
    fn qcard(&self) -> u64 {
        self.inner.qcard()
    }

    fn multiplicity(&self, k: &str) -> PyResult<u64> {
        Ok(self.inner.multiplicity(&kind(k)?))
    }

    fn sub_of_kind(&self, k: &str) -> PyResult<PyQset> {
        Ok(PyQset {
            inner: qset::sub_of_kind(&self.inner, &kind(k)?),
        })
    }

    /// Serialized strong singletons: kind and opaque token only.
    fn strong_singletons<'py>(&self, py: Python<'py>, k: &str, count: u64) -> PyResult<Bound<'py, PyAny>> {
        let s = qset::strong_singletons(&self.inner, &kind(k)?, count).map_err(err)?;
        serde_to_py(py, &s)
    }

    fn indistinguishable(&self, other: &PyQset) -> bool {
        qset::qset_indistinguishable(&self.inner, &other.inner)
    }

    fn permute_hidden_labels(&self, seed: u64) -> PyQset {
        PyQset {
            inner: self.inner.permute_hidden_labels(seed),
        }
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(err)
    }
}

#[pyfunction]
fn suppes_zanotti(exy: &str, exz: &str, eyz: &str) -> PyResult<bool> {
    Ok(jpd::suppes_zanotti_holds(&triple(exy, exz, eyz)?))
}

#[pyfunction]
fn feasibility_three<'py>(py: Python<'py>, exy: &str, exz: &str, eyz: &str) -> PyResult<Bound<'py, PyAny>> {
    serde_to_py(py, &jpd::feasibility_three(&triple(exy, exz, eyz)?).map_err(err)?)
}

fn structure(text: &str) -> PyResult<FiniteStructure> {
    serde_json::from_str(text).map_err(err)
}

/// Automorphisms of a structure given as `{"domain": [...], "relations": [...]}`.
#[pyfunction]
#[pyo3(signature = (structure_json, budget=DEFAULT_AUTOMORPHISM_BUDGET))]
fn automorphisms(structure_json: &str, budget: usize) -> PyResult<Vec<Vec<usize>>> {
    let auts = qset::automorphisms(&structure(structure_json)?, budget).map_err(err)?;
    Ok(auts.into_iter().map(|p| p.images().to_vec()).collect())
}

#[pyfunction]
#[pyo3(signature = (structure_json, a, b, budget=DEFAULT_AUTOMORPHISM_BUDGET))]
fn structure_indiscernible(structure_json: &str, a: &str, b: &str, budget: usize) -> PyResult<bool> {
    qset::structure_indiscernible(&structure(structure_json)?, a, b, budget).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (structure_json, budget=DEFAULT_AUTOMORPHISM_BUDGET))]
fn rigid_extension(structure_json: &str, budget: usize) -> PyResult<String> {
    let rigid = qset::rigid_extension(&structure(structure_json)?, budget).map_err(err)?;
    serde_json::to_string(&rigid).map_err(err)
}

#[pymodule]
fn kslab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyKsInstance>()?;
    m.add_class::<PyFamily>()?;
    m.add_class::<PySystem>()?;
    m.add_class::<PyQset>()?;
    m.add_function(wrap_pyfunction!(suppes_zanotti, m)?)?;
    m.add_function(wrap_pyfunction!(feasibility_three, m)?)?;
    m.add_function(wrap_pyfunction!(automorphisms, m)?)?;
    m.add_function(wrap_pyfunction!(structure_indiscernible, m)?)?;
    m.add_function(wrap_pyfunction!(rigid_extension, m)?)?;
    Ok(())
}
