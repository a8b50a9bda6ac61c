//! Python bindings: module `poisson_geom`.

use std::collections::BTreeMap;

use num_traits::Zero;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use poisson_core::exactalg::{parse_expression, RationalFunction};
use poisson_core::flows::{builtin_system, conservation_report, integrate, Method};
use poisson_core::formats::{self, Literal, PoissonDoc};
use poisson_core::liealg::{algebra_catalog, LieAlgebra};
use poisson_core::plie::{cobracket_and_cocycle, dual_structure_constants, manin_double, satisfies_mcybe, schouten_square};
use poisson_core::reduction::hopf_demo as core_hopf_demo;

create_exception!(poisson_geom, PoissonError, PyValueError);

fn err(e: poisson_core::Error) -> PyErr {
    PoissonError::new_err(e.to_string())
}

fn upper_literals(upper: BTreeMap<String, String>) -> BTreeMap<String, Literal> {
    upper.into_iter().map(|(k, v)| (k, Literal::Text(v))).collect()
}

/// Catalog name such as `"so3"`, or an inline algebra JSON document.
fn algebra_arg(name_or_doc: &str) -> PyResult<LieAlgebra> {
    if name_or_doc.trim_start().starts_with('{') {
        formats::lie_algebra_from_json(name_or_doc).map_err(err)
    } else {
        algebra_catalog(name_or_doc).map_err(err)
    }
}

#[pyclass(name = "PoissonStructure", module = "poisson_geom")]
struct PyPoissonStructure {
    inner: poisson_core::poisson::PoissonStructure,
}

impl PyPoissonStructure {
    fn parse(&self, f: &str) -> PyResult<RationalFunction> {
        parse_expression(f, self.inner.chart()).map_err(err)
    }
}

#[pymethods]
impl PyPoissonStructure {
    /// Bivector from its upper-triangular entries, keyed `"i,j"` (1-based).
    #[new]
    fn new(coordinates: Vec<String>, bivector_upper: BTreeMap<String, String>) -> PyResult<Self> {
        let doc = PoissonDoc { coordinates, bivector_upper: upper_literals(bivector_upper) };
        Ok(Self { inner: formats::poisson_from_doc(&doc).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: formats::poisson_from_json(text).map_err(err)? })
    }

    #[staticmethod]
    fn canonical(n: usize) -> Self {
        Self { inner: poisson_core::poisson::PoissonStructure::canonical(n) }
    }

    #[staticmethod]
    fn lie_poisson(algebra: &str) -> PyResult<Self> {
        Ok(Self { inner: algebra_arg(algebra)?.lie_poisson_structure() })
    }

    #[getter]
    fn coordinates(&self) -> Vec<String> {
        self.inner.chart().names().to_vec()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&formats::poisson_to_doc(&self.inner)).expect("serializable")
    }

    fn is_poisson(&self) -> bool {
        self.inner.jacobi_residual().is_poisson
    }

    /// Nonzero Jacobi residuals keyed `"i,j,k"` (1-based).
    fn jacobi_residuals(&self) -> BTreeMap<String, String> {
        self.inner
            .jacobi_residual()
            .failures()
            .map(|(&(i, j, k), r)| (format!("{},{},{}", i + 1, j + 1, k + 1), r.to_string()))
            .collect()
    }

    fn bracket(&self, f: &str, g: &str) -> PyResult<String> {
        let b = self.inner.bracket(&self.parse(f)?, &self.parse(g)?).map_err(err)?;
        Ok(b.to_string())
    }

    fn is_casimir(&self, f: &str) -> PyResult<bool> {
        self.inner.casimir_check(&self.parse(f)?).map_err(err)
    }

    fn hamiltonian_vector_field(&self, h: &str) -> PyResult<Vec<String>> {
        let x = self.inner.hamiltonian_vector_field(&self.parse(h)?).map_err(err)?;
        Ok(x.components().iter().map(|c| c.to_string()).collect())
    }

    fn __repr__(&self) -> String {
        format!("PoissonStructure({})", self.to_json())
    }
}

#[pyclass(name = "LieAlgebra", module = "poisson_geom")]
struct PyLieAlgebra {
    inner: LieAlgebra,
}

#[pymethods]
impl PyLieAlgebra {
    /// Catalog name or algebra JSON document.
    #[new]
    fn new(name_or_doc: &str) -> PyResult<Self> {
        Ok(Self { inner: algebra_arg(name_or_doc)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn basis(&self) -> Vec<String> {
        self.inner.basis().to_vec()
    }

    /// Nonzero `C^k_{ij}` keyed `"i,j,k"` (1-based).
    fn structure_constants(&self) -> BTreeMap<String, String> {
        let n = self.inner.dim();
        let mut out = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = self.inner.c(i, j, k);
                    if !c.is_zero() {
                        out.insert(format!("{},{},{}", i + 1, j + 1, k + 1), c.to_string());
                    }
                }
            }
        }
        out
    }

    fn killing_form(&self) -> Vec<Vec<String>> {
        let k = self.inner.killing_form();
        (0..k.nrows()).map(|i| (0..k.ncols()).map(|j| k[(i, j)].to_string()).collect()).collect()
    }

    fn lie_poisson(&self) -> PyPoissonStructure {
        PyPoissonStructure { inner: self.inner.lie_poisson_structure() }
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&formats::lie_algebra_to_doc(&self.inner)).expect("serializable")
    }
}

/// Integrates a built-in system, e.g. `"rigid-body(1,2,3)"`.
///
/// Returns a dict with `times`, `states` and the relative drift of each conserved quantity.
#[pyfunction]
#[pyo3(signature = (system, x0, dt, t_end, method = "rk4"))]
fn flow<'py>(py: Python<'py>, system: &str, x0: Vec<f64>, dt: f64, t_end: f64, method: &str) -> PyResult<Bound<'py, PyDict>> {
    let sys = builtin_system(system).map_err(err)?;
    let method: Method = method.parse().map_err(err)?;
    let traj = integrate(&sys, &x0, dt, t_end, method).map_err(err)?;
    let report = conservation_report(&sys, &traj).map_err(err)?;
    let drift: BTreeMap<String, f64> = report.quantities.iter().map(|q| (q.name.clone(), q.relative_drift)).collect();
    let out = PyDict::new(py);
    out.set_item("coordinates", sys.chart().names().to_vec())?;
    out.set_item("times", traj.times.clone())?;
    out.set_item("states", traj.states.clone())?;
    out.set_item("relative_drift", drift)?;
    Ok(out)
}

/// Reduction checks for the circle action on `S³` at level `|z|² = 2c`.
#[pyfunction]
#[pyo3(signature = (level, samples = 50, seed = 7))]
fn hopf_demo<'py>(py: Python<'py>, level: f64, samples: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let r = core_hopf_demo(level, samples, seed).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("samples", r.samples)?;
    out.set_item("max_welldef_residual", r.max_welldef_residual)?;
    out.set_item("max_pullback_residual", r.max_pullback_residual)?;
    out.set_item("reduced_dimension", r.reduced_dimension)?;
    Ok(out)
}

/// Schouten square of `r` and whether it is ad-invariant.
#[pyfunction]
fn cybe<'py>(py: Python<'py>, algebra: &str, r_upper: BTreeMap<String, String>) -> PyResult<Bound<'py, PyDict>> {
    let rm = formats::rmatrix_on(algebra_arg(algebra)?, &upper_literals(r_upper)).map_err(err)?;
    let square: BTreeMap<String, String> = schouten_square(&rm)
        .components()
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(&(i, j, k), v)| (format!("{},{},{}", i + 1, j + 1, k + 1), v.to_string()))
        .collect();
    let out = PyDict::new(py);
    out.set_item("schouten_square", square)?;
    out.set_item("satisfies_mcybe", satisfies_mcybe(&rm))?;
    Ok(out)
}

/// Cocycle and Manin double checks for the coboundary bialgebra of `r`.
#[pyfunction]
fn manin<'py>(py: Python<'py>, algebra: &str, r_upper: BTreeMap<String, String>) -> PyResult<Bound<'py, PyDict>> {
    let g = algebra_arg(algebra)?;
    let rm = formats::rmatrix_on(g.clone(), &upper_literals(r_upper)).map_err(err)?;
    let (cb, cocycle) = cobracket_and_cocycle(&rm);
    let out = PyDict::new(py);
    out.set_item("cocycle", cocycle.passes)?;
    match manin_double(&g, &dual_structure_constants(&cb)) {
        Ok(d) => {
            let rep = d.check();
            out.set_item("jacobi", rep.jacobi)?;
            out.set_item("isotropic", rep.isotropic)?;
            out.set_item("pairing_invariant", rep.pairing_invariant)?;
            out.set_item("halves_closed", rep.halves_closed)?;
        }
        Err(poisson_core::Error::JacobiViolated) => out.set_item("jacobi", false)?,
        Err(e) => return Err(err(e)),
    }
    Ok(out)
}

#[pymodule]
fn poisson_geom(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PoissonError", m.py().get_type::<PoissonError>())?;
    m.add_class::<PyPoissonStructure>()?;
    m.add_class::<PyLieAlgebra>()?;
    m.add_function(wrap_pyfunction!(flow, m)?)?;
    m.add_function(wrap_pyfunction!(hopf_demo, m)?)?;
    m.add_function(wrap_pyfunction!(cybe, m)?)?;
    m.add_function(wrap_pyfunction!(manin, m)?)?;
    Ok(())
}
