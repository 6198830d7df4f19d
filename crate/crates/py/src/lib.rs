//! Python bindings. Vectors are sequences of Python numbers (complex or
//! real); structured results come back as plain dicts.

use phaselat::builders::{self, BuilderParams};
use phaselat::hilbert;
use phaselat::lattice::{self, Exponent};
use phaselat::phase;
use phaselat::search::{self, SearchBudget};
use phaselat::{Complex64, CplxVec, Field, NormSpec};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyString;
use serde::Serialize;

create_exception!(phaselat, PhaselatError, PyValueError, "Raised when a computation or check fails.");

fn err(e: phaselat::Error) -> PyErr {
    PhaselatError::new_err(e.to_string())
}

fn vector(entries: Vec<Complex64>) -> PyResult<CplxVec> {
    CplxVec::new(entries).map_err(err)
}

/// Round-trips through JSON so that results are ordinary dicts and lists.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PhaselatError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn exponent(p: &Bound<'_, PyAny>) -> PyResult<Exponent> {
    if let Ok(s) = p.cast::<PyString>() {
        return match s.to_str()?.to_ascii_lowercase().as_str() {
            "inf" | "infinity" => Ok(Exponent::Infinity),
            other => Err(PyValueError::new_err(format!("p must be a number or \"inf\", got {other:?}"))),
        };
    }
    let x: f64 = p.extract()?;
    Ok(if x.is_infinite() && x > 0.0 { Exponent::Infinity } else { Exponent::Finite(x) })
}

/// A coordinate lattice: dimension, scalar field and weighted p-norm.
#[pyclass(frozen, skip_from_py_object, module = "phaselat")]
#[derive(Clone)]
struct Ambient {
    inner: phaselat::Ambient,
}

#[pymethods]
impl Ambient {
    #[new]
    #[pyo3(signature = (dim, p, field = "complex", weights = None))]
    fn new(dim: usize, p: &Bound<'_, PyAny>, field: &str, weights: Option<Vec<f64>>) -> PyResult<Self> {
        let field = match field {
            "real" => Field::Real,
            "complex" => Field::Complex,
            other => return Err(PyValueError::new_err(format!("field must be \"real\" or \"complex\", got {other:?}"))),
        };
        let norm = NormSpec::new(exponent(p)?, weights).map_err(err)?;
        Ok(Ambient {
            inner: phaselat::Ambient::new(dim, field, norm).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn field(&self) -> String {
        self.inner.field.to_string()
    }

    fn norm(&self, x: Vec<Complex64>) -> PyResult<f64> {
        self.inner.norm(&vector(x)?).map_err(err)
    }

    /// `min over |λ| = 1 of ‖f − λg‖`.
    fn phase_distance(&self, f: Vec<Complex64>, g: Vec<Complex64>) -> PyResult<f64> {
        phase::separation(&vector(f)?, &vector(g)?, &self.inner).map_err(err)
    }

    /// `‖ |Re(f ḡ)|^½ ‖`.
    fn perp(&self, f: Vec<Complex64>, g: Vec<Complex64>) -> PyResult<f64> {
        lattice::perp_measure(&vector(f)?, &vector(g)?, &self.inner.norm).map_err(err)
    }

    /// `‖ |u| ∧ |v| ‖`.
    fn disjointness(&self, u: Vec<Complex64>, v: Vec<Complex64>) -> PyResult<f64> {
        lattice::disjointness(&vector(u)?, &vector(v)?, &self.inner.norm).map_err(err)
    }

    fn spr_ratio<'py>(&self, py: Python<'py>, f: Vec<Complex64>, g: Vec<Complex64>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &phase::spr_ratio(&vector(f)?, &vector(g)?, &self.inner).map_err(err)?)
    }

    fn fit_hilbert<'py>(&self, py: Python<'py>, f: Vec<Complex64>, g: Vec<Complex64>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &hilbert::fit_hilbert_norm(&vector(f)?, &vector(g)?, &self.inner).map_err(err)?)
    }

    /// Fits a Hilbert norm on `span{u, v}`, aligns and reduces the pair.
    fn reduce_pair<'py>(&self, py: Python<'py>, u: Vec<Complex64>, v: Vec<Complex64>) -> PyResult<Bound<'py, PyAny>> {
        let (u, v) = (vector(u)?, vector(v)?);
        let form = hilbert::fit_hilbert_norm(&u, &v, &self.inner).map_err(err)?;
        let (aligned, reduced) = hilbert::reduce_pair(&u, &v, &form).map_err(err)?;
        to_py(
            py,
            &serde_json::json!({"hilbert_form": form, "alignment": aligned, "reduction": reduced}),
        )
    }

    fn adp_to_spr_violation<'py>(&self, py: Python<'py>, u: Vec<Complex64>, v: Vec<Complex64>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &builders::adp_to_spr_violation(&vector(u)?, &vector(v)?, &self.inner).map_err(err)?)
    }

    fn spr_failure_to_perp_pair<'py>(
        &self,
        py: Python<'py>,
        f: Vec<Complex64>,
        g: Vec<Complex64>,
        m: f64,
        epsilon: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let params = BuilderParams::new(m, epsilon).map_err(err)?;
        let out = builders::spr_failure_to_perp_pair(&vector(f)?, &vector(g)?, &self.inner, &params).map_err(err)?;
        to_py(py, &out)
    }

    #[pyo3(name = "perp_pair_to_spr_failure", signature = (u, v, m, c))]
    fn perp_to_spr<'py>(
        &self,
        py: Python<'py>,
        u: Vec<Complex64>,
        v: Vec<Complex64>,
        m: f64,
        c: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let out = builders::perp_pair_to_spr_failure(&vector(u)?, &vector(v)?, &self.inner, m, c).map_err(err)?;
        to_py(py, &out)
    }

    fn __repr__(&self) -> String {
        format!(
            "Ambient(dim={}, p={}, field={:?})",
            self.inner.dim,
            self.inner.norm.exponent(),
            self.inner.field.to_string()
        )
    }
}

fn budget(restarts: usize, iters: usize, rounds: usize) -> SearchBudget {
    SearchBudget {
        restarts,
        iterations_per_restart: iters,
        penalty_rounds: rounds,
    }
}

/// A subspace spanned by linearly independent basis vectors.
#[pyclass(frozen, module = "phaselat")]
struct Subspace {
    inner: search::Subspace,
}

#[pymethods]
impl Subspace {
    #[new]
    fn new(ambient: &Ambient, basis: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let basis = basis.into_iter().map(vector).collect::<PyResult<Vec<_>>>()?;
        Ok(Subspace {
            inner: search::Subspace::new(ambient.inner.clone(), basis).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn ambient(&self) -> Ambient {
        Ambient {
            inner: self.inner.ambient().clone(),
        }
    }

    #[pyo3(signature = (restarts = 16, iters = 1000, seed = 0))]
    fn estimate_spr_constant<'py>(&self, py: Python<'py>, restarts: usize, iters: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let b = budget(restarts, iters, 1);
        let out = py.detach(|| search::estimate_spr_constant(&self.inner, &b, seed)).map_err(err)?;
        to_py(py, &out)
    }

    #[pyo3(signature = (restarts = 16, iters = 1000, seed = 0))]
    fn search_almost_disjoint<'py>(&self, py: Python<'py>, restarts: usize, iters: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let b = budget(restarts, iters, 1);
        let out = py.detach(|| search::search_almost_disjoint(&self.inner, &b, seed)).map_err(err)?;
        to_py(py, &out)
    }

    #[pyo3(signature = (m, restarts = 16, iters = 1000, rounds = 4, seed = 0))]
    fn search_perp_pair<'py>(
        &self,
        py: Python<'py>,
        m: f64,
        restarts: usize,
        iters: usize,
        rounds: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let b = budget(restarts, iters, rounds);
        let out = py.detach(|| search::search_perp_pair(&self.inner, m, &b, seed)).map_err(err)?;
        to_py(py, &out)
    }

    #[pyo3(signature = (m_grid = None, restarts = 16, iters = 1000, rounds = 4, seed = 0, eps_fail = search::DEFAULT_EPS_FAIL))]
    fn check_pr<'py>(
        &self,
        py: Python<'py>,
        m_grid: Option<Vec<f64>>,
        restarts: usize,
        iters: usize,
        rounds: usize,
        seed: u64,
        eps_fail: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let grid = m_grid.unwrap_or_else(|| search::DEFAULT_M_GRID.to_vec());
        let b = budget(restarts, iters, rounds);
        let out = py
            .detach(|| search::check_pr(&self.inner, &grid, &b, seed, eps_fail))
            .map_err(err)?;
        to_py(py, &out)
    }
}

/// Parses a JSON problem file; returns `(ambient, subspace, pair or None)`.
#[pyfunction]
fn load_problem(text: &str) -> PyResult<(Ambient, Subspace, Option<(Vec<Complex64>, Vec<Complex64>)>)> {
    let p = phaselat::load_problem(text).map_err(err)?;
    let pair = p.pair.map(|(u, v)| (u.into_vec(), v.into_vec()));
    Ok((Ambient { inner: p.ambient }, Subspace { inner: p.subspace }, pair))
}

#[pyfunction]
fn example_c4(py: Python<'_>, delta: f64) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &phaselat::gallery::example_c4(delta).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (f, g, atol = 1e-9))]
fn complex_pr_equivalences(py: Python<'_>, f: Vec<Complex64>, g: Vec<Complex64>, atol: f64) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &builders::complex_pr_equivalences(&vector(f)?, &vector(g)?, atol).map_err(err)?)
}

/// Coordinatewise residuals of the functional-calculus identities.
#[pyfunction]
#[pyo3(signature = (f, g, phi = 0.0, s = 1.0, t = 1.0))]
fn identity_residuals(py: Python<'_>, f: Vec<Complex64>, g: Vec<Complex64>, phi: f64, s: f64, t: f64) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &lattice::identity_residuals(&vector(f)?, &vector(g)?, phi, s, t).map_err(err)?)
}

#[pyfunction]
fn builder_params(py: Python<'_>, m: f64, epsilon: f64) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &BuilderParams::new(m, epsilon).map_err(err)?)
}

#[pymodule]
#[pyo3(name = "phaselat")]
fn phaselat_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Ambient>()?;
    m.add_class::<Subspace>()?;
    m.add_function(wrap_pyfunction!(load_problem, m)?)?;
    m.add_function(wrap_pyfunction!(example_c4, m)?)?;
    m.add_function(wrap_pyfunction!(complex_pr_equivalences, m)?)?;
    m.add_function(wrap_pyfunction!(identity_residuals, m)?)?;
    m.add_function(wrap_pyfunction!(builder_params, m)?)?;
    m.add("PhaselatError", m.py().get_type::<PhaselatError>())?;
    Ok(())
}
