//! Python bindings: distributions, codes, multi-code search, exponents, the
//! subadditivity probe and the experiment runner.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use sideinfo::codes::{self as codes, Code as _};
use sideinfo::{exponents, measures, multicode, oracles};

create_exception!(sideinfo, ResourceCapError, PyException);

fn to_py(e: sideinfo::Error) -> PyErr {
    match e {
        sideinfo::Error::InvalidArgument(msg) => PyValueError::new_err(msg),
        sideinfo::Error::ResourceCap(msg) => ResourceCapError::new_err(msg),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for sideinfo::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn ext(v: sideinfo::ExtReal) -> f64 {
    v.value()
}

/// Probability mass function on `{0, …, size-1}`.
#[pyclass(name = "Dist", frozen, from_py_object)]
#[derive(Clone)]
struct PyDist(sideinfo::Dist);

#[pymethods]
impl PyDist {
    #[new]
    fn new(probs: Vec<f64>) -> PyResult<Self> {
        sideinfo::Dist::new(probs).py().map(PyDist)
    }

    #[staticmethod]
    fn uniform(size: usize) -> PyResult<Self> {
        sideinfo::Dist::uniform(size).py().map(PyDist)
    }

    #[getter]
    fn size(&self) -> usize {
        self.0.size()
    }

    #[getter]
    fn probs(&self) -> Vec<f64> {
        self.0.probs().to_vec()
    }

    fn mass(&self, event: Vec<usize>) -> PyResult<f64> {
        let e = sideinfo::EventSet::from_indices(self.0.size(), event).py()?;
        Ok(self.0.mass(&e))
    }

    fn __len__(&self) -> usize {
        self.0.size()
    }

    fn __repr__(&self) -> String {
        format!("Dist({:?})", self.0.probs())
    }
}

#[pyclass(name = "PairAlphabet", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyPairAlphabet(sideinfo::PairAlphabet);

#[pymethods]
impl PyPairAlphabet {
    #[new]
    fn new(x1_size: usize, x2_size: usize) -> PyResult<Self> {
        sideinfo::PairAlphabet::new(x1_size, x2_size).py().map(PyPairAlphabet)
    }

    #[getter]
    fn x1_size(&self) -> usize {
        self.0.x1_size
    }

    #[getter]
    fn x2_size(&self) -> usize {
        self.0.x2_size
    }

    fn index(&self, x1: usize, x2: usize) -> usize {
        self.0.index(x1, x2)
    }

    fn __repr__(&self) -> String {
        format!("PairAlphabet({}, {})", self.0.x1_size, self.0.x2_size)
    }
}

/// Code whose encoder sees both components.
#[pyclass(name = "ACode", frozen, from_py_object)]
#[derive(Clone)]
struct PyACode(sideinfo::ACode);

#[pymethods]
impl PyACode {
    #[new]
    fn new(alphabet: PyPairAlphabet, size: usize, encoder: Vec<usize>, decoder: Vec<usize>) -> PyResult<Self> {
        sideinfo::ACode::new(alphabet.0, size, encoder, decoder).py().map(PyACode)
    }

    #[getter]
    fn size(&self) -> usize {
        self.0.size()
    }

    #[getter]
    fn encoder(&self) -> Vec<usize> {
        self.0.encoder().to_vec()
    }

    #[getter]
    fn decoder(&self) -> Vec<usize> {
        self.0.decoder().to_vec()
    }

    fn error_probability(&self, joint: &PyDist) -> PyResult<f64> {
        codes::error_probability(&self.0, &joint.0, &self.0.alphabet()).py()
    }

    /// Pairs `(x1, x2)` reproduced correctly.
    fn correct_set(&self) -> PyResult<Vec<(usize, usize)>> {
        correct_pairs(&self.0)
    }

    fn merge(&self, other: &PyACode) -> PyResult<PyACode> {
        codes::merge_a_codes(&self.0, &other.0, &self.0.alphabet()).py().map(PyACode)
    }
}

/// Code whose encoder sees only the first component.
#[pyclass(name = "BCode", frozen, from_py_object)]
#[derive(Clone)]
struct PyBCode(sideinfo::BCode);

#[pymethods]
impl PyBCode {
    #[new]
    fn new(alphabet: PyPairAlphabet, size: usize, encoder: Vec<usize>, decoder: Vec<usize>) -> PyResult<Self> {
        sideinfo::BCode::new(alphabet.0, size, encoder, decoder).py().map(PyBCode)
    }

    #[getter]
    fn size(&self) -> usize {
        self.0.size()
    }

    #[getter]
    fn encoder(&self) -> Vec<usize> {
        self.0.encoder().to_vec()
    }

    #[getter]
    fn decoder(&self) -> Vec<usize> {
        self.0.decoder().to_vec()
    }

    fn error_probability(&self, joint: &PyDist) -> PyResult<f64> {
        codes::error_probability(&self.0, &joint.0, &self.0.alphabet()).py()
    }

    fn correct_set(&self) -> PyResult<Vec<(usize, usize)>> {
        correct_pairs(&self.0)
    }

    fn to_a_code(&self) -> PyACode {
        PyACode(codes::b_to_a(&self.0))
    }
}

fn correct_pairs(code: &impl sideinfo::Code) -> PyResult<Vec<(usize, usize)>> {
    let ab = code.alphabet();
    let t = codes::correct_set(code, &ab).py()?;
    Ok((0..ab.x1_size)
        .flat_map(|x| (0..ab.x2_size).map(move |y| (x, y)))
        .filter(|&(x, y)| t.contains(x, y))
        .collect())
}

/// Single-letter source: i.i.d. or a two-component mixture of i.i.d. sources.
#[pyclass(name = "SingleLetterModel", frozen, from_py_object)]
#[derive(Clone)]
struct PyModel(sideinfo::SingleLetterModel);

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn iid(p: &PyDist, alphabet: PyPairAlphabet) -> PyResult<Self> {
        sideinfo::SingleLetterModel::iid(p.0.clone(), alphabet.0).py().map(PyModel)
    }

    #[staticmethod]
    fn dsbs(crossover: f64) -> PyResult<Self> {
        sideinfo::SingleLetterModel::dsbs(crossover).py().map(PyModel)
    }

    #[staticmethod]
    fn mixture(alpha: f64, p1: &PyDist, p2: &PyDist, alphabet: PyPairAlphabet) -> PyResult<Self> {
        sideinfo::SingleLetterModel::mixture(alpha, p1.0.clone(), p2.0.clone(), alphabet.0)
            .py()
            .map(PyModel)
    }

    #[getter]
    fn alphabet(&self) -> PyPairAlphabet {
        PyPairAlphabet(self.0.alphabet())
    }

    fn conditional_entropies(&self) -> Vec<f64> {
        self.0.conditional_entropies()
    }

    /// Joint law of blocklength `n`, returned with its block alphabet.
    fn block_joint(&self, n: usize) -> PyResult<(PyDist, PyPairAlphabet)> {
        let (d, ab) = self.0.block_joint(n).py()?;
        Ok((PyDist(d), PyPairAlphabet(ab)))
    }
}

#[pyfunction]
fn kl_divergence(nu: &PyDist, mu: &PyDist) -> PyResult<f64> {
    measures::kl_divergence(&nu.0, &mu.0).py().map(ext)
}

#[pyfunction]
fn g_functional(nu: &PyDist, mu: &PyDist) -> PyResult<f64> {
    measures::g_functional(&nu.0, &mu.0).py().map(ext)
}

#[pyfunction]
fn conditional_restriction(mu: &PyDist, event: Vec<usize>, fallback: &PyDist) -> PyResult<PyDist> {
    let e = sideinfo::EventSet::from_indices(mu.0.size(), event).py()?;
    measures::conditional_restriction(&mu.0, &e, &fallback.0).py().map(PyDist)
}

/// Terminal measure and accumulated divergence of the iterated restriction.
#[pyfunction]
fn recursive_tilt(mu: &PyDist, u: &PyDist, events: Vec<Vec<usize>>) -> PyResult<(PyDist, f64)> {
    let events = events
        .into_iter()
        .map(|e| sideinfo::EventSet::from_indices(mu.0.size(), e))
        .collect::<sideinfo::Result<Vec<_>>>()
        .py()?;
    let t = measures::recursive_tilt(&mu.0, &u.0, &events).py()?;
    Ok((PyDist(t.terminal), ext(t.divergence_bits)))
}

#[pyfunction]
fn optimal_a_code(joint: &PyDist, alphabet: PyPairAlphabet, size: usize) -> PyResult<(PyACode, f64)> {
    let (c, e) = codes::optimal_a_code(&joint.0, &alphabet.0, size).py()?;
    Ok((PyACode(c), e))
}

#[pyfunction]
fn optimal_b_code(joint: &PyDist, alphabet: PyPairAlphabet, size: usize) -> PyResult<(PyBCode, f64)> {
    let (c, e) = codes::optimal_b_code(&joint.0, &alphabet.0, size).py()?;
    Ok((PyBCode(c), e))
}

/// Best tuple of `k + 1` B-codes: `(codes, miss_probability, search_mode)`.
#[pyfunction]
#[pyo3(signature = (joint, alphabet, size, k, budget = 1_000_000, seed = 0))]
fn best_multi_b(
    py: Python<'_>,
    joint: &PyDist,
    alphabet: PyPairAlphabet,
    size: usize,
    k: usize,
    budget: u64,
    seed: u64,
) -> PyResult<(Vec<PyBCode>, f64, &'static str)> {
    let r = py
        .detach(|| multicode::best_multi_b(&joint.0, &alphabet.0, size, k, budget, seed))
        .py()?;
    Ok((
        r.codes.into_iter().map(PyBCode).collect(),
        r.miss_probability,
        r.search_mode.as_str(),
    ))
}

#[pyfunction]
fn rho_high_rate(py: Python<'_>, model: &PyModel, rate: f64, grid_step: f64) -> PyResult<f64> {
    py.detach(|| exponents::rho_high_rate(&model.0, rate, grid_step)).py().map(ext)
}

#[pyfunction]
fn rho_low_rate(py: Python<'_>, model: &PyModel, rate: f64, grid_step: f64) -> PyResult<f64> {
    py.detach(|| exponents::rho_low_rate(&model.0, rate, grid_step)).py().map(ext)
}

#[pyfunction]
fn predicted_eps_mixed(model: &PyModel, rate: f64) -> PyResult<f64> {
    exponents::predicted_eps_mixed(&model.0, rate).py()
}

/// `(n, size, e_A, exponent)` per blocklength.
#[pyfunction]
fn empirical_exponent_sweep(
    py: Python<'_>,
    model: &PyModel,
    rate: f64,
    n_values: Vec<usize>,
) -> PyResult<Vec<(usize, usize, f64, f64)>> {
    let pts = py
        .detach(|| exponents::empirical_exponent_sweep(&model.0, rate, &n_values))
        .py()?;
    Ok(pts.into_iter().map(|p| (p.n, p.size, p.e_a, ext(p.exponent))).collect())
}

/// `(verdict, instances_checked, counterexample)` where the counterexample is
/// `(c1, c2, size_bound)` or `None`.
#[pyfunction]
#[pyo3(signature = (alphabet, trials, seed = 0))]
#[allow(clippy::type_complexity)]
fn b_subadditivity_probe(
    py: Python<'_>,
    alphabet: PyPairAlphabet,
    trials: usize,
    seed: u64,
) -> PyResult<(&'static str, usize, Option<(PyBCode, PyBCode, usize)>)> {
    let r = py
        .detach(|| oracles::b_subadditivity_probe(&alphabet.0, trials, seed))
        .py()?;
    let cx = r
        .counterexample
        .map(|c| (PyBCode(c.c1), PyBCode(c.c2), c.size_bound));
    Ok((r.verdict.as_str(), r.instances_checked, cx))
}

/// Runs a JSON experiment config and returns the CSV report as text.
#[pyfunction]
#[pyo3(signature = (config_json, seed = None))]
fn run_experiment(py: Python<'_>, config_json: &str, seed: Option<u64>) -> PyResult<String> {
    let run = || -> sideinfo_cli::Result<String> {
        let mut cfg = sideinfo_cli::ExperimentConfig::from_json(config_json)?;
        if let Some(s) = seed {
            cfg.seed = s;
        }
        Ok(sideinfo_cli::to_csv_string(&sideinfo_cli::run_experiment(&cfg)?))
    };
    py.detach(run).map_err(|e| match e {
        sideinfo_cli::CliError::Resource(msg) => ResourceCapError::new_err(msg),
        other => PyValueError::new_err(other.to_string()),
    })
}

#[pymodule]
#[pyo3(name = "sideinfo")]
fn sideinfo_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ResourceCapError", m.py().get_type::<ResourceCapError>())?;
    m.add_class::<PyDist>()?;
    m.add_class::<PyPairAlphabet>()?;
    m.add_class::<PyACode>()?;
    m.add_class::<PyBCode>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(kl_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(g_functional, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_restriction, m)?)?;
    m.add_function(wrap_pyfunction!(recursive_tilt, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_a_code, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_b_code, m)?)?;
    m.add_function(wrap_pyfunction!(best_multi_b, m)?)?;
    m.add_function(wrap_pyfunction!(rho_high_rate, m)?)?;
    m.add_function(wrap_pyfunction!(rho_low_rate, m)?)?;
    m.add_function(wrap_pyfunction!(predicted_eps_mixed, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_exponent_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(b_subadditivity_probe, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
