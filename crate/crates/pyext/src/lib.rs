//! Python bindings for the torn-paper channel toolkit: bit strings, the
//! tearing channel, de Bruijn pilots, the interleaved-pilot codec, the
//! tiling decoder, closed-form bounds, and the Monte Carlo harness.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use pyo3::IntoPyObjectExt;

use tplab::bitstring::BitString;
use tplab::channel;
use tplab::debruijn;
use tplab::error::Error;
use tplab::harness;
use tplab::oracle;
use tplab::pilot_codec::{AlignOutcome, BlockOutcome, CodeSpec};

fn pyerr(e: Error) -> PyErr {
    match e {
        Error::PilotCorrupted => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Packed immutable binary sequence.
#[pyclass(name = "BitString", from_py_object)]
#[derive(Clone)]
struct PyBitString {
    inner: BitString,
}

#[pymethods]
impl PyBitString {
    #[new]
    fn new(bits: &str) -> PyResult<Self> {
        Ok(PyBitString { inner: bits.parse().map_err(pyerr)? })
    }

    /// Bernoulli(1/2) string of the given length from a seeded generator.
    #[staticmethod]
    fn random(len: usize, seed: u64) -> Self {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        PyBitString { inner: BitString::random(len, &mut rng) }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }

    fn __eq__(&self, other: &PyBitString) -> bool {
        self.inner == other.inner
    }

    fn get(&self, i: usize) -> PyResult<bool> {
        if i >= self.inner.len() {
            return Err(PyValueError::new_err(format!("index {i} out of range")));
        }
        Ok(self.inner.get(i))
    }

    fn substring(&self, start: usize, len: usize) -> PyResult<Self> {
        if start + len > self.inner.len() {
            return Err(PyValueError::new_err("substring out of range"));
        }
        Ok(PyBitString { inner: self.inner.substring(start, len) })
    }

    /// Start positions of `needle`, linear by default.
    #[pyo3(signature = (needle, cyclic = false))]
    fn find_occurrences(&self, needle: &PyBitString, cyclic: bool) -> PyResult<Vec<usize>> {
        if needle.inner.is_empty() {
            return Err(PyValueError::new_err("needle must be non-empty"));
        }
        Ok(self.inner.find_occurrences(&needle.inner, cyclic))
    }

    /// Symbols at residue, residue + step, ...
    fn stride(&self, residue: usize, step: usize) -> PyResult<Self> {
        if step < 1 || residue >= step {
            return Err(PyValueError::new_err("require 0 <= residue < step"));
        }
        Ok(PyBitString { inner: self.inner.stride_subsequence(residue, step) })
    }
}

/// Multiset of fragments, with optional hidden ground truth.
#[pyclass(name = "FragmentSet", from_py_object)]
#[derive(Clone)]
struct PyFragmentSet {
    inner: channel::FragmentSet,
}

#[pymethods]
impl PyFragmentSet {
    #[staticmethod]
    fn from_strings(fragments: Vec<String>) -> PyResult<Self> {
        let parsed = fragments
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<BitString>, _>>()
            .map_err(pyerr)?;
        Ok(PyFragmentSet { inner: channel::FragmentSet::from_fragments(parsed) })
    }

    fn fragments(&self) -> Vec<PyBitString> {
        self.inner
            .fragments()
            .iter()
            .map(|f| PyBitString { inner: f.clone() })
            .collect()
    }

    fn lengths(&self) -> Vec<usize> {
        self.inner.lengths().collect()
    }

    fn k(&self) -> usize {
        self.inner.k()
    }

    fn total_len(&self) -> usize {
        self.inner.total_len()
    }

    /// `(start, len)` per fragment when the set came from the simulator.
    fn ground_truth(&self) -> Option<Vec<(usize, usize)>> {
        self.inner
            .ground_truth()
            .map(|t| t.iter().map(|o| (o.start, o.len)).collect())
    }
}

#[pyfunction]
#[pyo3(signature = (x, p, seed, unconstrained = false))]
fn tear(x: &PyBitString, p: f64, seed: u64, unconstrained: bool) -> PyResult<PyFragmentSet> {
    let cfg = channel::TearConfig::new(x.inner.len(), p, seed).map_err(pyerr)?;
    let fs = if unconstrained {
        channel::unconstrained_tear(&x.inner, &cfg)
    } else {
        channel::tear(&x.inner, &cfg)
    };
    Ok(PyFragmentSet { inner: fs })
}

#[pyfunction]
fn shuffle(fs: &PyFragmentSet, seed: u64) -> PyFragmentSet {
    PyFragmentSet { inner: channel::shuffle(&fs.inner, seed) }
}

/// Returns `(c_gamma, filtered_set)`.
#[pyfunction]
fn coverage(fs: &PyFragmentSet, gamma: f64, n: usize) -> PyResult<(f64, PyFragmentSet)> {
    let (c, y) = channel::coverage(&fs.inner, gamma, n).map_err(pyerr)?;
    Ok((c, PyFragmentSet { inner: y }))
}

#[pyfunction]
fn de_bruijn(k: u32) -> PyResult<PyBitString> {
    Ok(PyBitString { inner: debruijn::generate(k).map_err(pyerr)?.seq().clone() })
}

#[pyfunction]
fn de_bruijn_verify(s: &PyBitString, k: u32) -> bool {
    debruijn::verify(&s.inner, k)
}

/// Pilot-interleaved code.
#[pyclass(name = "CodeSpec")]
struct PyCodeSpec {
    inner: CodeSpec,
}

#[pymethods]
impl PyCodeSpec {
    #[staticmethod]
    fn make(n: usize, m: usize, delta: f64, catalog_size: usize, seed: u64) -> PyResult<Self> {
        Ok(PyCodeSpec { inner: CodeSpec::make_code(n, m, delta, catalog_size, seed).map_err(pyerr)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyCodeSpec { inner: CodeSpec::from_json(text).map_err(pyerr)? })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(pyerr)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn block_len(&self) -> usize {
        self.inner.block_len()
    }

    #[getter]
    fn k_f(&self) -> usize {
        self.inner.k_f()
    }

    #[getter]
    fn n_min(&self) -> usize {
        self.inner.n_min()
    }

    #[getter]
    fn catalog_size(&self) -> usize {
        self.inner.catalog_size()
    }

    #[getter]
    fn rate(&self) -> f64 {
        self.inner.rate()
    }

    fn pilot(&self) -> PyBitString {
        PyBitString { inner: self.inner.pilot().seq().clone() }
    }

    fn encode(&self, u: Vec<usize>) -> PyResult<PyBitString> {
        Ok(PyBitString { inner: self.inner.encode(&u).map_err(pyerr)? })
    }

    /// `{"status": "aligned" | "too_short" | "unalignable" | "ambiguous",
    ///   "start": int?, "residue": int?, "pilot_hits": int?}`
    fn align<'py>(&self, py: Python<'py>, fragment: &PyBitString) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        match self.inner.align_fragment(&fragment.inner).map_err(pyerr)? {
            AlignOutcome::Aligned(a) => {
                d.set_item("status", "aligned")?;
                d.set_item("start", a.start)?;
                d.set_item("residue", a.residue)?;
                d.set_item("pilot_hits", a.pilot_hits)?;
            }
            AlignOutcome::TooShort => d.set_item("status", "too_short")?,
            AlignOutcome::Unalignable { ambiguous } => {
                d.set_item("status", if ambiguous { "ambiguous" } else { "unalignable" })?
            }
        }
        Ok(d)
    }

    /// Decode report as a dict; block outcomes are catalog indices, `None`
    /// for erased slots, and the string `"inconsistent"` for the impossible
    /// case.
    fn decode<'py>(&self, py: Python<'py>, fs: &PyFragmentSet) -> PyResult<Bound<'py, PyDict>> {
        let report = self.inner.decode(&fs.inner).map_err(pyerr)?;
        let d = PyDict::new(py);
        d.set_item("n", report.n)?;
        d.set_item("m", report.m)?;
        d.set_item("symbols", &report.symbols)?;
        d.set_item("coverage_recovered", report.coverage_recovered)?;
        let blocks: Vec<Py<PyAny>> = report
            .blocks
            .iter()
            .map(|b| match b {
                BlockOutcome::Recovered(i) => i.into_py_any(py),
                BlockOutcome::Erased => Ok(py.None()),
                BlockOutcome::Inconsistent => "inconsistent".into_py_any(py),
            })
            .collect::<PyResult<_>>()?;
        d.set_item("blocks", blocks)?;
        d.set_item("misalignments", report.misalignments)?;
        d.set_item("ambiguities", report.ambiguities)?;
        d.set_item("conflicts", report.conflicts)?;
        d.set_item("too_short", report.too_short)?;
        d.set_item("aligned_fragments", report.aligned_fragments)?;
        d.set_item("aligned_length", report.aligned_length)?;
        Ok(d)
    }
}

#[pyfunction]
fn capacity(alpha: f64) -> PyResult<f64> {
    tplab::bounds::capacity(alpha).map_err(pyerr)
}

#[pyfunction]
fn det_capacity(alpha: f64) -> f64 {
    tplab::bounds::det_capacity(alpha)
}

#[pyfunction]
fn converse_bound(alpha: f64, l: u32) -> PyResult<f64> {
    tplab::bounds::converse_bound(alpha, l).map_err(pyerr)
}

#[pyfunction]
fn coverage_a(alpha: f64, beta: f64) -> PyResult<f64> {
    tplab::bounds::coverage_a(alpha, beta).map_err(pyerr)
}

#[pyfunction]
fn finite_coverage(n: usize, p: f64, threshold: usize) -> PyResult<f64> {
    tplab::bounds::finite_coverage(n, p, threshold).map_err(pyerr)
}

#[pyfunction]
fn exp_tail(alpha: f64, beta: f64) -> PyResult<f64> {
    tplab::bounds::exp_tail(alpha, beta).map_err(pyerr)
}

#[pyfunction]
fn exp_weighted_tail(alpha: f64, gamma: f64) -> PyResult<f64> {
    tplab::bounds::exp_weighted_tail(alpha, gamma).map_err(pyerr)
}

#[pyfunction]
fn coverage_expect(alpha: f64, gamma: f64) -> PyResult<f64> {
    tplab::bounds::coverage_expect(alpha, gamma).map_err(pyerr)
}

#[pyfunction]
fn achievable_rate(alpha: f64, gamma: f64) -> PyResult<f64> {
    tplab::bounds::achievable_rate(alpha, gamma).map_err(pyerr)
}

/// Returns `(rate, beta_star)`.
#[pyfunction]
fn interleave_rate(alpha: f64) -> PyResult<(f64, f64)> {
    let ir = tplab::bounds::interleave_rate(alpha).map_err(pyerr)?;
    Ok((ir.rate, ir.beta_star))
}

#[pyfunction]
fn tiles(codeword: &PyBitString, fragments: Vec<PyBitString>) -> PyResult<bool> {
    if codeword.inner.len() > oracle::MAX_TILING_N {
        return Err(PyValueError::new_err(format!(
            "tiling supports n <= {}",
            oracle::MAX_TILING_N
        )));
    }
    let frags: Vec<BitString> = fragments.into_iter().map(|f| f.inner).collect();
    Ok(oracle::tiles(&codeword.inner, &frags))
}

/// `{"outcome": "decoded" | "ambiguous" | "no_match", "index": int?}`
#[pyfunction]
fn tiling_decode<'py>(
    py: Python<'py>,
    codewords: Vec<PyBitString>,
    fs: &PyFragmentSet,
    gamma: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let cb = oracle::Codebook::new(codewords.into_iter().map(|c| c.inner).collect())
        .map_err(pyerr)?;
    let d = PyDict::new(py);
    match oracle::tiling_decode(&cb, &fs.inner, gamma).map_err(pyerr)? {
        oracle::TilingOutcome::Decoded(i) => {
            d.set_item("outcome", "decoded")?;
            d.set_item("index", i)?;
        }
        oracle::TilingOutcome::Ambiguous => d.set_item("outcome", "ambiguous")?,
        oracle::TilingOutcome::NoMatch => d.set_item("outcome", "no_match")?,
    }
    Ok(d)
}

fn estimate_to_dict<'py>(py: Python<'py>, est: &harness::RateEstimate) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let point = PyDict::new(py);
    for (k, v) in &est.point {
        point.set_item(k, v)?;
    }
    d.set_item("point", point)?;
    let stats: Vec<Bound<'py, PyDict>> = est
        .stats
        .iter()
        .map(|s| {
            let row = PyDict::new(py);
            row.set_item("statistic", &s.statistic)?;
            row.set_item("estimate", s.estimate)?;
            row.set_item("std_error", s.std_error)?;
            row.set_item("analytic", s.analytic)?;
            row.set_item("tolerance", s.tolerance)?;
            row.set_item("pass", s.pass)?;
            Ok(row)
        })
        .collect::<PyResult<_>>()?;
    d.set_item("stats", stats)?;
    d.set_item("all_pass", est.all_pass())?;
    Ok(d)
}

#[pyfunction]
fn verify_lemmas<'py>(
    py: Python<'py>,
    n: usize,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    estimate_to_dict(py, &harness::verify_lemmas(n, alpha, trials, seed).map_err(pyerr)?)
}

#[pyfunction]
fn codec_experiment<'py>(
    py: Python<'py>,
    code: &PyCodeSpec,
    p: f64,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    estimate_to_dict(py, &harness::codec_experiment(&code.inner, p, trials, seed).map_err(pyerr)?)
}

#[pyfunction]
fn soundness_experiment<'py>(
    py: Python<'py>,
    code: &PyCodeSpec,
    p: f64,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = harness::soundness_experiment(&code.inner, p, trials, seed).map_err(pyerr)?;
    let d = PyDict::new(py);
    d.set_item("trials", r.trials)?;
    d.set_item("aligned", r.aligned)?;
    d.set_item("misaligned", r.misaligned)?;
    d.set_item("unaligned_usable", r.unaligned_usable)?;
    d.set_item("ambiguous", r.ambiguous)?;
    d.set_item("symbol_errors", r.symbol_errors)?;
    d.set_item("conflicts", r.conflicts)?;
    d.set_item("sound", r.sound())?;
    Ok(d)
}

#[pyfunction]
fn oracle_experiment<'py>(
    py: Python<'py>,
    n: usize,
    rate: f64,
    alpha: f64,
    gamma: f64,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    estimate_to_dict(
        py,
        &harness::oracle_experiment(n, rate, alpha, gamma, trials, seed).map_err(pyerr)?,
    )
}

#[pymodule]
fn tplab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBitString>()?;
    m.add_class::<PyFragmentSet>()?;
    m.add_class::<PyCodeSpec>()?;
    m.add_function(wrap_pyfunction!(tear, m)?)?;
    m.add_function(wrap_pyfunction!(shuffle, m)?)?;
    m.add_function(wrap_pyfunction!(coverage, m)?)?;
    m.add_function(wrap_pyfunction!(de_bruijn, m)?)?;
    m.add_function(wrap_pyfunction!(de_bruijn_verify, m)?)?;
    m.add_function(wrap_pyfunction!(capacity, m)?)?;
    m.add_function(wrap_pyfunction!(det_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(converse_bound, m)?)?;
    m.add_function(wrap_pyfunction!(coverage_a, m)?)?;
    m.add_function(wrap_pyfunction!(finite_coverage, m)?)?;
    m.add_function(wrap_pyfunction!(exp_tail, m)?)?;
    m.add_function(wrap_pyfunction!(exp_weighted_tail, m)?)?;
    m.add_function(wrap_pyfunction!(coverage_expect, m)?)?;
    m.add_function(wrap_pyfunction!(achievable_rate, m)?)?;
    m.add_function(wrap_pyfunction!(interleave_rate, m)?)?;
    m.add_function(wrap_pyfunction!(tiles, m)?)?;
    m.add_function(wrap_pyfunction!(tiling_decode, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lemmas, m)?)?;
    m.add_function(wrap_pyfunction!(codec_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(soundness_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_experiment, m)?)?;
    Ok(())
}
