//! Python bindings for the coin-flip driven piecewise-linear interval
//! dynamics.
//!
//! The module mirrors the Rust library: the map family and the seeded
//! sampler are classes, everything else is a function. Symbol words are
//! plain lists of 0/1 integers; a *past* word lists the symbols at
//! indices `-n, ..., -1` in chronological order, a *future* word the
//! symbols at `0, 1, ...`. Validation failures raise `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use rid_core::{Basin, Error, PhiOptions, Symbol, SymbolWindow};

fn to_py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn symbol(bit: u8) -> PyResult<Symbol> {
    Symbol::from_bit(bit).map_err(to_py_err)
}

/// Past word: symbols at indices `-bits.len(), ..., -1`.
fn past_window(bits: &[u8]) -> PyResult<SymbolWindow> {
    SymbolWindow::from_bits(-(bits.len() as i64), bits).map_err(to_py_err)
}

fn window_at(offset: i64, bits: &[u8]) -> PyResult<SymbolWindow> {
    SymbolWindow::from_bits(offset, bits).map_err(to_py_err)
}

fn phi_options(tol_d: f64, max_depth: usize) -> PhiOptions {
    PhiOptions {
        tol_d,
        max_depth,
        ..PhiOptions::default()
    }
}

/// The two-map family: `f0` with slope `a = 1/(2(1-c))` at the left,
/// `f1` its mirror image with slope `b = 1/(2c)`.
#[pyclass(frozen, name = "PLFamily", module = "rid_py")]
struct PyFamily {
    inner: rid_core::PLFamily,
}

#[pymethods]
impl PyFamily {
    #[new]
    fn new(c: f64) -> PyResult<Self> {
        Ok(PyFamily {
            inner: rid_core::PLFamily::new(c).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c()
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a()
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.b()
    }

    /// Kink location of the selected map (`1-c` for symbol 0, `c` for 1).
    fn breakpoint(&self, symbol: u8) -> PyResult<f64> {
        Ok(self.inner.breakpoint(crate::symbol(symbol)?))
    }

    fn apply(&self, symbol: u8, x: f64) -> PyResult<f64> {
        self.inner.apply(crate::symbol(symbol)?, x).map_err(to_py_err)
    }

    /// Inverse branch of the selected map through `y`; branches split at
    /// `y = 1/2`.
    fn apply_inverse(&self, symbol: u8, y: f64) -> PyResult<f64> {
        self.inner
            .apply_inverse(crate::symbol(symbol)?, y)
            .map_err(to_py_err)
    }

    /// Slope at `x`, taking the left slope exactly at the kink.
    fn derivative(&self, symbol: u8, x: f64) -> PyResult<f64> {
        self.inner
            .derivative(crate::symbol(symbol)?, x)
            .map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!("PLFamily(c={})", self.inner.c())
    }
}

/// Deterministic fair-coin sampler. `derive(i)` yields an independent
/// child stream; identical seeds give identical draws on every platform.
#[pyclass(name = "SeededSampler", module = "rid_py")]
struct PySampler {
    inner: rid_core::SeededSampler,
}

#[pymethods]
impl PySampler {
    #[new]
    fn new(seed: u64) -> Self {
        PySampler {
            inner: rid_core::SeededSampler::new(seed),
        }
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    fn derive(&self, index: u64) -> PySampler {
        PySampler {
            inner: self.inner.derive(index),
        }
    }

    /// One uniform draw strictly inside (0, 1).
    fn uniform_unit(&mut self) -> f64 {
        self.inner.uniform_unit()
    }

    fn sample_symbol(&mut self) -> u8 {
        self.inner.sample_symbol().as_bit()
    }

    /// `length` coin flips as a list of 0/1 integers.
    fn sample_bits(&mut self, length: usize) -> Vec<u8> {
        (0..length).map(|_| self.inner.sample_symbol().as_bit()).collect()
    }

    fn __repr__(&self) -> String {
        format!("SeededSampler(seed={})", self.inner.seed())
    }
}

/// Pullback estimate of the attracting graph point of a past word.
#[pyclass(frozen, get_all, name = "PhiEstimate", module = "rid_py")]
struct PyPhiEstimate {
    value: f64,
    bracket_lo: f64,
    bracket_hi: f64,
    depth: usize,
    d_width: f64,
    converged: bool,
    degenerate: bool,
    clamp_count: usize,
    /// `(depth, bracket_lo, bracket_hi, d_width)` per doubling stage.
    stages: Vec<(usize, f64, f64, f64)>,
}

impl From<rid_core::PullbackEstimate> for PyPhiEstimate {
    fn from(est: rid_core::PullbackEstimate) -> Self {
        PyPhiEstimate {
            value: est.value,
            bracket_lo: est.bracket_lo,
            bracket_hi: est.bracket_hi,
            depth: est.depth,
            d_width: est.d_width,
            converged: est.converged,
            degenerate: est.degenerate,
            clamp_count: est.clamp_count,
            stages: est
                .stages
                .iter()
                .map(|s| (s.depth, s.bracket_lo, s.bracket_hi, s.d_width))
                .collect(),
        }
    }
}

#[pymethods]
impl PyPhiEstimate {
    fn __repr__(&self) -> String {
        format!(
            "PhiEstimate(value={}, depth={}, d_width={:e}, converged={})",
            self.value, self.depth, self.d_width, self.converged
        )
    }
}

/// Monte Carlo exponent estimate with its standard error.
#[pyclass(frozen, get_all, name = "ExponentEstimate", module = "rid_py")]
struct PyExponent {
    estimate: f64,
    std_error: f64,
    /// Exact value, or `None` for a biased coin where none applies.
    closed_form: Option<f64>,
    n: usize,
    breakpoint_hits: usize,
    clamp_count: usize,
    x0: f64,
}

#[pymethods]
impl PyExponent {
    fn __repr__(&self) -> String {
        format!(
            "ExponentEstimate(estimate={}, std_error={})",
            self.estimate, self.std_error
        )
    }
}

/// Outcome of the vanishing-attractor experiment: fix the far future,
/// vary prefix and start point.
#[pyclass(frozen, get_all, name = "SpreadReport", module = "rid_py")]
struct PySpread {
    xs: Vec<f64>,
    min: f64,
    max: f64,
    ks_vs_uniform: f64,
    residual_x0_spread: f64,
    residual_finals: Vec<f64>,
    n: usize,
    num_pasts: usize,
    future_seed: u64,
    fixed_future_bits: Vec<u8>,
    fixed_future_offset: i64,
}

#[pymethods]
impl PySpread {
    fn __repr__(&self) -> String {
        format!(
            "SpreadReport(ks_vs_uniform={}, residual_x0_spread={:e})",
            self.ks_vs_uniform, self.residual_x0_spread
        )
    }
}

/// Logarithmic chart: `ln(2x)` below 1/2, antisymmetric above.
#[pyfunction]
fn h(x: f64) -> PyResult<f64> {
    rid_core::h(x).map_err(to_py_err)
}

/// Inverse chart, saturating at the nearest representable interior point.
#[pyfunction]
fn h_inv(u: f64) -> f64 {
    rid_core::h_inv(u)
}

/// Logarithmic metric `|h(x) - h(y)|`.
#[pyfunction]
fn dist(x: f64, y: f64) -> PyResult<f64> {
    rid_core::dist(x, y).map_err(to_py_err)
}

/// States and per-step log-slopes of the orbit of `x0` under a word of
/// symbols applied left to right: `(states, log_derivs)`.
#[pyfunction]
fn forward_orbit(fam: &PyFamily, bits: Vec<u8>, x0: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let word = past_window(&bits)?;
    let trace = rid_core::forward_orbit(&fam.inner, &word, x0).map_err(to_py_err)?;
    Ok((trace.states, trace.log_derivs))
}

/// Backward orbit through the inverse branches selected by the past,
/// deepest symbol last: `(states, branch_bits, log_derivs)`.
#[pyfunction]
fn backward_orbit(
    fam: &PyFamily,
    past: Vec<u8>,
    x0: f64,
) -> PyResult<(Vec<f64>, Vec<u8>, Vec<f64>)> {
    let window = past_window(&past)?;
    let trace = rid_core::backward_orbit(&fam.inner, &window, x0).map_err(to_py_err)?;
    let branches = trace.branches.iter().map(|s| s.as_bit()).collect();
    Ok((trace.states, branches, trace.log_derivs))
}

/// Image of the seed point `y` pushed forward through the whole past word.
#[pyfunction]
fn pullback_point(fam: &PyFamily, past: Vec<u8>, y: f64) -> PyResult<f64> {
    let window = past_window(&past)?;
    rid_core::pullback_point(&fam.inner, &window, y).map_err(to_py_err)
}

/// Finite-stage graph approximation: pull `1/m` through the last `n`
/// symbols of the past.
#[pyfunction]
fn phi_nm(fam: &PyFamily, past: Vec<u8>, n: usize, m: u64) -> PyResult<f64> {
    let window = past_window(&past)?;
    rid_core::phi_nm(&fam.inner, &window, n, m).map_err(to_py_err)
}

/// Graph point of an explicit past word, bracketed to tolerance `tol_d`
/// in the logarithmic metric.
#[pyfunction]
#[pyo3(signature = (fam, past, tol_d = 1e-8, max_depth = 1 << 20))]
fn estimate_phi(
    fam: &PyFamily,
    past: Vec<u8>,
    tol_d: f64,
    max_depth: usize,
) -> PyResult<PyPhiEstimate> {
    let window = past_window(&past)?;
    let opts = phi_options(tol_d, max_depth);
    rid_core::estimate_phi_window(&fam.inner, &window, &opts)
        .map(PyPhiEstimate::from)
        .map_err(to_py_err)
}

/// Graph point of a random past drawn from the sampler, deepening until
/// the bracket width drops below `tol_d`.
#[pyfunction]
#[pyo3(signature = (fam, sampler, tol_d = 1e-8, max_depth = 1 << 20))]
fn estimate_phi_sampled(
    fam: &PyFamily,
    sampler: &mut PySampler,
    tol_d: f64,
    max_depth: usize,
) -> PyResult<PyPhiEstimate> {
    let opts = phi_options(tol_d, max_depth);
    rid_core::estimate_phi(&fam.inner, &mut sampler.inner, &opts)
        .map(PyPhiEstimate::from)
        .map_err(to_py_err)
}

/// Equivariance defect `|f_{w0}(phi(w)) - phi(shifted w)|` for a word
/// covering indices `-(len-1), ..., 0`.
#[pyfunction]
#[pyo3(signature = (fam, bits, tol_d = 1e-8, max_depth = 1 << 20))]
fn check_graph_invariance(
    fam: &PyFamily,
    bits: Vec<u8>,
    tol_d: f64,
    max_depth: usize,
) -> PyResult<f64> {
    let window = window_at(1 - bits.len() as i64, &bits)?;
    let opts = phi_options(tol_d, max_depth);
    rid_core::check_graph_invariance(&fam.inner, &window, &opts).map_err(to_py_err)
}

/// Which endpoint the backward orbit of `x` heads to along the past:
/// "to_zero", "to_one", or "undecided".
#[pyfunction]
fn basin_dichotomy(fam: &PyFamily, past: Vec<u8>, x: f64, n: usize) -> PyResult<&'static str> {
    let window = past_window(&past)?;
    let basin = rid_core::basin_dichotomy(&fam.inner, &window, x, n).map_err(to_py_err)?;
    Ok(match basin {
        Basin::ToZero => "to_zero",
        Basin::ToOne => "to_one",
        Basin::Undecided => "undecided",
    })
}

/// Graph points over `num_samples` random pasts conditioned on a future
/// word: `(values, unconverged)`. The values do not depend on the future,
/// which is the point of the conditioning experiments.
#[pyfunction]
#[pyo3(signature = (fam, future, num_samples, sampler, tol_d = 1e-8, max_depth = 1 << 20))]
fn sample_phi_given_future(
    fam: &PyFamily,
    future: Vec<u8>,
    num_samples: usize,
    sampler: &PySampler,
    tol_d: f64,
    max_depth: usize,
) -> PyResult<(Vec<f64>, usize)> {
    let window = window_at(0, &future)?;
    let opts = phi_options(tol_d, max_depth);
    let sample =
        rid_core::sample_phi_given_future(&fam.inner, &window, num_samples, &sampler.inner, &opts)
            .map_err(to_py_err)?;
    Ok((sample.values, sample.unconverged))
}

/// Histogram of conditional graph points over `bins` equal bins:
/// `(counts, total, unconverged)`. The cylinder word starts at `offset`
/// and pins whichever negative indices it covers.
#[pyfunction]
#[pyo3(signature = (fam, offset, cylinder, num_samples, sampler, bins = 20, tol_d = 1e-8, max_depth = 1 << 20))]
#[allow(clippy::too_many_arguments)]
fn dense_graph_demo(
    fam: &PyFamily,
    offset: i64,
    cylinder: Vec<u8>,
    num_samples: usize,
    sampler: &PySampler,
    bins: usize,
    tol_d: f64,
    max_depth: usize,
) -> PyResult<(Vec<u64>, u64, usize)> {
    let window = window_at(offset, &cylinder)?;
    let opts = phi_options(tol_d, max_depth);
    let hist =
        rid_core::dense_graph_demo(&fam.inner, &window, num_samples, &sampler.inner, bins, &opts)
            .map_err(to_py_err)?;
    Ok((hist.counts, hist.total, hist.unconverged))
}

/// Fix the far future by seed, vary prefix and start point.
#[pyfunction]
fn vanishing_attractor_experiment(
    fam: &PyFamily,
    future_seed: u64,
    n: usize,
    num_pasts: usize,
    sampler: &PySampler,
) -> PySpread {
    let spread = rid_core::vanishing_attractor_experiment(
        &fam.inner,
        future_seed,
        n,
        num_pasts,
        &sampler.inner,
    );
    PySpread {
        xs: spread.xs,
        min: spread.min,
        max: spread.max,
        ks_vs_uniform: spread.ks_vs_uniform,
        residual_x0_spread: spread.residual_x0_spread,
        residual_finals: spread.residual_finals,
        n: spread.n,
        num_pasts: spread.num_pasts,
        future_seed: spread.future_seed,
        fixed_future_bits: spread.fixed_future.symbols().iter().map(|s| s.as_bit()).collect(),
        fixed_future_offset: spread.fixed_future.offset(),
    }
}

/// Monte Carlo orbit exponent; `x0=None` draws the start uniformly.
#[pyfunction]
#[pyo3(signature = (fam, sampler, n, x0 = None))]
fn fiber_lyapunov(
    fam: &PyFamily,
    sampler: &mut PySampler,
    n: usize,
    x0: Option<f64>,
) -> PyResult<PyExponent> {
    let est = rid_core::fiber_lyapunov(&fam.inner, &mut sampler.inner, x0, n).map_err(to_py_err)?;
    Ok(PyExponent {
        estimate: est.estimate,
        std_error: est.std_error,
        closed_form: est.closed_form,
        n: est.n,
        breakpoint_hits: est.breakpoint_hits,
        clamp_count: est.clamp_count,
        x0: est.x0,
    })
}

/// Exact orbit exponent `-(1-c)ln(1-c) - c ln(c) - ln(2)`.
#[pyfunction]
fn fiber_lyapunov_closed_form(fam: &PyFamily) -> f64 {
    rid_core::fiber_lyapunov_closed_form(&fam.inner)
}

/// Exact expansion rate at a fixed level: `ln(1/sqrt(4c(1-c)))`.
#[pyfunction]
fn level_exponent(fam: &PyFamily, level: u8) -> PyResult<f64> {
    rid_core::level_exponent(&fam.inner, level).map_err(to_py_err)
}

/// Largest transfer-identity defect over the given intervals, each inside
/// one half of the unit interval.
#[pyfunction]
fn lebesgue_invariance_defect(fam: &PyFamily, intervals: Vec<(f64, f64)>) -> PyResult<f64> {
    rid_core::lebesgue_invariance_defect(&fam.inner, &intervals).map_err(to_py_err)
}

/// Logarithmic distances `d(x_k, y_k)` of two starts under one symbol
/// stream, `k = 0..=n`.
#[pyfunction]
fn synchronization_run(
    fam: &PyFamily,
    sampler: &mut PySampler,
    x0: f64,
    y0: f64,
    n: usize,
) -> PyResult<Vec<f64>> {
    rid_core::synchronization_run(&fam.inner, &mut sampler.inner, x0, y0, n)
        .map(|run| run.d_seq)
        .map_err(to_py_err)
}

/// Occupation-measure uniformity of one orbit after a burn-in:
/// `(statistic, critical_001)`.
#[pyfunction]
fn empirical_fiber_distribution(
    fam: &PyFamily,
    sampler: &mut PySampler,
    x0: f64,
    n: usize,
    burn_in: usize,
) -> PyResult<(f64, f64)> {
    rid_core::empirical_fiber_distribution(&fam.inner, &mut sampler.inner, x0, n, burn_in)
        .map(|ks| (ks.statistic, ks.critical_001))
        .map_err(to_py_err)
}

/// One-sample Kolmogorov-Smirnov statistic against uniform(0, 1):
/// `(statistic, critical_001)`.
#[pyfunction]
fn ks_statistic(samples: Vec<f64>) -> PyResult<(f64, f64)> {
    rid_core::ks_statistic(&samples)
        .map(|ks| (ks.statistic, ks.critical_001))
        .map_err(to_py_err)
}

/// Two-sample Kolmogorov-Smirnov statistic: `(statistic, critical_001)`.
#[pyfunction]
fn ks_two_sample(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<(f64, f64)> {
    rid_core::ks_two_sample(&xs, &ys)
        .map(|ks| (ks.statistic, ks.critical_001))
        .map_err(to_py_err)
}

/// Acceptance battery: list of `(index, name, passed, metric, threshold)`
/// in criterion order.
#[pyfunction]
fn run_selftest(seed: u64) -> Vec<(usize, String, bool, f64, f64)> {
    rid_core::selftest::run_all(seed)
        .iter()
        .map(|r| (r.index, r.name.to_string(), r.pass, r.metric, r.threshold))
        .collect()
}

#[pymodule]
fn rid_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFamily>()?;
    m.add_class::<PySampler>()?;
    m.add_class::<PyPhiEstimate>()?;
    m.add_class::<PyExponent>()?;
    m.add_class::<PySpread>()?;
    m.add_function(wrap_pyfunction!(h, m)?)?;
    m.add_function(wrap_pyfunction!(h_inv, m)?)?;
    m.add_function(wrap_pyfunction!(dist, m)?)?;
    m.add_function(wrap_pyfunction!(forward_orbit, m)?)?;
    m.add_function(wrap_pyfunction!(backward_orbit, m)?)?;
    m.add_function(wrap_pyfunction!(pullback_point, m)?)?;
    m.add_function(wrap_pyfunction!(phi_nm, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_phi, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_phi_sampled, m)?)?;
    m.add_function(wrap_pyfunction!(check_graph_invariance, m)?)?;
    m.add_function(wrap_pyfunction!(basin_dichotomy, m)?)?;
    m.add_function(wrap_pyfunction!(sample_phi_given_future, m)?)?;
    m.add_function(wrap_pyfunction!(dense_graph_demo, m)?)?;
    m.add_function(wrap_pyfunction!(vanishing_attractor_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(fiber_lyapunov, m)?)?;
    m.add_function(wrap_pyfunction!(fiber_lyapunov_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(level_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(lebesgue_invariance_defect, m)?)?;
    m.add_function(wrap_pyfunction!(synchronization_run, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_fiber_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(ks_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(ks_two_sample, m)?)?;
    m.add_function(wrap_pyfunction!(run_selftest, m)?)?;
    Ok(())
}
