//! Python bindings: landscapes, single runs, sweeps and path graphs.
//!
//! Genotypes cross the boundary as bit strings with locus 0 first.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use scuba_core::experiments::{self, SweepConfig};
use scuba_core::heuristics::{
    generic_scuba as core_generic_scuba, GenericScubaConfig, NeutralImprover, NeutralStop,
    DEFAULT_STEP_MAX,
};
use scuba_core::neighborhood;
use scuba_core::pathgraph::{self, AnnotationKind};
use scuba_core::{EpistasisMode, EvalCounter, Genotype, HeuristicKind, NkqLandscape};

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl ToString) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// An NKq fitness landscape.
#[pyclass(name = "Landscape", module = "scuba_search", frozen)]
struct PyLandscape {
    inner: NkqLandscape,
}

impl PyLandscape {
    fn genotype(&self, bits: &str) -> PyResult<Genotype> {
        let g: Genotype = bits.parse().map_err(value_err)?;
        if g.len() != self.inner.n() {
            return Err(PyValueError::new_err(format!(
                "genotype has {} loci, the landscape has {}",
                g.len(),
                self.inner.n()
            )));
        }
        Ok(g)
    }

    fn total(&self, g: &Genotype) -> u64 {
        self.inner
            .evaluate(g, &mut EvalCounter::new())
            .expect("length checked")
            .total
    }
}

#[pymethods]
impl PyLandscape {
    #[new]
    #[pyo3(signature = (n, k, q, seed, mode = "random"))]
    fn new(n: usize, k: usize, q: u32, seed: u64, mode: &str) -> PyResult<Self> {
        let mode: EpistasisMode = mode.parse().map_err(value_err)?;
        let inner = NkqLandscape::generate(n, k, q, mode, seed).map_err(value_err)?;
        Ok(Self { inner })
    }

    /// Parses the text format written by `to_text`.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let inner = NkqLandscape::from_text(text).map_err(value_err)?;
        Ok(Self { inner })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.q()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    #[getter]
    fn mode(&self) -> String {
        self.inner.mode().to_string()
    }

    /// Largest possible total, `N (q - 1)`.
    #[getter]
    fn scale(&self) -> u64 {
        self.inner.scale()
    }

    /// Integer total of the contributions.
    fn total_fitness(&self, genotype: &str) -> PyResult<u64> {
        Ok(self.total(&self.genotype(genotype)?))
    }

    /// Fitness normalized to [0, 1].
    fn fitness(&self, genotype: &str) -> PyResult<f64> {
        let g = self.genotype(genotype)?;
        Ok(self.inner.fitness(self.total(&g)).normalized())
    }

    /// Number of one-bit mutants with equal fitness.
    fn neutral_degree(&self, genotype: &str) -> PyResult<usize> {
        let g = self.genotype(genotype)?;
        let f = self.inner.fitness(self.total(&g));
        Ok(neighborhood::neutral_degree(
            &self.inner,
            &g,
            f,
            &mut EvalCounter::new(),
        ))
    }

    /// Best total among the genotype and its one-bit mutants.
    fn evol(&self, genotype: &str) -> PyResult<u64> {
        let g = self.genotype(genotype)?;
        let f = self.inner.fitness(self.total(&g));
        Ok(neighborhood::evol(&self.inner, &g, f, &mut EvalCounter::new()).total)
    }

    /// Best total within Hamming distance two.
    fn evol2(&self, genotype: &str) -> PyResult<u64> {
        let g = self.genotype(genotype)?;
        let f = self.inner.fitness(self.total(&g));
        Ok(neighborhood::evol2(&self.inner, &g, f, &mut EvalCounter::new()).total)
    }

    fn __repr__(&self) -> String {
        format!(
            "Landscape(n={}, k={}, q={}, seed={}, mode='{}')",
            self.inner.n(),
            self.inner.k(),
            self.inner.q(),
            self.inner.seed(),
            self.inner.mode()
        )
    }
}

/// `(genotype, total, move, neutral_degree, evaluations)` for one visited point.
type TraceRow = (String, u64, String, usize, u64);

/// Outcome of one heuristic run.
#[pyclass(name = "RunResult", module = "scuba_search", frozen, get_all)]
struct PyRunResult {
    terminal: String,
    total: u64,
    fitness: f64,
    steps: u64,
    flat_count: u64,
    gate_count: u64,
    evaluations: u64,
    last_improvement: Option<u64>,
    trace: Option<Vec<TraceRow>>,
}

#[pymethods]
impl PyRunResult {
    fn __repr__(&self) -> String {
        format!(
            "RunResult(fitness={:.6}, steps={}, flat_count={}, gate_count={}, evaluations={})",
            self.fitness, self.steps, self.flat_count, self.gate_count, self.evaluations
        )
    }
}

impl From<scuba_core::RunResult> for PyRunResult {
    fn from(r: scuba_core::RunResult) -> Self {
        Self {
            terminal: r.terminal.to_string(),
            total: r.fitness.total,
            fitness: r.fitness.normalized(),
            steps: r.steps,
            flat_count: r.flat_count,
            gate_count: r.gate_count,
            evaluations: r.evaluations,
            last_improvement: r.last_improvement,
            trace: r.trace.map(|t| {
                t.into_iter()
                    .map(|e| {
                        (
                            e.genotype.to_string(),
                            e.total,
                            format!("{:?}", e.kind).to_lowercase(),
                            e.neutral_degree,
                            e.evaluations,
                        )
                    })
                    .collect()
            }),
        }
    }
}

fn start_point(l: &PyLandscape, start: Option<&str>, rng: &mut ChaCha8Rng) -> PyResult<Genotype> {
    match start {
        Some(bits) => l.genotype(bits),
        None => Ok(Genotype::random(l.inner.n(), rng)),
    }
}

/// Runs `hc`, `hc2`, `nc` or `ss` once. The start is random when omitted.
#[pyfunction]
#[pyo3(signature = (landscape, heuristic, seed, start = None, step_max = DEFAULT_STEP_MAX, trace = false))]
fn run(
    landscape: &PyLandscape,
    heuristic: &str,
    seed: u64,
    start: Option<&str>,
    step_max: u64,
    trace: bool,
) -> PyResult<PyRunResult> {
    let kind: HeuristicKind = heuristic.parse().map_err(value_err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s0 = start_point(landscape, start, &mut rng)?;
    kind.run(
        &landscape.inner,
        &s0,
        &mut rng,
        &mut EvalCounter::new(),
        step_max,
        trace,
    )
    .map(PyRunResult::from)
    .map_err(runtime_err)
}

/// Two-phase Scuba with `improve1` either `"greedy"` (evolvability ascent)
/// or `"drift"` (uniform neutral moves, needs `budget`).
#[pyfunction]
#[pyo3(signature = (landscape, seed, start = None, improve1 = "greedy", budget = None, trace = false))]
fn generic_scuba(
    landscape: &PyLandscape,
    seed: u64,
    start: Option<&str>,
    improve1: &str,
    budget: Option<u64>,
    trace: bool,
) -> PyResult<PyRunResult> {
    let improve1 = match improve1 {
        "greedy" => NeutralImprover::GreedyEvolvability,
        "drift" => NeutralImprover::NeutralDrift,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown improve1 `{other}` (expected greedy|drift)"
            )))
        }
    };
    let stop1 = match (budget, improve1) {
        (Some(b), _) => NeutralStop::Budget(b),
        (None, NeutralImprover::GreedyEvolvability) => NeutralStop::LocalNeutralMaximum,
        (None, NeutralImprover::NeutralDrift) => {
            return Err(PyValueError::new_err("drift requires a budget"))
        }
    };
    let config = GenericScubaConfig {
        improve1,
        stop1,
        ..GenericScubaConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s0 = start_point(landscape, start, &mut rng)?;
    core_generic_scuba(
        &landscape.inner,
        &s0,
        &config,
        &mut rng,
        &mut EvalCounter::new(),
        trace,
    )
    .map(PyRunResult::from)
    .map_err(runtime_err)
}

/// Runs a (K, q) grid and returns the per-cell CSV text.
#[pyfunction]
#[pyo3(signature = (n, ks, qs, seed, heuristics = None, runs = 100, instances = 10, mode = "random", step_max = DEFAULT_STEP_MAX))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    py: Python<'_>,
    n: usize,
    ks: Vec<usize>,
    qs: Vec<u32>,
    seed: u64,
    heuristics: Option<Vec<String>>,
    runs: usize,
    instances: usize,
    mode: &str,
    step_max: u64,
) -> PyResult<String> {
    let heuristics = match heuristics {
        Some(hs) => hs
            .iter()
            .map(|h| h.parse::<HeuristicKind>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(value_err)?,
        None => HeuristicKind::ALL.to_vec(),
    };
    let config = SweepConfig {
        n,
        ks,
        qs,
        mode: mode.parse().map_err(value_err)?,
        heuristics,
        runs,
        instances,
        base_seed: seed,
        step_max,
        keep_traces: false,
    };
    let report = py
        .detach(|| experiments::run_sweep(&config))
        .map_err(value_err)?;
    let mut buf = Vec::new();
    experiments::write_csv(&report, &mut buf).map_err(runtime_err)?;
    String::from_utf8(buf).map_err(runtime_err)
}

/// Mean neutral degree of random genotypes over `instances` landscapes.
#[pyfunction]
#[pyo3(signature = (n, k, q, seed, samples = 50_000, instances = 1, mode = "random"))]
#[allow(clippy::too_many_arguments)]
fn neutral_degree_stats<'py>(
    py: Python<'py>,
    n: usize,
    k: usize,
    q: u32,
    seed: u64,
    samples: usize,
    instances: usize,
    mode: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let mode: EpistasisMode = mode.parse().map_err(value_err)?;
    let s = py
        .detach(|| experiments::neutral_degree_stats(n, k, q, mode, samples, instances, seed))
        .map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("mean", s.mean)?;
    d.set_item("std_error", s.std_error)?;
    d.set_item("samples", s.samples)?;
    d.set_item("instances", s.instances)?;
    Ok(d)
}

/// DOT rendering of a small landscape annotated with `hc`, `hc2`, `nc`, `ss`
/// or `cube`.
#[pyfunction]
#[pyo3(signature = (landscape, heuristic = "ss"))]
fn graph_dot(landscape: &PyLandscape, heuristic: &str) -> PyResult<String> {
    let kind: AnnotationKind = heuristic.parse().map_err(value_err)?;
    let g = pathgraph::build_graph(&landscape.inner).map_err(value_err)?;
    Ok(pathgraph::to_dot(&pathgraph::annotate(&g, kind)))
}

/// Exhaustive counts of local maxima, Scuba end points and neutral networks.
#[pyfunction]
fn census<'py>(py: Python<'py>, landscape: &PyLandscape) -> PyResult<Bound<'py, PyDict>> {
    let c = pathgraph::census(&landscape.inner).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("v_local", c.v_local)?;
    d.set_item("v2_local", c.v2_local)?;
    d.set_item("scuba_terminals", c.scuba_terminals)?;
    d.set_item("neutral_networks", c.neutral_networks)?;
    Ok(d)
}

#[pymodule]
fn scuba_search(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLandscape>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(generic_scuba, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(neutral_degree_stats, m)?)?;
    m.add_function(wrap_pyfunction!(graph_dot, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    Ok(())
}
