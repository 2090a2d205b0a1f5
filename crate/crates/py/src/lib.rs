//! Python bindings for `infoest`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use infoest::bench::{self, ExperimentConfig, Fp};
use infoest::qif::{triangle_report, TriangleInputs};
use infoest::shannon::AlphabetPolicy;
use infoest::synth::{self, GroundTruthScenario, Level};
use infoest::{CountHistogram, EntropyTerms, EstimatorId, EstimatorSpec, JointHistogram, Measure};

fn py_err(e: infoest::Error) -> PyErr {
    match e {
        infoest::Error::Numerical(_) | infoest::Error::Generation { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = infoest::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(py_err)
}

fn spec(estimator: &str, k: Option<u64>, alpha: Option<f64>, xi: Option<f64>) -> PyResult<EstimatorSpec> {
    let mut spec = EstimatorSpec::new(parse(estimator)?);
    if let Some(k) = k {
        spec = spec.with_k(k);
    }
    if let Some(a) = alpha {
        spec = spec.with_alpha(a);
    }
    if let Some(x) = xi {
        spec = spec.with_xi(x);
    }
    spec.validate().map_err(py_err)?;
    Ok(spec)
}

/// Per-symbol counts of one sample.
#[pyclass(name = "CountHistogram", frozen)]
struct PyCountHistogram {
    inner: CountHistogram,
}

#[pymethods]
impl PyCountHistogram {
    #[new]
    fn new(counts: Vec<u64>) -> PyResult<Self> {
        Ok(Self { inner: CountHistogram::from_counts(counts).map_err(py_err)? })
    }

    /// Tallies any hashable symbols given as strings or ints.
    #[staticmethod]
    fn from_samples(samples: Vec<String>) -> PyResult<Self> {
        Ok(Self { inner: CountHistogram::from_samples(samples).map_err(py_err)? })
    }

    #[getter]
    fn counts(&self) -> Vec<u64> {
        self.inner.counts().to_vec()
    }

    #[getter]
    fn total(&self) -> u64 {
        self.inner.total()
    }

    #[getter]
    fn support(&self) -> usize {
        self.inner.support()
    }

    #[pyo3(signature = (estimator = "ML", k = None, alpha = None, xi = None))]
    fn entropy(&self, estimator: &str, k: Option<u64>, alpha: Option<f64>, xi: Option<f64>) -> PyResult<f64> {
        infoest::entropy(&self.inner, &spec(estimator, k, alpha, xi)?).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.support()
    }

    fn __repr__(&self) -> String {
        format!("CountHistogram(total={}, support={})", self.inner.total(), self.inner.support())
    }
}

/// Counts over tuples of one, two or three variables.
#[pyclass(name = "JointHistogram", frozen)]
struct PyJointHistogram {
    inner: JointHistogram,
}

#[pymethods]
impl PyJointHistogram {
    /// From a sample of tuples; symbols on each axis are relabelled densely.
    #[new]
    fn new(samples: Vec<Vec<i64>>) -> PyResult<Self> {
        Ok(Self { inner: JointHistogram::from_tuples(samples).map_err(py_err)? })
    }

    /// From a row-major dense array over a declared domain.
    #[staticmethod]
    fn from_dense(dims: Vec<u64>, counts: Vec<u64>) -> PyResult<Self> {
        Ok(Self { inner: JointHistogram::from_dense(&dims, &counts).map_err(py_err)? })
    }

    #[getter]
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    #[getter]
    fn total(&self) -> u64 {
        self.inner.total()
    }

    #[getter]
    fn dims(&self) -> Option<Vec<u64>> {
        self.inner.dims().map(<[u64]>::to_vec)
    }

    fn cells(&self) -> Vec<(Vec<u32>, u64)> {
        self.inner.cells().map(|(k, n)| (k.to_vec(), n)).collect()
    }

    fn marginalize(&self, axes: Vec<usize>) -> PyResult<Self> {
        Ok(Self { inner: self.inner.marginalize(&axes).map_err(py_err)? })
    }

    /// H, MI or CMI according to the table's arity.
    #[pyo3(signature = (estimator = "ML", alpha = None, xi = None, observed_alphabet = false))]
    fn estimate(&self, estimator: &str, alpha: Option<f64>, xi: Option<f64>, observed_alphabet: bool) -> PyResult<f64> {
        let measure = match self.inner.arity() {
            1 => Measure::H,
            2 => Measure::MI,
            _ => Measure::CMI,
        };
        let policy = if observed_alphabet { AlphabetPolicy::Observed } else { AlphabetPolicy::Domain };
        let spec = spec(estimator, None, alpha, xi)?;
        EntropyTerms::with_policy(&self.inner, measure, policy)
            .and_then(|t| t.estimate(&spec))
            .map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("JointHistogram(arity={}, total={})", self.inner.arity(), self.inner.total())
    }
}

/// Entropy in nats of a count vector.
#[pyfunction]
#[pyo3(signature = (counts, estimator = "ML", k = None, alpha = None, xi = None))]
fn entropy(counts: Vec<u64>, estimator: &str, k: Option<u64>, alpha: Option<f64>, xi: Option<f64>) -> PyResult<f64> {
    let h = CountHistogram::from_counts(counts).map_err(py_err)?;
    infoest::entropy(&h, &spec(estimator, k, alpha, xi)?).map_err(py_err)
}

/// Every estimator on one count vector, keyed by name.
#[pyfunction]
#[pyo3(signature = (counts, k = None))]
fn entropy_all(counts: Vec<u64>, k: Option<u64>) -> PyResult<BTreeMap<&'static str, f64>> {
    let h = CountHistogram::from_counts(counts).map_err(py_err)?;
    EstimatorId::ALL
        .into_iter()
        .map(|id| {
            let mut s = EstimatorSpec::new(id);
            if let (Some(k), true) = (k, id.uses_alphabet_size()) {
                s = s.with_k(k);
            }
            Ok((id.as_str(), infoest::entropy(&h, &s).map_err(py_err)?))
        })
        .collect()
}

#[pyfunction]
#[pyo3(signature = (pairs, estimator = "ML"))]
fn mutual_information(pairs: Vec<(i64, i64)>, estimator: &str) -> PyResult<f64> {
    let j = JointHistogram::from_tuples(pairs.into_iter().map(|(x, y)| [x, y])).map_err(py_err)?;
    infoest::mutual_information(&j, &spec(estimator, None, None, None)?).map_err(py_err)
}

/// I(X;Y|Z) from (x, y, z) triples.
#[pyfunction]
#[pyo3(signature = (triples, estimator = "ML"))]
fn conditional_mutual_information(triples: Vec<(i64, i64, i64)>, estimator: &str) -> PyResult<f64> {
    let j = JointHistogram::from_tuples(triples.into_iter().map(|(x, y, z)| [x, y, z])).map_err(py_err)?;
    infoest::conditional_mutual_information(&j, &spec(estimator, None, None, None)?).map_err(py_err)
}

#[pyfunction]
fn estimators() -> Vec<&'static str> {
    EstimatorId::ALL.iter().map(|id| id.as_str()).collect()
}

/// Draws a ground-truth pmf and a sample of size `n` from it.
/// Returns (exact value, dims, row-major pmf, sample as a joint histogram).
#[pyfunction]
#[pyo3(signature = (k, measure, level, n, seed = 0))]
fn simulate(
    k: usize,
    measure: &str,
    level: &str,
    n: u64,
    seed: u64,
) -> PyResult<(f64, Vec<usize>, Vec<f64>, PyJointHistogram)> {
    let measure: Measure = parse(measure)?;
    let level: Level = parse(level)?;
    let pmf = synth::generate_scenario(k, GroundTruthScenario::new(measure, level), seed).map_err(py_err)?;
    let exact = synth::exact_measure(&pmf, measure).map_err(py_err)?;
    let sample = synth::sample_joint(&pmf, n, synth::derive_seed(seed, &[n])).map_err(py_err)?;
    Ok((exact, pmf.dims().to_vec(), pmf.probs().to_vec(), PyJointHistogram { inner: sample }))
}

/// Largest-N convergence point as an exponent, or None when it never settles.
#[pyfunction]
#[pyo3(signature = (mse, exponents, fb = 0.1))]
fn flattening_point(mse: Vec<f64>, exponents: Vec<u32>, fb: f64) -> Option<u32> {
    bench::flattening_point(&mse, &exponents, fb).exponent()
}

#[pyfunction]
fn auc(mse: Vec<f64>) -> f64 {
    bench::auc(&mse)
}

/// (slope, l2 norm) of a flattening-point vector; None marks non-convergence.
#[pyfunction]
#[pyo3(signature = (fps, penalty = 15))]
fn slope_and_norm(fps: Vec<Option<u32>>, penalty: u32) -> (f64, f64) {
    let fps: Vec<Fp> = fps.into_iter().map(|f| f.map_or(Fp::NotConverged, Fp::Converged)).collect();
    bench::slope_and_norm(&fps, penalty)
}

/// Runs a benchmark from config text and writes its CSVs; returns the paths.
#[pyfunction]
fn run_benchmark(py: Python<'_>, config: &str, out_dir: PathBuf) -> PyResult<Vec<PathBuf>> {
    let cfg = ExperimentConfig::parse(config).map_err(py_err)?;
    py.detach(|| bench::run_and_export(&cfg, &out_dir)).map_err(py_err)
}

/// Triangle-classifier leakage estimates keyed by estimator name.
#[pyfunction]
#[pyo3(signature = (n = 500, seed = 0, lo = 1, hi = 100))]
fn triangle_leakage(n: u64, seed: u64, lo: i64, hi: i64) -> PyResult<BTreeMap<&'static str, f64>> {
    let rows = triangle_report(n, seed, &TriangleInputs::uniform(lo..=hi)).map_err(py_err)?;
    Ok(rows.into_iter().map(|(id, v)| (id.as_str(), v)).collect())
}

#[pymodule]
fn pyinfoest(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCountHistogram>()?;
    m.add_class::<PyJointHistogram>()?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_all, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(estimators, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(flattening_point, m)?)?;
    m.add_function(wrap_pyfunction!(auc, m)?)?;
    m.add_function(wrap_pyfunction!(slope_and_norm, m)?)?;
    m.add_function(wrap_pyfunction!(run_benchmark, m)?)?;
    m.add_function(wrap_pyfunction!(triangle_leakage, m)?)?;
    Ok(())
}
