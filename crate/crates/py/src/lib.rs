//! Python bindings for `boundrec`.

use num_bigint::BigUint;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use boundrec::classical::{f_of_n, log_transform};
use boundrec::coin;
use boundrec::harness::{self, ExperimentConfig, RecognizerName, ReportFormat, RunContext};
use boundrec::model::{RandomSource, SubsetOracle, TapeMode, Word};
use boundrec::oracles::{self, LanguageId};
use boundrec::quantum;

fn err(e: boundrec::Error) -> PyErr {
    match e {
        boundrec::Error::Fault(_) | boundrec::Error::Io(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn word(s: &str, lang: LanguageId) -> PyResult<Word> {
    harness::parse_input(s, lang).map_err(err)
}

fn language(s: &str) -> PyResult<LanguageId> {
    s.parse().map_err(err)
}

/// A finite prefix of a set's characteristic sequence.
#[pyclass(name = "Oracle", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyOracle {
    inner: SubsetOracle,
}

#[pymethods]
impl PyOracle {
    #[new]
    fn new(bits: &str) -> PyResult<Self> {
        Ok(Self {
            inner: bits.parse().map_err(err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Oracle('{}')", self.inner)
    }

    fn query(&self, i: u64) -> PyResult<bool> {
        self.inner.query(i).map_err(err)
    }

    /// `p_I` as `(numerator, denominator)`.
    fn coin_bias(&self) -> (BigUint, BigUint) {
        let p = self.inner.coin_bias();
        (p.numer().magnitude().clone(), p.denom().magnitude().clone())
    }

    /// `θ_I / 2π` as a decimal-string fraction `"n/d"`.
    fn rotation_fraction(&self) -> String {
        self.inner.rotation_fraction().to_string()
    }
}

/// Membership of `input` (RLE literal or `n=<N>`) in `lang`.
#[pyfunction]
#[pyo3(signature = (lang, input, oracle=None))]
fn membership(lang: &str, input: &str, oracle: Option<&PyOracle>) -> PyResult<bool> {
    let id = language(lang)?;
    oracles::oracle_membership(id, &word(input, id)?, oracle.map(|o| &o.inner)).map_err(err)
}

/// Members up to `bound`, in RLE form.
#[pyfunction]
#[pyo3(signature = (lang, bound, oracle=None))]
fn enumerate(lang: &str, bound: u64, oracle: Option<&PyOracle>) -> PyResult<Vec<String>> {
    let words = oracles::enumerate_members(language(lang)?, bound, oracle.map(|o| &o.inner));
    Ok(words.map_err(err)?.iter().map(Word::to_string).collect())
}

/// Single-edit non-members near `member`.
#[pyfunction]
#[pyo3(signature = (lang, member, budget, oracle=None))]
fn mutate(
    lang: &str,
    member: &str,
    budget: usize,
    oracle: Option<&PyOracle>,
) -> PyResult<Vec<String>> {
    let id = language(lang)?;
    let words =
        oracles::mutate_near_members(id, &word(member, id)?, budget, oracle.map(|o| &o.inner));
    Ok(words.map_err(err)?.iter().map(Word::to_string).collect())
}

/// `F(n)`, the least non-divisor of `n`.
#[pyfunction]
fn least_non_divisor(n: BigUint) -> PyResult<u64> {
    Ok(f_of_n(&n).map_err(err)?.f)
}

/// `LOG` padding of a binary word, in RLE form.
#[pyfunction]
fn log_pad(w: &str) -> PyResult<String> {
    Ok(log_transform(&w.parse().map_err(err)?)
        .map_err(err)?
        .to_string())
}

/// Exact probability that reading bit `k` from `64^k` tosses errs, as
/// `(numerator, denominator)`.
#[pyfunction]
fn extraction_error(oracle: &PyOracle, k: u32) -> PyResult<(BigUint, BigUint)> {
    let e = coin::exact_error_probability(&oracle.inner, k).map_err(err)?;
    Ok((e.numer().magnitude().clone(), e.denom().magnitude().clone()))
}

/// `(p_in, p_out)` after reading digit `j`; `p_out` is high when bit `j` is set.
#[pyfunction]
fn adh(oracle: &PyOracle, j: u64) -> PyResult<(f64, f64)> {
    let out = quantum::adh_accept_probability(&oracle.inner, j).map_err(err)?;
    Ok((out.p_in, out.p_out))
}

/// Round and overall probabilities of the `POWER-EQ` machine as JSON.
#[pyfunction]
#[pyo3(signature = (input, l="1/64"))]
fn rtqcfa(input: &str, l: &str) -> PyResult<String> {
    let mut cfg = ExperimentConfig::new(harness::Experiment::Adh { j: 1 });
    cfg.l = l.to_owned();
    let l = cfg.l_value().map_err(err)?;
    let (round, _) = quantum::rtqcfa_round(&word(input, LanguageId::PowerEq)?, &l).map_err(err)?;
    let overall = quantum::rtqcfa_overall(&round).map_err(err)?;
    serde_json::to_string(&serde_json::json!({ "round": round, "overall": overall }))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// One run of a classical recognizer; returns its `RunStats` as JSON.
#[pyfunction]
#[pyo3(signature = (recognizer, input, oracle=None, seed=0, repetitions=5, tape="rle"))]
fn run(
    recognizer: &str,
    input: &str,
    oracle: Option<&PyOracle>,
    seed: u64,
    repetitions: u32,
    tape: &str,
) -> PyResult<String> {
    let rec: RecognizerName = recognizer.parse().map_err(err)?;
    let tape = match tape {
        "rle" => TapeMode::Rle,
        "explicit" => TapeMode::Explicit,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown tape mode '{other}'"
            )))
        }
    };
    let ctx = RunContext {
        oracle: oracle.map(|o| o.inner.clone()),
        repetitions,
        freivalds: boundrec::classical::log::conditioned_defaults(),
        tape,
        l: quantum::default_l(),
    };
    let w = word(input, rec.language())?;
    let stats = rec
        .run(&w, &ctx, &mut RandomSource::new(seed))
        .map_err(err)?;
    serde_json::to_string(&stats).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Runs an experiment from its JSON configuration and returns the report in
/// `format` (`"json"` or `"csv"`) with the exit code.
#[pyfunction]
#[pyo3(signature = (config, format="json"))]
fn run_experiment(py: Python<'_>, config: &str, format: &str) -> PyResult<(String, i32)> {
    let cfg = ExperimentConfig::from_json(config).map_err(err)?;
    let format = match format {
        "json" => ReportFormat::Json,
        "csv" => ReportFormat::Csv,
        other => return Err(PyValueError::new_err(format!("unknown format '{other}'"))),
    };
    let report = py.detach(|| harness::run_experiment(&cfg)).map_err(err)?;
    let bytes = harness::emit_report(&report, format).map_err(err)?;
    let text = String::from_utf8(bytes).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((text, report.exit_code()))
}

/// Wilson score interval.
#[pyfunction]
#[pyo3(signature = (successes, trials, confidence=0.99))]
fn wilson(successes: u64, trials: u64, confidence: f64) -> PyResult<(f64, f64)> {
    harness::wilson_interval(successes, trials, confidence).map_err(err)
}

#[pymodule]
fn boundrec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", harness::VERSION)?;
    m.add_class::<PyOracle>()?;
    m.add_function(wrap_pyfunction!(membership, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(mutate, m)?)?;
    m.add_function(wrap_pyfunction!(least_non_divisor, m)?)?;
    m.add_function(wrap_pyfunction!(log_pad, m)?)?;
    m.add_function(wrap_pyfunction!(extraction_error, m)?)?;
    m.add_function(wrap_pyfunction!(adh, m)?)?;
    m.add_function(wrap_pyfunction!(rtqcfa, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(wilson, m)?)?;
    Ok(())
}
