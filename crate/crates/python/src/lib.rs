use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use stemeval::corpus::{CorpusFormat, TokenizerConfig};
use stemeval::normalizer::NormalizerSpec;
use stemeval::report::{self, RunConfig};

fn to_py(e: stemeval::Error) -> PyErr {
    match e {
        stemeval::Error::Io { .. } => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// English Snowball stem of a single word.
#[pyfunction]
fn stem(word: &str) -> String {
    stemeval::normalizer::snowball::stem(word)
}

#[pyfunction]
#[pyo3(signature = (text, lowercase = true, strip_punct = true))]
fn tokenize(text: &str, lowercase: bool, strip_punct: bool) -> Vec<String> {
    stemeval::corpus::tokenize(text, &TokenizerConfig { lowercase, strip_punct })
}

#[pyfunction]
fn levenshtein(a: &str, b: &str) -> usize {
    stemeval::intrinsic::levenshtein(a, b)
}

#[pyfunction]
fn normalized_distance(original: &str, stem: &str) -> PyResult<f64> {
    stemeval::intrinsic::normalized_distance(original, stem).map_err(to_py)
}

#[pyfunction]
fn compression_ratio(vocab_before: usize, vocab_after: usize) -> PyResult<f64> {
    stemeval::intrinsic::CompressionResult::from_counts(vocab_before, vocab_after)
        .map(|r| r.cr)
        .map_err(to_py)
}

#[pyfunction]
fn ses(irs: f64, cr: f64) -> PyResult<f64> {
    stemeval::ses::ses(irs, cr).map_err(to_py)
}

/// "safe" or "unsafe".
#[pyfunction]
#[pyo3(signature = (anld, threshold = stemeval::ses::DEFAULT_SAFETY_THRESHOLD))]
fn safety_gate(anld: f64, threshold: f64) -> &'static str {
    stemeval::ses::safety_gate(anld, threshold).as_str()
}

#[pyfunction]
fn consistency_flag(cr: f64, irs: f64, reported_ses: f64) -> bool {
    stemeval::ses::consistency_flag(cr, irs, reported_ses)
}

/// McNemar p-value from discordant counts.
#[pyfunction]
fn mcnemar(n01: usize, n10: usize) -> f64 {
    stemeval::downstream::mcnemar_from_counts(n01, n10).p_value
}

#[pyfunction]
fn paired_t_test(differences: Vec<f64>) -> f64 {
    stemeval::downstream::paired_t_test(&differences)
}

/// A configured normalizer, built from a spec string such as
/// `snowball-en`, `truncate:4`, `map:path.tsv` or `ext:command`.
#[pyclass(name = "Normalizer")]
struct PyNormalizer {
    inner: stemeval::normalizer::Normalizer,
}

#[pymethods]
impl PyNormalizer {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        let spec = NormalizerSpec::parse(spec).map_err(to_py)?;
        let inner = stemeval::normalizer::Normalizer::new(&spec).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    fn normalize(&self, token: &str) -> PyResult<String> {
        self.inner.normalize_token(token).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Normalizer({:?})", self.inner.name())
    }
}

/// Default run configuration as JSON, for a headered TSV with
/// `id`/`text`/`label` columns.
#[pyfunction]
fn default_config(corpus_path: &str, normalizers: Vec<String>) -> PyResult<String> {
    let specs = normalizers
        .iter()
        .map(|s| NormalizerSpec::parse(s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(to_py)?;
    let format = CorpusFormat {
        text_col: stemeval::corpus::ColumnRef::Name("text".into()),
        label_col: stemeval::corpus::ColumnRef::Name("label".into()),
        id_col: Some(stemeval::corpus::ColumnRef::Name("id".into())),
        delimiter: b'\t',
        has_header: true,
    };
    let config = RunConfig::new(corpus_path, format, specs);
    serde_json::to_string(&config).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn parse_config(config_json: &str) -> PyResult<RunConfig> {
    serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(format!("invalid config: {e}")))
}

/// Runs the full evaluation; config and result are JSON strings.
#[pyfunction]
fn evaluate(py: Python<'_>, config_json: &str) -> PyResult<String> {
    let config = parse_config(config_json)?;
    py.detach(|| {
        let eval = report::run_evaluation(&config)?;
        report::to_json(&eval.reports)
    })
    .map_err(to_py)
}

/// Compression and distortion only.
#[pyfunction]
fn evaluate_intrinsic(py: Python<'_>, config_json: &str) -> PyResult<String> {
    let config = parse_config(config_json)?;
    py.detach(|| {
        let entries = report::run_intrinsic(&config)?;
        report::to_json(&entries)
    })
    .map_err(to_py)
}

/// Markdown table for a JSON report produced by `evaluate`.
#[pyfunction]
fn render_markdown(report_json: &str) -> PyResult<String> {
    let reports = report::from_json(report_json).map_err(to_py)?;
    Ok(report::render_markdown(&reports))
}

#[pymodule]
fn stemeval_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNormalizer>()?;
    m.add_function(wrap_pyfunction!(stem, m)?)?;
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(levenshtein, m)?)?;
    m.add_function(wrap_pyfunction!(normalized_distance, m)?)?;
    m.add_function(wrap_pyfunction!(compression_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(ses, m)?)?;
    m.add_function(wrap_pyfunction!(safety_gate, m)?)?;
    m.add_function(wrap_pyfunction!(consistency_flag, m)?)?;
    m.add_function(wrap_pyfunction!(mcnemar, m)?)?;
    m.add_function(wrap_pyfunction!(paired_t_test, m)?)?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_intrinsic, m)?)?;
    m.add_function(wrap_pyfunction!(render_markdown, m)?)?;
    Ok(())
}
