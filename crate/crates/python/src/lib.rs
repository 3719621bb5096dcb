//! Python bindings for `qrule`.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use qrule::cba;
use qrule::discretize::{equal_width_discretize, mdlp_discretize};
use qrule::eval::{run_suite, BenchmarkOptions, EvalReport};
use qrule::miner::mine_car_rules;
use qrule::parallel::with_jobs;
use qrule::{pipeline, qcba, AttributeKind, CsvOptions, DropMode, MinerParams, QcbaConfig};

fn err(e: qrule::Error) -> PyErr {
    match e {
        qrule::Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn csv_options(
    class_column: Option<String>,
    kinds: Option<Vec<(String, String)>>,
) -> PyResult<CsvOptions> {
    let mut opts = CsvOptions {
        class_column,
        ..Default::default()
    };
    for (name, kind) in kinds.unwrap_or_default() {
        let kind = match kind.as_str() {
            "nominal" => AttributeKind::Nominal,
            "quantitative" => AttributeKind::Quantitative,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown attribute kind `{other}`"
                )))
            }
        };
        opts.kinds.insert(name, kind);
    }
    Ok(opts)
}

fn miner_params(
    min_support: f64,
    min_confidence: f64,
    max_length: usize,
    max_rules: usize,
) -> MinerParams {
    MinerParams {
        min_support,
        min_confidence,
        max_antecedent_length: max_length,
        max_rules,
    }
}

/// A table of nominal and quantitative attributes with a class column.
#[pyclass(module = "pyqrule", frozen, from_py_object)]
#[derive(Clone)]
struct Dataset(qrule::Dataset);

#[pymethods]
impl Dataset {
    /// Load a CSV file. `kinds` forces attribute kinds as
    /// `[(name, "nominal" | "quantitative")]`.
    #[staticmethod]
    #[pyo3(signature = (path, class_column=None, kinds=None))]
    fn from_csv(
        path: &str,
        class_column: Option<String>,
        kinds: Option<Vec<(String, String)>>,
    ) -> PyResult<Self> {
        let opts = csv_options(class_column, kinds)?;
        qrule::Dataset::load_csv(path, &opts)
            .map(Dataset)
            .map_err(err)
    }

    /// Parse CSV text.
    #[staticmethod]
    #[pyo3(signature = (text, class_column=None, kinds=None))]
    fn from_csv_text(
        text: &str,
        class_column: Option<String>,
        kinds: Option<Vec<(String, String)>>,
    ) -> PyResult<Self> {
        let opts = csv_options(class_column, kinds)?;
        qrule::Dataset::read_csv(text.as_bytes(), &opts)
            .map(Dataset)
            .map_err(err)
    }

    fn to_csv_text(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.0.write_csv(&mut buf).map_err(err)?;
        String::from_utf8(buf).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Rows at the given indices, in that order.
    fn subset(&self, rows: Vec<usize>) -> PyResult<Self> {
        if let Some(&r) = rows.iter().find(|&&r| r >= self.0.n_rows()) {
            return Err(PyValueError::new_err(format!("row {r} out of range")));
        }
        Ok(Dataset(self.0.subset(&rows)))
    }

    #[getter]
    fn n_rows(&self) -> usize {
        self.0.n_rows()
    }

    /// `(name, kind)` of every attribute, class excluded.
    #[getter]
    fn attributes(&self) -> Vec<(String, &'static str)> {
        self.0
            .attributes()
            .iter()
            .map(|a| (a.name.clone(), a.kind().as_str()))
            .collect()
    }

    #[getter]
    fn class_values(&self) -> Vec<String> {
        self.0.class_values().to_vec()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        (0..self.0.n_rows())
            .map(|r| self.0.label(r).to_string())
            .collect()
    }

    fn __len__(&self) -> usize {
        self.0.n_rows()
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset({} rows, {} attributes)",
            self.0.n_rows(),
            self.0.attributes().len()
        )
    }
}

/// Cut points of each discretized attribute.
#[pyclass(module = "pyqrule", frozen, from_py_object)]
#[derive(Clone)]
struct DiscretizationMap(qrule::DiscretizationMap);

#[pymethods]
impl DiscretizationMap {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        qrule::DiscretizationMap::from_json(text)
            .map(DiscretizationMap)
            .map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(err)
    }

    /// Replace quantitative values by their bin labels.
    fn apply(&self, ds: &Dataset) -> PyResult<Dataset> {
        self.0.apply(&ds.0).map(Dataset).map_err(err)
    }

    /// Rewrite literals over bin labels as raw intervals.
    fn translate(&self, rules: &RuleList) -> PyResult<RuleList> {
        self.0.translate(&rules.0).map(RuleList).map_err(err)
    }
}

/// An ordered rule list; the first matching rule classifies a row.
#[pyclass(module = "pyqrule", frozen, from_py_object)]
#[derive(Clone)]
struct RuleList(qrule::RuleList);

#[pymethods]
impl RuleList {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        qrule::RuleList::from_json(text).map(RuleList).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        qrule::RuleList::load(path).map(RuleList).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(err)
    }

    /// Each rule as `{a=v, b=[lo;hi]} => class=c`.
    fn rules(&self) -> Vec<String> {
        self.0.rules.iter().map(ToString::to_string).collect()
    }

    /// `(covered, correct, confidence, support)` of each rule.
    fn stats(&self) -> Vec<(usize, usize, f64, f64)> {
        self.0
            .rules
            .iter()
            .map(|r| {
                (
                    r.stats.covered,
                    r.stats.correct,
                    r.confidence(),
                    r.support(),
                )
            })
            .collect()
    }

    fn condition_count(&self) -> usize {
        self.0.condition_count()
    }

    /// Whether the list ends with a default rule.
    fn is_classifier_ready(&self) -> bool {
        self.0.is_classifier_ready()
    }

    /// Predicted class of every row; `None` where no rule matches.
    fn predict(&self, py: Python<'_>, ds: &Dataset) -> PyResult<Vec<Option<String>>> {
        py.detach(|| cba::predict(&self.0, &ds.0)).map_err(err)
    }

    fn accuracy(&self, py: Python<'_>, ds: &Dataset) -> PyResult<f64> {
        py.detach(|| cba::accuracy(&self.0, &ds.0)).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "RuleList({} rules, {} conditions)",
            self.0.len(),
            self.0.condition_count()
        )
    }
}

/// Cross-validation results.
#[pyclass(module = "pyqrule", frozen)]
struct Report(EvalReport);

#[pymethods]
impl Report {
    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(err)
    }

    fn to_csv(&self) -> PyResult<String> {
        self.0.to_csv().map_err(err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    /// `(preset, mean accuracy, mean rules, mean conditions per model)`
    /// averaged over datasets.
    fn summary(&self) -> Vec<(u8, f64, f64, f64)> {
        self.0
            .summary
            .iter()
            .map(|s| {
                (
                    s.preset,
                    s.accuracy,
                    s.avg_rules,
                    s.avg_conditions_per_model,
                )
            })
            .collect()
    }

    #[getter]
    fn notes(&self) -> Vec<String> {
        self.0.notes.clone()
    }
}

#[allow(clippy::too_many_arguments)]
fn config(
    preset: u8,
    refit: Option<bool>,
    literal_pruning: Option<bool>,
    trimming: Option<bool>,
    extension: Option<bool>,
    postpruning: Option<bool>,
    drop: Option<&str>,
    min_improvement: Option<f64>,
    min_cond_improvement: Option<f64>,
) -> PyResult<QcbaConfig> {
    let mut c = QcbaConfig::preset(preset).map_err(err)?;
    c.refit = refit.unwrap_or(c.refit);
    c.literal_pruning = literal_pruning.unwrap_or(c.literal_pruning);
    c.trimming = trimming.unwrap_or(c.trimming);
    c.extension = extension.unwrap_or(c.extension);
    c.postpruning = postpruning.unwrap_or(c.postpruning);
    if let Some(d) = drop {
        c.drop = match d {
            "none" => DropMode::None,
            "transaction" => DropMode::Transaction,
            "range" => DropMode::Range,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown drop mode `{other}`"
                )))
            }
        };
    }
    c.min_improvement = min_improvement.unwrap_or(c.min_improvement);
    c.min_cond_improvement = min_cond_improvement.unwrap_or(c.min_cond_improvement);
    c.validate().map_err(err)?;
    Ok(c)
}

/// Entropy-based (MDLP) discretization of every quantitative attribute.
#[pyfunction]
fn mdlp(py: Python<'_>, ds: &Dataset) -> DiscretizationMap {
    DiscretizationMap(py.detach(|| mdlp_discretize(&ds.0)))
}

#[pyfunction]
fn equal_width(ds: &Dataset, bins: usize) -> PyResult<DiscretizationMap> {
    equal_width_discretize(&ds.0, bins)
        .map(DiscretizationMap)
        .map_err(err)
}

/// Class association rules of an all-nominal dataset, ranked.
#[pyfunction]
#[pyo3(signature = (ds, min_support=0.01, min_confidence=0.5, max_length=5, max_rules=50_000))]
fn mine(
    py: Python<'_>,
    ds: &Dataset,
    min_support: f64,
    min_confidence: f64,
    max_length: usize,
    max_rules: usize,
) -> PyResult<RuleList> {
    let params = miner_params(min_support, min_confidence, max_length, max_rules);
    py.detach(|| mine_car_rules(&ds.0, &params))
        .map(RuleList)
        .map_err(err)
}

/// Data coverage and default rule pruning of mined rules.
#[pyfunction]
#[pyo3(signature = (rules, ds, keep_all=false))]
fn post_prune(
    py: Python<'_>,
    rules: &RuleList,
    ds: &Dataset,
    keep_all: bool,
) -> PyResult<RuleList> {
    py.detach(|| cba::post_prune(&rules.0, &ds.0, keep_all))
        .map(RuleList)
        .map_err(err)
}

/// CBA classifier over raw intervals, with the MDLP map it was built on.
#[pyfunction]
#[pyo3(signature = (ds, min_support=0.01, min_confidence=0.5, max_length=5, max_rules=50_000))]
fn build_cba(
    py: Python<'_>,
    ds: &Dataset,
    min_support: f64,
    min_confidence: f64,
    max_length: usize,
    max_rules: usize,
) -> PyResult<(RuleList, DiscretizationMap)> {
    let params = miner_params(min_support, min_confidence, max_length, max_rules);
    py.detach(|| {
        let models = pipeline::build_cba(&ds.0, &params)?;
        Ok((
            RuleList(models.raw_classifier()?),
            DiscretizationMap(models.map),
        ))
    })
    .map_err(err)
}

/// Build a CBA model and postprocess it. Stage keywords override the preset.
#[pyfunction]
#[pyo3(signature = (
    ds, preset=6, *, refit=None, literal_pruning=None, trimming=None, extension=None,
    postpruning=None, drop=None, min_improvement=None, min_cond_improvement=None,
    min_support=0.01, min_confidence=0.5, max_length=5, max_rules=50_000, jobs=None
))]
#[allow(clippy::too_many_arguments)]
fn build_qcba(
    py: Python<'_>,
    ds: &Dataset,
    preset: u8,
    refit: Option<bool>,
    literal_pruning: Option<bool>,
    trimming: Option<bool>,
    extension: Option<bool>,
    postpruning: Option<bool>,
    drop: Option<&str>,
    min_improvement: Option<f64>,
    min_cond_improvement: Option<f64>,
    min_support: f64,
    min_confidence: f64,
    max_length: usize,
    max_rules: usize,
    jobs: Option<usize>,
) -> PyResult<RuleList> {
    let cfg = config(
        preset,
        refit,
        literal_pruning,
        trimming,
        extension,
        postpruning,
        drop,
        min_improvement,
        min_cond_improvement,
    )?;
    let params = miner_params(min_support, min_confidence, max_length, max_rules);
    py.detach(|| with_jobs(jobs, || pipeline::build_qcba(&ds.0, &params, &cfg)))
        .map_err(err)?
        .map(RuleList)
        .map_err(err)
}

/// Postprocess `rules` against raw training data. `map` translates literals
/// over bin labels to raw intervals.
#[pyfunction]
#[pyo3(signature = (
    rules, ds, map=None, preset=6, *, refit=None, literal_pruning=None, trimming=None,
    extension=None, postpruning=None, drop=None, min_improvement=None,
    min_cond_improvement=None, jobs=None
))]
#[allow(clippy::too_many_arguments)]
fn optimize(
    py: Python<'_>,
    rules: &RuleList,
    ds: &Dataset,
    map: Option<&DiscretizationMap>,
    preset: u8,
    refit: Option<bool>,
    literal_pruning: Option<bool>,
    trimming: Option<bool>,
    extension: Option<bool>,
    postpruning: Option<bool>,
    drop: Option<&str>,
    min_improvement: Option<f64>,
    min_cond_improvement: Option<f64>,
    jobs: Option<usize>,
) -> PyResult<RuleList> {
    let cfg = config(
        preset,
        refit,
        literal_pruning,
        trimming,
        extension,
        postpruning,
        drop,
        min_improvement,
        min_cond_improvement,
    )?;
    let map = map.map(|m| &m.0);
    py.detach(|| with_jobs(jobs, || qcba::optimize(&rules.0, &ds.0, map, &cfg)))
        .map_err(err)?
        .map(RuleList)
        .map_err(err)
}

/// Stratified k-fold comparison of CBA (preset 0) and the postprocessing
/// presets over named datasets.
#[pyfunction]
#[pyo3(signature = (
    datasets, presets=vec![0, 1, 2, 3, 4, 5, 6, 7], k=10, seed=42,
    min_support=0.01, min_confidence=0.5, max_length=5, max_rules=50_000, jobs=None
))]
#[allow(clippy::too_many_arguments)]
fn benchmark(
    py: Python<'_>,
    datasets: Vec<(String, Dataset)>,
    presets: Vec<u8>,
    k: usize,
    seed: u64,
    min_support: f64,
    min_confidence: f64,
    max_length: usize,
    max_rules: usize,
    jobs: Option<usize>,
) -> PyResult<Report> {
    let opts = BenchmarkOptions {
        presets,
        k,
        seed,
        min_support,
        min_confidence,
        max_antecedent_length: max_length,
        max_rules,
    };
    let data: Vec<(String, qrule::Dataset)> = datasets.into_iter().map(|(n, d)| (n, d.0)).collect();
    py.detach(|| with_jobs(jobs, || run_suite(&data, &opts)))
        .map_err(err)?
        .map(Report)
        .map_err(err)
}

#[pymodule]
fn pyqrule(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dataset>()?;
    m.add_class::<DiscretizationMap>()?;
    m.add_class::<RuleList>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(mdlp, m)?)?;
    m.add_function(wrap_pyfunction!(equal_width, m)?)?;
    m.add_function(wrap_pyfunction!(mine, m)?)?;
    m.add_function(wrap_pyfunction!(post_prune, m)?)?;
    m.add_function(wrap_pyfunction!(build_cba, m)?)?;
    m.add_function(wrap_pyfunction!(build_qcba, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(benchmark, m)?)?;
    Ok(())
}
