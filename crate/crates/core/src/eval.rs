//! Stratified cross-validation of the CBA baseline and postprocessing presets.

use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cba::accuracy;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::miner::MinerParams;
use crate::pipeline::build_cba;
use crate::qcba::{optimize, QcbaConfig};
use crate::rule::RuleList;

/// Preset number of the CBA baseline.
pub const BASELINE: u8 = 0;

/// Accuracy differences up to this are ties.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// `k` train/test splits. Rows of each class are shuffled and dealt to folds
/// in turn, continuing where the previous class stopped, so per-class and
/// overall fold sizes differ by at most one. Row indices are ascending.
pub fn stratified_folds(
    ds: &Dataset,
    k: usize,
    seed: u64,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "fold count must be at least 2, got {k}"
        )));
    }
    if k > ds.n_rows() {
        return Err(Error::InvalidParameter(format!(
            "fold count {k} exceeds the {} rows",
            ds.n_rows()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0usize; ds.n_rows()];
    let mut offset = 0;
    for class in 0..ds.class_values().len() as u32 {
        let mut rows: Vec<usize> = (0..ds.n_rows())
            .filter(|&r| ds.label_codes()[r] == class)
            .collect();
        rows.shuffle(&mut rng);
        for (j, r) in rows.iter().enumerate() {
            fold_of[*r] = (offset + j) % k;
        }
        offset += rows.len();
    }
    Ok((0..k)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..ds.n_rows()).partition(|&r| fold_of[r] == f);
            (train, test)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkOptions {
    pub presets: Vec<u8>,
    pub k: usize,
    pub seed: u64,
    pub min_support: f64,
    pub min_confidence: f64,
    pub max_antecedent_length: usize,
    pub max_rules: usize,
}

impl Default for BenchmarkOptions {
    fn default() -> Self {
        let m = MinerParams::default();
        BenchmarkOptions {
            presets: vec![0, 1, 2, 3, 4, 5, 6, 7],
            k: 10,
            seed: 42,
            min_support: m.min_support,
            min_confidence: m.min_confidence,
            max_antecedent_length: m.max_antecedent_length,
            max_rules: m.max_rules,
        }
    }
}

impl BenchmarkOptions {
    pub fn miner(&self) -> MinerParams {
        MinerParams {
            min_support: self.min_support,
            min_confidence: self.min_confidence,
            max_antecedent_length: self.max_antecedent_length,
            max_rules: self.max_rules,
        }
    }

    fn validate(&self) -> Result<()> {
        self.miner().validate()?;
        for &p in &self.presets {
            if p != BASELINE {
                QcbaConfig::preset(p)?;
            }
        }
        if self.presets.is_empty() {
            return Err(Error::InvalidParameter("no presets given".into()));
        }
        Ok(())
    }
}

/// One model evaluated on one test fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub preset: u8,
    pub accuracy: f64,
    /// Rules including the default rule.
    pub rules: usize,
    pub conditions: usize,
    pub build_seconds: f64,
}

/// Fold averages for one preset on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetResult {
    pub dataset: String,
    pub preset: u8,
    pub folds: usize,
    pub accuracy: f64,
    pub avg_rules: f64,
    pub avg_conditions_per_rule: f64,
    pub avg_conditions_per_model: f64,
    pub build_seconds_median: f64,
    pub build_seconds_mean: f64,
}

/// Means over datasets for one preset, with win/tie/loss counts of its
/// accuracy against the baseline preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetSummary {
    pub preset: u8,
    pub accuracy: f64,
    pub avg_rules: f64,
    pub avg_conditions_per_rule: f64,
    pub avg_conditions_per_model: f64,
    pub build_seconds_median: f64,
    pub won: usize,
    pub tie: usize,
    pub lost: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub options: BenchmarkOptions,
    /// Preset the win/tie/loss counts compare against.
    pub baseline: u8,
    pub results: Vec<PresetResult>,
    pub summary: Vec<PresetSummary>,
    pub folds: Vec<(String, FoldResult)>,
    pub notes: Vec<String>,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

fn fold_models(
    train: &Dataset,
    test: &Dataset,
    fold: usize,
    opts: &BenchmarkOptions,
) -> (Vec<FoldResult>, Vec<String>) {
    let mut out = Vec::new();
    let mut notes = Vec::new();
    let score = |preset: u8, list: &RuleList, secs: f64| -> Result<FoldResult> {
        Ok(FoldResult {
            fold,
            preset,
            accuracy: accuracy(list, test)?,
            rules: list.len(),
            conditions: list.condition_count(),
            build_seconds: secs,
        })
    };
    let start = Instant::now();
    let cba = match build_cba(train, &opts.miner()) {
        Ok(c) => c,
        Err(e) => {
            notes.push(format!("fold {fold}: CBA build failed: {e}"));
            return (out, notes);
        }
    };
    let cba_secs = start.elapsed().as_secs_f64();
    for &preset in &opts.presets {
        let result = if preset == BASELINE {
            cba.raw_classifier()
                .and_then(|l| score(preset, &l, cba_secs))
        } else {
            let start = Instant::now();
            QcbaConfig::preset(preset)
                .and_then(|cfg| optimize(&cba.for_tuning, train, Some(&cba.map), &cfg))
                .and_then(|l| score(preset, &l, start.elapsed().as_secs_f64()))
        };
        match result {
            Ok(r) => out.push(r),
            Err(e) => notes.push(format!("fold {fold}: preset {preset} skipped: {e}")),
        }
    }
    (out, notes)
}

/// Cross-validate every preset on one dataset. Discretization and mining are
/// fitted on each training fold only.
pub fn run_benchmark(
    name: &str,
    ds: &Dataset,
    opts: &BenchmarkOptions,
) -> Result<(Vec<PresetResult>, Vec<FoldResult>, Vec<String>)> {
    opts.validate()?;
    let folds = stratified_folds(ds, opts.k, opts.seed)?;
    let per_fold: Vec<(Vec<FoldResult>, Vec<String>)> = folds
        .par_iter()
        .enumerate()
        .map(|(f, (train_rows, test_rows))| {
            let train = ds.subset(train_rows);
            let test = ds.subset(test_rows);
            let (results, mut notes) = fold_models(&train, &test, f, opts);
            let missing: Vec<&str> = ds
                .class_values()
                .iter()
                .filter(|c| train.class_code(c).is_none())
                .map(String::as_str)
                .collect();
            if !missing.is_empty() {
                notes.push(format!(
                    "fold {f}: classes absent from training data: {}",
                    missing.join(", ")
                ));
            }
            (results, notes)
        })
        .collect();
    let mut folds_out = Vec::new();
    let mut notes = Vec::new();
    for (r, n) in per_fold {
        folds_out.extend(r);
        notes.extend(n.into_iter().map(|s| format!("{name} {s}")));
    }
    let results = opts
        .presets
        .iter()
        .map(|&p| {
            let rs: Vec<&FoldResult> = folds_out.iter().filter(|r| r.preset == p).collect();
            let acc: Vec<f64> = rs.iter().map(|r| r.accuracy).collect();
            let rules: Vec<f64> = rs.iter().map(|r| r.rules as f64).collect();
            let conds: Vec<f64> = rs.iter().map(|r| r.conditions as f64).collect();
            let secs: Vec<f64> = rs.iter().map(|r| r.build_seconds).collect();
            let avg_rules = mean(&rules);
            let avg_conds = mean(&conds);
            PresetResult {
                dataset: name.to_string(),
                preset: p,
                folds: rs.len(),
                accuracy: mean(&acc),
                avg_rules,
                avg_conditions_per_rule: avg_conds / avg_rules,
                avg_conditions_per_model: avg_conds,
                build_seconds_median: median(&secs),
                build_seconds_mean: mean(&secs),
            }
        })
        .collect();
    Ok((results, folds_out, notes))
}

/// Cross-validate every preset on every dataset and summarize.
pub fn run_suite(datasets: &[(String, Dataset)], opts: &BenchmarkOptions) -> Result<EvalReport> {
    opts.validate()?;
    let mut results = Vec::new();
    let mut folds = Vec::new();
    let mut notes = Vec::new();
    for (name, ds) in datasets {
        let (r, f, n) = run_benchmark(name, ds, opts)?;
        results.extend(r);
        folds.extend(f.into_iter().map(|f| (name.clone(), f)));
        notes.extend(n);
    }
    let baseline = if opts.presets.contains(&BASELINE) {
        BASELINE
    } else {
        opts.presets[0]
    };
    let summary = opts
        .presets
        .iter()
        .map(|&p| {
            let rs: Vec<&PresetResult> = results.iter().filter(|r| r.preset == p).collect();
            let col =
                |f: fn(&PresetResult) -> f64| mean(&rs.iter().map(|r| f(r)).collect::<Vec<_>>());
            let (mut won, mut tie, mut lost) = (0, 0, 0);
            for r in &rs {
                let base = results
                    .iter()
                    .find(|b| b.dataset == r.dataset && b.preset == baseline)
                    .map(|b| b.accuracy);
                match base {
                    Some(b) if (r.accuracy - b).abs() <= TIE_TOLERANCE => tie += 1,
                    Some(b) if r.accuracy > b => won += 1,
                    Some(_) => lost += 1,
                    None => {}
                }
            }
            let avg_rules = col(|r| r.avg_rules);
            let avg_conds = col(|r| r.avg_conditions_per_model);
            PresetSummary {
                preset: p,
                accuracy: col(|r| r.accuracy),
                avg_rules,
                avg_conditions_per_rule: avg_conds / avg_rules,
                avg_conditions_per_model: avg_conds,
                build_seconds_median: median(
                    &rs.iter()
                        .map(|r| r.build_seconds_median)
                        .collect::<Vec<_>>(),
                ),
                won,
                tie,
                lost,
            }
        })
        .collect();
    Ok(EvalReport {
        options: opts.clone(),
        baseline,
        results,
        summary,
        folds,
        notes,
    })
}

fn preset_name(p: u8) -> String {
    if p == BASELINE {
        "CBA".to_string()
    } else {
        format!("#{p}")
    }
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Per-dataset results as CSV.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "dataset",
            "preset",
            "folds",
            "accuracy",
            "avg_rules",
            "avg_conditions_per_rule",
            "avg_conditions_per_model",
            "build_seconds_median",
            "build_seconds_mean",
        ])?;
        for r in &self.results {
            w.write_record([
                r.dataset.clone(),
                r.preset.to_string(),
                r.folds.to_string(),
                format!("{:.6}", r.accuracy),
                format!("{:.4}", r.avg_rules),
                format!("{:.4}", r.avg_conditions_per_rule),
                format!("{:.4}", r.avg_conditions_per_model),
                format!("{:.6}", r.build_seconds_median),
                format!("{:.6}", r.build_seconds_mean),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Table with one column per preset: per-dataset accuracy and conditions
    /// per model, then the summary rows.
    pub fn to_text(&self) -> String {
        let presets = &self.options.presets;
        let mut datasets: Vec<&str> = Vec::new();
        for r in &self.results {
            if !datasets.contains(&r.dataset.as_str()) {
                datasets.push(&r.dataset);
            }
        }
        let width = datasets.iter().map(|d| d.len()).max().unwrap_or(0).max(28);
        let mut s = String::new();
        let header = |s: &mut String, title: &str| {
            let _ = write!(s, "{title:<width$}");
            for &p in presets {
                let _ = write!(s, " {:>9}", preset_name(p));
            }
            s.push('\n');
        };
        let cell = |d: &str, p: u8, f: fn(&PresetResult) -> f64| {
            self.results
                .iter()
                .find(|r| r.dataset == d && r.preset == p)
                .map(f)
                .unwrap_or(f64::NAN)
        };
        header(&mut s, "accuracy");
        for d in &datasets {
            let _ = write!(s, "{d:<width$}");
            for &p in presets {
                let _ = write!(s, " {:>9.4}", cell(d, p, |r| r.accuracy));
            }
            s.push('\n');
        }
        s.push('\n');
        header(&mut s, "conditions / model");
        for d in &datasets {
            let _ = write!(s, "{d:<width$}");
            for &p in presets {
                let _ = write!(s, " {:>9.1}", cell(d, p, |r| r.avg_conditions_per_model));
            }
            s.push('\n');
        }
        s.push('\n');
        header(&mut s, "summary");
        type Cell = fn(&PresetSummary) -> String;
        let rows: [(&str, Cell); 6] = [
            ("avg accuracy", |x| format!("{:.4}", x.accuracy)),
            ("won/tie/loss vs baseline", |x| {
                format!("{}/{}/{}", x.won, x.tie, x.lost)
            }),
            ("avg conditions/rule", |x| {
                format!("{:.2}", x.avg_conditions_per_rule)
            }),
            ("avg number of rules", |x| format!("{:.1}", x.avg_rules)),
            ("avg conditions/model", |x| {
                format!("{:.1}", x.avg_conditions_per_model)
            }),
            ("median build time (s)", |x| {
                format!("{:.4}", x.build_seconds_median)
            }),
        ];
        for (title, f) in &rows {
            let _ = write!(s, "{title:<width$}");
            for x in &self.summary {
                let _ = write!(s, " {:>9}", f(x));
            }
            s.push('\n');
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}
