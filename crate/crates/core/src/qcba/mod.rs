//! Postprocessing of a rule list learnt on discretized data: per-rule tuning
//! against the raw data followed by list-level pruning.

mod extend;
mod grid;
mod overlap;
mod prune;
mod refit;
mod trim;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cba::{firing_rules, post_prune};
use crate::data::{majority, Dataset};
use crate::discretize::DiscretizationMap;
use crate::error::{Error, Result};
use crate::rule::{sort_rules, Rule, RuleList};

pub use extend::{extend_rule, get_extensions, Extension, LiteralProfile};
pub use grid::FinerGrid;
pub use overlap::{drop_range, drop_transaction};
pub use prune::prune_literals;
pub use refit::refit;
pub use trim::trim;

/// Default rule overlap pruning variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DropMode {
    None,
    Transaction,
    Range,
}

impl FromStr for DropMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(DropMode::None),
            "transaction" => Ok(DropMode::Transaction),
            "range" => Ok(DropMode::Range),
            other => Err(Error::InvalidParameter(format!(
                "drop mode must be none, transaction or range, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for DropMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DropMode::None => "none",
            DropMode::Transaction => "transaction",
            DropMode::Range => "range",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QcbaConfig {
    pub refit: bool,
    pub literal_pruning: bool,
    pub trimming: bool,
    pub extension: bool,
    pub postpruning: bool,
    pub drop: DropMode,
    pub min_improvement: f64,
    pub min_cond_improvement: f64,
}

impl Default for QcbaConfig {
    fn default() -> Self {
        QcbaConfig::preset(6).expect("preset 6 exists")
    }
}

impl QcbaConfig {
    /// Stage sets 1 to 7: refit, then literal pruning, trimming, extension,
    /// postpruning, transaction-based drop; 7 uses range-based drop instead.
    pub fn preset(n: u8) -> Result<Self> {
        if !(1..=7).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "QCBA presets are numbered 1 to 7, got {n}"
            )));
        }
        Ok(QcbaConfig {
            refit: true,
            literal_pruning: n >= 2,
            trimming: n >= 3,
            extension: n >= 4,
            postpruning: n >= 5,
            drop: match n {
                6 => DropMode::Transaction,
                7 => DropMode::Range,
                _ => DropMode::None,
            },
            min_improvement: 0.0,
            min_cond_improvement: -1.0,
        })
    }

    /// Every stage off; the output is the input plus a default rule.
    pub fn identity() -> Self {
        QcbaConfig {
            refit: false,
            literal_pruning: false,
            trimming: false,
            extension: false,
            postpruning: false,
            drop: DropMode::None,
            min_improvement: 0.0,
            min_cond_improvement: -1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_improvement > -1.0 && self.min_improvement < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "minimum improvement must be in (-1, 1), got {}",
                self.min_improvement
            )));
        }
        if !(-1.0..=0.0).contains(&self.min_cond_improvement) {
            return Err(Error::InvalidParameter(format!(
                "minimum conditional improvement must be in [-1, 0], got {}",
                self.min_cond_improvement
            )));
        }
        Ok(())
    }
}

/// Apply the enabled per-rule stages to one rule.
pub fn tune_rule(rule: &Rule, raw: &Dataset, grid: &FinerGrid, cfg: &QcbaConfig) -> Result<Rule> {
    let mut r = rule.clone().with_stats(raw)?;
    if cfg.refit {
        r = refit(&r, raw, grid)?;
    }
    if cfg.literal_pruning {
        r = prune_literals(&r, raw)?;
    }
    if cfg.trimming {
        r = trim(&r, raw)?;
    }
    if cfg.extension {
        r = extend_rule(&r, raw, grid, cfg)?;
    }
    Ok(r)
}

/// Postprocess `rules` against the raw training data.
///
/// Rules with an empty antecedent are dropped first. When `map` is given,
/// literals over bin labels are translated to raw intervals. Rules are
/// ranked on the raw data, tuned independently of each other, then pruned.
pub fn optimize(
    rules: &RuleList,
    raw: &Dataset,
    map: Option<&DiscretizationMap>,
    cfg: &QcbaConfig,
) -> Result<RuleList> {
    cfg.validate()?;
    if raw.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let input = RuleList {
        class_attribute: rules.class_attribute.clone(),
        rules: rules
            .rules
            .iter()
            .filter(|r| !r.is_default())
            .cloned()
            .collect(),
    };
    let input = match map {
        Some(m) => m.translate(&input)?,
        None => input,
    };
    input.validate(raw)?;
    let mut ranked: Vec<Rule> = input
        .rules
        .iter()
        .map(|r| r.clone().with_stats(raw))
        .collect::<Result<_>>()?;
    sort_rules(&mut ranked);

    let grid = FinerGrid::new(raw);
    let tuned: Vec<Rule> = ranked
        .par_iter()
        .map(|r| tune_rule(r, raw, &grid, cfg))
        .collect::<Result<_>>()?;
    let tuned = RuleList {
        class_attribute: Some(raw.class_attribute().name.clone()),
        rules: tuned,
    };

    let list = if cfg.postpruning {
        post_prune(&tuned, raw, false)?
    } else {
        with_default(tuned, raw)?
    };
    match cfg.drop {
        DropMode::None => Ok(list),
        DropMode::Transaction => drop_transaction(&list, raw),
        DropMode::Range => drop_range(&list, raw),
    }
}

/// Close a list with a default rule predicting the majority class of the
/// training rows no rule covers, or the overall majority when all are
/// covered. A rule with an empty antecedent already acts as the default; the
/// rules after it are unreachable and removed.
fn with_default(mut list: RuleList, raw: &Dataset) -> Result<RuleList> {
    if let Some(i) = list.rules.iter().position(Rule::is_default) {
        list.rules.truncate(i + 1);
        return Ok(list);
    }
    let fired = firing_rules(&list, raw)?;
    let mut counts = vec![0; raw.class_values().len()];
    for (row, f) in fired.iter().enumerate() {
        if f.is_none() {
            counts[raw.label_codes()[row] as usize] += 1;
        }
    }
    let class = if counts.iter().any(|&c| c > 0) {
        majority(&counts)
    } else {
        raw.majority_class()
    }
    .expect("non-empty training data");
    list.rules
        .push(Rule::default_rule(raw.class_values()[class as usize].clone()).with_stats(raw)?);
    Ok(list)
}
