//! Apriori mining of class association rules over an all-nominal dataset.

use rayon::prelude::*;

use crate::bitset::RowSet;
use crate::data::{AttributeKind, Column, Dataset};
use crate::error::{Error, Result};
use crate::rule::{sort_rules, Literal, NominalSet, Rule, RuleList, RuleStats, ValueRange};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinerParams {
    pub min_support: f64,
    pub min_confidence: f64,
    pub max_antecedent_length: usize,
    pub max_rules: usize,
}

impl Default for MinerParams {
    fn default() -> Self {
        MinerParams {
            min_support: 0.01,
            min_confidence: 0.5,
            max_antecedent_length: 5,
            max_rules: 50_000,
        }
    }
}

impl MinerParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_support > 0.0 && self.min_support <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "minimum support must be in (0, 1], got {}",
                self.min_support
            )));
        }
        if !(0.0..=1.0).contains(&self.min_confidence) {
            return Err(Error::InvalidParameter(format!(
                "minimum confidence must be in [0, 1], got {}",
                self.min_confidence
            )));
        }
        if self.max_antecedent_length == 0 {
            return Err(Error::InvalidParameter(
                "maximum antecedent length must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Smallest absolute rule support that reaches `min_support` on `n` rows.
    pub fn min_count(&self, n: usize) -> usize {
        ((self.min_support * n as f64) - 1e-9).ceil().max(1.0) as usize
    }
}

/// An attribute-value test usable as an antecedent literal. `code` is `None`
/// for the missing marker.
#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub attribute: usize,
    pub code: Option<u32>,
    pub rows: RowSet,
}

impl Item {
    pub fn literal(&self, ds: &Dataset) -> Literal {
        let attr = &ds.attributes()[self.attribute];
        let set = match self.code {
            Some(c) => {
                NominalSet::single(attr.nominal_values().expect("nominal")[c as usize].clone())
            }
            None => NominalSet::missing_only(),
        };
        Literal {
            attribute: attr.name.clone(),
            range: ValueRange::Nominal(set),
        }
    }
}

/// All items of an all-nominal dataset in attribute then code order. The
/// missing marker is an item of originally nominal attributes only. Items
/// satisfied by every row are left out since they never restrict a rule.
pub fn items(ds: &Dataset) -> Result<Vec<Item>> {
    let n = ds.n_rows();
    let mut out = Vec::new();
    for (a, (attr, col)) in ds.attributes().iter().zip(ds.columns()).enumerate() {
        let Column::Nominal(codes) = col else {
            return Err(Error::KindMismatch {
                attribute: attr.name.clone(),
                expected: AttributeKind::Nominal.as_str(),
                found: AttributeKind::Quantitative.as_str(),
            });
        };
        let n_values = attr.nominal_values().map_or(0, |v| v.len());
        let mut sets = vec![RowSet::empty(n); n_values];
        let mut missing = RowSet::empty(n);
        for (row, c) in codes.iter().enumerate() {
            match c {
                Some(c) => sets[*c as usize].insert(row),
                None => missing.insert(row),
            }
        }
        for (c, rows) in sets.into_iter().enumerate() {
            out.push(Item {
                attribute: a,
                code: Some(c as u32),
                rows,
            });
        }
        if !attr.binned && !missing.is_empty() {
            out.push(Item {
                attribute: a,
                code: None,
                rows: missing,
            });
        }
    }
    out.retain(|i| {
        let c = i.rows.count();
        c > 0 && c < n
    });
    Ok(out)
}

/// A frequent antecedent for one class: item indices in ascending order,
/// the rows it covers and how many of them carry the class.
struct Frequent {
    items: Vec<usize>,
    rows: RowSet,
    correct: usize,
}

fn mine_class(
    items: &[Item],
    class_rows: &RowSet,
    min_count: usize,
    max_len: usize,
) -> Vec<Frequent> {
    let mut all = Vec::new();
    let mut level: Vec<Frequent> = items
        .iter()
        .enumerate()
        .filter_map(|(i, item)| {
            let correct = item.rows.intersection_count(class_rows);
            (correct >= min_count).then(|| Frequent {
                items: vec![i],
                rows: item.rows.clone(),
                correct,
            })
        })
        .collect();
    let mut k = 1;
    while !level.is_empty() {
        let next = if k < max_len {
            next_level(&level, items, class_rows, min_count)
        } else {
            Vec::new()
        };
        all.extend(level);
        level = next;
        k += 1;
    }
    all
}

/// Join frequent k-sets sharing their first k-1 items, prune candidates with
/// an infrequent k-subset, then count.
fn next_level(
    level: &[Frequent],
    items: &[Item],
    class_rows: &RowSet,
    min_count: usize,
) -> Vec<Frequent> {
    let known: std::collections::HashSet<&[usize]> =
        level.iter().map(|f| f.items.as_slice()).collect();
    let k = level[0].items.len();
    let mut pairs = Vec::new();
    for (i, a) in level.iter().enumerate() {
        for b in &level[i + 1..] {
            if a.items[..k - 1] != b.items[..k - 1] {
                break;
            }
            let (x, y) = (a.items[k - 1], b.items[k - 1]);
            if items[x].attribute == items[y].attribute {
                continue;
            }
            let mut cand = a.items.clone();
            cand.push(y);
            let all_subsets_frequent = (0..k - 1).all(|skip| {
                let sub: Vec<usize> = cand
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != skip)
                    .map(|(_, &v)| v)
                    .collect();
                known.contains(sub.as_slice())
            });
            if all_subsets_frequent {
                pairs.push((a, y, cand));
            }
        }
    }
    pairs
        .into_par_iter()
        .filter_map(|(a, y, cand)| {
            let mut rows = a.rows.clone();
            rows.intersect_with(&items[y].rows);
            let correct = rows.intersection_count(class_rows);
            (correct >= min_count).then_some(Frequent {
                items: cand,
                rows,
                correct,
            })
        })
        .collect()
}

/// Mine class association rules. Rules satisfy the support and confidence
/// thresholds and the antecedent length cap; they are returned sorted by
/// rank, truncated to `max_rules`.
pub fn mine_car_rules(ds: &Dataset, params: &MinerParams) -> Result<RuleList> {
    params.validate()?;
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = ds.n_rows();
    let items = items(ds)?;
    let min_count = params.min_count(n);
    let classes = ds.class_values();
    let per_class: Vec<Vec<Rule>> = (0..classes.len())
        .into_par_iter()
        .map(|c| {
            let class_rows = RowSet::from_rows(
                n,
                ds.label_codes()
                    .iter()
                    .enumerate()
                    .filter(|(_, &l)| l as usize == c)
                    .map(|(r, _)| r),
            );
            mine_class(&items, &class_rows, min_count, params.max_antecedent_length)
                .into_iter()
                .filter_map(|f| {
                    let stats = RuleStats {
                        covered: f.rows.count(),
                        correct: f.correct,
                        total: n,
                    };
                    (stats.confidence() >= params.min_confidence).then(|| Rule {
                        antecedent: f.items.iter().map(|&i| items[i].literal(ds)).collect(),
                        consequent: classes[c].clone(),
                        stats,
                    })
                })
                .collect()
        })
        .collect();
    let mut rules: Vec<Rule> = per_class.into_iter().flatten().collect();
    sort_rules(&mut rules);
    if rules.len() > params.max_rules {
        log::info!(
            "keeping the top {} of {} mined rules",
            params.max_rules,
            rules.len()
        );
        rules.truncate(params.max_rules);
    }
    Ok(RuleList {
        class_attribute: Some(ds.class_attribute().name.clone()),
        rules,
    })
}
