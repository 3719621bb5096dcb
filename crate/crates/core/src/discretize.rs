//! Discretization of quantitative attributes into interval bins.
//!
//! Bins are left-open and right-closed, `(a;b]`, except the lowest bin which
//! is written closed on both ends. When a map is applied to unseen data,
//! values below the lowest cut land in the lowest bin and values above the
//! highest cut land in the highest bin.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{AttributeKind, AttributeSchema, Column, Dataset, Domain};
use crate::error::{Error, Result};
use crate::rule::{Bound, Interval, Literal, Rule, RuleList, ValueRange};

/// Cut points of one attribute. `min`/`max` are the observed extremes used
/// for labelling; both are `None` when the attribute had no values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeBins {
    pub cuts: Vec<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

impl AttributeBins {
    pub fn n_bins(&self) -> usize {
        self.cuts.len() + 1
    }

    /// Bin index of a raw value; out-of-range values clamp to the edge bins.
    pub fn bin_of(&self, v: f64) -> usize {
        self.cuts.partition_point(|&c| c < v)
    }

    pub fn label(&self, bin: usize) -> String {
        let lower = if bin == 0 {
            match self.min {
                Some(m) => format!("[{m}"),
                None => "(-inf".to_string(),
            }
        } else {
            format!("({}", self.cuts[bin - 1])
        };
        let upper = if bin + 1 == self.n_bins() {
            match self.max {
                Some(m) => format!("{m}]"),
                None => "+inf)".to_string(),
            }
        } else {
            format!("{}]", self.cuts[bin])
        };
        format!("{lower};{upper}")
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.n_bins()).map(|b| self.label(b)).collect()
    }

    /// Raw-scale interval equivalent to membership in `bin` after clamping:
    /// the edge bins are unbounded outwards.
    pub fn interval(&self, bin: usize) -> Interval {
        Interval {
            lo: (bin > 0).then(|| Bound::exclusive(self.cuts[bin - 1])),
            hi: (bin + 1 < self.n_bins()).then(|| Bound::inclusive(self.cuts[bin])),
        }
    }
}

/// Per-attribute bins for the quantitative attributes of a dataset.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiscretizationMap {
    pub attributes: BTreeMap<String, AttributeBins>,
}

impl DiscretizationMap {
    pub fn get(&self, attribute: &str) -> Option<&AttributeBins> {
        self.attributes.get(attribute)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let map: DiscretizationMap = serde_json::from_str(text)?;
        for (name, bins) in &map.attributes {
            if bins.cuts.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Parse(format!(
                    "cuts of `{name}` are not strictly ascending"
                )));
            }
        }
        Ok(map)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Replace every mapped quantitative column by a nominal column of bin
    /// labels. Other columns and the class are unchanged; missing stays missing.
    pub fn apply(&self, ds: &Dataset) -> Result<Dataset> {
        for name in self.attributes.keys() {
            let (_, attr) = ds.attribute(name)?;
            if attr.kind() != AttributeKind::Quantitative {
                return Err(Error::KindMismatch {
                    attribute: name.clone(),
                    expected: attr.kind().as_str(),
                    found: AttributeKind::Quantitative.as_str(),
                });
            }
        }
        let mut attributes = Vec::with_capacity(ds.attributes().len());
        let mut columns = Vec::with_capacity(ds.attributes().len());
        for (attr, col) in ds.attributes().iter().zip(ds.columns()) {
            match (self.attributes.get(&attr.name), col) {
                (Some(bins), Column::Quantitative(values)) => {
                    let bin_idx: Vec<Option<usize>> =
                        values.iter().map(|v| v.map(|v| bins.bin_of(v))).collect();
                    let mut present = vec![false; bins.n_bins()];
                    for b in bin_idx.iter().flatten() {
                        present[*b] = true;
                    }
                    // codes follow bin order over the bins that occur
                    let mut code_of = vec![u32::MAX; bins.n_bins()];
                    let mut labels = Vec::new();
                    for (b, _) in present.iter().enumerate().filter(|(_, p)| **p) {
                        code_of[b] = labels.len() as u32;
                        labels.push(bins.label(b));
                    }
                    attributes.push(AttributeSchema {
                        name: attr.name.clone(),
                        domain: Domain::Nominal(labels),
                        binned: true,
                    });
                    columns.push(Column::Nominal(
                        bin_idx.iter().map(|b| b.map(|b| code_of[b])).collect(),
                    ));
                }
                _ => {
                    attributes.push(attr.clone());
                    columns.push(col.clone());
                }
            }
        }
        Ok(Dataset::from_encoded(
            attributes,
            columns,
            ds.class_attribute().clone(),
            ds.label_codes().to_vec(),
        ))
    }

    /// Rewrite literals over bin labels as raw-scale intervals. Literals on
    /// unmapped attributes and interval literals pass through unchanged.
    pub fn translate_literal(&self, lit: &Literal) -> Result<Literal> {
        let (Some(bins), ValueRange::Nominal(set)) = (self.get(&lit.attribute), &lit.range) else {
            return Ok(lit.clone());
        };
        if set.missing {
            return Err(Error::Parse(format!(
                "literal `{lit}` uses the missing marker on a discretized attribute"
            )));
        }
        let labels = bins.labels();
        let mut idx = set
            .values
            .iter()
            .map(|v| {
                labels.iter().position(|l| l == v).ok_or_else(|| {
                    Error::Parse(format!("`{v}` is not a bin of `{}`", lit.attribute))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        if idx.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(Error::Parse(format!(
                "literal `{lit}` joins non-adjacent bins"
            )));
        }
        let lo = bins.interval(idx[0]).lo;
        let hi = bins.interval(*idx.last().expect("non-empty set")).hi;
        Ok(Literal::interval(
            lit.attribute.clone(),
            Interval { lo, hi },
        ))
    }

    pub fn translate_rule(&self, rule: &Rule) -> Result<Rule> {
        let antecedent = rule
            .antecedent
            .iter()
            .map(|l| self.translate_literal(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Rule {
            antecedent,
            consequent: rule.consequent.clone(),
            stats: rule.stats,
        })
    }

    pub fn translate(&self, list: &RuleList) -> Result<RuleList> {
        Ok(RuleList {
            class_attribute: list.class_attribute.clone(),
            rules: list
                .rules
                .iter()
                .map(|r| self.translate_rule(r))
                .collect::<Result<_>>()?,
        })
    }
}

/// Non-missing `(value, class)` pairs of column `idx`, sorted by value.
fn sorted_pairs(ds: &Dataset, idx: usize) -> Vec<(f64, u32)> {
    let Column::Quantitative(values) = ds.column(idx) else {
        return Vec::new();
    };
    let mut pairs: Vec<(f64, u32)> = values
        .iter()
        .zip(ds.label_codes())
        .filter_map(|(v, &c)| v.map(|v| (v, c)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    pairs
}

fn quantitative_attrs(ds: &Dataset) -> Vec<usize> {
    ds.attributes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.kind() == AttributeKind::Quantitative)
        .map(|(i, _)| i)
        .collect()
}

fn bins_with(ds: &Dataset, idx: usize, cuts: Vec<f64>) -> AttributeBins {
    let (min, max) = match ds.attributes()[idx].bounds() {
        Some((a, b)) => (Some(a), Some(b)),
        None => (None, None),
    };
    AttributeBins { cuts, min, max }
}

/// Supervised entropy-based discretization with the MDL stopping rule,
/// applied to every quantitative attribute.
pub fn mdlp_discretize(ds: &Dataset) -> DiscretizationMap {
    let n_classes = ds.class_values().len();
    let attributes = quantitative_attrs(ds)
        .into_par_iter()
        .map(|idx| {
            let pairs = sorted_pairs(ds, idx);
            let cuts = mdlp::cut_points(&pairs, n_classes);
            (ds.attributes()[idx].name.clone(), bins_with(ds, idx, cuts))
        })
        .collect();
    DiscretizationMap { attributes }
}

/// Split each quantitative attribute's observed `[min, max]` into `bin_count`
/// equal-width bins. Constant attributes get a single bin.
pub fn equal_width_discretize(ds: &Dataset, bin_count: usize) -> Result<DiscretizationMap> {
    if bin_count < 2 {
        return Err(Error::InvalidParameter(format!(
            "bin count must be at least 2, got {bin_count}"
        )));
    }
    let attributes = quantitative_attrs(ds)
        .into_iter()
        .map(|idx| {
            let cuts = match ds.attributes()[idx].bounds() {
                Some((min, max)) if min < max => {
                    let width = (max - min) / bin_count as f64;
                    (1..bin_count).map(|i| min + width * i as f64).collect()
                }
                _ => Vec::new(),
            };
            (ds.attributes()[idx].name.clone(), bins_with(ds, idx, cuts))
        })
        .collect();
    Ok(DiscretizationMap { attributes })
}

pub mod mdlp {
    //! Recursive binary splitting on class entropy, accepting a split only
    //! while it passes the minimum description length test.

    /// Entropy in bits of a class-count vector.
    pub fn entropy(counts: &[usize]) -> f64 {
        let n: usize = counts.iter().sum();
        if n == 0 {
            return 0.0;
        }
        let n = n as f64;
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.log2()
            })
            .sum()
    }

    fn distinct_classes(counts: &[usize]) -> usize {
        counts.iter().filter(|&&c| c > 0).count()
    }

    /// Whether splitting `total` into `left` and `right` passes the MDL test.
    pub fn accepts_split(total: &[usize], left: &[usize], right: &[usize]) -> bool {
        let n: usize = total.iter().sum();
        let nl: usize = left.iter().sum();
        let nr: usize = right.iter().sum();
        if n < 2 || nl == 0 || nr == 0 {
            return false;
        }
        let nf = n as f64;
        let ent = entropy(total);
        let ent_l = entropy(left);
        let ent_r = entropy(right);
        let weighted = (nl as f64 / nf) * ent_l + (nr as f64 / nf) * ent_r;
        let gain = ent - weighted;
        let k = distinct_classes(total) as f64;
        let k1 = distinct_classes(left) as f64;
        let k2 = distinct_classes(right) as f64;
        let delta = (3f64.powf(k) - 2.0).log2() - (k * ent - k1 * ent_l - k2 * ent_r);
        gain > ((nf - 1.0).log2() + delta) / nf
    }

    /// Value groups: distinct values with their class counts.
    fn groups(pairs: &[(f64, u32)], n_classes: usize) -> Vec<(f64, Vec<usize>)> {
        let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
        for &(v, c) in pairs {
            match out.last_mut() {
                Some((last, counts)) if *last == v => counts[c as usize] += 1,
                _ => {
                    let mut counts = vec![0; n_classes];
                    counts[c as usize] += 1;
                    out.push((v, counts));
                }
            }
        }
        out
    }

    fn single_class(counts: &[usize]) -> Option<usize> {
        let mut it = counts.iter().enumerate().filter(|(_, &c)| c > 0);
        let first = it.next()?.0;
        it.next().is_none().then_some(first)
    }

    /// Cut points for pairs sorted by value. Candidates are midpoints between
    /// consecutive distinct values, skipping those between two groups that are
    /// both pure in the same class. Equal-entropy ties go to the smaller cut.
    pub fn cut_points(pairs: &[(f64, u32)], n_classes: usize) -> Vec<f64> {
        let groups = groups(pairs, n_classes);
        let mut cuts = Vec::new();
        split(&groups, n_classes, &mut cuts);
        cuts
    }

    fn split(groups: &[(f64, Vec<usize>)], n_classes: usize, cuts: &mut Vec<f64>) {
        if groups.len() < 2 {
            return;
        }
        let mut total = vec![0; n_classes];
        for (_, c) in groups {
            for (t, x) in total.iter_mut().zip(c) {
                *t += x;
            }
        }
        let n: usize = total.iter().sum();
        let mut left = vec![0; n_classes];
        let mut best: Option<(usize, f64, Vec<usize>)> = None;
        for g in 0..groups.len() - 1 {
            for (l, x) in left.iter_mut().zip(&groups[g].1) {
                *l += x;
            }
            let a = single_class(&groups[g].1);
            if a.is_some() && a == single_class(&groups[g + 1].1) {
                continue;
            }
            let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
            let nl: usize = left.iter().sum();
            let e = (nl as f64 * entropy(&left) + (n - nl) as f64 * entropy(&right)) / n as f64;
            if best.as_ref().is_none_or(|(_, be, _)| e < be - 1e-12) {
                best = Some((g, e, left.clone()));
            }
        }
        let Some((g, _, left)) = best else {
            return;
        };
        let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
        if !accepts_split(&total, &left, &right) {
            return;
        }
        split(&groups[..=g], n_classes, cuts);
        cuts.push((groups[g].0 + groups[g + 1].0) / 2.0);
        split(&groups[g + 1..], n_classes, cuts);
    }
}
