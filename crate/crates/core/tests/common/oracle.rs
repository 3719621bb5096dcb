//! Straightforward reimplementations used as reference results.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use qrule::rule::{NominalSet, RuleStats, ValueRange};
use qrule::{Dataset, Literal, Rule, RuleList};

use super::{cell, cmp_confidence, naive_matches, naive_stats, Cell};

/// Most frequent class among `rows`, ties to the earliest class value.
fn most_frequent(ds: &Dataset, rows: &[usize]) -> usize {
    let mut counts = vec![0usize; ds.class_values().len()];
    for &r in rows {
        counts[ds.label_codes()[r] as usize] += 1;
    }
    let mut best = 0;
    for (c, &n) in counts.iter().enumerate() {
        if n > counts[best] {
            best = c;
        }
    }
    best
}

fn errors(ds: &Dataset, rows: &[usize], class: usize) -> usize {
    rows.iter()
        .filter(|&&r| ds.label_codes()[r] as usize != class)
        .count()
}

/// Data coverage pruning followed by default rule pruning, written out step
/// by step over plain row vectors.
pub fn post_prune(
    input: &RuleList,
    t_all: &Dataset,
    keep_all: bool,
) -> Vec<(Vec<Literal>, String)> {
    let mut rules: Vec<(Rule, RuleStats)> = input
        .rules
        .iter()
        .map(|r| (r.clone(), naive_stats(r, t_all)))
        .collect();
    rules.sort_by(|(a, sa), (b, sb)| {
        cmp_confidence(sb, sa)
            .then(sb.correct.cmp(&sa.correct))
            .then(a.antecedent.len().cmp(&b.antecedent.len()))
    });

    let mut t: Vec<usize> = (0..t_all.n_rows()).collect();
    let mut def_class = most_frequent(t_all, &t);
    let mut cutoff_class = def_class;
    let mut lowest_total_error = errors(t_all, &t, cutoff_class);
    let mut total_errors_without_default = 0;
    let mut cutoff_rule: Option<usize> = None;
    let mut kept: Vec<Rule> = Vec::new();

    for (r, _) in rules {
        let covered: Vec<usize> = t
            .iter()
            .copied()
            .filter(|&row| naive_matches(&r, t_all, row))
            .collect();
        let corr_covered = covered
            .iter()
            .filter(|&&row| t_all.label(row) == r.consequent)
            .count();
        t.retain(|row| !covered.contains(row));
        if corr_covered == 0 {
            continue;
        }
        let misclassified = covered.len() - corr_covered;
        if !t.is_empty() {
            def_class = most_frequent(t_all, &t);
        }
        total_errors_without_default += misclassified;
        let default_rule_error = errors(t_all, &t, def_class);
        let total_error_with_default = default_rule_error + total_errors_without_default;
        kept.push(r);
        if total_error_with_default < lowest_total_error {
            cutoff_rule = Some(kept.len() - 1);
            lowest_total_error = total_error_with_default;
            cutoff_class = def_class;
        }
    }

    let (mut rules, class) = if keep_all {
        (kept, def_class)
    } else {
        kept.truncate(cutoff_rule.map_or(0, |i| i + 1));
        (kept, cutoff_class)
    };
    if rules.last().is_none_or(|r| !r.antecedent.is_empty()) {
        rules.push(Rule::default_rule(t_all.class_values()[class].clone()));
    }
    rules
        .into_iter()
        .map(|r| (r.antecedent, r.consequent))
        .collect()
}

/// A mined rule in canonical form: sorted (attribute, value) pairs, with
/// `None` for the missing marker.
pub type MinedRule = (BTreeSet<(String, Option<String>)>, String, usize, usize);

pub fn canonical(rule: &Rule) -> MinedRule {
    let ante = rule
        .antecedent
        .iter()
        .map(|l| match &l.range {
            ValueRange::Nominal(NominalSet { values, missing }) => {
                assert!(
                    values.len() + usize::from(*missing) == 1,
                    "single-value literal expected"
                );
                (l.attribute.clone(), values.first().cloned())
            }
            ValueRange::Interval(_) => panic!("mined literal over an interval"),
        })
        .collect();
    (
        ante,
        rule.consequent.clone(),
        rule.stats.covered,
        rule.stats.correct,
    )
}

/// An attribute, a value (`None` for missing) and the rows it matches.
type Item = (String, Option<String>, Vec<bool>);

/// Every antecedent of up to `max_len` attribute-value tests, kept per class
/// when it reaches both thresholds. Tests matching no row or every row are not
/// used, and the missing marker is a value only of attributes not produced by
/// binning.
pub fn mine(
    ds: &Dataset,
    min_support: f64,
    min_confidence: f64,
    max_len: usize,
) -> BTreeSet<MinedRule> {
    let n = ds.n_rows();
    let per_attr: Vec<Vec<Item>> = ds
        .attributes()
        .iter()
        .enumerate()
        .map(|(a, schema)| {
            let mut values: Vec<Option<String>> = schema
                .nominal_values()
                .unwrap()
                .iter()
                .cloned()
                .map(Some)
                .collect();
            if !schema.binned {
                values.push(None);
            }
            values
                .into_iter()
                .filter_map(|v| {
                    let hits: Vec<bool> = (0..n)
                        .map(|r| match (cell(ds, r, a), &v) {
                            (Cell::Missing, None) => true,
                            (Cell::Nominal(x), Some(y)) => &x == y,
                            _ => false,
                        })
                        .collect();
                    let c = hits.iter().filter(|&&h| h).count();
                    (c > 0 && c < n).then(|| (schema.name.clone(), v, hits))
                })
                .collect()
        })
        .collect();

    let mut out = BTreeSet::new();
    let mut chosen: Vec<&Item> = Vec::new();
    enumerate(&per_attr, 0, max_len, &mut chosen, &mut |items| {
        if items.is_empty() {
            return;
        }
        let rows: Vec<usize> = (0..n).filter(|&r| items.iter().all(|i| i.2[r])).collect();
        for class in ds.class_values() {
            let correct = rows.iter().filter(|&&r| ds.label(r) == class).count();
            let support_ok = correct as f64 >= min_support * n as f64 - 1e-9;
            let conf_ok = !rows.is_empty() && correct as f64 / rows.len() as f64 >= min_confidence;
            if correct > 0 && support_ok && conf_ok {
                let ante = items.iter().map(|i| (i.0.clone(), i.1.clone())).collect();
                out.insert((ante, class.clone(), rows.len(), correct));
            }
        }
    });
    out
}

fn enumerate<'a, T>(
    per_attr: &'a [Vec<T>],
    attr: usize,
    room: usize,
    chosen: &mut Vec<&'a T>,
    visit: &mut impl FnMut(&[&'a T]),
) {
    if attr == per_attr.len() {
        visit(chosen);
        return;
    }
    enumerate(per_attr, attr + 1, room, chosen, visit);
    if room > 0 {
        for item in &per_attr[attr] {
            chosen.push(item);
            enumerate(per_attr, attr + 1, room - 1, chosen, visit);
            chosen.pop();
        }
    }
}

fn entropy(labels: &[usize], classes: usize) -> f64 {
    let mut counts = vec![0usize; classes];
    for &l in labels {
        counts[l] += 1;
    }
    let n = labels.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn class_count(labels: &[usize]) -> usize {
    labels.iter().collect::<BTreeSet<_>>().len()
}

/// Entropy-minimising binary splits over every midpoint between distinct
/// values, recursively, while the MDL test accepts the split.
pub fn mdlp(pairs: &[(f64, usize)], classes: usize) -> Vec<f64> {
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cuts = Vec::new();
    mdlp_rec(&sorted, classes, &mut cuts);
    cuts.sort_by(f64::total_cmp);
    cuts
}

fn mdlp_rec(s: &[(f64, usize)], classes: usize, cuts: &mut Vec<f64>) {
    let n = s.len();
    let labels: Vec<usize> = s.iter().map(|p| p.1).collect();
    let mut best: Option<(usize, f64)> = None;
    for i in 1..n {
        if s[i - 1].0 == s[i].0 {
            continue;
        }
        let e = (i as f64 * entropy(&labels[..i], classes)
            + (n - i) as f64 * entropy(&labels[i..], classes))
            / n as f64;
        if best.is_none_or(|(_, b)| e < b - 1e-12) {
            best = Some((i, e));
        }
    }
    let Some((i, e)) = best else { return };
    let (l, r) = (&labels[..i], &labels[i..]);
    let ent = entropy(&labels, classes);
    let gain = ent - e;
    let (k, k1, k2) = (
        class_count(&labels) as f64,
        class_count(l) as f64,
        class_count(r) as f64,
    );
    let delta = (3f64.powf(k) - 2.0).log2()
        - (k * ent - k1 * entropy(l, classes) - k2 * entropy(r, classes));
    if gain <= ((n as f64 - 1.0).log2() + delta) / n as f64 {
        return;
    }
    cuts.push((s[i - 1].0 + s[i].0) / 2.0);
    mdlp_rec(&s[..i], classes, cuts);
    mdlp_rec(&s[i..], classes, cuts);
}

/// Order check for a mined list: each rule ranks no lower than the next.
pub fn ranked(rules: &[Rule]) -> bool {
    rules.windows(2).all(|w| {
        let (a, b) = (&w[0].stats, &w[1].stats);
        match cmp_confidence(a, b) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => match a.correct.cmp(&b.correct) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => w[0].antecedent.len() <= w[1].antecedent.len(),
            },
        }
    })
}
