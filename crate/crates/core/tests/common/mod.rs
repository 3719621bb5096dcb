//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

pub mod criteria;
pub mod invariants;
pub mod oracle;

use std::cmp::Ordering;

use qrule::data::{Column, RawColumn};
use qrule::rule::{Bound, Interval, NominalSet, RuleStats, ValueRange};
use qrule::{Dataset, Literal, Rule, RuleList};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of a random dataset.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub rows: usize,
    pub attributes: usize,
    pub classes: usize,
    /// Chance that an attribute is nominal.
    pub nominal: f64,
    /// Chance that a cell is missing.
    pub missing: f64,
    /// Largest number of distinct values per attribute.
    pub values: usize,
}

impl Shape {
    pub fn small(rows: usize, attributes: usize) -> Self {
        Shape {
            rows,
            attributes,
            classes: 3,
            nominal: 0.25,
            missing: 0.03,
            values: 10,
        }
    }
}

/// Random dataset whose class partly follows the first attribute, so rules
/// reach useful confidence.
pub fn dataset(rng: &mut ChaCha8Rng, shape: Shape) -> Dataset {
    let mut codes = vec![vec![None; shape.rows]; shape.attributes];
    let mut nominal = vec![false; shape.attributes];
    let mut sizes = vec![0; shape.attributes];
    for a in 0..shape.attributes {
        nominal[a] = rng.random_bool(shape.nominal);
        sizes[a] = rng.random_range(2..=shape.values.max(2));
        for cell in codes[a].iter_mut() {
            if !rng.random_bool(shape.missing) {
                *cell = Some(rng.random_range(0..sizes[a]));
            }
        }
    }
    let labels: Vec<String> = (0..shape.rows)
        .map(|r| {
            let class = match codes[0][r] {
                Some(v) if rng.random_bool(0.7) => v * shape.classes / sizes[0],
                _ => rng.random_range(0..shape.classes),
            };
            format!("c{class}")
        })
        .collect();
    let columns = (0..shape.attributes)
        .map(|a| {
            let col = if nominal[a] {
                RawColumn::Nominal(
                    codes[a]
                        .iter()
                        .map(|c| c.map(|v| format!("v{v}")))
                        .collect(),
                )
            } else {
                RawColumn::Quantitative(
                    codes[a].iter().map(|c| c.map(|v| v as f64 * 1.5)).collect(),
                )
            };
            (format!("a{a}"), col)
        })
        .collect();
    Dataset::from_columns(columns, "class", labels).unwrap()
}

/// Observed values of a quantitative attribute, sorted and distinct.
pub fn observed(ds: &Dataset, attr: usize) -> Vec<f64> {
    let Column::Quantitative(v) = ds.column(attr) else {
        return Vec::new();
    };
    let mut out: Vec<f64> = v.iter().flatten().copied().collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// A bound value at, between or just outside the observed values.
fn bound_value(rng: &mut ChaCha8Rng, values: &[f64]) -> f64 {
    let i = rng.random_range(0..values.len());
    match rng.random_range(0..4) {
        0 | 1 => values[i],
        2 if i + 1 < values.len() => (values[i] + values[i + 1]) / 2.0,
        _ => values[i] + if rng.random_bool(0.5) { 0.25 } else { -0.25 },
    }
}

pub fn interval(rng: &mut ChaCha8Rng, values: &[f64]) -> Interval {
    loop {
        let mut b = || {
            (!values.is_empty() && rng.random_bool(0.85)).then(|| Bound {
                value: bound_value(rng, values),
                inclusive: rng.random_bool(0.5),
            })
        };
        let (x, y) = (b(), b());
        let (lo, hi) = match (x, y) {
            (Some(x), Some(y)) if y.value < x.value => (Some(y), Some(x)),
            other => other,
        };
        let i = Interval { lo, hi };
        if !i.is_empty() {
            return i;
        }
    }
}

pub fn literal(rng: &mut ChaCha8Rng, ds: &Dataset, attr: usize) -> Literal {
    let schema = &ds.attributes()[attr];
    match schema.nominal_values() {
        Some(values) if !values.is_empty() && !rng.random_bool(0.1) => {
            Literal::nominal(schema.name.clone(), values.choose(rng).unwrap().clone())
        }
        Some(_) => Literal {
            attribute: schema.name.clone(),
            range: ValueRange::Nominal(NominalSet::missing_only()),
        },
        None => Literal::interval(schema.name.clone(), interval(rng, &observed(ds, attr))),
    }
}

/// Random rule with 1 to `max_len` literals over distinct attributes.
pub fn rule(rng: &mut ChaCha8Rng, ds: &Dataset, max_len: usize) -> Rule {
    let n = ds.attributes().len();
    let len = rng.random_range(1..=max_len.min(n));
    let attrs = rand::seq::index::sample(rng, n, len);
    let lits = attrs.iter().map(|a| literal(rng, ds, a)).collect();
    let class = ds.class_values().choose(rng).unwrap().clone();
    Rule::new(lits, class).unwrap()
}

/// Random rules without repeated (antecedent, consequent) pairs.
pub fn distinct_rules(
    rng: &mut ChaCha8Rng,
    ds: &Dataset,
    count: usize,
    max_len: usize,
) -> Vec<Rule> {
    let mut out: Vec<Rule> = Vec::new();
    for _ in 0..count * 3 {
        if out.len() == count {
            break;
        }
        let r = rule(rng, ds, max_len);
        if !out
            .iter()
            .any(|o| o.antecedent == r.antecedent && o.consequent == r.consequent)
        {
            out.push(r);
        }
    }
    out
}

/// Rules plus a default rule with a random class.
pub fn classifier(rng: &mut ChaCha8Rng, ds: &Dataset, count: usize, max_len: usize) -> RuleList {
    let mut rules = distinct_rules(rng, ds, count, max_len);
    rules.push(Rule::default_rule(
        ds.class_values().choose(rng).unwrap().clone(),
    ));
    RuleList::new(rules)
}

/// Cell value of `row` as seen by a literal on `attr`.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Missing,
    Nominal(String),
    Number(f64),
}

pub fn cell(ds: &Dataset, row: usize, attr: usize) -> Cell {
    match ds.column(attr) {
        Column::Quantitative(v) => v[row].map_or(Cell::Missing, Cell::Number),
        Column::Nominal(v) => v[row].map_or(Cell::Missing, |c| {
            Cell::Nominal(ds.attributes()[attr].nominal_values().unwrap()[c as usize].clone())
        }),
    }
}

fn bound_ok(b: Option<Bound>, v: f64, lower: bool) -> bool {
    match b {
        None => true,
        Some(b) if lower => v > b.value || (b.inclusive && v == b.value),
        Some(b) => v < b.value || (b.inclusive && v == b.value),
    }
}

pub fn literal_holds(lit: &Literal, c: &Cell) -> bool {
    match (&lit.range, c) {
        (ValueRange::Interval(i), Cell::Number(v)) => {
            bound_ok(i.lo, *v, true) && bound_ok(i.hi, *v, false)
        }
        (ValueRange::Nominal(s), Cell::Nominal(v)) => s.values.iter().any(|x| x == v),
        (ValueRange::Nominal(s), Cell::Missing) => s.missing,
        _ => false,
    }
}

/// Whether `row` satisfies every literal of `rule`, by direct inspection.
pub fn naive_matches(rule: &Rule, ds: &Dataset, row: usize) -> bool {
    rule.antecedent.iter().all(|lit| {
        let a = ds.attribute_index(&lit.attribute).unwrap();
        literal_holds(lit, &cell(ds, row, a))
    })
}

pub fn naive_rows(rule: &Rule, ds: &Dataset) -> Vec<usize> {
    (0..ds.n_rows())
        .filter(|&r| naive_matches(rule, ds, r))
        .collect()
}

pub fn naive_stats(rule: &Rule, ds: &Dataset) -> RuleStats {
    let rows = naive_rows(rule, ds);
    RuleStats {
        covered: rows.len(),
        correct: rows
            .iter()
            .filter(|&&r| ds.label(r) == rule.consequent)
            .count(),
        total: ds.n_rows(),
    }
}

/// Confidence comparison by cross multiplication; nothing covered counts as zero.
pub fn cmp_confidence(a: &RuleStats, b: &RuleStats) -> Ordering {
    let (an, ad) = if a.covered == 0 {
        (0, 1)
    } else {
        (a.correct, a.covered)
    };
    let (bn, bd) = if b.covered == 0 {
        (0, 1)
    } else {
        (b.correct, b.covered)
    };
    (an * bd).cmp(&(bn * ad))
}

/// First matching rule for `row`, by direct inspection.
pub fn naive_fire(list: &RuleList, ds: &Dataset, row: usize) -> Option<usize> {
    list.rules.iter().position(|r| naive_matches(r, ds, row))
}

pub fn naive_predictions(list: &RuleList, ds: &Dataset) -> Vec<Option<String>> {
    (0..ds.n_rows())
        .map(|r| naive_fire(list, ds, r).map(|i| list.rules[i].consequent.clone()))
        .collect()
}

/// Indices of `full` not present in `kept`, which must be a subsequence of it.
pub fn removed_indices(full: &RuleList, kept: &RuleList) -> Vec<usize> {
    let mut out = Vec::new();
    let mut k = 0;
    for (i, r) in full.rules.iter().enumerate() {
        if k < kept.rules.len()
            && kept.rules[k].antecedent == r.antecedent
            && kept.rules[k].consequent == r.consequent
        {
            k += 1;
        } else {
            out.push(i);
        }
    }
    assert_eq!(
        k,
        kept.rules.len(),
        "kept rules are not a subsequence of the input"
    );
    out
}
