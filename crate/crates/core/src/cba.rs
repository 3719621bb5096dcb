//! CBA classifier building: data coverage pruning with default rule pruning,
//! and first-match classification.

use crate::bitset::RowSet;
use crate::data::{majority, Dataset};
use crate::error::{Error, Result};
use crate::rule::{sort_rules, CompiledRule, Rule, RuleList};

/// Most frequent class among `rows`; ties go to the lower class code.
fn majority_in(ds: &Dataset, rows: &RowSet) -> Option<u32> {
    let mut counts = vec![0; ds.class_values().len()];
    for r in rows.iter() {
        counts[ds.label_codes()[r] as usize] += 1;
    }
    majority(&counts)
}

fn errors_of(ds: &Dataset, rows: &RowSet, class: Option<u32>) -> usize {
    rows.iter()
        .filter(|&r| Some(ds.label_codes()[r]) != class)
        .count()
}

/// Sort rules by rank, keep each rule that correctly covers a training row
/// not yet covered by a kept rule, cut the list where total training error
/// is lowest and append a default rule.
///
/// The covered rows of every visited rule are removed from the remaining
/// set, including rules that get dropped. With `keep_all` the cut is skipped
/// and the default predicts the majority class of the rows left at the end.
/// A kept rule with an empty antecedent ends the list and serves as its
/// default; otherwise exactly one default rule is appended.
pub fn post_prune(rules: &RuleList, train: &Dataset, keep_all: bool) -> Result<RuleList> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = train.n_rows();
    let mut sorted: Vec<Rule> = rules
        .rules
        .iter()
        .map(|r| r.clone().with_stats(train))
        .collect::<Result<_>>()?;
    sort_rules(&mut sorted);

    let mut remaining = RowSet::full(n);
    let global = train.majority_class();
    let mut def_class = global;
    let mut cutoff_class = global;
    let mut lowest_error = errors_of(train, &remaining, global);
    let mut errors_without_default = 0;
    // number of kept rules up to and including the cutoff rule
    let mut cutoff_len = 0;
    let mut kept: Vec<Rule> = Vec::new();

    for rule in sorted {
        let compiled = CompiledRule::new(&rule, train)?;
        let mut covered = RowSet::empty(n);
        let mut correct = 0;
        for row in remaining.iter() {
            if compiled.matches(row) {
                covered.insert(row);
                if compiled.is_correct(row) {
                    correct += 1;
                }
            }
        }
        remaining.difference_with(&covered);
        if correct == 0 {
            continue;
        }
        errors_without_default += covered.count() - correct;
        if !remaining.is_empty() {
            def_class = majority_in(train, &remaining);
        }
        let total = errors_of(train, &remaining, def_class) + errors_without_default;
        kept.push(rule);
        if total < lowest_error {
            lowest_error = total;
            cutoff_len = kept.len();
            cutoff_class = def_class;
        }
    }

    let (mut out, default_class) = if keep_all {
        (kept, def_class)
    } else {
        kept.truncate(cutoff_len);
        (kept, cutoff_class)
    };
    if !out.last().is_some_and(Rule::is_default) {
        let class =
            train.class_values()[default_class.expect("non-empty training data") as usize].clone();
        out.push(Rule::default_rule(class).with_stats(train)?);
    }
    Ok(RuleList {
        class_attribute: Some(train.class_attribute().name.clone()),
        rules: out,
    })
}

/// Rule list compiled against one dataset.
pub struct Classifier<'a> {
    rules: Vec<CompiledRule<'a>>,
}

impl<'a> Classifier<'a> {
    pub fn new(list: &RuleList, ds: &'a Dataset) -> Result<Self> {
        Ok(Classifier {
            rules: list
                .rules
                .iter()
                .map(|r| CompiledRule::new(r, ds))
                .collect::<Result<_>>()?,
        })
    }

    /// Index of the first rule whose antecedent `row` satisfies.
    pub fn firing_rule(&self, row: usize) -> Option<usize> {
        self.rules.iter().position(|r| r.matches(row))
    }
}

/// For each row, the index of the rule that classifies it.
pub fn firing_rules(list: &RuleList, ds: &Dataset) -> Result<Vec<Option<usize>>> {
    let c = Classifier::new(list, ds)?;
    Ok((0..ds.n_rows()).map(|row| c.firing_rule(row)).collect())
}

/// Class predicted for row `row` by the first matching rule, `None` when no
/// rule matches (only possible without a default rule).
pub fn classify(list: &RuleList, ds: &Dataset, row: usize) -> Result<Option<String>> {
    Ok(Classifier::new(list, ds)?
        .firing_rule(row)
        .map(|i| list.rules[i].consequent.clone()))
}

/// Predicted class for every row.
pub fn predict(list: &RuleList, ds: &Dataset) -> Result<Vec<Option<String>>> {
    Ok(firing_rules(list, ds)?
        .into_iter()
        .map(|i| i.map(|i| list.rules[i].consequent.clone()))
        .collect())
}

/// Share of rows whose predicted class equals their label.
pub fn accuracy(list: &RuleList, ds: &Dataset) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let fired = firing_rules(list, ds)?;
    let correct = fired
        .iter()
        .enumerate()
        .filter(|(row, i)| i.is_some_and(|i| list.rules[i].consequent == ds.label(*row)))
        .count();
    Ok(correct as f64 / ds.n_rows() as f64)
}
