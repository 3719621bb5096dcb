use crate::data::{Column, Dataset};
use crate::error::Result;
use crate::rule::{CompiledRule, Interval, Literal, Rule, ValueRange};

/// Shrink every interval to the smallest and largest value among the rows
/// the rule covers correctly. An interval whose literal alone covers at most
/// one distinct value is skipped; a rule with no correctly covered row is
/// returned unchanged.
pub fn trim(rule: &Rule, raw: &Dataset) -> Result<Rule> {
    let rule = rule.clone().with_stats(raw)?;
    let correct: Vec<usize> = {
        let c = CompiledRule::new(&rule, raw)?;
        (0..raw.n_rows())
            .filter(|&row| c.matches(row) && c.is_correct(row))
            .collect()
    };
    if correct.is_empty() {
        return Ok(rule);
    }
    let mut out = rule.clone();
    for lit in &mut out.antecedent {
        let ValueRange::Interval(interval) = &lit.range else {
            continue;
        };
        let (idx, _) = raw.attribute(&lit.attribute)?;
        let Column::Quantitative(values) = raw.column(idx) else {
            continue;
        };
        let mut covered: Vec<f64> = values
            .iter()
            .flatten()
            .copied()
            .filter(|&v| interval.contains(v))
            .collect();
        covered.sort_by(f64::total_cmp);
        covered.dedup();
        if covered.len() <= 1 {
            continue;
        }
        let in_rule = correct.iter().filter_map(|&r| values[r]);
        let lo = in_rule.clone().fold(f64::INFINITY, f64::min);
        let hi = in_rule.fold(f64::NEG_INFINITY, f64::max);
        *lit = Literal::interval(lit.attribute.clone(), Interval::closed(lo, hi));
    }
    out.with_stats(raw)
}
