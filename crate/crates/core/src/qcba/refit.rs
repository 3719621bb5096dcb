use super::FinerGrid;
use crate::data::Dataset;
use crate::error::Result;
use crate::rule::{Interval, Literal, Rule, ValueRange};

/// Contract every interval to the smallest and largest raw domain values it
/// contains. The covered rows do not change. Nominal literals, and intervals
/// holding no domain value, are kept as they are.
pub fn refit(rule: &Rule, raw: &Dataset, grid: &FinerGrid) -> Result<Rule> {
    let mut out = rule.clone();
    for lit in &mut out.antecedent {
        let ValueRange::Interval(interval) = &lit.range else {
            continue;
        };
        let Some(values) = grid.values(&lit.attribute) else {
            continue;
        };
        match grid.span(&lit.attribute, interval) {
            Some((lo, hi)) => {
                *lit = Literal::interval(
                    lit.attribute.clone(),
                    Interval::closed(values[lo], values[hi]),
                )
            }
            None => log::debug!("literal {lit} contains no training value; left unchanged"),
        }
    }
    out.with_stats(raw)
}
