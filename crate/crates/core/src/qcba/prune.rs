use crate::data::Dataset;
use crate::error::Result;
use crate::rule::Rule;

/// Greedily remove literals: scan the antecedent in order and drop the first
/// literal whose removal keeps confidence at least as high, then rescan.
/// Stops when no literal qualifies or the antecedent is empty.
pub fn prune_literals(rule: &Rule, raw: &Dataset) -> Result<Rule> {
    let mut current = rule.clone().with_stats(raw)?;
    'outer: while !current.antecedent.is_empty() {
        for i in 0..current.antecedent.len() {
            let mut cand = current.clone();
            cand.antecedent.remove(i);
            let cand = cand.with_stats(raw)?;
            if cand.confidence() >= current.confidence() {
                current = cand;
                continue 'outer;
            }
        }
        break;
    }
    Ok(current)
}
