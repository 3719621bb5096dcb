use crate::bitset::RowSet;
use crate::cba::Classifier;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rule::{CompiledRule, RuleList};

fn default_class(list: &RuleList) -> Result<&str> {
    list.default_class()
        .ok_or_else(|| Error::InvalidParameter("rule list does not end with a default rule".into()))
}

/// Remove rules predicting the default class whose training rows would keep
/// their predicted class without them.
///
/// Rules are visited top down. A candidate is kept when some training row it
/// classifies (it is the first matching rule still in the list) is matched
/// by a lower rule with a different class. Otherwise every such row falls
/// through to a rule with the default class, so training predictions are
/// unchanged.
pub fn drop_transaction(list: &RuleList, train: &Dataset) -> Result<RuleList> {
    let def = default_class(list)?;
    let compiled: Vec<CompiledRule<'_>> = list
        .rules
        .iter()
        .map(|r| CompiledRule::new(r, train))
        .collect::<Result<_>>()?;
    let n = train.n_rows();
    let last = list.rules.len() - 1;
    let mut keep = vec![true; list.rules.len()];
    // rows not yet claimed by a kept rule above the current position
    let mut unclaimed = RowSet::full(n);
    for (i, rule) in list.rules.iter().enumerate().take(last) {
        let fires: Vec<usize> = unclaimed
            .iter()
            .filter(|&r| compiled[i].matches(r))
            .collect();
        if rule.consequent == def {
            let clash = (i + 1..last)
                .filter(|&j| list.rules[j].consequent != def)
                .any(|j| fires.iter().any(|&r| compiled[j].matches(r)));
            if !clash {
                keep[i] = false;
                continue;
            }
        }
        for r in fires {
            unclaimed.remove(r);
        }
    }
    Ok(retain(list, &keep))
}

/// Remove rules predicting the default class whose region cannot overlap any
/// lower rule with a different class.
///
/// A lower rule with a different class clashes with the candidate unless
/// they share an attribute on which their value ranges are disjoint. A
/// candidate without clashing rules is removed. The class assigned to any
/// point of the instance space is unchanged.
pub fn drop_range(list: &RuleList, train: &Dataset) -> Result<RuleList> {
    let def = default_class(list)?;
    list.validate(train)?;
    let last = list.rules.len() - 1;
    let mut keep = vec![true; list.rules.len()];
    for (i, cand) in list.rules.iter().enumerate().take(last) {
        if cand.consequent != def {
            continue;
        }
        let clash = list.rules[i + 1..last]
            .iter()
            .filter(|r| r.consequent != def)
            .any(|other| {
                !cand.antecedent.iter().any(|l| {
                    other
                        .literal_for(&l.attribute)
                        .is_some_and(|o| !o.range.intersects(&l.range))
                })
            });
        if !clash {
            keep[i] = false;
        }
    }
    Ok(retain(list, &keep))
}

fn retain(list: &RuleList, keep: &[bool]) -> RuleList {
    RuleList {
        class_attribute: list.class_attribute.clone(),
        rules: list
            .rules
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(r, _)| r.clone())
            .collect(),
    }
}

/// Rows whose predicted class differs between two lists.
#[allow(dead_code)]
pub(crate) fn changed_predictions(a: &RuleList, b: &RuleList, ds: &Dataset) -> Result<usize> {
    let ca = Classifier::new(a, ds)?;
    let cb = Classifier::new(b, ds)?;
    Ok((0..ds.n_rows())
        .filter(|&r| {
            ca.firing_rule(r).map(|i| &a.rules[i].consequent)
                != cb.firing_rule(r).map(|i| &b.rules[i].consequent)
        })
        .count())
}
