//! Per-rule tuning invariants checked against naive recounts.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use qrule::qcba::{extend_rule, prune_literals, refit, trim, FinerGrid};
use qrule::{Dataset, QcbaConfig, Rule};

use super::{cmp_confidence, dataset, naive_rows, naive_stats, rng, rule, Shape};

/// Seed and dataset dimensions of one random case.
pub fn case() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 5usize..=200, 1usize..=8)
}

pub fn build(seed: u64, rows: usize, attributes: usize) -> (Dataset, Rule) {
    let mut rng = rng(seed);
    let ds = dataset(&mut rng, Shape::small(rows, attributes));
    let r = rule(&mut rng, &ds, 4).with_stats(&ds).unwrap();
    (ds, r)
}

fn stored_stats_match(r: &Rule, ds: &Dataset) -> Result<(), TestCaseError> {
    prop_assert_eq!(
        r.stats,
        naive_stats(r, ds),
        "stored statistics differ from a recount"
    );
    Ok(())
}

pub fn refit_keeps_coverage((seed, rows, attrs): (u64, usize, usize)) -> Result<(), TestCaseError> {
    let (ds, r) = build(seed, rows, attrs);
    let out = refit(&r, &ds, &FinerGrid::new(&ds)).unwrap();
    prop_assert_eq!(naive_rows(&out, &ds), naive_rows(&r, &ds));
    prop_assert_eq!(naive_stats(&out, &ds), naive_stats(&r, &ds));
    prop_assert_eq!(out.len(), r.len());
    stored_stats_match(&out, &ds)
}

pub fn pruning_keeps_confidence(
    (seed, rows, attrs): (u64, usize, usize),
) -> Result<(), TestCaseError> {
    let (ds, r) = build(seed, rows, attrs);
    let out = prune_literals(&r, &ds).unwrap();
    let (before, after) = (naive_stats(&r, &ds), naive_stats(&out, &ds));
    prop_assert!(
        cmp_confidence(&after, &before).is_ge(),
        "confidence fell: {:?} -> {:?}",
        before,
        after
    );
    prop_assert!(out.len() <= r.len());
    stored_stats_match(&out, &ds)
}

pub fn trimming_keeps_support(
    (seed, rows, attrs): (u64, usize, usize),
) -> Result<(), TestCaseError> {
    let (ds, r) = build(seed, rows, attrs);
    let out = trim(&r, &ds).unwrap();
    let (before, after) = (naive_stats(&r, &ds), naive_stats(&out, &ds));
    prop_assert_eq!(after.correct, before.correct);
    prop_assert!(
        cmp_confidence(&after, &before).is_ge(),
        "confidence fell: {:?} -> {:?}",
        before,
        after
    );
    prop_assert_eq!(out.len(), r.len());
    stored_stats_match(&out, &ds)
}

pub fn extension_never_worsens(
    (seed, rows, attrs): (u64, usize, usize),
) -> Result<(), TestCaseError> {
    let (ds, r) = build(seed, rows, attrs);
    let out = extend_rule(&r, &ds, &FinerGrid::new(&ds), &QcbaConfig::default()).unwrap();
    let (before, after) = (naive_stats(&r, &ds), naive_stats(&out, &ds));
    prop_assert!(
        after.correct >= before.correct,
        "support fell: {:?} -> {:?}",
        before,
        after
    );
    prop_assert!(
        cmp_confidence(&after, &before).is_ge(),
        "confidence fell: {:?} -> {:?}",
        before,
        after
    );
    prop_assert_eq!(out.len(), r.len());
    stored_stats_match(&out, &ds)
}

/// Named invariant checks, in reporting order.
pub type Check = fn((u64, usize, usize)) -> Result<(), TestCaseError>;

pub const ALL: [(&str, Check); 4] = [
    ("refit", refit_keeps_coverage),
    ("literal pruning", pruning_keeps_confidence),
    ("trimming", trimming_keeps_support),
    ("extension", extension_never_worsens),
];
