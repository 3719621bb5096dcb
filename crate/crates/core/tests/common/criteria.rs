//! Acceptance checks. Each returns a one-line summary on success and the
//! first discrepancy on failure.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use qrule::cba::post_prune;
use qrule::discretize::equal_width_discretize;
use qrule::eval::{run_suite, BenchmarkOptions};
use qrule::miner::mine_car_rules;
use qrule::parallel::with_jobs;
use qrule::pipeline::build_qcba;
use qrule::qcba::{
    drop_range, drop_transaction, extend_rule, prune_literals, refit, trim, FinerGrid,
};
use qrule::rule::{Interval, ValueRange};
use qrule::{AttributeKind, CsvOptions, Dataset, MinerParams, QcbaConfig, Rule, RuleList};
use rand::seq::IndexedRandom;
use rand::Rng;

use super::oracle::{self, canonical, ranked};
use super::{
    classifier, dataset, invariants, literal_holds, naive_predictions, naive_stats,
    removed_indices, rng, Cell, Shape,
};

pub type Outcome = Result<String, String>;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn load(name: &str) -> Dataset {
    Dataset::load_csv(
        root().join("../../data").join(format!("{name}.csv")),
        &CsvOptions::default(),
    )
    .unwrap_or_else(|e| panic!("loading {name}: {e}"))
}

pub fn humtemp() -> Dataset {
    let mut opts = CsvOptions::default();
    opts.kinds.insert("Class".into(), AttributeKind::Nominal);
    Dataset::load_csv(root().join("tests/fixtures/humtemp.csv"), &opts).unwrap()
}

pub const BENCHMARK: [&str; 5] = ["iris", "glass", "breast-w", "diabetes", "wine"];

/// Tuning invariants on random rules and datasets.
pub fn tuning_invariants(cases: u32, budget: Duration) -> Outcome {
    let start = Instant::now();
    for (name, check) in invariants::ALL {
        let config = Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        };
        let mut runner =
            TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
        runner
            .run(&invariants::case(), check)
            .map_err(|e| format!("{name}: {e}"))?;
    }
    let took = start.elapsed();
    let line = format!(
        "{} invariants x {cases} cases in {:.1}s",
        invariants::ALL.len(),
        took.as_secs_f64()
    );
    if took < budget {
        Ok(line)
    } else {
        Err(format!("{line}, over the {}s budget", budget.as_secs()))
    }
}

/// All-nominal dataset, optionally produced by binning quantitative columns.
fn nominal_dataset(seed: u64, binned: bool) -> Dataset {
    let mut r = rng(seed);
    let shape = Shape {
        rows: r.random_range(10..=100),
        attributes: r.random_range(1..=6),
        classes: r.random_range(2..=3),
        nominal: if binned { 0.0 } else { 1.0 },
        missing: if binned { 0.0 } else { 0.05 },
        values: 4,
    };
    let ds = dataset(&mut r, shape);
    if binned {
        equal_width_discretize(&ds, r.random_range(2..=4))
            .unwrap()
            .apply(&ds)
            .unwrap()
    } else {
        ds
    }
}

/// Mined rules against exhaustive enumeration.
pub fn miner_oracle(datasets: u64) -> Outcome {
    let mut total = 0;
    for seed in 0..datasets {
        let ds = nominal_dataset(seed, seed % 3 == 2);
        let mut r = rng(seed ^ 0x5eed);
        let params = MinerParams {
            min_support: *[0.01, 0.05, 0.1, 0.2].choose(&mut r).unwrap(),
            min_confidence: *[0.0, 0.3, 0.5, 0.8].choose(&mut r).unwrap(),
            max_antecedent_length: r.random_range(1..=6),
            max_rules: usize::MAX,
        };
        let mined = mine_car_rules(&ds, &params).map_err(|e| format!("dataset {seed}: {e}"))?;
        if !ranked(&mined.rules) {
            return Err(format!("dataset {seed}: mined rules are not in rank order"));
        }
        for rule in &mined.rules {
            if rule.stats != naive_stats(rule, &ds) {
                return Err(format!(
                    "dataset {seed}: stored statistics of `{rule}` differ from a recount"
                ));
            }
        }
        let got: Vec<_> = mined.rules.iter().map(canonical).collect();
        let got_set: std::collections::BTreeSet<_> = got.iter().cloned().collect();
        if got_set.len() != got.len() {
            return Err(format!("dataset {seed}: duplicate rules mined"));
        }
        let want = oracle::mine(
            &ds,
            params.min_support,
            params.min_confidence,
            params.max_antecedent_length,
        );
        if got_set != want {
            let extra = got_set.difference(&want).next();
            let missing = want.difference(&got_set).next();
            return Err(format!(
                "dataset {seed} ({params:?}): {} mined vs {} enumerated; extra {extra:?}, missing {missing:?}",
                got_set.len(),
                want.len()
            ));
        }
        total += got.len();
    }
    Ok(format!(
        "{datasets} datasets, {total} rules identical to enumeration"
    ))
}

/// Input lists for pruning: random rules on raw data, or mined rules on binned data.
fn prune_case(seed: u64) -> (Dataset, RuleList) {
    let mut r = rng(seed);
    let rows = r.random_range(5..=150);
    let attributes = r.random_range(1..=5);
    if seed.is_multiple_of(2) {
        let ds = dataset(&mut r, Shape::small(rows, attributes));
        let count = r.random_range(0..=25);
        let mut list = super::distinct_rules(&mut r, &ds, count, 3);
        if !list.is_empty() && r.random_bool(0.2) {
            let at = r.random_range(0..list.len());
            list.insert(
                at,
                Rule::default_rule(ds.class_values().choose(&mut r).unwrap().clone()),
            );
        }
        (ds, RuleList::new(list))
    } else {
        let raw = dataset(&mut r, Shape::small(rows, attributes));
        let ds = equal_width_discretize(&raw, 3)
            .unwrap()
            .apply(&raw)
            .unwrap();
        let params = MinerParams {
            min_support: 0.03,
            min_confidence: 0.3,
            max_antecedent_length: 3,
            max_rules: 200,
        };
        let mined = mine_car_rules(&ds, &params).unwrap();
        (ds, mined)
    }
}

/// Data coverage pruning against the transcribed oracle, with and without
/// the default rule cut.
pub fn post_prune_oracle(lists: u64) -> Outcome {
    let mut rules_in = 0;
    for seed in 0..lists {
        let (ds, list) = prune_case(seed);
        rules_in += list.len();
        for keep_all in [false, true] {
            let got = post_prune(&list, &ds, keep_all).map_err(|e| format!("list {seed}: {e}"))?;
            let want = oracle::post_prune(&list, &ds, keep_all);
            let got_pairs: Vec<_> = got
                .rules
                .iter()
                .map(|r| (r.antecedent.clone(), r.consequent.clone()))
                .collect();
            if got_pairs != want {
                return Err(format!(
                    "list {seed} (keep_all {keep_all}): {} rules kept, oracle keeps {}",
                    got_pairs.len(),
                    want.len()
                ));
            }
            if let Some(r) = got.rules.iter().find(|r| r.stats != naive_stats(r, &ds)) {
                return Err(format!(
                    "list {seed}: stored statistics of `{r}` differ from a recount"
                ));
            }
        }
    }
    Ok(format!(
        "{lists} lists ({rules_in} rules) identical to the oracle in both modes"
    ))
}

/// Classifier-ready input for overlap pruning.
fn overlap_case(seed: u64, max_attributes: usize) -> (Dataset, RuleList) {
    let mut r = rng(seed);
    let rows = r.random_range(10..=150);
    let attributes = r.random_range(1..=max_attributes);
    let ds = dataset(&mut r, Shape::small(rows, attributes));
    let count = r.random_range(1..=20);
    let list = classifier(&mut r, &ds, count, 3);
    if seed.is_multiple_of(2) {
        (ds, list)
    } else {
        let pruned = post_prune(&list, &ds, r.random_bool(0.5)).unwrap();
        (ds, pruned)
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// Training predictions are unchanged by transaction-based pruning.
pub fn transaction_drop(lists: u64) -> Outcome {
    let mut removed = 0;
    for seed in 0..lists {
        let (ds, list) = overlap_case(seed, 5);
        let out = drop_transaction(&list, &ds).map_err(|e| format!("list {seed}: {e}"))?;
        if naive_predictions(&out, &ds) != naive_predictions(&list, &ds) {
            return Err(format!("list {seed}: training predictions changed"));
        }
        let acc = |l: &RuleList| qrule::cba::accuracy(l, &ds).unwrap();
        if acc(&out) != acc(&list) {
            return Err(format!(
                "list {seed}: accuracy {} became {}",
                acc(&list),
                acc(&out)
            ));
        }
        removed += list.len() - out.len();
    }
    Ok(format!(
        "{lists} lists, {removed} rules removed, predictions unchanged"
    ))
}

/// Points covering every region a rule boundary can separate, per attribute.
fn grid_axis(ds: &Dataset, list: &RuleList, attr: usize) -> Vec<Cell> {
    let schema = &ds.attributes()[attr];
    let mut axis = vec![Cell::Missing];
    if let Some(values) = schema.nominal_values() {
        axis.extend(values.iter().cloned().map(Cell::Nominal));
        axis.push(Cell::Nominal("unseen".into()));
        return axis;
    }
    let mut points: Vec<f64> = super::observed(ds, attr);
    for rule in &list.rules {
        for lit in rule
            .antecedent
            .iter()
            .filter(|l| l.attribute == schema.name)
        {
            if let ValueRange::Interval(Interval { lo, hi }) = &lit.range {
                points.extend(lo.iter().chain(hi.iter()).map(|b| b.value));
            }
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut xs = vec![points[0] - 1.0, points[points.len() - 1] + 1.0];
    xs.extend(points.iter().copied());
    xs.extend(points.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    axis.extend(xs.into_iter().map(Cell::Number));
    axis
}

fn grid_class(list: &RuleList, names: &[String], point: &[Cell]) -> Option<String> {
    list.rules
        .iter()
        .find(|r| {
            r.antecedent.iter().all(|l| {
                let a = names.iter().position(|n| *n == l.attribute).unwrap();
                literal_holds(l, &point[a])
            })
        })
        .map(|r| r.consequent.clone())
}

/// Range-based pruning keeps the class of every grid point; its removed
/// rules are also removed by transaction-based pruning.
pub fn range_drop(datasets: u64, lists: u64) -> Outcome {
    let mut points = 0usize;
    let mut removed = 0;
    for seed in 0..datasets {
        let (ds, list) = overlap_case(seed + 1_000_000, 3);
        let out = drop_range(&list, &ds).map_err(|e| format!("dataset {seed}: {e}"))?;
        removed += list.len() - out.len();
        let names: Vec<String> = ds.attributes().iter().map(|a| a.name.clone()).collect();
        let axes: Vec<Vec<Cell>> = (0..names.len()).map(|a| grid_axis(&ds, &list, a)).collect();
        let mut idx = vec![0; axes.len()];
        loop {
            let point: Vec<Cell> = idx
                .iter()
                .zip(&axes)
                .map(|(&i, ax)| ax[i].clone())
                .collect();
            if grid_class(&list, &names, &point) != grid_class(&out, &names, &point) {
                return Err(format!(
                    "dataset {seed}: class of grid point {point:?} changed"
                ));
            }
            points += 1;
            let Some(k) = (0..idx.len()).find(|&k| idx[k] + 1 < axes[k].len()) else {
                break;
            };
            idx[k] += 1;
            idx[..k].iter_mut().for_each(|i| *i = 0);
        }
    }
    for seed in 0..lists {
        let (ds, list) = if seed < datasets {
            overlap_case(seed + 1_000_000, 3)
        } else {
            overlap_case(seed, 5)
        };
        let by_range = removed_indices(&list, &drop_range(&list, &ds).unwrap());
        let by_transaction = removed_indices(&list, &drop_transaction(&list, &ds).unwrap());
        if !is_subset(&by_range, &by_transaction) {
            return Err(format!(
                "list {seed}: range-based removes {by_range:?}, transaction-based only {by_transaction:?}"
            ));
        }
    }
    Ok(format!(
        "{datasets} datasets, {points} grid points, {removed} rules removed; removed sets nested on {lists} lists"
    ))
}

/// Tuning trace of the humidity/temperature example rule.
pub fn humtemp_trace() -> Outcome {
    let ds = humtemp();
    let grid = FinerGrid::new(&ds);
    let parse = |s: &str| Rule::parse(s).unwrap().0;
    let input = parse("Temperature=(25;30] and Humidity=(40;60] -> Class=4")
        .with_stats(&ds)
        .unwrap();

    let refitted = refit(&input, &ds, &grid).unwrap();
    let want = parse("Temperature=[26;30] and Humidity=[42;58] -> Class=4");
    if refitted.antecedent != want.antecedent {
        return Err(format!("refit gave `{refitted}`"));
    }
    let pruned = prune_literals(&refitted, &ds).unwrap();
    if pruned.antecedent != refitted.antecedent {
        return Err(format!("literal pruning gave `{pruned}`"));
    }
    let trimmed = trim(&pruned, &ds).unwrap();
    let want = parse("Temperature=[27;30] and Humidity=[42;58] -> Class=4");
    if trimmed.antecedent != want.antecedent
        || (trimmed.stats.covered, trimmed.stats.correct) != (8, 6)
    {
        return Err(format!("trimming gave `{trimmed}` {:?}", trimmed.stats));
    }
    let extended = extend_rule(&trimmed, &ds, &grid, &QcbaConfig::default()).unwrap();
    let want = parse("Temperature=[27;30] and Humidity=[35;58] -> Class=4");
    if extended.antecedent != want.antecedent
        || (extended.stats.covered, extended.stats.correct) != (12, 9)
    {
        return Err(format!("extension gave `{extended}` {:?}", extended.stats));
    }
    if !(extended.confidence() > input.confidence() && extended.stats.correct > input.stats.correct)
    {
        return Err("extended rule does not beat the input on confidence and support".into());
    }
    // without conditional steps the first humidity step (one hit, one miss) is never taken
    let crisp_only = QcbaConfig {
        min_cond_improvement: 0.0,
        ..QcbaConfig::default()
    };
    let crisp = extend_rule(&trimmed, &ds, &grid, &crisp_only).unwrap();
    if crisp.antecedent != trimmed.antecedent {
        return Err(format!("crisp-only extension gave `{crisp}`"));
    }
    Ok(format!(
        "refit [26;30]/[42;58], trim drops T=26, extension to H=[35;58]: conf {:.3} -> {:.3}, supp {} -> {}",
        input.confidence(),
        extended.confidence(),
        input.stats.correct,
        extended.stats.correct
    ))
}

/// Cross-validated trend: conditions drop under preset 6, accuracy holds under preset 5.
pub fn benchmark_trend(budget: Duration) -> Outcome {
    let start = Instant::now();
    let data: Vec<(String, Dataset)> = BENCHMARK.iter().map(|n| (n.to_string(), load(n))).collect();
    let opts = BenchmarkOptions {
        presets: vec![0, 5, 6],
        ..BenchmarkOptions::default()
    };
    let report = run_suite(&data, &opts).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let of = |p: u8| report.summary.iter().find(|s| s.preset == p).unwrap();
    let (base, p5, p6) = (of(0), of(5), of(6));
    let reduction = 1.0 - p6.avg_conditions_per_model / base.avg_conditions_per_model;
    let gap = (p5.accuracy - base.accuracy).abs();
    let line = format!(
        "conditions/model {:.1} -> {:.1} ({:.0}% fewer), accuracy {:.4} vs {:.4} (gap {gap:.4}), {:.0}s",
        base.avg_conditions_per_model,
        p6.avg_conditions_per_model,
        reduction * 100.0,
        base.accuracy,
        p5.accuracy,
        took.as_secs_f64()
    );
    if !report.notes.is_empty() {
        return Err(format!("{line}; notes: {:?}", report.notes));
    }
    if reduction >= 0.30 && gap <= 0.03 && took < budget {
        Ok(line)
    } else {
        Err(line)
    }
}

/// Model JSON is identical for one worker and several.
pub fn determinism(workers: usize) -> Outcome {
    let mut models = 0;
    for name in ["iris", "glass", "wine"] {
        let ds = load(name);
        for preset in 1..=7 {
            let cfg = QcbaConfig::preset(preset).unwrap();
            let build = |jobs| {
                with_jobs(Some(jobs), || {
                    build_qcba(&ds, &MinerParams::default(), &cfg)
                })
                .unwrap()
                .unwrap()
                .to_json()
                .unwrap()
            };
            let one = build(1);
            if one != build(workers) {
                return Err(format!(
                    "{name} preset {preset}: JSON differs between 1 and {workers} workers"
                ));
            }
            models += 1;
        }
    }
    Ok(format!(
        "{models} models byte-identical with 1 and {workers} workers"
    ))
}

/// Small all-nominal dataset.
pub fn nominal_fixture() -> Dataset {
    let col = |v: &[&str]| {
        qrule::data::RawColumn::Nominal(v.iter().map(|s| Some(s.to_string())).collect())
    };
    Dataset::from_columns(
        vec![
            (
                "colour".into(),
                col(&["red", "red", "blue", "blue", "green", "green"]),
            ),
            (
                "size".into(),
                col(&["big", "small", "big", "small", "big", "small"]),
            ),
        ],
        "class",
        ["yes", "yes", "no", "yes", "yes", "yes"]
            .map(String::from)
            .to_vec(),
    )
    .unwrap()
}
