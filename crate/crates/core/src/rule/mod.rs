//! Literals, rules and rule lists, with their satisfaction semantics and
//! quality measures (confidence, support, volume, density).
//!
//! Rules are stored independently of any dataset: literals name attributes
//! and carry raw values. To evaluate a rule it is compiled against a
//! [`Dataset`], which resolves attribute names to columns.

mod json;
mod text;

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::bitset::RowSet;
use crate::data::{AttributeKind, Column, Dataset, Domain};
use crate::error::{Error, Result};

/// One end of an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub inclusive: bool,
}

impl Bound {
    pub fn inclusive(value: f64) -> Self {
        Bound {
            value,
            inclusive: true,
        }
    }

    pub fn exclusive(value: f64) -> Self {
        Bound {
            value,
            inclusive: false,
        }
    }
}

/// Interval over a quantitative attribute. `None` ends are unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: Option<Bound>,
    pub hi: Option<Bound>,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval {
            lo: Some(Bound::inclusive(lo)),
            hi: Some(Bound::inclusive(hi)),
        }
    }

    /// `(lo;hi]`
    pub fn left_open(lo: f64, hi: f64) -> Self {
        Interval {
            lo: Some(Bound::exclusive(lo)),
            hi: Some(Bound::inclusive(hi)),
        }
    }

    pub fn unbounded() -> Self {
        Interval { lo: None, hi: None }
    }

    #[inline]
    pub fn contains(&self, v: f64) -> bool {
        let above = match self.lo {
            None => true,
            Some(b) if b.inclusive => v >= b.value,
            Some(b) => v > b.value,
        };
        above
            && match self.hi {
                None => true,
                Some(b) if b.inclusive => v <= b.value,
                Some(b) => v < b.value,
            }
    }

    /// Whether some real number lies in both intervals.
    pub fn intersects(&self, other: &Interval) -> bool {
        let lo = tighter(self.lo, other.lo, Ordering::Greater);
        let hi = tighter(self.hi, other.hi, Ordering::Less);
        match (lo, hi) {
            (Some(l), Some(h)) => {
                l.value < h.value || (l.value == h.value && l.inclusive && h.inclusive)
            }
            _ => true,
        }
    }

    /// Whether the interval contains no real number.
    pub fn is_empty(&self) -> bool {
        !self.intersects(&Interval::unbounded())
    }
}

/// Of two bounds pick the more restrictive; `prefer` is the value ordering
/// that restricts more (greater for lower bounds, less for upper bounds).
fn tighter(a: Option<Bound>, b: Option<Bound>, prefer: Ordering) -> Option<Bound> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => match a.value.total_cmp(&b.value) {
            o if o == prefer => Some(a),
            Ordering::Equal => Some(if a.inclusive { b } else { a }),
            _ => Some(b),
        },
    }
}

/// Value set of a nominal literal. `missing` makes the missing marker a member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NominalSet {
    pub values: Vec<String>,
    pub missing: bool,
}

impl NominalSet {
    pub fn single(value: impl Into<String>) -> Self {
        NominalSet {
            values: vec![value.into()],
            missing: false,
        }
    }

    pub fn missing_only() -> Self {
        NominalSet {
            values: Vec::new(),
            missing: true,
        }
    }

    pub fn contains(&self, value: Option<&str>) -> bool {
        match value {
            None => self.missing,
            Some(v) => self.values.iter().any(|x| x == v),
        }
    }

    pub fn intersects(&self, other: &NominalSet) -> bool {
        (self.missing && other.missing) || self.values.iter().any(|v| other.values.contains(v))
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty() && !self.missing
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValueRange {
    Nominal(NominalSet),
    Interval(Interval),
}

impl ValueRange {
    pub fn kind(&self) -> AttributeKind {
        match self {
            ValueRange::Nominal(_) => AttributeKind::Nominal,
            ValueRange::Interval(_) => AttributeKind::Quantitative,
        }
    }

    /// Whether some value satisfies both ranges. Ranges of different kinds never do.
    pub fn intersects(&self, other: &ValueRange) -> bool {
        match (self, other) {
            (ValueRange::Nominal(a), ValueRange::Nominal(b)) => a.intersects(b),
            (ValueRange::Interval(a), ValueRange::Interval(b)) => a.intersects(b),
            _ => false,
        }
    }
}

/// A single cell value, used to test satisfaction outside a dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value<'a> {
    Missing,
    Nominal(&'a str),
    Number(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Literal {
    pub attribute: String,
    pub range: ValueRange,
}

impl Literal {
    pub fn nominal(attribute: impl Into<String>, value: impl Into<String>) -> Self {
        Literal {
            attribute: attribute.into(),
            range: ValueRange::Nominal(NominalSet::single(value)),
        }
    }

    pub fn interval(attribute: impl Into<String>, interval: Interval) -> Self {
        Literal {
            attribute: attribute.into(),
            range: ValueRange::Interval(interval),
        }
    }

    pub fn as_interval(&self) -> Option<&Interval> {
        match &self.range {
            ValueRange::Interval(i) => Some(i),
            ValueRange::Nominal(_) => None,
        }
    }

    /// Missing values never satisfy an interval and satisfy a nominal set
    /// only when the set holds the missing marker.
    pub fn satisfied_by(&self, value: Value<'_>) -> bool {
        match (&self.range, value) {
            (ValueRange::Nominal(set), Value::Missing) => set.missing,
            (ValueRange::Nominal(set), Value::Nominal(v)) => set.contains(Some(v)),
            (ValueRange::Interval(i), Value::Number(v)) => i.contains(v),
            _ => false,
        }
    }
}

/// Coverage counts of a rule on some dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RuleStats {
    /// Rows satisfying the antecedent.
    pub covered: usize,
    /// Covered rows whose class is the consequent (absolute support).
    pub correct: usize,
    /// Rows in the dataset.
    pub total: usize,
}

impl RuleStats {
    /// Zero when nothing is covered.
    pub fn confidence(&self) -> f64 {
        if self.covered == 0 {
            0.0
        } else {
            self.correct as f64 / self.covered as f64
        }
    }

    pub fn support(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }

    pub fn abs_support(&self) -> usize {
        self.correct
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub antecedent: Vec<Literal>,
    pub consequent: String,
    pub stats: RuleStats,
}

impl Rule {
    /// Fails when two literals share an attribute.
    pub fn new(antecedent: Vec<Literal>, consequent: impl Into<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        for lit in &antecedent {
            if !seen.insert(lit.attribute.as_str()) {
                return Err(Error::DuplicateAttribute(lit.attribute.clone()));
            }
        }
        Ok(Rule {
            antecedent,
            consequent: consequent.into(),
            stats: RuleStats::default(),
        })
    }

    /// Rule with an empty antecedent.
    pub fn default_rule(consequent: impl Into<String>) -> Self {
        Rule {
            antecedent: Vec::new(),
            consequent: consequent.into(),
            stats: RuleStats::default(),
        }
    }

    pub fn is_default(&self) -> bool {
        self.antecedent.is_empty()
    }

    pub fn len(&self) -> usize {
        self.antecedent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.antecedent.is_empty()
    }

    pub fn confidence(&self) -> f64 {
        self.stats.confidence()
    }

    pub fn support(&self) -> f64 {
        self.stats.support()
    }

    pub fn literal_for(&self, attribute: &str) -> Option<&Literal> {
        self.antecedent.iter().find(|l| l.attribute == attribute)
    }

    /// Recompute cached stats on `ds`.
    pub fn refresh_stats(&mut self, ds: &Dataset) -> Result<()> {
        self.stats = CompiledRule::new(self, ds)?.stats();
        Ok(())
    }

    pub fn with_stats(mut self, ds: &Dataset) -> Result<Self> {
        self.refresh_stats(ds)?;
        Ok(self)
    }
}

/// Rank order for rules: higher confidence first, then higher support, then
/// shorter antecedent. `Ordering::Less` means `a` ranks above `b`. Callers
/// use a stable sort so remaining ties keep their original order.
pub fn compare(a: &Rule, b: &Rule) -> Ordering {
    b.confidence()
        .total_cmp(&a.confidence())
        .then_with(|| b.support().total_cmp(&a.support()))
        .then_with(|| a.len().cmp(&b.len()))
}

/// Stable sort by [`compare`].
pub fn sort_rules(rules: &mut [Rule]) {
    rules.sort_by(compare);
}

/// Ordered rule list. A classifier-ready list ends with a default rule.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RuleList {
    pub class_attribute: Option<String>,
    pub rules: Vec<Rule>,
}

impl RuleList {
    pub fn new(rules: Vec<Rule>) -> Self {
        RuleList {
            class_attribute: None,
            rules,
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn is_classifier_ready(&self) -> bool {
        self.rules.last().is_some_and(Rule::is_default)
    }

    pub fn default_class(&self) -> Option<&str> {
        self.rules
            .last()
            .filter(|r| r.is_default())
            .map(|r| r.consequent.as_str())
    }

    /// Total number of literals over all rules.
    pub fn condition_count(&self) -> usize {
        self.rules.iter().map(Rule::len).sum()
    }

    /// Check every literal against the attributes of `ds`.
    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        for rule in &self.rules {
            for lit in &rule.antecedent {
                resolve(lit, ds)?;
            }
        }
        Ok(())
    }

    pub fn refresh_stats(&mut self, ds: &Dataset) -> Result<()> {
        for r in &mut self.rules {
            r.refresh_stats(ds)?;
        }
        Ok(())
    }
}

fn resolve<'a>(lit: &Literal, ds: &'a Dataset) -> Result<(usize, &'a Column)> {
    let (idx, attr) = ds.attribute(&lit.attribute)?;
    if attr.kind() != lit.range.kind() {
        return Err(Error::KindMismatch {
            attribute: lit.attribute.clone(),
            expected: attr.kind().as_str(),
            found: lit.range.kind().as_str(),
        });
    }
    Ok((idx, ds.column(idx)))
}

/// A literal resolved against a dataset column.
#[derive(Debug, Clone)]
pub(crate) enum Matcher<'a> {
    Nominal {
        codes: &'a [Option<u32>],
        accept: Vec<bool>,
        missing: bool,
    },
    Interval {
        values: &'a [Option<f64>],
        interval: Interval,
    },
}

impl<'a> Matcher<'a> {
    pub(crate) fn new(lit: &Literal, ds: &'a Dataset) -> Result<Self> {
        let (idx, column) = resolve(lit, ds)?;
        Ok(match (&lit.range, column) {
            (ValueRange::Nominal(set), Column::Nominal(codes)) => {
                let domain = match &ds.attributes()[idx].domain {
                    Domain::Nominal(v) => v,
                    Domain::Quantitative(_) => unreachable!("kinds checked"),
                };
                Matcher::Nominal {
                    codes,
                    accept: domain.iter().map(|v| set.contains(Some(v))).collect(),
                    missing: set.missing,
                }
            }
            (ValueRange::Interval(interval), Column::Quantitative(values)) => Matcher::Interval {
                values,
                interval: *interval,
            },
            _ => unreachable!("kinds checked"),
        })
    }

    #[inline]
    pub(crate) fn matches(&self, row: usize) -> bool {
        match self {
            Matcher::Nominal {
                codes,
                accept,
                missing,
            } => match codes[row] {
                Some(c) => accept[c as usize],
                None => *missing,
            },
            Matcher::Interval { values, interval } => {
                values[row].is_some_and(|v| interval.contains(v))
            }
        }
    }
}

/// A rule bound to one dataset for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledRule<'a> {
    matchers: Vec<Matcher<'a>>,
    class_code: Option<u32>,
    labels: &'a [u32],
}

impl<'a> CompiledRule<'a> {
    pub fn new(rule: &Rule, ds: &'a Dataset) -> Result<Self> {
        let matchers = rule
            .antecedent
            .iter()
            .map(|l| Matcher::new(l, ds))
            .collect::<Result<_>>()?;
        Ok(CompiledRule {
            matchers,
            class_code: ds.class_code(&rule.consequent),
            labels: ds.label_codes(),
        })
    }

    #[inline]
    pub fn matches(&self, row: usize) -> bool {
        self.matchers.iter().all(|m| m.matches(row))
    }

    #[inline]
    pub fn is_correct(&self, row: usize) -> bool {
        self.class_code == Some(self.labels[row])
    }

    pub fn class_code(&self) -> Option<u32> {
        self.class_code
    }

    pub fn coverage(&self) -> Coverage {
        let n = self.labels.len();
        let mut covered = RowSet::empty(n);
        let mut correct = RowSet::empty(n);
        for row in 0..n {
            if self.matches(row) {
                covered.insert(row);
                if self.is_correct(row) {
                    correct.insert(row);
                }
            }
        }
        Coverage { covered, correct }
    }

    pub fn stats(&self) -> RuleStats {
        let mut stats = RuleStats {
            total: self.labels.len(),
            ..RuleStats::default()
        };
        for row in 0..self.labels.len() {
            if self.matches(row) {
                stats.covered += 1;
                if self.is_correct(row) {
                    stats.correct += 1;
                }
            }
        }
        stats
    }
}

/// Rows matched by a rule's antecedent, and the subset with the rule's class.
#[derive(Debug, Clone, PartialEq)]
pub struct Coverage {
    pub covered: RowSet,
    pub correct: RowSet,
}

impl Coverage {
    pub fn stats(&self) -> RuleStats {
        RuleStats {
            covered: self.covered.count(),
            correct: self.correct.count(),
            total: self.covered.capacity(),
        }
    }
}

pub fn coverage(rule: &Rule, ds: &Dataset) -> Result<Coverage> {
    Ok(CompiledRule::new(rule, ds)?.coverage())
}

/// Whether row `row` of `ds` satisfies `lit`.
pub fn satisfies(ds: &Dataset, row: usize, lit: &Literal) -> Result<bool> {
    Ok(Matcher::new(lit, ds)?.matches(row))
}

/// Normalized share of the attribute's domain a literal admits.
fn literal_length(lit: &Literal, ds: &Dataset) -> Result<f64> {
    let (idx, _) = resolve(lit, ds)?;
    let attr = &ds.attributes()[idx];
    Ok(match (&lit.range, &attr.domain) {
        (ValueRange::Nominal(set), Domain::Nominal(dom)) => {
            if dom.is_empty() {
                1.0
            } else {
                let inside = set.values.iter().filter(|v| dom.contains(v)).count();
                inside as f64 / dom.len() as f64
            }
        }
        (ValueRange::Interval(i), Domain::Quantitative(dom)) => {
            let (Some(&min), Some(&max)) = (dom.first(), dom.last()) else {
                return Ok(1.0);
            };
            if min == max {
                return Ok(1.0);
            }
            let lo = i.lo.map_or(min, |b| b.value.max(min));
            let hi = i.hi.map_or(max, |b| b.value.min(max));
            ((hi - lo) / (max - min)).max(0.0)
        }
        _ => unreachable!("kinds checked"),
    })
}

/// Product over all predictor attributes of the normalized literal length;
/// attributes without a literal contribute 1.
pub fn volume(rule: &Rule, ds: &Dataset) -> Result<f64> {
    rule.antecedent
        .iter()
        .map(|l| literal_length(l, ds))
        .product()
}

/// Absolute support on `ds` per unit of volume. `None` when the volume is zero.
pub fn density(rule: &Rule, ds: &Dataset) -> Result<Option<f64>> {
    let vol = volume(rule, ds)?;
    let abs = CompiledRule::new(rule, ds)?.stats().correct;
    Ok((vol > 0.0).then(|| abs as f64 / vol))
}
