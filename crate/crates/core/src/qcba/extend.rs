use super::{FinerGrid, QcbaConfig};
use crate::data::{Column, Dataset};
use crate::error::Result;
use crate::rule::{compare, Bound, Literal, Matcher, Rule, RuleStats, ValueRange};

/// Coverage counts of a rule as the interval of one literal ranges over grid
/// positions while every other literal stays fixed. Any contiguous span of
/// positions is answered in constant time from prefix sums.
#[derive(Debug, Clone)]
pub struct LiteralProfile {
    /// Current span of the literal on the grid.
    pub lo: usize,
    pub hi: usize,
    covered: Vec<usize>,
    correct: Vec<usize>,
    total: usize,
}

impl LiteralProfile {
    /// `None` when literal `index` is nominal or holds no grid value.
    pub fn new(rule: &Rule, index: usize, raw: &Dataset, grid: &FinerGrid) -> Result<Option<Self>> {
        let lit = &rule.antecedent[index];
        let ValueRange::Interval(interval) = &lit.range else {
            return Ok(None);
        };
        let Some(values) = grid.values(&lit.attribute) else {
            return Ok(None);
        };
        let Some((lo, hi)) = grid.span(&lit.attribute, interval) else {
            return Ok(None);
        };
        let others = rule
            .antecedent
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != index)
            .map(|(_, l)| Matcher::new(l, raw))
            .collect::<Result<Vec<_>>>()?;
        let (idx, _) = raw.attribute(&lit.attribute)?;
        let Column::Quantitative(column) = raw.column(idx) else {
            return Ok(None);
        };
        let class = raw.class_code(&rule.consequent);
        let m = values.len();
        let mut covered = vec![0; m + 1];
        let mut correct = vec![0; m + 1];
        for (row, v) in column.iter().enumerate() {
            let Some(v) = v else { continue };
            if !others.iter().all(|o| o.matches(row)) {
                continue;
            }
            let p = values
                .binary_search_by(|x| x.total_cmp(v))
                .expect("grid built from the same data");
            covered[p + 1] += 1;
            if Some(raw.label_codes()[row]) == class {
                correct[p + 1] += 1;
            }
        }
        for p in 0..m {
            covered[p + 1] += covered[p];
            correct[p + 1] += correct[p];
        }
        Ok(Some(LiteralProfile {
            lo,
            hi,
            covered,
            correct,
            total: raw.n_rows(),
        }))
    }

    /// Number of grid positions.
    pub fn grid_len(&self) -> usize {
        self.covered.len() - 1
    }

    /// Stats of the rule with the literal spanning positions `lo..=hi`.
    pub fn stats(&self, lo: usize, hi: usize) -> RuleStats {
        RuleStats {
            covered: self.covered[hi + 1] - self.covered[lo],
            correct: self.correct[hi + 1] - self.correct[lo],
            total: self.total,
        }
    }
}

/// Which end of an interval an extension moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Lower,
    Higher,
}

/// A direct extension: literal `literal` of the seed rule widened one grid
/// step in `direction`.
#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    pub literal: usize,
    pub direction: Direction,
    pub rule: Rule,
}

/// Move one end of literal `index` out to the grid value `value`, inclusive.
fn widened(rule: &Rule, index: usize, direction: Direction, value: f64) -> Rule {
    let mut out = rule.clone();
    let lit = &mut out.antecedent[index];
    let mut interval = *lit.as_interval().expect("quantitative literal");
    match direction {
        Direction::Lower => interval.lo = Some(Bound::inclusive(value)),
        Direction::Higher => interval.hi = Some(Bound::inclusive(value)),
    }
    *lit = Literal::interval(lit.attribute.clone(), interval);
    out
}

/// Direct extensions of a rule, in antecedent order with the lower direction
/// first. Nominal literals and literals at the grid edge in a direction give
/// no candidate for it. Stats of the returned rules are not computed.
pub fn get_extensions(rule: &Rule, grid: &FinerGrid) -> Vec<Extension> {
    let mut out = Vec::new();
    for (i, lit) in rule.antecedent.iter().enumerate() {
        let ValueRange::Interval(interval) = &lit.range else {
            continue;
        };
        let Some(values) = grid.values(&lit.attribute) else {
            continue;
        };
        let Some((lo, hi)) = grid.span(&lit.attribute, interval) else {
            continue;
        };
        if lo > 0 {
            out.push(Extension {
                literal: i,
                direction: Direction::Lower,
                rule: widened(rule, i, Direction::Lower, values[lo - 1]),
            });
        }
        if hi + 1 < values.len() {
            out.push(Extension {
                literal: i,
                direction: Direction::Higher,
                rule: widened(rule, i, Direction::Higher, values[hi + 1]),
            });
        }
    }
    out
}

fn crisp_accept(cand: &RuleStats, best: &RuleStats, cfg: &QcbaConfig) -> bool {
    cand.confidence() - best.confidence() >= cfg.min_improvement && cand.correct >= best.correct
}

fn conditional_accept(cand: &RuleStats, best: &RuleStats, cfg: &QcbaConfig) -> bool {
    cand.confidence() - best.confidence() >= cfg.min_cond_improvement
}

struct Candidate {
    literal: usize,
    direction: Direction,
    lo: usize,
    hi: usize,
    rule: Rule,
}

/// Widen literal intervals step by step over the grid while confidence and
/// support do not drop.
///
/// Each round ranks the direct extensions of the current best rule. The first
/// one passing crisp accept replaces it. A candidate passing only conditional
/// accept is pushed further along the same literal and direction, one grid
/// step at a time, while it stays conditionally acceptable; if some step
/// passes crisp accept it replaces the current best. Both tests compare
/// against the current best rule. The search ends after a round with no
/// replacement.
pub fn extend_rule(rule: &Rule, raw: &Dataset, grid: &FinerGrid, cfg: &QcbaConfig) -> Result<Rule> {
    let mut best = rule.clone().with_stats(raw)?;
    loop {
        let profiles: Vec<Option<LiteralProfile>> = (0..best.antecedent.len())
            .map(|i| LiteralProfile::new(&best, i, raw, grid))
            .collect::<Result<_>>()?;
        let mut candidates = Vec::new();
        for (i, p) in profiles.iter().enumerate() {
            let Some(p) = p else { continue };
            let values = grid
                .values(&best.antecedent[i].attribute)
                .expect("profiled");
            if p.lo > 0 {
                let mut rule = widened(&best, i, Direction::Lower, values[p.lo - 1]);
                rule.stats = p.stats(p.lo - 1, p.hi);
                candidates.push(Candidate {
                    literal: i,
                    direction: Direction::Lower,
                    lo: p.lo - 1,
                    hi: p.hi,
                    rule,
                });
            }
            if p.hi + 1 < p.grid_len() {
                let mut rule = widened(&best, i, Direction::Higher, values[p.hi + 1]);
                rule.stats = p.stats(p.lo, p.hi + 1);
                candidates.push(Candidate {
                    literal: i,
                    direction: Direction::Higher,
                    lo: p.lo,
                    hi: p.hi + 1,
                    rule,
                });
            }
        }
        candidates.sort_by(|a, b| compare(&a.rule, &b.rule));

        let mut next: Option<Rule> = None;
        for cand in &candidates {
            if crisp_accept(&cand.rule.stats, &best.stats, cfg) {
                next = Some(cand.rule.clone());
                break;
            }
            if !conditional_accept(&cand.rule.stats, &best.stats, cfg) {
                continue;
            }
            let profile = profiles[cand.literal]
                .as_ref()
                .expect("candidate has a profile");
            let values = grid
                .values(&best.antecedent[cand.literal].attribute)
                .expect("profiled");
            let (mut lo, mut hi) = (cand.lo, cand.hi);
            loop {
                match cand.direction {
                    Direction::Lower if lo > 0 => lo -= 1,
                    Direction::Higher if hi + 1 < values.len() => hi += 1,
                    _ => break,
                }
                let stats = profile.stats(lo, hi);
                if crisp_accept(&stats, &best.stats, cfg) {
                    let value = match cand.direction {
                        Direction::Lower => values[lo],
                        Direction::Higher => values[hi],
                    };
                    let mut rule = widened(&best, cand.literal, cand.direction, value);
                    rule.stats = stats;
                    next = Some(rule);
                    break;
                }
                if !conditional_accept(&stats, &best.stats, cfg) {
                    break;
                }
            }
            if next.is_some() {
                break;
            }
        }
        match next {
            Some(r) => {
                debug_assert_eq!(
                    r.clone().with_stats(raw).map(|x| x.stats).ok(),
                    Some(r.stats)
                );
                best = r;
            }
            None => return Ok(best),
        }
    }
}
