//! JSON document format for rule lists.
//!
//! ```json
//! {
//!   "class_attribute": "Class",
//!   "rules": [
//!     {
//!       "antecedent": [
//!         {"attribute": "Temperature", "kind": "quantitative",
//!          "lo": 25.0, "lo_inclusive": false, "hi": 30.0, "hi_inclusive": true},
//!         {"attribute": "Color", "kind": "nominal", "values": ["red", null]}
//!       ],
//!       "consequent": "4",
//!       "stats": {"covered": 8, "correct": 6, "total": 40,
//!                 "confidence": 0.75, "support": 0.15}
//!     }
//!   ]
//! }
//! ```
//!
//! A `null` bound is unbounded; a `null` nominal value is the missing marker.
//! `stats` is optional on input; `confidence` and `support` are derived and
//! ignored when reading.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Bound, Interval, Literal, NominalSet, Rule, RuleList, RuleStats, ValueRange};
use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RangeDoc {
    Nominal {
        values: Vec<Option<String>>,
    },
    Quantitative {
        lo: Option<f64>,
        #[serde(default)]
        lo_inclusive: bool,
        hi: Option<f64>,
        #[serde(default)]
        hi_inclusive: bool,
    },
}

#[derive(Serialize, Deserialize)]
struct LiteralDoc {
    attribute: String,
    #[serde(flatten)]
    range: RangeDoc,
}

#[derive(Serialize, Deserialize)]
struct StatsDoc {
    covered: usize,
    correct: usize,
    total: usize,
    #[serde(default, skip_deserializing)]
    confidence: f64,
    #[serde(default, skip_deserializing)]
    support: f64,
}

#[derive(Serialize, Deserialize)]
struct RuleDoc {
    antecedent: Vec<LiteralDoc>,
    consequent: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stats: Option<StatsDoc>,
}

#[derive(Serialize, Deserialize)]
struct RuleListDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    class_attribute: Option<String>,
    rules: Vec<RuleDoc>,
}

impl From<&Literal> for LiteralDoc {
    fn from(lit: &Literal) -> Self {
        let range = match &lit.range {
            ValueRange::Nominal(set) => {
                let mut values: Vec<Option<String>> =
                    set.values.iter().cloned().map(Some).collect();
                if set.missing {
                    values.push(None);
                }
                RangeDoc::Nominal { values }
            }
            ValueRange::Interval(i) => RangeDoc::Quantitative {
                lo: i.lo.map(|b| b.value),
                lo_inclusive: i.lo.is_some_and(|b| b.inclusive),
                hi: i.hi.map(|b| b.value),
                hi_inclusive: i.hi.is_some_and(|b| b.inclusive),
            },
        };
        LiteralDoc {
            attribute: lit.attribute.clone(),
            range,
        }
    }
}

impl TryFrom<LiteralDoc> for Literal {
    type Error = Error;

    fn try_from(doc: LiteralDoc) -> Result<Self> {
        let range = match doc.range {
            RangeDoc::Nominal { values } => {
                let mut set = NominalSet {
                    values: Vec::new(),
                    missing: false,
                };
                for v in values {
                    match v {
                        None => set.missing = true,
                        Some(v) if !set.values.contains(&v) => set.values.push(v),
                        Some(_) => {}
                    }
                }
                if set.is_empty() {
                    return Err(Error::Parse(format!(
                        "literal on `{}` has an empty value set",
                        doc.attribute
                    )));
                }
                ValueRange::Nominal(set)
            }
            RangeDoc::Quantitative {
                lo,
                lo_inclusive,
                hi,
                hi_inclusive,
            } => ValueRange::Interval(Interval {
                lo: lo.map(|value| Bound {
                    value,
                    inclusive: lo_inclusive,
                }),
                hi: hi.map(|value| Bound {
                    value,
                    inclusive: hi_inclusive,
                }),
            }),
        };
        Ok(Literal {
            attribute: doc.attribute,
            range,
        })
    }
}

impl From<&Rule> for RuleDoc {
    fn from(rule: &Rule) -> Self {
        RuleDoc {
            antecedent: rule.antecedent.iter().map(LiteralDoc::from).collect(),
            consequent: rule.consequent.clone(),
            stats: Some(StatsDoc {
                covered: rule.stats.covered,
                correct: rule.stats.correct,
                total: rule.stats.total,
                confidence: rule.confidence(),
                support: rule.support(),
            }),
        }
    }
}

impl TryFrom<RuleDoc> for Rule {
    type Error = Error;

    fn try_from(doc: RuleDoc) -> Result<Self> {
        let antecedent = doc
            .antecedent
            .into_iter()
            .map(Literal::try_from)
            .collect::<Result<Vec<_>>>()?;
        let mut rule = Rule::new(antecedent, doc.consequent)?;
        if let Some(s) = doc.stats {
            rule.stats = RuleStats {
                covered: s.covered,
                correct: s.correct,
                total: s.total,
            };
        }
        Ok(rule)
    }
}

impl RuleList {
    pub fn to_json(&self) -> Result<String> {
        let doc = RuleListDoc {
            class_attribute: self.class_attribute.clone(),
            rules: self.rules.iter().map(RuleDoc::from).collect(),
        };
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        Ok(text)
    }

    /// Parse without checking attribute names.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: RuleListDoc = serde_json::from_str(text)?;
        Ok(RuleList {
            class_attribute: doc.class_attribute,
            rules: doc
                .rules
                .into_iter()
                .map(Rule::try_from)
                .collect::<Result<_>>()?,
        })
    }

    /// Parse and check every literal against the attributes of `ds`.
    pub fn from_json_checked(text: &str, ds: &Dataset) -> Result<Self> {
        let list = Self::from_json(text)?;
        list.validate(ds)?;
        Ok(list)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
