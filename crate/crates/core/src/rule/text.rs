//! Human-readable rule text, e.g.
//! `Temperature=(25;30] and Humidity=(40;60] → Class=4`.

use std::fmt;

use super::{Bound, Interval, Literal, NominalSet, Rule, RuleList, ValueRange};
use crate::data::MISSING_TEXT;
use crate::error::{Error, Result};

pub const ARROW: &str = "→";

fn fmt_number(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        v.to_string()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lo {
            Some(b) => write!(
                f,
                "{}{}",
                if b.inclusive { '[' } else { '(' },
                fmt_number(b.value)
            )?,
            None => f.write_str("(-inf")?,
        }
        f.write_str(";")?;
        match self.hi {
            Some(b) => write!(
                f,
                "{}{}",
                fmt_number(b.value),
                if b.inclusive { ']' } else { ')' }
            ),
            None => f.write_str("+inf)"),
        }
    }
}

impl fmt::Display for NominalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<&str> = self.values.iter().map(String::as_str).collect();
        if self.missing {
            items.push(MISSING_TEXT);
        }
        if items.len() == 1 {
            f.write_str(items[0])
        } else {
            write!(f, "{{{}}}", items.join(","))
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.range {
            ValueRange::Nominal(s) => write!(f, "{}={}", self.attribute, s),
            ValueRange::Interval(i) => write!(f, "{}={}", self.attribute, i),
        }
    }
}

impl Rule {
    /// Text form with the given class attribute name on the right-hand side.
    pub fn render(&self, class_name: &str) -> String {
        let lhs = if self.antecedent.is_empty() {
            "{}".to_string()
        } else {
            self.antecedent
                .iter()
                .map(Literal::to_string)
                .collect::<Vec<_>>()
                .join(" and ")
        };
        format!("{lhs} {ARROW} {class_name}={}", self.consequent)
    }

    /// Parse the text form. Returns the rule and the class attribute name.
    /// Accepts `→`, `->` or `=>` as the arrow. Stats are left at zero.
    pub fn parse(text: &str) -> Result<(Rule, String)> {
        let (lhs, rhs) = [ARROW, "=>", "->"]
            .iter()
            .find_map(|arrow| text.split_once(arrow))
            .ok_or_else(|| Error::Parse(format!("no arrow in rule `{text}`")))?;
        let (class_name, consequent) = rhs
            .trim()
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("consequent `{}` lacks `=`", rhs.trim())))?;
        let lhs = lhs.trim();
        let antecedent = if lhs.is_empty() || lhs == "{}" {
            Vec::new()
        } else {
            lhs.split(" and ")
                .map(parse_literal)
                .collect::<Result<Vec<_>>>()?
        };
        let rule = Rule::new(antecedent, consequent.trim())?;
        Ok((rule, class_name.trim().to_string()))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("class"))
    }
}

impl fmt::Display for RuleList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let class = self.class_attribute.as_deref().unwrap_or("class");
        for (i, r) in self.rules.iter().enumerate() {
            writeln!(
                f,
                "{:>3}  {}  (conf {:.3}, supp {:.3})",
                i + 1,
                r.render(class),
                r.confidence(),
                r.support()
            )?;
        }
        Ok(())
    }
}

fn parse_number(s: &str) -> Result<f64> {
    match s.trim() {
        "-inf" => Ok(f64::NEG_INFINITY),
        "+inf" | "inf" => Ok(f64::INFINITY),
        t => t
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("`{t}` is not a number"))),
    }
}

fn parse_interval(s: &str) -> Result<Interval> {
    let bad = || Error::Parse(format!("malformed interval `{s}`"));
    let lo_inclusive = match s.chars().next() {
        Some('[') => true,
        Some('(') => false,
        _ => return Err(bad()),
    };
    let hi_inclusive = match s.chars().last() {
        Some(']') => true,
        Some(')') => false,
        _ => return Err(bad()),
    };
    let inner = &s[1..s.len() - 1];
    let (lo, hi) = inner.split_once(';').ok_or_else(bad)?;
    let lo = parse_number(lo)?;
    let hi = parse_number(hi)?;
    Ok(Interval {
        lo: (lo != f64::NEG_INFINITY).then_some(Bound {
            value: lo,
            inclusive: lo_inclusive,
        }),
        hi: (hi != f64::INFINITY).then_some(Bound {
            value: hi,
            inclusive: hi_inclusive,
        }),
    })
}

fn parse_literal(s: &str) -> Result<Literal> {
    let (attr, value) = s
        .trim()
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("literal `{}` lacks `=`", s.trim())))?;
    let attribute = attr.trim().to_string();
    let value = value.trim();
    let is_interval = (value.starts_with('(') || value.starts_with('['))
        && (value.ends_with(')') || value.ends_with(']'))
        && value.contains(';');
    let range = if is_interval {
        ValueRange::Interval(parse_interval(value)?)
    } else {
        let items: Vec<&str> = match value.strip_prefix('{').and_then(|v| v.strip_suffix('}')) {
            Some(inner) => inner.split(',').map(str::trim).collect(),
            None => vec![value],
        };
        let mut set = NominalSet {
            values: Vec::new(),
            missing: false,
        };
        for item in items {
            if item == MISSING_TEXT {
                set.missing = true;
            } else if !set.values.iter().any(|v| v == item) {
                set.values.push(item.to_string());
            }
        }
        if set.is_empty() {
            return Err(Error::Parse(format!("empty value set in `{s}`")));
        }
        ValueRange::Nominal(set)
    };
    Ok(Literal { attribute, range })
}
