use std::collections::HashMap;

use crate::data::Dataset;
use crate::rule::Interval;

/// Sorted distinct raw values of every quantitative attribute: the steps
/// available to refit and extension.
#[derive(Debug, Clone, Default)]
pub struct FinerGrid {
    values: HashMap<String, Vec<f64>>,
}

impl FinerGrid {
    pub fn new(ds: &Dataset) -> Self {
        FinerGrid {
            values: ds
                .attributes()
                .iter()
                .filter_map(|a| Some((a.name.clone(), a.quantitative_values()?.to_vec())))
                .collect(),
        }
    }

    pub fn values(&self, attribute: &str) -> Option<&[f64]> {
        self.values.get(attribute).map(Vec::as_slice)
    }

    /// Grid position of a value present in the domain.
    pub fn position(&self, attribute: &str, value: f64) -> Option<usize> {
        let v = self.values(attribute)?;
        v.binary_search_by(|x| x.total_cmp(&value)).ok()
    }

    /// First and last grid positions inside `interval`, `None` when the
    /// interval holds no domain value.
    pub fn span(&self, attribute: &str, interval: &Interval) -> Option<(usize, usize)> {
        span_of(self.values(attribute)?, interval)
    }
}

pub(crate) fn span_of(values: &[f64], interval: &Interval) -> Option<(usize, usize)> {
    let lo = values.partition_point(|&v| {
        interval
            .lo
            .is_some_and(|b| v < b.value || (!b.inclusive && v == b.value))
    });
    let hi = values.partition_point(|&v| {
        interval
            .hi
            .is_none_or(|b| v < b.value || (b.inclusive && v == b.value))
    });
    (lo < hi).then(|| (lo, hi - 1))
}
