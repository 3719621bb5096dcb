//! Column-typed datasets with one nominal class attribute.
//!
//! Predictor attributes are either nominal (unordered string values) or
//! quantitative (ordered floating point values). The domain of an attribute is
//! the set of distinct non-missing values seen in the rows the dataset holds,
//! so a training split taken with [`Dataset::subset`] gets its own domains.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cell tokens treated as a missing value.
pub const MISSING_TOKENS: [&str; 2] = ["", "?"];

/// Text used when writing a missing value.
pub const MISSING_TEXT: &str = "?";

/// Numeric columns need at least this many distinct values to be typed quantitative.
pub const MIN_QUANTITATIVE_DISTINCT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    Nominal,
    Quantitative,
}

impl AttributeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttributeKind::Nominal => "nominal",
            AttributeKind::Quantitative => "quantitative",
        }
    }
}

impl fmt::Display for AttributeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Distinct observed values. Nominal values keep first-appearance order,
/// quantitative values are strictly ascending.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Nominal(Vec<String>),
    Quantitative(Vec<f64>),
}

impl Domain {
    pub fn len(&self) -> usize {
        match self {
            Domain::Nominal(v) => v.len(),
            Domain::Quantitative(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSchema {
    pub name: String,
    pub domain: Domain,
    /// Set on nominal columns produced by discretizing a quantitative column.
    pub binned: bool,
}

impl AttributeSchema {
    pub fn kind(&self) -> AttributeKind {
        match self.domain {
            Domain::Nominal(_) => AttributeKind::Nominal,
            Domain::Quantitative(_) => AttributeKind::Quantitative,
        }
    }

    pub fn nominal_values(&self) -> Option<&[String]> {
        match &self.domain {
            Domain::Nominal(v) => Some(v),
            Domain::Quantitative(_) => None,
        }
    }

    pub fn quantitative_values(&self) -> Option<&[f64]> {
        match &self.domain {
            Domain::Quantitative(v) => Some(v),
            Domain::Nominal(_) => None,
        }
    }

    pub fn code_of(&self, value: &str) -> Option<u32> {
        self.nominal_values()?
            .iter()
            .position(|v| v == value)
            .map(|i| i as u32)
    }

    /// `(min, max)` of a non-empty quantitative domain.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        let values = self.quantitative_values()?;
        Some((*values.first()?, *values.last()?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    /// Codes index into the attribute's nominal domain.
    Nominal(Vec<Option<u32>>),
    Quantitative(Vec<Option<f64>>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Nominal(v) => v.len(),
            Column::Quantitative(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match self {
            Column::Nominal(v) => v[row].is_none(),
            Column::Quantitative(v) => v[row].is_none(),
        }
    }
}

/// Column data before domains are computed; used to build datasets in code.
#[derive(Debug, Clone, PartialEq)]
pub enum RawColumn {
    Nominal(Vec<Option<String>>),
    Quantitative(Vec<Option<f64>>),
}

impl RawColumn {
    fn len(&self) -> usize {
        match self {
            RawColumn::Nominal(v) => v.len(),
            RawColumn::Quantitative(v) => v.len(),
        }
    }
}

/// Options controlling CSV ingestion.
#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    /// Class column name; the last column when `None`.
    pub class_column: Option<String>,
    /// Forced attribute kinds, overriding automatic typing.
    pub kinds: BTreeMap<String, AttributeKind>,
}

impl CsvOptions {
    /// Parse a sidecar schema file of `name = nominal|quantitative|class` lines.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn from_schema_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_schema(&text)
    }

    pub fn parse_schema(text: &str) -> Result<Self> {
        let mut opts = CsvOptions::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, kind) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!(
                    "schema line {}: expected `name = kind`",
                    lineno + 1
                ))
            })?;
            let name = name.trim().to_string();
            match kind.trim() {
                "nominal" => {
                    opts.kinds.insert(name, AttributeKind::Nominal);
                }
                "quantitative" => {
                    opts.kinds.insert(name, AttributeKind::Quantitative);
                }
                "class" => opts.class_column = Some(name),
                other => {
                    return Err(Error::Parse(format!(
                        "schema line {}: unknown kind `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(opts)
    }

    /// Options that reproduce the kinds and class column of `ds`.
    pub fn like(ds: &Dataset) -> Self {
        CsvOptions {
            class_column: Some(ds.class.name.clone()),
            kinds: ds
                .attributes
                .iter()
                .map(|a| (a.name.clone(), a.kind()))
                .collect(),
        }
    }
}

fn is_missing_token(cell: &str) -> bool {
    MISSING_TOKENS.contains(&cell.trim())
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Sort ascending and drop duplicates.
fn sorted_distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn nominal_encode(values: &[Option<String>]) -> (Vec<String>, Vec<Option<u32>>) {
    let mut domain: Vec<String> = Vec::new();
    let mut index: HashMap<&str, u32> = HashMap::new();
    let mut codes = Vec::with_capacity(values.len());
    for v in values {
        codes.push(v.as_deref().map(|s| {
            *index.entry(s).or_insert_with(|| {
                domain.push(s.to_string());
                (domain.len() - 1) as u32
            })
        }));
    }
    (domain, codes)
}

/// A training (or test) table: predictor columns plus one class label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    attributes: Vec<AttributeSchema>,
    columns: Vec<Column>,
    class: AttributeSchema,
    labels: Vec<u32>,
}

impl Dataset {
    /// Build a dataset from raw columns; domains are computed from the data.
    pub fn from_columns(
        columns: Vec<(String, RawColumn)>,
        class_name: impl Into<String>,
        labels: Vec<String>,
    ) -> Result<Self> {
        let n = labels.len();
        let mut attributes = Vec::with_capacity(columns.len());
        let mut cols = Vec::with_capacity(columns.len());
        if let Some((name, col)) = columns.iter().find(|(_, c)| c.len() != n) {
            return Err(Error::InvalidParameter(format!(
                "column `{name}` has {} values but there are {n} labels",
                col.len()
            )));
        }
        for (name, col) in columns {
            if attributes.iter().any(|a: &AttributeSchema| a.name == name) {
                return Err(Error::DuplicateAttribute(name));
            }
            match col {
                RawColumn::Nominal(values) => {
                    let (domain, codes) = nominal_encode(&values);
                    attributes.push(AttributeSchema {
                        name,
                        domain: Domain::Nominal(domain),
                        binned: false,
                    });
                    cols.push(Column::Nominal(codes));
                }
                RawColumn::Quantitative(values) => {
                    let domain = sorted_distinct(values.iter().flatten().copied());
                    attributes.push(AttributeSchema {
                        name,
                        domain: Domain::Quantitative(domain),
                        binned: false,
                    });
                    cols.push(Column::Quantitative(values));
                }
            }
        }
        let labels: Vec<Option<String>> = labels.into_iter().map(Some).collect();
        let (class_domain, codes) = nominal_encode(&labels);
        Ok(Dataset {
            attributes,
            columns: cols,
            class: AttributeSchema {
                name: class_name.into(),
                domain: Domain::Nominal(class_domain),
                binned: false,
            },
            labels: codes
                .into_iter()
                .map(|c| c.expect("labels present"))
                .collect(),
        })
    }

    /// Assemble a dataset from already-encoded parts. Domains are trusted as given.
    pub(crate) fn from_encoded(
        attributes: Vec<AttributeSchema>,
        columns: Vec<Column>,
        class: AttributeSchema,
        labels: Vec<u32>,
    ) -> Self {
        debug_assert_eq!(attributes.len(), columns.len());
        Dataset {
            attributes,
            columns,
            class,
            labels,
        }
    }

    /// Build from a header and string records, applying the typing rules:
    /// numeric columns with at least three distinct values become quantitative,
    /// everything else nominal; `?` and empty cells are missing.
    pub fn from_records(
        header: Vec<String>,
        records: Vec<Vec<String>>,
        opts: &CsvOptions,
    ) -> Result<Self> {
        if header.is_empty() {
            return Err(Error::Parse("header row is empty".into()));
        }
        for (i, rec) in records.iter().enumerate() {
            if rec.len() != header.len() {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    found: rec.len(),
                    expected: header.len(),
                });
            }
        }
        let class_idx = match &opts.class_column {
            Some(name) => header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::UnknownAttribute(name.clone()))?,
            None => header.len() - 1,
        };
        for name in opts.kinds.keys() {
            if !header.contains(name) {
                return Err(Error::UnknownAttribute(name.clone()));
            }
        }

        let mut labels = Vec::with_capacity(records.len());
        for (i, rec) in records.iter().enumerate() {
            let cell = rec[class_idx].trim();
            if is_missing_token(cell) {
                return Err(Error::MissingClass { row: i + 1 });
            }
            labels.push(cell.to_string());
        }

        let mut columns = Vec::with_capacity(header.len() - 1);
        for (j, name) in header.iter().enumerate() {
            if j == class_idx {
                continue;
            }
            let cells: Vec<&str> = records.iter().map(|r| r[j].trim()).collect();
            let numeric: Option<Vec<Option<f64>>> = cells
                .iter()
                .map(|c| {
                    if is_missing_token(c) {
                        Some(None)
                    } else {
                        parse_number(c).map(Some)
                    }
                })
                .collect();
            let kind = match opts.kinds.get(name) {
                Some(&k) => k,
                None => match &numeric {
                    Some(values)
                        if sorted_distinct(values.iter().flatten().copied()).len()
                            >= MIN_QUANTITATIVE_DISTINCT =>
                    {
                        AttributeKind::Quantitative
                    }
                    _ => AttributeKind::Nominal,
                },
            };
            let raw = match kind {
                AttributeKind::Quantitative => match numeric {
                    Some(values) => RawColumn::Quantitative(values),
                    None => {
                        let bad = cells
                            .iter()
                            .find(|c| !is_missing_token(c) && parse_number(c).is_none())
                            .map(|c| c.to_string())
                            .unwrap_or_default();
                        return Err(Error::NotNumeric {
                            attribute: name.clone(),
                            value: bad,
                        });
                    }
                },
                AttributeKind::Nominal => RawColumn::Nominal(
                    cells
                        .iter()
                        .map(|c| (!is_missing_token(c)).then(|| c.to_string()))
                        .collect(),
                ),
            };
            columns.push((name.clone(), raw));
        }
        Dataset::from_columns(columns, header[class_idx].clone(), labels)
    }

    pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Self> {
        let path = path.as_ref();
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file, opts)
    }

    pub fn read_csv<R: std::io::Read>(reader: R, opts: &CsvOptions) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(reader);
        let header: Vec<String> = rdr
            .headers()?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        let mut records = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() == 1 && rec[0].trim().is_empty() && header.len() > 1 {
                continue;
            }
            records.push(rec.iter().map(str::to_string).collect());
        }
        Self::from_records(header, records, opts)
    }

    /// Write as CSV with the class as the last column; missing values as `?`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.attributes.iter().map(|a| a.name.as_str()).collect();
        header.push(&self.class.name);
        wtr.write_record(&header)?;
        for row in 0..self.n_rows() {
            let mut rec: Vec<String> = (0..self.attributes.len())
                .map(|j| self.cell_text(row, j))
                .collect();
            rec.push(self.label(row).to_string());
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn attributes(&self) -> &[AttributeSchema] {
        &self.attributes
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, index: usize) -> &Column {
        &self.columns[index]
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn attribute(&self, name: &str) -> Result<(usize, &AttributeSchema)> {
        self.attribute_index(name)
            .map(|i| (i, &self.attributes[i]))
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    pub fn class_attribute(&self) -> &AttributeSchema {
        &self.class
    }

    pub fn class_values(&self) -> &[String] {
        self.class.nominal_values().expect("class is nominal")
    }

    pub fn class_code(&self, label: &str) -> Option<u32> {
        self.class.code_of(label)
    }

    pub fn label_codes(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, row: usize) -> &str {
        &self.class_values()[self.labels[row] as usize]
    }

    /// Number of rows per class code.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_values().len()];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Most frequent class code; ties go to the class seen first.
    pub fn majority_class(&self) -> Option<u32> {
        majority(&self.class_counts())
    }

    /// Text of a predictor cell as it would be written to CSV.
    pub fn cell_text(&self, row: usize, attr: usize) -> String {
        match (&self.columns[attr], &self.attributes[attr].domain) {
            (Column::Nominal(codes), Domain::Nominal(values)) => codes[row]
                .map(|c| values[c as usize].clone())
                .unwrap_or_else(|| MISSING_TEXT.to_string()),
            (Column::Quantitative(values), _) => values[row]
                .map(|v| v.to_string())
                .unwrap_or_else(|| MISSING_TEXT.to_string()),
            _ => unreachable!("column and domain kinds agree"),
        }
    }

    /// Ordered distinct non-missing values of an attribute.
    pub fn distinct_values(&self, name: &str) -> Result<&Domain> {
        Ok(&self.attribute(name)?.1.domain)
    }

    /// New dataset holding the given rows, with domains recomputed over them.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        let columns = self
            .attributes
            .iter()
            .zip(&self.columns)
            .map(|(attr, col)| {
                let raw = match (col, &attr.domain) {
                    (Column::Nominal(codes), Domain::Nominal(values)) => RawColumn::Nominal(
                        rows.iter()
                            .map(|&r| codes[r].map(|c| values[c as usize].clone()))
                            .collect(),
                    ),
                    (Column::Quantitative(values), _) => {
                        RawColumn::Quantitative(rows.iter().map(|&r| values[r]).collect())
                    }
                    _ => unreachable!("column and domain kinds agree"),
                };
                (attr.name.clone(), raw)
            })
            .collect();
        let labels = rows.iter().map(|&r| self.label(r).to_string()).collect();
        let mut ds = Dataset::from_columns(columns, self.class.name.clone(), labels)
            .expect("subset of a valid dataset is valid");
        for (a, orig) in ds.attributes.iter_mut().zip(&self.attributes) {
            a.binned = orig.binned;
        }
        ds
    }
}

/// Index of the largest count; ties go to the lowest index.
pub fn majority(counts: &[usize]) -> Option<u32> {
    let mut best: Option<(usize, usize)> = None;
    for (i, &c) in counts.iter().enumerate() {
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((i, c));
        }
    }
    best.map(|(i, _)| i as u32)
}
