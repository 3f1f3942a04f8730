//! Instances, datasets, CSV ingestion and preprocessing.
//!
//! Labels are binary and stored as [`Label::Negative`] / [`Label::Positive`]
//! (−1 / +1). Features are expected to lie in `[0, 1]` once a
//! [`NormalizationParams`] has been applied.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Binary class tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    /// Sign rule shared by all classifiers: a score of exactly zero maps to +1.
    pub fn from_score(score: f64) -> Label {
        if score >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Label::Negative => -1.0,
            Label::Positive => 1.0,
        }
    }

    pub fn flip(self) -> Label {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }
}

impl From<Label> for i8 {
    fn from(l: Label) -> i8 {
        match l {
            Label::Negative => -1,
            Label::Positive => 1,
        }
    }
}

impl TryFrom<i8> for Label {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, Self::Error> {
        match v {
            -1 => Ok(Label::Negative),
            1 => Ok(Label::Positive),
            other => Err(format!("label must be -1 or +1, got {other}")),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", i8::from(*self))
    }
}

impl std::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Label> {
        match s.trim() {
            "-1" | "neg" | "negative" => Ok(Label::Negative),
            "1" | "+1" | "pos" | "positive" => Ok(Label::Positive),
            other => Err(Error::Parameter(format!("unknown class label {other:?}; use -1 or +1"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub features: Vec<f64>,
    pub label: Option<Label>,
}

impl Instance {
    pub fn new(features: Vec<f64>, label: Option<Label>) -> Self {
        Instance { features, label }
    }

    pub fn labeled(features: Vec<f64>, label: Label) -> Self {
        Instance {
            features,
            label: Some(label),
        }
    }

    pub fn unlabeled(features: Vec<f64>) -> Self {
        Instance {
            features,
            label: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }

    /// The label, or [`Error::MissingLabels`] when absent.
    pub fn require_label(&self) -> Result<Label> {
        self.label.ok_or(Error::MissingLabels)
    }
}

/// An ordered collection of instances sharing one dimensionality. Order is
/// the stream order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    instances: Vec<Instance>,
    dim: usize,
    feature_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset, checking that every instance has `feature_names.len()`
    /// features.
    pub fn new(instances: Vec<Instance>, feature_names: Vec<String>) -> Result<Self> {
        let dim = feature_names.len();
        if dim == 0 {
            return Err(Error::Parameter("dataset needs at least one feature".into()));
        }
        for inst in &instances {
            if inst.dim() != dim {
                return Err(Error::Shape {
                    expected: dim,
                    actual: inst.dim(),
                });
            }
        }
        Ok(Dataset {
            instances,
            dim,
            feature_names,
        })
    }

    /// Like [`Dataset::new`] with generated names `x0..x{d-1}`.
    pub fn from_instances(instances: Vec<Instance>, dim: usize) -> Result<Self> {
        Self::new(instances, default_feature_names(dim))
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn into_instances(self) -> Vec<Instance> {
        self.instances
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn is_labeled(&self) -> bool {
        !self.instances.is_empty() && self.instances.iter().all(|i| i.label.is_some())
    }

    /// All labels, failing if any instance is unlabeled.
    pub fn labels(&self) -> Result<Vec<Label>> {
        self.instances.iter().map(Instance::require_label).collect()
    }

    pub fn count_label(&self, label: Label) -> usize {
        self.instances
            .iter()
            .filter(|i| i.label == Some(label))
            .count()
    }

    /// A new dataset with the same schema holding `instances`.
    pub fn with_instances(&self, instances: Vec<Instance>) -> Result<Dataset> {
        Dataset::new(instances, self.feature_names.clone())
    }

    /// Contiguous sub-range in stream order.
    pub fn slice(&self, start: usize, end: usize) -> Dataset {
        Dataset {
            instances: self.instances[start..end].to_vec(),
            dim: self.dim,
            feature_names: self.feature_names.clone(),
        }
    }

    /// Splits at position `at` into `[0, at)` and `[at, len)`.
    pub fn split_at(&self, at: usize) -> (Dataset, Dataset) {
        (self.slice(0, at), self.slice(at, self.len()))
    }

    /// Concatenates two datasets with identical dimensionality.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if other.dim != self.dim {
            return Err(Error::Shape {
                expected: self.dim,
                actual: other.dim,
            });
        }
        let mut instances = self.instances.clone();
        instances.extend(other.instances.iter().cloned());
        Ok(Dataset {
            instances,
            dim: self.dim,
            feature_names: self.feature_names.clone(),
        })
    }

    /// Same instances with labels removed.
    pub fn unlabeled(&self) -> Dataset {
        Dataset {
            instances: self
                .instances
                .iter()
                .map(|i| Instance::unlabeled(i.features.clone()))
                .collect(),
            dim: self.dim,
            feature_names: self.feature_names.clone(),
        }
    }
}

pub fn default_feature_names(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("x{i}")).collect()
}

/// Which CSV column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

/// Reads a headered CSV file. Labels map to +1 for `positive_label` and −1
/// for the other value; more than two distinct label values are rejected.
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: Option<&LabelColumn>,
    positive_label: &str,
) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, label_column, positive_label)
}

/// [`load_csv`] over any reader.
pub fn read_csv<R: Read>(
    reader: R,
    label_column: Option<&LabelColumn>,
    positive_label: &str,
) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyInput("csv has no header row".into()));
    }
    let label_idx = match label_column {
        None => None,
        Some(LabelColumn::Index(i)) => {
            if *i >= headers.len() {
                return Err(Error::Index {
                    index: *i,
                    dim: headers.len(),
                });
            }
            Some(*i)
        }
        Some(LabelColumn::Name(name)) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Format {
                    row: 0,
                    message: format!("label column {name:?} not found in header"),
                })?,
        ),
    };
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut instances = Vec::new();
    let mut raw_labels = BTreeSet::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        // Header is row 1; the first data row is row 2.
        let row = r + 2;
        if record.len() != headers.len() {
            return Err(Error::Format {
                row,
                message: format!("expected {} cells, found {}", headers.len(), record.len()),
            });
        }
        let mut features = Vec::with_capacity(feature_names.len());
        let mut label = None;
        for (c, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            if Some(c) == label_idx {
                raw_labels.insert(cell.to_string());
                label = Some(if cell == positive_label {
                    Label::Positive
                } else {
                    Label::Negative
                });
                continue;
            }
            if cell.is_empty() {
                return Err(Error::Parse {
                    row,
                    column: c,
                    value: cell.to_string(),
                });
            }
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                column: c,
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    column: c,
                    value: cell.to_string(),
                });
            }
            features.push(v);
        }
        instances.push(Instance::new(features, label));
    }
    if instances.is_empty() {
        return Err(Error::EmptyInput("csv has no data rows".into()));
    }
    if raw_labels.len() > 2 {
        return Err(Error::Parameter(format!(
            "label column has {} distinct values; only binary problems are supported, \
             filter the file down to two classes first",
            raw_labels.len()
        )));
    }
    if label_idx.is_some() && raw_labels.len() == 2 && !raw_labels.contains(positive_label) {
        return Err(Error::Parameter(format!(
            "positive label {positive_label:?} does not occur in the label column"
        )));
    }
    Dataset::new(instances, feature_names)
}

/// Writes a dataset as CSV with a trailing `class` column (values `1` / `-1`)
/// when labeled. Floats use the shortest round-trip representation.
pub fn write_csv<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let labeled = data.is_labeled();
    let mut header: Vec<&str> = data.feature_names().iter().map(String::as_str).collect();
    if labeled {
        header.push("class");
    }
    wtr.write_record(&header)?;
    let mut row: Vec<String> = Vec::with_capacity(header.len());
    for inst in data.instances() {
        row.clear();
        row.extend(inst.features.iter().map(|v| format!("{v}")));
        if labeled {
            row.push(inst.label.map(|l| l.to_string()).unwrap_or_default());
        }
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn save_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(data, std::io::BufWriter::new(file))
}

/// Per-feature min/max observed on the fitting split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormalizationParams {
    pub fn dim(&self) -> usize {
        self.min.len()
    }

    /// Maps one value of feature `j` into `[0, 1]`; constant features map to 0
    /// and out-of-range values are clamped.
    pub fn scale(&self, j: usize, v: f64) -> f64 {
        let (lo, hi) = (self.min[j], self.max[j]);
        let range = hi - lo;
        if range <= 0.0 {
            return 0.0;
        }
        ((v - lo) / range).clamp(0.0, 1.0)
    }
}

pub fn fit_normalizer(data: &Dataset) -> Result<NormalizationParams> {
    if data.is_empty() {
        return Err(Error::EmptyInput("cannot fit a normalizer on no rows".into()));
    }
    let d = data.dim();
    let mut min = vec![f64::INFINITY; d];
    let mut max = vec![f64::NEG_INFINITY; d];
    for inst in data.instances() {
        for (j, &v) in inst.features.iter().enumerate() {
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
        }
    }
    Ok(NormalizationParams { min, max })
}

pub fn apply_normalizer(params: &NormalizationParams, data: &Dataset) -> Result<Dataset> {
    if params.dim() != data.dim() {
        return Err(Error::Shape {
            expected: params.dim(),
            actual: data.dim(),
        });
    }
    let instances = data
        .instances()
        .iter()
        .map(|inst| {
            Instance::new(
                inst.features
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| params.scale(j, v))
                    .collect(),
                inst.label,
            )
        })
        .collect();
    data.with_instances(instances)
}

/// Seeded permutation of the instance order.
pub fn shuffle(data: &Dataset, seed: u64) -> Dataset {
    let mut instances = data.instances().to_vec();
    let mut rng = seed::rng(seed);
    instances.shuffle(&mut rng);
    Dataset {
        instances,
        dim: data.dim,
        feature_names: data.feature_names.clone(),
    }
}
