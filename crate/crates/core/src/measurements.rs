//! Repeated benchmark measurements: parsing, validation and per-setup
//! mean / standard-deviation estimation.
//!
//! A dataset file is self-describing. In CSV form the header is
//! `setup,repeat,<dir>:<metric>,...` where `<dir>` is `input` (a cost to
//! minimize) or `output` (a benefit to maximize). The JSON mirror carries
//! the same information as `{"metrics": [...], "records": [...]}`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pareto::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Lower is better (latency, cost).
    Input,
    /// Higher is better (accuracy, throughput).
    Output,
}

impl Direction {
    pub fn prefix(self) -> &'static str {
        match self {
            Direction::Input => "input",
            Direction::Output => "output",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.prefix())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub name: String,
    pub direction: Direction,
}

impl MetricSpec {
    pub fn new(name: impl Into<String>, direction: Direction) -> Self {
        Self {
            name: name.into(),
            direction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub setup: String,
    pub repeat: u32,
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasurementError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("row {row}, column `{column}`: `{value}` is not a finite number")]
    NonNumericValue {
        row: usize,
        column: String,
        value: String,
    },
    #[error("setup `{setup}` repeat {repeat}: input `{metric}` must be positive, got {value}")]
    NonPositiveInput {
        setup: String,
        repeat: u32,
        metric: String,
        value: f64,
    },
    #[error("uneven repeats: setup `{setup}` has {found} repeats, expected {expected}")]
    UnevenRepeats {
        setup: String,
        expected: usize,
        found: usize,
    },
    #[error("at least 2 setups are required, found {0}")]
    TooFewSetups(usize),
    #[error("setup `{setup}` has repeat {repeat} more than once")]
    DuplicateRepeat { setup: String, repeat: u32 },
    #[error("setup `{setup}` repeat {repeat}: {reason}")]
    MalformedRecord {
        setup: String,
        repeat: u32,
        reason: String,
    },
    #[error("row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("invalid JSON dataset: {0}")]
    Json(String),
}

/// Validated collection of measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDataset", into = "RawDataset")]
pub struct Dataset {
    metrics: Vec<MetricSpec>,
    records: Vec<MeasurementRecord>,
    setups: Vec<String>,
    repeats: usize,
}

#[derive(Serialize, Deserialize)]
struct RawDataset {
    metrics: Vec<MetricSpec>,
    records: Vec<MeasurementRecord>,
}

impl TryFrom<RawDataset> for Dataset {
    type Error = MeasurementError;

    fn try_from(raw: RawDataset) -> Result<Self, Self::Error> {
        Dataset::new(raw.metrics, raw.records)
    }
}

impl From<Dataset> for RawDataset {
    fn from(d: Dataset) -> Self {
        RawDataset {
            metrics: d.metrics,
            records: d.records,
        }
    }
}

impl Dataset {
    pub fn new(
        metrics: Vec<MetricSpec>,
        records: Vec<MeasurementRecord>,
    ) -> Result<Self, MeasurementError> {
        let mut seen = HashSet::new();
        for m in &metrics {
            if m.name.is_empty() {
                return Err(MeasurementError::MalformedHeader(
                    "empty metric name".into(),
                ));
            }
            if !seen.insert(m.name.as_str()) {
                return Err(MeasurementError::MalformedHeader(format!(
                    "duplicate metric `{}`",
                    m.name
                )));
            }
        }
        for dir in [Direction::Input, Direction::Output] {
            if !metrics.iter().any(|m| m.direction == dir) {
                return Err(MeasurementError::MalformedHeader(format!(
                    "at least one {dir} metric is required"
                )));
            }
        }

        let mut setups: Vec<String> = Vec::new();
        let mut repeats_of: HashMap<&str, HashSet<u32>> = HashMap::new();
        for rec in &records {
            if rec.repeat == 0 {
                return Err(MeasurementError::MalformedRecord {
                    setup: rec.setup.clone(),
                    repeat: rec.repeat,
                    reason: "repeat index must be >= 1".into(),
                });
            }
            if rec.values.len() != metrics.len()
                || metrics.iter().any(|m| !rec.values.contains_key(&m.name))
            {
                return Err(MeasurementError::MalformedRecord {
                    setup: rec.setup.clone(),
                    repeat: rec.repeat,
                    reason: "values must hold exactly one entry per declared metric".into(),
                });
            }
            for m in &metrics {
                let value = rec.values[&m.name];
                if !value.is_finite() {
                    return Err(MeasurementError::MalformedRecord {
                        setup: rec.setup.clone(),
                        repeat: rec.repeat,
                        reason: format!("`{}` is not finite", m.name),
                    });
                }
                if m.direction == Direction::Input && value <= 0.0 {
                    return Err(MeasurementError::NonPositiveInput {
                        setup: rec.setup.clone(),
                        repeat: rec.repeat,
                        metric: m.name.clone(),
                        value,
                    });
                }
            }
            let reps = repeats_of.entry(rec.setup.as_str()).or_insert_with(|| {
                setups.push(rec.setup.clone());
                HashSet::new()
            });
            if !reps.insert(rec.repeat) {
                return Err(MeasurementError::DuplicateRepeat {
                    setup: rec.setup.clone(),
                    repeat: rec.repeat,
                });
            }
        }

        if setups.len() < 2 {
            return Err(MeasurementError::TooFewSetups(setups.len()));
        }
        let expected = repeats_of[setups[0].as_str()].len();
        for s in &setups {
            let found = repeats_of[s.as_str()].len();
            if found != expected {
                return Err(MeasurementError::UnevenRepeats {
                    setup: s.clone(),
                    expected,
                    found,
                });
            }
        }

        Ok(Self {
            metrics,
            records,
            setups,
            repeats: expected,
        })
    }

    pub fn metrics(&self) -> &[MetricSpec] {
        &self.metrics
    }

    pub fn records(&self) -> &[MeasurementRecord] {
        &self.records
    }

    /// Setup names in order of first appearance.
    pub fn setups(&self) -> &[String] {
        &self.setups
    }

    /// Repeat count `k` shared by every setup.
    pub fn repeats(&self) -> usize {
        self.repeats
    }

    pub fn num_inputs(&self) -> usize {
        self.metrics
            .iter()
            .filter(|m| m.direction == Direction::Input)
            .count()
    }

    pub fn num_outputs(&self) -> usize {
        self.metrics.len() - self.num_inputs()
    }

    /// CSV rendering in the same format `parse_dataset` reads.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["setup".to_string(), "repeat".to_string()];
        header.extend(
            self.metrics
                .iter()
                .map(|m| format!("{}:{}", m.direction, m.name)),
        );
        w.write_record(&header).expect("in-memory write");
        for rec in &self.records {
            let mut row = vec![rec.setup.clone(), rec.repeat.to_string()];
            row.extend(
                self.metrics
                    .iter()
                    .map(|m| format!("{:?}", rec.values[&m.name])),
            );
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dataset serializes")
    }
}

/// Parses the CSV dataset format.
pub fn parse_dataset(text: &str) -> Result<Dataset, MeasurementError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| MeasurementError::MalformedHeader(e.to_string()))?
        .clone();
    if header.len() < 2 || &header[0] != "setup" || &header[1] != "repeat" {
        return Err(MeasurementError::MalformedHeader(
            "header must start with `setup,repeat`".into(),
        ));
    }
    let mut metrics = Vec::with_capacity(header.len() - 2);
    for col in header.iter().skip(2) {
        let (dir, name) = col.split_once(':').ok_or_else(|| {
            MeasurementError::MalformedHeader(format!(
                "column `{col}` lacks an input:/output: prefix"
            ))
        })?;
        let direction = match dir {
            "input" => Direction::Input,
            "output" => Direction::Output,
            _ => {
                return Err(MeasurementError::MalformedHeader(format!(
                    "column `{col}` has unknown prefix `{dir}`"
                )))
            }
        };
        metrics.push(MetricSpec::new(name, direction));
    }

    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        // header is line 1
        let line = idx + 2;
        let row = row.map_err(|e| MeasurementError::MalformedRow {
            row: line,
            reason: e.to_string(),
        })?;
        if row.len() != header.len() {
            return Err(MeasurementError::MalformedRow {
                row: line,
                reason: format!("expected {} fields, found {}", header.len(), row.len()),
            });
        }
        let setup = row[0].to_string();
        if setup.is_empty() {
            return Err(MeasurementError::MalformedRow {
                row: line,
                reason: "empty setup name".into(),
            });
        }
        let repeat: u32 = row[1]
            .parse()
            .map_err(|_| MeasurementError::NonNumericValue {
                row: line,
                column: "repeat".into(),
                value: row[1].to_string(),
            })?;
        let mut values = BTreeMap::new();
        for (m, (col, raw)) in metrics.iter().zip(header.iter().zip(row.iter()).skip(2)) {
            let value = raw
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| MeasurementError::NonNumericValue {
                    row: line,
                    column: col.to_string(),
                    value: raw.to_string(),
                })?;
            values.insert(m.name.clone(), value);
        }
        records.push(MeasurementRecord {
            setup,
            repeat,
            values,
        });
    }
    Dataset::new(metrics, records)
}

/// Parses the JSON mirror of the dataset format.
pub fn parse_dataset_json(text: &str) -> Result<Dataset, MeasurementError> {
    let raw: RawDataset =
        serde_json::from_str(text).map_err(|e| MeasurementError::Json(e.to_string()))?;
    Dataset::try_from(raw)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub name: String,
    pub direction: Direction,
    pub mean: f64,
    pub stddev: f64,
}

/// Estimated per-metric Gaussian parameters for one setup, in dataset metric order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetupSummary {
    pub setup: String,
    pub metrics: Vec<MetricSummary>,
}

impl SetupSummary {
    pub fn metric(&self, name: &str) -> Option<&MetricSummary> {
        self.metrics.iter().find(|m| m.name == name)
    }

    pub fn mean(&self, name: &str) -> Option<f64> {
        self.metric(name).map(|m| m.mean)
    }

    pub fn stddev(&self, name: &str) -> Option<f64> {
        self.metric(name).map(|m| m.stddev)
    }

    /// The point formed by the metric means.
    pub fn mean_point(&self) -> Point {
        let pick = |dir| {
            self.metrics
                .iter()
                .filter(|m| m.direction == dir)
                .map(|m| m.mean)
                .collect()
        };
        Point {
            setup: self.setup.clone(),
            inputs: pick(Direction::Input),
            outputs: pick(Direction::Output),
        }
    }

    /// Summary with zero spread, i.e. a deterministic setup.
    pub fn deterministic(setup: impl Into<String>, inputs: &[f64], outputs: &[f64]) -> Self {
        let metrics = inputs
            .iter()
            .enumerate()
            .map(|(l, &mean)| MetricSummary {
                name: format!("x{}", l + 1),
                direction: Direction::Input,
                mean,
                stddev: 0.0,
            })
            .chain(outputs.iter().enumerate().map(|(j, &mean)| MetricSummary {
                name: format!("y{}", j + 1),
                direction: Direction::Output,
                mean,
                stddev: 0.0,
            }))
            .collect();
        Self {
            setup: setup.into(),
            metrics,
        }
    }
}

/// Arithmetic mean and Bessel-corrected standard deviation (0 for one sample).
pub fn mean_stddev(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    assert!(k > 0, "mean of an empty sample");
    let mean = values.iter().sum::<f64>() / k as f64;
    if k == 1 || values.iter().all(|&v| v == values[0]) {
        return (values[0], 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let mean = mean.clamp(
        values.iter().copied().fold(f64::INFINITY, f64::min),
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    (mean, (ss / (k - 1) as f64).sqrt())
}

/// Per-setup mean and standard deviation of every metric, in setup order.
pub fn summarize(dataset: &Dataset) -> Vec<SetupSummary> {
    let mut grouped: HashMap<&str, Vec<&MeasurementRecord>> = HashMap::new();
    for rec in &dataset.records {
        grouped.entry(rec.setup.as_str()).or_default().push(rec);
    }
    dataset
        .setups
        .iter()
        .map(|setup| {
            let mut recs = grouped.remove(setup.as_str()).unwrap_or_default();
            // fixed summation order regardless of record order
            recs.sort_by_key(|r| r.repeat);
            let metrics = dataset
                .metrics
                .iter()
                .map(|m| {
                    let values: Vec<f64> = recs.iter().map(|r| r.values[&m.name]).collect();
                    let (mean, stddev) = mean_stddev(&values);
                    MetricSummary {
                        name: m.name.clone(),
                        direction: m.direction,
                        mean,
                        stddev,
                    }
                })
                .collect();
            SetupSummary {
                setup: setup.clone(),
                metrics,
            }
        })
        .collect()
}
