//! Shared domain types: sample paths, datasets, ground truth and clusterings.
//!
//! These are plain data carriers. Invariant checking is centralized in
//! [`validate_dataset`], which reports violations instead of failing, so
//! malformed input (e.g. from a CSV file) can be diagnosed in full.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Minimum usable path length: the window rule and the offset sums need
/// at least three observations.
pub const MIN_PATH_LEN: usize = 3;

/// One real-valued finite sequence; the unit of clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    /// Opaque label, unique within a dataset.
    pub id: String,
    pub values: Vec<f64>,
}

impl SamplePath {
    pub fn new(id: impl Into<String>, values: Vec<f64>) -> Self {
        Self { id: id.into(), values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// How a dataset was assembled; online snapshots carry growing paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetKind {
    Offline,
    OnlineSnapshot,
}

/// A collection of sample paths observed together.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub paths: Vec<SamplePath>,
    pub kind: DatasetKind,
}

impl Dataset {
    pub fn offline(paths: Vec<SamplePath>) -> Self {
        Self { paths, kind: DatasetKind::Offline }
    }

    pub fn online_snapshot(paths: Vec<SamplePath>) -> Self {
        Self { paths, kind: DatasetKind::OnlineSnapshot }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.paths.iter().map(|p| p.id.clone()).collect()
    }
}

/// Known partition of a dataset into kappa groups with identical mean and
/// covariance structure. Labels are 1-based cluster indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub labels: Vec<u32>,
    pub kappa: u32,
}

impl GroundTruth {
    pub fn new(labels: Vec<u32>, kappa: u32) -> Self {
        Self { labels, kappa }
    }
}

/// Output of a clustering run: a 1-based cluster index per path plus the
/// center path indices in order of discovery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    pub assignment: Vec<u32>,
    pub centers: Vec<usize>,
}

impl Clustering {
    /// Number of clusters.
    pub fn kappa(&self) -> usize {
        self.centers.len()
    }

    /// Cluster memberships as sorted index sets, for order-insensitive
    /// comparisons.
    pub fn as_sets(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![Vec::new(); self.kappa()];
        for (i, &label) in self.assignment.iter().enumerate() {
            sets[(label - 1) as usize].push(i);
        }
        let mut sets: Vec<Vec<usize>> = sets.into_iter().collect();
        sets.sort();
        sets
    }
}

/// A single invariant violation found by [`validate_dataset`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    PathTooShort { id: String, len: usize },
    NonFiniteValue { id: String, index: usize },
    TooFewPaths { count: usize },
    DuplicateId { id: String },
    LabelCountMismatch { labels: usize, paths: usize },
    LabelOutOfRange { index: usize, label: u32, kappa: u32 },
    EmptyCluster { label: u32 },
    KappaTooSmall { kappa: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PathTooShort { id, len } => {
                write!(f, "path '{id}' too short ({len} < {MIN_PATH_LEN})")
            }
            Violation::NonFiniteValue { id, index } => {
                write!(f, "path '{id}' has a non-finite value at position {index}")
            }
            Violation::TooFewPaths { count } => {
                write!(f, "dataset has {count} paths, need at least 2")
            }
            Violation::DuplicateId { id } => write!(f, "duplicate path id '{id}'"),
            Violation::LabelCountMismatch { labels, paths } => {
                write!(f, "label count {labels} does not match path count {paths}")
            }
            Violation::LabelOutOfRange { index, label, kappa } => {
                write!(f, "label {label} out of range 1..={kappa} at path {index}")
            }
            Violation::EmptyCluster { label } => {
                write!(f, "cluster {label} has no members")
            }
            Violation::KappaTooSmall { kappa } => {
                write!(f, "kappa={kappa}, need at least 2")
            }
        }
    }
}

/// Checks every dataset (and optionally ground-truth) invariant, returning
/// all violations found. An empty report means the data is valid.
pub fn validate_dataset(ds: &Dataset, gt: Option<&GroundTruth>) -> Vec<Violation> {
    let mut report = Vec::new();

    if ds.paths.len() < 2 {
        report.push(Violation::TooFewPaths { count: ds.paths.len() });
    }
    let mut seen = HashSet::new();
    for path in &ds.paths {
        if path.len() < MIN_PATH_LEN {
            report.push(Violation::PathTooShort { id: path.id.clone(), len: path.len() });
        }
        if let Some(index) = path.values.iter().position(|v| !v.is_finite()) {
            report.push(Violation::NonFiniteValue { id: path.id.clone(), index });
        }
        if !seen.insert(path.id.as_str()) {
            report.push(Violation::DuplicateId { id: path.id.clone() });
        }
    }

    if let Some(gt) = gt {
        if gt.kappa < 2 {
            report.push(Violation::KappaTooSmall { kappa: gt.kappa });
        }
        if gt.labels.len() != ds.paths.len() {
            report.push(Violation::LabelCountMismatch {
                labels: gt.labels.len(),
                paths: ds.paths.len(),
            });
        }
        let mut counts = vec![0usize; gt.kappa as usize];
        for (index, &label) in gt.labels.iter().enumerate() {
            if label == 0 || label > gt.kappa {
                report.push(Violation::LabelOutOfRange { index, label, kappa: gt.kappa });
            } else {
                counts[(label - 1) as usize] += 1;
            }
        }
        for (k, &count) in counts.iter().enumerate() {
            if count == 0 {
                report.push(Violation::EmptyCluster { label: k as u32 + 1 });
            }
        }
    }

    report
}
