//! Misclassification-rate metric and multi-run experiment orchestration.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::cluster::{offline_cluster, online_cluster_from_matrix};
use crate::config::DissimConfig;
use crate::dissim::pairwise_matrix;
use crate::error::{Error, Result};
use crate::generators::{
    build_offline_dataset, build_online_snapshot, mix_seed, preset_params, Family,
    LENGTH_PER_STEP,
};
use crate::par;
use crate::types::{GroundTruth, Violation};

/// Label matching is exhaustive over cluster permutations; beyond this many
/// clusters the factorial search is refused.
pub const MAX_EXACT_KAPPA: usize = 10;

/// Fraction of paths whose label disagrees with the ground truth, minimized
/// over all permutations of the ground-truth cluster ids. Invariant under
/// relabeling either side.
pub fn misclassification_rate(output: &[u32], gt: &GroundTruth) -> Result<f64> {
    let n = gt.labels.len();
    if output.len() != n || n == 0 {
        return Err(Error::SizeMismatch { left: output.len(), right: n });
    }
    let kappa = gt.kappa as usize;
    if kappa > MAX_EXACT_KAPPA {
        return Err(Error::KappaTooLargeForExact { kappa, max: MAX_EXACT_KAPPA });
    }
    if let Some((index, &label)) = gt
        .labels
        .iter()
        .enumerate()
        .find(|(_, &l)| l == 0 || l > gt.kappa)
    {
        return Err(Error::InvalidDataset(vec![Violation::LabelOutOfRange {
            index,
            label,
            kappa: gt.kappa,
        }]));
    }

    let mut best = n;
    for perm in (1..=kappa as u32).permutations(kappa) {
        let mismatches = output
            .iter()
            .zip(&gt.labels)
            .filter(|&(&out, &g)| perm[(g - 1) as usize] != out)
            .count();
        best = best.min(mismatches);
        if best == 0 {
            break;
        }
    }
    Ok(best as f64 / n as f64)
}

/// Which clustering algorithm a variant runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Offline,
    Online,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Offline => "offline",
            Algorithm::Online => "online",
        }
    }
}

/// One curve of an experiment: an algorithm under a dissimilarity config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variant {
    pub label: String,
    pub algorithm: Algorithm,
    pub dissim: DissimConfig,
}

impl Variant {
    pub fn new(algorithm: Algorithm, dissim: DissimConfig) -> Self {
        let mut label = algorithm.name().to_string();
        if dissim.use_log_star {
            label.push_str("-logstar");
        }
        Self { label, algorithm, dissim }
    }
}

/// How datasets evolve over the time axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetProtocol {
    /// Fixed path count, path length 5t.
    Offline,
    /// Growing path count and staggered lengths.
    Online,
}

impl DatasetProtocol {
    pub fn name(&self) -> &'static str {
        match self {
            DatasetProtocol::Offline => "offline",
            DatasetProtocol::Online => "online",
        }
    }
}

/// Full description of a multi-run experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub family: Family,
    pub params: Vec<f64>,
    pub per_group: usize,
    pub protocol: DatasetProtocol,
    pub t_values: Vec<usize>,
    pub runs: usize,
    pub master_seed: u64,
    pub variants: Vec<Variant>,
}

impl ExperimentConfig {
    pub fn dataset_tag(&self) -> String {
        format!("{}-{}", self.family.name(), self.protocol.name())
    }
}

/// Per-time-step rates of one variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeStepStats {
    pub t: usize,
    pub mean: f64,
    pub rates: Vec<f64>,
}

/// Misclassification rates of one variant across the whole experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub dataset_tag: String,
    pub algorithm: String,
    pub dissim: DissimConfig,
    pub runs: usize,
    pub master_seed: u64,
    /// Variants within a run are evaluated on the same generated dataset,
    /// which keeps paired comparisons low-variance.
    pub shared_datasets_across_variants: bool,
    pub rows: Vec<TimeStepStats>,
}

impl ScenarioReport {
    pub fn mean_at(&self, t: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.t == t).map(|r| r.mean)
    }

    /// Average of the per-time-step means over an inclusive t range.
    pub fn mean_over(&self, t_from: usize, t_to: usize) -> f64 {
        let picked: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.t >= t_from && r.t <= t_to)
            .map(|r| r.mean)
            .collect();
        picked.iter().sum::<f64>() / picked.len() as f64
    }
}

/// Runs every variant of `cfg` and returns one report per variant.
///
/// Each (t, run) cell generates its dataset from a seed derived only from
/// the master seed and the run index, so online snapshots grow their paths
/// across t and reruns are bit-reproducible. Cells are independent and run
/// in parallel; per-cell results are reduced in (t, run) order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ScenarioReport>> {
    if cfg.runs == 0 {
        return Err(Error::InvalidParameter {
            name: "runs",
            value: 0.0,
            constraint: "must be positive",
        });
    }
    if cfg.variants.is_empty() {
        return Err(Error::InvalidParameter {
            name: "variants",
            value: 0.0,
            constraint: "need at least one variant",
        });
    }
    let kappa = cfg.params.len();
    let cells = cfg.t_values.len() * cfg.runs;
    let results: Vec<Result<Vec<f64>>> = par::map_indexed(cells, |cell| {
        let t = cfg.t_values[cell / cfg.runs];
        let run = cell % cfg.runs;
        let run_seed = mix_seed(cfg.master_seed, run as u64, u64::from(cfg.protocol.name() == "online"));
        let (ds, gt) = match cfg.protocol {
            DatasetProtocol::Offline => build_offline_dataset(
                cfg.family,
                &cfg.params,
                cfg.per_group,
                LENGTH_PER_STEP * t,
                run_seed,
            )?,
            DatasetProtocol::Online => {
                build_online_snapshot(cfg.family, &cfg.params, t, run_seed)?
            }
        };
        let mut rates = Vec::with_capacity(cfg.variants.len());
        let mut cached: Option<(DissimConfig, crate::matrix::PairwiseMatrix)> = None;
        for variant in &cfg.variants {
            let fresh = match &cached {
                Some((c, _)) if *c == variant.dissim => false,
                _ => true,
            };
            if fresh {
                cached = Some((variant.dissim, pairwise_matrix(&ds, &variant.dissim)?));
            }
            let matrix = &cached.as_ref().unwrap().1;
            let assignment = match variant.algorithm {
                Algorithm::Offline => offline_cluster(matrix, kappa)?.clustering.assignment,
                Algorithm::Online => {
                    online_cluster_from_matrix(matrix, kappa, variant.dissim.weights)?
                        .clustering
                        .assignment
                }
            };
            rates.push(misclassification_rate(&assignment, &gt)?);
        }
        Ok(rates)
    });

    let mut cells_ok = Vec::with_capacity(cells);
    for r in results {
        cells_ok.push(r?);
    }

    let mut reports = Vec::with_capacity(cfg.variants.len());
    for (v, variant) in cfg.variants.iter().enumerate() {
        let mut rows = Vec::with_capacity(cfg.t_values.len());
        for (ti, &t) in cfg.t_values.iter().enumerate() {
            let rates: Vec<f64> = (0..cfg.runs)
                .map(|run| cells_ok[ti * cfg.runs + run][v])
                .collect();
            let mean = rates.iter().sum::<f64>() / rates.len() as f64;
            rows.push(TimeStepStats { t, mean, rates });
        }
        reports.push(ScenarioReport {
            dataset_tag: cfg.dataset_tag(),
            algorithm: variant.label.clone(),
            dissim: variant.dissim,
            runs: cfg.runs,
            master_seed: cfg.master_seed,
            shared_datasets_across_variants: true,
            rows,
        });
    }
    Ok(reports)
}

/// Named experiment presets reproducing the simulation studies: rotation
/// offline/online, self-similar increments with and without the log
/// transform, and AR(1), all with 5 groups of 10 paths and t = 1..50.
pub fn preset(name: &str) -> Option<Vec<ExperimentConfig>> {
    let plain = DissimConfig::covariance_only();
    let logstar = DissimConfig::covariance_only().with_log_star(true);
    let t_all: Vec<usize> = (1..=50).collect();
    let base = |family: Family, protocol: DatasetProtocol, variants: Vec<Variant>| ExperimentConfig {
        family,
        params: preset_params(family),
        per_group: 10,
        protocol,
        t_values: t_all.clone(),
        runs: 100,
        master_seed: 0,
        variants,
    };
    let both_algorithms = |cfg: DissimConfig| {
        vec![
            Variant::new(Algorithm::Offline, cfg),
            Variant::new(Algorithm::Online, cfg),
        ]
    };
    match name {
        "fig1" => Some(vec![base(
            Family::Rotation,
            DatasetProtocol::Offline,
            both_algorithms(plain),
        )]),
        "fig2" => Some(vec![base(
            Family::Rotation,
            DatasetProtocol::Online,
            both_algorithms(plain),
        )]),
        "fig3" => Some(vec![
            base(
                Family::Fgn,
                DatasetProtocol::Offline,
                vec![
                    Variant::new(Algorithm::Offline, plain),
                    Variant::new(Algorithm::Offline, logstar),
                ],
            ),
            base(
                Family::Fgn,
                DatasetProtocol::Online,
                vec![
                    Variant::new(Algorithm::Online, plain),
                    Variant::new(Algorithm::Online, logstar),
                ],
            ),
        ]),
        "fig4" => Some(vec![
            base(Family::Ar1, DatasetProtocol::Offline, both_algorithms(plain)),
            base(Family::Ar1, DatasetProtocol::Online, both_algorithms(plain)),
        ]),
        "smoke" => {
            let mut cfg = base(
                Family::Rotation,
                DatasetProtocol::Offline,
                both_algorithms(plain),
            );
            cfg.t_values = vec![1, 2];
            cfg.runs = 1;
            Some(vec![cfg])
        }
        _ => None,
    }
}

pub fn preset_names() -> &'static [&'static str] {
    &["fig1", "fig2", "fig3", "fig4", "smoke"]
}
