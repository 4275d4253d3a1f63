//! Offline and online clustering with a known number of clusters.
//!
//! Both algorithms consume a precomputed symmetric dissimilarity matrix and
//! are deterministic: every argmax/argmin tie is broken toward the smallest
//! index (for pairs, the lexicographically smallest pair). Partitions are
//! invariant under scaling the whole matrix by a positive constant.

use crate::config::WeightRule;
use crate::error::{Error, Result};
use crate::matrix::PairwiseMatrix;
use crate::par;
use crate::types::{Clustering, Dataset};
use crate::{dissim, DissimConfig};

/// Offline clustering output plus a degeneracy warning.
#[derive(Debug, Clone)]
pub struct OfflineResult {
    pub clustering: Clustering,
    /// Set when the maximum pairwise dissimilarity is zero (all paths
    /// indistinguishable); the returned partition is then pure tie-breaking.
    pub degenerate: bool,
}

/// One candidate clustering in the online ensemble, built from the first
/// `size` paths.
#[derive(Debug, Clone)]
pub struct EnsembleMember {
    /// Number of leading paths this member was clustered from.
    pub size: usize,
    /// Smallest path index of each cluster, sorted ascending. These are the
    /// candidate cluster centers the final assignment scores against.
    pub centers: Vec<usize>,
    /// Minimum dissimilarity between distinct candidate centers.
    pub separation: f64,
    pub weight: f64,
}

/// The whole ensemble: one member per prefix size, plus the normalizer
/// eta = sum of weight * separation over members.
#[derive(Debug, Clone)]
pub struct OnlineEnsembleState {
    pub members: Vec<EnsembleMember>,
    pub normalizer: f64,
}

/// Online clustering output.
#[derive(Debug, Clone)]
pub struct OnlineResult {
    pub clustering: Clustering,
    pub ensemble: OnlineEnsembleState,
    /// Set when every ensemble member had zero separation; the assignment
    /// rule is then undefined and the offline result is returned instead.
    pub used_offline_fallback: bool,
}

/// Farthest-point clustering over a full dissimilarity matrix.
///
/// The first two centers are the farthest pair; each further center
/// maximizes its minimum dissimilarity to the centers chosen so far. The
/// remaining paths are then assigned in ascending index order to the
/// cluster holding their nearest current member, clusters growing as the
/// loop proceeds. Centers stay in their own clusters.
pub fn offline_cluster(dist: &PairwiseMatrix, kappa: usize) -> Result<OfflineResult> {
    offline_cluster_prefix(dist, dist.len(), kappa)
}

/// [`offline_cluster`] restricted to the first `n` paths of the matrix.
pub fn offline_cluster_prefix(
    dist: &PairwiseMatrix,
    n: usize,
    kappa: usize,
) -> Result<OfflineResult> {
    if n > dist.len() {
        return Err(Error::SizeMismatch { left: n, right: dist.len() });
    }
    if kappa < 2 || kappa > n {
        return Err(Error::KappaOutOfRange { kappa, n });
    }

    // Farthest pair; strict improvement keeps the lexicographically
    // smallest maximizer.
    let mut best = (0usize, 1usize);
    let mut best_d = f64::NEG_INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist.get(i, j);
            if d > best_d {
                best_d = d;
                best = (i, j);
            }
        }
    }
    let degenerate = best_d == 0.0;
    let mut centers = vec![best.0, best.1];

    // Each next center is the non-center farthest from all current centers.
    for _ in 2..kappa {
        let mut sel = usize::MAX;
        let mut sel_d = f64::NEG_INFINITY;
        for i in 0..n {
            if centers.contains(&i) {
                continue;
            }
            let min_d = centers
                .iter()
                .map(|&c| dist.get(i, c))
                .fold(f64::INFINITY, f64::min);
            if min_d > sel_d {
                sel_d = min_d;
                sel = i;
            }
        }
        centers.push(sel);
    }

    let mut assignment = vec![0u32; n];
    let mut members: Vec<Vec<usize>> = centers.iter().map(|&c| vec![c]).collect();
    for (k, &c) in centers.iter().enumerate() {
        assignment[c] = k as u32 + 1;
    }
    for i in 0..n {
        if assignment[i] != 0 {
            continue; // centers are already in their own clusters
        }
        let mut best_k = 0;
        let mut best_d = f64::INFINITY;
        for (k, cluster) in members.iter().enumerate() {
            let d = cluster
                .iter()
                .map(|&j| dist.get(i, j))
                .fold(f64::INFINITY, f64::min);
            if d < best_d {
                best_d = d;
                best_k = k;
            }
        }
        assignment[i] = best_k as u32 + 1;
        members[best_k].push(i);
    }

    Ok(OfflineResult { clustering: Clustering { assignment, centers }, degenerate })
}

/// Online clustering of a snapshot: computes the pairwise matrix and runs
/// the weighted ensemble of offline clusterings over every prefix.
pub fn online_cluster(ds: &Dataset, kappa: usize, cfg: &DissimConfig) -> Result<OnlineResult> {
    let dist = dissim::pairwise_matrix(ds, cfg)?;
    online_cluster_from_matrix(&dist, kappa, cfg.weights)
}

/// Ensemble clustering over a precomputed matrix.
///
/// For every prefix size j = kappa..n the offline algorithm clusters the
/// first j paths; the member's candidate centers are the smallest index of
/// each cluster, sorted ascending, and its separation is the minimum
/// dissimilarity between distinct candidate centers. Every path is then
/// assigned to the slot minimizing the separation-weighted average
/// dissimilarity to the slot's candidate centers across members.
///
/// Members are independent and may be evaluated in parallel; the normalizer
/// is reduced in ascending prefix order so results are deterministic. The
/// output centers are the final (full prefix) member's candidate centers.
pub fn online_cluster_from_matrix(
    dist: &PairwiseMatrix,
    kappa: usize,
    beta: WeightRule,
) -> Result<OnlineResult> {
    let n = dist.len();
    if kappa < 2 || kappa > n {
        return Err(Error::KappaOutOfRange { kappa, n });
    }

    let members: Vec<EnsembleMember> = par::map_indexed(n - kappa + 1, |idx| {
        let j = kappa + idx;
        let off = offline_cluster_prefix(dist, j, kappa)
            .expect("prefix size and kappa already validated");
        let mut centers = vec![usize::MAX; kappa];
        for (i, &label) in off.clustering.assignment.iter().enumerate() {
            let k = (label - 1) as usize;
            if i < centers[k] {
                centers[k] = i;
            }
        }
        centers.sort_unstable();
        let mut separation = f64::INFINITY;
        for a in 0..kappa {
            for b in (a + 1)..kappa {
                separation = separation.min(dist.get(centers[a], centers[b]));
            }
        }
        EnsembleMember { size: j, centers, separation, weight: beta.weight(j) }
    });

    let normalizer: f64 = members.iter().map(|m| m.weight * m.separation).sum();
    let ensemble = OnlineEnsembleState { members, normalizer };

    if !(normalizer > 0.0) {
        // Every candidate center set is degenerate; the weighted assignment
        // is undefined, so fall back to the offline partition.
        let off = offline_cluster_prefix(dist, n, kappa)?;
        return Ok(OnlineResult {
            clustering: off.clustering,
            ensemble,
            used_offline_fallback: true,
        });
    }

    let mut assignment = vec![0u32; n];
    for (i, slot) in assignment.iter_mut().enumerate() {
        let mut best_k = 0;
        let mut best_score = f64::INFINITY;
        for k in 0..kappa {
            let mut score = 0.0;
            for member in &ensemble.members {
                score += member.weight * member.separation * dist.get(i, member.centers[k]);
            }
            score /= normalizer;
            if score < best_score {
                best_score = score;
                best_k = k;
            }
        }
        *slot = best_k as u32 + 1;
    }

    let centers = ensemble
        .members
        .last()
        .expect("at least one ensemble member")
        .centers
        .clone();
    Ok(OnlineResult {
        clustering: Clustering { assignment, centers },
        ensemble,
        used_offline_fallback: false,
    })
}
