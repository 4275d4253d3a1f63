//! Shared test helpers: literal reference implementations of the
//! dissimilarity sums (no rolling accumulation, no factored sums, full
//! matrices throughout) and small statistics utilities.
//!
//! The literal forms deliberately recompute every moment from scratch per
//! (window size, offset) pair so they stay independent of the optimized
//! code paths they are used to check.

#![allow(dead_code)]

use covclust::generators::{self, Family};
use covclust::{AnalyticCovModel, DissimConfig, SamplePath};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// w_j = 1/(j(j+1)), written out directly.
pub fn literal_weight(j: usize) -> f64 {
    1.0 / (j as f64 * (j as f64 + 1.0))
}

/// max(1, floor(log10 n)).
pub fn literal_window_count(n: usize) -> usize {
    ((n as f64).log10().floor() as usize).max(1)
}

fn literal_log_star(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().ln()
    }
}

/// Mean of the windows (x_i..x_{i+m-1}), i = l..n-m+1 (1-based), over the
/// first `n` values.
pub fn literal_mean(values: &[f64], n: usize, l: usize, m: usize) -> Vec<f64> {
    let count = n + 2 - m - l;
    let mut mean = vec![0.0; m];
    for i in l..=(n - m + 1) {
        for k in 0..m {
            mean[k] += values[i - 1 + k];
        }
    }
    for v in &mut mean {
        *v /= count as f64;
    }
    mean
}

/// Covariance of the same window family: average outer product minus the
/// outer product of the mean. Full matrix, no symmetry tricks.
pub fn literal_cov(values: &[f64], n: usize, l: usize, m: usize) -> Vec<Vec<f64>> {
    let count = n + 2 - m - l;
    let mean = literal_mean(values, n, l, m);
    let mut cov = vec![vec![0.0; m]; m];
    for i in l..=(n - m + 1) {
        for r in 0..m {
            for c in 0..m {
                cov[r][c] += values[i - 1 + r] * values[i - 1 + c];
            }
        }
    }
    for r in 0..m {
        for c in 0..m {
            cov[r][c] = cov[r][c] / count as f64 - mean[r] * mean[c];
        }
    }
    cov
}

fn literal_moment_metric(
    mu1: &[f64],
    cov1: &[Vec<f64>],
    mu2: &[f64],
    cov2: &[Vec<f64>],
    use_log_star: bool,
    include_mean: bool,
) -> f64 {
    let m = mu1.len();
    let mut dist = 0.0;
    if include_mean && !use_log_star {
        let mut acc = 0.0;
        for k in 0..m {
            let d = mu1[k] - mu2[k];
            acc += d * d;
        }
        dist += acc.sqrt();
    }
    let mut acc = 0.0;
    for r in 0..m {
        for c in 0..m {
            let (a, b) = if use_log_star {
                (literal_log_star(cov1[r][c]), literal_log_star(cov2[r][c]))
            } else {
                (cov1[r][c], cov2[r][c])
            };
            let d = a - b;
            acc += d * d;
        }
    }
    dist + acc.sqrt()
}

/// Literal empirical dissimilarity: the double sum over m = 1..m_n and
/// l = 1..n-m+1 with every moment recomputed by direct summation.
pub fn literal_path_dissimilarity(x1: &[f64], x2: &[f64], cfg: &DissimConfig) -> f64 {
    let n = x1.len().min(x2.len());
    let m_n = match cfg.window_rule {
        covclust::WindowRule::LogLength => literal_window_count(n),
        covclust::WindowRule::NaturalLogLength => ((n as f64).ln().floor() as usize).max(1),
        covclust::WindowRule::Fixed(m) => m.clamp(1, n - 1),
    };
    let weight = |j: usize| match cfg.weights {
        covclust::WeightRule::Telescoping => literal_weight(j),
        covclust::WeightRule::TelescopingCubed => literal_weight(j).powi(3),
    };
    let mut total = 0.0;
    for m in 1..=m_n {
        for l in 1..=(n - m + 1) {
            let mm = literal_moment_metric(
                &literal_mean(x1, n, l, m),
                &literal_cov(x1, n, l, m),
                &literal_mean(x2, n, l, m),
                &literal_cov(x2, n, l, m),
                cfg.use_log_star,
                cfg.include_mean_term,
            );
            total += weight(m) * weight(l) * mm;
        }
    }
    total
}

/// Literal truncated model dissimilarity: the full double sum over
/// m, l = 1..truncation with dense Toeplitz matrices.
pub fn literal_model_dissimilarity(
    m1: &AnalyticCovModel,
    m2: &AnalyticCovModel,
    truncation: usize,
    cfg: &DissimConfig,
) -> f64 {
    let weight = |j: usize| match cfg.weights {
        covclust::WeightRule::Telescoping => literal_weight(j),
        covclust::WeightRule::TelescopingCubed => literal_weight(j).powi(3),
    };
    let toeplitz = |model: &AnalyticCovModel, m: usize| -> Vec<Vec<f64>> {
        (0..m)
            .map(|i| (0..m).map(|j| model.acov(i.abs_diff(j))).collect())
            .collect()
    };
    let mut total = 0.0;
    for m in 1..=truncation {
        let mu1 = vec![m1.mean(); m];
        let mu2 = vec![m2.mean(); m];
        let c1 = toeplitz(m1, m);
        let c2 = toeplitz(m2, m);
        let mm = literal_moment_metric(
            &mu1,
            &c1,
            &mu2,
            &c2,
            cfg.use_log_star,
            cfg.include_mean_term,
        );
        for l in 1..=truncation {
            total += weight(m) * weight(l) * mm;
        }
    }
    total
}

/// Random path from a random generator family, for property tests.
pub fn random_generated_path(rng: &mut ChaCha8Rng, id: &str, len: usize) -> SamplePath {
    let family = match rng.random_range(0..3u32) {
        0 => Family::Rotation,
        1 => Family::Fgn,
        _ => Family::Ar1,
    };
    let params = generators::preset_params(family);
    let param = params[rng.random_range(0..params.len())];
    let seed: u64 = rng.random();
    let spec = generators::GeneratorSpec { family, parameter: param, length: len, seed };
    generators::generate_path(&spec, id).expect("generation")
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Spearman rank correlation; ties get average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = ranks(xs);
    let ry = ranks(ys);
    pearson(&rx, &ry)
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
