//! Seeded synthetic generators for three wide-sense stationary ergodic
//! process families, plus the offline/online dataset protocols built on
//! them.
//!
//! Streams are pure functions of (family, parameter, stream seed): the same
//! spec always reproduces the same values bit for bit, and materializing a
//! longer prefix never rewrites earlier observations. Per-path stream seeds
//! are derived from the dataset seed with a splitmix64 chain over the group
//! and path indices.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dissim::AnalyticCovModel;
use crate::error::{Error, Result};
use crate::par;
use crate::types::{Dataset, GroundTruth, SamplePath, MIN_PATH_LEN};

/// Discarded leading steps of the autoregressive recurrence; with |a| < 1
/// the influence of the zero start is far below double precision afterwards.
pub const AR1_BURN_IN: usize = 200;

/// Online snapshots start with this many paths per group.
pub const ONLINE_BASE_PATHS_PER_GROUP: usize = 6;
/// Each group gains one path every this many time steps.
pub const ONLINE_GROWTH_INTERVAL: usize = 10;
/// Path length grows by this many observations per time step.
pub const LENGTH_PER_STEP: usize = 5;
/// Fixed sampling grid for self-similar increments in online snapshots, so
/// growing a path extends it instead of rescaling it.
pub const ONLINE_FGN_GRID: f64 = 1.0 / 150.0;

/// Process family of a generated path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Binary irrational-rotation process.
    Rotation,
    /// Increments of a self-similar Gaussian process (parameter = Hurst index).
    Fgn,
    /// AR(1) driven by the cosine white noise (parameter = lag-1 coefficient).
    Ar1,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Rotation => "rotation",
            Family::Fgn => "fgn",
            Family::Ar1 => "ar1",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "rotation" => Some(Family::Rotation),
            "fgn" => Some(Family::Fgn),
            "ar1" => Some(Family::Ar1),
            _ => None,
        }
    }
}

/// Everything needed to reproduce one path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub parameter: f64,
    pub length: usize,
    pub seed: u64,
}

/// The five per-family parameter values used by the simulation presets.
/// Rotation bases get a tiny irrational perturbation; at these path lengths
/// the base values' rationality is unresolvable, the offset just documents
/// the intent.
pub fn preset_params(family: Family) -> Vec<f64> {
    match family {
        Family::Rotation => {
            let offset = (2f64.sqrt() - 1.0) * 1e-6;
            [0.31, 0.33, 0.35, 0.37, 0.39].iter().map(|b| b + offset).collect()
        }
        Family::Fgn => vec![0.3, 0.4, 0.5, 0.6, 0.7],
        Family::Ar1 => vec![-0.4, -0.15, 0.1, 0.35, 0.6],
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a base seed and two indices.
pub fn mix_seed(seed: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(a)).wrapping_add(splitmix64(b)))
}

fn check_length(n: usize) -> Result<()> {
    if n < MIN_PATH_LEN {
        return Err(Error::InvalidParameter {
            name: "length",
            value: n as f64,
            constraint: "must be at least 3",
        });
    }
    Ok(())
}

/// Binary rotation process: r_0 uniform on [0, 1), r_i the fractional part
/// of r_{i-1} + alpha, emitting 1 when r_i > 0.5 and 0 otherwise.
pub fn gen_rotation(alpha: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    check_length(n)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            constraint: "must lie in (0, 1)",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r0: f64 = rng.random();
    Ok(rotation_from_start(alpha, n, r0))
}

/// The rotation recurrence from a fixed starting point.
pub fn rotation_from_start(alpha: f64, n: usize, r0: f64) -> Vec<f64> {
    let mut values = Vec::with_capacity(n);
    let mut r = r0;
    for _ in 0..n {
        r += alpha;
        r -= r.floor();
        values.push(if r > 0.5 { 1.0 } else { 0.0 });
    }
    values
}

/// Increments of a self-similar Gaussian process on the grid `1/n` over
/// [0, 1]: a zero-mean Gaussian vector with Toeplitz covariance, generated
/// by applying the exact lower-triangular square root of the covariance to
/// seeded standard normals.
pub fn gen_fgn(hurst: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    check_length(n)?;
    gen_fgn_on_grid(hurst, n, 1.0 / n as f64, seed)
}

/// Same as [`gen_fgn`] but on an explicit grid step, so paths of different
/// lengths can share one covariance structure (prefix-stable streams).
pub fn gen_fgn_on_grid(hurst: f64, n: usize, grid: f64, seed: u64) -> Result<Vec<f64>> {
    check_length(n)?;
    let factor = fgn_factor(hurst, grid, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normals: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let lower = &factor.lower;
    let mut values = vec![0.0; n];
    for (i, value) in values.iter_mut().enumerate() {
        let row = i * (i + 1) / 2;
        let mut acc = 0.0;
        for (k, g) in normals[..=i].iter().enumerate() {
            acc += lower[row + k] * g;
        }
        *value = acc;
    }
    Ok(values)
}

fn check_ar1_coeff(a: f64) -> Result<()> {
    if !(a.abs() < 1.0 && a != 0.0) {
        return Err(Error::InvalidParameter {
            name: "a",
            value: a,
            constraint: "must satisfy 0 < |a| < 1",
        });
    }
    Ok(())
}

/// AR(1) with the non-independent cosine white noise: a single uniform
/// phase U on (0, 2*pi) drives Z(t) = sqrt(2) cos(tU), and the recurrence
/// Y(t) = a Y(t-1) + Z(t) runs from Y(0) = 0 with the burn-in discarded.
///
/// The white-noise moments (zero mean, unit variance, zero correlation)
/// hold across realizations, but a fixed phase makes every path a filtered
/// sinusoid: its time-averaged covariances converge to phase-dependent
/// limits rather than to a^tau/(1-a^2). Datasets for clustering therefore
/// use [`gen_ar1_cosine_iid`]; this construction is kept for studying the
/// single-phase process itself.
pub fn gen_ar1_cosine(a: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    check_length(n)?;
    check_ar1_coeff(a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    Ok(ar1_from_phase(a, n, phase))
}

/// AR(1) with the cosine white noise re-phased at every step:
/// Z(t) = sqrt(2) cos(t U_t) with U_t drawn independently per step. The
/// noise keeps the same marginal moments as the single-phase construction
/// but is now independent across time, so per-path autocovariances converge
/// to a^tau/(1-a^2) and clustering by the coefficient is consistent.
pub fn gen_ar1_cosine_iid(a: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    check_length(n)?;
    check_ar1_coeff(a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(n);
    let mut y = 0.0;
    for t in 1..=(AR1_BURN_IN + n) {
        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let z = std::f64::consts::SQRT_2 * (t as f64 * phase).cos();
        y = a * y + z;
        if t > AR1_BURN_IN {
            values.push(y);
        }
    }
    Ok(values)
}

/// The AR(1) recurrence from a fixed phase.
pub fn ar1_from_phase(a: f64, n: usize, phase: f64) -> Vec<f64> {
    let mut values = Vec::with_capacity(n);
    let mut y = 0.0;
    for t in 1..=(AR1_BURN_IN + n) {
        let z = std::f64::consts::SQRT_2 * (t as f64 * phase).cos();
        y = a * y + z;
        if t > AR1_BURN_IN {
            values.push(y);
        }
    }
    values
}

/// Generates the path described by `spec` under the given id. The Ar1
/// family uses the re-phased noise, matching the dataset builders.
pub fn generate_path(spec: &GeneratorSpec, id: impl Into<String>) -> Result<SamplePath> {
    let values = match spec.family {
        Family::Rotation => gen_rotation(spec.parameter, spec.length, spec.seed)?,
        Family::Fgn => gen_fgn(spec.parameter, spec.length, spec.seed)?,
        Family::Ar1 => gen_ar1_cosine_iid(spec.parameter, spec.length, spec.seed)?,
    };
    Ok(SamplePath::new(id, values))
}

struct FgnFactor {
    n: usize,
    /// Packed row-major lower triangle; row i starts at i(i+1)/2.
    lower: Vec<f64>,
    #[allow(dead_code)]
    jittered: bool,
}

static FACTOR_CACHE: OnceLock<Mutex<HashMap<(u64, u64), Arc<FgnFactor>>>> = OnceLock::new();
static JITTERED_FACTORIZATIONS: AtomicUsize = AtomicUsize::new(0);

/// Number of covariance factorizations that needed the diagonal jitter
/// retry so far in this process; recorded in generation manifests.
pub fn jittered_factorization_count() -> usize {
    JITTERED_FACTORIZATIONS.load(Ordering::Relaxed)
}

/// Cached exact factorization per (Hurst, grid), grown on demand. Row k of
/// the factor only depends on rows before it, so a factor computed at a
/// larger size agrees bit for bit with smaller ones on its leading rows;
/// cache growth therefore preserves already-emitted paths.
fn fgn_factor(hurst: f64, grid: f64, n: usize) -> Result<Arc<FgnFactor>> {
    let key = (hurst.to_bits(), grid.to_bits());
    let cache = FACTOR_CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().expect("factor cache poisoned");
    if let Some(factor) = guard.get(&key) {
        if factor.n >= n {
            return Ok(Arc::clone(factor));
        }
    }
    let model = AnalyticCovModel::fgn(hurst, grid)?;
    // Pad the size so snapshot growth does not refactor every step.
    let target = n.next_multiple_of(64);
    let acov = |tau: usize| model.acov(tau);
    let (lower, jittered) = match cholesky_toeplitz(target, &acov, 0.0) {
        Some(lower) => (lower, false),
        None => {
            let jitter = 1e-12 * model.acov(0);
            let lower = cholesky_toeplitz(target, &acov, jitter).ok_or(Error::InvalidParameter {
                name: "hurst",
                value: hurst,
                constraint: "covariance factorization failed even with diagonal jitter",
            })?;
            JITTERED_FACTORIZATIONS.fetch_add(1, Ordering::Relaxed);
            (lower, true)
        }
    };
    let factor = Arc::new(FgnFactor { n: target, lower, jittered });
    guard.insert(key, Arc::clone(&factor));
    Ok(factor)
}

/// Lower-triangular Cholesky factor (packed rows) of the Toeplitz matrix
/// with entries acov(|i-j|) + jitter on the diagonal. Deterministic loop
/// order; returns None on a nonpositive pivot.
fn cholesky_toeplitz(n: usize, acov: &dyn Fn(usize) -> f64, jitter: f64) -> Option<Vec<f64>> {
    let mut lower = vec![0.0; n * (n + 1) / 2];
    for i in 0..n {
        let row_i = i * (i + 1) / 2;
        for j in 0..=i {
            let row_j = j * (j + 1) / 2;
            let mut s = acov(i - j);
            if i == j {
                s += jitter;
            }
            for k in 0..j {
                s -= lower[row_i + k] * lower[row_j + k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                lower[row_i + j] = s.sqrt();
            } else {
                lower[row_i + j] = s / lower[row_j + j];
            }
        }
    }
    Some(lower)
}

fn check_params(params: &[f64]) -> Result<()> {
    if params.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "params",
            value: params.len() as f64,
            constraint: "need at least 2 groups",
        });
    }
    for (i, a) in params.iter().enumerate() {
        for b in &params[i + 1..] {
            if a == b {
                return Err(Error::InvalidParameter {
                    name: "params",
                    value: *a,
                    constraint: "group parameters must be distinct",
                });
            }
        }
    }
    Ok(())
}

fn stream_values(
    family: Family,
    param: f64,
    len: usize,
    seed: u64,
    fgn_grid: Option<f64>,
) -> Result<Vec<f64>> {
    match family {
        Family::Rotation => gen_rotation(param, len, seed),
        Family::Ar1 => gen_ar1_cosine_iid(param, len, seed),
        Family::Fgn => match fgn_grid {
            Some(grid) => gen_fgn_on_grid(param, len, grid, seed),
            None => gen_fgn(param, len, seed),
        },
    }
}

/// Offline dataset: one group per parameter, `per_group` equal-length paths
/// each, labeled by generating parameter. Paths are generated in parallel
/// from independent derived stream seeds.
pub fn build_offline_dataset(
    family: Family,
    params: &[f64],
    per_group: usize,
    length: usize,
    seed: u64,
) -> Result<(Dataset, GroundTruth)> {
    check_params(params)?;
    check_length(length)?;
    if per_group == 0 {
        return Err(Error::InvalidParameter {
            name: "per_group",
            value: 0.0,
            constraint: "must be positive",
        });
    }
    let kappa = params.len();
    let total = kappa * per_group;
    let results = par::map_indexed(total, |idx| {
        let g = idx / per_group;
        let i = idx % per_group;
        let stream_seed = mix_seed(seed, g as u64, i as u64);
        let values = stream_values(family, params[g], length, stream_seed, None)?;
        Ok::<_, Error>(SamplePath::new(format!("g{}p{:02}", g + 1, i + 1), values))
    });
    let mut paths = Vec::with_capacity(total);
    for r in results {
        paths.push(r?);
    }
    let labels = (0..total).map(|idx| (idx / per_group) as u32 + 1).collect();
    Ok((Dataset::offline(paths), GroundTruth::new(labels, kappa as u32)))
}

/// Per-group path count of an online snapshot at time `t`.
pub fn online_paths_per_group(t: usize) -> usize {
    ONLINE_BASE_PATHS_PER_GROUP + (t - 1) / ONLINE_GROWTH_INTERVAL
}

/// Length of the i-th path (1-based within its group) at time `t`. The
/// i-th path starts observing at the step it joins, `10 (i - 6) + 1` for
/// i > 6, so a just-arrived path has length 5 and trails the original
/// paths by `50 (i - 6)` observations forever after.
pub fn online_path_length(t: usize, ordinal: usize) -> usize {
    let backlog = ONLINE_GROWTH_INTERVAL * ordinal.saturating_sub(ONLINE_BASE_PATHS_PER_GROUP);
    LENGTH_PER_STEP * t.saturating_sub(backlog)
}

/// Online snapshot at time `t`: every group holds `6 + floor((t-1)/10)`
/// paths; the i-th path of each group has length `5 (t - 10 (i-6)+)`, so
/// new arrivals enter short and unreliable. Values are prefixes of
/// per-(group, ordinal) streams, so snapshots at t and t+1 agree on shared
/// observations. Paths are ordered by (ordinal, group): newly arriving
/// paths always take fresh indices at the end.
pub fn build_online_snapshot(
    family: Family,
    params: &[f64],
    t: usize,
    seed: u64,
) -> Result<(Dataset, GroundTruth)> {
    check_params(params)?;
    if t == 0 {
        return Err(Error::InvalidParameter {
            name: "t",
            value: 0.0,
            constraint: "time steps are 1-based",
        });
    }
    let kappa = params.len();
    let per_group = online_paths_per_group(t);
    let mut slots = Vec::new(); // (ordinal, group)
    for ordinal in 1..=per_group {
        if online_path_length(t, ordinal) == 0 {
            continue;
        }
        for g in 0..kappa {
            slots.push((ordinal, g));
        }
    }
    let results = par::map_indexed(slots.len(), |idx| {
        let (ordinal, g) = slots[idx];
        let len = online_path_length(t, ordinal);
        let stream_seed = mix_seed(seed, g as u64, ordinal as u64 - 1);
        let values = stream_values(family, params[g], len, stream_seed, Some(ONLINE_FGN_GRID))?;
        Ok::<_, Error>(SamplePath::new(format!("g{}p{:02}", g + 1, ordinal), values))
    });
    let mut paths = Vec::with_capacity(slots.len());
    for r in results {
        paths.push(r?);
    }
    let labels = slots.iter().map(|&(_, g)| g as u32 + 1).collect();
    Ok((
        Dataset::online_snapshot(paths),
        GroundTruth::new(labels, kappa as u32),
    ))
}
