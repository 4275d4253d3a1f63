//! Configuration of the dissimilarity measure: summation weights, window
//! count rule and the optional sign-preserving log transform.

use serde::{Deserialize, Serialize};

/// Weight sequence w_j used by both the dissimilarity sums and the online
/// ensemble combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightRule {
    /// w_j = 1/(j(j+1)); telescopes to a unit total.
    #[default]
    Telescoping,
    /// w_j = 1/(j(j+1))^3; concentrates almost all mass on the first terms.
    TelescopingCubed,
}

impl WeightRule {
    /// Weight for a 1-based index j.
    pub fn weight(&self, j: usize) -> f64 {
        let j = j as f64;
        match self {
            WeightRule::Telescoping => 1.0 / (j * (j + 1.0)),
            WeightRule::TelescopingCubed => (1.0 / (j * (j + 1.0))).powi(3),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WeightRule::Telescoping => "telescoping",
            WeightRule::TelescopingCubed => "telescoping-cubed",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "telescoping" => Some(WeightRule::Telescoping),
            "telescoping-cubed" => Some(WeightRule::TelescopingCubed),
            _ => None,
        }
    }
}

/// Rule mapping a path length n to the largest window size used in the sums.
///
/// The default grows like the decimal logarithm. Larger window counts pull
/// in covariance entries whose true values sit near zero, and under the log
/// transform those entries contribute scale-free sign noise that drowns the
/// spectrum-level signal; floor(log10 n) keeps the matrices small enough
/// that both the plain and transformed measures stay informative at the
/// path lengths the estimator is meant for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowRule {
    /// max(1, floor(log10 n)).
    #[default]
    LogLength,
    /// max(1, floor(ln n)); grows faster, useful for long, clean paths.
    NaturalLogLength,
    /// A fixed window count, still clamped to the valid range.
    Fixed(usize),
}

impl WindowRule {
    /// Largest window size for a path of length n, clamped to [1, n-1] so
    /// every window sum is nonempty and windows stay inside the path.
    pub fn window_count(&self, n: usize) -> usize {
        let raw = match self {
            WindowRule::LogLength => (n as f64).log10().floor() as usize,
            WindowRule::NaturalLogLength => (n as f64).ln().floor() as usize,
            WindowRule::Fixed(m) => *m,
        };
        raw.clamp(1, n.saturating_sub(1).max(1))
    }
}

/// Fixes the dissimilarity measure: weights, window rule and transform flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DissimConfig {
    pub weights: WeightRule,
    pub window_rule: WindowRule,
    /// Pass covariance matrices through the sign-preserving log transform.
    /// This variant is mean-free: it targets zero-mean self-similar data.
    pub use_log_star: bool,
    /// Include the Euclidean mean-vector term. Ignored (treated as false)
    /// when `use_log_star` is set.
    pub include_mean_term: bool,
}

impl Default for DissimConfig {
    fn default() -> Self {
        Self {
            weights: WeightRule::Telescoping,
            window_rule: WindowRule::LogLength,
            use_log_star: false,
            include_mean_term: true,
        }
    }
}

impl DissimConfig {
    /// The covariance-only measure: drops the mean term. This is the form
    /// the simulation studies use, since their process families share a
    /// known common mean and the empirical mean difference is pure noise.
    pub fn covariance_only() -> Self {
        Self { include_mean_term: false, ..Self::default() }
    }

    pub fn with_log_star(mut self, on: bool) -> Self {
        self.use_log_star = on;
        self
    }

    pub fn weight(&self, j: usize) -> f64 {
        self.weights.weight(j)
    }

    pub fn window_count(&self, n: usize) -> usize {
        self.window_rule.window_count(n)
    }

    /// Whether the mean term participates given both flags.
    pub fn mean_term_active(&self) -> bool {
        self.include_mean_term && !self.use_log_star
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_weights_telescope() {
        let w = WeightRule::Telescoping;
        // 1/(j(j+1)) = 1/j - 1/(j+1), so partial sums are 1 - 1/(n+1).
        let sum: f64 = (1..=1000).map(|j| w.weight(j)).sum();
        assert!((sum - (1.0 - 1.0 / 1001.0)).abs() < 1e-12);
        assert!((0..20).all(|j| w.weight(j + 1) > 0.0));
    }

    #[test]
    fn window_count_is_clamped() {
        let rule = WindowRule::LogLength;
        assert_eq!(rule.window_count(3), 1);
        assert_eq!(rule.window_count(50), 1);
        assert_eq!(rule.window_count(100), 2);
        assert_eq!(rule.window_count(150), 2);
        assert_eq!(rule.window_count(2000), 3);
        assert_eq!(WindowRule::NaturalLogLength.window_count(150), 5);
        assert_eq!(WindowRule::NaturalLogLength.window_count(3), 1);
        // Fixed rules cannot run past the path end.
        assert_eq!(WindowRule::Fixed(10).window_count(4), 3);
        assert_eq!(WindowRule::Fixed(0).window_count(4), 1);
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = DissimConfig::default().with_log_star(true);
        let text = serde_json::to_string(&cfg).unwrap();
        let back: DissimConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }
}
