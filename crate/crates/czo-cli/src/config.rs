//! Experiment configuration: a typed TOML tree with strict key checking,
//! flag overrides, and a canonical hash embedded in every output.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid config: {reason}")]
    Invalid { reason: String },

    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn default_out_dir() -> String {
    "results".into()
}

/// Root configuration. Unknown keys anywhere in the tree are rejected.
/// Precedence: command-line flags override file keys, which override the
/// built-in defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    /// Root seed; all experiment randomness flows from named substreams.
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: String,
    /// Worker threads for Monte-Carlo loops; 0 keeps the library default.
    #[serde(default)]
    pub jobs: usize,
    /// Force sequential execution; outputs are identical either way because
    /// all reductions run in fixed order.
    #[serde(default)]
    pub deterministic: bool,

    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default, rename = "pi-good")]
    pub pi_good: PiGoodConfig,
    #[serde(default)]
    pub decay: DecayConfig,
    #[serde(default, rename = "shift-avg")]
    pub shift_avg: ShiftAvgConfig,
    #[serde(default)]
    pub growth: GrowthConfig,
    #[serde(default)]
    pub norms: NormsConfig,
}

mod defaults {
    pub fn seed() -> u64 {
        1
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config uses defaults")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct VerifyConfig {
    pub n: usize,
    pub levels: u32,
    pub d: usize,
    pub trials: u64,
    pub tolerance: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            n: 1,
            levels: 6,
            d: 4,
            trials: 20,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct PiGoodConfig {
    pub n: usize,
    pub r: u32,
    /// gamma as an exact rational [num, den].
    pub gamma: [u32; 2],
    pub k_max: u32,
    pub samples: u64,
    pub decoupling_samples: u64,
    pub decoupling_level: u32,
    pub decoupling_r: u32,
}

impl Default for PiGoodConfig {
    fn default() -> Self {
        PiGoodConfig {
            n: 1,
            r: 8,
            gamma: [1, 2],
            k_max: 24,
            samples: 100_000,
            decoupling_samples: 20_000,
            decoupling_level: 10,
            decoupling_r: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct DecayConfig {
    pub m_min: i64,
    pub m_max: i64,
    pub quadrature_level: u32,
    pub check_level: u32,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            m_min: 2,
            m_max: 64,
            quadrature_level: 7,
            check_level: 10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ShiftAvgConfig {
    pub samples: usize,
    pub grids: u32,
    pub bump_center: f64,
    pub bump_radius: f64,
    pub stream_dump: u32,
}

impl Default for ShiftAvgConfig {
    fn default() -> Self {
        ShiftAvgConfig {
            samples: 512,
            grids: 2000,
            bump_center: 0.5,
            bump_radius: 0.1,
            stream_dump: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct GrowthConfig {
    pub d_list: Vec<usize>,
    pub levels: u32,
    pub random_candidates: u32,
    pub perturbations: u32,
    pub power_iters: u32,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig {
            d_list: vec![1, 2, 4, 8, 16],
            levels: 4,
            random_candidates: 8,
            perturbations: 8,
            power_iters: 120,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct NormsConfig {
    pub levels: u32,
    pub d: usize,
    pub opnorm_instances: u64,
    pub suite_trials: u64,
    pub power_tolerance: f64,
    pub power_max_iter: u32,
}

impl Default for NormsConfig {
    fn default() -> Self {
        NormsConfig {
            levels: 4,
            d: 2,
            opnorm_instances: 10,
            suite_trials: 60,
            power_tolerance: 1e-12,
            power_max_iter: 4000,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: Option<&str>) -> Result<Self, ConfigError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                    path: p.to_string(),
                    source,
                })?;
                toml::from_str(&text).map_err(|e| ConfigError::Invalid {
                    reason: e.to_string(),
                })
            }
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |reason: String| Err(ConfigError::Invalid { reason });
        if self.verify.n == 0 || self.verify.d == 0 {
            return fail("verify.n and verify.d must be positive".into());
        }
        if self.verify.n * self.verify.levels as usize >= 24 {
            return fail("verify resolution too fine".into());
        }
        if self.verify.tolerance < 0.0 {
            return fail("verify.tolerance must be nonnegative".into());
        }
        if self.pi_good.gamma[0] == 0 || self.pi_good.gamma[0] >= self.pi_good.gamma[1] {
            return fail("pi-good.gamma must satisfy 0 < num < den".into());
        }
        if self.pi_good.r == 0 || self.pi_good.k_max < self.pi_good.r {
            return fail("pi-good needs 1 <= r <= k-max".into());
        }
        if self.pi_good.samples < 100 {
            return fail("pi-good.samples must be at least 100".into());
        }
        if self.pi_good.k_max > 26 {
            return fail("pi-good.k-max above 26 makes the exact oracle infeasible".into());
        }
        if self.decay.m_min < 2 || self.decay.m_max <= self.decay.m_min {
            return fail("decay range needs 2 <= m-min < m-max".into());
        }
        if !self.shift_avg.samples.is_power_of_two() {
            return fail("shift-avg.samples must be a power of two".into());
        }
        if self.shift_avg.grids == 0 {
            return fail("shift-avg.grids must be positive".into());
        }
        if !(0.0..1.0).contains(&self.shift_avg.bump_center)
            || self.shift_avg.bump_radius <= 0.0
            || self.shift_avg.bump_center - self.shift_avg.bump_radius <= 0.0
            || self.shift_avg.bump_center + self.shift_avg.bump_radius >= 1.0
        {
            return fail("shift-avg bump must be supported strictly inside (0, 1)".into());
        }
        if self.growth.d_list.is_empty()
            || self.growth.d_list.windows(2).any(|w| w[1] <= w[0])
        {
            return fail("growth.d-list must be ascending and nonempty".into());
        }
        let max_d = *self.growth.d_list.last().unwrap();
        if (1usize << self.growth.levels) * max_d * max_d > norm_lab::opnorm::DENSE_DIMENSION_CAP
        {
            return fail(format!(
                "growth dimension {} exceeds the feasible cap",
                (1usize << self.growth.levels) * max_d * max_d
            ));
        }
        if self.norms.d == 0
            || (1usize << self.norms.levels) * self.norms.d * self.norms.d
                > norm_lab::opnorm::DENSE_DIMENSION_CAP
        {
            return fail("norms dimension exceeds the dense cap".into());
        }
        Ok(())
    }

    /// Canonical hash of the resolved experiment parameters: SHA-256 of the
    /// canonical JSON encoding, truncated to 16 hex digits. Output location
    /// and scheduling knobs (out-dir, jobs, deterministic) do not affect any
    /// result and are excluded, so reruns into different directories carry
    /// the same hash.
    pub fn canonical_hash(&self) -> String {
        #[derive(Serialize)]
        struct HashView<'a> {
            seed: u64,
            verify: &'a VerifyConfig,
            pi_good: &'a PiGoodConfig,
            decay: &'a DecayConfig,
            shift_avg: &'a ShiftAvgConfig,
            growth: &'a GrowthConfig,
            norms: &'a NormsConfig,
        }
        let view = HashView {
            seed: self.seed,
            verify: &self.verify,
            pi_good: &self.pi_good,
            decay: &self.decay,
            shift_avg: &self.shift_avg,
            growth: &self.growth,
            norms: &self.norms,
        };
        let json = serde_json::to_string(&view).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(c.seed, 1);
        assert_eq!(c.verify.levels, 6);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = toml::from_str::<ExperimentConfig>("unknown-key = 3").unwrap_err();
        assert!(err.to_string().contains("unknown"));
        let err =
            toml::from_str::<ExperimentConfig>("[verify]\nbogus = 1").unwrap_err();
        assert!(err.to_string().contains("bogus") || err.to_string().contains("unknown"));
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ExperimentConfig::default();
        let mut b = ExperimentConfig::default();
        assert_eq!(a.canonical_hash(), b.canonical_hash());
        // Output location does not change the experiment identity.
        b.out_dir = "elsewhere".into();
        assert_eq!(a.canonical_hash(), b.canonical_hash());
        b.seed = 2;
        assert_ne!(a.canonical_hash(), b.canonical_hash());
        let mut c = ExperimentConfig::default();
        c.verify.levels = 5;
        assert_ne!(a.canonical_hash(), c.canonical_hash());
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut c = ExperimentConfig::default();
        c.pi_good.gamma = [2, 2];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.shift_avg.samples = 500;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.growth.d_list = vec![2, 1];
        assert!(c.validate().is_err());
    }
}
