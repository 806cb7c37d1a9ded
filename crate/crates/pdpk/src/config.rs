//! Generator configuration: JSON-loadable, strictly validated, with
//! benchmark defaults for every field.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rules::ConditionStrategy;
use crate::space::{FunctionKind, ValueRange};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config field {field}: {message}")]
    Invalid { field: String, message: String },
}

impl ConfigError {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Domains for a whole axis: one range applied to every index, or one range
/// per index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainSpec {
    Uniform(ValueRange),
    PerIndex(Vec<ValueRange>),
}

impl DomainSpec {
    fn get(&self, index: usize) -> ValueRange {
        match self {
            DomainSpec::Uniform(range) => *range,
            DomainSpec::PerIndex(ranges) => ranges[index],
        }
    }

    fn validate(&self, field: &str, count: usize) -> Result<(), ConfigError> {
        let check = |idx: Option<usize>, r: &ValueRange| {
            if r.min.is_finite() && r.max.is_finite() && r.min < r.max {
                Ok(())
            } else {
                let suffix = idx.map(|i| format!("[{i}]")).unwrap_or_default();
                Err(ConfigError::invalid(
                    format!("{field}{suffix}"),
                    format!("requires finite min < max, got [{}, {}]", r.min, r.max),
                ))
            }
        };
        match self {
            DomainSpec::Uniform(range) => check(None, range),
            DomainSpec::PerIndex(ranges) => {
                if ranges.len() != count {
                    return Err(ConfigError::invalid(
                        field,
                        format!("expected {count} ranges, got {}", ranges.len()),
                    ));
                }
                for (i, r) in ranges.iter().enumerate() {
                    check(Some(i), r)?;
                }
                Ok(())
            }
        }
    }
}

/// Everything the generator needs. Missing JSON keys take the benchmark
/// defaults; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    /// Root seed; every stage derives its own named substream from it.
    pub seed: u64,
    /// Number of process parameters.
    pub p_count: usize,
    /// Number of quality characteristics.
    pub q_count: usize,
    /// Share of (p, q) pairs with a causal dependency.
    pub pq_causal_share: f64,
    /// Share of causal dependencies known to the simulated expert.
    pub pq_known_share: f64,
    /// Fewest qualities a participating parameter may affect.
    pub fanout_min: usize,
    /// Most qualities a parameter may affect.
    pub fanout_max: usize,
    /// Parameter value ranges.
    pub parameter_domains: DomainSpec,
    /// Quality value ranges.
    pub quality_domains: DomainSpec,
    /// Dependency function families the generator may draw from.
    pub function_kinds: BTreeSet<FunctionKind>,
    /// Score threshold below which a parametrisation process has converged.
    pub threshold: f64,
    /// Hard cap on iterations per parametrisation process.
    pub max_iterations: usize,
    /// Total process iterations to generate across all processes.
    pub total_iterations: usize,
    /// Probability that a process uses exploitative rather than explorative
    /// behaviour.
    pub exploitative_share: f64,
    /// Smallest number of qualities targeted by one process.
    pub q_opt_size_min: usize,
    /// Largest number of qualities targeted by one process.
    pub q_opt_size_max: usize,
    /// Gaussian observation noise, as a fraction of each quality's width.
    pub noise_sigma_rel: f64,
    /// How quality condition ranges are binned during rule extraction.
    pub condition_strategy: ConditionStrategy,
    /// Fraction of knowledge-graph triples moved to the link-prediction
    /// test set.
    pub lp_test_fraction: f64,
    /// Fraction of process iterations moved to the downstream test set.
    pub downstream_test_fraction: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 42,
            p_count: 46,
            q_count: 16,
            pq_causal_share: 0.10,
            pq_known_share: 0.75,
            fanout_min: 1,
            fanout_max: 14,
            parameter_domains: DomainSpec::Uniform(ValueRange { min: 0.0, max: 10.0 }),
            quality_domains: DomainSpec::Uniform(ValueRange { min: 0.0, max: 10.0 }),
            function_kinds: FunctionKind::ALL.into_iter().collect(),
            threshold: 0.25,
            max_iterations: 15,
            total_iterations: 500,
            exploitative_share: 0.5,
            q_opt_size_min: 1,
            q_opt_size_max: 2,
            noise_sigma_rel: 0.0,
            condition_strategy: ConditionStrategy::FixedCount(1),
            lp_test_fraction: 0.2,
            downstream_test_fraction: 0.2,
        }
    }
}

impl GeneratorConfig {
    pub fn parameter_domain(&self, k: usize) -> ValueRange {
        self.parameter_domains.get(k)
    }

    pub fn quality_domain(&self, j: usize) -> ValueRange {
        self.quality_domains.get(j)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let unit = |field: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(ConfigError::invalid(field, format!("{v} outside [0, 1]")))
            }
        };
        let open_unit = |field: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(ConfigError::invalid(field, format!("{v} outside (0, 1)")))
            }
        };

        if self.p_count == 0 {
            return Err(ConfigError::invalid("p_count", "must be at least 1"));
        }
        if self.q_count == 0 {
            return Err(ConfigError::invalid("q_count", "must be at least 1"));
        }
        unit("pq_causal_share", self.pq_causal_share)?;
        unit("pq_known_share", self.pq_known_share)?;
        unit("threshold", self.threshold)?;
        unit("exploitative_share", self.exploitative_share)?;
        if self.fanout_min > self.fanout_max {
            return Err(ConfigError::invalid(
                "fanout_min",
                format!("{} exceeds fanout_max {}", self.fanout_min, self.fanout_max),
            ));
        }
        if self.fanout_max > self.q_count {
            return Err(ConfigError::invalid(
                "fanout_max",
                format!("{} exceeds q_count {}", self.fanout_max, self.q_count),
            ));
        }
        self.parameter_domains
            .validate("parameter_domains", self.p_count)?;
        self.quality_domains
            .validate("quality_domains", self.q_count)?;
        if self.function_kinds.is_empty() {
            return Err(ConfigError::invalid(
                "function_kinds",
                "must enable at least one kind",
            ));
        }
        if self.max_iterations == 0 {
            return Err(ConfigError::invalid("max_iterations", "must be at least 1"));
        }
        if self.total_iterations < self.max_iterations {
            return Err(ConfigError::invalid(
                "total_iterations",
                format!(
                    "{} is below max_iterations {}",
                    self.total_iterations, self.max_iterations
                ),
            ));
        }
        if self.q_opt_size_min == 0 {
            return Err(ConfigError::invalid("q_opt_size_min", "must be at least 1"));
        }
        if self.q_opt_size_min > self.q_opt_size_max {
            return Err(ConfigError::invalid(
                "q_opt_size_min",
                format!(
                    "{} exceeds q_opt_size_max {}",
                    self.q_opt_size_min, self.q_opt_size_max
                ),
            ));
        }
        if self.q_opt_size_max > self.q_count {
            return Err(ConfigError::invalid(
                "q_opt_size_max",
                format!("{} exceeds q_count {}", self.q_opt_size_max, self.q_count),
            ));
        }
        if !(self.noise_sigma_rel >= 0.0) || !self.noise_sigma_rel.is_finite() {
            return Err(ConfigError::invalid(
                "noise_sigma_rel",
                format!("{} must be a finite non-negative value", self.noise_sigma_rel),
            ));
        }
        if let ConditionStrategy::FixedCount(n) = self.condition_strategy {
            if n == 0 {
                return Err(ConfigError::invalid(
                    "condition_strategy",
                    "fixed_count requires at least 1 bin",
                ));
            }
        }
        open_unit("lp_test_fraction", self.lp_test_fraction)?;
        open_unit("downstream_test_fraction", self.downstream_test_fraction)?;
        Ok(())
    }
}

/// Parse and validate a config from JSON text. Unknown keys are rejected,
/// missing keys take the benchmark defaults.
pub fn load_config(text: &str) -> Result<GeneratorConfig, ConfigError> {
    let config: GeneratorConfig =
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// One-line description per config key, used to render `--help` and kept in
/// sync with the schema by a test.
pub fn config_key_docs() -> &'static [(&'static str, &'static str)] {
    &[
        ("seed", "root seed for all random substreams"),
        ("p_count", "number of process parameters"),
        ("q_count", "number of quality characteristics"),
        ("pq_causal_share", "share of (p,q) pairs with a causal dependency"),
        ("pq_known_share", "share of dependencies known to the expert"),
        ("fanout_min", "fewest qualities a participating parameter affects"),
        ("fanout_max", "most qualities a parameter affects"),
        ("parameter_domains", "parameter value ranges (one range or one per parameter)"),
        ("quality_domains", "quality value ranges (one range or one per quality)"),
        ("function_kinds", "dependency function families to draw from"),
        ("threshold", "score threshold for process convergence"),
        ("max_iterations", "iteration cap per parametrisation process"),
        ("total_iterations", "total process iterations in the dataset"),
        ("exploitative_share", "probability of exploitative behaviour"),
        ("q_opt_size_min", "smallest targeted quality subset"),
        ("q_opt_size_max", "largest targeted quality subset"),
        ("noise_sigma_rel", "observation noise relative to quality width"),
        ("condition_strategy", "condition binning: {\"fixed_count\":n} or \"freedman_diaconis\""),
        ("lp_test_fraction", "test fraction for the link-prediction split"),
        ("downstream_test_fraction", "test fraction for the downstream split"),
    ]
}
