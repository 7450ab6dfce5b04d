use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::optimizers::AlgorithmSpec;
use crate::problems::{make_logistic, make_quadratic, Problem};

/// Problem family and size; instances are generated per run from the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    Quadratic {
        d: usize,
        alpha: f64,
        #[serde(rename = "L")]
        smoothness: f64,
    },
    Logistic {
        d: usize,
        n: usize,
        alpha: f64,
        #[serde(default = "default_noise")]
        noise: f64,
    },
}

fn default_noise() -> f64 {
    0.1
}

impl ProblemConfig {
    pub fn build(&self, seed: u64) -> Result<Problem> {
        match *self {
            ProblemConfig::Quadratic { d, alpha, smoothness } => {
                Ok(Problem::Quadratic(make_quadratic(d, alpha, smoothness, seed)?))
            }
            ProblemConfig::Logistic { d, n, alpha, noise } => {
                Ok(Problem::Logistic(make_logistic(d, n, alpha, noise, seed)?))
            }
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            ProblemConfig::Quadratic { d, .. } | ProblemConfig::Logistic { d, .. } => d,
        }
    }
}

/// Starting point of every run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialPoint {
    /// `x₀ ~ N(0, I)` from the run's own stream.
    #[default]
    Gaussian,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub problem: ProblemConfig,
    pub seed: u64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    pub iterations: usize,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default = "default_stride")]
    pub trace_stride: usize,
    #[serde(default)]
    pub initial_point: InitialPoint,
}

fn default_runs() -> usize {
    5
}

fn default_stride() -> usize {
    1
}

fn config_error(path: &str, reason: impl Into<String>) -> Error {
    Error::Config { path: path.to_string(), reason: reason.into() }
}

/// Parses and validates a JSON experiment config. Errors name the offending field path.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        config_error(&path, e.into_inner().to_string())
    })?;
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(config_error("runs", "must be at least 1"));
        }
        if self.trace_stride == 0 {
            return Err(config_error("trace_stride", "must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(config_error("algorithms", "list is empty"));
        }
        match self.problem {
            ProblemConfig::Quadratic { d, alpha, smoothness } => {
                if d == 0 {
                    return Err(config_error("problem.d", "must be positive"));
                }
                if !(0.0..=smoothness).contains(&alpha) {
                    return Err(config_error("problem.alpha", "need 0 <= alpha <= L"));
                }
            }
            ProblemConfig::Logistic { d, n, alpha, .. } => {
                if d == 0 || n == 0 {
                    return Err(config_error("problem", "d and n must be positive"));
                }
                if !(alpha >= 0.0) {
                    return Err(config_error("problem.alpha", "must be nonnegative"));
                }
            }
        }
        let mut labels = std::collections::BTreeSet::new();
        for (i, spec) in self.algorithms.iter().enumerate() {
            if !labels.insert(spec.label()) {
                return Err(config_error(
                    &format!("algorithms[{i}].label"),
                    format!("duplicate label `{}`", spec.label()),
                ));
            }
            if let Some(alpha) = spec.alpha_hint {
                if !(alpha >= 0.0) {
                    return Err(config_error(&format!("algorithms[{i}].alpha_hint"), "must be nonnegative"));
                }
            }
        }
        Ok(())
    }

    /// Seed of run `r`: `seed + r`.
    pub fn run_seed(&self, run: usize) -> u64 {
        self.seed.wrapping_add(run as u64)
    }

    /// Short hex digest of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        hex::encode(&digest[..8])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::{AlgorithmName, StepsizeSpec, StepsizeUnit};

    #[test]
    fn minimal_config_gets_defaults() {
        let text = r#"{
            "problem": {"kind": "quadratic", "d": 10, "alpha": 0.5, "L": 500},
            "seed": 1,
            "iterations": 100,
            "algorithms": [{"name": "gd"}]
        }"#;
        let c = parse_config(text).unwrap();
        assert_eq!(c.runs, 5);
        assert_eq!(c.trace_stride, 1);
        assert_eq!(c.initial_point, InitialPoint::Gaussian);
        assert_eq!(c.algorithms[0].name, AlgorithmName::Gd);
    }

    #[test]
    fn relative_stepsizes_parse() {
        let text = r#"{
            "problem": {"kind": "quadratic", "d": 100, "alpha": 5e-5, "L": 500},
            "seed": 7, "iterations": 10000,
            "algorithms": [
                {"name": "gd", "stepsize": {"multiple": 1, "of": "1/L"}},
                {"name": "rhgd", "stepsize": {"multiple": 1, "of": "1/sqrt(L)"},
                 "refresh": {"kind": "sqrt_alpha"}}
            ]
        }"#;
        let c = parse_config(text).unwrap();
        assert_eq!(
            c.algorithms[1].stepsize,
            Some(StepsizeSpec::Relative { multiple: 1.0, of: StepsizeUnit::InverseSqrtL })
        );
        assert!((c.algorithms[0].stepsize.unwrap().resolve(500.0) - 0.002).abs() < 1e-18);
    }

    #[test]
    fn errors_carry_field_path() {
        let text = r#"{
            "problem": {"kind": "quadratic", "d": 10, "alpha": 0.5, "L": 500},
            "seed": 1, "iterations": 100,
            "algorithms": [{"name": "gd"}, {"name": "newton"}]
        }"#;
        match parse_config(text) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "algorithms[1].name"),
            other => panic!("unexpected {other:?}"),
        }
        let text = r#"{
            "problem": {"kind": "quadratic", "d": 10, "alpha": 0.5, "L": 500},
            "seed": 1, "iterations": 100, "runs": 0,
            "algorithms": [{"name": "gd"}]
        }"#;
        assert!(matches!(parse_config(text), Err(Error::Config { path, .. }) if path == "runs"));
        let text = r#"{
            "problem": {"kind": "quadratic", "d": 10, "alpha": 0.5, "L": 500},
            "seed": 1, "iterations": 100,
            "algorithms": [{"name": "gd"}, {"name": "gd"}]
        }"#;
        assert!(parse_config(text).is_err());
    }
}
