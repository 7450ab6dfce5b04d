//! Convergence-bound curves, Lyapunov functions, and verification checks.

pub mod bounds;
pub mod checks;
pub mod lyapunov;

pub use bounds::*;
pub use checks::{
    check_composite_error, check_cos_moment, check_prox_error, cos_moment_exact, MomentCheck,
    ProxStep,
};
pub use lyapunov::{lyapunov_sc, lyapunov_wc, lyapunov_wc_ratio_bound};

use serde::{Deserialize, Serialize};

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CheckResult {
    /// Passes when `statistic ≤ threshold`.
    pub fn at_most(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            statistic,
            threshold,
            pass: statistic <= threshold,
            detail: String::new(),
        }
    }

    /// Passes when `statistic < threshold` strictly.
    pub fn below(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            statistic,
            threshold,
            pass: statistic < threshold,
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}
