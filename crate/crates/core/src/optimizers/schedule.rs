use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Iteration-indexed refresh rate `γ_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RefreshSchedule {
    Constant { gamma: f64 },
    /// `γ_k = numerator / ((k + offset)·h)`.
    Decaying { numerator: f64, offset: f64 },
}

impl RefreshSchedule {
    /// The weakly convex schedule `γ_k = 17/(2(k+9)h)`.
    pub fn weakly_convex() -> Self {
        RefreshSchedule::Decaying { numerator: 8.5, offset: 9.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RefreshSchedule::Constant { gamma } if gamma > 0.0 && gamma.is_finite() => Ok(()),
            RefreshSchedule::Constant { gamma } => {
                Err(invalid("gamma", format!("must be positive, got {gamma}")))
            }
            RefreshSchedule::Decaying { numerator, offset }
                if numerator > 0.0 && numerator.is_finite() && offset > 0.0 =>
            {
                Ok(())
            }
            RefreshSchedule::Decaying { .. } => {
                Err(invalid("refresh", "decaying schedule needs positive numerator and offset"))
            }
        }
    }

    pub fn rate(&self, k: usize, h: f64) -> f64 {
        match *self {
            RefreshSchedule::Constant { gamma } => gamma,
            RefreshSchedule::Decaying { numerator, offset } => numerator / ((k as f64 + offset) * h),
        }
    }

    /// `min(γ_k·h, 1)`.
    pub fn probability(&self, k: usize, h: f64) -> f64 {
        (self.rate(k, h) * h).min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decaying_schedule_values() {
        let s = RefreshSchedule::weakly_convex();
        let h = 0.1;
        assert!((s.rate(0, h) - 17.0 / (2.0 * 9.0 * h)).abs() < 1e-12);
        assert!((s.probability(0, h) - 17.0 / 18.0).abs() < 1e-15);
        assert!((s.probability(91, h) - 0.085).abs() < 1e-15);
        assert!(RefreshSchedule::Constant { gamma: 0.0 }.validate().is_err());
        assert_eq!(RefreshSchedule::Constant { gamma: 50.0 }.probability(3, 0.1), 1.0);
    }
}
