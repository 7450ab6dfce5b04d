//! Per-iteration run records.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: usize,
    /// `f(x_k) − f*`.
    pub f_gap: f64,
    pub grad_norm: f64,
    pub stepsize: f64,
    /// Whether the velocity was reset on the step that produced this iterate.
    pub refreshed: bool,
    /// Accumulated clock: `T_k` for CAGD and RHF-opt, `Σ h` for RHGD-type methods.
    pub poisson_time: f64,
    /// Cumulative gradient evaluations spent by the algorithm itself.
    pub grad_evals: u64,
    /// `‖x_k − x*‖²` when the minimizer is known.
    pub dist_sq: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceMetadata {
    pub algorithm: String,
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub metadata: TraceMetadata,
    pub stride: usize,
    pub records: Vec<TraceRecord>,
}

impl RunTrace {
    pub fn new(metadata: TraceMetadata, stride: usize) -> Self {
        Self { metadata, stride: stride.max(1), records: Vec::new() }
    }

    /// Iterations `0, s, 2s, …` are kept, plus the final iterate `K`.
    pub fn keeps(&self, k: usize, iterations: usize) -> bool {
        k % self.stride == 0 || k == iterations
    }

    /// Number of records a run of `iterations` steps produces: `⌈K/s⌉ + 1`.
    pub fn expected_len(iterations: usize, stride: usize) -> usize {
        iterations.div_ceil(stride.max(1)) + 1
    }

    pub fn push(&mut self, record: TraceRecord) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn f_gaps(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.f_gap).collect()
    }

    /// Iterations at which a refresh happened.
    pub fn refresh_iterations(&self) -> Vec<usize> {
        self.records.iter().filter(|r| r.refreshed).map(|r| r.k).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stride_keeps_final_iterate() {
        let t = RunTrace::new(TraceMetadata::default(), 3);
        let kept: Vec<usize> = (0..=10).filter(|&k| t.keeps(k, 10)).collect();
        assert_eq!(kept, vec![0, 3, 6, 9, 10]);
        assert_eq!(kept.len(), RunTrace::expected_len(10, 3));
        assert_eq!(RunTrace::expected_len(9, 3), 4);
        assert_eq!(RunTrace::expected_len(0, 3), 1);
    }
}
