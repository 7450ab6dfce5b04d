use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::runner::execute;
use crate::error::{invalid, Result};
use crate::optimizers::StepsizeSpec;
use crate::problems::Objective;
use crate::trace::RunTrace;

/// Relative decrease the last quarter of a run must show. A stepsize sitting
/// exactly on the stability boundary leaves one mode oscillating at constant
/// amplitude; its final gap is below the initial one but it has stopped
/// converging.
pub const TAIL_DECREASE: f64 = 1e-6;

/// Runs that end this far below their initial gap count as converged
/// without the tail test: they sit at the float64 floor, where the gap no
/// longer moves.
pub const SOLVED_RATIO: f64 = 1e-12;

/// Exponents `n` of the candidate multiples `c = 2ⁿ`.
pub const DEFAULT_EXPONENTS: std::ops::RangeInclusive<i32> = -10..=4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    /// `c` in `η = c/L` or `h = √(c/L)`.
    pub multiple: f64,
    pub stepsize: f64,
    pub converged: bool,
    pub final_f_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridChoice {
    pub label: String,
    pub multiple: f64,
    pub stepsize: f64,
    /// Candidates tried, largest first; the search stops at the first that converges.
    pub tried: Vec<Candidate>,
}

/// Convergence test applied to each run of a candidate.
pub fn converged(trace: &RunTrace) -> bool {
    let gaps = trace.f_gaps();
    if gaps.iter().any(|g| !g.is_finite()) {
        return false;
    }
    let (first, last) = (gaps[0], gaps[gaps.len() - 1]);
    if !(last < first) {
        return false;
    }
    if last <= SOLVED_RATIO * first {
        return true;
    }
    let last_k = trace.records[trace.len() - 1].k;
    let tail_k = 3 * last_k / 4;
    match trace.records.iter().find(|r| r.k >= tail_k) {
        Some(r) if r.k < last_k && r.f_gap > 0.0 => last <= (1.0 - TAIL_DECREASE) * r.f_gap,
        _ => true,
    }
}

/// Largest candidate accepted by `accepts`, trying candidates from the
/// largest down.
pub fn largest_accepted(
    candidates: &[f64],
    mut accepts: impl FnMut(f64) -> Result<bool>,
) -> Result<Option<f64>> {
    if candidates.is_empty() {
        return Err(invalid("candidates", "candidate set is empty"));
    }
    let mut sorted = candidates.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    for c in sorted {
        if accepts(c)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// For each algorithm of `config`, the largest `c` among `multiples` whose
/// stepsize (`c/L`, or `√(c/L)` for RHGD-type methods) converges on every run.
pub fn grid_search_stepsize(config: &ExperimentConfig, multiples: &[f64], threads: usize) -> Result<Vec<GridChoice>> {
    if multiples.is_empty() {
        return Err(invalid("candidates", "candidate set is empty"));
    }
    let smoothness = config.problem.build(config.run_seed(0))?.smoothness();
    let mut choices = Vec::with_capacity(config.algorithms.len());
    for spec in &config.algorithms {
        let hamiltonian = spec.name.is_hamiltonian();
        let stepsize_of = |c: f64| if hamiltonian { (c / smoothness).sqrt() } else { c / smoothness };
        let mut tried = Vec::new();
        let best = largest_accepted(multiples, |c| {
            let mut single = config.clone();
            let mut s = spec.clone();
            s.stepsize = Some(StepsizeSpec::Absolute(stepsize_of(c)));
            single.algorithms = vec![s];
            let result = execute(&single, threads)?;
            let ok = result.runs.iter().all(|r| converged(&r.trace));
            let final_f_gap = result.aggregate.curves[0].mean_f_gap.last().copied().unwrap_or(f64::NAN);
            tried.push(Candidate { multiple: c, stepsize: stepsize_of(c), converged: ok, final_f_gap });
            Ok(ok)
        })?;
        let multiple = best.ok_or_else(|| {
            invalid("candidates", format!("no candidate converges for `{}`", spec.label()))
        })?;
        choices.push(GridChoice { label: spec.label(), multiple, stepsize: stepsize_of(multiple), tried });
    }
    Ok(choices)
}

/// `2ⁿ` for each exponent.
pub fn powers_of_two(exponents: impl IntoIterator<Item = i32>) -> Vec<f64> {
    exponents.into_iter().map(|n| 2f64.powi(n)).collect()
}
