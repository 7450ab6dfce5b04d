use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::optimizers::RefreshSchedule;
use crate::rng::RandomSource;
use crate::trace::RunTrace;

pub const POISSON_COLUMNS: [&str; 4] = ["series", "t", "k", "f_gap"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Series {
    /// Objective gap of every recorded iterate.
    Trace,
    /// Iterations at which the velocity was refreshed.
    Refresh,
    /// Simulated jumps of the matching Poisson process.
    Jump,
}

impl Series {
    pub fn as_str(&self) -> &'static str {
        match self {
            Series::Trace => "trace",
            Series::Refresh => "refresh",
            Series::Jump => "jump",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonRow {
    pub series: Series,
    pub t: f64,
    /// Iteration index; absent for simulated jumps.
    pub k: Option<usize>,
    pub f_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PoissonTrace {
    pub rows: Vec<PoissonRow>,
}

impl PoissonTrace {
    pub fn times(&self, series: Series) -> Vec<f64> {
        self.rows.iter().filter(|r| r.series == series).map(|r| r.t).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(POISSON_COLUMNS)?;
        for r in &self.rows {
            w.write_record([
                r.series.as_str().to_string(),
                r.t.to_string(),
                r.k.map(|k| k.to_string()).unwrap_or_default(),
                r.f_gap.map(|g| g.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Jump times in `[0, horizon]` of the Poisson process matching `schedule`
/// on the clock `t = k·h`: rate `γ` for a constant schedule, and
/// `c/(t + o·h)` for the decaying one, sampled by inverting the integrated rate.
pub fn poisson_jumps(schedule: &RefreshSchedule, h: f64, horizon: f64, src: &mut RandomSource) -> Result<Vec<f64>> {
    schedule.validate()?;
    if !(h > 0.0) || !(horizon >= 0.0) {
        return Err(invalid("h", "stepsize must be positive and horizon nonnegative"));
    }
    let mut jumps = Vec::new();
    let mut t = 0.0;
    loop {
        let e = src.exponential(1.0)?;
        t = match *schedule {
            RefreshSchedule::Constant { gamma } => t + e / gamma,
            RefreshSchedule::Decaying { numerator, offset } => {
                let shift = offset * h;
                (t + shift) * (e / numerator).exp() - shift
            }
        };
        if t > horizon {
            return Ok(jumps);
        }
        jumps.push(t);
    }
}

/// Refresh events of a fixed-`h` run placed on the clock `t = k·h`, with the
/// gap curve and simulated jumps drawn from `src`.
pub fn emit_poisson_trace(
    trace: &RunTrace,
    schedule: &RefreshSchedule,
    h: f64,
    src: &mut RandomSource,
) -> Result<PoissonTrace> {
    if trace.is_empty() {
        return Err(Error::NoRefreshData);
    }
    let mut rows = Vec::new();
    for r in &trace.records {
        let t = r.k as f64 * h;
        rows.push(PoissonRow { series: Series::Trace, t, k: Some(r.k), f_gap: Some(r.f_gap) });
    }
    for r in trace.records.iter().filter(|r| r.refreshed) {
        let t = r.k as f64 * h;
        rows.push(PoissonRow { series: Series::Refresh, t, k: Some(r.k), f_gap: Some(r.f_gap) });
    }
    let horizon = trace.records[trace.len() - 1].k as f64 * h;
    for t in poisson_jumps(schedule, h, horizon, src)? {
        rows.push(PoissonRow { series: Series::Jump, t, k: None, f_gap: None });
    }
    Ok(PoissonTrace { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_rate_jump_spacing() {
        let mut src = RandomSource::new(3, 1);
        let gamma = 2.0;
        let jumps = poisson_jumps(&RefreshSchedule::Constant { gamma }, 0.01, 5000.0, &mut src).unwrap();
        let mean_gap = jumps.last().unwrap() / jumps.len() as f64;
        assert!((mean_gap * gamma - 1.0).abs() < 0.03, "{mean_gap}");
    }

    #[test]
    fn decaying_rate_count_matches_integrated_intensity() {
        // Λ(T) = c·ln((T + o·h)/(o·h)); mean count over many draws.
        let (c, o, h, horizon) = (8.5, 9.0, 0.1, 100.0);
        let schedule = RefreshSchedule::Decaying { numerator: c, offset: o };
        let expected = c * ((horizon + o * h) / (o * h)).ln();
        let mut total = 0usize;
        let reps = 2000;
        for i in 0..reps {
            let mut src = RandomSource::new(11, i);
            total += poisson_jumps(&schedule, h, horizon, &mut src).unwrap().len();
        }
        let mean = total as f64 / reps as f64;
        assert!((mean - expected).abs() < 0.03 * expected, "{mean} vs {expected}");
    }
}
