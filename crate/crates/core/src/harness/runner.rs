use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, InitialPoint};
use crate::error::{Error, Result};
use crate::optimizers::{run_observed, RunOptions};
use crate::problems::{Problem, ProblemDescriptor};
use crate::rng::RandomSource;
use crate::trace::{RunTrace, TraceMetadata};
use crate::Vector;

/// Column set of every per-run CSV.
pub const RUN_COLUMNS: [&str; 9] =
    ["algorithm", "seed", "k", "t_poisson", "f_gap", "grad_norm", "stepsize", "refreshed", "grad_evals"];

pub const AGGREGATE_COLUMNS: [&str; 5] = ["algorithm", "k", "mean_f_gap", "stderr_f_gap", "runs"];

/// One (algorithm, run) trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub label: String,
    pub run: usize,
    pub seed: u64,
    pub trace: RunTrace,
}

/// Seed-averaged curve of one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCurve {
    pub label: String,
    pub k: Vec<usize>,
    pub mean_f_gap: Vec<f64>,
    pub stderr_f_gap: Vec<f64>,
    pub runs: usize,
    /// Accumulated clock at each refresh, per run.
    pub refresh_times: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateTrace {
    pub curves: Vec<AggregateCurve>,
}

impl AggregateTrace {
    pub fn curve(&self, label: &str) -> Option<&AggregateCurve> {
        self.curves.iter().find(|c| c.label == label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub run: usize,
    pub seed: u64,
    pub problem: ProblemDescriptor,
}

/// Contents of `metadata.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentMetadata {
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub instances: Vec<InstanceRecord>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub instances: Vec<InstanceRecord>,
    /// Ordered by algorithm (config order), then run.
    pub runs: Vec<RunOutput>,
    pub aggregate: AggregateTrace,
}

impl ExperimentResult {
    pub fn metadata(&self) -> ExperimentMetadata {
        ExperimentMetadata {
            config_hash: self.config.hash(),
            config: self.config.clone(),
            instances: self.instances.clone(),
        }
    }

    pub fn traces_for<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a RunOutput> + 'a {
        self.runs.iter().filter(move |r| r.label == label)
    }
}

/// Starting point of run `run`, drawn from its own stream.
pub fn initial_point(config: &ExperimentConfig, run: usize) -> Vector {
    let d = config.problem.dim();
    match config.initial_point {
        InitialPoint::Gaussian => RandomSource::for_run(config.run_seed(run), "x0", 0).normal_vector(d),
        InitialPoint::Zero => Vector::zeros(d),
    }
}

fn with_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    Ok(pool.install(job))
}

/// Runs every (algorithm, run) pair in memory on `threads` workers. Output
/// does not depend on `threads`.
pub fn execute(config: &ExperimentConfig, threads: usize) -> Result<ExperimentResult> {
    config.validate()?;
    let hash = config.hash();
    with_pool(threads, || {
        let problems: Vec<Problem> = (0..config.runs)
            .into_par_iter()
            .map(|r| config.problem.build(config.run_seed(r)))
            .collect::<Result<_>>()?;
        let jobs: Vec<(usize, usize)> = (0..config.algorithms.len())
            .flat_map(|a| (0..config.runs).map(move |r| (a, r)))
            .collect();
        let runs: Vec<RunOutput> = jobs
            .par_iter()
            .map(|&(a, r)| {
                let spec = &config.algorithms[a];
                let problem = &problems[r];
                let label = spec.label();
                let seed = config.run_seed(r);
                let algorithm = spec.resolve(problem)?;
                let x0 = initial_point(config, r);
                let mut src = RandomSource::for_run(seed, &label, 0);
                let metadata = TraceMetadata { algorithm: label.clone(), seed, config_hash: hash.clone() };
                let options = RunOptions { stride: config.trace_stride, metadata };
                let trace = run_observed(problem, &algorithm, &x0, config.iterations, &mut src, options, |_| {})?;
                Ok(RunOutput { label, run: r, seed, trace })
            })
            .collect::<Result<_>>()?;
        let instances = problems
            .iter()
            .enumerate()
            .map(|(r, p)| InstanceRecord { run: r, seed: config.run_seed(r), problem: p.descriptor() })
            .collect();
        let aggregate = aggregate(config, &runs);
        Ok(ExperimentResult { config: config.clone(), instances, runs, aggregate })
    })?
}

fn aggregate(config: &ExperimentConfig, runs: &[RunOutput]) -> AggregateTrace {
    let curves = config
        .algorithms
        .iter()
        .map(|spec| {
            let label = spec.label();
            let traces: Vec<&RunTrace> = runs.iter().filter(|r| r.label == label).map(|r| &r.trace).collect();
            let len = traces[0].len();
            let n = traces.len() as f64;
            let mut curve = AggregateCurve {
                label,
                k: traces[0].records.iter().map(|r| r.k).collect(),
                mean_f_gap: Vec::with_capacity(len),
                stderr_f_gap: Vec::with_capacity(len),
                runs: traces.len(),
                refresh_times: traces
                    .iter()
                    .map(|t| t.records.iter().filter(|r| r.refreshed).map(|r| r.poisson_time).collect())
                    .collect(),
            };
            for i in 0..len {
                let values: Vec<f64> = traces.iter().map(|t| t.records[i].f_gap).collect();
                let mean = values.iter().sum::<f64>() / n;
                let stderr = if traces.len() > 1 {
                    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
                    (var / n).sqrt()
                } else {
                    0.0
                };
                curve.mean_f_gap.push(mean);
                curve.stderr_f_gap.push(stderr);
            }
            curve
        })
        .collect();
    AggregateTrace { curves }
}

/// Writes `runs/{label}_run{r}.csv`, `aggregate.csv`, and `metadata.json`
/// under `dir`.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<()> {
    let runs_dir = dir.join("runs");
    fs::create_dir_all(&runs_dir)?;
    for run in &result.runs {
        let path = runs_dir.join(format!("{}_run{}.csv", run.label, run.run));
        write_run_csv(&run.trace, &run.label, run.seed, &path)?;
    }
    write_aggregate_csv(&result.aggregate, &dir.join("aggregate.csv"))?;
    let mut file = fs::File::create(dir.join("metadata.json"))?;
    serde_json::to_writer_pretty(&mut file, &result.metadata())?;
    file.write_all(b"\n")?;
    Ok(())
}

pub fn write_run_csv(trace: &RunTrace, label: &str, seed: u64, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(RUN_COLUMNS)?;
    let seed = seed.to_string();
    for r in &trace.records {
        w.write_record([
            label,
            &seed,
            &r.k.to_string(),
            &r.poisson_time.to_string(),
            &r.f_gap.to_string(),
            &r.grad_norm.to_string(),
            &r.stepsize.to_string(),
            if r.refreshed { "1" } else { "0" },
            &r.grad_evals.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_aggregate_csv(aggregate: &AggregateTrace, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(AGGREGATE_COLUMNS)?;
    for c in &aggregate.curves {
        let runs = c.runs.to_string();
        for i in 0..c.k.len() {
            w.write_record([
                c.label.as_str(),
                &c.k[i].to_string(),
                &c.mean_f_gap[i].to_string(),
                &c.stderr_f_gap[i].to_string(),
                &runs,
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// [`execute`] followed by [`write_outputs`] into `out`.
pub fn run_experiment(config: &ExperimentConfig, out: &Path, threads: usize) -> Result<ExperimentResult> {
    let result = execute(config, threads)?;
    write_outputs(&result, out)?;
    Ok(result)
}

