use serde::{Deserialize, Serialize};

use super::adaptive::{ada_agd_step, ada_cagd_step, ada_gd_step, ada_rhgd_step};
use super::steps::{agd_momentum, agd_step, cagd_step, check_step, gd_step, rhgd_step, rphd_step};
use super::{MomentumMode, OptimizerState, RefreshSchedule};
use crate::error::{check_dim, invalid, Result};
use crate::problems::Objective;
use crate::rng::RandomSource;
use crate::trace::{RunTrace, TraceMetadata, TraceRecord};
use crate::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmName {
    Gd,
    Agd,
    Cagd,
    Rhgd,
    Rphd,
    AdaGd,
    AdaAgd,
    AdaCagd,
    AdaRhgd,
}

impl AlgorithmName {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmName::Gd => "gd",
            AlgorithmName::Agd => "agd",
            AlgorithmName::Cagd => "cagd",
            AlgorithmName::Rhgd => "rhgd",
            AlgorithmName::Rphd => "rphd",
            AlgorithmName::AdaGd => "ada_gd",
            AlgorithmName::AdaAgd => "ada_agd",
            AlgorithmName::AdaCagd => "ada_cagd",
            AlgorithmName::AdaRhgd => "ada_rhgd",
        }
    }

    /// Methods whose stepsize is `h` (with `h²` playing the role of `η`).
    pub fn is_hamiltonian(&self) -> bool {
        matches!(self, AlgorithmName::Rhgd | AlgorithmName::Rphd | AlgorithmName::AdaRhgd)
    }

    pub fn is_adaptive(&self) -> bool {
        matches!(
            self,
            AlgorithmName::AdaGd | AlgorithmName::AdaAgd | AlgorithmName::AdaCagd | AlgorithmName::AdaRhgd
        )
    }
}

/// Unit a relative stepsize is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepsizeUnit {
    #[serde(rename = "1/L")]
    InverseL,
    #[serde(rename = "1/sqrt(L)")]
    InverseSqrtL,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepsizeSpec {
    Absolute(f64),
    Relative { multiple: f64, of: StepsizeUnit },
}

impl StepsizeSpec {
    pub fn resolve(&self, smoothness: f64) -> f64 {
        match *self {
            StepsizeSpec::Absolute(v) => v,
            StepsizeSpec::Relative { multiple, of: StepsizeUnit::InverseL } => multiple / smoothness,
            StepsizeSpec::Relative { multiple, of: StepsizeUnit::InverseSqrtL } => {
                multiple / smoothness.sqrt()
            }
        }
    }
}

/// Refresh rate as written in a config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RefreshSpec {
    Constant { gamma: f64 },
    /// `γ = factor·√α` with `α` the (possibly misspecified) convexity hint.
    SqrtAlpha {
        #[serde(default = "one")]
        factor: f64,
    },
    Decaying {
        #[serde(default = "default_numerator")]
        numerator: f64,
        #[serde(default = "default_offset")]
        offset: f64,
    },
}

fn one() -> f64 {
    1.0
}
fn default_numerator() -> f64 {
    8.5
}
fn default_offset() -> f64 {
    9.0
}

/// Algorithm entry of an experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub name: AlgorithmName,
    /// Column value in output files; defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Fixed stepsize, or the initial one for adaptive methods.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stepsize: Option<StepsizeSpec>,
    /// Convexity used for momentum and refresh parameters; defaults to the objective's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_hint: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refresh: Option<RefreshSpec>,
    #[serde(default)]
    pub momentum: MomentumMode,
}

impl AlgorithmSpec {
    pub fn new(name: AlgorithmName) -> Self {
        Self { name, label: None, stepsize: None, alpha_hint: None, refresh: None, momentum: MomentumMode::Literal }
    }

    pub fn with_stepsize(mut self, stepsize: f64) -> Self {
        self.stepsize = Some(StepsizeSpec::Absolute(stepsize));
        self
    }

    pub fn with_refresh(mut self, refresh: RefreshSpec) -> Self {
        self.refresh = Some(refresh);
        self
    }

    pub fn with_alpha_hint(mut self, alpha: f64) -> Self {
        self.alpha_hint = Some(alpha);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.name.as_str().to_string())
    }

    /// Fills defaults against a concrete objective: stepsize `1/L` (`1/√L`
    /// for RHGD/RPHD, 1 for adaptive methods), `α` from the objective, and
    /// refresh `√α` when `α > 0`, the decaying schedule otherwise.
    pub fn resolve(&self, obj: &dyn Objective) -> Result<Algorithm> {
        let smoothness = obj.smoothness();
        let alpha = self.alpha_hint.unwrap_or_else(|| obj.convexity());
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(invalid("alpha_hint", format!("must be finite and nonnegative, got {alpha}")));
        }
        let stepsize = match self.stepsize {
            Some(s) => s.resolve(smoothness),
            None if self.name.is_adaptive() => 1.0,
            None if self.name.is_hamiltonian() => 1.0 / smoothness.sqrt(),
            None => 1.0 / smoothness,
        };
        check_step("stepsize", stepsize)?;
        let schedule = match self.refresh {
            Some(RefreshSpec::Constant { gamma }) => RefreshSchedule::Constant { gamma },
            Some(RefreshSpec::SqrtAlpha { factor }) => {
                if alpha == 0.0 {
                    return Err(invalid("refresh", "a sqrt_alpha refresh rate needs alpha > 0"));
                }
                RefreshSchedule::Constant { gamma: factor * alpha.sqrt() }
            }
            Some(RefreshSpec::Decaying { numerator, offset }) => {
                RefreshSchedule::Decaying { numerator, offset }
            }
            None if alpha > 0.0 => RefreshSchedule::Constant { gamma: alpha.sqrt() },
            None => RefreshSchedule::weakly_convex(),
        };
        schedule.validate()?;
        let momentum = self.momentum;
        Ok(match self.name {
            AlgorithmName::Gd => Algorithm::Gd { eta: stepsize },
            AlgorithmName::Agd => Algorithm::Agd { eta: stepsize, alpha, momentum },
            AlgorithmName::Cagd => Algorithm::Cagd { eta: stepsize, alpha },
            AlgorithmName::Rhgd => Algorithm::Rhgd { h: stepsize, schedule },
            AlgorithmName::Rphd => Algorithm::Rphd { h: stepsize, schedule },
            AlgorithmName::AdaGd => Algorithm::AdaGd { eta0: stepsize },
            AlgorithmName::AdaAgd => Algorithm::AdaAgd { eta0: stepsize, alpha, momentum },
            AlgorithmName::AdaCagd => Algorithm::AdaCagd { eta0: stepsize, alpha },
            AlgorithmName::AdaRhgd => Algorithm::AdaRhgd { h0: stepsize, schedule },
        })
    }
}

/// Fully parameterised method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    Gd { eta: f64 },
    Agd { eta: f64, alpha: f64, momentum: MomentumMode },
    Cagd { eta: f64, alpha: f64 },
    Rhgd { h: f64, schedule: RefreshSchedule },
    Rphd { h: f64, schedule: RefreshSchedule },
    AdaGd { eta0: f64 },
    AdaAgd { eta0: f64, alpha: f64, momentum: MomentumMode },
    AdaCagd { eta0: f64, alpha: f64 },
    AdaRhgd { h0: f64, schedule: RefreshSchedule },
}

impl Algorithm {
    pub fn name(&self) -> AlgorithmName {
        match self {
            Algorithm::Gd { .. } => AlgorithmName::Gd,
            Algorithm::Agd { .. } => AlgorithmName::Agd,
            Algorithm::Cagd { .. } => AlgorithmName::Cagd,
            Algorithm::Rhgd { .. } => AlgorithmName::Rhgd,
            Algorithm::Rphd { .. } => AlgorithmName::Rphd,
            Algorithm::AdaGd { .. } => AlgorithmName::AdaGd,
            Algorithm::AdaAgd { .. } => AlgorithmName::AdaAgd,
            Algorithm::AdaCagd { .. } => AlgorithmName::AdaCagd,
            Algorithm::AdaRhgd { .. } => AlgorithmName::AdaRhgd,
        }
    }

    /// Initial `h` and refresh schedule of the Hamiltonian methods.
    pub fn refresh(&self) -> Option<(f64, RefreshSchedule)> {
        match *self {
            Algorithm::Rhgd { h, schedule } | Algorithm::Rphd { h, schedule } => Some((h, schedule)),
            Algorithm::AdaRhgd { h0, schedule } => Some((h0, schedule)),
            _ => None,
        }
    }

    pub fn initial_stepsize(&self) -> f64 {
        match *self {
            Algorithm::Gd { eta } | Algorithm::Agd { eta, .. } | Algorithm::Cagd { eta, .. } => eta,
            Algorithm::Rhgd { h, .. } | Algorithm::Rphd { h, .. } => h,
            Algorithm::AdaGd { eta0 } | Algorithm::AdaAgd { eta0, .. } | Algorithm::AdaCagd { eta0, .. } => eta0,
            Algorithm::AdaRhgd { h0, .. } => h0,
        }
    }

    /// Starting state: zero velocity for the Hamiltonian methods, `y₀ = x₀`
    /// for AGD and `z₀ = x₀` for CAGD.
    pub fn init(&self, x0: &Vector) -> OptimizerState {
        let stepsize = self.initial_stepsize();
        match self {
            Algorithm::Agd { .. } | Algorithm::Cagd { .. } | Algorithm::AdaAgd { .. } | Algorithm::AdaCagd { .. } => {
                OptimizerState::new(x0.clone(), x0.clone(), stepsize)
            }
            _ => OptimizerState::at_rest(x0.clone(), stepsize),
        }
    }

    pub fn step(&self, obj: &dyn Objective, s: &mut OptimizerState, src: &mut RandomSource) -> Result<()> {
        match *self {
            Algorithm::Gd { eta } => gd_step(obj, s, eta),
            Algorithm::Agd { eta, alpha, momentum } => {
                let beta = agd_momentum(alpha, eta, s.k, momentum);
                agd_step(obj, s, eta, beta)
            }
            Algorithm::Cagd { eta, alpha } => cagd_step(obj, s, eta, alpha, src),
            Algorithm::Rhgd { h, ref schedule } => rhgd_step(obj, s, h, schedule, src),
            Algorithm::Rphd { h, ref schedule } => rphd_step(obj, s, h, schedule, src),
            Algorithm::AdaGd { .. } => ada_gd_step(obj, s),
            Algorithm::AdaAgd { alpha, momentum, .. } => ada_agd_step(obj, s, alpha, momentum),
            Algorithm::AdaCagd { alpha, .. } => ada_cagd_step(obj, s, alpha, src),
            Algorithm::AdaRhgd { ref schedule, .. } => ada_rhgd_step(obj, s, schedule, src),
        }
    }
}

/// Options for [`run_observed`].
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Record every `stride`-th iterate (0 is treated as 1).
    pub stride: usize,
    pub metadata: TraceMetadata,
}

/// `iterations` steps from `x0`, recording every iterate including `k = 0`.
pub fn run(
    obj: &dyn Objective,
    algorithm: &Algorithm,
    x0: &Vector,
    iterations: usize,
    src: &mut RandomSource,
) -> Result<RunTrace> {
    let metadata = TraceMetadata {
        algorithm: algorithm.name().as_str().to_string(),
        seed: src.seed(),
        ..Default::default()
    };
    run_observed(obj, algorithm, x0, iterations, src, RunOptions { stride: 1, metadata }, |_| {})
}

/// As [`run`], calling `observer` on the initial state and after every step.
pub fn run_observed(
    obj: &dyn Objective,
    algorithm: &Algorithm,
    x0: &Vector,
    iterations: usize,
    src: &mut RandomSource,
    options: RunOptions,
    mut observer: impl FnMut(&OptimizerState),
) -> Result<RunTrace> {
    check_dim(obj.dim(), x0.len())?;
    let mut trace = RunTrace::new(options.metadata, options.stride);
    let mut state = algorithm.init(x0);
    observer(&state);
    trace.push(snapshot(obj, &mut state)?);
    for _ in 0..iterations {
        algorithm.step(obj, &mut state, src)?;
        observer(&state);
        if trace.keeps(state.k, iterations) {
            trace.push(snapshot(obj, &mut state)?);
        }
    }
    Ok(trace)
}

fn snapshot(obj: &dyn Objective, s: &mut OptimizerState) -> Result<TraceRecord> {
    let f_star = obj.min_value().ok_or(crate::Error::MissingCapability("a known minimum value"))?;
    let f_gap = s.value(obj)? - f_star;
    let grad_norm = s.gradient(obj)?.norm();
    Ok(TraceRecord {
        k: s.k,
        f_gap,
        grad_norm,
        stepsize: s.stepsize,
        refreshed: s.refreshed,
        poisson_time: s.poisson_time,
        grad_evals: s.grad_evals,
        dist_sq: obj.dist_sq(&s.x),
    })
}
