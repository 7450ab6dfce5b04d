//! Hamiltonian flow `ẋ = y, ẏ = −∇f(x)`: exact quadratic solution, leapfrog,
//! and the idealised optimizers that alternate flow segments with velocity
//! resets.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::problems::{Objective, QuadraticSpectrum};
use crate::rng::RandomSource;
use crate::trace::{RunTrace, TraceMetadata, TraceRecord};
use crate::Vector;

/// Relative threshold below which an eigenvalue is treated as a free-particle mode.
pub const ZERO_MODE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub position: Vector,
    pub velocity: Vector,
}

impl PhasePoint {
    pub fn new(position: Vector, velocity: Vector) -> Result<Self> {
        check_dim(position.len(), velocity.len())?;
        Ok(Self { position, velocity })
    }

    /// `(x, 0)`.
    pub fn at_rest(position: Vector) -> Self {
        let d = position.len();
        Self { position, velocity: Vector::zeros(d) }
    }

    pub fn dim(&self) -> usize {
        self.position.len()
    }
}

/// Refresh intensity `γ(t)` for the randomized flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateFunction {
    Constant { gamma: f64 },
    /// `γ(t) = numerator / (t + offset)`.
    InverseTime { numerator: f64, offset: f64 },
}

impl RateFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RateFunction::Constant { gamma } if gamma > 0.0 && gamma.is_finite() => Ok(()),
            RateFunction::Constant { gamma } => {
                Err(invalid("gamma", format!("must be positive, got {gamma}")))
            }
            RateFunction::InverseTime { numerator, offset }
                if numerator > 0.0 && offset > 0.0 && numerator.is_finite() =>
            {
                Ok(())
            }
            RateFunction::InverseTime { .. } => {
                Err(invalid("rate", "inverse-time rate needs positive numerator and offset"))
            }
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        match *self {
            RateFunction::Constant { gamma } => gamma,
            RateFunction::InverseTime { numerator, offset } => numerator / (t + offset),
        }
    }
}

/// `H(x, y) = f(x) + ½‖y‖²`.
pub fn energy(obj: &dyn Objective, p: &PhasePoint) -> Result<f64> {
    check_dim(p.position.len(), p.velocity.len())?;
    Ok(obj.value(&p.position)? + 0.5 * p.velocity.norm_squared())
}

/// `sin(u)/u`, continuous at zero.
fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// Advances eigenbasis coordinates `(x̃, ỹ)` by time `t` in place.
///
/// Mode `j` with `σ = λ_j` follows `x̃ cos(√σ t) + ỹ t·sinc(√σ t)`,
/// `−x̃ √σ sin(√σ t) + ỹ cos(√σ t)`; modes with `σ ≤ tol·L` move freely.
pub fn flow_eigen_coords(eigenvalues: &Vector, xs: &mut Vector, ys: &mut Vector, t: f64) {
    let largest = eigenvalues.iter().cloned().fold(0.0, f64::max);
    let tol = ZERO_MODE_TOL * largest.max(f64::MIN_POSITIVE);
    for j in 0..eigenvalues.len() {
        let sigma = eigenvalues[j];
        let (x, y) = (xs[j], ys[j]);
        if sigma <= tol {
            xs[j] = x + y * t;
        } else {
            let omega = sigma.sqrt();
            let (s, c) = (omega * t).sin_cos();
            xs[j] = x * c + y * t * sinc(omega * t);
            ys[j] = -x * omega * s + y * c;
        }
    }
}

/// Exact solution of the flow for `f(x) = ½xᵀAx` after time `t ≥ 0`.
pub fn exact_flow_quadratic(spec: &QuadraticSpectrum, p: &PhasePoint, t: f64) -> Result<PhasePoint> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid("t", format!("flow time must be finite and nonnegative, got {t}")));
    }
    check_dim(spec.dim(), p.position.len())?;
    check_dim(spec.dim(), p.velocity.len())?;
    let mut xs = spec.to_eigen(&p.position);
    let mut ys = spec.to_eigen(&p.velocity);
    flow_eigen_coords(&spec.eigenvalues, &mut xs, &mut ys, t);
    Ok(PhasePoint { position: spec.from_eigen(&xs), velocity: spec.from_eigen(&ys) })
}

/// One kick-drift-kick step of size `h`.
pub fn leapfrog_step(obj: &dyn Objective, p: &PhasePoint, h: f64) -> Result<PhasePoint> {
    if !(h > 0.0) {
        return Err(invalid("h", format!("must be positive, got {h}")));
    }
    let half = &p.velocity - obj.gradient(&p.position)? * (0.5 * h);
    let position = &p.position + &half * h;
    let velocity = &half - obj.gradient(&position)? * (0.5 * h);
    Ok(PhasePoint { position, velocity })
}

fn require_flow(obj: &dyn Objective) -> Result<&QuadraticSpectrum> {
    obj.spectrum().ok_or(Error::MissingCapability("exact Hamiltonian flow"))
}

fn record(
    obj: &dyn Objective,
    x: &Vector,
    k: usize,
    stepsize: f64,
    refreshed: bool,
    clock: f64,
) -> Result<TraceRecord> {
    Ok(TraceRecord {
        k,
        f_gap: obj.gap(x)?,
        grad_norm: obj.gradient(x)?.norm(),
        stepsize,
        refreshed,
        poisson_time: clock,
        grad_evals: 0,
        dist_sq: obj.dist_sq(x),
    })
}

/// Flow from `(x_k, 0)` for time `times(k)` and keep the position.
///
/// The stepsize column holds the segment length that produced each iterate.
pub fn hf_opt(
    obj: &dyn Objective,
    x0: &Vector,
    times: impl Fn(usize) -> f64,
    iterations: usize,
) -> Result<RunTrace> {
    let spec = require_flow(obj)?;
    check_dim(spec.dim(), x0.len())?;
    let meta = TraceMetadata { algorithm: "hf_opt".into(), ..Default::default() };
    let mut trace = RunTrace::new(meta, 1);
    let mut xs = spec.to_eigen(x0);
    let mut x = x0.clone();
    let mut clock = 0.0;
    trace.push(record(obj, &x, 0, 0.0, false, clock)?);
    for k in 0..iterations {
        let eta = times(k);
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(invalid("times", format!("segment {k} has nonpositive length {eta}")));
        }
        let mut ys = Vector::zeros(xs.len());
        flow_eigen_coords(&spec.eigenvalues, &mut xs, &mut ys, eta);
        x = spec.from_eigen(&xs);
        clock += eta;
        trace.push(record(obj, &x, k + 1, eta, true, clock)?);
    }
    Ok(trace)
}

/// Flow segments of length `τ_k ~ Exp(γ(T_k))`, velocity zeroed between
/// segments. The rate is frozen at the segment start.
pub fn rhf_opt(
    obj: &dyn Objective,
    x0: &Vector,
    rate: RateFunction,
    iterations: usize,
    src: &mut RandomSource,
) -> Result<RunTrace> {
    rate.validate()?;
    let spec = require_flow(obj)?;
    check_dim(spec.dim(), x0.len())?;
    let meta =
        TraceMetadata { algorithm: "rhf_opt".into(), seed: src.seed(), ..Default::default() };
    let mut trace = RunTrace::new(meta, 1);
    let mut xs = spec.to_eigen(x0);
    let mut x = x0.clone();
    let mut clock = 0.0;
    trace.push(record(obj, &x, 0, 0.0, false, clock)?);
    for k in 0..iterations {
        let tau = src.exponential(rate.at(clock))?;
        let mut ys = Vector::zeros(xs.len());
        flow_eigen_coords(&spec.eigenvalues, &mut xs, &mut ys, tau);
        x = spec.from_eigen(&xs);
        clock += tau;
        trace.push(record(obj, &x, k + 1, tau, true, clock)?);
    }
    Ok(trace)
}

/// Positions of the randomized flow process at the given increasing times.
///
/// Between refresh events the process follows the exact flow started at rest,
/// so the state at an arbitrary time is the flow evaluated inside the
/// current segment. Draws the same `τ_k` sequence as [`rhf_opt`].
pub fn rhf_positions_at(
    spec: &QuadraticSpectrum,
    x0: &Vector,
    rate: RateFunction,
    times: &[f64],
    src: &mut RandomSource,
) -> Result<Vec<Vector>> {
    rate.validate()?;
    check_dim(spec.dim(), x0.len())?;
    if times.windows(2).any(|w| w[0] > w[1]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(invalid("times", "must be nonnegative and nondecreasing"));
    }
    let d = spec.dim();
    let mut start = spec.to_eigen(x0);
    let mut segment_start = 0.0;
    let mut tau = src.exponential(rate.at(0.0))?;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        while t > segment_start + tau {
            let mut ys = Vector::zeros(d);
            flow_eigen_coords(&spec.eigenvalues, &mut start, &mut ys, tau);
            segment_start += tau;
            tau = src.exponential(rate.at(segment_start))?;
        }
        let mut xs = start.clone();
        let mut ys = Vector::zeros(d);
        flow_eigen_coords(&spec.eigenvalues, &mut xs, &mut ys, t - segment_start);
        out.push(spec.from_eigen(&xs));
    }
    Ok(out)
}
