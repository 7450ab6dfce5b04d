use serde::{Deserialize, Serialize};

use super::{OptimizerState, RefreshSchedule};
use crate::error::{invalid, Result};
use crate::problems::Objective;
use crate::rng::RandomSource;
use crate::Vector;

/// How AGD treats the weakly convex momentum `(k−1)/(k+2)` at `k = 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentumMode {
    /// Use the formula as written, so `β₀ = −½`.
    #[default]
    Literal,
    /// Clamp negative momentum to zero.
    Clamp,
}

pub(crate) fn check_step(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {value}")))
    }
}

/// `x_{k+1} = x_k − η∇f(x_k)`.
pub fn gd_step(obj: &dyn Objective, s: &mut OptimizerState, eta: f64) -> Result<()> {
    check_step("eta", eta)?;
    let g = s.paid_gradient(obj)?;
    let x = &s.x - g * eta;
    s.move_to(x, None, None);
    s.stepsize = eta;
    s.refreshed = false;
    s.k += 1;
    Ok(())
}

/// `β_k = (1−√(αη))/(1+√(αη))` for `α > 0`, `(k−1)/(k+2)` for `α = 0`.
pub fn agd_momentum(alpha: f64, eta: f64, k: usize, mode: MomentumMode) -> f64 {
    if alpha > 0.0 {
        let r = (alpha * eta).sqrt();
        (1.0 - r) / (1.0 + r)
    } else {
        let beta = (k as f64 - 1.0) / (k as f64 + 2.0);
        match mode {
            MomentumMode::Literal => beta,
            MomentumMode::Clamp => beta.max(0.0),
        }
    }
}

/// `x_{k+1} = y_k − η∇f(y_k)`, `y_{k+1} = x_{k+1} + β(x_{k+1} − x_k)`.
pub fn agd_step(obj: &dyn Objective, s: &mut OptimizerState, eta: f64, beta: f64) -> Result<()> {
    check_step("eta", eta)?;
    let g = obj.gradient(&s.y)?;
    s.grad_evals += 1;
    let x_next = &s.y - g * eta;
    s.y = &x_next + (&x_next - &s.x) * beta;
    s.move_to(x_next, None, None);
    s.stepsize = eta;
    s.refreshed = false;
    s.k += 1;
    Ok(())
}

/// `θ_k`: `½(1 − e^{−2√(αη)τ})` for `α > 0`, `1 − (T_k/T_{k+1})²` for `α = 0`.
pub fn cagd_theta(alpha: f64, eta: f64, tau: f64, t: f64, t_next: f64) -> f64 {
    if alpha > 0.0 {
        0.5 * (1.0 - (-2.0 * (alpha * eta).sqrt() * tau).exp())
    } else {
        1.0 - (t / t_next).powi(2)
    }
}

/// `(θ'_k, η_k)`: `(tanh(√(αη)τ), √(η/α))` for `α > 0`, `(0, T_k η/2)` for `α = 0`.
pub fn cagd_mixing(alpha: f64, eta: f64, tau: f64, t: f64) -> (f64, f64) {
    if alpha > 0.0 {
        (((alpha * eta).sqrt() * tau).tanh(), (eta / alpha).sqrt())
    } else {
        (0.0, t * eta / 2.0)
    }
}

/// Continuized Nesterov step with `τ_k ~ Exp(1)`; `s.y` holds `z_k`.
pub fn cagd_step(
    obj: &dyn Objective,
    s: &mut OptimizerState,
    eta: f64,
    alpha: f64,
    src: &mut RandomSource,
) -> Result<()> {
    check_step("eta", eta)?;
    let tau = src.exponential(1.0)?;
    let t = s.poisson_time;
    let t_next = t + tau;
    let theta = cagd_theta(alpha, eta, tau, t, t_next);
    let (theta_z, eta_z) = cagd_mixing(alpha, eta, tau, t);
    let y = &s.x + (&s.y - &s.x) * theta;
    let g = obj.gradient(&y)?;
    s.grad_evals += 1;
    let x_next = &y - &g * eta;
    s.y = &s.y + (&y - &s.y) * theta_z - g * eta_z;
    s.move_to(x_next, None, None);
    s.poisson_time = t_next;
    s.stepsize = eta;
    s.refreshed = false;
    s.k += 1;
    Ok(())
}

/// `∇f(x_{k+½})`, reusing the paid gradient at `x_k` when `y_k = 0`
/// (then `x_{k+½} = x_k` exactly).
pub(crate) fn midpoint_gradient(
    obj: &dyn Objective,
    s: &mut OptimizerState,
    midpoint: &Vector,
) -> Result<Vector> {
    if s.y.iter().all(|&v| v == 0.0) {
        s.paid_gradient(obj)
    } else {
        s.grad_evals += 1;
        obj.gradient(midpoint)
    }
}

/// Velocity update and Bernoulli refresh shared by the Hamiltonian methods.
pub(crate) fn finish_hamiltonian_step(
    s: &mut OptimizerState,
    x_next: Vector,
    g_next: Vector,
    value_next: Option<f64>,
    midpoint: Vector,
    h: f64,
    probability: f64,
    src: &mut RandomSource,
) -> Result<()> {
    let y_tilde = &s.y - &g_next * h;
    let refresh = src.bernoulli(probability)?;
    s.y = if refresh { Vector::zeros(y_tilde.len()) } else { y_tilde.clone() };
    s.velocity_before_refresh = Some(y_tilde);
    s.midpoint = Some(midpoint);
    s.move_to(x_next, Some(g_next), value_next);
    s.refreshed = refresh;
    s.stepsize = h;
    s.poisson_time += h;
    s.k += 1;
    Ok(())
}

/// Drift `x_{k+½} = x_k + h y_k`, gradient step
/// `x_{k+1} = x_{k+½} − h²∇f(x_{k+½})`, kick `ỹ = y_k − h∇f(x_{k+1})`, and
/// refresh to zero with probability `min(γ_k h, 1)`.
pub fn rhgd_step(
    obj: &dyn Objective,
    s: &mut OptimizerState,
    h: f64,
    schedule: &RefreshSchedule,
    src: &mut RandomSource,
) -> Result<()> {
    check_step("h", h)?;
    let midpoint = &s.x + &s.y * h;
    let g_mid = midpoint_gradient(obj, s, &midpoint)?;
    let x_next = &midpoint - g_mid * (h * h);
    let g_next = obj.gradient(&x_next)?;
    s.grad_evals += 1;
    let p = schedule.probability(s.k, h);
    finish_hamiltonian_step(s, x_next, g_next, None, midpoint, h, p, src)
}

/// As [`rhgd_step`] with the exact implicit update `x_{k+1} = Prox_{h²f}(x_{k+½})`.
pub fn rphd_step(
    obj: &dyn Objective,
    s: &mut OptimizerState,
    h: f64,
    schedule: &RefreshSchedule,
    src: &mut RandomSource,
) -> Result<()> {
    check_step("h", h)?;
    let midpoint = &s.x + &s.y * h;
    let x_next = obj.prox(&midpoint, h * h)?;
    let g_next = obj.gradient(&x_next)?;
    s.grad_evals += 1;
    let p = schedule.probability(s.k, h);
    finish_hamiltonian_step(s, x_next, g_next, None, midpoint, h, p, src)
}
