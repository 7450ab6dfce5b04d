//! Line-search variants: a trial step is accepted when it achieves the
//! sufficient decrease `f(x̃) ≤ f(base) − (η/2)‖∇f(base)‖²`; the stepsize then
//! grows by 1.1, otherwise the iterate stays put and the stepsize shrinks by 0.6.
//! RHGD scales `h` by the square roots so that `h²` follows the same rule.

use super::steps::{agd_momentum, cagd_mixing, cagd_theta, finish_hamiltonian_step, midpoint_gradient};
use super::{MomentumMode, OptimizerState, RefreshSchedule};
use crate::error::Result;
use crate::problems::Objective;
use crate::rng::RandomSource;
use crate::Vector;

pub const GROW: f64 = 1.1;
pub const SHRINK: f64 = 0.6;
/// Guard rails for the adaptive stepsize.
pub const MIN_STEPSIZE: f64 = 1e-12;
pub const MAX_STEPSIZE: f64 = 1e6;

fn next_stepsize(current: f64, accepted: bool, grow: f64, shrink: f64) -> f64 {
    let next = if accepted { current * grow } else { current * shrink };
    next.clamp(MIN_STEPSIZE, MAX_STEPSIZE)
}

fn sufficient_decrease(trial: f64, base: f64, eta: f64, grad: &Vector) -> bool {
    trial <= base - 0.5 * eta * grad.norm_squared()
}

/// Adaptive gradient descent.
pub fn ada_gd_step(obj: &dyn Objective, s: &mut OptimizerState) -> Result<()> {
    let eta = s.stepsize;
    let g = s.paid_gradient(obj)?;
    let fx = s.value(obj)?;
    let trial = &s.x - &g * eta;
    let f_trial = obj.value(&trial)?;
    let accepted = sufficient_decrease(f_trial, fx, eta, &g);
    if accepted {
        s.move_to(trial, None, Some(f_trial));
    }
    s.accepted = accepted;
    s.stepsize = next_stepsize(eta, accepted, GROW, SHRINK);
    s.refreshed = false;
    s.k += 1;
    Ok(())
}

/// Adaptive Nesterov AGD; `β_k` is computed with the updated stepsize.
pub fn ada_agd_step(
    obj: &dyn Objective,
    s: &mut OptimizerState,
    alpha: f64,
    mode: MomentumMode,
) -> Result<()> {
    let eta = s.stepsize;
    let g = obj.gradient(&s.y)?;
    s.grad_evals += 1;
    let f_base = obj.value(&s.y)?;
    let trial = &s.y - &g * eta;
    let f_trial = obj.value(&trial)?;
    let accepted = sufficient_decrease(f_trial, f_base, eta, &g);
    let eta_next = next_stepsize(eta, accepted, GROW, SHRINK);
    let beta = agd_momentum(alpha, eta_next, s.k, mode);
    let x_next = if accepted { trial } else { s.x.clone() };
    s.y = &x_next + (&x_next - &s.x) * beta;
    if accepted {
        s.move_to(x_next, None, Some(f_trial));
    }
    s.accepted = accepted;
    s.stepsize = eta_next;
    s.refreshed = false;
    s.k += 1;
    Ok(())
}

/// Adaptive continuized AGD: `θ_k` uses `η_k`, while `θ'_k` and the `z`
/// stepsize use the updated `η_{k+1}`.
pub fn ada_cagd_step(
    obj: &dyn Objective,
    s: &mut OptimizerState,
    alpha: f64,
    src: &mut RandomSource,
) -> Result<()> {
    let eta = s.stepsize;
    let tau = src.exponential(1.0)?;
    let t = s.poisson_time;
    let t_next = t + tau;
    let theta = cagd_theta(alpha, eta, tau, t, t_next);
    let y = &s.x + (&s.y - &s.x) * theta;
    let g = obj.gradient(&y)?;
    s.grad_evals += 1;
    let f_base = obj.value(&y)?;
    let trial = &y - &g * eta;
    let f_trial = obj.value(&trial)?;
    let accepted = sufficient_decrease(f_trial, f_base, eta, &g);
    let eta_next = next_stepsize(eta, accepted, GROW, SHRINK);
    let (theta_z, eta_z) = cagd_mixing(alpha, eta_next, tau, t);
    s.y = &s.y + (&y - &s.y) * theta_z - g * eta_z;
    if accepted {
        s.move_to(trial, None, Some(f_trial));
    }
    s.accepted = accepted;
    s.poisson_time = t_next;
    s.stepsize = eta_next;
    s.refreshed = false;
    s.k += 1;
    Ok(())
}

/// Adaptive RHGD. The kick and the refresh probability use `h_{k+1}`; a
/// rejected trial keeps `x_{k+1} = x_k`.
pub fn ada_rhgd_step(
    obj: &dyn Objective,
    s: &mut OptimizerState,
    schedule: &RefreshSchedule,
    src: &mut RandomSource,
) -> Result<()> {
    let h = s.stepsize;
    let midpoint = &s.x + &s.y * h;
    let g_mid = midpoint_gradient(obj, s, &midpoint)?;
    let f_mid = obj.value(&midpoint)?;
    let trial = &midpoint - &g_mid * (h * h);
    let f_trial = obj.value(&trial)?;
    let accepted = sufficient_decrease(f_trial, f_mid, h * h, &g_mid);
    let h_next = next_stepsize(h, accepted, GROW.sqrt(), SHRINK.sqrt());
    let (x_next, g_next, f_next) = if accepted {
        let g = obj.gradient(&trial)?;
        s.grad_evals += 1;
        (trial, g, Some(f_trial))
    } else {
        (s.x.clone(), s.paid_gradient(obj)?, s.value(obj).ok())
    };
    let p = schedule.probability(s.k, h_next);
    s.accepted = accepted;
    finish_hamiltonian_step(s, x_next, g_next, f_next, midpoint, h_next, p, src)
}
