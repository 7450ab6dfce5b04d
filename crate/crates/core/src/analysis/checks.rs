//! Monte Carlo and pathwise checks of the approximation inequalities.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::problems::Objective;
use crate::rng::RandomSource;
use crate::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub empirical: f64,
    pub exact: f64,
    pub z_score: f64,
}

/// `E[cos²(√σ τ)] = 1 − 2σ/(γ² + 4σ)` for `τ ~ Exp(γ)`.
pub fn cos_moment_exact(sigma: f64, gamma: f64) -> f64 {
    1.0 - 2.0 * sigma / (gamma * gamma + 4.0 * sigma)
}

/// Sample mean of `cos²(√σ τ)` against the closed form, with a z-score
/// from the sample standard error.
pub fn check_cos_moment(
    sigma: f64,
    gamma: f64,
    samples: usize,
    src: &mut RandomSource,
) -> Result<MomentCheck> {
    if samples == 0 {
        return Err(invalid("samples", "need at least one sample"));
    }
    if !(sigma >= 0.0) {
        return Err(invalid("sigma", format!("must be nonnegative, got {sigma}")));
    }
    let omega = sigma.sqrt();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let c = (omega * src.exponential(gamma)?).cos().powi(2);
        sum += c;
        sum_sq += c * c;
    }
    let n = samples as f64;
    let empirical = sum / n;
    let variance = if samples > 1 { ((sum_sq - n * empirical * empirical) / (n - 1.0)).max(0.0) } else { 0.0 };
    let exact = cos_moment_exact(sigma, gamma);
    let se = (variance / n).sqrt();
    let z_score = if se > 0.0 {
        (empirical - exact) / se
    } else if empirical == exact {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(MomentCheck { empirical, exact, z_score })
}

/// One recorded RHGD transition `x_{k+½} ↦ x_{k+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxStep {
    pub midpoint: Vector,
    pub next: Vector,
}

const RHS_FLOOR: f64 = 1e-300;

/// Largest `‖x_{k+1} − x̂_{k+1}‖² / (4L²h⁸‖∇f(x_{k+1})‖²)` over the steps,
/// where `x̂_{k+1} = Prox_{h²f}(x_{k+½})`. Steps at a stationary point are skipped.
pub fn check_prox_error(obj: &dyn Objective, steps: &[ProxStep], h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(invalid("h", format!("must be positive, got {h}")));
    }
    let smoothness = obj.smoothness();
    let mut worst: f64 = 0.0;
    for step in steps {
        let g = obj.gradient(&step.next)?;
        if g.iter().all(|&v| v == 0.0) {
            continue;
        }
        let exact = obj.prox(&step.midpoint, h * h)?;
        let lhs = (&step.next - &exact).norm_squared();
        let rhs = (4.0 * smoothness * smoothness * h.powi(8) * g.norm_squared()).max(RHS_FLOOR);
        worst = worst.max(lhs / rhs);
    }
    Ok(worst)
}

/// Largest `‖G‖² / (2(1 + L²h⁴)‖x_{k+1} − x̂_{k+1}‖²)` with
/// `G = x_{k+1} − x̂_{k+1} + h(ŷ − ỹ)`, `ŷ = y_k − h∇f(x̂_{k+1})`,
/// `ỹ = y_k − h∇f(x_{k+1})`. Steps with `x_{k+1} = x̂_{k+1}` are skipped.
pub fn check_composite_error(obj: &dyn Objective, steps: &[ProxStep], h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(invalid("h", format!("must be positive, got {h}")));
    }
    let smoothness = obj.smoothness();
    let factor = 2.0 * (1.0 + smoothness * smoothness * h.powi(4));
    let mut worst: f64 = 0.0;
    for step in steps {
        let exact = obj.prox(&step.midpoint, h * h)?;
        let diff = &step.next - &exact;
        let d = diff.norm_squared();
        if d == 0.0 {
            continue;
        }
        // h(ŷ − ỹ) = h²(∇f(x_{k+1}) − ∇f(x̂_{k+1})); y_k cancels.
        let g = diff + (obj.gradient(&step.next)? - obj.gradient(&exact)?) * (h * h);
        worst = worst.max(g.norm_squared() / (factor * d).max(RHS_FLOOR));
    }
    Ok(worst)
}
