//! Right-hand sides of the convergence guarantees.
//!
//! Discrete bounds take the iteration `k`; continuous-time bounds take the
//! accumulated time `t`. "initial" arguments are the Lyapunov value the
//! particular bound starts from.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive, got {v}")))
    }
}

/// RHGD, strongly convex: `initial·(1 + √α h/6)^{−k}` with
/// `initial = f(x₀) − f* + (α/72)‖x₀ − x*‖²`. Valid for `h ≤ 1/(4√L)`.
pub fn bound_rhgd_sc(k: usize, h: f64, alpha: f64, initial: f64) -> Result<f64> {
    positive("h", h)?;
    Ok(initial * (1.0 + alpha.sqrt() * h / 6.0).powf(-(k as f64)))
}

/// RHGD, weakly convex: `14‖x₀ − x*‖²/(h²(k+8)²)`. Valid for `h ≤ 1/(8√L)`.
pub fn bound_rhgd_wc(k: usize, h: f64, dist0_sq: f64) -> Result<f64> {
    positive("h", h)?;
    let m = k as f64 + 8.0;
    Ok(14.0 * dist0_sq / (h * h * m * m))
}

/// RPHD, strongly convex: same form as [`bound_rhgd_sc`], valid for `0 < h < 1/√α`.
pub fn bound_rphd_sc(k: usize, h: f64, alpha: f64, initial: f64) -> Result<f64> {
    bound_rhgd_sc(k, h, alpha, initial)
}

/// RPHD, weakly convex: `12‖x₀ − x*‖²/(h²k²)`; infinite at `k = 0`.
pub fn bound_rphd_wc(k: usize, h: f64, dist0_sq: f64) -> Result<f64> {
    positive("h", h)?;
    if k == 0 {
        return Ok(f64::INFINITY);
    }
    let k = k as f64;
    Ok(12.0 * dist0_sq / (h * h * k * k))
}

/// Randomized flow, strongly convex, `γ = √(16α/5)`:
/// `exp(−√(α/5)·t)·initial` with `initial = f(X₀) − f* + (α/10)‖X₀ − x*‖²`.
pub fn bound_rhf_sc(t: f64, alpha: f64, initial: f64) -> f64 {
    (-(alpha / 5.0).sqrt() * t).exp() * initial
}

/// Randomized flow, weakly convex, `γ(t) = 6/(t+1)`:
/// `5·initial/(t+1)²` with `initial = f(X₀) − f* + ‖X₀ − x*‖²`.
pub fn bound_rhf_wc(t: f64, initial: f64) -> f64 {
    5.0 * initial / ((t + 1.0) * (t + 1.0))
}

/// Flow with resets at fixed time `h ≤ 1/√L`, strongly convex:
/// `(1 − αh²/2)^k·(f(x₀) − f*)`.
pub fn bound_hfopt(k: usize, h: f64, alpha: f64, initial_gap: f64) -> Result<f64> {
    positive("h", h)?;
    Ok((1.0 - 0.5 * alpha * h * h).powi(k as i32) * initial_gap)
}

/// Flow with resets, weakly convex: `34‖x₀ − x*‖²/(h²k)`; infinite at `k = 0`.
pub fn bound_hfopt_wc(k: usize, h: f64, dist0_sq: f64) -> Result<f64> {
    positive("h", h)?;
    if k == 0 {
        return Ok(f64::INFINITY);
    }
    Ok(34.0 * dist0_sq / (h * h * k as f64))
}

/// Quadratic with resets every `h ≤ 1/(2√L)`: `(1 − αh²/2)^k‖x₀ − x*‖²`.
pub fn bound_example21(k: usize, h: f64, alpha: f64, dist0_sq: f64) -> Result<f64> {
    positive("h", h)?;
    Ok((1.0 - 0.5 * alpha * h * h).powi(k as i32) * dist0_sq)
}

/// Quadratic with `τ ~ Exp(γ)`: `(1 − 2α/(γ² + 4α))^k·‖x₀ − x*‖²` in expectation.
pub fn bound_example31(k: usize, gamma: f64, alpha: f64, dist0_sq: f64) -> Result<f64> {
    positive("gamma", gamma)?;
    Ok((1.0 - 2.0 * alpha / (gamma * gamma + 4.0 * alpha)).powi(k as i32) * dist0_sq)
}

/// GD, strongly convex, `η ≤ 1/L`: `(1 − αη)^k·(f(x₀) − f*)`.
pub fn bound_gd_sc(k: usize, eta: f64, alpha: f64, initial_gap: f64) -> Result<f64> {
    positive("eta", eta)?;
    Ok((1.0 - alpha * eta).powi(k as i32) * initial_gap)
}

/// GD, weakly convex: `‖x₀ − x*‖²/(2ηk)`.
pub fn bound_gd_wc(k: usize, eta: f64, dist0_sq: f64) -> Result<f64> {
    positive("eta", eta)?;
    if k == 0 {
        return Ok(f64::INFINITY);
    }
    Ok(dist0_sq / (2.0 * eta * k as f64))
}

/// AGD, strongly convex: `(1 − √(αη))^k·(f(x₀) − f* + (α/2)‖x₀ − x*‖²)`.
pub fn bound_agd_sc(k: usize, eta: f64, alpha: f64, initial: f64) -> Result<f64> {
    positive("eta", eta)?;
    Ok((1.0 - (alpha * eta).sqrt()).powi(k as i32) * initial)
}

/// AGD, weakly convex: `2‖x₀ − x*‖²/(ηk²)`.
pub fn bound_agd_wc(k: usize, eta: f64, dist0_sq: f64) -> Result<f64> {
    positive("eta", eta)?;
    if k == 0 {
        return Ok(f64::INFINITY);
    }
    let k = k as f64;
    Ok(2.0 * dist0_sq / (eta * k * k))
}

/// Iteration count sufficient for ε-accuracy in the strongly convex case
/// with `h = 1/(4√L)`: `(24√κ + 1)·log(initial/ε)`.
pub fn corollary_rhgd_sc_iterations(kappa: f64, initial: f64, eps: f64) -> f64 {
    (24.0 * kappa.sqrt() + 1.0) * (initial / eps).ln()
}

/// Iteration count sufficient in the weakly convex case with
/// `h = 1/(8√L)`: `√(896·L·‖x₀ − x*‖²/ε)`.
pub fn corollary_rhgd_wc_iterations(smoothness: f64, dist0_sq: f64, eps: f64) -> f64 {
    (896.0 * smoothness * dist0_sq / eps).sqrt()
}

/// Smallest `k ≤ max_k` with `bound(k) ≤ eps`, for a non-increasing bound.
pub fn first_iteration_below(bound: impl Fn(usize) -> f64, eps: f64, max_k: usize) -> Option<usize> {
    if bound(max_k) > eps {
        return None;
    }
    let (mut lo, mut hi) = (0usize, max_k);
    if bound(0) <= eps {
        return Some(0);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if bound(mid) <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// A bound curve with its parameters bound in, evaluated at `k` (or `t`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundCurve {
    RhgdSc { h: f64, alpha: f64, initial: f64 },
    RhgdWc { h: f64, dist0_sq: f64 },
    RphdWc { h: f64, dist0_sq: f64 },
    RhfSc { alpha: f64, initial: f64 },
    RhfWc { initial: f64 },
    HfOpt { h: f64, alpha: f64, initial_gap: f64 },
    HfOptWc { h: f64, dist0_sq: f64 },
    Example21 { h: f64, alpha: f64, dist0_sq: f64 },
    Example31 { gamma: f64, alpha: f64, dist0_sq: f64 },
    GdSc { eta: f64, alpha: f64, initial_gap: f64 },
    GdWc { eta: f64, dist0_sq: f64 },
    AgdSc { eta: f64, alpha: f64, initial: f64 },
    AgdWc { eta: f64, dist0_sq: f64 },
}

impl BoundCurve {
    /// Value at iteration `k`; continuous-time curves read `k` as `t`.
    pub fn at(&self, k: usize) -> Result<f64> {
        self.at_time(k as f64, k)
    }

    fn at_time(&self, t: f64, k: usize) -> Result<f64> {
        match *self {
            BoundCurve::RhgdSc { h, alpha, initial } => bound_rhgd_sc(k, h, alpha, initial),
            BoundCurve::RhgdWc { h, dist0_sq } => bound_rhgd_wc(k, h, dist0_sq),
            BoundCurve::RphdWc { h, dist0_sq } => bound_rphd_wc(k, h, dist0_sq),
            BoundCurve::RhfSc { alpha, initial } => Ok(bound_rhf_sc(t, alpha, initial)),
            BoundCurve::RhfWc { initial } => Ok(bound_rhf_wc(t, initial)),
            BoundCurve::HfOpt { h, alpha, initial_gap } => bound_hfopt(k, h, alpha, initial_gap),
            BoundCurve::HfOptWc { h, dist0_sq } => bound_hfopt_wc(k, h, dist0_sq),
            BoundCurve::Example21 { h, alpha, dist0_sq } => bound_example21(k, h, alpha, dist0_sq),
            BoundCurve::Example31 { gamma, alpha, dist0_sq } => {
                bound_example31(k, gamma, alpha, dist0_sq)
            }
            BoundCurve::GdSc { eta, alpha, initial_gap } => bound_gd_sc(k, eta, alpha, initial_gap),
            BoundCurve::GdWc { eta, dist0_sq } => bound_gd_wc(k, eta, dist0_sq),
            BoundCurve::AgdSc { eta, alpha, initial } => bound_agd_sc(k, eta, alpha, initial),
            BoundCurve::AgdWc { eta, dist0_sq } => bound_agd_wc(k, eta, dist0_sq),
        }
    }

    /// Continuous-time evaluation for the flow bounds.
    pub fn at_t(&self, t: f64) -> Result<f64> {
        self.at_time(t, t.max(0.0).floor() as usize)
    }
}
