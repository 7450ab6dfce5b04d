//! Pathwise Lyapunov functions; expectations are taken by the caller.

use crate::error::{invalid, Error, Result};
use crate::problems::Objective;
use crate::Vector;

fn minimizer(obj: &dyn Objective) -> Result<&Vector> {
    obj.minimizer().ok_or(Error::MissingCapability("a known minimizer"))
}

/// `f(x) − f* + (α/72)‖x − x* + (6/√α)·y‖²`.
pub fn lyapunov_sc(obj: &dyn Objective, x: &Vector, y: &Vector, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(invalid("alpha", "the strongly convex Lyapunov function needs alpha > 0"));
    }
    let x_star = minimizer(obj)?;
    let shifted = x - x_star + y * (6.0 / alpha.sqrt());
    Ok(obj.gap(x)? + alpha / 72.0 * shifted.norm_squared())
}

/// `(h²(k+8)²/9)(f(x) − f*) + ½‖x − x* + ((k+8)h/3)·y‖² + (3/4)‖x − x*‖²`.
pub fn lyapunov_wc(obj: &dyn Objective, x: &Vector, y: &Vector, k: usize, h: f64) -> Result<f64> {
    let x_star = minimizer(obj)?;
    let m = (k as f64 + 8.0) * h;
    let offset = x - x_star;
    let shifted = &offset + y * (m / 3.0);
    Ok(m * m / 9.0 * obj.gap(x)? + 0.5 * shifted.norm_squared() + 0.75 * offset.norm_squared())
}

/// Per-step growth allowance of the weakly convex Lyapunov function:
/// `(k+9)²/((k+8)(k+10))`.
pub fn lyapunov_wc_ratio_bound(k: usize) -> f64 {
    let k = k as f64;
    (k + 9.0).powi(2) / ((k + 8.0) * (k + 10.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_quadratic;
    use crate::rng::RandomSource;

    #[test]
    fn zero_at_optimum_positive_elsewhere() {
        let q = make_quadratic(6, 0.3, 4.0, 2).unwrap();
        let zero = Vector::zeros(6);
        assert_eq!(lyapunov_sc(&q, &zero, &zero, 0.3).unwrap(), 0.0);
        assert_eq!(lyapunov_wc(&q, &zero, &zero, 5, 0.1).unwrap(), 0.0);
        let mut src = RandomSource::new(1, 2);
        for _ in 0..100 {
            let (x, y) = (src.normal_vector(6), src.normal_vector(6));
            assert!(lyapunov_sc(&q, &x, &y, 0.3).unwrap() > 0.0);
            assert!(lyapunov_wc(&q, &x, &y, 3, 0.1).unwrap() > 0.0);
        }
        assert!(lyapunov_sc(&q, &zero, &zero, 0.0).is_err());
    }

    #[test]
    fn initial_values() {
        let q = make_quadratic(4, 0.5, 2.0, 9).unwrap();
        let x = Vector::from_vec(vec![1.0, -1.0, 2.0, 0.5]);
        let y = Vector::zeros(4);
        let gap = q.gap(&x).unwrap();
        let d = x.norm_squared();
        let sc = lyapunov_sc(&q, &x, &y, 0.5).unwrap();
        assert!((sc - (gap + 0.5 / 72.0 * d)).abs() < 1e-14);
        let h = 0.3;
        let wc = lyapunov_wc(&q, &x, &y, 0, h).unwrap();
        assert!((wc - (64.0 * h * h / 9.0 * gap + 1.25 * d)).abs() < 1e-13);
        assert!((lyapunov_wc_ratio_bound(0) - 81.0 / 80.0).abs() < 1e-15);
    }
}
