use crate::error::Result;
use crate::problems::Objective;
use crate::Vector;

/// Iterate plus auxiliary sequence shared by every discrete method.
///
/// `y` is the velocity for RHGD/RPHD, the extrapolated point for AGD, and
/// `z` for CAGD.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub x: Vector,
    pub y: Vector,
    pub k: usize,
    /// Current `η` (or `h` for the Hamiltonian methods).
    pub stepsize: f64,
    /// `T_k` for CAGD, accumulated `Σ h` for RHGD-type methods, 0 otherwise.
    pub poisson_time: f64,
    /// Whether the last step reset the velocity.
    pub refreshed: bool,
    /// Whether the last adaptive trial step was accepted.
    pub accepted: bool,
    /// Gradient evaluations charged to the algorithm so far.
    pub grad_evals: u64,
    /// `x_{k+½}` of the last RHGD/RPHD step.
    pub midpoint: Option<Vector>,
    /// `ỹ_{k+1}` before the refresh decision of the last RHGD/RPHD step.
    pub velocity_before_refresh: Option<Vector>,
    grad: Option<(Vector, bool)>,
    value: Option<f64>,
}

impl OptimizerState {
    /// `(x0, y0 = 0)`.
    pub fn at_rest(x0: Vector, stepsize: f64) -> Self {
        let d = x0.len();
        Self::new(x0, Vector::zeros(d), stepsize)
    }

    pub fn new(x0: Vector, y0: Vector, stepsize: f64) -> Self {
        Self {
            x: x0,
            y: y0,
            k: 0,
            stepsize,
            poisson_time: 0.0,
            refreshed: false,
            accepted: true,
            grad_evals: 0,
            midpoint: None,
            velocity_before_refresh: None,
            grad: None,
            value: None,
        }
    }

    /// `∇f(x)` charged to the algorithm; reused if already paid for at this `x`.
    pub(crate) fn paid_gradient(&mut self, obj: &dyn Objective) -> Result<Vector> {
        match &mut self.grad {
            Some((g, paid)) => {
                if !*paid {
                    *paid = true;
                    self.grad_evals += 1;
                }
                Ok(g.clone())
            }
            None => {
                let g = obj.gradient(&self.x)?;
                self.grad_evals += 1;
                self.grad = Some((g.clone(), true));
                Ok(g)
            }
        }
    }

    /// `∇f(x)` for reporting; does not count as an algorithm evaluation.
    pub fn gradient(&mut self, obj: &dyn Objective) -> Result<Vector> {
        if let Some((g, _)) = &self.grad {
            return Ok(g.clone());
        }
        let g = obj.gradient(&self.x)?;
        self.grad = Some((g.clone(), false));
        Ok(g)
    }

    pub fn value(&mut self, obj: &dyn Objective) -> Result<f64> {
        if let Some(v) = self.value {
            return Ok(v);
        }
        let v = obj.value(&self.x)?;
        self.value = Some(v);
        Ok(v)
    }

    /// Moves the iterate, optionally with a gradient already paid for at the new point.
    pub(crate) fn move_to(&mut self, x: Vector, paid_grad: Option<Vector>, value: Option<f64>) {
        self.x = x;
        self.grad = paid_grad.map(|g| (g, true));
        self.value = value;
    }
}
