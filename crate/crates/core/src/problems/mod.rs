//! Objective oracles and their seeded generators.

mod logistic;
mod quadratic;

pub use logistic::{label_from_margin, make_logistic, Logistic, LogisticData};
pub use quadratic::{make_quadratic, Quadratic, QuadraticSpectrum};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capabilities {
    pub has_exact_flow: bool,
    pub has_exact_prox: bool,
}

/// Value/gradient oracle with declared smoothness `L` and convexity `α`.
///
/// Implementations are immutable after construction and may be shared
/// between threads.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    /// Declared upper bound on the Lipschitz constant of the gradient.
    fn smoothness(&self) -> f64;

    /// Declared strong-convexity constant; zero for weakly convex objectives.
    fn convexity(&self) -> f64;

    fn minimizer(&self) -> Option<&Vector>;

    fn min_value(&self) -> Option<f64>;

    fn value(&self, x: &Vector) -> Result<f64>;

    fn gradient(&self, x: &Vector) -> Result<Vector>;

    /// Eigen-decomposition, present only for quadratics.
    fn spectrum(&self) -> Option<&QuadraticSpectrum> {
        None
    }

    /// `argmin_y f(y) + ‖y − center‖²/(2·weight)`.
    fn prox(&self, _center: &Vector, _weight: f64) -> Result<Vector> {
        Err(Error::MissingCapability("a proximal map"))
    }

    fn capabilities(&self) -> Capabilities;

    /// `f(x) − f*`, when the minimum value is known.
    fn gap(&self, x: &Vector) -> Result<f64> {
        let f_star = self
            .min_value()
            .ok_or(Error::MissingCapability("a known minimum value"))?;
        Ok(self.value(x)? - f_star)
    }

    /// `‖x − x*‖²`, when a minimizer is known.
    fn dist_sq(&self, x: &Vector) -> Option<f64> {
        self.minimizer().map(|m| (x - m).norm_squared())
    }
}

/// A generated problem instance of either family.
#[derive(Debug, Clone)]
pub enum Problem {
    Quadratic(Quadratic),
    Logistic(Logistic),
}

impl Problem {
    pub fn descriptor(&self) -> ProblemDescriptor {
        match self {
            Problem::Quadratic(q) => q.descriptor(),
            Problem::Logistic(l) => l.descriptor(),
        }
    }

    fn inner(&self) -> &dyn Objective {
        match self {
            Problem::Quadratic(q) => q,
            Problem::Logistic(l) => l,
        }
    }
}

impl Objective for Problem {
    fn dim(&self) -> usize {
        self.inner().dim()
    }
    fn smoothness(&self) -> f64 {
        self.inner().smoothness()
    }
    fn convexity(&self) -> f64 {
        self.inner().convexity()
    }
    fn minimizer(&self) -> Option<&Vector> {
        self.inner().minimizer()
    }
    fn min_value(&self) -> Option<f64> {
        self.inner().min_value()
    }
    fn value(&self, x: &Vector) -> Result<f64> {
        self.inner().value(x)
    }
    fn gradient(&self, x: &Vector) -> Result<Vector> {
        self.inner().gradient(x)
    }
    fn spectrum(&self) -> Option<&QuadraticSpectrum> {
        self.inner().spectrum()
    }
    fn prox(&self, center: &Vector, weight: f64) -> Result<Vector> {
        self.inner().prox(center, weight)
    }
    fn capabilities(&self) -> Capabilities {
        self.inner().capabilities()
    }
}

/// JSON form of a problem instance: enough to regenerate it bit-identically.
/// Raw matrices are never serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemDescriptor {
    Quadratic {
        dim: usize,
        alpha: f64,
        #[serde(rename = "L")]
        smoothness: f64,
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eigenvalues: Option<Vec<f64>>,
    },
    Logistic {
        dim: usize,
        n: usize,
        alpha: f64,
        noise: f64,
        #[serde(rename = "L")]
        smoothness: f64,
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        data_checksum: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        f_star: Option<f64>,
    },
}

impl ProblemDescriptor {
    /// Rebuild the instance, checking any recorded spectrum or checksum.
    pub fn regenerate(&self) -> Result<Problem> {
        match self {
            ProblemDescriptor::Quadratic { dim, alpha, smoothness, seed, eigenvalues } => {
                let q = make_quadratic(*dim, *alpha, *smoothness, *seed)?;
                if let Some(expected) = eigenvalues {
                    if expected.as_slice() != q.spectrum_ref().eigenvalues.as_slice() {
                        return Err(Error::Config {
                            path: "eigenvalues".into(),
                            reason: "recorded spectrum does not match regenerated instance".into(),
                        });
                    }
                }
                Ok(Problem::Quadratic(q))
            }
            ProblemDescriptor::Logistic { dim, n, alpha, noise, seed, data_checksum, .. } => {
                let l = make_logistic(*dim, *n, *alpha, *noise, *seed)?;
                if let Some(expected) = data_checksum {
                    if *expected != l.data_checksum() {
                        return Err(Error::Config {
                            path: "data_checksum".into(),
                            reason: "recorded checksum does not match regenerated data".into(),
                        });
                    }
                }
                Ok(Problem::Logistic(l))
            }
        }
    }
}
