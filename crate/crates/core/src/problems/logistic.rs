use sha2::{Digest, Sha256};

use super::{Capabilities, Objective, ProblemDescriptor};
use crate::error::{check_dim, invalid, Error, Result};
use crate::rng::RandomSource;
use crate::{Matrix, Vector};

const POWER_ITERATIONS: usize = 100;
const PROX_TOLERANCE: f64 = 1e-12;
const PROX_MAX_ITER: usize = 200;
const REFERENCE_TOLERANCE: f64 = 1e-10;
const REFERENCE_MAX_ITER: usize = 200;

/// Design matrix, ±1 labels, and the ridge weight.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticData {
    /// `n × d`, one example per row.
    pub features: Matrix,
    pub labels: Vector,
    pub ridge: f64,
}

/// `f(x) = (1/n) Σ log(1 + exp(−bᵢ aᵢᵀx)) + (α/2)‖x‖²`.
#[derive(Debug, Clone)]
pub struct Logistic {
    data: LogisticData,
    smoothness: f64,
    noise: f64,
    seed: u64,
    checksum: String,
    minimizer: Option<Vector>,
    min_value: f64,
}

/// Label rule `sign(m)` with ties broken towards `+1`.
pub fn label_from_margin(margin: f64) -> f64 {
    if margin >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Synthetic classification task: Gaussian features, a Gaussian ground-truth
/// parameter, and labels `sign(aᵢᵀx_true + noise·ξᵢ)`.
///
/// The declared smoothness is `α + λ_max(AᵀA)/(4n)`, with `λ_max` estimated by
/// power iteration. The minimum value is computed by a damped Newton solve and
/// cached on the instance.
pub fn make_logistic(d: usize, n: usize, alpha: f64, noise: f64, seed: u64) -> Result<Logistic> {
    if d == 0 || n == 0 {
        return Err(invalid("d", "dimension and sample count must be positive"));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(invalid("alpha", format!("need finite alpha >= 0, got {alpha}")));
    }
    if !noise.is_finite() {
        return Err(invalid("noise", "must be finite"));
    }

    let mut src = RandomSource::for_run(seed, "logistic-data", 0);
    let mut features = Matrix::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            features[(i, j)] = src.standard_normal();
        }
    }
    let truth = src.normal_vector(d);
    let margins = &features * &truth;
    let labels = Vector::from_fn(n, |i, _| {
        label_from_margin(margins[i] + noise * src.standard_normal())
    });

    let data = LogisticData { features, labels, ridge: alpha };
    Logistic::from_data(data, noise, seed)
}

impl Logistic {
    pub fn from_data(data: LogisticData, noise: f64, seed: u64) -> Result<Self> {
        if data.labels.len() != data.features.nrows() {
            return Err(Error::DimensionMismatch {
                expected: data.features.nrows(),
                actual: data.labels.len(),
            });
        }
        if data.labels.iter().any(|&b| b != 1.0 && b != -1.0) {
            return Err(invalid("labels", "every label must be exactly -1 or +1"));
        }
        let n = data.features.nrows() as f64;
        let smoothness = data.ridge + top_eigenvalue_gram(&data.features) / (4.0 * n);
        let checksum = checksum(&data);
        let mut problem = Self {
            data,
            smoothness,
            noise,
            seed,
            checksum,
            minimizer: None,
            min_value: 0.0,
        };
        problem.solve_reference()?;
        Ok(problem)
    }

    pub fn data(&self) -> &LogisticData {
        &self.data
    }

    /// Hex SHA-256 of the row-major feature bytes followed by the labels.
    pub fn data_checksum(&self) -> String {
        self.checksum.clone()
    }

    pub fn descriptor(&self) -> ProblemDescriptor {
        ProblemDescriptor::Logistic {
            dim: self.dim(),
            n: self.data.features.nrows(),
            alpha: self.data.ridge,
            noise: self.noise,
            smoothness: self.smoothness,
            seed: self.seed,
            data_checksum: Some(self.checksum.clone()),
            f_star: Some(self.min_value),
        }
    }

    fn n(&self) -> f64 {
        self.data.features.nrows() as f64
    }

    /// Margins `bᵢ aᵢᵀx`.
    fn margins(&self, x: &Vector) -> Vector {
        (&self.data.features * x).component_mul(&self.data.labels)
    }

    fn value_unchecked(&self, x: &Vector) -> f64 {
        let loss: f64 = self.margins(x).iter().map(|&m| softplus(-m)).sum();
        loss / self.n() + 0.5 * self.data.ridge * x.norm_squared()
    }

    fn gradient_unchecked(&self, x: &Vector) -> Vector {
        let weights = self
            .margins(x)
            .zip_map(&self.data.labels, |m, b| -b * sigmoid(-m) / self.n());
        self.data.features.tr_mul(&weights) + x * self.data.ridge
    }

    /// `(1/n) Aᵀ diag(σ(m)σ(−m)) A + αI`.
    fn hessian(&self, x: &Vector) -> Matrix {
        let margins = self.margins(x);
        let n = self.n();
        let mut scaled = self.data.features.clone();
        for (i, mut row) in scaled.row_iter_mut().enumerate() {
            let s = sigmoid(margins[i]);
            row *= s * (1.0 - s) / n;
        }
        let mut h = self.data.features.tr_mul(&scaled);
        for j in 0..h.nrows() {
            h[(j, j)] += self.data.ridge;
        }
        h
    }

    /// Per-example curvature `σ(mᵢ)σ(−mᵢ)/n`.
    fn curvature_weights(&self, x: &Vector) -> Vector {
        let n = self.n();
        self.margins(x).map(|m| {
            let s = sigmoid(m);
            s * (1.0 - s) / n
        })
    }

    fn hessian_vector(&self, curvature: &Vector, v: &Vector) -> Vector {
        let av = (&self.data.features * v).component_mul(curvature);
        self.data.features.tr_mul(&av) + v * self.data.ridge
    }

    /// Damped Newton on `f`. With α = 0 and separable data no minimizer exists;
    /// the infimum is then 0 and no minimizer is recorded.
    /// Without a ridge term, a point classifying every sample correctly can be
    /// scaled to drive the loss to zero: the infimum is 0 and not attained.
    fn separates(&self, x: &Vector) -> bool {
        self.data.ridge == 0.0 && self.margins(x).iter().all(|&m| m > 0.0)
    }

    fn solve_reference(&mut self) -> Result<()> {
        let mut x = Vector::zeros(self.dim());
        let mut fx = self.value_unchecked(&x);
        for _ in 0..REFERENCE_MAX_ITER {
            if self.separates(&x) {
                self.min_value = 0.0;
                self.minimizer = None;
                return Ok(());
            }
            let g = self.gradient_unchecked(&x);
            if g.norm() <= REFERENCE_TOLERANCE {
                self.min_value = fx;
                self.minimizer = Some(x);
                return Ok(());
            }
            let step = newton_direction(self.hessian(&x), &g);
            let slope = g.dot(&step);
            let mut t = 1.0;
            loop {
                let trial = &x - &step * t;
                let ft = self.value_unchecked(&trial);
                // Near the optimum the Armijo test drowns in rounding of f;
                // a full Newton step that halves ‖∇f‖ is taken anyway.
                let accept = ft <= fx - 1e-4 * t * slope
                    || (t == 1.0
                        && ft <= fx + rounding(fx)
                        && self.gradient_unchecked(&trial).norm() <= 0.5 * g.norm())
                    || t < 1e-12;
                if accept {
                    x = trial;
                    fx = ft;
                    break;
                }
                t *= 0.5;
            }
        }
        let residual = self.gradient_unchecked(&x).norm();
        if self.separates(&x) {
            self.min_value = 0.0;
            self.minimizer = None;
            return Ok(());
        }
        Err(Error::ReferenceSolveFailed { residual })
    }
}

impl Objective for Logistic {
    fn dim(&self) -> usize {
        self.data.features.ncols()
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }

    fn convexity(&self) -> f64 {
        self.data.ridge
    }

    fn minimizer(&self) -> Option<&Vector> {
        self.minimizer.as_ref()
    }

    fn min_value(&self) -> Option<f64> {
        Some(self.min_value)
    }

    fn value(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.value_unchecked(x))
    }

    fn gradient(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim(), x.len())?;
        Ok(self.gradient_unchecked(x))
    }

    /// Damped Newton on `φ(y) = f(y) + ‖y − c‖²/(2w)`, started from `c` or
    /// the explicit gradient step `c − w∇f(c)`, whichever has the lower `φ`.
    ///
    /// Stops once `‖∇φ‖ ≤ 1e−12`, or once Newton stalls at the rounding floor
    /// `1e−12·max(1, ‖c‖/w)` set by the `(y − c)/w` term.
    fn prox(&self, center: &Vector, weight: f64) -> Result<Vector> {
        check_dim(self.dim(), center.len())?;
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(invalid("weight", format!("must be positive, got {weight}")));
        }
        let inv_w = 1.0 / weight;
        let floor = PROX_TOLERANCE * (center.norm() * inv_w).max(1.0);
        let phi = |y: &Vector| self.value_unchecked(y) + 0.5 * inv_w * (y - center).norm_squared();
        let phi_grad = |y: &Vector| self.gradient_unchecked(y) + (y - center) * inv_w;

        let explicit = center - self.gradient_unchecked(center) * weight;
        let mut y = if phi(&explicit) <= phi(center) { explicit } else { center.clone() };
        let mut g = phi_grad(&y);
        let mut residual = g.norm();
        for _ in 0..PROX_MAX_ITER {
            if residual <= PROX_TOLERANCE {
                return Ok(y);
            }
            // The subproblem Hessian is ∇²f + I/w with ∇²f ⪯ L·I, so CG on it
            // converges in a handful of Hessian-vector products.
            let curvature = self.curvature_weights(&y);
            let step = conjugate_gradient(|v| self.hessian_vector(&curvature, v) + v * inv_w, &g);
            let f0 = phi(&y);
            let slope = g.dot(&step);
            let mut t = 1.0;
            let found = loop {
                let trial = &y - &step * t;
                let gt = phi_grad(&trial);
                // Near the solution φ differences drown in rounding, so a
                // halved gradient norm at a φ equal up to rounding also counts.
                let ft = phi(&trial);
                if ft <= f0 - 1e-4 * t * slope || (gt.norm() <= 0.5 * residual && ft <= f0 + rounding(f0)) {
                    break Some((trial, gt));
                }
                t *= 0.5;
                if t < 1e-10 {
                    break None;
                }
            };
            let Some((next, next_g)) = found else {
                // Stalled: no further progress is representable.
                return if residual <= floor {
                    Ok(y)
                } else {
                    Err(Error::ProxNotConverged { iterations: PROX_MAX_ITER, residual })
                };
            };
            y = next;
            residual = next_g.norm();
            g = next_g;
        }
        if residual <= floor {
            Ok(y)
        } else {
            Err(Error::ProxNotConverged { iterations: PROX_MAX_ITER, residual })
        }
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { has_exact_flow: false, has_exact_prox: false }
    }
}

/// Conjugate gradients for a symmetric positive definite operator, to a
/// relative residual of 1e−15.
fn conjugate_gradient(apply: impl Fn(&Vector) -> Vector, b: &Vector) -> Vector {
    let mut x = Vector::zeros(b.len());
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = r.norm_squared();
    let target = 1e-30 * rr;
    for _ in 0..2 * b.len().max(10) {
        if rr <= target || rr == 0.0 {
            break;
        }
        let ap = apply(&p);
        let step = rr / p.dot(&ap);
        x.axpy(step, &p, 1.0);
        r.axpy(-step, &ap, 1.0);
        let rr_next = r.norm_squared();
        p = &r + &p * (rr_next / rr);
        rr = rr_next;
    }
    x
}

/// Solves `H s = g`, falling back to a slightly regularised system when `H`
/// is numerically singular (α = 0 far from the data).
fn newton_direction(h: Matrix, g: &Vector) -> Vector {
    let d = h.nrows();
    match h.clone().cholesky() {
        Some(chol) => chol.solve(g),
        None => {
            let shift = 1e-10 * h.diagonal().amax().max(1.0);
            let reg = h + Matrix::identity(d, d) * shift;
            match reg.cholesky() {
                Some(chol) => chol.solve(g),
                None => g.clone(),
            }
        }
    }
}

/// Rounding error of an objective value of magnitude `v`.
fn rounding(v: f64) -> f64 {
    64.0 * f64::EPSILON * v.abs().max(1.0)
}

/// `log(1 + eᶻ)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Rayleigh quotient of `AᵀA` after power iteration from the all-ones vector.
fn top_eigenvalue_gram(a: &Matrix) -> f64 {
    let d = a.ncols();
    let mut v = Vector::from_element(d, 1.0 / (d as f64).sqrt());
    let mut lambda = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let w = a.tr_mul(&(a * &v));
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = v.dot(&w);
        v = w / norm;
    }
    lambda.max((a * &v).norm_squared())
}

fn checksum(data: &LogisticData) -> String {
    let mut hasher = Sha256::new();
    for row in data.features.row_iter() {
        for value in row.iter() {
            hasher.update(value.to_le_bytes());
        }
    }
    for label in data.labels.iter() {
        hasher.update(label.to_le_bytes());
    }
    hex::encode(hasher.finalize())
}
