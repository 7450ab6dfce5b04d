use super::{Capabilities, Objective, ProblemDescriptor};
use crate::error::{check_dim, invalid, Result};
use crate::rng::RandomSource;
use crate::{Matrix, Vector};

/// Orthogonal eigenbasis `Q` and nondecreasing eigenvalues `λ` of `A = QΛQᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSpectrum {
    pub basis: Matrix,
    pub eigenvalues: Vector,
}

impl QuadraticSpectrum {
    pub fn new(basis: Matrix, eigenvalues: Vector) -> Result<Self> {
        let d = eigenvalues.len();
        if d == 0 {
            return Err(invalid("eigenvalues", "empty spectrum"));
        }
        if basis.nrows() != d || basis.ncols() != d {
            return Err(invalid("basis", format!("expected {d}x{d} matrix")));
        }
        if eigenvalues.iter().any(|&l| !(l >= 0.0) || !l.is_finite()) {
            return Err(invalid("eigenvalues", "must be finite and nonnegative"));
        }
        if eigenvalues.as_slice().windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("eigenvalues", "must be sorted in nondecreasing order"));
        }
        let gram = basis.tr_mul(&basis) - Matrix::identity(d, d);
        if gram.amax() > 1e-10 {
            return Err(invalid("basis", "not orthogonal to 1e-10"));
        }
        Ok(Self { basis, eigenvalues })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn largest(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// Coordinates `Qᵀx` in the eigenbasis.
    pub fn to_eigen(&self, x: &Vector) -> Vector {
        self.basis.tr_mul(x)
    }

    pub fn from_eigen(&self, coords: &Vector) -> Vector {
        &self.basis * coords
    }

    /// Dense `QΛQᵀ`, symmetrised.
    pub fn dense(&self) -> Matrix {
        let scaled = Matrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.basis[(i, j)] * self.eigenvalues[j]
        });
        let a = scaled * self.basis.transpose();
        (&a + a.transpose()) * 0.5
    }
}

/// `f(x) = ½ xᵀAx` with `A` given by its spectrum.
#[derive(Debug, Clone)]
pub struct Quadratic {
    spectrum: QuadraticSpectrum,
    dense: Matrix,
    minimizer: Vector,
    seed: Option<u64>,
}

impl Quadratic {
    pub fn from_spectrum(spectrum: QuadraticSpectrum) -> Self {
        let d = spectrum.dim();
        let dense = spectrum.dense();
        Self { spectrum, dense, minimizer: Vector::zeros(d), seed: None }
    }

    /// Axis-aligned quadratic with `Q = I`.
    pub fn diagonal(eigenvalues: &[f64]) -> Result<Self> {
        let d = eigenvalues.len();
        let spectrum =
            QuadraticSpectrum::new(Matrix::identity(d, d), Vector::from_column_slice(eigenvalues))?;
        Ok(Self::from_spectrum(spectrum))
    }

    pub fn spectrum_ref(&self) -> &QuadraticSpectrum {
        &self.spectrum
    }

    pub fn dense(&self) -> &Matrix {
        &self.dense
    }

    pub fn descriptor(&self) -> ProblemDescriptor {
        ProblemDescriptor::Quadratic {
            dim: self.dim(),
            alpha: self.convexity(),
            smoothness: self.smoothness(),
            seed: self.seed.unwrap_or(0),
            eigenvalues: Some(self.spectrum.eigenvalues.iter().copied().collect()),
        }
    }
}

/// Random quadratic with eigenvalues evenly spaced on `[alpha, L]`
/// (both endpoints included) and a Haar-distributed eigenbasis obtained
/// from the QR factorisation of a standard Gaussian matrix.
pub fn make_quadratic(d: usize, alpha: f64, smoothness: f64, seed: u64) -> Result<Quadratic> {
    if d == 0 {
        return Err(invalid("d", "dimension must be positive"));
    }
    if !(alpha >= 0.0) || !smoothness.is_finite() {
        return Err(invalid("alpha", format!("need 0 <= alpha, got {alpha}")));
    }
    if alpha > smoothness {
        return Err(invalid("alpha", format!("alpha = {alpha} exceeds L = {smoothness}")));
    }
    if d == 1 && alpha != smoothness {
        return Err(invalid("d", "a one-dimensional spectrum needs alpha == L"));
    }

    let eigenvalues = Vector::from_fn(d, |j, _| {
        if j == 0 {
            alpha
        } else if j == d - 1 {
            smoothness
        } else {
            alpha + (smoothness - alpha) * j as f64 / (d - 1) as f64
        }
    });

    let mut src = RandomSource::for_run(seed, "quadratic-basis", 0);
    let gaussian = Matrix::from_fn(d, d, |_, _| src.standard_normal());
    let qr = gaussian.qr();
    let r = qr.r();
    let mut basis = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            basis.column_mut(j).neg_mut();
        }
    }

    let spectrum = QuadraticSpectrum::new(basis, eigenvalues)?;
    let mut q = Quadratic::from_spectrum(spectrum);
    q.seed = Some(seed);
    Ok(q)
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    fn smoothness(&self) -> f64 {
        self.spectrum.largest()
    }

    fn convexity(&self) -> f64 {
        self.spectrum.eigenvalues[0]
    }

    fn minimizer(&self) -> Option<&Vector> {
        Some(&self.minimizer)
    }

    fn min_value(&self) -> Option<f64> {
        Some(0.0)
    }

    fn value(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let coords = self.spectrum.to_eigen(x);
        Ok(0.5
            * coords
                .iter()
                .zip(self.spectrum.eigenvalues.iter())
                .map(|(c, l)| l * c * c)
                .sum::<f64>())
    }

    fn gradient(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim(), x.len())?;
        Ok(&self.dense * x)
    }

    fn spectrum(&self) -> Option<&QuadraticSpectrum> {
        Some(&self.spectrum)
    }

    fn prox(&self, center: &Vector, weight: f64) -> Result<Vector> {
        check_dim(self.dim(), center.len())?;
        if !(weight > 0.0) {
            return Err(invalid("weight", format!("must be positive, got {weight}")));
        }
        let mut coords = self.spectrum.to_eigen(center);
        for (c, l) in coords.iter_mut().zip(self.spectrum.eigenvalues.iter()) {
            *c /= 1.0 + weight * l;
        }
        Ok(self.spectrum.from_eigen(&coords))
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { has_exact_flow: true, has_exact_prox: true }
    }
}
