//! Finsler fundamental functions and areal Lagrangians.
//!
//! A [`FinslerFunction`] is a function `F(y, v)` of a base point `y ∈ Rᵐ`
//! and a fiber vector `v`: a tangent vector for curve Lagrangians, the
//! component vector of a k-vector for the areal Gram Lagrangian. Gradients
//! with respect to the fiber are analytic.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::forms::{Coefficient, KForm, ScalarField};
use crate::linalg::{max_abs, Matrix};
use crate::maps::{check_dim, SharedMap};
use crate::multiindex::binomial;

/// Guards relative residual denominators against exact zeros.
pub const EPS_DEN: f64 = 1e-300;

/// Fiber vectors with `|v|∞ ≤ SLIT_THRESHOLD · max(1, |y|∞)` count as zero.
pub const SLIT_THRESHOLD: f64 = 1e-13;

/// A symmetric positive-definite matrix field `g(y)`.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricField {
    Constant(Matrix),
    /// `(1 + α|y|²) G` with `α ≥ 0`.
    Conformal {
        base: Matrix,
        alpha: f64,
    },
}

impl MetricField {
    pub fn identity(m: usize) -> Self {
        MetricField::Constant(Matrix::identity(m))
    }

    pub fn dim(&self) -> usize {
        self.base().rows()
    }

    fn base(&self) -> &Matrix {
        match self {
            MetricField::Constant(g) | MetricField::Conformal { base: g, .. } => g,
        }
    }

    fn factor(&self, y: &[f64]) -> f64 {
        match self {
            MetricField::Constant(_) => 1.0,
            MetricField::Conformal { alpha, .. } => {
                1.0 + alpha * y.iter().map(|v| v * v).sum::<f64>()
            }
        }
    }

    pub fn at(&self, y: &[f64]) -> Matrix {
        let c = self.factor(y);
        let g = self.base();
        Matrix::from_fn(g.rows(), g.cols(), |r, s| c * g[(r, s)])
    }

    fn validate(&self) -> Result<()> {
        let g = self.base();
        let m = g.rows();
        if g.cols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: g.cols(),
            });
        }
        for r in 0..m {
            for s in 0..r {
                let (a, b) = (g[(r, s)], g[(s, r)]);
                if (a - b).abs() > 1e-14 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::InvalidParameter(
                        "metric matrix is not symmetric".into(),
                    ));
                }
            }
        }
        // Sylvester: all leading principal minors positive
        for size in 1..=m {
            let idx: Vec<usize> = (0..size).collect();
            if !(g.minor(&idx, &idx) > 0.0) {
                return Err(Error::InvalidParameter(
                    "metric matrix is not positive definite".into(),
                ));
            }
        }
        if let MetricField::Conformal { alpha, .. } = self {
            if !(*alpha >= 0.0) || !alpha.is_finite() {
                return Err(Error::InvalidParameter(
                    "conformal factor needs alpha ≥ 0".into(),
                ));
            }
        }
        Ok(())
    }
}

/// A covector field `b(y)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CovectorField {
    Constant(Vec<f64>),
    /// `b₀ + B y`.
    Affine {
        base: Vec<f64>,
        matrix: Matrix,
    },
}

impl CovectorField {
    pub fn dim(&self) -> usize {
        match self {
            CovectorField::Constant(b) | CovectorField::Affine { base: b, .. } => b.len(),
        }
    }

    pub fn at(&self, y: &[f64]) -> Result<Vec<f64>> {
        match self {
            CovectorField::Constant(b) => Ok(b.clone()),
            CovectorField::Affine { base, matrix } => {
                let by = matrix.mul_vec(y)?;
                Ok(base.iter().zip(by).map(|(a, b)| a + b).collect())
            }
        }
    }
}

/// The catalog of Lagrangians.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinslerKind {
    Euclidean,
    Riemannian,
    Randers,
    /// Quartic root of a diagonal quartic form.
    MthRoot,
    ArealGram,
    /// `|v|²`, homogeneous of degree 2 rather than 1.
    QuadraticEnergy,
}

impl FinslerKind {
    pub fn name(&self) -> &'static str {
        match self {
            FinslerKind::Euclidean => "euclidean",
            FinslerKind::Riemannian => "riemannian",
            FinslerKind::Randers => "randers",
            FinslerKind::MthRoot => "mth_root",
            FinslerKind::ArealGram => "areal_gram",
            FinslerKind::QuadraticEnergy => "quadratic_energy",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Euclidean {
        m: usize,
    },
    Riemannian {
        metric: MetricField,
    },
    Randers {
        metric: MetricField,
        drift: CovectorField,
    },
    MthRoot {
        coeffs: Vec<f64>,
    },
    ArealGram {
        k: usize,
        m: usize,
    },
    QuadraticEnergy {
        m: usize,
    },
}

/// `F(y, v)` with its analytic fiber gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct FinslerFunction {
    repr: Repr,
}

impl FinslerFunction {
    pub fn euclidean(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Self {
            repr: Repr::Euclidean { m },
        })
    }

    pub fn riemannian(metric: MetricField) -> Result<Self> {
        metric.validate()?;
        Ok(Self {
            repr: Repr::Riemannian { metric },
        })
    }

    /// `√(vᵀg v) + b·v`; requires `|b|_g < 1` at the origin. Non-constant
    /// data is rechecked at every evaluation point.
    pub fn randers(metric: MetricField, drift: CovectorField) -> Result<Self> {
        metric.validate()?;
        let m = metric.dim();
        if drift.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: drift.dim(),
            });
        }
        if let CovectorField::Affine { matrix, .. } = &drift {
            if matrix.rows() != m || matrix.cols() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: matrix.rows(),
                });
            }
        }
        let f = Self {
            repr: Repr::Randers { metric, drift },
        };
        f.drift_norm(&vec![0.0; m])?;
        Ok(f)
    }

    /// `(Σ aᵢ vᵢ⁴)^{1/4}` with all `aᵢ > 0`.
    pub fn mth_root(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidParameter(
                "quartic coefficients must be positive".into(),
            ));
        }
        Ok(Self {
            repr: Repr::MthRoot { coeffs },
        })
    }

    /// `L(y, Ξ) = |Ξ|`, the k-area Lagrangian on k-vectors in `Rᵐ`.
    pub fn areal_gram(k: usize, m: usize) -> Result<Self> {
        if k < 1 || k > m {
            return Err(Error::InvalidDegree { k, m });
        }
        Ok(Self {
            repr: Repr::ArealGram { k, m },
        })
    }

    pub fn quadratic_energy(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Self {
            repr: Repr::QuadraticEnergy { m },
        })
    }

    pub fn kind(&self) -> FinslerKind {
        match self.repr {
            Repr::Euclidean { .. } => FinslerKind::Euclidean,
            Repr::Riemannian { .. } => FinslerKind::Riemannian,
            Repr::Randers { .. } => FinslerKind::Randers,
            Repr::MthRoot { .. } => FinslerKind::MthRoot,
            Repr::ArealGram { .. } => FinslerKind::ArealGram,
            Repr::QuadraticEnergy { .. } => FinslerKind::QuadraticEnergy,
        }
    }

    /// Dimension of the base chart.
    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Euclidean { m } | Repr::QuadraticEnergy { m } | Repr::ArealGram { m, .. } => *m,
            Repr::Riemannian { metric } | Repr::Randers { metric, .. } => metric.dim(),
            Repr::MthRoot { coeffs } => coeffs.len(),
        }
    }

    /// Degree of the fiber: 1 for curve Lagrangians, k for areal ones.
    pub fn fiber_degree(&self) -> usize {
        match &self.repr {
            Repr::ArealGram { k, .. } => *k,
            _ => 1,
        }
    }

    pub fn fiber_dim(&self) -> usize {
        binomial(self.dim(), self.fiber_degree())
    }

    fn check_args(&self, y: &[f64], v: &[f64]) -> Result<()> {
        check_dim(self.dim(), y)?;
        check_dim(self.fiber_dim(), v)?;
        if y.iter().chain(v).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("Finsler argument"));
        }
        if max_abs(v) <= SLIT_THRESHOLD * max_abs(y).max(1.0) {
            return Err(Error::SlitDomain);
        }
        Ok(())
    }

    /// `|b(y)|_g = √(bᵀ g⁻¹ b)`, rejecting values ≥ 1.
    fn drift_norm(&self, y: &[f64]) -> Result<f64> {
        let Repr::Randers { metric, drift } = &self.repr else {
            return Ok(0.0);
        };
        let b = drift.at(y)?;
        let ginv = metric.at(y).inverse()?;
        let gb = ginv.mul_vec(&b)?;
        let n = b.iter().zip(&gb).map(|(p, q)| p * q).sum::<f64>().sqrt();
        if !(n < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Randers drift has |b|_g = {n} ≥ 1"
            )));
        }
        Ok(n)
    }

    pub fn eval(&self, y: &[f64], v: &[f64]) -> Result<f64> {
        self.check_args(y, v)?;
        let value = match &self.repr {
            Repr::Euclidean { .. } | Repr::ArealGram { .. } => norm(v),
            Repr::Riemannian { metric } => quad(&metric.at(y), v)?.sqrt(),
            Repr::Randers { metric, drift } => {
                self.drift_norm(y)?;
                let b = drift.at(y)?;
                quad(&metric.at(y), v)?.sqrt() + b.iter().zip(v).map(|(p, q)| p * q).sum::<f64>()
            }
            Repr::MthRoot { coeffs } => coeffs
                .iter()
                .zip(v)
                .map(|(a, x)| a * x.powi(4))
                .sum::<f64>()
                .powf(0.25),
            Repr::QuadraticEnergy { .. } => v.iter().map(|x| x * x).sum(),
        };
        if !value.is_finite() {
            return Err(Error::NonFinite("Finsler value"));
        }
        Ok(value)
    }

    /// `∂F/∂v` at `(y, v)`.
    pub fn fiber_gradient(&self, y: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        self.check_args(y, v)?;
        let grad = match &self.repr {
            Repr::Euclidean { .. } | Repr::ArealGram { .. } => {
                let n = norm(v);
                v.iter().map(|x| x / n).collect()
            }
            Repr::Riemannian { metric } => {
                let g = metric.at(y);
                let gv = g.mul_vec(v)?;
                let n = quad(&g, v)?.sqrt();
                gv.iter().map(|x| x / n).collect()
            }
            Repr::Randers { metric, drift } => {
                self.drift_norm(y)?;
                let g = metric.at(y);
                let gv = g.mul_vec(v)?;
                let n = quad(&g, v)?.sqrt();
                gv.iter()
                    .zip(drift.at(y)?)
                    .map(|(x, b)| x / n + b)
                    .collect()
            }
            Repr::MthRoot { coeffs } => {
                let f = coeffs
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x.powi(4))
                    .sum::<f64>()
                    .powf(0.25);
                let f3 = f.powi(3);
                coeffs
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x.powi(3) / f3)
                    .collect()
            }
            Repr::QuadraticEnergy { .. } => v.iter().map(|x| 2.0 * x).collect(),
        };
        Ok(grad)
    }

    /// Largest gap between [`fiber_gradient`](Self::fiber_gradient) and
    /// central differences of [`eval`](Self::eval) at `(y, v)`.
    pub fn fiber_gradient_fd_residual(&self, y: &[f64], v: &[f64]) -> Result<f64> {
        let grad = self.fiber_gradient(y, v)?;
        let h = 1e-6 * max_abs(v).max(1e-3);
        let mut vp = v.to_vec();
        let mut worst = 0.0f64;
        for (i, g) in grad.iter().enumerate() {
            vp[i] = v[i] + h;
            let fp = self.eval(y, &vp)?;
            vp[i] = v[i] - h;
            let fm = self.eval(y, &vp)?;
            vp[i] = v[i];
            worst = worst.max(((fp - fm) / (2.0 * h) - g).abs());
        }
        Ok(worst)
    }

    /// Relative residual of `F(y, λv) = λF(y, v)` at one sample.
    pub fn homogeneity_residual_at(&self, y: &[f64], v: &[f64], lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(
                "homogeneity factors must be positive".into(),
            ));
        }
        let scaled: Vec<f64> = v.iter().map(|x| lambda * x).collect();
        let rhs = lambda * self.eval(y, v)?;
        Ok((self.eval(y, &scaled)? - rhs).abs() / (rhs.abs() + EPS_DEN))
    }

    /// `|∂F/∂v(y, λv) − ∂F/∂v(y, v)|∞` at one sample.
    pub fn projectability_residual_at(&self, y: &[f64], v: &[f64], lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(
                "homogeneity factors must be positive".into(),
            ));
        }
        let scaled: Vec<f64> = v.iter().map(|x| lambda * x).collect();
        let a = self.fiber_gradient(y, &scaled)?;
        let b = self.fiber_gradient(y, v)?;
        Ok(a.iter()
            .zip(&b)
            .fold(0.0, |acc, (p, q)| acc.max((p - q).abs())))
    }

    /// `|Σ v^ν ∂F/∂v^ν − F|` at one sample.
    pub fn euler_residual_at(&self, y: &[f64], v: &[f64]) -> Result<f64> {
        let grad = self.fiber_gradient(y, v)?;
        let contracted: f64 = grad.iter().zip(v).map(|(g, x)| g * x).sum();
        Ok((contracted - self.eval(y, v)?).abs())
    }

    /// A random `(y, v)` pair with `y ∈ [−1, 1]ᵐ` and `v ∈ [−1, 1]^N`,
    /// redrawn while `|v|∞ < 10⁻³`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
        let y: Vec<f64> = (0..self.dim()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        loop {
            let v: Vec<f64> = (0..self.fiber_dim())
                .map(|_| rng.gen_range(-1.0..=1.0))
                .collect();
            if max_abs(&v) >= 1e-3 {
                return (y, v);
            }
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    crate::linalg::norm(v)
}

fn quad(g: &Matrix, v: &[f64]) -> Result<f64> {
    Ok(g.mul_vec(v)?.iter().zip(v).map(|(a, b)| a * b).sum())
}

fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() || lambdas.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::InvalidParameter(
            "homogeneity factors must be positive".into(),
        ));
    }
    Ok(())
}

/// Largest relative residual of `F(y, λv) = λF(y, v)` over random samples.
pub fn check_homogeneity<R: Rng + ?Sized>(
    f: &FinslerFunction,
    sample_count: usize,
    lambdas: &[f64],
    rng: &mut R,
) -> Result<f64> {
    check_lambdas(lambdas)?;
    let mut worst = 0.0f64;
    for _ in 0..sample_count {
        let (y, v) = f.sample(rng);
        for &l in lambdas {
            worst = worst.max(f.homogeneity_residual_at(&y, &v, l)?);
        }
    }
    Ok(worst)
}

/// Largest change of the fiber gradient under positive rescaling of `v`:
/// zero exactly when the Hilbert form descends to oriented directions.
pub fn check_projectability<R: Rng + ?Sized>(
    f: &FinslerFunction,
    sample_count: usize,
    lambdas: &[f64],
    rng: &mut R,
) -> Result<f64> {
    check_lambdas(lambdas)?;
    let mut worst = 0.0f64;
    for _ in 0..sample_count {
        let (y, v) = f.sample(rng);
        for &l in lambdas {
            worst = worst.max(f.projectability_residual_at(&y, &v, l)?);
        }
    }
    Ok(worst)
}

/// The Hilbert 1-form `(∂F/∂ẏ^ν) dy^ν` on the `(y, ẏ)` chart of the
/// tangent bundle, a form on `R^{2m}` with vanishing `dẏ` components.
pub fn hilbert_form(f: &FinslerFunction) -> Result<KForm> {
    if f.fiber_degree() != 1 {
        return Err(Error::UnsupportedDegree(f.fiber_degree()));
    }
    let m = f.dim();
    let shared = Arc::new(f.clone());
    let mut coeffs = Vec::with_capacity(2 * m);
    for nu in 0..m {
        coeffs.push(Coefficient::Field(Arc::new(HilbertCoefficient {
            f: shared.clone(),
            nu,
        })));
    }
    coeffs.extend((0..m).map(|_| Coefficient::Zero));
    KForm::new(1, 2 * m, coeffs)
}

struct HilbertCoefficient {
    f: Arc<FinslerFunction>,
    nu: usize,
}

impl ScalarField for HilbertCoefficient {
    fn dim(&self) -> usize {
        2 * self.f.dim()
    }

    fn value(&self, z: &[f64]) -> Result<f64> {
        let (y, v) = z.split_at(self.f.dim());
        Ok(self.f.fiber_gradient(y, v)?[self.nu])
    }
}

/// `max_t |Σ_ν ∂F/∂ẏ^ν(ζ, ζ') ζ'^ν − F(ζ, ζ')|`: the pullback of the
/// Hilbert form along the tangent lift compared with `F dt`.
pub fn pullback_identity_residual(
    f: &FinslerFunction,
    curve: &SharedMap,
    t_samples: &[f64],
) -> Result<f64> {
    if curve.domain_dim() != 1 || curve.codomain_dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: curve.codomain_dim(),
        });
    }
    let mut worst = 0.0f64;
    for &t in t_samples {
        let y = curve.eval(&[t])?;
        let v = curve.jacobian(&[t])?.column(0);
        let r = f.euler_residual_at(&y, &v).map_err(|e| match e {
            Error::SlitDomain => Error::ImmersionFailure(vec![t]),
            e => e,
        })?;
        worst = worst.max(r);
    }
    Ok(worst)
}
