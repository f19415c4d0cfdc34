//! Differentiable maps between coordinate spaces.
//!
//! [`CatalogMap`] is the closed family of named maps that scenario files can
//! declare; every member carries an analytic Jacobian. Arbitrary maps can
//! implement [`DifferentiableMap`] directly and fall back on central
//! differences. [`Composition`], [`LinearCombination`] and [`TangentLift`]
//! build new maps from existing ones.

use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, Matrix};
use crate::polynomial::Polynomial;

/// A map `Rⁿ → Rᵐ` in coordinates, with its Jacobian (`m × n`).
pub trait DifferentiableMap: Send + Sync {
    fn domain_dim(&self) -> usize;
    fn codomain_dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>>;

    fn jacobian(&self, x: &[f64]) -> Result<Matrix> {
        finite_difference_jacobian(self, x)
    }
}

/// Shared handle to a map, as stored inside forms and pieces.
pub type SharedMap = Arc<dyn DifferentiableMap>;

/// Central-difference Jacobian with step `1e-6 · max(1, |x|∞)`.
pub fn finite_difference_jacobian<M: DifferentiableMap + ?Sized>(
    f: &M,
    x: &[f64],
) -> Result<Matrix> {
    let h = 1e-6 * max_abs(x).max(1.0);
    finite_difference_jacobian_with_step(f, x, h)
}

pub fn finite_difference_jacobian_with_step<M: DifferentiableMap + ?Sized>(
    f: &M,
    x: &[f64],
    h: f64,
) -> Result<Matrix> {
    check_dim(f.domain_dim(), x)?;
    let (n, m) = (f.domain_dim(), f.codomain_dim());
    let mut jac = Matrix::zeros(m, n);
    let mut xp = x.to_vec();
    for c in 0..n {
        xp[c] = x[c] + h;
        let fp = f.eval(&xp)?;
        xp[c] = x[c] - h;
        let fm = f.eval(&xp)?;
        xp[c] = x[c];
        for r in 0..m {
            jac[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Largest entrywise gap between the analytic Jacobian and central differences.
pub fn jacobian_fd_residual<M: DifferentiableMap + ?Sized>(f: &M, x: &[f64]) -> Result<f64> {
    let a = f.jacobian(x)?;
    let b = finite_difference_jacobian(f, x)?;
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .fold(0.0, |acc, (p, q)| acc.max((p - q).abs())))
}

pub(crate) fn check_dim(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: x.len(),
        });
    }
    Ok(())
}

/// Named map families with analytic Jacobians.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogMap {
    Identity {
        dim: usize,
    },
    /// `x ↦ A x`.
    Linear {
        matrix: Matrix,
    },
    /// `x ↦ A x + b`.
    Affine {
        matrix: Matrix,
        offset: Vec<f64>,
    },
    /// One polynomial per output coordinate.
    Polynomial {
        components: Vec<Polynomial>,
    },
    /// Graph `t ↦ (t, p(t))` of a polynomial over `Rⁿ`.
    Graph {
        height: Polynomial,
    },
    /// `t ↦ c + r (cos t, sin t)`.
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    /// `t ↦ (r cos t, r sin t, p t)`.
    Helix {
        radius: f64,
        pitch: f64,
    },
    /// `(u, v) ↦ ((R + r cos v) cos u, (R + r cos v) sin u, r sin v)`.
    TorusPatch {
        major: f64,
        minor: f64,
    },
    /// `(θ, φ) ↦ r (sin θ cos φ, sin θ sin φ, cos θ)`.
    SpherePatch {
        radius: f64,
    },
    /// `t ↦ c + l t + Σⱼ aⱼ cos(jω(t − t₀)) + bⱼ sin(jω(t − t₀))`.
    Fourier {
        constant: Vec<f64>,
        linear: Vec<f64>,
        cos: Vec<Vec<f64>>,
        sin: Vec<Vec<f64>>,
        omega: f64,
        origin: f64,
    },
    /// `(r, θ) ↦ (r cos θ, r sin θ)`.
    Polar,
    /// `(x, y) ↦ (√(x² + y²), atan2(y, x))`.
    PolarInverse,
    /// `ι_{k,m}: (t¹…tᵏ) ↦ (t¹…tᵏ, 0…0)`.
    Inclusion {
        k: usize,
        m: usize,
    },
    /// `pr_{m,k}: (y¹…yᵐ) ↦ (y¹…yᵏ)`.
    Projection {
        m: usize,
        k: usize,
    },
    /// Face of a k-box: inserts `value` at `axis`, mapping `R^{k−1} → Rᵏ`.
    FaceInclusion {
        dim: usize,
        axis: usize,
        value: f64,
    },
}

impl CatalogMap {
    pub fn linear(matrix: Matrix) -> Self {
        CatalogMap::Linear { matrix }
    }

    pub fn affine(matrix: Matrix, offset: Vec<f64>) -> Result<Self> {
        if offset.len() != matrix.rows() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                got: offset.len(),
            });
        }
        Ok(CatalogMap::Affine { matrix, offset })
    }

    pub fn polynomial(components: Vec<Polynomial>) -> Result<Self> {
        let n = components.first().map(Polynomial::nvars).ok_or_else(|| {
            Error::InvalidParameter("polynomial map needs at least one component".into())
        })?;
        if let Some(p) = components.iter().find(|p| p.nvars() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.nvars(),
            });
        }
        Ok(CatalogMap::Polynomial { components })
    }

    pub fn circle(radius: f64) -> Self {
        CatalogMap::Circle {
            center: [0.0, 0.0],
            radius,
        }
    }

    /// A Fourier curve; all coefficient vectors must share one dimension.
    pub fn fourier(
        constant: Vec<f64>,
        linear: Vec<f64>,
        cos: Vec<Vec<f64>>,
        sin: Vec<Vec<f64>>,
        omega: f64,
        origin: f64,
    ) -> Result<Self> {
        let m = constant.len();
        if linear.len() != m || cos.iter().chain(&sin).any(|v| v.len() != m) {
            return Err(Error::InvalidParameter(
                "Fourier coefficient vectors differ in length".into(),
            ));
        }
        Ok(CatalogMap::Fourier {
            constant,
            linear,
            cos,
            sin,
            omega,
            origin,
        })
    }

    /// `s ↦ s + a sin s`, a 1-d reparametrization (orientation-preserving for |a| < 1).
    pub fn sine_shift(a: f64) -> Self {
        CatalogMap::Fourier {
            constant: vec![0.0],
            linear: vec![1.0],
            cos: vec![],
            sin: vec![vec![a]],
            omega: 1.0,
            origin: 0.0,
        }
    }

    /// Straight segment `t ↦ p + t (q − p)`.
    pub fn segment(p: &[f64], q: &[f64]) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::DimensionMismatch {
                expected: p.len(),
                got: q.len(),
            });
        }
        let dir: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
        CatalogMap::affine(Matrix::from_row_slice(p.len(), 1, &dir)?, p.to_vec())
    }

    pub fn family(&self) -> &'static str {
        match self {
            CatalogMap::Identity { .. } => "identity",
            CatalogMap::Linear { .. } => "linear",
            CatalogMap::Affine { .. } => "affine",
            CatalogMap::Polynomial { .. } => "polynomial",
            CatalogMap::Graph { .. } => "graph",
            CatalogMap::Circle { .. } => "circle",
            CatalogMap::Helix { .. } => "helix",
            CatalogMap::TorusPatch { .. } => "torus_patch",
            CatalogMap::SpherePatch { .. } => "sphere_patch",
            CatalogMap::Fourier { .. } => "fourier",
            CatalogMap::Polar => "polar",
            CatalogMap::PolarInverse => "polar_inverse",
            CatalogMap::Inclusion { .. } => "inclusion",
            CatalogMap::Projection { .. } => "projection",
            CatalogMap::FaceInclusion { .. } => "face_inclusion",
        }
    }

    /// The catalog inverse, where the family has one in closed form.
    pub fn inverse(&self) -> Result<CatalogMap> {
        match self {
            CatalogMap::Identity { dim } => Ok(CatalogMap::Identity { dim: *dim }),
            CatalogMap::Linear { matrix } => Ok(CatalogMap::Linear {
                matrix: matrix.inverse()?,
            }),
            CatalogMap::Affine { matrix, offset } => {
                let inv = matrix.inverse()?;
                let off = inv.mul_vec(offset)?.into_iter().map(|x| -x).collect();
                Ok(CatalogMap::Affine {
                    matrix: inv,
                    offset: off,
                })
            }
            CatalogMap::Polar => Ok(CatalogMap::PolarInverse),
            CatalogMap::PolarInverse => Ok(CatalogMap::Polar),
            other => Err(Error::InvalidParameter(format!(
                "no catalog inverse for `{}`",
                other.family()
            ))),
        }
    }

    pub fn into_shared(self) -> SharedMap {
        Arc::new(self)
    }
}

impl DifferentiableMap for CatalogMap {
    fn domain_dim(&self) -> usize {
        match self {
            CatalogMap::Identity { dim } => *dim,
            CatalogMap::Linear { matrix } | CatalogMap::Affine { matrix, .. } => matrix.cols(),
            CatalogMap::Polynomial { components } => components[0].nvars(),
            CatalogMap::Graph { height } => height.nvars(),
            CatalogMap::Circle { .. } | CatalogMap::Helix { .. } | CatalogMap::Fourier { .. } => 1,
            CatalogMap::TorusPatch { .. }
            | CatalogMap::SpherePatch { .. }
            | CatalogMap::Polar
            | CatalogMap::PolarInverse => 2,
            CatalogMap::Inclusion { k, .. } => *k,
            CatalogMap::Projection { m, .. } => *m,
            CatalogMap::FaceInclusion { dim, .. } => dim - 1,
        }
    }

    fn codomain_dim(&self) -> usize {
        match self {
            CatalogMap::Identity { dim } => *dim,
            CatalogMap::Linear { matrix } | CatalogMap::Affine { matrix, .. } => matrix.rows(),
            CatalogMap::Polynomial { components } => components.len(),
            CatalogMap::Graph { height } => height.nvars() + 1,
            CatalogMap::Circle { .. } | CatalogMap::Polar | CatalogMap::PolarInverse => 2,
            CatalogMap::Helix { .. }
            | CatalogMap::TorusPatch { .. }
            | CatalogMap::SpherePatch { .. } => 3,
            CatalogMap::Fourier { constant, .. } => constant.len(),
            CatalogMap::Inclusion { m, .. } => *m,
            CatalogMap::Projection { k, .. } => *k,
            CatalogMap::FaceInclusion { dim, .. } => *dim,
        }
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.domain_dim(), x)?;
        let y = match self {
            CatalogMap::Identity { .. } => x.to_vec(),
            CatalogMap::Linear { matrix } => matrix.mul_vec(x)?,
            CatalogMap::Affine { matrix, offset } => {
                let mut y = matrix.mul_vec(x)?;
                y.iter_mut().zip(offset).for_each(|(a, b)| *a += b);
                y
            }
            CatalogMap::Polynomial { components } => components.iter().map(|p| p.eval(x)).collect(),
            CatalogMap::Graph { height } => {
                let mut y = x.to_vec();
                y.push(height.eval(x));
                y
            }
            CatalogMap::Circle { center, radius } => {
                let (s, c) = x[0].sin_cos();
                vec![center[0] + radius * c, center[1] + radius * s]
            }
            CatalogMap::Helix { radius, pitch } => {
                let (s, c) = x[0].sin_cos();
                vec![radius * c, radius * s, pitch * x[0]]
            }
            CatalogMap::TorusPatch { major, minor } => {
                let (su, cu) = x[0].sin_cos();
                let (sv, cv) = x[1].sin_cos();
                let rho = major + minor * cv;
                vec![rho * cu, rho * su, minor * sv]
            }
            CatalogMap::SpherePatch { radius } => {
                let (st, ct) = x[0].sin_cos();
                let (sp, cp) = x[1].sin_cos();
                vec![radius * st * cp, radius * st * sp, radius * ct]
            }
            CatalogMap::Fourier {
                constant,
                linear,
                cos,
                sin,
                omega,
                origin,
            } => {
                let t = x[0];
                let mut y: Vec<f64> = constant
                    .iter()
                    .zip(linear)
                    .map(|(c, l)| c + l * t)
                    .collect();
                for (j, a) in cos.iter().enumerate() {
                    let phase = (j + 1) as f64 * omega * (t - origin);
                    y.iter_mut()
                        .zip(a)
                        .for_each(|(yi, ai)| *yi += ai * phase.cos());
                }
                for (j, b) in sin.iter().enumerate() {
                    let phase = (j + 1) as f64 * omega * (t - origin);
                    y.iter_mut()
                        .zip(b)
                        .for_each(|(yi, bi)| *yi += bi * phase.sin());
                }
                y
            }
            CatalogMap::Polar => {
                let (s, c) = x[1].sin_cos();
                vec![x[0] * c, x[0] * s]
            }
            CatalogMap::PolarInverse => vec![x[0].hypot(x[1]), x[1].atan2(x[0])],
            CatalogMap::Inclusion { m, .. } => {
                let mut y = x.to_vec();
                y.resize(*m, 0.0);
                y
            }
            CatalogMap::Projection { k, .. } => x[..*k].to_vec(),
            CatalogMap::FaceInclusion { axis, value, .. } => {
                let mut y = x.to_vec();
                y.insert(*axis, *value);
                y
            }
        };
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::MapEvaluation(format!(
                "`{}` produced a non-finite value",
                self.family()
            )));
        }
        Ok(y)
    }

    fn jacobian(&self, x: &[f64]) -> Result<Matrix> {
        check_dim(self.domain_dim(), x)?;
        let (n, m) = (self.domain_dim(), self.codomain_dim());
        let jac = match self {
            CatalogMap::Identity { dim } => Matrix::identity(*dim),
            CatalogMap::Linear { matrix } | CatalogMap::Affine { matrix, .. } => matrix.clone(),
            CatalogMap::Polynomial { components } => {
                let rows: Vec<Vec<f64>> = components.iter().map(|p| p.gradient(x)).collect();
                Matrix::from_rows(&rows)?
            }
            CatalogMap::Graph { height } => {
                let mut jac = Matrix::zeros(m, n);
                for i in 0..n {
                    jac[(i, i)] = 1.0;
                }
                for (c, g) in height.gradient(x).into_iter().enumerate() {
                    jac[(n, c)] = g;
                }
                jac
            }
            CatalogMap::Circle { radius, .. } => {
                let (s, c) = x[0].sin_cos();
                Matrix::from_row_slice(2, 1, &[-radius * s, radius * c])?
            }
            CatalogMap::Helix { radius, pitch } => {
                let (s, c) = x[0].sin_cos();
                Matrix::from_row_slice(3, 1, &[-radius * s, radius * c, *pitch])?
            }
            CatalogMap::TorusPatch { major, minor } => {
                let (su, cu) = x[0].sin_cos();
                let (sv, cv) = x[1].sin_cos();
                let rho = major + minor * cv;
                Matrix::from_row_slice(
                    3,
                    2,
                    &[
                        -rho * su,
                        -minor * sv * cu,
                        rho * cu,
                        -minor * sv * su,
                        0.0,
                        minor * cv,
                    ],
                )?
            }
            CatalogMap::SpherePatch { radius: r } => {
                let (st, ct) = x[0].sin_cos();
                let (sp, cp) = x[1].sin_cos();
                Matrix::from_row_slice(
                    3,
                    2,
                    &[
                        r * ct * cp,
                        -r * st * sp,
                        r * ct * sp,
                        r * st * cp,
                        -r * st,
                        0.0,
                    ],
                )?
            }
            CatalogMap::Fourier {
                linear,
                cos,
                sin,
                omega,
                origin,
                ..
            } => {
                let t = x[0];
                let mut d = linear.clone();
                for (j, a) in cos.iter().enumerate() {
                    let f = (j + 1) as f64 * omega;
                    let s = (f * (t - origin)).sin();
                    d.iter_mut().zip(a).for_each(|(di, ai)| *di -= f * ai * s);
                }
                for (j, b) in sin.iter().enumerate() {
                    let f = (j + 1) as f64 * omega;
                    let c = (f * (t - origin)).cos();
                    d.iter_mut().zip(b).for_each(|(di, bi)| *di += f * bi * c);
                }
                Matrix::from_row_slice(m, 1, &d)?
            }
            CatalogMap::Polar => {
                let (s, c) = x[1].sin_cos();
                Matrix::from_row_slice(2, 2, &[c, -x[0] * s, s, x[0] * c])?
            }
            CatalogMap::PolarInverse => {
                let r2 = x[0] * x[0] + x[1] * x[1];
                if r2 == 0.0 {
                    return Err(Error::MapEvaluation("polar inverse at the origin".into()));
                }
                let r = r2.sqrt();
                Matrix::from_row_slice(2, 2, &[x[0] / r, x[1] / r, -x[1] / r2, x[0] / r2])?
            }
            CatalogMap::Inclusion { k, m } => {
                Matrix::from_fn(*m, *k, |r, c| if r == c { 1.0 } else { 0.0 })
            }
            CatalogMap::Projection { m, k } => {
                Matrix::from_fn(*k, *m, |r, c| if r == c { 1.0 } else { 0.0 })
            }
            CatalogMap::FaceInclusion { dim, axis, .. } => {
                Matrix::from_fn(*dim, dim - 1, |r, c| {
                    let src = if r < *axis {
                        r
                    } else if r == *axis {
                        usize::MAX
                    } else {
                        r - 1
                    };
                    if src == c {
                        1.0
                    } else {
                        0.0
                    }
                })
            }
        };
        Ok(jac)
    }
}

/// `outer ∘ inner`.
#[derive(Clone)]
pub struct Composition {
    outer: SharedMap,
    inner: SharedMap,
}

impl Composition {
    pub fn new(outer: SharedMap, inner: SharedMap) -> Result<Self> {
        if inner.codomain_dim() != outer.domain_dim() {
            return Err(Error::DimensionMismatch {
                expected: outer.domain_dim(),
                got: inner.codomain_dim(),
            });
        }
        Ok(Self { outer, inner })
    }
}

impl DifferentiableMap for Composition {
    fn domain_dim(&self) -> usize {
        self.inner.domain_dim()
    }

    fn codomain_dim(&self) -> usize {
        self.outer.codomain_dim()
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.outer.eval(&self.inner.eval(x)?)
    }

    fn jacobian(&self, x: &[f64]) -> Result<Matrix> {
        let y = self.inner.eval(x)?;
        self.outer.jacobian(&y)?.mul(&self.inner.jacobian(x)?)
    }
}

/// `Σᵢ cᵢ fᵢ` over maps with a common signature.
#[derive(Clone)]
pub struct LinearCombination {
    terms: Vec<(f64, SharedMap)>,
}

impl LinearCombination {
    pub fn new(terms: Vec<(f64, SharedMap)>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?;
        let (n, m) = (first.1.domain_dim(), first.1.codomain_dim());
        for (_, f) in &terms {
            if f.domain_dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: f.domain_dim(),
                });
            }
            if f.codomain_dim() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: f.codomain_dim(),
                });
            }
        }
        Ok(Self { terms })
    }
}

impl DifferentiableMap for LinearCombination {
    fn domain_dim(&self) -> usize {
        self.terms[0].1.domain_dim()
    }

    fn codomain_dim(&self) -> usize {
        self.terms[0].1.codomain_dim()
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.codomain_dim()];
        for (c, f) in &self.terms {
            y.iter_mut().zip(f.eval(x)?).for_each(|(a, b)| *a += c * b);
        }
        Ok(y)
    }

    fn jacobian(&self, x: &[f64]) -> Result<Matrix> {
        let (n, m) = (self.domain_dim(), self.codomain_dim());
        let mut jac = Matrix::zeros(m, n);
        for (c, f) in &self.terms {
            let j = f.jacobian(x)?;
            for r in 0..m {
                for col in 0..n {
                    jac[(r, col)] += c * j[(r, col)];
                }
            }
        }
        Ok(jac)
    }
}

/// The tangent lift `t ↦ (ζ(t), ζ'(t))` of a curve into the `(y, ẏ)`
/// coordinates of the tangent bundle. The second-derivative rows use central
/// differences of the curve's Jacobian.
#[derive(Clone)]
pub struct TangentLift {
    curve: SharedMap,
}

impl TangentLift {
    pub fn new(curve: SharedMap) -> Result<Self> {
        if curve.domain_dim() != 1 {
            return Err(Error::InvalidDegree {
                k: curve.domain_dim(),
                m: 1,
            });
        }
        Ok(Self { curve })
    }
}

impl DifferentiableMap for TangentLift {
    fn domain_dim(&self) -> usize {
        1
    }

    fn codomain_dim(&self) -> usize {
        2 * self.curve.codomain_dim()
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = self.curve.eval(x)?;
        y.extend(self.curve.jacobian(x)?.column(0));
        Ok(y)
    }

    fn jacobian(&self, x: &[f64]) -> Result<Matrix> {
        let m = self.curve.codomain_dim();
        let h = 1e-6 * x[0].abs().max(1.0);
        let v = self.curve.jacobian(x)?.column(0);
        let vp = self.curve.jacobian(&[x[0] + h])?.column(0);
        let vm = self.curve.jacobian(&[x[0] - h])?.column(0);
        let mut jac = Matrix::zeros(2 * m, 1);
        for r in 0..m {
            jac[(r, 0)] = v[r];
            jac[(m + r, 0)] = (vp[r] - vm[r]) / (2.0 * h);
        }
        Ok(jac)
    }
}

/// Wraps a closure as a map with a finite-difference Jacobian.
pub struct FnMap<F> {
    domain_dim: usize,
    codomain_dim: usize,
    f: F,
}

impl<F> FnMap<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    pub fn new(domain_dim: usize, codomain_dim: usize, f: F) -> Self {
        Self {
            domain_dim,
            codomain_dim,
            f,
        }
    }
}

impl<F> DifferentiableMap for FnMap<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.domain_dim, x)?;
        let y = (self.f)(x);
        check_dim(self.codomain_dim, &y)?;
        Ok(y)
    }
}

impl<M: DifferentiableMap + ?Sized> DifferentiableMap for Box<M> {
    fn domain_dim(&self) -> usize {
        (**self).domain_dim()
    }

    fn codomain_dim(&self) -> usize {
        (**self).codomain_dim()
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).eval(x)
    }

    fn jacobian(&self, x: &[f64]) -> Result<Matrix> {
        (**self).jacobian(x)
    }
}
