//! Differential forms in a chart, their pullback and exterior derivative,
//! and integration over parametrized pieces.
//!
//! A [`KForm`] stores one [`Coefficient`] per increasing multi-index. The
//! coefficient catalog knows its own partial derivatives where that is cheap
//! (polynomials, trigonometric terms, sums and products); everything else
//! falls back on central differences with the form's `fd_step`.

mod partition;
mod piece;
mod verify;

pub use partition::PartitionOfUnity;
pub use piece::{boundary_faces, integrate, integrate_with_partition, Integral, Piece};
pub use verify::{
    verify_domain_transform, verify_domain_transform_with_inverse, verify_leibniz, verify_stokes,
    verify_stokes_with, FormFamily, TimeProfile,
};

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::maps::{check_dim, SharedMap};
use crate::multiindex::{binomial, enumerate_any, MultiIndex};
use crate::polynomial::Polynomial;

/// Default central-difference step for partials without a closed form.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// A user-supplied scalar function on chart coordinates.
pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, y: &[f64]) -> Result<f64>;

    /// Closed-form `∂/∂y^{var+1}`, if known.
    fn partial(&self, _var: usize) -> Option<Coefficient> {
        None
    }
}

/// Coefficient functions of a form.
#[derive(Clone)]
pub enum Coefficient {
    Zero,
    Constant(f64),
    Polynomial(Polynomial),
    /// `A·sin(ω·y + φ)`, or `A·cos(ω·y + φ)` when `cosine` is set.
    Trig {
        amplitude: f64,
        freq: Vec<f64>,
        phase: f64,
        cosine: bool,
    },
    Sum(Vec<(f64, Coefficient)>),
    Product(Box<Coefficient>, Box<Coefficient>),
    Field(Arc<dyn ScalarField>),
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Zero => f.write_str("Zero"),
            Coefficient::Constant(c) => write!(f, "Constant({c})"),
            Coefficient::Polynomial(p) => write!(f, "Polynomial({:?})", p.terms()),
            Coefficient::Trig {
                amplitude,
                freq,
                phase,
                cosine,
            } => {
                let name = if *cosine { "cos" } else { "sin" };
                write!(f, "{amplitude}·{name}({freq:?}·y + {phase})")
            }
            Coefficient::Sum(terms) => f.debug_list().entries(terms).finish(),
            Coefficient::Product(a, b) => write!(f, "({a:?})·({b:?})"),
            Coefficient::Field(_) => f.write_str("Field(..)"),
        }
    }
}

impl Coefficient {
    pub fn sin(amplitude: f64, freq: Vec<f64>, phase: f64) -> Self {
        Coefficient::Trig {
            amplitude,
            freq,
            phase,
            cosine: false,
        }
    }

    pub fn cos(amplitude: f64, freq: Vec<f64>, phase: f64) -> Self {
        Coefficient::Trig {
            amplitude,
            freq,
            phase,
            cosine: true,
        }
    }

    pub fn field(f: impl ScalarField + 'static) -> Self {
        Coefficient::Field(Arc::new(f))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Zero => true,
            Coefficient::Constant(c) => *c == 0.0,
            Coefficient::Polynomial(p) => p.terms().iter().all(|(c, _)| *c == 0.0),
            Coefficient::Trig { amplitude, .. } => *amplitude == 0.0,
            Coefficient::Sum(terms) => terms.iter().all(|(c, t)| *c == 0.0 || t.is_zero()),
            Coefficient::Product(a, b) => a.is_zero() || b.is_zero(),
            Coefficient::Field(_) => false,
        }
    }

    pub fn value(&self, y: &[f64]) -> Result<f64> {
        let v = match self {
            Coefficient::Zero => 0.0,
            Coefficient::Constant(c) => *c,
            Coefficient::Polynomial(p) => {
                check_dim(p.nvars(), y)?;
                p.eval(y)
            }
            Coefficient::Trig {
                amplitude,
                freq,
                phase,
                cosine,
            } => {
                check_dim(freq.len(), y)?;
                let arg = freq.iter().zip(y).map(|(w, x)| w * x).sum::<f64>() + phase;
                amplitude * if *cosine { arg.cos() } else { arg.sin() }
            }
            Coefficient::Sum(terms) => {
                let mut acc = 0.0;
                for (c, t) in terms {
                    acc += c * t.value(y)?;
                }
                acc
            }
            Coefficient::Product(a, b) => a.value(y)? * b.value(y)?,
            Coefficient::Field(f) => {
                check_dim(f.dim(), y)?;
                f.value(y)?
            }
        };
        if !v.is_finite() {
            return Err(Error::NonFinite("form coefficient"));
        }
        Ok(v)
    }

    /// Closed-form partial derivative, if every constituent has one.
    pub fn analytic_partial(&self, var: usize) -> Option<Coefficient> {
        Some(match self {
            Coefficient::Zero | Coefficient::Constant(_) => Coefficient::Zero,
            Coefficient::Polynomial(p) => Coefficient::Polynomial(p.partial(var)),
            Coefficient::Trig {
                amplitude,
                freq,
                phase,
                cosine,
            } => {
                let w = *freq.get(var)?;
                if w == 0.0 {
                    return Some(Coefficient::Zero);
                }
                // d sin = cos, d cos = −sin
                let sign = if *cosine { -1.0 } else { 1.0 };
                Coefficient::Trig {
                    amplitude: sign * amplitude * w,
                    freq: freq.clone(),
                    phase: *phase,
                    cosine: !cosine,
                }
            }
            Coefficient::Sum(terms) => {
                let mut out = Vec::with_capacity(terms.len());
                for (c, t) in terms {
                    let d = t.analytic_partial(var)?;
                    if !d.is_zero() {
                        out.push((*c, d));
                    }
                }
                simplify_sum(out)
            }
            Coefficient::Product(a, b) => {
                let da = a.analytic_partial(var)?;
                let db = b.analytic_partial(var)?;
                let mut out = Vec::new();
                if !da.is_zero() {
                    out.push((1.0, Coefficient::Product(Box::new(da), b.clone())));
                }
                if !db.is_zero() {
                    out.push((1.0, Coefficient::Product(a.clone(), Box::new(db))));
                }
                simplify_sum(out)
            }
            Coefficient::Field(f) => f.partial(var)?,
        })
    }

    /// `∂/∂y^{var+1}` on `Rᵐ` in the requested mode. Missing closed forms
    /// become a central difference with step `fd_step`.
    pub fn partial(&self, m: usize, var: usize, mode: DerivativeMode, fd_step: f64) -> Coefficient {
        if mode == DerivativeMode::Analytic {
            if let Some(d) = self.analytic_partial(var) {
                return d;
            }
        }
        if self.is_zero() {
            return Coefficient::Zero;
        }
        Coefficient::Field(Arc::new(FdPartial {
            inner: self.clone(),
            m,
            var,
            step: fd_step,
        }))
    }
}

fn simplify_sum(terms: Vec<(f64, Coefficient)>) -> Coefficient {
    match terms.len() {
        0 => Coefficient::Zero,
        1 if terms[0].0 == 1.0 => terms
            .into_iter()
            .next()
            .map(|t| t.1)
            .unwrap_or(Coefficient::Zero),
        _ => Coefficient::Sum(terms),
    }
}

impl From<f64> for Coefficient {
    fn from(c: f64) -> Self {
        Coefficient::Constant(c)
    }
}

impl From<Polynomial> for Coefficient {
    fn from(p: Polynomial) -> Self {
        Coefficient::Polynomial(p)
    }
}

struct FdPartial {
    inner: Coefficient,
    m: usize,
    var: usize,
    step: f64,
}

impl ScalarField for FdPartial {
    fn dim(&self) -> usize {
        self.m
    }

    fn value(&self, y: &[f64]) -> Result<f64> {
        let h = self.step * y[self.var].abs().max(1.0);
        let mut yp = y.to_vec();
        yp[self.var] = y[self.var] + h;
        let fp = self.inner.value(&yp)?;
        yp[self.var] = y[self.var] - h;
        let fm = self.inner.value(&yp)?;
        Ok((fp - fm) / (2.0 * h))
    }
}

/// How the exterior derivative obtains coefficient partials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeMode {
    /// Closed forms where the catalog has them, central differences elsewhere.
    #[default]
    Analytic,
    /// Central differences throughout.
    FiniteDifference,
}

/// A differential k-form `Σ_I η_I dy^I` on an open subset of `Rᵐ`.
#[derive(Debug, Clone)]
pub struct KForm {
    k: usize,
    m: usize,
    coeffs: Vec<Coefficient>,
    fd_step: f64,
}

impl KForm {
    /// Coefficients are listed in increasing multi-index order. `k = 0`
    /// takes a single coefficient, the function itself.
    pub fn new(k: usize, m: usize, coeffs: Vec<Coefficient>) -> Result<Self> {
        if k > m {
            return Err(Error::InvalidDegree { k, m });
        }
        let n = binomial(m, k);
        if coeffs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: coeffs.len(),
            });
        }
        Ok(Self {
            k,
            m,
            coeffs,
            fd_step: DEFAULT_FD_STEP,
        })
    }

    pub fn zero(k: usize, m: usize) -> Result<Self> {
        Self::new(k, m, vec![Coefficient::Zero; binomial(m, k)])
    }

    /// Builds a form from `(index, coefficient)` pairs; repeated indices add.
    pub fn from_terms(k: usize, m: usize, terms: Vec<(MultiIndex, Coefficient)>) -> Result<Self> {
        let mut form = Self::zero(k, m)?;
        for (index, c) in terms {
            if index.degree() != k || index.dim() != m {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: index.degree(),
                });
            }
            let slot = &mut form.coeffs[index.rank()];
            *slot = match core::mem::replace(slot, Coefficient::Zero) {
                Coefficient::Zero => c,
                prev => Coefficient::Sum(vec![(1.0, prev), (1.0, c)]),
            };
        }
        Ok(form)
    }

    /// A 0-form.
    pub fn function(m: usize, f: impl Into<Coefficient>) -> Self {
        Self {
            k: 0,
            m,
            coeffs: vec![f.into()],
            fd_step: DEFAULT_FD_STEP,
        }
    }

    /// `f dy¹ ∧ … ∧ dy^m`.
    pub fn top(m: usize, f: impl Into<Coefficient>) -> Self {
        Self {
            k: m,
            m,
            coeffs: vec![f.into()],
            fd_step: DEFAULT_FD_STEP,
        }
    }

    pub fn with_fd_step(mut self, fd_step: f64) -> Result<Self> {
        if !(fd_step > 0.0) || !fd_step.is_finite() {
            return Err(Error::InvalidParameter("fd_step must be positive".into()));
        }
        self.fd_step = fd_step;
        Ok(self)
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn coeffs(&self) -> &[Coefficient] {
        &self.coeffs
    }

    pub fn coefficient(&self, index: &MultiIndex) -> &Coefficient {
        &self.coeffs[index.rank()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coefficient::is_zero)
    }

    /// Coefficient values at `y`, in increasing multi-index order.
    pub fn evaluate(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.m, y)?;
        self.coeffs.iter().map(|c| c.value(y)).collect()
    }

    pub fn scaled(&self, c: f64) -> KForm {
        self.map_coeffs(|coef| {
            if coef.is_zero() {
                Coefficient::Zero
            } else {
                Coefficient::Sum(vec![(c, coef.clone())])
            }
        })
    }

    /// `Σ cᵢ ηᵢ` over forms of equal degree and dimension.
    pub fn linear_combination(terms: &[(f64, &KForm)]) -> Result<KForm> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?;
        let mut coeffs = Vec::with_capacity(first.coeffs.len());
        for (idx, _) in first.coeffs.iter().enumerate() {
            let mut parts = Vec::new();
            for (c, form) in terms {
                if form.k != first.k || form.m != first.m {
                    return Err(Error::DimensionMismatch {
                        expected: first.k,
                        got: form.k,
                    });
                }
                if !form.coeffs[idx].is_zero() {
                    parts.push((*c, form.coeffs[idx].clone()));
                }
            }
            coeffs.push(if parts.is_empty() {
                Coefficient::Zero
            } else {
                Coefficient::Sum(parts)
            });
        }
        Ok(KForm {
            k: first.k,
            m: first.m,
            coeffs,
            fd_step: first.fd_step,
        })
    }

    fn map_coeffs(&self, f: impl Fn(&Coefficient) -> Coefficient) -> KForm {
        KForm {
            k: self.k,
            m: self.m,
            coeffs: self.coeffs.iter().map(f).collect(),
            fd_step: self.fd_step,
        }
    }

    /// Largest gap between closed-form partials and central differences over
    /// the given points. Coefficients without closed forms are skipped.
    pub fn check_partials(&self, points: &[Vec<f64>]) -> Result<f64> {
        let mut worst = 0.0f64;
        for c in &self.coeffs {
            for var in 0..self.m {
                let Some(d) = c.analytic_partial(var) else {
                    continue;
                };
                let fd = c.partial(self.m, var, DerivativeMode::FiniteDifference, self.fd_step);
                for y in points {
                    worst = worst.max((d.value(y)? - fd.value(y)?).abs());
                }
            }
        }
        Ok(worst)
    }
}

/// `dη`, using closed-form partials where available.
pub fn exterior_derivative(eta: &KForm) -> Result<KForm> {
    exterior_derivative_with(eta, DerivativeMode::Analytic)
}

/// `dη = Σ_I Σ_ν ∂_ν η_I dy^ν ∧ dy^I`, sorted into increasing indices.
pub fn exterior_derivative_with(eta: &KForm, mode: DerivativeMode) -> Result<KForm> {
    let (k, m) = (eta.k, eta.m);
    if k + 1 > m {
        return Err(Error::InvalidDegree { k: k + 1, m });
    }
    let mut parts: Vec<Vec<(f64, Coefficient)>> = vec![Vec::new(); binomial(m, k + 1)];
    for (index, c) in enumerate_any(k, m).iter().zip(&eta.coeffs) {
        if c.is_zero() {
            continue;
        }
        for nu in 1..=m {
            let Some((target, sign)) = index.insert_front(nu) else {
                continue;
            };
            let d = c.partial(m, nu - 1, mode, eta.fd_step);
            if !d.is_zero() {
                parts[target.rank()].push((sign, d));
            }
        }
    }
    let coeffs = parts
        .into_iter()
        .map(|p| {
            if p.is_empty() {
                Coefficient::Zero
            } else {
                Coefficient::Sum(p)
            }
        })
        .collect();
    Ok(KForm {
        k: k + 1,
        m,
        coeffs,
        fd_step: eta.fd_step,
    })
}

/// Lazy pullback `f*η`: each coefficient evaluates
/// `Σ_I η_I(f(t)) · det(∂f^I/∂t^J)` on demand.
pub fn pullback(eta: &KForm, f: SharedMap) -> Result<KForm> {
    let n = f.domain_dim();
    if eta.k > n {
        return Err(Error::InvalidDegree { k: eta.k, m: n });
    }
    if f.codomain_dim() != eta.m {
        return Err(Error::DimensionMismatch {
            expected: eta.m,
            got: f.codomain_dim(),
        });
    }
    let form = Arc::new(eta.clone());
    let coeffs = enumerate_any(eta.k, n)
        .into_iter()
        .map(|target| {
            Coefficient::Field(Arc::new(PullbackField {
                form: form.clone(),
                map: f.clone(),
                target,
            }))
        })
        .collect();
    Ok(KForm {
        k: eta.k,
        m: n,
        coeffs,
        fd_step: eta.fd_step,
    })
}

/// Pullback coefficients at `t`, in increasing multi-index order over the
/// domain of `f`.
pub fn pullback_coefficients(eta: &KForm, f: &SharedMap, t: &[f64]) -> Result<Vec<f64>> {
    let n = f.domain_dim();
    if eta.k > n {
        return Err(Error::InvalidDegree { k: eta.k, m: n });
    }
    let y = f.eval(t)?;
    let values = eta.evaluate(&y)?;
    let jac = f.jacobian(t)?;
    Ok(enumerate_any(eta.k, n)
        .iter()
        .map(|target| contract(eta, &values, &jac, target))
        .collect())
}

fn contract(eta: &KForm, values: &[f64], jac: &crate::Matrix, target: &MultiIndex) -> f64 {
    let cols = target.zero_based();
    enumerate_any(eta.k, eta.m)
        .iter()
        .zip(values)
        .filter(|(_, v)| **v != 0.0)
        .map(|(index, v)| v * jac.minor(&index.zero_based(), &cols))
        .sum()
}

struct PullbackField {
    form: Arc<KForm>,
    map: SharedMap,
    target: MultiIndex,
}

impl ScalarField for PullbackField {
    fn dim(&self) -> usize {
        self.map.domain_dim()
    }

    fn value(&self, t: &[f64]) -> Result<f64> {
        let y = self.map.eval(t)?;
        let values = self.form.evaluate(&y)?;
        let jac = self.map.jacobian(t)?;
        Ok(contract(&self.form, &values, &jac, &self.target))
    }
}
