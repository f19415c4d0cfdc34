//! Numerical checks of the change-of-variables formula, differentiation under
//! the integral sign, and Stokes' formula.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::Float;

use super::piece::{boundary_faces, integrate, Piece};
use super::{exterior_derivative_with, pullback, DerivativeMode, KForm};
use crate::error::{Error, Result};
use crate::maps::{CatalogMap, Composition, SharedMap};
use crate::quadrature::{pairwise_sum, QuadratureSpec};

/// `|Σ_faces ∫ η − ∫_Ω dη|` with closed-form partials where available.
pub fn verify_stokes(eta: &KForm, omega: &Piece, q: &QuadratureSpec) -> Result<f64> {
    verify_stokes_with(eta, omega, q, DerivativeMode::Analytic)
}

pub fn verify_stokes_with(
    eta: &KForm,
    omega: &Piece,
    q: &QuadratureSpec,
    mode: DerivativeMode,
) -> Result<f64> {
    if eta.degree() + 1 != omega.degree() {
        return Err(Error::InvalidDegree {
            k: eta.degree() + 1,
            m: omega.degree(),
        });
    }
    let d_eta = exterior_derivative_with(eta, mode)?;
    let interior = integrate(&d_eta, omega, q)?.value;
    let faces = boundary_faces(omega)?;
    let mut parts = Vec::with_capacity(faces.len());
    for face in &faces {
        parts.push(integrate(eta, face, q)?.value);
    }
    Ok((pairwise_sum(&parts) - interior).abs())
}

/// Change of variables for a catalog diffeomorphism with a catalog inverse.
pub fn verify_domain_transform(
    eta: &KForm,
    alpha: &CatalogMap,
    omega: &Piece,
    q: &QuadratureSpec,
) -> Result<f64> {
    let inverse = alpha.inverse()?.into_shared();
    verify_domain_transform_with_inverse(eta, alpha.clone().into_shared(), inverse, omega, q)
}

/// `|∫_Ω η − ∫_{α⁻¹(Ω)} α*η|`, where `α⁻¹(Ω)` is parametrized by `α⁻¹ ∘ Ω.map`.
///
/// `α` must preserve orientation; its Jacobian determinant is checked on a
/// grid of parameter points of `Ω`.
pub fn verify_domain_transform_with_inverse(
    eta: &KForm,
    alpha: SharedMap,
    alpha_inverse: SharedMap,
    omega: &Piece,
    q: &QuadratureSpec,
) -> Result<f64> {
    let m = eta.dim();
    if alpha.domain_dim() != m || alpha.codomain_dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: alpha.codomain_dim(),
        });
    }
    if alpha_inverse.domain_dim() != m || alpha_inverse.codomain_dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: alpha_inverse.codomain_dim(),
        });
    }
    let preimage_map: SharedMap = Arc::new(Composition::new(alpha_inverse, omega.map().clone())?);
    for t in sample_grid(omega.param_box(), 4) {
        let x = preimage_map.eval(&t)?;
        let det = alpha.jacobian(&x)?.det()?;
        if !(det > 0.0) {
            return Err(Error::OrientationViolation(det));
        }
    }
    let preimage = Piece::new_unchecked(
        omega.param_box().to_vec(),
        preimage_map,
        omega.orientation(),
    )?;
    let direct = integrate(eta, omega, q)?.value;
    let pulled = integrate(&pullback(eta, alpha)?, &preimage, q)?.value;
    Ok((direct - pulled).abs())
}

/// Cell midpoints of a uniform `n^k` grid.
fn sample_grid(param_box: &[(f64, f64)], n: usize) -> Vec<Vec<f64>> {
    let k = param_box.len();
    (0..n.pow(k as u32))
        .map(|flat| {
            let mut rest = flat;
            param_box
                .iter()
                .map(|&(lo, hi)| {
                    let i = rest % n;
                    rest /= n;
                    lo + (hi - lo) * (i as f64 + 0.5) / n as f64
                })
                .collect()
        })
        .collect()
}

/// Scalar time dependence `g(t)` with its closed-form derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeProfile {
    Constant,
    /// `g(t) = t`.
    Linear,
    /// `g(t) = sin(ω t)`.
    Sin {
        omega: f64,
    },
    /// `g(t) = cos(ω t)`.
    Cos {
        omega: f64,
    },
    /// `g(t) = exp(r t)`.
    Exp {
        rate: f64,
    },
}

impl TimeProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Linear => t,
            TimeProfile::Sin { omega } => (omega * t).sin(),
            TimeProfile::Cos { omega } => (omega * t).cos(),
            TimeProfile::Exp { rate } => (rate * t).exp(),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 0.0,
            TimeProfile::Linear => 1.0,
            TimeProfile::Sin { omega } => omega * (omega * t).cos(),
            TimeProfile::Cos { omega } => -omega * (omega * t).sin(),
            TimeProfile::Exp { rate } => rate * (rate * t).exp(),
        }
    }
}

/// A one-parameter family `η_t = Σ g_j(t) η_j`.
#[derive(Debug, Clone)]
pub struct FormFamily {
    terms: Vec<(TimeProfile, KForm)>,
}

impl FormFamily {
    pub fn new(terms: Vec<(TimeProfile, KForm)>) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty form family".into()))?;
        for (_, f) in &terms {
            if f.degree() != first.degree() || f.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.degree(),
                    got: f.degree(),
                });
            }
        }
        Ok(Self { terms })
    }

    pub fn at(&self, t: f64) -> Result<KForm> {
        self.combine(|g| g.value(t))
    }

    /// `∂η_t/∂t`.
    pub fn derivative_at(&self, t: f64) -> Result<KForm> {
        self.combine(|g| g.derivative(t))
    }

    fn combine(&self, weight: impl Fn(&TimeProfile) -> f64) -> Result<KForm> {
        let terms: Vec<(f64, &KForm)> = self.terms.iter().map(|(g, f)| (weight(g), f)).collect();
        KForm::linear_combination(&terms)
    }
}

/// `|(I(t₀+h) − I(t₀−h))/(2h) − ∫_Ω ∂η_t/∂t|` where `I(t) = ∫_Ω η_t`.
pub fn verify_leibniz(
    family: &FormFamily,
    omega: &Piece,
    t0: f64,
    dt_step: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    if !(dt_step > 0.0) {
        return Err(Error::InvalidParameter("dt_step must be positive".into()));
    }
    let plus = integrate(&family.at(t0 + dt_step)?, omega, q)?.value;
    let minus = integrate(&family.at(t0 - dt_step)?, omega, q)?.value;
    let exact = integrate(&family.derivative_at(t0)?, omega, q)?.value;
    Ok(((plus - minus) / (2.0 * dt_step) - exact).abs())
}
