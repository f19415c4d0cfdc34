//! Parameter-invariant functionals: Finsler length of curves, areal value of
//! k-pieces, reparametrization invariance and first variation.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::finsler::{hilbert_form, FinslerFunction};
use crate::forms::{integrate, Piece};
use crate::kvector::canonical_lift;
use crate::linalg::Matrix;
use crate::maps::{
    check_dim, Composition, DifferentiableMap, LinearCombination, SharedMap, TangentLift,
};
use crate::multiindex::binomial;
use crate::quadrature::{integrate_box, QuadratureSpec};

/// Dual-route agreement required when `F` is homogeneous.
pub const DUAL_ROUTE_TOLERANCE: f64 = 1e-10;

/// Homogeneity residual below which `F` counts as homogeneous on the data.
pub const HOMOGENEITY_TOLERANCE: f64 = 1e-11;

const HOMOGENEITY_LAMBDAS: [f64; 3] = [0.5, 2.0, 10.0];
const HOMOGENEITY_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveLength {
    pub value: f64,
    /// The same integral through the pulled-back Hilbert form.
    pub hilbert_value: f64,
    /// Whether `F` passed the homogeneity check along the curve. When it did
    /// not, the value depends on the parametrization.
    pub homogeneous: bool,
}

impl CurveLength {
    pub fn dual_residual(&self) -> f64 {
        (self.value - self.hilbert_value).abs()
    }
}

fn check_curve(f: &FinslerFunction, curve: &SharedMap) -> Result<()> {
    if f.fiber_degree() != 1 {
        return Err(Error::UnsupportedDegree(f.fiber_degree()));
    }
    if curve.domain_dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: curve.domain_dim(),
        });
    }
    check_dim(f.dim(), &vec![0.0; curve.codomain_dim()])
}

fn slit_to_immersion(t: &[f64]) -> impl FnOnce(Error) -> Error + '_ {
    move |e| match e {
        Error::SlitDomain => Error::ImmersionFailure(t.to_vec()),
        e => e,
    }
}

/// Homogeneity of `F` at fiber data drawn along the piece.
fn homogeneous_along(f: &FinslerFunction, samples: &[(Vec<f64>, Vec<f64>)]) -> Result<bool> {
    let mut worst = 0.0f64;
    for (y, v) in samples {
        for l in HOMOGENEITY_LAMBDAS {
            worst = worst.max(f.homogeneity_residual_at(y, v, l)?);
        }
    }
    Ok(worst <= HOMOGENEITY_TOLERANCE)
}

fn interior_samples(a: f64, b: f64) -> impl Iterator<Item = f64> {
    (0..HOMOGENEITY_SAMPLES)
        .map(move |i| a + (b - a) * (i as f64 + 0.5) / HOMOGENEITY_SAMPLES as f64)
}

/// `∫_a^b F(ζ(t), ζ'(t)) dt`, cross-checked against the integral of the
/// Hilbert form pulled back along the tangent lift of `ζ`.
pub fn curve_length(
    f: &FinslerFunction,
    curve: &SharedMap,
    interval: (f64, f64),
    q: &QuadratureSpec,
) -> Result<CurveLength> {
    check_curve(f, curve)?;
    let (a, b) = interval;
    let mut samples = Vec::with_capacity(HOMOGENEITY_SAMPLES);
    for t in interior_samples(a, b) {
        let v = curve.jacobian(&[t])?.column(0);
        let y = curve.eval(&[t])?;
        if f.eval(&y, &v).map_err(slit_to_immersion(&[t])).is_ok() {
            samples.push((y, v));
        }
    }
    let homogeneous = homogeneous_along(f, &samples)?;

    let value = integrate_box(&[interval], q, |t| {
        let y = curve.eval(t)?;
        let v = curve.jacobian(t)?.column(0);
        f.eval(&y, &v).map_err(slit_to_immersion(t))
    })?;

    let lift: SharedMap = Arc::new(TangentLift::new(curve.clone())?);
    let piece = Piece::new_unchecked(vec![interval], lift, 1)?;
    let hilbert_value = integrate(&hilbert_form(f)?, &piece, q)
        .map_err(|e| match e {
            Error::SlitDomain => Error::ImmersionFailure(vec![a, b]),
            e => e,
        })?
        .value;

    let out = CurveLength {
        value,
        hilbert_value,
        homogeneous,
    };
    if homogeneous && out.dual_residual() > DUAL_ROUTE_TOLERANCE * value.abs().max(1.0) {
        return Err(Error::DualRouteMismatch(out.dual_residual()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArealValue {
    pub value: f64,
    /// Nodes where the canonical lift vanished; they contribute zero.
    pub degenerate_nodes: usize,
    pub homogeneous: bool,
}

/// `∫ L(Ω(t), ±∂₁Ω ∧ … ∧ ∂ₖΩ) dt` over the parameter box, the sign being the
/// piece's orientation.
pub fn areal_value(l: &FinslerFunction, omega: &Piece, q: &QuadratureSpec) -> Result<ArealValue> {
    let k = omega.degree();
    let m = omega.ambient_dim();
    if k == 0 {
        return Err(Error::InvalidDegree { k, m });
    }
    if l.dim() != m || l.fiber_dim() != binomial(m, k) || l.fiber_degree() != k {
        return Err(Error::DimensionMismatch {
            expected: l.fiber_degree(),
            got: k,
        });
    }
    let sign = f64::from(omega.orientation());
    let lifted = |t: &[f64]| -> Result<(Vec<f64>, Vec<f64>)> {
        let y = omega.map().eval(t)?;
        let xi: Vec<f64> = canonical_lift(omega.map().as_ref(), t)?
            .comps()
            .iter()
            .map(|c| sign * c)
            .collect();
        Ok((y, xi))
    };

    let mut samples = Vec::new();
    for t in grid_midpoints(omega.param_box(), 4) {
        let (y, xi) = lifted(&t)?;
        if l.eval(&y, &xi).is_ok() {
            samples.push((y, xi));
        }
    }
    let homogeneous = homogeneous_along(l, &samples)?;

    let mut degenerate_nodes = 0;
    let value = integrate_box(omega.param_box(), q, |t| {
        let (y, xi) = lifted(t)?;
        match l.eval(&y, &xi) {
            Err(Error::SlitDomain) => {
                degenerate_nodes += 1;
                Ok(0.0)
            }
            r => r,
        }
    })?;
    Ok(ArealValue {
        value,
        degenerate_nodes,
        homogeneous,
    })
}

fn grid_midpoints(param_box: &[(f64, f64)], n: usize) -> Vec<Vec<f64>> {
    (0..n.pow(param_box.len() as u32))
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

/// Solves `ρ(s) = target` for increasing `ρ` by bracketing and bisection.
pub fn invert_monotone(rho: &SharedMap, target: f64) -> Result<f64> {
    let g = |s: f64| -> Result<f64> { Ok(rho.eval(&[s])?[0] - target) };
    let (mut lo, mut hi) = (target, target);
    let mut step = 1.0f64.max(target.abs());
    let g0 = g(target)?;
    if g0 == 0.0 {
        return Ok(target);
    }
    let mut found = false;
    for _ in 0..200 {
        if g0 < 0.0 {
            hi = target + step;
            if g(hi)? >= 0.0 {
                found = true;
                break;
            }
            lo = hi;
        } else {
            lo = target - step;
            if g(lo)? <= 0.0 {
                found = true;
                break;
            }
            hi = lo;
        }
        step *= 2.0;
    }
    if !found || !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidParameter(
            "reparametrization does not reach the interval".into(),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // pick the closer endpoint
    Ok(if g(lo)?.abs() <= g(hi)?.abs() { lo } else { hi })
}

/// `|L(ζ, [a, b]) − L(ζ∘ρ, ρ⁻¹[a, b])|` for an increasing reparametrization.
pub fn reparam_invariance_residual(
    f: &FinslerFunction,
    curve: &SharedMap,
    interval: (f64, f64),
    rho: &SharedMap,
    q: &QuadratureSpec,
) -> Result<f64> {
    if rho.domain_dim() != 1 || rho.codomain_dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: rho.codomain_dim(),
        });
    }
    let sa = invert_monotone(rho, interval.0)?;
    let sb = invert_monotone(rho, interval.1)?;
    let mut nodes = vec![sa, sb];
    integrate_box(&[(sa, sb)], q, |s| {
        nodes.push(s[0]);
        Ok(0.0)
    })?;
    for s in nodes {
        let d = rho.jacobian(&[s])?[(0, 0)];
        if !(d > 0.0) {
            return Err(Error::OrientationViolation(d));
        }
    }
    let original = curve_length(f, curve, interval, q)?;
    let composed: SharedMap = Arc::new(Composition::new(curve.clone(), rho.clone())?);
    let reparam = curve_length(f, &composed, (sa, sb), q)?;
    Ok((original.value - reparam.value).abs())
}

/// A variation field `V(t) = Σ cᵢ sin(π jᵢ (t − a)/(b − a)) e_{νᵢ}` vanishing
/// at both ends of `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationField {
    m: usize,
    interval: (f64, f64),
    /// `(coordinate, frequency, amplitude)`
    terms: Vec<(usize, u32, f64)>,
}

impl VariationField {
    pub fn new(m: usize, interval: (f64, f64), terms: Vec<(usize, u32, f64)>) -> Result<Self> {
        let (a, b) = interval;
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(
                "variation interval must have a < b".into(),
            ));
        }
        for &(c, j, amp) in &terms {
            if c >= m {
                return Err(Error::InvalidIndex { index: c + 1, m });
            }
            if j == 0 || !amp.is_finite() {
                return Err(Error::InvalidParameter(
                    "sine bump needs frequency ≥ 1 and finite amplitude".into(),
                ));
            }
        }
        Ok(Self { m, interval, terms })
    }

    pub fn zero(m: usize, interval: (f64, f64)) -> Result<Self> {
        Self::new(m, interval, Vec::new())
    }

    pub fn sine_bump(
        m: usize,
        interval: (f64, f64),
        coordinate: usize,
        frequency: u32,
        amplitude: f64,
    ) -> Result<Self> {
        Self::new(m, interval, vec![(coordinate, frequency, amplitude)])
    }

    /// Unit sine bumps of frequency 1..=4 in every coordinate direction.
    pub fn default_basis(m: usize, interval: (f64, f64)) -> Result<Vec<Self>> {
        let mut out = Vec::with_capacity(4 * m);
        for c in 0..m {
            for j in 1..=4 {
                out.push(Self::sine_bump(m, interval, c, j, 1.0)?);
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.2 == 0.0)
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    fn phase(&self, t: f64) -> f64 {
        PI * (t - self.interval.0) / (self.interval.1 - self.interval.0)
    }
}

impl DifferentiableMap for VariationField {
    fn domain_dim(&self) -> usize {
        1
    }

    fn codomain_dim(&self) -> usize {
        self.m
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(1, x)?;
        let mut v = vec![0.0; self.m];
        let p = self.phase(x[0]);
        for &(c, j, amp) in &self.terms {
            v[c] += amp * (f64::from(j) * p).sin();
        }
        Ok(v)
    }

    fn jacobian(&self, x: &[f64]) -> Result<Matrix> {
        check_dim(1, x)?;
        let mut jac = Matrix::zeros(self.m, 1);
        let p = self.phase(x[0]);
        let dp = PI / (self.interval.1 - self.interval.0);
        for &(c, j, amp) in &self.terms {
            let jf = f64::from(j);
            jac[(c, 0)] += amp * jf * dp * (jf * p).cos();
        }
        Ok(jac)
    }
}

/// Default differencing scale for [`first_variation`].
pub const DEFAULT_EPSILON: f64 = 1e-4;

/// Agreement required between the `ε` and `ε/2` difference quotients.
pub const VARIATION_CONSISTENCY: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstVariation {
    /// `(L(ζ + εV) − L(ζ − εV)) / 2ε`.
    pub value: f64,
    /// The same quotient at `ε/2`.
    pub half_step: f64,
    /// Whether the two quotients agree to [`VARIATION_CONSISTENCY`].
    pub consistent: bool,
}

fn perturbed(curve: &SharedMap, v: &VariationField, eps: f64) -> Result<SharedMap> {
    Ok(Arc::new(LinearCombination::new(vec![
        (1.0, curve.clone()),
        (eps, Arc::new(v.clone()) as SharedMap),
    ])?))
}

fn difference_quotient(
    f: &FinslerFunction,
    curve: &SharedMap,
    interval: (f64, f64),
    v: &VariationField,
    eps: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    let plus = curve_length(f, &perturbed(curve, v, eps)?, interval, q)?.value;
    let minus = curve_length(f, &perturbed(curve, v, -eps)?, interval, q)?.value;
    Ok((plus - minus) / (2.0 * eps))
}

/// Central-difference derivative of the length along `ζ + εV`.
pub fn first_variation(
    f: &FinslerFunction,
    curve: &SharedMap,
    interval: (f64, f64),
    v: &VariationField,
    eps: f64,
    q: &QuadratureSpec,
) -> Result<FirstVariation> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(
            "variation scale must be positive".into(),
        ));
    }
    if v.codomain_dim() != curve.codomain_dim() {
        return Err(Error::DimensionMismatch {
            expected: curve.codomain_dim(),
            got: v.codomain_dim(),
        });
    }
    if v.interval() != interval {
        return Err(Error::InvalidParameter(
            "variation field lives on a different interval".into(),
        ));
    }
    if v.is_zero() {
        return Ok(FirstVariation {
            value: 0.0,
            half_step: 0.0,
            consistent: true,
        });
    }
    let value = difference_quotient(f, curve, interval, v, eps, q)?;
    let half_step = difference_quotient(f, curve, interval, v, 0.5 * eps, q)?;
    Ok(FirstVariation {
        value,
        half_step,
        consistent: (value - half_step).abs() <= VARIATION_CONSISTENCY,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalResidual {
    /// `max |δL|` over the basis.
    pub value: f64,
    /// Basis members whose two difference quotients disagreed.
    pub inconsistent: usize,
}

pub fn extremal_residual(
    f: &FinslerFunction,
    curve: &SharedMap,
    interval: (f64, f64),
    basis: &[VariationField],
    eps: f64,
    q: &QuadratureSpec,
) -> Result<ExtremalResidual> {
    let mut out = ExtremalResidual {
        value: 0.0,
        inconsistent: 0,
    };
    for v in basis {
        let d = first_variation(f, curve, interval, v, eps, q)?;
        out.value = out.value.max(d.value.abs());
        out.inconsistent += usize::from(!d.consistent);
    }
    Ok(out)
}
