//! k-vectors in a chart, wedge products, and lifts of maps to the bundle of
//! k-vectors.
//!
//! A [`KVector`] stores one component per strictly increasing multi-index,
//! i.e. `Ξ = Σ_I Ξ^I ∂_{i₁}∧…∧∂_{i_k}` with `I` increasing. Lifting a map
//! acts on these components through the k-th compound matrix of its Jacobian.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, norm, Matrix};
use crate::maps::{check_dim, CatalogMap, DifferentiableMap, SharedMap};
use crate::multiindex::{binomial, combinations, MultiIndex};

#[derive(Debug, Clone, PartialEq)]
pub struct KVector {
    base: Vec<f64>,
    k: usize,
    comps: Vec<f64>,
}

impl KVector {
    pub fn new(base: Vec<f64>, k: usize, comps: Vec<f64>) -> Result<Self> {
        let m = base.len();
        if k < 1 || k > m {
            return Err(Error::InvalidDegree { k, m });
        }
        if comps.len() != binomial(m, k) {
            return Err(Error::DimensionMismatch {
                expected: binomial(m, k),
                got: comps.len(),
            });
        }
        if comps.iter().chain(&base).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("k-vector"));
        }
        Ok(Self { base, k, comps })
    }

    pub fn zero(base: Vec<f64>, k: usize) -> Result<Self> {
        let len = binomial(base.len(), k);
        Self::new(base, k, vec![0.0; len])
    }

    /// The basis k-vector `∂_I` at `base`.
    pub fn basis(base: Vec<f64>, index: &MultiIndex) -> Result<Self> {
        check_dim(index.dim(), &base)?;
        let mut v = Self::zero(base, index.degree())?;
        v.comps[index.rank()] = 1.0;
        Ok(v)
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn comps(&self) -> &[f64] {
        &self.comps
    }

    pub fn component(&self, index: &MultiIndex) -> f64 {
        self.comps[index.rank()]
    }

    pub fn norm(&self) -> f64 {
        norm(&self.comps)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.comps)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|&c| c == 0.0)
    }

    pub fn scaled(&self, lambda: f64) -> KVector {
        KVector {
            base: self.base.clone(),
            k: self.k,
            comps: self.comps.iter().map(|c| lambda * c).collect(),
        }
    }

    /// `self + lambda · other`; bases must agree.
    pub fn add_scaled(&self, lambda: f64, other: &KVector) -> Result<KVector> {
        self.check_compatible(other)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a + lambda * b)
            .collect();
        Ok(KVector {
            base: self.base.clone(),
            k: self.k,
            comps,
        })
    }

    fn check_compatible(&self, other: &KVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        if self.k != other.k {
            return Err(Error::InvalidDegree {
                k: other.k,
                m: other.dim(),
            });
        }
        Ok(())
    }

    /// Exterior product `self ∧ other` of a p-vector and a q-vector at one base.
    pub fn wedge(&self, other: &KVector) -> Result<KVector> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let m = self.dim();
        let (p, q) = (self.k, other.k);
        if p + q > m {
            return Err(Error::InvalidDegree { k: p + q, m });
        }
        let mut comps = vec![0.0; binomial(m, p + q)];
        for (r, target) in combinations(p + q, m).into_iter().enumerate() {
            let mut acc = 0.0;
            // split the target into positions taken by the left factor
            for left_pos in combinations(p, p + q) {
                let left: Vec<usize> = left_pos.iter().map(|&i| target[i] + 1).collect();
                let right: Vec<usize> = (0..p + q)
                    .filter(|i| !left_pos.contains(i))
                    .map(|i| target[i] + 1)
                    .collect();
                let inversions: usize = left_pos.iter().enumerate().map(|(a, &pos)| pos - a).sum();
                let sign = if inversions.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                let a = self.comps[MultiIndex::new(&left, m)?.rank()];
                let b = other.comps[MultiIndex::new(&right, m)?.rank()];
                acc += sign * a * b;
            }
            comps[r] = acc;
        }
        KVector::new(self.base.clone(), p + q, comps)
    }
}

/// Decomposable k-vector `v₁ ∧ … ∧ v_k` at `base`: component `I` is the minor
/// of the column matrix `[v₁ … v_k]` on rows `I`.
pub fn wedge(base: &[f64], vectors: &[&[f64]]) -> Result<KVector> {
    let m = base.len();
    let k = vectors.len();
    for v in vectors {
        check_dim(m, v)?;
    }
    let cols = Matrix::from_fn(m, k, |r, c| vectors[c][r]);
    wedge_columns(base.to_vec(), &cols)
}

fn wedge_columns(base: Vec<f64>, cols: &Matrix) -> Result<KVector> {
    let k = cols.cols();
    let all: Vec<usize> = (0..k).collect();
    let comps = combinations(k, cols.rows())
        .iter()
        .map(|rows| cols.minor(rows, &all))
        .collect();
    KVector::new(base, k, comps)
}

/// k-th compound matrix of an `m × n` matrix: the `C(m,k) × C(n,k)` matrix of
/// k×k minors, rows and columns in multi-index rank order.
pub fn compound_matrix(a: &Matrix, k: usize) -> Result<Matrix> {
    let (m, n) = (a.rows(), a.cols());
    if k > m.min(n) {
        return Err(Error::InvalidDegree { k, m: m.min(n) });
    }
    let rows = combinations(k, m);
    let cols = combinations(k, n);
    Ok(Matrix::from_fn(rows.len(), cols.len(), |r, c| {
        a.minor(&rows[r], &cols[c])
    }))
}

/// `ΛᵏT_x f · Ξ`, the push-forward of `Ξ` (based at `x`) to `f(x)`.
pub fn lift_kvector<M: DifferentiableMap + ?Sized>(f: &M, xi: &KVector) -> Result<KVector> {
    check_dim(f.domain_dim(), xi.base())?;
    let k = xi.degree();
    if k > f.codomain_dim() {
        return Err(Error::InvalidDegree {
            k,
            m: f.codomain_dim(),
        });
    }
    let y = f.eval(xi.base())?;
    let jac = f.jacobian(xi.base())?;
    if !jac.is_finite() {
        return Err(Error::MapEvaluation("non-finite Jacobian".into()));
    }
    let comps = compound_matrix(&jac, k)?.mul_vec(xi.comps())?;
    KVector::new(y, k, comps)
}

/// The canonical k-vector field on `Rⁿ`: `∂₁ ∧ … ∧ ∂_k` at `t`.
pub fn canonical_field(t: &[f64], k: usize) -> Result<KVector> {
    let m = t.len();
    KVector::basis(t.to_vec(), &MultiIndex::leading(k, m)?)
}

/// `Λᵏf(t) = ΛᵏT_t f · θ(t)` for `f` defined on `Rᵏ`; equals the wedge of the
/// Jacobian columns.
pub fn canonical_lift<M: DifferentiableMap + ?Sized>(f: &M, t: &[f64]) -> Result<KVector> {
    let k = f.domain_dim();
    check_dim(k, t)?;
    if k < 1 || k > f.codomain_dim() {
        return Err(Error::InvalidDegree {
            k,
            m: f.codomain_dim(),
        });
    }
    let jac = f.jacobian(t)?;
    if !jac.is_finite() {
        return Err(Error::MapEvaluation("non-finite Jacobian".into()));
    }
    wedge_columns(f.eval(t)?, &jac)
}

/// `ι_{k,m}` together with its left inverse `pr_{m,k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CanonicalInclusion {
    pub k: usize,
    pub m: usize,
}

impl CanonicalInclusion {
    pub fn new(k: usize, m: usize) -> Result<Self> {
        if k < 1 || k > m {
            return Err(Error::InvalidDegree { k, m });
        }
        Ok(Self { k, m })
    }

    pub fn include(&self, t: &[f64]) -> Result<Vec<f64>> {
        CatalogMap::Inclusion {
            k: self.k,
            m: self.m,
        }
        .eval(t)
    }

    pub fn project(&self, y: &[f64]) -> Result<Vec<f64>> {
        CatalogMap::Projection {
            m: self.m,
            k: self.k,
        }
        .eval(y)
    }

    pub fn inclusion_map(&self) -> CatalogMap {
        CatalogMap::Inclusion {
            k: self.k,
            m: self.m,
        }
    }

    pub fn projection_map(&self) -> CatalogMap {
        CatalogMap::Projection {
            m: self.m,
            k: self.k,
        }
    }
}

/// A chart adapted to the submanifold `S = {y^{k+1} = … = yᵐ = 0}`, given
/// relative to a fixed reference chart by its transition maps.
#[derive(Clone)]
pub struct AdaptedChart {
    inclusion: CanonicalInclusion,
    to_reference: SharedMap,
    from_reference: SharedMap,
}

impl AdaptedChart {
    /// The reference chart itself.
    pub fn reference(k: usize, m: usize) -> Result<Self> {
        let id: SharedMap = Arc::new(CatalogMap::Identity { dim: m });
        Ok(Self {
            inclusion: CanonicalInclusion::new(k, m)?,
            to_reference: id.clone(),
            from_reference: id,
        })
    }

    /// The chart `ȳ = A y`. `A` must keep `S` in place, i.e. its lower-left
    /// `(m−k) × k` block vanishes.
    pub fn linear(k: usize, a: Matrix) -> Result<Self> {
        let m = a.rows();
        let inclusion = CanonicalInclusion::new(k, m)?;
        if a.cols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: a.cols(),
            });
        }
        for r in k..m {
            for c in 0..k {
                if a[(r, c)] != 0.0 {
                    return Err(Error::InvalidParameter(
                        "chart change does not preserve the submanifold".into(),
                    ));
                }
            }
        }
        let inv = a.inverse()?;
        Ok(Self {
            inclusion,
            to_reference: Arc::new(CatalogMap::Linear { matrix: inv }),
            from_reference: Arc::new(CatalogMap::Linear { matrix: a }),
        })
    }

    pub fn degree(&self) -> usize {
        self.inclusion.k
    }

    pub fn dim(&self) -> usize {
        self.inclusion.m
    }

    pub fn to_reference(&self) -> &SharedMap {
        &self.to_reference
    }

    pub fn from_reference(&self) -> &SharedMap {
        &self.from_reference
    }

    /// The canonical section along `S` at `y` (this chart's coordinates):
    /// base `(y¹…yᵏ, 0…0)`, components `Ξ^{I₀} = 1`, all others 0.
    pub fn canonical_section(&self, y: &[f64], tol_surface: f64) -> Result<KVector> {
        let CanonicalInclusion { k, m } = self.inclusion;
        check_dim(m, y)?;
        let off = max_abs(&y[k..]);
        if off > tol_surface {
            return Err(Error::OffSubmanifold {
                point: y.to_vec(),
                residual: off,
            });
        }
        canonical_field(&self.inclusion.include(&self.inclusion.project(y)?)?, k)
    }

    /// [`canonical_section`](Self::canonical_section) expressed in the
    /// reference chart.
    pub fn canonical_section_in_reference(&self, y: &[f64], tol_surface: f64) -> Result<KVector> {
        lift_kvector(
            self.to_reference.as_ref(),
            &self.canonical_section(y, tol_surface)?,
        )
    }

    /// The canonical section as a map from `S` (reference coordinates
    /// `u ∈ Rᵏ`) into the induced chart `(ȳ^σ, ẏ^I)` of the k-vector bundle.
    pub fn section_map(&self) -> SectionMap {
        SectionMap {
            chart: self.clone(),
        }
    }
}

/// `u ↦ (ȳ(ι u), e_{I₀})`, valued in `R^{m + C(m,k)}`.
#[derive(Clone)]
pub struct SectionMap {
    chart: AdaptedChart,
}

impl DifferentiableMap for SectionMap {
    fn domain_dim(&self) -> usize {
        self.chart.degree()
    }

    fn codomain_dim(&self) -> usize {
        let (k, m) = (self.chart.degree(), self.chart.dim());
        m + binomial(m, k)
    }

    fn eval(&self, u: &[f64]) -> Result<Vec<f64>> {
        let (k, m) = (self.chart.degree(), self.chart.dim());
        let mut out = self
            .chart
            .from_reference
            .eval(&self.chart.inclusion.include(u)?)?;
        out.resize(m + binomial(m, k), 0.0);
        out[m] = 1.0;
        Ok(out)
    }

    fn jacobian(&self, u: &[f64]) -> Result<Matrix> {
        let (k, m) = (self.chart.degree(), self.chart.dim());
        let y = self.chart.inclusion.include(u)?;
        let jy = self.chart.from_reference.jacobian(&y)?;
        Ok(Matrix::from_fn(self.codomain_dim(), k, |r, c| {
            if r < m {
                jy[(r, c)]
            } else {
                0.0
            }
        }))
    }
}

/// Norm of `Ξ ∧ Ξ` for a bivector; zero exactly when `Ξ` is decomposable.
pub fn plucker_residual(xi: &KVector) -> Result<f64> {
    if xi.degree() != 2 {
        return Err(Error::UnsupportedDegree(xi.degree()));
    }
    if xi.dim() < 4 {
        // every bivector in dimension ≤ 3 is decomposable
        return Ok(0.0);
    }
    Ok(xi.wedge(xi)?.norm())
}
