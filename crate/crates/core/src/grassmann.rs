//! The Grassmann fibration: nonzero k-vectors up to positive scaling.
//!
//! A ray `[Ξ]` is stored in a pivot chart. For a pivot multi-index `ν` with
//! `Ξ^ν ≠ 0` the normalized coordinates are `w^I = Ξ^I / |Ξ^ν|`, so that
//! `w^ν = ±1`. The sign is kept as `pivot_sign`: together the pair
//! `(ν, sign)` names one of the two half-charts `{±Ξ^ν > 0}`, which keeps
//! `[Ξ]` and `[−Ξ]` apart without reordering indices.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kvector::{canonical_lift, KVector};
use crate::linalg::max_abs;
use crate::maps::{check_dim, DifferentiableMap};
use crate::multiindex::MultiIndex;

#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannPoint {
    base: Vec<f64>,
    k: usize,
    pivot: MultiIndex,
    pivot_sign: i8,
    w: Vec<f64>,
}

impl GrassmannPoint {
    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn pivot(&self) -> &MultiIndex {
        &self.pivot
    }

    pub fn pivot_sign(&self) -> i8 {
        self.pivot_sign
    }

    /// All normalized components in rank order, including `w^ν = ±1`.
    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// The fibre coordinates of the chart: every `w^I` with `I ≠ ν`.
    pub fn fibre_coordinates(&self) -> Vec<f64> {
        let skip = self.pivot.rank();
        self.w
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, &x)| x)
            .collect()
    }

    /// The representative k-vector with `|Ξ^ν| = 1`.
    pub fn representative(&self) -> KVector {
        // invariants were checked when the point was built
        KVector::new(self.base.clone(), self.k, self.w.clone()).expect("valid representative")
    }

    /// Largest coordinate gap to `other` after moving `other` into this
    /// point's pivot chart.
    pub fn distance(&self, other: &GrassmannPoint) -> Result<f64> {
        check_dim(self.base.len(), &other.base)?;
        let other = grassmann_transition(other, &self.pivot, 0.0)?;
        let dw = self
            .w
            .iter()
            .zip(&other.w)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        let db = self
            .base
            .iter()
            .zip(&other.base)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        let sign_gap = if self.pivot_sign == other.pivot_sign {
            0.0
        } else {
            2.0
        };
        Ok(dw.max(db).max(sign_gap))
    }
}

/// Whether `Ξ₁ = λ Ξ₂` for some `λ > 0`, to relative tolerance `tol`.
pub fn equivalent(xi1: &KVector, xi2: &KVector, tol: f64) -> Result<bool> {
    if xi1.dim() != xi2.dim() {
        return Err(Error::DimensionMismatch {
            expected: xi1.dim(),
            got: xi2.dim(),
        });
    }
    if xi1.degree() != xi2.degree() {
        return Err(Error::InvalidDegree {
            k: xi2.degree(),
            m: xi2.dim(),
        });
    }
    if xi1.is_zero() || xi2.is_zero() {
        return Err(Error::ZeroVector);
    }
    let base_gap = xi1
        .base()
        .iter()
        .zip(xi2.base())
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    if base_gap > tol * max_abs(xi1.base()).max(1.0) {
        return Ok(false);
    }
    let r = argmax_abs(xi2.comps());
    let lambda = xi1.comps()[r] / xi2.comps()[r];
    if !(lambda > 0.0) {
        return Ok(false);
    }
    let gap = xi1
        .comps()
        .iter()
        .zip(xi2.comps())
        .fold(0.0f64, |acc, (a, b)| acc.max((a - lambda * b).abs()));
    Ok(gap <= tol * xi1.max_abs())
}

/// Index of the largest |entry|; ties go to the lowest index.
fn argmax_abs(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

/// Normalizes `Ξ` in the chart of `pivot`, or of its largest component when
/// no pivot is requested.
pub fn to_grassmann(xi: &KVector, pivot: Option<&MultiIndex>) -> Result<GrassmannPoint> {
    if xi.is_zero() {
        return Err(Error::ZeroVector);
    }
    let m = xi.dim();
    let k = xi.degree();
    let pivot = match pivot {
        Some(p) => {
            if p.degree() != k || p.dim() != m {
                return Err(Error::InvalidDegree {
                    k: p.degree(),
                    m: p.dim(),
                });
            }
            if xi.component(p) == 0.0 {
                return Err(Error::PivotDegenerate);
            }
            p.clone()
        }
        None => MultiIndex::from_rank(argmax_abs(xi.comps()), k, m)?,
    };
    let r = pivot.rank();
    let p = xi.comps()[r];
    let scale = p.abs();
    let sign: i8 = if p > 0.0 { 1 } else { -1 };
    let mut w: Vec<f64> = xi.comps().iter().map(|c| c / scale).collect();
    w[r] = f64::from(sign);
    Ok(GrassmannPoint {
        base: xi.base().to_vec(),
        k,
        pivot,
        pivot_sign: sign,
        w,
    })
}

/// The projection `κᵏ` from nonzero k-vectors to rays.
pub fn project_kappa(xi: &KVector) -> Result<GrassmannPoint> {
    to_grassmann(xi, None)
}

/// Re-expresses `p` in the chart of `new_pivot`. Fails when `|w^{ν'}|` does
/// not exceed `tol_pivot`.
pub fn grassmann_transition(
    p: &GrassmannPoint,
    new_pivot: &MultiIndex,
    tol_pivot: f64,
) -> Result<GrassmannPoint> {
    if new_pivot.degree() != p.k || new_pivot.dim() != p.base.len() {
        return Err(Error::InvalidDegree {
            k: new_pivot.degree(),
            m: new_pivot.dim(),
        });
    }
    if *new_pivot == p.pivot {
        return Ok(p.clone());
    }
    let r = new_pivot.rank();
    let v = p.w[r];
    if v == 0.0 || v.abs() <= tol_pivot {
        return Err(Error::NotInChart(v));
    }
    let scale = v.abs();
    let sign: i8 = if v > 0.0 { 1 } else { -1 };
    let mut w: Vec<f64> = p.w.iter().map(|c| c / scale).collect();
    w[r] = f64::from(sign);
    Ok(GrassmannPoint {
        base: p.base.clone(),
        k: p.k,
        pivot: new_pivot.clone(),
        pivot_sign: sign,
        w,
    })
}

/// `Gᵏf(t) = κᵏ(Λᵏf(t))`.
pub fn grassmann_canonical_lift<M: DifferentiableMap + ?Sized>(
    f: &M,
    t: &[f64],
) -> Result<GrassmannPoint> {
    let xi = canonical_lift(f, t)?;
    project_kappa(&xi).map_err(|e| match e {
        Error::ZeroVector => Error::ImmersionFailure(t.to_vec()),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::CatalogMap;
    use crate::polynomial::Polynomial;
    use alloc::vec;
    use proptest::prelude::*;

    fn kv(comps: &[f64]) -> KVector {
        KVector::new(vec![0.0; 3], 2, comps.to_vec()).unwrap()
    }

    fn mi(t: &[usize]) -> MultiIndex {
        MultiIndex::new(t, 3).unwrap()
    }

    #[test]
    fn equivalence_examples() {
        let xi = kv(&[1.0, -2.0, 0.5]);
        assert!(equivalent(&xi, &xi.scaled(2.0), 1e-12).unwrap());
        assert!(!equivalent(&xi, &xi.scaled(-1.0), 1e-12).unwrap());
        assert!(!equivalent(&kv(&[1.0, 0.0, 0.0]), &kv(&[0.0, 1.0, 0.0]), 1e-12).unwrap());
        assert_eq!(
            equivalent(&xi, &kv(&[0.0; 3]), 1e-12),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn normalization_example() {
        let p = to_grassmann(&kv(&[2.0, 4.0, -6.0]), None).unwrap();
        assert_eq!(p.pivot(), &mi(&[2, 3]));
        assert_eq!(p.pivot_sign(), -1);
        // w = Ξ / |Ξ^ν| keeps the ray: Ξ = 6 w
        let expected = [1.0 / 3.0, 2.0 / 3.0, -1.0];
        for (a, b) in p.w().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(p.fibre_coordinates().len(), 2);
    }

    #[test]
    fn normalization_errors() {
        assert_eq!(to_grassmann(&kv(&[0.0; 3]), None), Err(Error::ZeroVector));
        assert_eq!(
            to_grassmann(&kv(&[1.0, 0.0, 2.0]), Some(&mi(&[1, 3]))),
            Err(Error::PivotDegenerate)
        );
    }

    #[test]
    fn ties_pick_lowest_rank() {
        let p = to_grassmann(&kv(&[3.0, -3.0, 1.0]), None).unwrap();
        assert_eq!(p.pivot(), &mi(&[1, 2]));
    }

    #[test]
    fn canonical_section_projects_to_leading_chart() {
        let xi = KVector::basis(vec![0.0; 4], &MultiIndex::leading(2, 4).unwrap()).unwrap();
        let p = project_kappa(&xi).unwrap();
        assert_eq!(p.pivot(), &MultiIndex::leading(2, 4).unwrap());
        assert_eq!(p.w(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn transition_examples() {
        let p = to_grassmann(&kv(&[1.0, 0.5, 0.25]), Some(&mi(&[1, 2]))).unwrap();
        let q = grassmann_transition(&p, &mi(&[1, 3]), 1e-14).unwrap();
        assert_eq!(q.pivot_sign(), 1);
        assert_eq!(q.w(), &[2.0, 1.0, 0.5]);
        assert_eq!(grassmann_transition(&p, &mi(&[1, 2]), 1e-14).unwrap(), p);
        let z = to_grassmann(&kv(&[1.0, 0.0, 0.25]), None).unwrap();
        assert_eq!(
            grassmann_transition(&z, &mi(&[1, 3]), 1e-14),
            Err(Error::NotInChart(0.0))
        );
    }

    #[test]
    fn lift_of_inclusion_is_leading_chart() {
        let p =
            grassmann_canonical_lift(&CatalogMap::Inclusion { k: 2, m: 3 }, &[0.2, 0.4]).unwrap();
        assert_eq!(p.pivot(), &mi(&[1, 2]));
        assert_eq!(p.w(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn degenerate_immersion_is_reported() {
        // t ↦ (t³, 0) has zero velocity at 0
        let cusp = CatalogMap::polynomial(vec![
            Polynomial::new(1, vec![(1.0, vec![3])]).unwrap(),
            Polynomial::zero(1),
        ])
        .unwrap();
        assert_eq!(
            grassmann_canonical_lift(&cusp, &[0.0]),
            Err(Error::ImmersionFailure(vec![0.0]))
        );
    }

    proptest! {
        #[test]
        fn ray_invariance(c in proptest::collection::vec(-5.0f64..5.0, 6), lambda in 1e-3f64..1e3) {
            let xi = KVector::new(vec![0.1, 0.2, 0.3, 0.4], 2, c).unwrap();
            prop_assume!(xi.max_abs() > 1e-6);
            let a = to_grassmann(&xi, None).unwrap();
            let b = to_grassmann(&xi.scaled(lambda), None).unwrap();
            prop_assert_eq!(a.pivot(), b.pivot());
            prop_assert_eq!(a.pivot_sign(), b.pivot_sign());
            for (x, y) in a.w().iter().zip(b.w()) {
                prop_assert!((x - y).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0));
            }
        }

        #[test]
        fn chart_consistency(c in proptest::collection::vec(-5.0f64..5.0, 6), r1 in 0usize..6, r2 in 0usize..6) {
            let xi = KVector::new(vec![0.0; 4], 2, c).unwrap();
            let n1 = MultiIndex::from_rank(r1, 2, 4).unwrap();
            let n2 = MultiIndex::from_rank(r2, 2, 4).unwrap();
            prop_assume!(xi.component(&n1).abs() > 1e-3 && xi.component(&n2).abs() > 1e-3);
            let via = grassmann_transition(&to_grassmann(&xi, Some(&n1)).unwrap(), &n2, 0.0).unwrap();
            let direct = to_grassmann(&xi, Some(&n2)).unwrap();
            prop_assert_eq!(via.pivot_sign(), direct.pivot_sign());
            for (x, y) in via.w().iter().zip(direct.w()) {
                prop_assert!((x - y).abs() <= 1e-13 * x.abs().max(1.0));
            }
            prop_assert!(equivalent(&via.representative(), &xi, 1e-13).unwrap());
        }
    }
}
