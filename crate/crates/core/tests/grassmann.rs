mod common;

use areal_core::grassmann::{
    equivalent, grassmann_canonical_lift, grassmann_transition, to_grassmann,
};
use areal_core::maps::Composition;
use areal_core::multiindex::binomial;
use areal_core::polynomial::Polynomial;
use areal_core::{CatalogMap, KVector, Matrix, MultiIndex, SharedMap};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_kvector(rng: &mut ChaCha8Rng) -> KVector {
    let m = rng.gen_range(2..=5);
    let k = rng.gen_range(1..m);
    KVector::new(random_vec(rng, m), k, random_vec(rng, binomial(m, k))).unwrap()
}

#[test]
fn rays_are_invariant_under_positive_scaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..200 {
        let xi = random_kvector(&mut rng);
        let p = to_grassmann(&xi, None).unwrap();
        // powers of two scale without rounding
        for e in [-20, -3, 1, 7, 30] {
            let q = to_grassmann(&xi.scaled(2f64.powi(e)), None).unwrap();
            assert_eq!(p, q);
        }
        let lambda = rng.gen_range(1e-3..1e3);
        let q = to_grassmann(&xi.scaled(lambda), None).unwrap();
        assert_eq!(p.pivot(), q.pivot());
        assert!(max_abs_diff(p.w(), q.w()) <= 4.0 * f64::EPSILON);
        let neg = to_grassmann(&xi.scaled(-lambda), None).unwrap();
        assert_eq!(neg.pivot_sign(), -p.pivot_sign());
    }
}

#[test]
fn chart_transitions_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let xi = random_kvector(&mut rng);
        let (k, m) = (xi.degree(), xi.dim());
        let p = to_grassmann(&xi, None).unwrap();
        let other = MultiIndex::from_rank(rng.gen_range(0..binomial(m, k)), k, m).unwrap();
        let Ok(q) = grassmann_transition(&p, &other, 1e-6) else {
            continue;
        };
        let back = grassmann_transition(&q, p.pivot(), 1e-6).unwrap();
        assert_eq!(back.pivot_sign(), p.pivot_sign());
        worst = worst.max(max_abs_diff(back.w(), p.w()));
        // the transition stays on the same ray
        assert!(equivalent(&q.representative(), &xi, 1e-13).unwrap());
    }
    assert!(worst <= 1e-13, "{worst:e}");
}

#[test]
fn transition_out_of_chart_is_refused() {
    let xi = KVector::new(vec![0.0; 3], 2, vec![1.0, 0.0, 2.0]).unwrap();
    let p = to_grassmann(&xi, None).unwrap();
    let nu = MultiIndex::new(&[1, 3], 3).unwrap();
    assert!(grassmann_transition(&p, &nu, 1e-12).is_err());
}

/// `t ↦ t + 0.3 sin t` and a cubic shear of the plane, both with positive
/// Jacobian determinant everywhere.
fn positive_reparametrizations() -> Vec<SharedMap> {
    let one = CatalogMap::sine_shift(0.3).into_shared();
    // det = 0.8 + 0.24u² − 0.04u > 0
    let u_part = Polynomial::new(
        2,
        vec![(1.0, vec![1, 0]), (0.2, vec![0, 1]), (0.1, vec![3, 0])],
    )
    .unwrap();
    let v_part = Polynomial::new(2, vec![(0.8, vec![0, 1]), (0.1, vec![2, 0])]).unwrap();
    let two = CatalogMap::polynomial(vec![u_part, v_part])
        .unwrap()
        .into_shared();
    vec![one, two]
}

#[test]
fn grassmann_lifts_are_invariant_under_orientation_preserving_reparametrization() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let reparams = positive_reparametrizations();
    let mut worst = 0.0f64;
    for _ in 0..40 {
        for rho in &reparams {
            let k = rho.domain_dim();
            let m = rng.gen_range(k + 1..=4);
            let f = random_catalog_map(&mut rng, k, m);
            let fr = Composition::new(f.clone(), rho.clone()).unwrap();
            let s = random_vec(&mut rng, k);
            let t = rho.eval(&s).unwrap();
            let (Ok(a), Ok(b)) = (
                grassmann_canonical_lift(&fr, &s),
                grassmann_canonical_lift(f.as_ref(), &t),
            ) else {
                continue;
            };
            worst = worst.max(a.distance(&b).unwrap());
        }
    }
    assert!(worst <= 1e-9, "{worst:e}");
}

#[test]
fn orientation_reversal_flips_the_ray() {
    let f = CatalogMap::TorusPatch {
        major: 2.0,
        minor: 0.5,
    };
    let flip = CatalogMap::linear(Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap())
        .into_shared();
    let g = Composition::new(f.clone().into_shared(), flip).unwrap();
    let a = grassmann_canonical_lift(&f, &[0.4, 1.1]).unwrap();
    let b = grassmann_canonical_lift(&g, &[1.1, 0.4]).unwrap();
    assert_eq!(a.pivot(), b.pivot());
    assert_eq!(a.pivot_sign(), -b.pivot_sign());
    let neg: Vec<f64> = b.w().iter().map(|x| -x).collect();
    assert!(max_abs_diff(a.w(), &neg) <= 1e-14);
}

#[test]
fn distinct_immersed_tangent_planes_give_distinct_rays() {
    // an embedded patch: distinct parameters give distinct (point, ray) pairs
    let f = CatalogMap::TorusPatch {
        major: 2.0,
        minor: 0.5,
    };
    let mut points = vec![];
    for i in 0..6 {
        for j in 0..6 {
            let t = [0.9 * i as f64, 0.9 * j as f64];
            points.push(grassmann_canonical_lift(&f, &t).unwrap());
        }
    }
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            let base_gap = max_abs_diff(p.base(), q.base());
            assert!(
                base_gap > 1e-3
                    || !equivalent(&p.representative(), &q.representative(), 1e-6).unwrap()
            );
        }
    }
}

proptest! {
    #[test]
    fn explicit_pivot_gives_unit_pivot_entry(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = random_kvector(&mut rng);
        let rank = rng.gen_range(0..xi.comps().len());
        let nu = MultiIndex::from_rank(rank, xi.degree(), xi.dim()).unwrap();
        prop_assume!(xi.comps()[rank] != 0.0);
        let p = to_grassmann(&xi, Some(&nu)).unwrap();
        prop_assert_eq!(p.w()[rank].abs(), 1.0);
        prop_assert!(equivalent(&p.representative(), &xi, 1e-14).unwrap());
    }

    #[test]
    fn largest_component_chart_is_bounded(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = to_grassmann(&random_kvector(&mut rng), None).unwrap();
        prop_assert!(max_abs(p.w()) == 1.0);
    }
}
