mod common;

use std::sync::Arc;

use areal_core::finsler::{
    check_homogeneity, check_projectability, hilbert_form, pullback_identity_residual,
    CovectorField, FinslerFunction, MetricField,
};
use areal_core::functional::curve_length;
use areal_core::kvector::compound_matrix;
use areal_core::maps::TangentLift;
use areal_core::quadrature::QuadratureSpec;
use areal_core::{Error, Matrix, SharedMap};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LAMBDAS: [f64; 3] = [0.5, 2.0, 10.0];

fn random_spd(rng: &mut ChaCha8Rng, m: usize) -> Matrix {
    let a = random_matrix(rng, m, m);
    Matrix::from_fn(m, m, |r, c| {
        (0..m).map(|i| a[(i, r)] * a[(i, c)]).sum::<f64>() + if r == c { 0.5 } else { 0.0 }
    })
}

/// A drift covector with `|b|_g ≤ 0.5` for the constant metric `g`.
fn small_drift(rng: &mut ChaCha8Rng, g: &Matrix) -> Vec<f64> {
    let b = random_vec(rng, g.rows());
    let inv = g.inverse().unwrap();
    let norm = inv
        .mul_vec(&b)
        .unwrap()
        .iter()
        .zip(&b)
        .map(|(x, y)| x * y)
        .sum::<f64>()
        .sqrt();
    b.iter().map(|x| 0.5 * x / norm).collect()
}

fn homogeneous_catalog(rng: &mut ChaCha8Rng) -> Vec<FinslerFunction> {
    let g = random_spd(rng, 3);
    let b = small_drift(rng, &g);
    let affine_drift = CovectorField::Affine {
        base: vec![0.1, -0.1, 0.05],
        matrix: Matrix::from_fn(3, 3, |r, c| 0.02 * (r + c) as f64),
    };
    vec![
        FinslerFunction::euclidean(3).unwrap(),
        FinslerFunction::riemannian(MetricField::Constant(g.clone())).unwrap(),
        FinslerFunction::riemannian(MetricField::Conformal {
            base: g.clone(),
            alpha: 0.4,
        })
        .unwrap(),
        FinslerFunction::randers(MetricField::Constant(g.clone()), CovectorField::Constant(b))
            .unwrap(),
        FinslerFunction::randers(MetricField::identity(3), affine_drift).unwrap(),
        FinslerFunction::mth_root(vec![1.0, 2.0, 0.5]).unwrap(),
        FinslerFunction::areal_gram(2, 4).unwrap(),
        FinslerFunction::areal_gram(1, 3).unwrap(),
    ]
}

#[test]
fn homogeneous_catalog_passes() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for f in homogeneous_catalog(&mut rng) {
        let h = check_homogeneity(&f, 100, &LAMBDAS, &mut rng).unwrap();
        let p = check_projectability(&f, 100, &LAMBDAS, &mut rng).unwrap();
        assert!(h <= 1e-11, "{}: {h:e}", f.kind().name());
        assert!(p <= 1e-11, "{}: {p:e}", f.kind().name());
    }
}

#[test]
fn quadratic_energy_fails_homogeneity() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let f = FinslerFunction::quadratic_energy(3).unwrap();
    assert!(check_homogeneity(&f, 100, &[2.0], &mut rng).unwrap() >= 0.5);
    assert!(check_projectability(&f, 100, &[2.0], &mut rng).unwrap() >= 0.5);
}

#[test]
fn values_match_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..50 {
        let g = random_spd(&mut rng, 3);
        let b = small_drift(&mut rng, &g);
        let y = random_vec(&mut rng, 3);
        let v = random_vec(&mut rng, 3);
        let gv = g.mul_vec(&v).unwrap();
        let quad: f64 = gv.iter().zip(&v).map(|(a, b)| a * b).sum();
        let drift: f64 = b.iter().zip(&v).map(|(a, b)| a * b).sum();
        let riem = FinslerFunction::riemannian(MetricField::Constant(g.clone())).unwrap();
        let randers =
            FinslerFunction::randers(MetricField::Constant(g.clone()), CovectorField::Constant(b))
                .unwrap();
        assert!((riem.eval(&y, &v).unwrap() - quad.sqrt()).abs() <= 1e-14 * (1.0 + quad));
        assert!(
            (randers.eval(&y, &v).unwrap() - quad.sqrt() - drift).abs() <= 1e-14 * (1.0 + quad)
        );
        // Randers metrics with |b|_g < 1 are positive off the zero section
        assert!(randers.eval(&y, &v).unwrap() > 0.0);
    }
}

#[test]
fn areal_gram_is_the_gram_volume_of_the_lift() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let f = FinslerFunction::areal_gram(2, 4).unwrap();
    for _ in 0..20 {
        let jac = random_matrix(&mut rng, 4, 2);
        let xi = compound_matrix(&jac, 2).unwrap().column(0);
        let y = random_vec(&mut rng, 4);
        assert!((f.eval(&y, &xi).unwrap() - sqrt_gram(&jac)).abs() <= 1e-12);
    }
}

#[test]
fn zero_section_is_refused() {
    let f = FinslerFunction::euclidean(2).unwrap();
    assert_eq!(f.eval(&[0.0, 0.0], &[0.0, 0.0]), Err(Error::SlitDomain));
    let bad = FinslerFunction::randers(
        MetricField::identity(2),
        CovectorField::Constant(vec![1.2, 0.0]),
    );
    assert!(bad.is_err());
}

#[test]
fn hilbert_form_euler_identity_on_random_curves() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let q = QuadratureSpec::default();
    let ts: Vec<f64> = (0..32).map(|i| 0.1 * i as f64).collect();
    for _ in 0..10 {
        let g = random_spd(&mut rng, 3);
        let b = small_drift(&mut rng, &g);
        let catalog = [
            FinslerFunction::euclidean(3).unwrap(),
            FinslerFunction::riemannian(MetricField::Conformal {
                base: g.clone(),
                alpha: 0.3,
            })
            .unwrap(),
            FinslerFunction::randers(MetricField::Constant(g), CovectorField::Constant(b)).unwrap(),
        ];
        let curve = random_fourier_curve(&mut rng, 3, 2).into_shared();
        for f in &catalog {
            let r = pullback_identity_residual(f, &curve, &ts).unwrap();
            assert!(r <= 1e-11, "{}: {r:e}", f.kind().name());
            let l = curve_length(f, &curve, (0.0, 3.0), &q).unwrap();
            assert!(l.homogeneous);
            assert!(l.dual_residual() <= 1e-10 * l.value.abs().max(1.0));
        }
    }
}

#[test]
fn hilbert_form_pulls_back_to_the_lagrangian() {
    // evaluate the pulled-back coefficient of the Hilbert form directly
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let f = FinslerFunction::riemannian(MetricField::Constant(random_spd(&mut rng, 2))).unwrap();
    let theta = hilbert_form(&f).unwrap();
    let curve: SharedMap = random_fourier_curve(&mut rng, 2, 3).into_shared();
    let lift: SharedMap = Arc::new(TangentLift::new(curve.clone()).unwrap());
    for i in 0..10 {
        let t = 0.3 * i as f64;
        let pulled = areal_core::forms::pullback_coefficients(&theta, &lift, &[t]).unwrap()[0];
        let y = curve.eval(&[t]).unwrap();
        let v = curve.jacobian(&[t]).unwrap().column(0);
        assert!((pulled - f.eval(&y, &v).unwrap()).abs() <= 1e-12);
    }
    assert!(hilbert_form(&FinslerFunction::areal_gram(2, 3).unwrap()).is_err());
}

proptest! {
    #[test]
    fn fiber_gradient_matches_central_differences(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let catalog = homogeneous_catalog(&mut rng);
        let f = &catalog[rng.gen_range(0..catalog.len())];
        let (y, v) = f.sample(&mut rng);
        prop_assert!(f.fiber_gradient_fd_residual(&y, &v).unwrap() <= 1e-6);
    }

    #[test]
    fn euler_identity_holds_pointwise(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let catalog = homogeneous_catalog(&mut rng);
        for f in &catalog {
            let (y, v) = f.sample(&mut rng);
            prop_assert!(f.euler_residual_at(&y, &v).unwrap() <= 1e-11);
        }
    }
}
