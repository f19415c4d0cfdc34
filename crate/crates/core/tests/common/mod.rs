//! Independent oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use areal_core::maps::LinearCombination;
use areal_core::polynomial::Polynomial;
use areal_core::{CatalogMap, Matrix, SharedMap};
use rand::Rng;

/// Parity of a tuple: ±1 for distinct entries, 0 on a repeat.
pub fn tuple_sign(t: &[usize]) -> f64 {
    let mut sign = 1.0;
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            if t[i] == t[j] {
                return 0.0;
            }
            if t[i] > t[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Every k-tuple over `0..n`, repeats included.
pub fn all_tuples(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Increasing k-subsets of `0..n` in lexicographic order, by filtering.
pub fn increasing(k: usize, n: usize) -> Vec<Vec<usize>> {
    all_tuples(k, n)
        .into_iter()
        .filter(|t| t.windows(2).all(|w| w[0] < w[1]))
        .collect()
}

/// The k-vector lift written out as the full double sum over index tuples
/// with the `1/(k!)²` weight. Components of `xi` are reconstructed on all
/// tuples by antisymmetry; the result is reduced back to increasing order
/// by collecting `∂_{σ₁} ∧ … ∧ ∂_{σₖ} = sgn(σ) ∂_S`.
pub fn literal_lift(jac: &Matrix, k: usize, xi: &[f64]) -> Vec<f64> {
    let (m, n) = (jac.rows(), jac.cols());
    let inc_in = increasing(k, n);
    let inc_out = increasing(k, m);
    let full_xi = |t: &[usize]| -> f64 {
        let s = tuple_sign(t);
        if s == 0.0 {
            return 0.0;
        }
        let mut sorted = t.to_vec();
        sorted.sort();
        s * xi[inc_in.iter().position(|c| *c == sorted).unwrap()]
    };
    let kfact: f64 = (1..=k).map(|i| i as f64).product();
    let mut out = vec![0.0; inc_out.len()];
    let in_tuples = all_tuples(k, n);
    for sigma in all_tuples(k, m) {
        let s = tuple_sign(&sigma);
        if s == 0.0 {
            continue;
        }
        let mut acc = 0.0;
        for i in &in_tuples {
            let x = full_xi(i);
            if x == 0.0 {
                continue;
            }
            acc += sigma
                .iter()
                .zip(i)
                .map(|(&a, &b)| jac[(a, b)])
                .product::<f64>()
                * x;
        }
        let mut sorted = sigma.clone();
        sorted.sort();
        let slot = inc_out.iter().position(|c| *c == sorted).unwrap();
        out[slot] += s * acc / (kfact * kfact);
    }
    out
}

pub fn random_vec<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-2.0..=2.0))
}

/// A random quadratic polynomial map `Rⁿ → Rᵐ`.
pub fn random_polynomial_map<R: Rng>(rng: &mut R, n: usize, m: usize) -> CatalogMap {
    let components = (0..m)
        .map(|_| {
            let mut terms = vec![(rng.gen_range(-1.0..=1.0), vec![0; n])];
            for a in 0..n {
                let mut e = vec![0; n];
                e[a] = 1;
                terms.push((rng.gen_range(-2.0..=2.0), e));
                for b in a..n {
                    let mut e = vec![0; n];
                    e[a] += 1;
                    e[b] += 1;
                    terms.push((rng.gen_range(-1.0..=1.0), e));
                }
            }
            Polynomial::new(n, terms).unwrap()
        })
        .collect();
    CatalogMap::polynomial(components).unwrap()
}

/// A random smooth catalog map `Rⁿ → Rᵐ`: polynomial, affine, or (for
/// one- and two-dimensional domains) a trigonometric family followed by an
/// affine map into `Rᵐ`.
pub fn random_catalog_map<R: Rng>(rng: &mut R, n: usize, m: usize) -> SharedMap {
    match rng.gen_range(0..4) {
        0 => random_polynomial_map(rng, n, m).into_shared(),
        1 => CatalogMap::affine(random_matrix(rng, m, n), random_vec(rng, m))
            .unwrap()
            .into_shared(),
        2 if n == 1 => {
            let c = random_fourier_curve(rng, m, 3);
            c.into_shared()
        }
        3 if n == 2 => {
            let torus = CatalogMap::TorusPatch {
                major: 2.0,
                minor: 0.7,
            }
            .into_shared();
            let a = CatalogMap::affine(random_matrix(rng, m, 3), random_vec(rng, m))
                .unwrap()
                .into_shared();
            Arc::new(areal_core::maps::Composition::new(a, torus).unwrap())
        }
        _ => {
            let p = random_polynomial_map(rng, n, m).into_shared();
            let l = CatalogMap::linear(random_matrix(rng, m, n)).into_shared();
            Arc::new(LinearCombination::new(vec![(0.5, p), (1.0, l)]).unwrap())
        }
    }
}

/// A random Fourier curve in `Rᵐ` with `harmonics` terms and a nonzero
/// linear drift, so it is immersed almost surely.
pub fn random_fourier_curve<R: Rng>(rng: &mut R, m: usize, harmonics: usize) -> CatalogMap {
    let cos = (0..harmonics).map(|_| random_vec(rng, m)).collect();
    let sin = (0..harmonics).map(|_| random_vec(rng, m)).collect();
    let mut linear = random_vec(rng, m);
    linear[0] += 3.0 * harmonics as f64;
    CatalogMap::fourier(random_vec(rng, m), linear, cos, sin, 1.0, 0.0).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Composite Simpson rule on `[a, b] × [c, d]` with `n` (even) panels per
/// axis.
pub fn simpson_2d(
    f: impl Fn(f64, f64) -> f64,
    (a, b): (f64, f64),
    (c, d): (f64, f64),
    n: usize,
) -> f64 {
    assert!(n.is_multiple_of(2));
    let hx = (b - a) / n as f64;
    let hy = (d - c) / n as f64;
    let w = |i: usize| {
        if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let mut total = 0.0;
    for i in 0..=n {
        let x = a + hx * i as f64;
        let mut row = 0.0;
        for j in 0..=n {
            row += w(j) * f(x, c + hy * j as f64);
        }
        total += w(i) * row;
    }
    total * hx * hy / 9.0
}

/// `√det(JᵀJ)` computed from the Gram matrix, independent of the minor
/// expansion used by the library.
pub fn sqrt_gram(jac: &Matrix) -> f64 {
    let k = jac.cols();
    let g = Matrix::from_fn(k, k, |a, b| {
        (0..jac.rows()).map(|r| jac[(r, a)] * jac[(r, b)]).sum()
    });
    // Cholesky-free: Gaussian elimination on the small SPD matrix
    let mut a: Vec<Vec<f64>> = (0..k)
        .map(|r| (0..k).map(|c| g[(r, c)]).collect())
        .collect();
    let mut det = 1.0;
    for p in 0..k {
        det *= a[p][p];
        let (top, rest) = a.split_at_mut(p + 1);
        let pivot = &top[p];
        for row in rest {
            let f = row[p] / pivot[p];
            for (x, y) in row[p..].iter_mut().zip(&pivot[p..]) {
                *x -= f * y;
            }
        }
    }
    det.max(0.0).sqrt()
}
