//! Tensor-product Gauss–Legendre quadrature over boxes.
//!
//! An order-n rule integrates polynomials of degree 2n−1 exactly on each
//! cell. The box is split into a uniform grid of cells; in adaptive mode each
//! cell is bisected along every axis until the one-level refinement changes
//! the cell value by less than its share of the target tolerance.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub gauss_order: usize,
    pub cells_per_axis: usize,
    /// Target absolute tolerance for adaptive refinement; `None` disables it.
    pub adaptive: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            gauss_order: 8,
            cells_per_axis: 16,
            adaptive: None,
        }
    }
}

impl QuadratureSpec {
    pub fn new(gauss_order: usize, cells_per_axis: usize) -> Result<Self> {
        let spec = Self {
            gauss_order,
            cells_per_axis,
            adaptive: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_adaptive(mut self, target: f64) -> Self {
        self.adaptive = Some(target);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.gauss_order < 1 {
            return Err(Error::InvalidParameter(
                "gauss_order must be at least 1".into(),
            ));
        }
        if self.cells_per_axis < 1 {
            return Err(Error::InvalidParameter(
                "cells_per_axis must be at least 1".into(),
            ));
        }
        if let Some(t) = self.adaptive {
            if !(t > 0.0) {
                return Err(Error::InvalidParameter(
                    "adaptive target must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Nodes and weights of the n-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter(
                "Gauss–Legendre order must be at least 1".into(),
            ));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Sum with O(log n) error growth and a fixed association order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// A closed axis-aligned box `Π [loᵢ, hiᵢ]`.
pub type ParamBox = Vec<(f64, f64)>;

pub fn validate_box(b: &[(f64, f64)]) -> Result<()> {
    for &(lo, hi) in b {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFinite("parameter box"));
        }
        if lo > hi {
            return Err(Error::InvalidParameter("parameter box has lo > hi".into()));
        }
    }
    Ok(())
}

pub fn box_volume(b: &[(f64, f64)]) -> f64 {
    b.iter().map(|(lo, hi)| hi - lo).product()
}

/// Integrates `f` over `domain` according to `spec`. A 0-dimensional box is
/// a single point with unit weight.
pub fn integrate_box<F>(domain: &[(f64, f64)], spec: &QuadratureSpec, mut f: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    spec.validate()?;
    validate_box(domain)?;
    let k = domain.len();
    if k == 0 {
        return f(&[]);
    }
    if box_volume(domain) == 0.0 {
        return Ok(0.0);
    }
    let rule = GaussLegendre::new(spec.gauss_order)?;
    let cells = spec.cells_per_axis;
    let total = cells.pow(k as u32);
    let volume = box_volume(domain);
    let mut values = Vec::with_capacity(total);
    let mut cell = vec![(0.0, 0.0); k];
    for flat in 0..total {
        let mut rest = flat;
        for (a, &(lo, hi)) in domain.iter().enumerate() {
            let i = rest % cells;
            rest /= cells;
            let h = (hi - lo) / cells as f64;
            let c_lo = lo + h * i as f64;
            let c_hi = if i + 1 == cells {
                hi
            } else {
                lo + h * (i + 1) as f64
            };
            cell[a] = (c_lo, c_hi);
        }
        let v = match spec.adaptive {
            None => cell_rule(&rule, &cell, &mut f)?,
            Some(target) => {
                let coarse = cell_rule(&rule, &cell, &mut f)?;
                let tol = target * box_volume(&cell) / volume;
                adapt(&rule, &cell, coarse, tol, max_depth(k), &mut f)?
            }
        };
        values.push(v);
    }
    Ok(pairwise_sum(&values))
}

fn max_depth(k: usize) -> usize {
    (20 / k).max(2)
}

fn adapt<F>(
    rule: &GaussLegendre,
    cell: &[(f64, f64)],
    coarse: f64,
    tol: f64,
    depth: usize,
    f: &mut F,
) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let children = bisect(cell);
    let mut fine = Vec::with_capacity(children.len());
    for c in &children {
        fine.push(cell_rule(rule, c, f)?);
    }
    let refined = pairwise_sum(&fine);
    if (refined - coarse).abs() <= tol || depth == 0 {
        return Ok(refined);
    }
    let child_tol = tol / children.len() as f64;
    let mut values = Vec::with_capacity(children.len());
    for (c, v) in children.iter().zip(fine) {
        values.push(adapt(rule, c, v, child_tol, depth - 1, f)?);
    }
    Ok(pairwise_sum(&values))
}

fn bisect(cell: &[(f64, f64)]) -> Vec<Vec<(f64, f64)>> {
    let k = cell.len();
    (0..1usize << k)
        .map(|mask| {
            cell.iter()
                .enumerate()
                .map(|(a, &(lo, hi))| {
                    let mid = 0.5 * (lo + hi);
                    if mask >> a & 1 == 0 {
                        (lo, mid)
                    } else {
                        (mid, hi)
                    }
                })
                .collect()
        })
        .collect()
}

fn cell_rule<F>(rule: &GaussLegendre, cell: &[(f64, f64)], f: &mut F) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let k = cell.len();
    let n = rule.nodes.len();
    let jac: f64 = cell.iter().map(|(lo, hi)| 0.5 * (hi - lo)).product();
    let mut point = vec![0.0; k];
    let mut acc = 0.0;
    for flat in 0..n.pow(k as u32) {
        let mut rest = flat;
        let mut w = 1.0;
        for (a, &(lo, hi)) in cell.iter().enumerate() {
            let i = rest % n;
            rest /= n;
            point[a] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[i];
            w *= rule.weights[i];
        }
        let v = f(&point)?;
        if !v.is_finite() {
            return Err(Error::NonFinite("integrand"));
        }
        acc += w * v;
    }
    Ok(jac * acc)
}
