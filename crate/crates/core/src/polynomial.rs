use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};

/// A real polynomial in `nvars` variables, stored as a list of monomials.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<(f64, Vec<u32>)>,
}

impl Polynomial {
    pub fn new(nvars: usize, terms: Vec<(f64, Vec<u32>)>) -> Result<Self> {
        for (c, e) in &terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    got: e.len(),
                });
            }
            if !c.is_finite() {
                return Err(Error::NonFinite("polynomial coefficient"));
            }
        }
        Ok(Self { nvars, terms })
    }

    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        Self {
            nvars,
            terms: vec![(c, vec![0; nvars])],
        }
    }

    /// The coordinate function `y^{var+1}` (0-based `var`).
    pub fn coordinate(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        Self {
            nvars,
            terms: vec![(1.0, e)],
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(f64, Vec<u32>)] {
        &self.terms
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                e.iter()
                    .zip(x)
                    .fold(*c, |acc, (&p, &xi)| acc * xi.powi(p as i32))
            })
            .sum()
    }

    pub fn partial(&self, var: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(_, e)| e[var] > 0)
            .map(|(c, e)| {
                let mut e2 = e.clone();
                e2[var] -= 1;
                (c * f64::from(e[var]), e2)
            })
            .collect();
        Polynomial {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.nvars).map(|v| self.partial(v).eval(x)).collect()
    }
}
