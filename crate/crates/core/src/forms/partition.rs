use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::quadrature::{validate_box, ParamBox};

/// Largest tolerated deviation of `Σ χ_j` from 1.
pub const PARTITION_TOLERANCE: f64 = 1e-10;

/// Smooth partition of unity on a parameter box, subordinate to a cover by
/// overlapping sub-boxes.
///
/// Each `χ_j` is a product of one-dimensional bumps `exp(−1/(1−s²))`
/// normalized by the pointwise sum. A bump edge lying on the box boundary is
/// pushed outward by the sub-box width so that `χ_j` stays positive up to
/// that boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOfUnity {
    param_box: ParamBox,
    cover: Vec<ParamBox>,
    supports: Vec<ParamBox>,
    normalized: bool,
}

impl PartitionOfUnity {
    pub fn new(param_box: ParamBox, cover: Vec<ParamBox>) -> Result<Self> {
        Self::build(param_box, cover, true)
    }

    /// Raw bumps without normalization. Useful only for exercising the sum
    /// check: these generally do not sum to one.
    pub fn unnormalized(param_box: ParamBox, cover: Vec<ParamBox>) -> Result<Self> {
        Self::build(param_box, cover, false)
    }

    /// Splits each axis into `parts` equal intervals, widened on both sides
    /// by `overlap` times the interval width and clipped to the box.
    pub fn uniform(param_box: ParamBox, parts: usize, overlap: f64) -> Result<Self> {
        if parts == 0 || !(overlap > 0.0) {
            return Err(Error::InvalidParameter(
                "uniform cover needs parts ≥ 1 and overlap > 0".into(),
            ));
        }
        let k = param_box.len();
        let mut cover = Vec::with_capacity(parts.pow(k as u32));
        for flat in 0..parts.pow(k as u32) {
            let mut rest = flat;
            let sub = param_box
                .iter()
                .map(|&(lo, hi)| {
                    let i = rest % parts;
                    rest /= parts;
                    let h = (hi - lo) / parts as f64;
                    let a = if i == 0 {
                        lo
                    } else {
                        (lo + h * (i as f64 - overlap)).max(lo)
                    };
                    let b = if i + 1 == parts {
                        hi
                    } else {
                        (lo + h * (i as f64 + 1.0 + overlap)).min(hi)
                    };
                    (a, b)
                })
                .collect();
            cover.push(sub);
        }
        Self::new(param_box, cover)
    }

    fn build(param_box: ParamBox, cover: Vec<ParamBox>, normalized: bool) -> Result<Self> {
        validate_box(&param_box)?;
        if cover.is_empty() {
            return Err(Error::InvalidParameter("empty cover".into()));
        }
        let mut supports = Vec::with_capacity(cover.len());
        for sub in &cover {
            validate_box(sub)?;
            if sub.len() != param_box.len() {
                return Err(Error::DimensionMismatch {
                    expected: param_box.len(),
                    got: sub.len(),
                });
            }
            let mut support = Vec::with_capacity(sub.len());
            for (&(a, b), &(lo, hi)) in sub.iter().zip(&param_box) {
                if a < lo || b > hi || !(b > a) {
                    return Err(Error::InvalidParameter(
                        "cover sub-box must be a non-empty part of the box".into(),
                    ));
                }
                let w = b - a;
                support.push((
                    if a <= lo { a - w } else { a },
                    if b >= hi { b + w } else { b },
                ));
            }
            supports.push(support);
        }
        Ok(Self {
            param_box,
            cover,
            supports,
            normalized,
        })
    }

    pub fn param_box(&self) -> &[(f64, f64)] {
        &self.param_box
    }

    pub fn cover(&self) -> &[ParamBox] {
        &self.cover
    }

    pub fn len(&self) -> usize {
        self.cover.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cover.is_empty()
    }

    /// `χ_j(t)` for every `j`. Fails when the values do not sum to one, which
    /// includes points that no sub-box covers.
    pub fn weights(&self, t: &[f64]) -> Result<Vec<f64>> {
        let raw: Vec<f64> = self.supports.iter().map(|s| bump(s, t)).collect();
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidPartition {
                point: t.to_vec(),
                sum: total,
            });
        }
        let chi: Vec<f64> = if self.normalized {
            raw.iter().map(|r| r / total).collect()
        } else {
            raw
        };
        let sum: f64 = chi.iter().sum();
        if (sum - 1.0).abs() > PARTITION_TOLERANCE {
            return Err(Error::InvalidPartition {
                point: t.to_vec(),
                sum,
            });
        }
        Ok(chi)
    }
}

fn bump(support: &[(f64, f64)], t: &[f64]) -> f64 {
    let mut v = 1.0;
    for (&(a, b), &x) in support.iter().zip(t) {
        let s = (2.0 * x - (a + b)) / (b - a);
        if s.abs() >= 1.0 {
            return 0.0;
        }
        v *= (-1.0 / (1.0 - s * s)).exp();
    }
    v
}
