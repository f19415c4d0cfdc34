//! Strictly increasing multi-indices and antisymmetrization signs.
//!
//! Indices are 1-based, as written in formulas and in reports. Component
//! arrays of k-vectors and k-forms are laid out in the lexicographic order of
//! [`enumerate`]; [`MultiIndex::rank`] is the single source of truth for that
//! layout.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A strictly increasing tuple `(i₁ < i₂ < … < i_k)` with entries in `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    indices: Vec<usize>,
    m: usize,
}

impl MultiIndex {
    /// Validates an increasing 1-based tuple.
    pub fn new(indices: &[usize], m: usize) -> Result<Self> {
        let k = indices.len();
        if k < 1 || k > m {
            return Err(Error::InvalidDegree { k, m });
        }
        for &i in indices {
            if i < 1 || i > m {
                return Err(Error::InvalidIndex { index: i, m });
            }
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "multi-index must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            indices: indices.to_vec(),
            m,
        })
    }

    /// The empty index of degree 0, used for scalar (0-form) components.
    pub(crate) fn empty(m: usize) -> Self {
        Self {
            indices: Vec::new(),
            m,
        }
    }

    /// `I₀ = (1, 2, …, k)`.
    pub fn leading(k: usize, m: usize) -> Result<Self> {
        if k < 1 || k > m {
            return Err(Error::InvalidDegree { k, m });
        }
        Ok(Self {
            indices: (1..=k).collect(),
            m,
        })
    }

    pub fn degree(&self) -> usize {
        self.indices.len()
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// 1-based entries.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// 0-based entries, for indexing coordinate arrays.
    pub fn zero_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i - 1).collect()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Position of this index in the lexicographic enumeration of degree-k
    /// multi-indices over `1..=m`.
    pub fn rank(&self) -> usize {
        let k = self.indices.len();
        let mut rank = 0;
        let mut prev = 0;
        for (a, &c) in self.indices.iter().enumerate() {
            for v in prev + 1..c {
                rank += binomial(self.m - v, k - a - 1);
            }
            prev = c;
        }
        rank
    }

    /// Inverse of [`rank`](Self::rank).
    pub fn from_rank(rank: usize, k: usize, m: usize) -> Result<Self> {
        if k < 1 || k > m {
            return Err(Error::InvalidDegree { k, m });
        }
        if rank >= binomial(m, k) {
            return Err(Error::InvalidParameter("rank out of range".into()));
        }
        let mut rest = rank;
        let mut indices = Vec::with_capacity(k);
        let mut v = 1;
        for a in 0..k {
            loop {
                let block = binomial(m - v, k - a - 1);
                if rest < block {
                    break;
                }
                rest -= block;
                v += 1;
            }
            indices.push(v);
            v += 1;
        }
        Ok(Self { indices, m })
    }

    /// Inserts `i` and returns the resulting index with the sign of moving `i`
    /// to the front, i.e. `dyⁱ ∧ dy^I = sign · dy^{I∪i}`. `None` if `i ∈ I`.
    pub fn insert_front(&self, i: usize) -> Option<(MultiIndex, f64)> {
        match self.indices.binary_search(&i) {
            Ok(_) => None,
            Err(pos) => {
                let mut indices = self.indices.clone();
                indices.insert(pos, i);
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                Some((MultiIndex { indices, m: self.m }, sign))
            }
        }
    }

    /// Removes the entry at `pos` (0-based position).
    pub fn remove_at(&self, pos: usize) -> MultiIndex {
        let mut indices = self.indices.clone();
        indices.remove(pos);
        MultiIndex { indices, m: self.m }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (a, i) in self.indices.iter().enumerate() {
            if a > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str(")")
    }
}

/// All `C(m, k)` increasing k-tuples over `1..=m` in lexicographic order.
pub fn enumerate(k: usize, m: usize) -> Result<Vec<MultiIndex>> {
    if k < 1 || k > m {
        return Err(Error::InvalidDegree { k, m });
    }
    Ok(enumerate_any(k, m))
}

/// Like [`enumerate`] but admits `k = 0` (a single empty index).
pub(crate) fn enumerate_any(k: usize, m: usize) -> Vec<MultiIndex> {
    if k == 0 {
        return alloc::vec![MultiIndex::empty(m)];
    }
    combinations(k, m)
        .into_iter()
        .map(|c| MultiIndex {
            indices: c.into_iter().map(|i| i + 1).collect(),
            m,
        })
        .collect()
}

/// Increasing 0-based k-subsets of `0..m` in lexicographic order.
pub(crate) fn combinations(k: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(m, k));
    if k > m {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance the rightmost entry that still has room
        let mut a = k;
        while a > 0 && cur[a - 1] == m - k + a - 1 {
            a -= 1;
        }
        if a == 0 {
            return out;
        }
        cur[a - 1] += 1;
        for b in a..k {
            cur[b] = cur[b - 1] + 1;
        }
    }
}

/// Sorts a 1-based tuple and reports the parity of the sorting permutation.
/// A repeated entry yields sign 0 together with `I₀` as a placeholder index.
pub fn normalize_tuple(t: &[usize], m: usize) -> Result<(MultiIndex, i8)> {
    let k = t.len();
    if k < 1 || k > m {
        return Err(Error::InvalidDegree { k, m });
    }
    for &i in t {
        if i < 1 || i > m {
            return Err(Error::InvalidIndex { index: i, m });
        }
    }
    let (sorted, sign) = sort_with_sign(t);
    if sign == 0 {
        return Ok((MultiIndex::leading(k, m)?, 0));
    }
    Ok((MultiIndex { indices: sorted, m }, sign))
}

/// Insertion sort counting transpositions; sign 0 on repeats.
pub(crate) fn sort_with_sign(t: &[usize]) -> (Vec<usize>, i8) {
    let mut v = t.to_vec();
    let mut sign = 1i8;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return (v, 0);
    }
    (v, sign)
}

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
