//! Pairwise comparison matrices with optional missing entries.
//!
//! Indices are 1-based throughout the public API, matching the usual
//! `a_ij` notation. Only the strict upper triangle is stored; the diagonal
//! reads as 1 and the lower triangle as the reciprocal of its mirror.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};

/// An upper-triangle position `(i, j)` with `i < j`, 1-based.
pub type Pair = (usize, usize);

/// A triad position `(i, j, k)` with `i < j < k`, 1-based.
pub type TriadIndex = (usize, usize, usize);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcMatrix {
    n: usize,
    // Row-major strict upper triangle.
    upper: Vec<Option<f64>>,
}

impl PcMatrix {
    /// An order-`n` matrix with every off-diagonal entry missing.
    pub fn empty(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::OrderTooSmall(n, 2));
        }
        Ok(Self {
            n,
            upper: vec![None; n * (n - 1) / 2],
        })
    }

    /// Builds a matrix from given entries. Pairs with `i > j` are stored as
    /// the reciprocal at `(j, i)`.
    pub fn from_entries<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut m = Self::empty(n)?;
        for (i, j, v) in entries {
            m.insert(i, j, v)?;
        }
        Ok(m)
    }

    /// Builds a complete matrix from its upper triangle listed row by row:
    /// `a_12, a_13, ..., a_1n, a_23, ...`.
    pub fn from_upper(n: usize, values: &[f64]) -> Result<Self> {
        let mut m = Self::empty(n)?;
        if values.len() != m.upper.len() {
            return Err(Error::Domain(format!(
                "expected {} upper-triangle values for order {n}, got {}",
                m.upper.len(),
                values.len()
            )));
        }
        for (slot, &v) in m.upper.iter_mut().zip(values) {
            check_positive("entry", v)?;
            *slot = Some(v);
        }
        Ok(m)
    }

    /// The consistent matrix `a_ij = w_i / w_j`.
    pub fn from_weights(w: &[f64]) -> Result<Self> {
        for &x in w {
            check_positive("weight", x)?;
        }
        let n = w.len();
        let mut m = Self::empty(n)?;
        let pairs: Vec<Pair> = m.pairs().collect();
        for (slot, (i, j)) in pairs.into_iter().enumerate() {
            m.upper[slot] = Some(w[i - 1] / w[j - 1]);
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(1 <= i && i < j && j <= self.n);
        let (i, j) = (i - 1, j - 1);
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    fn normalize(&self, i: usize, j: usize) -> Result<(Pair, bool)> {
        if i == 0 || j == 0 || i > self.n || j > self.n || i == j {
            return Err(Error::BadIndex(i, j, self.n));
        }
        Ok(if i < j { ((i, j), false) } else { ((j, i), true) })
    }

    /// Entry `a_ij`: 1 on the diagonal, the reciprocal below it, `None` when
    /// missing or out of range.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        if i == j && (1..=self.n).contains(&i) {
            return Some(1.0);
        }
        let ((p, q), flipped) = self.normalize(i, j).ok()?;
        let v = self.upper[self.slot(p, q)]?;
        Some(if flipped { 1.0 / v } else { v })
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.normalize(i, j)
            .map(|((p, q), _)| self.upper[self.slot(p, q)].is_some())
            .unwrap_or(false)
    }

    /// Sets a missing entry. Rejects pairs that are already present.
    pub fn insert(&mut self, i: usize, j: usize, value: f64) -> Result<Pair> {
        check_positive("entry", value)?;
        let (pair, flipped) = self.normalize(i, j)?;
        let slot = self.slot(pair.0, pair.1);
        if self.upper[slot].is_some() {
            return Err(Error::PairPresent(pair));
        }
        self.upper[slot] = Some(if flipped { 1.0 / value } else { value });
        Ok(pair)
    }

    /// Removes a present entry, returning its upper-triangle value.
    pub fn remove(&mut self, i: usize, j: usize) -> Result<(Pair, f64)> {
        let (pair, _) = self.normalize(i, j)?;
        let slot = self.slot(pair.0, pair.1);
        match self.upper[slot].take() {
            Some(v) => Ok((pair, v)),
            None => Err(Error::PairMissing(pair)),
        }
    }

    /// All upper-triangle positions in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        let n = self.n;
        (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
    }

    /// Positions with a given value (the index set `L`).
    pub fn given_pairs(&self) -> Vec<Pair> {
        self.pairs().filter(|&(i, j)| self.contains(i, j)).collect()
    }

    /// Positions without a value (the index set `L̄`).
    pub fn missing_pairs(&self) -> Vec<Pair> {
        self.pairs().filter(|&(i, j)| !self.contains(i, j)).collect()
    }

    pub fn given_count(&self) -> usize {
        self.upper.iter().filter(|v| v.is_some()).count()
    }

    pub fn missing_count(&self) -> usize {
        self.upper.len() - self.given_count()
    }

    pub fn is_complete(&self) -> bool {
        self.upper.iter().all(Option::is_some)
    }

    /// Every triad `i < j < k` in lexicographic order, known or not.
    pub fn triads(&self) -> impl Iterator<Item = Triad> + '_ {
        let n = self.n;
        (1..=n).flat_map(move |i| {
            (i + 1..=n).flat_map(move |j| (j + 1..=n).map(move |k| self.triad(i, j, k)))
        })
    }

    fn triad(&self, i: usize, j: usize, k: usize) -> Triad {
        Triad {
            indices: (i, j, k),
            a: self.get(i, j),
            b: self.get(i, k),
            c: self.get(j, k),
        }
    }

    /// Triads whose three entries are all present, in lexicographic order.
    pub fn known_triads(&self) -> Vec<Triad> {
        self.triads().filter(Triad::is_known).collect()
    }

    /// The matrix `B` with `b_ij = a_{p(i) p(j)}`; `perm` is a 1-based
    /// permutation of `1..=n`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n {
            return Err(Error::Domain("permutation length differs from order".into()));
        }
        for &p in perm {
            if p == 0 || p > self.n || std::mem::replace(&mut seen[p - 1], true) {
                return Err(Error::Domain(format!("{perm:?} is not a permutation")));
            }
        }
        let mut out = Self::empty(self.n)?;
        for (i, j) in self.pairs() {
            if let Some(v) = self.get(perm[i - 1], perm[j - 1]) {
                let slot = out.slot(i, j);
                out.upper[slot] = Some(v);
            }
        }
        Ok(out)
    }

    /// The transpose, which for a reciprocal matrix is the entrywise
    /// reciprocal.
    pub fn transposed(&self) -> Self {
        Self {
            n: self.n,
            upper: self.upper.iter().map(|v| v.map(f64::recip)).collect(),
        }
    }
}

/// The 3x3 submatrix on `i < j < k`, summarized by
/// `(a, b, c) = (a_ij, a_ik, a_jk)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triad {
    pub indices: TriadIndex,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
}

impl Triad {
    pub fn is_known(&self) -> bool {
        self.a.is_some() && self.b.is_some() && self.c.is_some()
    }

    pub fn values(&self) -> Option<(f64, f64, f64)> {
        Some((self.a?, self.b?, self.c?))
    }

    /// The three upper-triangle positions `(i,j)`, `(i,k)`, `(j,k)`.
    pub fn pairs(&self) -> [Pair; 3] {
        let (i, j, k) = self.indices;
        [(i, j), (i, k), (j, k)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocity_and_diagonal() {
        let mut m = PcMatrix::empty(3).unwrap();
        m.insert(3, 1, 4.0).unwrap();
        assert_eq!(m.get(1, 3), Some(0.25));
        assert_eq!(m.get(3, 1), Some(4.0));
        assert_eq!(m.get(2, 2), Some(1.0));
        assert_eq!(m.get(1, 2), None);
        assert_eq!(m.given_pairs(), vec![(1, 3)]);
        assert_eq!(m.missing_pairs(), vec![(1, 2), (2, 3)]);
    }

    #[test]
    fn insert_rejects_present_and_bad_values() {
        let mut m = PcMatrix::empty(3).unwrap();
        m.insert(1, 2, 2.0).unwrap();
        assert_eq!(m.insert(2, 1, 0.5), Err(Error::PairPresent((1, 2))));
        assert!(matches!(m.insert(1, 3, 0.0), Err(Error::Domain(_))));
        assert!(matches!(m.insert(1, 3, f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(m.insert(2, 2, 1.0), Err(Error::BadIndex(..))));
        assert!(matches!(m.insert(1, 4, 1.0), Err(Error::BadIndex(..))));
        assert_eq!(m.remove(1, 2), Ok(((1, 2), 2.0)));
        assert_eq!(m.remove(1, 2), Err(Error::PairMissing((1, 2))));
    }

    #[test]
    fn order_below_two_rejected() {
        assert_eq!(PcMatrix::empty(1), Err(Error::OrderTooSmall(1, 2)));
    }

    #[test]
    fn known_triads_counts() {
        let m = PcMatrix::from_weights(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.known_triads().len(), 4);
        let a = PcMatrix::from_entries(4, [(1, 3, 3.5), (1, 4, 5.0), (2, 3, 3.0), (2, 4, 2.5)])
            .unwrap();
        assert!(a.known_triads().is_empty());
    }

    #[test]
    fn permutation_moves_entries() {
        let m = PcMatrix::from_entries(3, [(1, 2, 2.0)]).unwrap();
        let p = m.permuted(&[2, 1, 3]).unwrap();
        assert_eq!(p.get(1, 2), Some(0.5));
        assert!(m.permuted(&[1, 1, 3]).is_err());
    }
}
