use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Pair, PcMatrix, TriadIndex};

/// Which of the two log-space inequalities of a triad a row encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `y_ij + y_jk - y_ik <= z`
    Forward,
    /// `-y_ij - y_jk + y_ik <= z`
    Backward,
}

/// One inequality `sum(coef * y[var]) + constant <= z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub triad: TriadIndex,
    pub orientation: Orientation,
    /// Coefficients over free-variable indices (at most three).
    pub terms: Vec<(usize, f64)>,
    /// Contribution of the fixed log-values.
    pub constant: f64,
}

impl Row {
    pub fn lhs(&self, y: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * y[v]).sum::<f64>() + self.constant
    }
}

/// The min-max program over log-entries: minimize `z` subject to both
/// orientations of every triad, with given entries substituted as constants.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    source: PcMatrix,
    /// Missing pairs, one free variable `y_ij` each. The objective variable
    /// `z` is implicit and follows them.
    pub free: Vec<Pair>,
    /// `(i, j, ln a_ij)` for every given pair.
    pub fixed: Vec<(Pair, f64)>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn source(&self) -> &PcMatrix {
        &self.source
    }

    /// Number of LP variables including `z`.
    pub fn var_count(&self) -> usize {
        self.free.len() + 1
    }

    /// Index of `z` among the LP variables.
    pub fn z_index(&self) -> usize {
        self.free.len()
    }

    /// `max_r lhs_r(y)`: the smallest `z` feasible for the given `y`.
    pub fn max_lhs(&self, y: &[f64]) -> f64 {
        self.rows.iter().map(|r| r.lhs(y)).fold(0.0, f64::max)
    }

    /// Half-width of a box around the origin that contains an optimal `y`:
    /// `max(ln 1e6, 2 max|b_ij| + ln 2)`.
    pub fn box_radius(&self) -> f64 {
        let widest = self.fixed.iter().map(|&(_, b)| b.abs()).fold(0.0, f64::max);
        (1e6f64).ln().max(2.0 * widest + std::f64::consts::LN_2)
    }
}

/// Builds the log-space program for `m`. Rows come in triad order, the
/// forward row of each triad directly before its backward row.
pub fn build_lp(m: &PcMatrix) -> Result<LinearProgram> {
    let n = m.order();
    if n < 3 {
        return Err(Error::OrderTooSmall(n, 3));
    }
    let mut var_of = vec![None; n * n];
    let mut free = Vec::new();
    let mut fixed = Vec::new();
    let mut log_of = vec![0.0; n * n];
    for (i, j) in m.pairs() {
        let key = (i - 1) * n + (j - 1);
        match m.get(i, j) {
            Some(v) => {
                log_of[key] = v.ln();
                fixed.push(((i, j), log_of[key]));
            }
            None => {
                var_of[key] = Some(free.len());
                free.push((i, j));
            }
        }
    }

    let mut rows = Vec::with_capacity(n * (n - 1) * (n - 2) / 3);
    for t in m.triads() {
        let (i, j, k) = t.indices;
        // y_ij + y_jk - y_ik
        let signed = [((i, j), 1.0), ((j, k), 1.0), ((i, k), -1.0)];
        let mut terms = Vec::with_capacity(3);
        let mut constant = 0.0;
        for &((p, q), s) in &signed {
            let key = (p - 1) * n + (q - 1);
            match var_of[key] {
                Some(v) => terms.push((v, s)),
                None => constant += s * log_of[key],
            }
        }
        terms.sort_by_key(|&(v, _)| v);
        let backward_terms = terms.iter().map(|&(v, c)| (v, -c)).collect();
        rows.push(Row {
            triad: t.indices,
            orientation: Orientation::Forward,
            terms,
            constant,
        });
        rows.push(Row {
            triad: t.indices,
            orientation: Orientation::Backward,
            terms: backward_terms,
            constant: -constant,
        });
    }

    Ok(LinearProgram {
        source: m.clone(),
        free,
        fixed,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_counts() {
        let mut m = PcMatrix::from_upper(3, &[2.0, 4.0, 2.0]).unwrap();
        m.remove(1, 2).unwrap();
        let p = build_lp(&m).unwrap();
        assert_eq!((p.rows.len(), p.var_count()), (2, 2));

        let full = PcMatrix::from_weights(&[1.0, 2.0, 4.0, 8.0]).unwrap();
        let p = build_lp(&full).unwrap();
        assert_eq!((p.rows.len(), p.var_count()), (8, 1));
        assert!(p.rows.iter().all(|r| r.terms.is_empty()));

        let seven = PcMatrix::empty(7).unwrap();
        assert_eq!(build_lp(&seven).unwrap().rows.len(), 70);
        assert!(matches!(build_lp(&PcMatrix::empty(2).unwrap()), Err(Error::OrderTooSmall(2, 3))));
    }

    #[test]
    fn free_and_fixed_partition_pairs() {
        let m = PcMatrix::from_entries(5, [(1, 2, 2.0), (3, 5, 0.5), (2, 4, 3.0)]).unwrap();
        let p = build_lp(&m).unwrap();
        assert_eq!(p.free.len() + p.fixed.len(), 10);
        assert!(p.rows.iter().all(|r| r.terms.len() <= 3));
    }

    #[test]
    fn constant_row_is_log_ratio() {
        let m = PcMatrix::from_upper(3, &[3.0, 5.0, 1.5]).unwrap();
        let p = build_lp(&m).unwrap();
        assert!((p.rows[0].constant - (4.5f64 / 5.0).ln()).abs() < 1e-15);
        assert_eq!(p.rows[1].constant, -p.rows[0].constant);
    }
}
