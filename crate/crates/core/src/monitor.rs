//! Sequential fill-in monitoring.
//!
//! A [`MonitorSession`] accepts one comparison at a time and re-solves the
//! minimal completion after every change. Because fixing another entry can
//! only shrink the set of completions, `CM*` never decreases while entries
//! are only added; once it passes the threshold no later entry can bring
//! it back, and the session alarms.
//!
//! The default threshold of 1/3 is the usual acceptability bound; it was
//! established for small matrices and is applied to every order here.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::index::CONSISTENCY_TOL;
use crate::lp::min_cm_completion;
use crate::matrix::{Pair, PcMatrix, TriadIndex};

pub const DEFAULT_THRESHOLD: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Insert { i: usize, j: usize, value: f64 },
    Retract { i: usize, j: usize },
    Undo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based position in the session history.
    pub step: usize,
    pub action: Action,
    pub cm_star: f64,
    pub maximal_triads: Vec<TriadIndex>,
    /// Given pairs shared by every maximal triad; the likeliest mistypes.
    pub suspect_pairs: Vec<Pair>,
    pub alarmed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Completable,
    NotCompletable,
}

// Inverse of an applied mutation, for undo.
#[derive(Debug, Clone, PartialEq)]
enum Inverse {
    Remove(Pair),
    Restore(Pair, f64),
}

#[derive(Debug, Clone)]
pub struct MonitorSession {
    matrix: PcMatrix,
    threshold: f64,
    history: Vec<StepRecord>,
    undo: Vec<Inverse>,
}

impl MonitorSession {
    pub fn new(n: usize, threshold: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::BadThreshold(threshold));
        }
        Ok(Self {
            matrix: PcMatrix::empty(n)?,
            threshold,
            history: Vec::new(),
            undo: Vec::new(),
        })
    }

    /// A session whose history enters the given entries of `m` in row-major
    /// order.
    pub fn from_matrix(m: &PcMatrix, threshold: f64) -> Result<Self> {
        let mut s = Self::new(m.order(), threshold)?;
        for (i, j) in m.given_pairs() {
            s.add_entry(i, j, m.get(i, j).expect("given pair"))?;
        }
        Ok(s)
    }

    pub fn matrix(&self) -> &PcMatrix {
        &self.matrix
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn history(&self) -> &[StepRecord] {
        &self.history
    }

    pub fn last(&self) -> Option<&StepRecord> {
        self.history.last()
    }

    pub fn cm_star(&self) -> f64 {
        self.last().map_or(0.0, |r| r.cm_star)
    }

    pub fn alarm(&self) -> bool {
        self.last().is_some_and(|r| r.alarmed)
    }

    /// `NotCompletable` once `CM*` exceeds the threshold, since no further
    /// entry can lower it.
    pub fn feasibility_verdict(&self) -> Verdict {
        if self.cm_star() > self.threshold {
            Verdict::NotCompletable
        } else {
            Verdict::Completable
        }
    }

    /// Enters `a_ij = value`; `i > j` stores the reciprocal at `(j, i)`.
    pub fn add_entry(&mut self, i: usize, j: usize, value: f64) -> Result<&StepRecord> {
        check_positive("value", value)?;
        let mut next = self.matrix.clone();
        let pair = next.insert(i, j, value)?;
        let record = self.evaluate(&next, Action::Insert { i, j, value })?;
        self.matrix = next;
        self.undo.push(Inverse::Remove(pair));
        Ok(self.push(record))
    }

    pub fn retract_entry(&mut self, i: usize, j: usize) -> Result<&StepRecord> {
        let mut next = self.matrix.clone();
        let (pair, old) = next.remove(i, j)?;
        let record = self.evaluate(&next, Action::Retract { i, j })?;
        self.matrix = next;
        self.undo.push(Inverse::Restore(pair, old));
        Ok(self.push(record))
    }

    /// Reverts the latest insert or retract that has not been undone yet.
    pub fn undo(&mut self) -> Result<&StepRecord> {
        let inverse = self.undo.last().cloned().ok_or(Error::NothingToUndo)?;
        let mut next = self.matrix.clone();
        match inverse {
            Inverse::Remove((i, j)) => {
                next.remove(i, j)?;
            }
            Inverse::Restore((i, j), v) => {
                next.insert(i, j, v)?;
            }
        }
        let record = self.evaluate(&next, Action::Undo)?;
        self.undo.pop();
        self.matrix = next;
        Ok(self.push(record))
    }

    /// Replays an action as if entered by the user.
    pub fn apply(&mut self, action: &Action) -> Result<&StepRecord> {
        match *action {
            Action::Insert { i, j, value } => self.add_entry(i, j, value),
            Action::Retract { i, j } => self.retract_entry(i, j),
            Action::Undo => self.undo(),
        }
    }

    fn push(&mut self, record: StepRecord) -> &StepRecord {
        self.history.push(record);
        self.history.last().expect("just pushed")
    }

    fn evaluate(&self, m: &PcMatrix, action: Action) -> Result<StepRecord> {
        let (cm_star, maximal_triads) = if m.order() < 3 {
            (0.0, Vec::new())
        } else {
            let c = min_cm_completion(m)?;
            (c.cm_star, c.maximal_triads.iter().map(|t| t.indices).collect())
        };
        let suspect_pairs = if cm_star > CONSISTENCY_TOL {
            suspects(m, &maximal_triads)
        } else {
            Vec::new()
        };
        Ok(StepRecord {
            step: self.history.len() + 1,
            action,
            cm_star,
            maximal_triads,
            suspect_pairs,
            alarmed: cm_star > self.threshold,
        })
    }
}

/// Given pairs common to all maximal triads, reported only when that
/// intersection is a single pair or there is a single maximal triad.
fn suspects(m: &PcMatrix, triads: &[TriadIndex]) -> Vec<Pair> {
    let pairs_of = |&(i, j, k): &TriadIndex| -> BTreeSet<Pair> { [(i, j), (i, k), (j, k)].into() };
    let Some(first) = triads.first() else {
        return Vec::new();
    };
    let common = triads[1..]
        .iter()
        .fold(pairs_of(first), |acc, t| acc.intersection(&pairs_of(t)).copied().collect());
    let given: Vec<Pair> = common.into_iter().filter(|&(i, j)| m.contains(i, j)).collect();
    if triads.len() == 1 || given.len() == 1 {
        given
    } else {
        Vec::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction() {
        let s = MonitorSession::new(7, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(s.matrix().missing_count(), 21);
        assert!(!s.alarm());
        assert_eq!(s.feasibility_verdict(), Verdict::Completable);
        assert!(MonitorSession::new(3, 0.2).is_ok());
        assert!(MonitorSession::new(1, DEFAULT_THRESHOLD).is_err());
        assert!(MonitorSession::new(3, 1.0).is_err());
        assert!(MonitorSession::new(3, 0.0).is_err());
    }

    #[test]
    fn add_rejects_present_and_bad_value() {
        let mut s = MonitorSession::new(3, DEFAULT_THRESHOLD).unwrap();
        s.add_entry(1, 2, 2.0).unwrap();
        assert_eq!(s.add_entry(2, 1, 0.5).unwrap_err(), Error::PairPresent((1, 2)));
        assert!(matches!(s.add_entry(1, 3, -1.0), Err(Error::Domain(_))));
        assert_eq!(s.history().len(), 1);
    }

    #[test]
    fn retract_on_empty_fails() {
        let mut s = MonitorSession::new(4, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(s.retract_entry(1, 2).unwrap_err(), Error::PairMissing((1, 2)));
        assert_eq!(s.undo().unwrap_err(), Error::NothingToUndo);
    }

    #[test]
    fn order_two_session() {
        let mut s = MonitorSession::new(2, DEFAULT_THRESHOLD).unwrap();
        let r = s.add_entry(1, 2, 9.0).unwrap();
        assert_eq!(r.cm_star, 0.0);
        assert!(!r.alarmed);
    }

    #[test]
    fn undo_reverts_retract_and_insert() {
        let mut s = MonitorSession::new(3, 0.05).unwrap();
        s.add_entry(1, 2, 3.0).unwrap();
        s.add_entry(1, 3, 5.0).unwrap();
        let r = s.add_entry(2, 3, 1.5).unwrap().clone();
        assert!((r.cm_star - 0.1).abs() < 1e-12 && r.alarmed);
        assert_eq!(r.suspect_pairs, vec![(1, 2), (1, 3), (2, 3)]);
        s.retract_entry(2, 3).unwrap();
        assert!(!s.alarm());
        s.undo().unwrap();
        assert!(s.alarm());
        assert_eq!(s.matrix().get(2, 3), Some(1.5));
        s.undo().unwrap();
        assert!(!s.alarm());
        assert!(!s.matrix().contains(2, 3));
        assert_eq!(s.history().len(), 6);
    }

    #[test]
    fn suspects_need_a_unique_common_pair() {
        let m = PcMatrix::from_upper(4, &[1.0; 6]).unwrap();
        assert_eq!(suspects(&m, &[(1, 2, 3), (1, 2, 4)]), vec![(1, 2)]);
        assert!(suspects(&m, &[(1, 2, 3), (2, 3, 4), (1, 2, 4)]).is_empty());
        assert!(suspects(&m, &[]).is_empty());
    }
}
