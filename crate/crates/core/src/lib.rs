//! Inconsistency analysis for pairwise comparison matrices.
//!
//! For a possibly incomplete reciprocal matrix this crate computes `CM*`,
//! the smallest Koczkodaj CM inconsistency reachable by filling in the
//! missing entries, together with an optimal completion and the triads that
//! attain it. The [`monitor`] module wraps the solver in a fill-in session
//! that raises an alarm once `CM*` passes a threshold.
//!
//! CM is defined as 0 for matrices of order below 3, which have no triads.

pub mod error;
pub mod index;
pub mod io;
pub mod lp;
pub mod matrix;
pub mod monitor;

pub use error::{Error, Result};
pub use index::{cm_complete, cm_from_t, cm_triad, t_from_cm, t_triad, CONSISTENCY_TOL};
pub use lp::{
    build_lp, cm_lower_bound, maximal_triads, min_cm_completion, recover_solution, solve_lp,
    Completion, LinearProgram, LpSolution, SolveStatus,
};
pub use matrix::{Pair, PcMatrix, Triad, TriadIndex};
pub use monitor::{Action, MonitorSession, StepRecord, Verdict, DEFAULT_THRESHOLD};
