//! Minimal CM completion as a linear program in log space.
//!
//! With `y_ij = ln x_ij` and `z = ln T`, each triad contributes the pair of
//! rows `±(y_ij + y_jk - y_ik) <= z`, and minimizing `z` minimizes the
//! largest triad `T` (hence CM) over all completions. Given entries are
//! substituted as constants, leaving one variable per missing pair plus `z`.

mod program;
mod simplex;
mod solve;

pub use program::{build_lp, LinearProgram, Orientation, Row};
pub use solve::{
    cm_lower_bound, maximal_triads, min_cm_completion, recover_solution, solve_lp, Completion,
    LpSolution, SolveStatus, ACTIVE_TOL, MAXIMAL_REL_TOL,
};
