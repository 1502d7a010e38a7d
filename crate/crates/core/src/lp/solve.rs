use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::program::{build_lp, LinearProgram};
use super::simplex::{self, Outcome, Problem};
use crate::error::{Error, Result};
use crate::index::{cm_triad, max_known_cm, CONSISTENCY_TOL};
use crate::matrix::{PcMatrix, Triad};

/// Relative residual under which a row counts as active.
pub const ACTIVE_TOL: f64 = 1e-9;
/// Relative CM margin used when re-checking maximal triads on the completion.
pub const MAXIMAL_REL_TOL: f64 = 1e-6;

// Relaxation of `z*` in the face-identification passes, and the slack a row
// must reach there before it is considered not always active.
const FACE_RELAX: f64 = 1e-10;
const FACE_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub z_opt: f64,
    /// Optimal log-values, indexed like `LinearProgram::free`.
    pub y_opt: Vec<f64>,
    /// Rows binding at `z_opt`, ascending.
    pub active_rows: BTreeSet<usize>,
    pub status: SolveStatus,
    /// Diagnostic text when `status` is a failure.
    pub detail: Option<String>,
}

impl LpSolution {
    fn failure(detail: String) -> Self {
        Self {
            z_opt: f64::NAN,
            y_opt: Vec::new(),
            active_rows: BTreeSet::new(),
            status: SolveStatus::NumericalFailure,
            detail: Some(detail),
        }
    }
}

/// Shifted problem over `y' = y + L in [0, 2L]`, optionally with `z` as an
/// extra variable. `z_cap` replaces `z` by a constant bound.
fn shifted_problem(p: &LinearProgram, radius: f64, z_cap: Option<f64>, cost: Vec<f64>) -> Problem {
    let d = p.free.len();
    let width = if z_cap.is_some() { d } else { d + 1 };
    let mut rows = Vec::with_capacity(p.rows.len() + d);
    for r in &p.rows {
        let mut coeffs = vec![0.0; width];
        let mut shift = 0.0;
        for &(v, c) in &r.terms {
            coeffs[v] = c;
            shift += c;
        }
        let mut rhs = radius * shift - r.constant;
        match z_cap {
            Some(z) => rhs += z,
            None => coeffs[d] = -1.0,
        }
        rows.push((coeffs, rhs));
    }
    for v in 0..d {
        let mut coeffs = vec![0.0; width];
        coeffs[v] = 1.0;
        rows.push((coeffs, 2.0 * radius));
    }
    Problem { cost, rows }
}

fn unshift(x: &[f64], d: usize, radius: f64) -> Vec<f64> {
    x[..d].iter().map(|v| v - radius).collect()
}

fn active_set(p: &LinearProgram, y: &[f64], z: f64) -> BTreeSet<usize> {
    let tol = ACTIVE_TOL * z.abs().max(1.0);
    p.rows
        .iter()
        .enumerate()
        .filter(|(_, r)| z - r.lhs(y) <= tol)
        .map(|(idx, _)| idx)
        .collect()
}

/// Minimizes `z`. The returned `y` lies in the relative interior of the
/// optimal face with respect to the rows, so `active_rows` holds exactly the
/// rows that bind at every optimum.
pub fn solve_lp(p: &LinearProgram) -> LpSolution {
    let d = p.free.len();
    if d == 0 {
        let z = p.max_lhs(&[]);
        return LpSolution {
            z_opt: z,
            y_opt: Vec::new(),
            active_rows: active_set(p, &[], z),
            status: SolveStatus::Optimal,
            detail: None,
        };
    }

    let radius = p.box_radius();
    let mut cost = vec![0.0; d + 1];
    cost[d] = 1.0;
    let basic = match simplex::solve(&shifted_problem(p, radius, None, cost)) {
        Outcome::Optimal { x, .. } => unshift(&x, d, radius),
        other => return LpSolution::failure(format!("min-max pass ended as {other:?}")),
    };
    let z_star = p.max_lhs(&basic);

    // Face identification: repeatedly maximize the total slack of the rows
    // still believed to be always active. A positive optimum exposes at
    // least one row that can be slack on the optimal face.
    let cap = z_star + FACE_RELAX * z_star.max(1.0);
    let slack_tol = FACE_SLACK * z_star.max(1.0);
    let mut candidates = active_set(p, &basic, z_star);
    let mut points = vec![basic];
    while !candidates.is_empty() {
        let mut cost = vec![0.0; d];
        for &r in &candidates {
            for &(v, c) in &p.rows[r].terms {
                cost[v] += c;
            }
        }
        if cost.iter().all(|c| *c == 0.0) {
            break;
        }
        let y = match simplex::solve(&shifted_problem(p, radius, Some(cap), cost)) {
            Outcome::Optimal { x, .. } => unshift(&x, d, radius),
            _ => break,
        };
        let freed: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&r| z_star - p.rows[r].lhs(&y) > slack_tol)
            .collect();
        if freed.is_empty() {
            break;
        }
        for r in freed {
            candidates.remove(&r);
        }
        points.push(y);
    }

    let scale = 1.0 / points.len() as f64;
    let interior: Vec<f64> = (0..d)
        .map(|v| points.iter().map(|pt| pt[v]).sum::<f64>() * scale)
        .collect();
    // z comes from the vertex; the averaged point may overshoot it by the
    // face relaxation and is only used for y and the active set.
    let y_opt = if p.max_lhs(&interior) <= z_star + ACTIVE_TOL * z_star.max(1.0) {
        interior
    } else {
        points.swap_remove(0)
    };
    LpSolution {
        z_opt: z_star,
        active_rows: active_set(p, &y_opt, z_star),
        y_opt,
        status: SolveStatus::Optimal,
        detail: None,
    }
}

/// Maps an optimal LP solution back to `(CM*, completion)`:
/// `CM* = 1 - e^{-z}` and `x_ij = e^{y_ij}` for each missing pair.
pub fn recover_solution(p: &LinearProgram, s: &LpSolution) -> Result<(f64, PcMatrix)> {
    if s.status != SolveStatus::Optimal {
        return Err(Error::NumericalFailure(
            s.detail.clone().unwrap_or_else(|| "solver did not reach an optimum".into()),
        ));
    }
    let mut completion = p.source().clone();
    for (&(i, j), &y) in p.free.iter().zip(&s.y_opt) {
        completion.insert(i, j, y.exp())?;
    }
    Ok((1.0 - (-s.z_opt).exp(), completion))
}

/// Triads of the active rows whose CM on the completion reaches `CM*`, with
/// values taken from the completion.
pub fn maximal_triads(m: &PcMatrix, s: &LpSolution, p: &LinearProgram) -> Vec<Triad> {
    let completed = match recover_solution(p, s) {
        Ok((_, c)) => c,
        Err(_) => return Vec::new(),
    };
    debug_assert_eq!(completed.order(), m.order());
    let cm_star = 1.0 - (-s.z_opt).exp();
    let floor = cm_star - (MAXIMAL_REL_TOL * cm_star).max(CONSISTENCY_TOL);
    let indices: BTreeSet<_> = s.active_rows.iter().map(|&r| p.rows[r].triad).collect();
    indices
        .into_iter()
        .filter_map(|(i, j, k)| {
            let (a, b, c) = (completed.get(i, j)?, completed.get(i, k)?, completed.get(j, k)?);
            let cm = cm_triad(a, b, c).ok()?;
            (cm >= floor).then_some(Triad {
                indices: (i, j, k),
                a: Some(a),
                b: Some(b),
                c: Some(c),
            })
        })
        .collect()
}

/// Result of the minimal-inconsistency completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub cm_star: f64,
    pub z_opt: f64,
    /// A representative optimal completion; other completions may reach the
    /// same `cm_star`.
    pub completion: PcMatrix,
    pub maximal_triads: Vec<Triad>,
}

/// Minimal CM over all positive completions of `m`.
pub fn min_cm_completion(m: &PcMatrix) -> Result<Completion> {
    let p = build_lp(m)?;
    let s = solve_lp(&p);
    let (cm_star, completion) = recover_solution(&p, &s)?;
    let maximal_triads = maximal_triads(m, &s, &p);
    Ok(Completion {
        cm_star,
        z_opt: s.z_opt,
        completion,
        maximal_triads,
    })
}

/// Largest CM over the already-known triads; never exceeds `CM*`.
pub fn cm_lower_bound(m: &PcMatrix) -> f64 {
    max_known_cm(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix_a() -> PcMatrix {
        PcMatrix::from_entries(4, [(1, 3, 3.5), (1, 4, 5.0), (2, 3, 3.0), (2, 4, 2.5)]).unwrap()
    }

    #[test]
    fn consistent_complete_matrix() {
        let m = PcMatrix::from_weights(&[1.0, 2.0, 5.0, 0.5]).unwrap();
        let p = build_lp(&m).unwrap();
        let s = solve_lp(&p);
        assert!(s.z_opt.abs() < 1e-12);
        assert_eq!(s.active_rows.len(), 8);
        assert_eq!(maximal_triads(&m, &s, &p).len(), 4);
    }

    #[test]
    fn matrix_a_analytic_optimum() {
        let p = build_lp(&matrix_a()).unwrap();
        let s = solve_lp(&p);
        assert!((s.z_opt - (6.0 / 21f64.sqrt()).ln()).abs() < 1e-9);
        let (cm, c) = recover_solution(&p, &s).unwrap();
        assert!((cm - 0.236237384174).abs() < 1e-9);
        assert!((c.get(1, 2).unwrap() - (7.0f64 / 3.0).sqrt()).abs() < 1e-9);
        assert!((c.get(3, 4).unwrap() - 5.0 / 21f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn recover_zero_and_failure() {
        let m = PcMatrix::empty(3).unwrap();
        let p = build_lp(&m).unwrap();
        let s = solve_lp(&p);
        let (cm, _) = recover_solution(&p, &s).unwrap();
        assert!(cm.abs() < 1e-12);
        let bad = LpSolution::failure("x".into());
        assert!(matches!(recover_solution(&p, &bad), Err(Error::NumericalFailure(_))));
    }

    #[test]
    fn all_missing_is_consistent() {
        let m = PcMatrix::empty(6).unwrap();
        let c = min_cm_completion(&m).unwrap();
        assert!(c.cm_star.abs() < 1e-12);
        assert!(crate::index::cm_complete(&c.completion).unwrap() < 1e-9);
    }

    #[test]
    fn single_triad() {
        let m = PcMatrix::from_upper(3, &[3.0, 5.0, 1.5]).unwrap();
        let c = min_cm_completion(&m).unwrap();
        assert!((c.cm_star - 0.1).abs() < 1e-12);
        assert_eq!(c.maximal_triads.len(), 1);
        assert_eq!(c.maximal_triads[0].indices, (1, 2, 3));
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(cm_lower_bound(&matrix_a()), 0.0);
        let m = PcMatrix::from_weights(&[1.0, 3.0, 2.0]).unwrap();
        assert!(cm_lower_bound(&m) < 1e-12);
    }
}
