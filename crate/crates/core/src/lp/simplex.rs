//! Dense two-phase tableau simplex for `min c·x  s.t.  A x <= b, x >= 0`.
//!
//! Pricing is Dantzig's most-negative reduced cost; after too many
//! consecutive degenerate pivots the solver switches to Bland's rule for the
//! rest of the run, which rules out cycling.

const PRICE_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-11;
const RATIO_TIE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Outcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
    Stalled,
}

/// A linear program `min c·x  s.t.  rows[r].0 · x <= rows[r].1,  x >= 0`.
#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub cost: Vec<f64>,
    pub rows: Vec<(Vec<f64>, f64)>,
}

struct Tableau {
    m: usize,
    width: usize, // columns including the rhs
    data: Vec<f64>,
    basis: Vec<usize>,
    structural: usize,
    first_artificial: usize,
    bland: bool,
    degenerate_run: usize,
    pivots: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    fn objective_row(&mut self) -> &mut [f64] {
        let start = self.m * self.width;
        &mut self.data[start..start + self.width]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let inv = 1.0 / self.at(pr, pc);
        for v in &mut self.data[pr * w..(pr + 1) * w] {
            *v *= inv;
        }
        let pivot_row: Vec<f64> = self.data[pr * w..(pr + 1) * w].to_vec();
        for r in 0..=self.m {
            if r == pr {
                continue;
            }
            let f = self.data[r * w + pc];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.data[r * w..(r + 1) * w];
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            row[pc] = 0.0;
        }
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    fn entering(&self, allow: usize) -> Option<usize> {
        let obj = &self.data[self.m * self.width..];
        if self.bland {
            (0..allow).find(|&j| obj[j] < -PRICE_TOL)
        } else {
            let mut best = None;
            let mut best_val = -PRICE_TOL;
            for (j, &d) in obj[..allow].iter().enumerate() {
                if d < best_val {
                    best_val = d;
                    best = Some(j);
                }
            }
            best
        }
    }

    fn leaving(&self, pc: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.m {
            let a = self.at(r, pc);
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.rhs(r).max(0.0) / a;
            best = match best {
                None => Some((r, ratio)),
                Some((br, bratio)) => {
                    if ratio < bratio - RATIO_TIE {
                        Some((r, ratio))
                    } else if ratio <= bratio + RATIO_TIE {
                        let better = if self.bland {
                            self.basis[r] < self.basis[br]
                        } else {
                            a > self.at(br, pc)
                        };
                        if better {
                            Some((r, ratio))
                        } else {
                            Some((br, bratio))
                        }
                    } else {
                        Some((br, bratio))
                    }
                }
            };
        }
        best.map(|(r, _)| r)
    }

    /// Runs simplex iterations on the current objective row, letting only
    /// columns `< allow` enter.
    fn optimize(&mut self, allow: usize, max_pivots: usize) -> Result<(), Outcome> {
        loop {
            let Some(pc) = self.entering(allow) else {
                return Ok(());
            };
            let Some(pr) = self.leaving(pc) else {
                return Err(Outcome::Unbounded);
            };
            if self.rhs(pr).abs() <= RATIO_TIE {
                self.degenerate_run += 1;
                if self.degenerate_run > 10 * self.m {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }
            self.pivot(pr, pc);
            if self.pivots > max_pivots {
                return Err(Outcome::Stalled);
            }
        }
    }
}

pub(crate) fn solve(p: &Problem) -> Outcome {
    let n = p.cost.len();
    let m = p.rows.len();
    let negative: Vec<usize> = (0..m).filter(|&r| p.rows[r].1 < 0.0).collect();
    let first_artificial = n + m;
    let cols = first_artificial + negative.len();
    let width = cols + 1;

    let mut t = Tableau {
        m,
        width,
        data: vec![0.0; (m + 1) * width],
        basis: vec![0; m],
        structural: n,
        first_artificial,
        bland: false,
        degenerate_run: 0,
        pivots: 0,
    };

    let mut next_art = first_artificial;
    for (r, (coeffs, rhs)) in p.rows.iter().enumerate() {
        debug_assert_eq!(coeffs.len(), n);
        let sign = if *rhs < 0.0 { -1.0 } else { 1.0 };
        let row = &mut t.data[r * width..(r + 1) * width];
        for (dst, &c) in row[..n].iter_mut().zip(coeffs) {
            *dst = sign * c;
        }
        row[n + r] = sign;
        row[width - 1] = sign * rhs;
        if sign < 0.0 {
            row[next_art] = 1.0;
            t.basis[r] = next_art;
            next_art += 1;
        } else {
            t.basis[r] = n + r;
        }
    }

    let max_pivots = 50 * (m + cols) + 1000;

    if !negative.is_empty() {
        // Phase 1: minimize the sum of artificials.
        {
            let obj = t.objective_row();
            for v in obj[first_artificial..cols].iter_mut() {
                *v = 1.0;
            }
        }
        for &r in &negative {
            for c in 0..width {
                let v = t.at(r, c);
                t.data[m * width + c] -= v;
            }
        }
        if let Err(e) = t.optimize(cols, max_pivots) {
            return e;
        }
        let infeasibility = -t.data[m * width + width - 1];
        let scale = p.rows.iter().map(|r| r.1.abs()).fold(1.0, f64::max);
        if infeasibility > 1e-9 * scale {
            return Outcome::Infeasible;
        }
        // Pivot zero-level artificials out where possible; rows that cannot
        // be pivoted are redundant and stay inert.
        for r in 0..m {
            if t.basis[r] >= first_artificial {
                if let Some(c) = (0..first_artificial).find(|&c| t.at(r, c).abs() > 1e-9) {
                    t.pivot(r, c);
                }
            }
        }
    }

    // Phase 2 objective row: c_j - c_B B^-1 A_j.
    {
        let obj_start = m * width;
        for v in &mut t.data[obj_start..] {
            *v = 0.0;
        }
        t.data[obj_start..obj_start + n].copy_from_slice(&p.cost);
        for r in 0..m {
            let b = t.basis[r];
            let cb = if b < n { p.cost[b] } else { 0.0 };
            if cb != 0.0 {
                for c in 0..width {
                    let v = t.at(r, c);
                    t.data[obj_start + c] -= cb * v;
                }
            }
        }
    }
    if let Err(e) = t.optimize(t.first_artificial, max_pivots) {
        return e;
    }

    let mut x = vec![0.0; t.structural];
    for r in 0..m {
        if t.basis[r] < t.structural {
            x[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let value = p.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
    Outcome::Optimal { x, value }
}
