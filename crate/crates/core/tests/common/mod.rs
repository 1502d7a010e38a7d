//! Shared fixtures and an independent brute-force oracle.
#![allow(dead_code)]

use pcm_core::PcMatrix;
use rand::Rng;

pub fn matrix_a() -> PcMatrix {
    PcMatrix::from_entries(4, [(1, 3, 3.5), (1, 4, 5.0), (2, 3, 3.0), (2, 4, 2.5)]).unwrap()
}

pub fn matrix_b() -> PcMatrix {
    PcMatrix::from_entries(
        5,
        [(1, 3, 1.5), (1, 4, 2.0), (2, 3, 0.5), (2, 5, 4.0), (4, 5, 1.0 / 3.0)],
    )
    .unwrap()
}

/// The sixteen entries of matrix D in fill-in order, with the mistyped
/// `d_45 = 1/4`.
pub fn matrix_d_entries() -> Vec<(usize, usize, f64)> {
    vec![
        (1, 2, 3.0),
        (1, 3, 9.0),
        (1, 4, 1.5),
        (1, 5, 6.0),
        (1, 6, 5.0),
        (1, 7, 2.0),
        (2, 3, 3.0),
        (2, 4, 0.5),
        (2, 5, 2.0),
        (2, 6, 1.5),
        (2, 7, 0.5),
        (3, 4, 1.0 / 6.0),
        (3, 5, 2.0 / 3.0),
        (3, 6, 0.5),
        (3, 7, 0.2),
        (4, 5, 0.25),
    ]
}

pub const MATRIX_D_CM_SEQUENCE: [f64; 16] = [
    0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.1, 0.25, 0.25, 0.25, 0.25, 0.25, 15.0 / 16.0,
];

/// CM of a triad, evaluated straight from the three-term minimum.
pub fn oracle_cm_triad(a: f64, b: f64, c: f64) -> f64 {
    let t1 = (a - b / c).abs() / a;
    let t2 = (b - a * c).abs() / b;
    let t3 = (c - b / a).abs() / c;
    t1.min(t2).min(t3)
}

/// CM of the dense matrix `a` (0-based, full n×n).
pub fn oracle_cm_dense(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                worst = worst.max(oracle_cm_triad(a[i][j], a[i][k], a[j][k]));
            }
        }
    }
    worst
}

/// Minimal CM over completions by grid search on the log-values of the
/// missing entries: a log-uniform grid over [1/100, 100], then three
/// refinement rounds around the incumbent. Works for up to two missing pairs.
pub fn oracle_min_cm(m: &PcMatrix) -> f64 {
    let n = m.order();
    let missing = m.missing_pairs();
    assert!(missing.len() <= 2, "grid oracle handles at most two missing pairs");
    let mut dense = vec![vec![1.0; n]; n];
    for i in 1..=n {
        for j in 1..=n {
            if let Some(v) = m.get(i, j) {
                dense[i - 1][j - 1] = v;
            }
        }
    }
    let eval = |dense: &mut Vec<Vec<f64>>, logs: &[f64]| {
        for (&(i, j), &l) in missing.iter().zip(logs) {
            dense[i - 1][j - 1] = l.exp();
            dense[j - 1][i - 1] = (-l).exp();
        }
        oracle_cm_dense(dense)
    };
    if missing.is_empty() {
        return oracle_cm_dense(&dense);
    }

    let span = 100f64.ln();
    let mut centre = vec![0.0; missing.len()];
    let mut half_width = span;
    let mut points = 401usize;
    let mut best = f64::INFINITY;
    for _round in 0..4 {
        let step = 2.0 * half_width / (points - 1) as f64;
        let axis = |c: f64| (0..points).map(move |s| c - half_width + s as f64 * step);
        let mut incumbent = centre.clone();
        if missing.len() == 1 {
            for x in axis(centre[0]) {
                let v = eval(&mut dense, &[x]);
                if v < best {
                    best = v;
                    incumbent = vec![x];
                }
            }
        } else {
            for x in axis(centre[0]) {
                for y in axis(centre[1]) {
                    let v = eval(&mut dense, &[x, y]);
                    if v < best {
                        best = v;
                        incumbent = vec![x, y];
                    }
                }
            }
        }
        centre = incumbent;
        half_width = 4.0 * step;
        points = 161;
    }
    best
}

pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// A complete random matrix with entries log-uniform in [1/9, 9].
pub fn random_complete<R: Rng>(rng: &mut R, n: usize) -> PcMatrix {
    let count = n * (n - 1) / 2;
    let values: Vec<f64> = (0..count).map(|_| log_uniform(rng, 1.0 / 9.0, 9.0)).collect();
    PcMatrix::from_upper(n, &values).unwrap()
}

/// A random matrix with exactly `missing` pairs removed.
pub fn random_incomplete<R: Rng>(rng: &mut R, n: usize, missing: usize) -> PcMatrix {
    let mut m = random_complete(rng, n);
    let mut pairs = m.given_pairs();
    for _ in 0..missing {
        let idx = rng.gen_range(0..pairs.len());
        let (i, j) = pairs.swap_remove(idx);
        m.remove(i, j).unwrap();
    }
    m
}
