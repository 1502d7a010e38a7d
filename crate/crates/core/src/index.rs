//! Koczkodaj's CM inconsistency and the companion ratio `T`.

use crate::error::{check_positive, Error, Result};
use crate::matrix::PcMatrix;

/// Absolute tolerance below which a CM value counts as consistent.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// `CM(a, b, c) = min{ |a - b/c| / a, |b - ac| / b, |c - b/a| / c }` for
/// the triad `(a_ij, a_ik, a_jk)`.
pub fn cm_triad(a: f64, b: f64, c: f64) -> Result<f64> {
    check_triad(a, b, c)?;
    let first = (a - b / c).abs() / a;
    let second = (b - a * c).abs() / b;
    let third = (c - b / a).abs() / c;
    Ok(first.min(second).min(third))
}

/// `T(a, b, c) = max{ ac/b, b/(ac) }`.
pub fn t_triad(a: f64, b: f64, c: f64) -> Result<f64> {
    check_triad(a, b, c)?;
    let r = a * c / b;
    Ok(r.max(1.0 / r))
}

fn check_triad(a: f64, b: f64, c: f64) -> Result<()> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    check_positive("c", c)
}

/// `CM = 1 - 1/T`.
pub fn cm_from_t(t: f64) -> Result<f64> {
    if !(t >= 1.0 && t.is_finite()) {
        return Err(Error::Domain(format!("T must be finite and at least 1, got {t}")));
    }
    Ok(1.0 - 1.0 / t)
}

/// `T = 1 / (1 - CM)`.
pub fn t_from_cm(u: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::Domain(format!("CM must lie in [0, 1), got {u}")));
    }
    Ok(1.0 / (1.0 - u))
}

/// CM of a complete matrix: the largest triad CM. Orders below 3 have no
/// triads and score 0.
pub fn cm_complete(m: &PcMatrix) -> Result<f64> {
    if !m.is_complete() {
        return Err(Error::Incomplete(m.missing_count()));
    }
    Ok(max_known_cm(m))
}

/// Largest CM over the known triads of `m`, 0 if there are none.
pub(crate) fn max_known_cm(m: &PcMatrix) -> f64 {
    m.triads()
        .filter_map(|t| t.values())
        .map(|(a, b, c)| cm_triad(a, b, c).expect("matrix entries are positive"))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: f64, y: f64) -> bool {
        (x - y).abs() <= 1e-12 * y.abs().max(1.0)
    }

    #[test]
    fn cm_examples() {
        assert_eq!(cm_triad(2.0, 4.0, 2.0).unwrap(), 0.0);
        assert!(close(cm_triad(1.0 / 6.0, 2.0 / 3.0, 0.25).unwrap(), 15.0 / 16.0));
        assert!(close(cm_triad(3.0, 5.0, 1.5).unwrap(), 0.1));
    }

    #[test]
    fn t_examples() {
        assert_eq!(t_triad(2.0, 4.0, 2.0).unwrap(), 1.0);
        assert!(close(t_triad(1.0 / 6.0, 2.0 / 3.0, 0.25).unwrap(), 16.0));
        assert!(close(t_triad(3.0, 5.0, 1.5).unwrap(), 10.0 / 9.0));
    }

    #[test]
    fn cm_t_conversions() {
        assert_eq!(cm_from_t(1.0).unwrap(), 0.0);
        assert!(close(cm_from_t(16.0).unwrap(), 15.0 / 16.0));
        assert!(close(t_from_cm(0.25).unwrap(), 4.0 / 3.0));
        assert!(cm_from_t(0.5).is_err());
        assert!(t_from_cm(1.0).is_err());
        assert!(t_from_cm(-0.1).is_err());
    }

    #[test]
    fn domain_errors() {
        assert!(cm_triad(0.0, 1.0, 1.0).is_err());
        assert!(cm_triad(1.0, -1.0, 1.0).is_err());
        assert!(t_triad(1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn cm_complete_examples() {
        let m = PcMatrix::from_upper(3, &[3.0, 5.0, 1.5]).unwrap();
        assert!(close(cm_complete(&m).unwrap(), 0.1));
        let d4 = PcMatrix::from_upper(4, &[3.0, 9.0, 1.5, 3.0, 0.5, 1.0 / 6.0]).unwrap();
        assert!(cm_complete(&d4).unwrap() <= CONSISTENCY_TOL);
        let two = PcMatrix::from_upper(2, &[7.0]).unwrap();
        assert_eq!(cm_complete(&two).unwrap(), 0.0);
        let incomplete = PcMatrix::empty(3).unwrap();
        assert_eq!(cm_complete(&incomplete), Err(Error::Incomplete(3)));
    }
}
