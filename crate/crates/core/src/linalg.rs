//! Dense linear-algebra helpers over `nalgebra`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(m: &Matrix) -> Result<Cholesky<f64, Dyn>> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    Cholesky::new(m.clone()).ok_or(Error::NotPositiveDefinite)
}

/// Natural logarithm of the determinant of an SPD matrix.
pub fn log_det(m: &Matrix) -> Result<f64> {
    let chol = cholesky(m)?;
    Ok(log_det_of_factor(&chol))
}

pub fn log_det_of_factor(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
}

/// Determinant of a general square matrix via LU.
pub fn det(m: &Matrix) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    m.clone().lu().determinant()
}

/// `(sign, ln|det|)` of a general square matrix.
pub fn signed_log_det(m: &Matrix) -> (f64, f64) {
    let n = m.nrows();
    if n == 0 {
        return (1.0, 0.0);
    }
    let lu = m.clone().lu();
    let u = lu.u();
    let mut sign = if lu.p().determinant::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let mut acc = 0.0;
    for i in 0..n {
        let d = u[(i, i)];
        if d == 0.0 {
            return (0.0, f64::NEG_INFINITY);
        }
        if d < 0.0 {
            sign = -sign;
        }
        acc += d.abs().ln();
    }
    (sign, acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_det_small_cases() {
        let d = Matrix::from_row_slice(2, 2, &[3.0, -1.0, -1.0, 4.0]);
        assert_relative_eq!(log_det(&d).unwrap(), 11f64.ln(), max_relative = 1e-14);
        assert_eq!(log_det(&Matrix::identity(7, 7)).unwrap(), 0.0);
        let diag = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 5.0]));
        assert_relative_eq!(log_det(&diag).unwrap(), 10f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn log_det_rejects_indefinite() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(log_det(&m), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn signed_log_det_matches_det() {
        let m = Matrix::from_row_slice(3, 3, &[0.0, 2.0, 1.0, 1.0, -1.0, 0.5, 3.0, 0.0, 2.0]);
        let (s, l) = signed_log_det(&m);
        assert_relative_eq!(s * l.exp(), det(&m), max_relative = 1e-12);
    }

    #[test]
    fn log_det_large_identity_scaled() {
        // 2·I_1000 has log det 1000·ln 2.
        let m = Matrix::identity(1000, 1000) * 2.0;
        let expected = 1000.0 * 2f64.ln();
        assert_relative_eq!(log_det(&m).unwrap(), expected, max_relative = 1e-10);
    }
}
