//! Small dense linear-algebra helpers shared by the distribution code.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative symmetry tolerance for covariance matrices.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Allowed negative eigenvalue, relative to the largest one.
pub const PSD_TOL: f64 = 1e-9;

const JITTER_START: f64 = 1e-12;
const JITTER_MAX: f64 = 1e-6;

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Checks symmetry and positive semi-definiteness within the crate tolerances.
pub fn check_psd(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!(
            "{what} is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invariant(format!("{what} has non-finite entries")));
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let asym = (m - m.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::Invariant(format!(
            "{what} is not symmetric (max asymmetry {asym:e})"
        )));
    }
    let (lo, hi) = eigen_range(m);
    if lo < -PSD_TOL * hi.max(0.0) - f64::EPSILON * scale {
        return Err(Error::Invariant(format!(
            "{what} is not positive semi-definite (min eigenvalue {lo:e}, max {hi:e})"
        )));
    }
    Ok(())
}

/// Smallest and largest eigenvalue of the symmetric part of `m`.
pub fn eigen_range(m: &DMatrix<f64>) -> (f64, f64) {
    if m.nrows() == 0 {
        return (0.0, 0.0);
    }
    let eig = symmetrize(m).symmetric_eigen();
    let lo = eig.eigenvalues.min();
    let hi = eig.eigenvalues.max();
    (lo, hi)
}

/// Lower Cholesky factor of a covariance, escalating diagonal jitter from
/// 1e-12 to 1e-6 (scaled by the mean diagonal) before giving up.
pub fn robust_cholesky(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sym = symmetrize(m);
    if sym.iter().all(|v| *v == 0.0) {
        return Ok(DMatrix::zeros(sym.nrows(), sym.ncols()));
    }
    if let Some(ch) = sym.clone().cholesky() {
        return Ok(ch.l());
    }
    let n = sym.nrows();
    let scale = if n == 0 {
        1.0
    } else {
        (sym.trace() / n as f64).abs().max(1.0e-300)
    };
    let mut jitter = JITTER_START;
    while jitter <= JITTER_MAX * (1.0 + 1e-9) {
        let mut trial = sym.clone();
        for i in 0..n {
            trial[(i, i)] += jitter * scale;
        }
        if let Some(ch) = trial.cholesky() {
            return Ok(ch.l());
        }
        jitter *= 10.0;
    }
    // A zero matrix (or one with tiny negative noise) has an all-zero factor.
    if sym.amax() <= JITTER_MAX * scale {
        return Ok(DMatrix::zeros(n, n));
    }
    Err(Error::Numeric(format!(
        "Cholesky factorization of a {n}x{n} covariance failed after jitter up to {JITTER_MAX:e}"
    )))
}

/// Solves `a x = b` for symmetric positive definite `a`.
pub fn solve_spd(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let ch = symmetrize(a).cholesky()?;
    let x = ch.solve(b);
    x.iter().all(|v| v.is_finite()).then_some(x)
}

pub fn frobenius_relative(a: &DMatrix<f64>, reference: &DMatrix<f64>) -> f64 {
    (a - reference).norm() / reference.norm()
}

pub fn is_finite_vec(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_of_zero_matrix_is_zero() {
        let l = robust_cholesky(&DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(l, DMatrix::zeros(3, 3));
    }

    #[test]
    fn cholesky_repairs_rank_deficiency() {
        let v = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let m = &v * v.transpose();
        let l = robust_cholesky(&m).unwrap();
        let back = &l * l.transpose();
        assert!((back - m).amax() < 1e-5);
    }

    #[test]
    fn psd_check_rejects_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(check_psd(&m, "m"), Err(Error::Invariant(_))));
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(check_psd(&s, "s").is_err());
        assert!(check_psd(&DMatrix::identity(2, 2), "i").is_ok());
    }
}
