//! Spectral functions of real symmetric matrices.

use crate::error::{Error, Result};

use super::eig::eig_sym;
use super::matrix::Matrix;

/// Default absolute eigenvalue tolerance for positivity tests.
pub const PSD_TOL: f64 = 1e-9;

pub fn mat_exp(m: &Matrix<f64>) -> Result<Matrix<f64>> {
    Ok(eig_sym(m)?.map_values(f64::exp))
}

/// Natural logarithm; every eigenvalue must exceed `tol`.
pub fn mat_log(m: &Matrix<f64>, tol: f64) -> Result<Matrix<f64>> {
    let e = eig_sym(m)?;
    if e.min_value() <= tol {
        return Err(Error::NotPositive {
            min_eigenvalue: e.min_value(),
        });
    }
    Ok(e.map_values(f64::ln))
}

/// Square root of a PSD matrix; eigenvalues in `[-tol, 0)` are clamped to zero.
pub fn mat_sqrt(m: &Matrix<f64>, tol: f64) -> Result<Matrix<f64>> {
    let e = eig_sym(m)?;
    if e.min_value() < -tol {
        return Err(Error::NotPositive {
            min_eigenvalue: e.min_value(),
        });
    }
    Ok(e.map_values(|v| v.max(0.0).sqrt()))
}

pub fn mat_inv_sqrt(m: &Matrix<f64>, tol: f64) -> Result<Matrix<f64>> {
    let e = eig_sym(m)?;
    if e.min_value() <= tol {
        return Err(Error::NotPositive {
            min_eigenvalue: e.min_value(),
        });
    }
    Ok(e.map_values(|v| 1.0 / v.sqrt()))
}

pub fn min_eigenvalue(m: &Matrix<f64>) -> Result<f64> {
    Ok(eig_sym(m)?.min_value())
}

/// True iff the smallest eigenvalue is at least `-tol`. Malformed input is not PSD.
pub fn is_psd(m: &Matrix<f64>, tol: f64) -> bool {
    min_eigenvalue(m).map(|v| v >= -tol).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bell() -> Matrix<f64> {
        let mut m = Matrix::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            m.set(i, j, 0.5);
        }
        m
    }

    fn random_sym(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
        Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0)).symmetrized()
    }

    #[test]
    fn exp_of_zero_and_diagonal() {
        assert!(mat_exp(&Matrix::zeros(3, 3)).unwrap().distance(&Matrix::identity(3)) < 1e-15);
        let e = mat_exp(&Matrix::diag(&[0.5, -2.0])).unwrap();
        assert!(e.distance(&Matrix::diag(&[0.5f64.exp(), (-2.0f64).exp()])) < 1e-15);
    }

    #[test]
    fn sqrt_of_pure_state_is_itself() {
        let s = mat_sqrt(&bell(), PSD_TOL).unwrap();
        assert!(s.distance(&bell()) < 1e-12);
        assert!(is_psd(&bell(), PSD_TOL));
        assert!(is_psd(&Matrix::identity(4), PSD_TOL));
        assert!(!is_psd(&Matrix::diag(&[1.0, -1.0]), PSD_TOL));
    }

    #[test]
    fn log_and_inverse_sqrt_need_positivity() {
        assert!(matches!(mat_log(&bell(), PSD_TOL), Err(Error::NotPositive { .. })));
        assert!(mat_inv_sqrt(&bell(), PSD_TOL).is_err());
        assert!(mat_sqrt(&Matrix::diag(&[1.0, -1.0]), PSD_TOL).is_err());
    }

    #[test]
    fn roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 4, 8] {
            let h = random_sym(&mut rng, n);
            let e = mat_exp(&h).unwrap();
            assert!(min_eigenvalue(&e).unwrap() > 0.0);
            let back = mat_exp(&mat_log(&e, 0.0).unwrap()).unwrap();
            assert!(back.distance(&e) <= 1e-10 * e.frobenius_norm());
            let s = mat_sqrt(&e, PSD_TOL).unwrap();
            assert!(s.dot(&s).distance(&e) <= 1e-10 * e.frobenius_norm());
            let is = mat_inv_sqrt(&e, 0.0).unwrap();
            assert!(is.dot(&s).distance(&Matrix::identity(n)) <= 1e-10 * n as f64);
        }
    }
}
