use crate::error::{Error, Result};

use super::matrix::Matrix;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigDecomp {
    pub values: Vec<f64>,
    pub vectors: Matrix<f64>,
}

impl EigDecomp {
    pub fn reconstruct(&self) -> Matrix<f64> {
        self.map_values(|v| v)
    }

    /// `V · diag(f(λ)) · Vᵀ`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Matrix<f64> {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        let v = &self.vectors;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let s: f64 = (0..n).map(|k| v.get(i, k) * fv[k] * v.get(j, k)).sum();
                out.set(i, j, s);
                out.set(j, i, s);
            }
        }
        out
    }

    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

fn check_input(m: &Matrix<f64>) -> Result<()> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "expected a nonempty square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for i in 0..m.rows() {
        for j in 0..i {
            if (m.get(i, j) - m.get(j, i)).abs() > 1e-9 * scale {
                return Err(Error::NotSymmetric(format!(
                    "entries ({},{}) and ({},{}) differ",
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Stops once the off-diagonal Frobenius mass falls below `1e-14·‖m‖_F`.
pub fn eig_sym(m: &Matrix<f64>) -> Result<EigDecomp> {
    check_input(m)?;
    let n = m.rows();
    let mut a = m.symmetrized();
    let mut v = Matrix::<f64>::identity(n);
    let norm = a.frobenius_norm();
    let target = 1e-14 * norm;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).powi(2))
            .sum::<f64>()
            .sqrt();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = *a.get(p, q);
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = *a.get(k, p);
                    let akq = *a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = *a.get(p, k);
                    let aqk = *a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = *v.get(k, p);
                    let vkq = *v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).total_cmp(a.get(i, i)));
    let values = order.iter().map(|&i| *a.get(i, i)).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| *v.get(r, order[c]));
    Ok(EigDecomp { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check(m: &Matrix<f64>) -> EigDecomp {
        let e = eig_sym(m).unwrap();
        let n = m.rows() as f64;
        let r = e.reconstruct().distance(m);
        assert!(r <= 1e-12 * m.frobenius_norm().max(1.0) * n, "reconstruction {r}");
        let vtv = e.vectors.transpose().dot(&e.vectors);
        assert!(vtv.distance(&Matrix::identity(m.rows())) <= 1e-12 * n);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        e
    }

    #[test]
    fn diagonal_input() {
        let e = check(&Matrix::diag(&[3.0, 1.0]));
        assert_eq!(e.values, vec![3.0, 1.0]);
        assert_eq!(e.vectors, Matrix::identity(2));
    }

    #[test]
    fn sigma_x() {
        let sx = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = check(&sx);
        assert!((e.values[0] - 1.0).abs() < 1e-15 && (e.values[1] + 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c0 = e.vectors.column(0);
        let c1 = e.vectors.column(1);
        assert!((c0[0].abs() - h).abs() < 1e-15 && (c0[0] - c0[1]).abs() < 1e-15);
        assert!((c1[0] + c1[1]).abs() < 1e-15);
    }

    #[test]
    fn hilbert_against_reference() {
        // reference values from a 50-digit solver
        let reference = [
            1.500_214_280_059_242_8,
            0.169_141_220_221_450_03,
            6.738_273_605_760_748e-3,
            9.670_230_402_258_689e-5,
        ];
        let h = Matrix::from_fn(4, 4, |i, j| 1.0 / (i + j + 1) as f64);
        let e = check(&h);
        for (got, want) in e.values.iter().zip(reference) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn random_symmetric_sixteen() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let a = Matrix::from_fn(16, 16, |_, _| rng.gen_range(-1.0..1.0));
            let m = a.symmetrized();
            let e = check(&m);
            let sum: f64 = e.values.iter().sum();
            assert!((sum - m.trace()).abs() <= 1e-10 * m.trace().abs().max(1.0));
        }
    }

    #[test]
    fn rejects_bad_input() {
        let m = Matrix::from_rows(vec![vec![1.0, f64::NAN], vec![f64::NAN, 1.0]]).unwrap();
        assert!(matches!(eig_sym(&m), Err(Error::NonFinite)));
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(eig_sym(&m), Err(Error::NotSymmetric(_))));
    }
}
