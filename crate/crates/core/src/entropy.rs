//! Von Neumann entropy, relative entropy and conditional mutual information,
//! all reported in bits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{eig_sym, partial_trace, Matrix, SubsystemShape, PSD_TOL};

/// Eigenvalues below this fraction of the largest are treated as zero.
pub const ZERO_CLAMP: f64 = 1e-12;

/// Tolerance on `‖(I − Π_σ) ρ (I − Π_σ)‖_F` for the support test.
pub const SUPPORT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct EntropyOptions {
    /// Eigenvalues below `-tol` are an error.
    pub tol: f64,
    /// Require `|tr ρ − 1| ≤ 1e-9`.
    pub check_trace: bool,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions {
            tol: PSD_TOL,
            check_trace: true,
        }
    }
}

impl EntropyOptions {
    pub fn unnormalised() -> Self {
        EntropyOptions {
            check_trace: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyReport {
    pub value: f64,
    pub rank_used: usize,
}

fn check_trace(rho: &Matrix<f64>) -> Result<()> {
    let t = rho.trace();
    if (t - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalised { trace: t });
    }
    Ok(())
}

fn xlog2x(values: &[f64]) -> (f64, usize) {
    let top = values.iter().fold(0.0f64, |m, &v| m.max(v));
    let cut = ZERO_CLAMP * top;
    let mut s = 0.0;
    let mut used = 0;
    for &v in values {
        if v > cut && v > 0.0 {
            s += v * v.log2();
            used += 1;
        }
    }
    (s, used)
}

/// `S(ρ) = −tr ρ log₂ ρ`.
pub fn von_neumann(rho: &Matrix<f64>, opts: EntropyOptions) -> Result<EntropyReport> {
    if opts.check_trace {
        check_trace(rho)?;
    }
    let e = eig_sym(rho)?;
    if e.min_value() < -opts.tol {
        return Err(Error::NotPositive {
            min_eigenvalue: e.min_value(),
        });
    }
    let (s, rank_used) = xlog2x(&e.values);
    Ok(EntropyReport {
        value: -s,
        rank_used,
    })
}

/// Entropy of the marginal on `keep`.
pub fn marginal_entropy(rho: &Matrix<f64>, shape: &SubsystemShape, keep: &[usize]) -> Result<f64> {
    if keep.is_empty() {
        return Ok(0.0);
    }
    let mut k = keep.to_vec();
    k.sort_unstable();
    let m = partial_trace(rho, shape, &k)?;
    Ok(von_neumann(&m, EntropyOptions::unnormalised())?.value)
}

/// `I(A:C|B) = S(AB) + S(BC) − S(ABC) − S(B)`. `B` may be empty.
pub fn qcmi(
    rho: &Matrix<f64>,
    shape: &SubsystemShape,
    a: &[usize],
    c: &[usize],
    b: &[usize],
) -> Result<f64> {
    check_split(shape, a, c, b)?;
    check_trace(rho)?;
    let union = |parts: &[&[usize]]| -> Vec<usize> {
        let mut v: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
        v.sort_unstable();
        v
    };
    let s_ab = marginal_entropy(rho, shape, &union(&[a, b]))?;
    let s_bc = marginal_entropy(rho, shape, &union(&[b, c]))?;
    let s_abc = marginal_entropy(rho, shape, &union(&[a, b, c]))?;
    let s_b = marginal_entropy(rho, shape, &union(&[b]))?;
    Ok(s_ab + s_bc - s_abc - s_b)
}

fn check_split(shape: &SubsystemShape, a: &[usize], c: &[usize], b: &[usize]) -> Result<()> {
    if a.is_empty() || c.is_empty() {
        return Err(Error::InvalidSplit("A and C must be nonempty".into()));
    }
    let mut seen = vec![false; shape.len()];
    for &f in a.iter().chain(c).chain(b) {
        if f >= shape.len() {
            return Err(Error::InvalidSplit(format!(
                "factor {} out of range 1..={}",
                f + 1,
                shape.len()
            )));
        }
        if std::mem::replace(&mut seen[f], true) {
            return Err(Error::InvalidSplit(format!("factor {} used twice", f + 1)));
        }
    }
    Ok(())
}

/// `tr ρ(log₂ ρ − log₂ σ)` without trace conditions; `+∞` when the support of
/// `ρ` is not contained in that of `σ`.
fn relative_core(rho: &Matrix<f64>, sigma: &Matrix<f64>, tol: f64) -> Result<f64> {
    if rho.rows() != sigma.rows() || !rho.is_square() || !sigma.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            rho.rows(),
            rho.cols(),
            sigma.rows(),
            sigma.cols()
        )));
    }
    let er = eig_sym(rho)?;
    let es = eig_sym(sigma)?;
    for e in [&er, &es] {
        if e.min_value() < -tol {
            return Err(Error::NotPositive {
                min_eigenvalue: e.min_value(),
            });
        }
    }
    let n = rho.rows();
    let cut = ZERO_CLAMP * es.max_value().max(0.0);
    let support: Vec<usize> = (0..n).filter(|&k| es.values[k] > cut && es.values[k] > tol).collect();

    // (I − Π)ρ(I − Π) with Π the support projector of σ
    let mut pi = Matrix::<f64>::zeros(n, n);
    for &k in &support {
        for i in 0..n {
            for j in 0..n {
                let v = pi.get(i, j) + es.vectors.get(i, k) * es.vectors.get(j, k);
                pi.set(i, j, v);
            }
        }
    }
    let q = &Matrix::identity(n) - &pi;
    let leak = q.dot(rho).dot(&q).frobenius_norm();
    if leak >= SUPPORT_TOL {
        return Ok(f64::INFINITY);
    }

    let (rho_log_rho, _) = xlog2x(&er.values);
    let mut cross = 0.0;
    for &k in &support {
        let vk = es.vectors.column(k);
        let rv = rho.mul_vec(&vk)?;
        let quad: f64 = vk.iter().zip(&rv).map(|(a, b)| a * b).sum();
        cross += quad * es.values[k].log2();
    }
    Ok(rho_log_rho - cross)
}

/// Quantum relative entropy `D(ρ‖σ)` in bits; `ρ` must have unit trace.
pub fn rel_entropy(rho: &Matrix<f64>, sigma: &Matrix<f64>) -> Result<f64> {
    check_trace(rho)?;
    relative_core(rho, sigma, PSD_TOL)
}

/// Relative entropy for unnormalised arguments,
/// `tr ρ(log₂ ρ − log₂ σ) − (tr ρ − tr σ)/ln 2`. Nonnegative, and zero iff `ρ = σ`.
pub fn rel_entropy_generalised(rho: &Matrix<f64>, sigma: &Matrix<f64>) -> Result<f64> {
    let core = relative_core(rho, sigma, PSD_TOL)?;
    Ok(core - (rho.trace() - sigma.trace()) / std::f64::consts::LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::kron_all;
    use crate::rng::{random_state, rng_for};

    fn bell() -> Matrix<f64> {
        let mut m = Matrix::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            m.set(i, j, 0.5);
        }
        m
    }

    #[test]
    fn entropy_examples() {
        let d = EntropyOptions::default();
        assert!(von_neumann(&bell(), d).unwrap().value.abs() < 1e-12);
        assert_eq!(von_neumann(&bell(), d).unwrap().rank_used, 1);
        let half = Matrix::<f64>::identity(2).scale(&0.5);
        assert!((von_neumann(&half, d).unwrap().value - 1.0).abs() < 1e-12);
        let quarter = Matrix::<f64>::identity(4).scale(&0.25);
        assert!((von_neumann(&quarter, d).unwrap().value - 2.0).abs() < 1e-12);
        assert!(von_neumann(&Matrix::diag(&[1.5, -0.5]), d).is_err());
        assert!(matches!(
            von_neumann(&Matrix::identity(2), d),
            Err(Error::NotNormalised { .. })
        ));
    }

    #[test]
    fn qcmi_of_product_and_mixed() {
        let shape = SubsystemShape::qubits(3);
        let mut rng = rng_for(5, 0);
        let prod = kron_all(&[
            random_state(&mut rng, 2),
            random_state(&mut rng, 2),
            random_state(&mut rng, 2),
        ]);
        assert!(qcmi(&prod, &shape, &[0], &[2], &[1]).unwrap().abs() < 1e-9);
        let mixed = Matrix::<f64>::identity(8).scale(&0.125);
        assert!(qcmi(&mixed, &shape, &[0], &[2], &[1]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn qcmi_is_symmetric_and_validates_split() {
        let shape = SubsystemShape::qubits(3);
        let rho = random_state(&mut rng_for(9, 1), 8);
        let x = qcmi(&rho, &shape, &[0], &[2], &[1]).unwrap();
        let y = qcmi(&rho, &shape, &[2], &[0], &[1]).unwrap();
        assert_eq!(x, y);
        assert!(x >= -1e-7);
        assert!(matches!(
            qcmi(&rho, &shape, &[0], &[0], &[1]),
            Err(Error::InvalidSplit(_))
        ));
        assert!(qcmi(&rho, &shape, &[0], &[3], &[1]).is_err());
        assert!(qcmi(&rho, &shape, &[], &[2], &[1]).is_err());
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = random_state(&mut rng_for(2, 2), 4);
        assert!(rel_entropy(&rho, &rho).unwrap().abs() < 1e-10);
        let half = Matrix::<f64>::identity(2).scale(&0.5);
        for p in [0.1f64, 0.3, 0.5, 0.8] {
            let want = -1.0 - 0.5 * (p * (1.0 - p)).log2();
            let got = rel_entropy(&half, &Matrix::diag(&[p, 1.0 - p])).unwrap();
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        let up = Matrix::diag(&[1.0, 0.0]);
        let down = Matrix::diag(&[0.0, 1.0]);
        assert_eq!(rel_entropy(&up, &down).unwrap(), f64::INFINITY);
        assert!(rel_entropy(&up, &Matrix::diag(&[0.7, 0.0])).unwrap().is_finite());
    }

    #[test]
    fn generalised_divergence_is_zero_only_on_diagonal() {
        let rho = random_state(&mut rng_for(4, 4), 4).scale(&3.0);
        assert!(rel_entropy_generalised(&rho, &rho).unwrap().abs() < 1e-10);
        let other = rho.scale(&1.1);
        assert!(rel_entropy_generalised(&rho, &other).unwrap() > 0.0);
    }
}
