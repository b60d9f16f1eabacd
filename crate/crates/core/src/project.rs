//! Information projection onto the Gibbs manifold of a commuting Pauli model.
//!
//! In the common eigenbasis `O` every member of the family is
//! `Σ_j δ_j o_j o_jᵀ / w_j` with `δ = exp(Aᵀx)`, so the projection of `ρ`
//! reduces to the convex dual `min_x Σ_j exp((Aᵀx)_j) − ⟨A·u, x⟩` where
//! `u_j = (OᵀρO)_jj / w_j`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{rel_entropy_generalised, von_neumann, EntropyOptions};
use crate::error::{Error, Result};
use crate::matcore::json::float_matrix_json;
use crate::matcore::{eig_sym, Matrix};
use crate::pauli::ToricModel;
use crate::rng::{rng_for, uniform_symmetric, uniform_vec};

pub const DEFAULT_TOL: f64 = 1e-11;
pub const DEFAULT_MAX_ITER: usize = 200;
pub const CERTIFICATE_SLACK: f64 = 1e-7;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, Copy)]
pub struct ProjectOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ProjectOptions {
    fn default() -> Self {
        ProjectOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Solution of the classical dual problem for a sign matrix `A` and target `u > 0`.
#[derive(Debug, Clone, Serialize)]
pub struct DualSolution {
    pub x: Vec<f64>,
    pub delta: Vec<f64>,
    pub iterations: usize,
    /// `‖A·δ − A·u‖_∞`.
    pub residual: f64,
    /// Newton decrement `gᵀH⁻¹g` at each iterate.
    pub decrements: Vec<f64>,
}

fn a_times(a: &[Vec<i64>], v: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(v).map(|(&r, x)| r as f64 * x).sum()).collect()
}

fn delta_of(a: &[Vec<i64>], x: &[f64]) -> Vec<f64> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| a.iter().zip(x).map(|(row, xi)| row[j] as f64 * xi).sum::<f64>().exp())
        .collect()
}

fn objective(a: &[Vec<i64>], au: &[f64], x: &[f64]) -> f64 {
    delta_of(a, x).iter().sum::<f64>() - au.iter().zip(x).map(|(p, q)| p * q).sum::<f64>()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Damped Newton on `f(x) = Σ_j exp((Aᵀx)_j) − ⟨A·u, x⟩` from `x0`.
pub fn solve_dual(a: &[Vec<i64>], u: &[f64], x0: &[f64], opts: ProjectOptions) -> Result<DualSolution> {
    let k = a.len();
    if x0.len() != k || a.iter().any(|r| r.len() != u.len()) {
        return Err(Error::DimensionMismatch("dual problem dimensions disagree".into()));
    }
    if let Some(j) = u.iter().position(|&v| v <= 0.0 || !v.is_finite()) {
        return Err(Error::SupportViolation(format!("diagonal coordinate {} is {}", j + 1, u[j])));
    }
    let au = a_times(a, u);
    let stop = opts.tol * inf_norm(&au).max(1.0);
    let mut x = x0.to_vec();
    let mut decrements = Vec::new();
    let mut residual = f64::INFINITY;
    for it in 0..=opts.max_iter {
        let delta = delta_of(a, &x);
        let grad: Vec<f64> = a_times(a, &delta).iter().zip(&au).map(|(p, q)| p - q).collect();
        residual = inf_norm(&grad);
        if residual <= stop {
            return Ok(DualSolution {
                x,
                delta,
                iterations: it,
                residual,
                decrements,
            });
        }
        if it == opts.max_iter {
            break;
        }
        let hess = DMatrix::from_fn(k, k, |p, q| {
            a[p].iter().zip(&a[q]).zip(&delta).map(|((&ap, &aq), d)| (ap * aq) as f64 * d).sum()
        });
        let g = DVector::from_column_slice(&grad);
        let chol = hess
            .cholesky()
            .ok_or_else(|| Error::InvalidArgument("dual Hessian is singular; are the generators independent?".into()))?;
        let step = -chol.solve(&g);
        let slope = g.dot(&step);
        decrements.push(-slope);
        let f0 = objective(a, &au, &x);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, s)| xi + t * s).collect();
            let ft = objective(a, &au, &trial);
            // the slack admits steps whose gain is below round-off in f
            if ft.is_finite() && ft <= f0 + ARMIJO * t * slope + 8.0 * f64::EPSILON * f0.abs() {
                x = trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NewtonNoConvergence {
        iterations: opts.max_iter,
        residual,
    })
}

/// `(OᵀρO)_jj / w_j` for each eigenbasis column.
pub fn diagonal_weights(rho: &Matrix<f64>, model: &ToricModel) -> Result<Vec<f64>> {
    let n = model.dim();
    if rho.rows() != n || rho.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "state is {}x{}, model acts on dimension {n}",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok((0..n)
        .map(|j| {
            let col = model.column(j);
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s += col[a] as f64 * rho.get(a, b) * col[b] as f64;
                }
            }
            s / model.weights[j] as f64
        })
        .collect())
}

/// `Σ_j δ_j o_j o_jᵀ / w_j`.
pub fn from_diagonal(delta: &[f64], model: &ToricModel) -> Matrix<f64> {
    let n = model.dim();
    let mut out = Matrix::zeros(n, n);
    for (j, d) in delta.iter().enumerate() {
        let col = model.column(j);
        let s = d / model.weights[j] as f64;
        for a in 0..n {
            for b in 0..n {
                *out.get_mut(a, b) += s * (col[a] * col[b]) as f64;
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionResult {
    #[serde(serialize_with = "matrix_field")]
    pub rho_star: Matrix<f64>,
    /// `b_i = tr(H_i ρ)`.
    pub b: Vec<f64>,
    /// `ρ* = exp(Σ x_i H_i)`.
    pub dual: Vec<f64>,
    pub delta: Vec<f64>,
    pub u: Vec<f64>,
    /// `‖A·δ − A·u‖_∞`.
    pub residual: f64,
    pub iterations: usize,
    pub decrements: Vec<f64>,
    /// `S(ρ*)` in bits, without trace normalisation.
    pub entropy: f64,
    /// Generalised `D(ρ‖ρ*)` in bits.
    pub rel_entropy: f64,
}

fn matrix_field<S: serde::Serializer>(m: &Matrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    float_matrix_json(m).serialize(s)
}

/// The unique point of the Gibbs manifold of `model` with the moments of `rho`.
pub fn info_project(rho: &Matrix<f64>, model: &ToricModel, opts: ProjectOptions) -> Result<ProjectionResult> {
    let e = eig_sym(rho)?;
    if e.min_value() <= 0.0 {
        return Err(Error::NotPositive {
            min_eigenvalue: e.min_value(),
        });
    }
    let u = diagonal_weights(rho, model)?;
    let sol = solve_dual(&model.a, &u, &vec![0.0; model.a.len()], opts)?;
    let rho_star = from_diagonal(&sol.delta, model);
    let entropy = von_neumann(&rho_star, EntropyOptions::unnormalised())?.value;
    let rel_entropy = rel_entropy_generalised(rho, &rho_star)?;
    Ok(ProjectionResult {
        rho_star,
        b: a_times(&model.a, &u),
        dual: sol.x,
        delta: sol.delta,
        u,
        residual: sol.residual,
        iterations: sol.iterations,
        decrements: sol.decrements,
        entropy,
        rel_entropy,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub n_probe: usize,
    /// `min S(ρ*) − S(probe)` over trace-preserving probes in `M_ρ`.
    pub entropy_margin: f64,
    /// `min D(ρ‖probe) − D(ρ‖ρ*)` over manifold probes.
    pub minimality_margin: f64,
    /// `min D(ρ‖probe) − D(ρ‖ρ*) − D(ρ*‖probe)`; zero up to round-off.
    pub pythagorean_gap: f64,
    /// Largest `‖δ − δ̂‖_∞ / max(1, ‖δ̂‖_∞)` over random restarts.
    pub restart_spread: f64,
}

/// Symmetric perturbations orthogonal to every `H_i` and to the identity.
fn constraint_kernel_probe(rng: &mut impl Rng, model: &ToricModel) -> Result<Matrix<f64>> {
    let n = model.dim();
    let mut e = uniform_symmetric(rng, n);
    let mut dirs = model.hamiltonians_f64()?;
    dirs.push(Matrix::identity(n));
    // distinct Pauli words are Hilbert-Schmidt orthogonal, so one pass suffices
    for h in &dirs {
        let hh: f64 = h.data().iter().map(|v| v * v).sum();
        let eh: f64 = e.data().iter().zip(h.data()).map(|(p, q)| p * q).sum();
        e = e.try_sub(&h.scale(&(eh / hh)))?;
    }
    Ok(e)
}

/// Entropy, minimality and uniqueness checks for a converged projection.
pub fn certify_projection(
    rho: &Matrix<f64>,
    result: &ProjectionResult,
    model: &ToricModel,
    n_probe: usize,
    seed: u64,
) -> Result<CertificateReport> {
    let n_probe = n_probe.max(1);
    let lam_min = eig_sym(&result.rho_star)?.min_value();
    let s_star = result.entropy;

    let entropy_margins: Vec<f64> = (0..n_probe as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let e = constraint_kernel_probe(&mut rng, model)?;
            let spec = eig_sym(&e)?.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            // alternate small and large steps, staying inside the PSD cone
            let frac = if i % 2 == 0 { 1e-2 } else { 0.9 };
            let probe = result.rho_star.try_add(&e.scale(&(frac * lam_min / spec.max(f64::MIN_POSITIVE))))?;
            Ok(s_star - von_neumann(&probe, EntropyOptions::unnormalised())?.value)
        })
        .collect::<Result<_>>()?;

    let d_star = result.rel_entropy;
    let gaps: Vec<(f64, f64)> = (0..n_probe as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, 1 << 32 | i);
            let noise = uniform_vec(&mut rng, result.dual.len());
            let scale = if i % 2 == 0 { 0.05 } else { 1.0 };
            let y: Vec<f64> = result.dual.iter().zip(&noise).map(|(x, z)| x + scale * z).collect();
            let probe = from_diagonal(&delta_of(&model.a, &y), model);
            let d_probe = rel_entropy_generalised(rho, &probe)?;
            let d_star_probe = rel_entropy_generalised(&result.rho_star, &probe)?;
            Ok((d_probe - d_star, d_probe - d_star - d_star_probe))
        })
        .collect::<Result<_>>()?;

    let top = inf_norm(&result.delta).max(1.0);
    let spreads: Vec<f64> = (0..5u64)
        .into_par_iter()
        .map(|i| {
            let x0 = uniform_vec(&mut rng_for(seed, 2 << 32 | i), result.dual.len());
            let sol = solve_dual(&model.a, &result.u, &x0, ProjectOptions::default())?;
            Ok(sol.delta.iter().zip(&result.delta).fold(0.0f64, |m, (p, q)| m.max((p - q).abs())) / top)
        })
        .collect::<Result<_>>()?;

    let min = |v: &mut dyn Iterator<Item = f64>| v.fold(f64::INFINITY, f64::min);
    let report = CertificateReport {
        n_probe,
        entropy_margin: min(&mut entropy_margins.iter().copied()),
        minimality_margin: min(&mut gaps.iter().map(|g| g.0)),
        pythagorean_gap: min(&mut gaps.iter().map(|g| g.1)),
        restart_spread: spreads.iter().copied().fold(0.0, f64::max),
    };
    if report.entropy_margin < -CERTIFICATE_SLACK {
        return Err(Error::CertificateFailed(format!(
            "a probe in M_rho has entropy {:.3e} above the projection",
            -report.entropy_margin
        )));
    }
    if report.minimality_margin < -CERTIFICATE_SLACK {
        return Err(Error::CertificateFailed(format!(
            "a manifold point is closer by {:.3e}",
            -report.minimality_margin
        )));
    }
    if report.pythagorean_gap < -1e-6 {
        return Err(Error::CertificateFailed(format!(
            "Pythagorean gap {:.3e}",
            report.pythagorean_gap
        )));
    }
    if report.restart_spread > 1e-8 {
        return Err(Error::CertificateFailed(format!(
            "restarts disagree by {:.3e}",
            report.restart_spread
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Graph;
    use crate::matcore::mat_exp;
    use crate::pauli::{graph_hamiltonians, simultaneous_diag, PauliWord};

    fn chain3() -> ToricModel {
        simultaneous_diag(&graph_hamiltonians(&Graph::builtin("chain3").unwrap())).unwrap()
    }

    fn member(model: &ToricModel, x: &[f64]) -> Matrix<f64> {
        let hs = model.hamiltonians_f64().unwrap();
        let mut h = Matrix::zeros(model.dim(), model.dim());
        for (hi, xi) in hs.iter().zip(x) {
            h = h.try_add(&hi.scale(xi)).unwrap();
        }
        mat_exp(&h).unwrap()
    }

    #[test]
    fn manifold_points_are_fixed() {
        let model = chain3();
        let rho = member(&model, &[0.4, -0.3, 0.2]);
        let r = info_project(&rho, &model, ProjectOptions::default()).unwrap();
        assert!(r.rho_star.distance(&rho) < 1e-8);
        assert!(r.rel_entropy.abs() < 1e-10);
        for (x, want) in r.dual.iter().zip([0.4, -0.3, 0.2]) {
            assert!((x - want).abs() < 1e-9);
        }
        assert!(r.decrements.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn identity_projects_to_the_centre() {
        let model = chain3();
        let rho = Matrix::<f64>::identity(8).scale(&0.125);
        let r = info_project(&rho, &model, ProjectOptions::default()).unwrap();
        assert!(r.dual.iter().all(|x| x.abs() < 1e-12));
        assert!(r.rho_star.distance(&Matrix::identity(8)) < 1e-10);
        certify_projection(&rho, &r, &model, 8, 1).unwrap();
    }

    #[test]
    fn moments_match_and_certificates_pass() {
        let model = chain3();
        let rho = crate::rng::random_state(&mut rng_for(5, 0), 8);
        let r = info_project(&rho, &model, ProjectOptions::default()).unwrap();
        let hs = model.hamiltonians_f64().unwrap();
        let scale = inf_norm(&r.b).max(1.0);
        for (h, b) in hs.iter().zip(&r.b) {
            let got: f64 = h.data().iter().zip(r.rho_star.data()).map(|(p, q)| p * q).sum();
            assert!((got - b).abs() <= 1e-9 * scale);
        }
        let c = certify_projection(&rho, &r, &model, 16, 2).unwrap();
        assert!(c.pythagorean_gap.abs() < 1e-9);
    }

    #[test]
    fn rejects_singular_input() {
        let model = simultaneous_diag(&["Z".parse::<PauliWord>().unwrap()]).unwrap();
        let err = info_project(&Matrix::diag(&[1.0, 0.0]), &model, ProjectOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NotPositive { .. }));
        assert!(matches!(
            solve_dual(&model.a, &[1.0, 0.0], &[0.0], ProjectOptions::default()),
            Err(Error::SupportViolation(_))
        ));
    }

    #[test]
    fn iteration_cap_is_reported() {
        let model = chain3();
        let rho = crate::rng::random_state(&mut rng_for(6, 0), 8);
        let opts = ProjectOptions { tol: 1e-11, max_iter: 1 };
        assert!(matches!(
            info_project(&rho, &model, opts),
            Err(Error::NewtonNoConvergence { iterations: 1, .. })
        ));
    }
}
