use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::families::Parametrisation;
use crate::error::{Error, Result};
use crate::matcore::symmat::to_coords;
use crate::rng::{rng_for, uniform_vec};

/// Singular values below this fraction of the largest do not count towards the rank.
pub const DIM_RANK_TOL: f64 = 1e-7;

pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Central-difference Jacobian of the flattened parametrisation, one column per parameter.
pub fn jacobian(p: &dyn Parametrisation, at: &[f64], fd_step: f64) -> Result<DMatrix<f64>> {
    if at.len() != p.n_params() {
        return Err(Error::ArityMismatch {
            expected: p.n_params(),
            got: at.len(),
        });
    }
    let cols: Vec<Vec<f64>> = (0..at.len())
        .into_par_iter()
        .map(|k| {
            let mut plus = at.to_vec();
            let mut minus = at.to_vec();
            plus[k] += fd_step;
            minus[k] -= fd_step;
            let a = to_coords(&p.eval(&plus)?);
            let b = to_coords(&p.eval(&minus)?);
            Ok(a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * fd_step)).collect())
        })
        .collect::<Result<_>>()?;
    let rows = cols.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows, cols.len(), |i, k| cols[k][i]))
}

/// Singular values of the Jacobian, descending.
pub fn jacobian_spectrum(p: &dyn Parametrisation, at: &[f64], fd_step: f64) -> Result<Vec<f64>> {
    let j = jacobian(p, at, fd_step)?;
    let mut sv: Vec<f64> = j.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Numerical rank of the Jacobian at `at`.
pub fn manifold_dim(p: &dyn Parametrisation, at: &[f64], fd_step: f64) -> Result<usize> {
    let sv = jacobian_spectrum(p, at, fd_step)?;
    let top = sv.first().copied().unwrap_or(0.0);
    Ok(sv.iter().filter(|&&s| s > DIM_RANK_TOL * top).count())
}

#[derive(Debug, Clone, Serialize)]
pub struct DimEstimate {
    pub dim: usize,
    /// Rank at each retry point.
    pub ranks: Vec<usize>,
    /// Smallest kept singular value relative to the largest, per retry.
    pub smallest_kept: Vec<f64>,
}

/// Jacobian rank at `retries` random parameter points; they must agree.
pub fn estimate_dim(p: &dyn Parametrisation, seed: u64, retries: usize, fd_step: f64) -> Result<DimEstimate> {
    let mut ranks = Vec::with_capacity(retries);
    let mut smallest_kept = Vec::with_capacity(retries);
    for i in 0..retries.max(1) as u64 {
        let at = uniform_vec(&mut rng_for(seed, i), p.n_params());
        let sv = jacobian_spectrum(p, &at, fd_step)?;
        let top = sv.first().copied().unwrap_or(0.0);
        let r = sv.iter().filter(|&&s| s > DIM_RANK_TOL * top).count();
        smallest_kept.push(if r > 0 { sv[r - 1] / top } else { 0.0 });
        ranks.push(r);
    }
    if ranks.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::NonGeneric(format!("Jacobian ranks {ranks:?} differ between retries")));
    }
    Ok(DimEstimate {
        dim: ranks[0],
        ranks,
        smallest_kept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Graph;
    use crate::matcore::SubsystemShape;
    use crate::samplers::families::{DecomposableParam, ExpSymParam, LssmParam, QcmiParam};

    #[test]
    fn exp_of_all_symmetric_matrices() {
        let est = estimate_dim(&ExpSymParam { n: 2 }, 1, 3, DEFAULT_FD_STEP).unwrap();
        assert_eq!(est.dim, 3);
    }

    #[test]
    fn chain_dimensions() {
        let g = Graph::builtin("chain3").unwrap();
        let s = SubsystemShape::qubits(3);
        for seed in 0..3 {
            let lssm = estimate_dim(&LssmParam::new(&g, &s).unwrap(), seed, 3, DEFAULT_FD_STEP).unwrap();
            assert_eq!(lssm.dim, 15);
            let q = estimate_dim(&QcmiParam { psd: false }, seed, 3, DEFAULT_FD_STEP).unwrap();
            assert_eq!(q.dim, 12);
            let d = estimate_dim(&DecomposableParam::new(&g, &s).unwrap(), seed, 3, DEFAULT_FD_STEP).unwrap();
            assert_eq!(d.dim, 10);
        }
    }

    #[test]
    fn rank_drops_at_degenerate_points() {
        // with every factor zero, moving a single factor changes nothing to first order
        let g = Graph::builtin("chain3").unwrap();
        let p = DecomposableParam::new(&g, &SubsystemShape::qubits(3)).unwrap();
        assert!(manifold_dim(&p, &[0.0; 12], DEFAULT_FD_STEP).unwrap() < 10);
    }
}
