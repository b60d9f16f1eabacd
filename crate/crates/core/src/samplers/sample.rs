use rayon::prelude::*;
use serde_json::json;

use super::families::{DecomposableParam, LssmParam, ModelGibbsParam, Parametrisation, QcmiParam};
use super::sampleset::{SampleMeta, SampleSet};
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::matcore::symmat::to_coords;
use crate::matcore::{min_eigenvalue, Matrix, SubsystemShape, PSD_TOL};
use crate::rng::{rng_for, uniform_vec};

/// Fresh parameter draws allowed per index before giving up on a degenerate family.
pub const MAX_RESAMPLES: usize = 16;

/// Evaluates `p` at the `index`-th uniform parameter draw under `seed`,
/// redrawing from the same stream when a draw is degenerate.
pub fn draw(p: &dyn Parametrisation, seed: u64, index: u64) -> Result<Matrix<f64>> {
    let mut rng = rng_for(seed, index);
    let mut last = None;
    for _ in 0..MAX_RESAMPLES {
        let theta = uniform_vec(&mut rng, p.n_params());
        match p.eval(&theta) {
            Err(e @ Error::DegenerateSample(_)) => last = Some(e),
            other => return other,
        }
    }
    Err(last.unwrap_or_else(|| Error::DegenerateSample("no draw".into())))
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    Ok(())
}

/// `count` points of a family, drawn in parallel with per-index seeds.
pub fn sample_matrices(p: &dyn Parametrisation, seed: u64, count: usize) -> Result<Vec<Matrix<f64>>> {
    check_count(count)?;
    (0..count as u64).into_par_iter().map(|i| draw(p, seed, i)).collect()
}

fn meta(p: &dyn Parametrisation, seed: u64, count: usize) -> SampleMeta {
    SampleMeta {
        generator: p.name(),
        seed,
        count,
        params: json!({"n_params": p.n_params(), "distribution": "uniform[-1,1]"}),
        non_state: Vec::new(),
    }
}

pub fn sample_family(p: &dyn Parametrisation, seed: u64, count: usize) -> Result<SampleSet> {
    let points = sample_matrices(p, seed, count)?.iter().map(to_coords).collect();
    SampleSet::new(p.side(), meta(p, seed, count), points)
}

/// Divides states by their trace; points that are not PSD after that keep
/// their raw value and are listed in `meta.non_state`.
fn normalised_set(p: &dyn Parametrisation, seed: u64, count: usize) -> Result<SampleSet> {
    let mats = sample_matrices(p, seed, count)?;
    let mut m = meta(p, seed, count);
    let mut points = Vec::with_capacity(count);
    for (k, x) in mats.iter().enumerate() {
        let t = x.trace();
        let scaled = (t > 0.0).then(|| x.scale(&(1.0 / t)));
        match scaled {
            Some(s) if min_eigenvalue(&s)? >= -PSD_TOL => points.push(to_coords(&s)),
            _ => {
                m.non_state.push(k);
                points.push(to_coords(x));
            }
        }
    }
    SampleSet::new(p.side(), m, points)
}

/// Points `(M ⊗ Id₂)(Id₂ ⊗ N)` of the three-qubit chain QCMI variety.
pub fn sample_qcmi_chain3(seed: u64, count: usize) -> Result<SampleSet> {
    normalised_set(&QcmiParam { psd: false }, seed, count)
}

/// Like [`sample_qcmi_chain3`] with PSD factors, so every point is a state.
pub fn sample_qcmi_chain3_states(seed: u64, count: usize) -> Result<SampleSet> {
    normalised_set(&QcmiParam { psd: true }, seed, count)
}

pub fn gibbs_sample_lssm(g: &Graph, shape: &SubsystemShape, seed: u64, count: usize) -> Result<SampleSet> {
    sample_family(&LssmParam::new(g, shape)?, seed, count)
}

pub fn gibbs_sample_decomposable(g: &Graph, shape: &SubsystemShape, seed: u64, count: usize) -> Result<SampleSet> {
    sample_family(&DecomposableParam::new(g, shape)?, seed, count)
}

/// Points `exp(Σ x_i H_i)` for the given Hamiltonians.
pub fn gibbs_sample_model(hamiltonians: Vec<Matrix<f64>>, seed: u64, count: usize) -> Result<SampleSet> {
    sample_family(&ModelGibbsParam::new(hamiltonians)?, seed, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::qcmi;

    #[test]
    fn reproducible_and_seed_dependent() {
        let a = sample_qcmi_chain3(11, 5).unwrap();
        let b = sample_qcmi_chain3(11, 5).unwrap();
        let c = sample_qcmi_chain3(12, 5).unwrap();
        assert_eq!(a.to_json_string(), b.to_json_string());
        assert_ne!(a.points, c.points);
        assert_eq!(a.ambient_dim, 36);
        assert!(sample_qcmi_chain3(1, 0).is_err());
    }

    #[test]
    fn qcmi_states_have_vanishing_qcmi() {
        let set = sample_qcmi_chain3_states(4, 10).unwrap();
        assert!(set.meta.non_state.is_empty());
        let shape = SubsystemShape::qubits(3);
        for rho in set.states() {
            assert!(qcmi(&rho, &shape, &[0], &[2], &[1]).unwrap().abs() < 1e-7);
        }
        // generic draws are mostly not states
        let raw = sample_qcmi_chain3(4, 40).unwrap();
        assert!(!raw.meta.non_state.is_empty());
        for rho in raw.states() {
            assert!(qcmi(&rho, &shape, &[0], &[2], &[1]).unwrap().abs() < 1e-7);
        }
    }

    #[test]
    fn gibbs_sets() {
        let g = Graph::builtin("chain3").unwrap();
        let s = gibbs_sample_lssm(&g, &SubsystemShape::qubits(3), 1, 4).unwrap();
        assert_eq!(s.meta.generator, "gibbs-lssm");
        for k in 0..s.len() {
            assert!(min_eigenvalue(&s.matrix(k)).unwrap() > 0.0);
        }
        let d = gibbs_sample_decomposable(&g, &SubsystemShape::qubits(3), 1, 4).unwrap();
        assert_eq!(d.points.len(), 4);
    }
}
