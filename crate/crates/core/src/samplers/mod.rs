//! Parametrised samplers for QCMI, Petz and Gibbs varieties, and Jacobian-rank
//! dimension estimates.

pub mod dim;
pub mod families;
pub mod petz;
pub mod sample;
pub mod sampleset;

pub use dim::{estimate_dim, jacobian, manifold_dim, DimEstimate, DEFAULT_FD_STEP, DIM_RANK_TOL};
pub use families::{
    local_symmetric_basis, span_residual, DecomposableParam, ExpSymParam, LssmParam, ModelGibbsParam, Parametrisation,
    QcmiParam,
};
pub use petz::{
    commuting_tree_gibbs, petz_chain3, petz_join, petz_tree, sample_petz, MarginalPack, PetzOutput, PetzTreeOutput,
    PETZ_TOL,
};
pub use sample::{
    draw, gibbs_sample_decomposable, gibbs_sample_lssm, gibbs_sample_model, sample_family, sample_matrices,
    sample_qcmi_chain3, sample_qcmi_chain3_states,
};
pub use sampleset::{SampleMeta, SampleSet};
