//! Dense exact/float matrix algebra on tensor-product spaces.

pub mod eig;
pub mod exact;
pub mod funcs;
pub mod json;
pub mod matrix;
pub mod scalar;
pub mod shape;
pub mod symmat;

pub use eig::{eig_sym, EigDecomp};
pub use funcs::{is_psd, mat_exp, mat_inv_sqrt, mat_log, mat_sqrt, min_eigenvalue, PSD_TOL};
pub use json::DynMatrix;
pub use matrix::{embed, kron, kron_all, partial_trace, permute_factors, Matrix};
pub use scalar::{Rat, Scalar, ScalarKind};
pub use shape::SubsystemShape;
pub use symmat::{hs_inner, SymMat};
