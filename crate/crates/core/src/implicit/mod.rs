//! Numerical implicitisation: polynomial relations that vanish on sampled
//! points, found as kernels of monomial Vandermonde matrices.

mod basis;
mod kernel;
mod poly;

pub use basis::MonomialBasis;
pub use kernel::{membership, polys_to_json, vandermonde_kernel, KernelOptions, KernelReport, Membership};
pub use poly::{CoefJson, Monomial, Poly, DENSE_EXP_LIMIT};
