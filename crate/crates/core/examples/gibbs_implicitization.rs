// Linear and quadratic relations on two Gibbs families of the three-qubit chain.
//
// The decomposable family `exp(K⊗L⊗Id + Id⊗M⊗N)` satisfies 9 linear forms and
// 66 further quadrics; the clique-local family `exp(L_G)` satisfies none.

use qgm::graphs::Graph;
use qgm::implicit::{vandermonde_kernel, KernelOptions};
use qgm::matcore::SubsystemShape;
use qgm::samplers::{gibbs_sample_decomposable, gibbs_sample_lssm};

pub struct Counts {
    pub decomposable: (usize, usize),
    pub lssm: (usize, usize),
}

pub fn run_example() -> qgm::Result<Counts> {
    let g = Graph::builtin("chain3").expect("built in");
    let shape = SubsystemShape::qubits(3);
    let opts = KernelOptions::default();

    let dec = gibbs_sample_decomposable(&g, &shape, 2024, 750)?;
    let d1 = vandermonde_kernel(&dec.points, 1, &opts)?;
    let d2 = vandermonde_kernel(&dec.points, 2, &opts)?;
    println!(
        "decomposable: {} linear forms, {} quadrics on the {}-dimensional span (gap {:.1e})",
        d1.kernel_dim,
        d2.kernel_dim,
        d2.affine_rank,
        d2.gap_ratio.unwrap_or(f64::INFINITY)
    );
    for p in d1.linear.iter().take(3) {
        println!("  {p}");
    }

    let lssm = gibbs_sample_lssm(&g, &shape, 2024, 1100)?;
    let l1 = vandermonde_kernel(&lssm.points, 1, &opts)?;
    let l2 = vandermonde_kernel(&lssm.points, 2, &opts)?;
    println!(
        "clique-local: {} linear forms, {} quadrics (smallest kept singular value {:.1e})",
        l1.kernel_dim, l2.kernel_dim, l2.smallest_kept
    );
    Ok(Counts {
        decomposable: (d1.kernel_dim, d2.kernel_dim),
        lssm: (l1.kernel_dim, l2.kernel_dim),
    })
}

#[allow(dead_code)]
fn main() -> qgm::Result<()> {
    run_example().map(|_| ())
}
