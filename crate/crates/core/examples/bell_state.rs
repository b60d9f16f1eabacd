// Exact partial traces and entropies of a Bell pair.

use qgm::entropy::{von_neumann, EntropyOptions};
use qgm::matcore::scalar::rat;
use qgm::matcore::{mat_sqrt, partial_trace, Matrix, Rat, Scalar, SubsystemShape};

pub fn bell() -> Matrix<Rat> {
    let mut m = Matrix::zeros(4, 4);
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        m.set(i, j, rat(1, 2));
    }
    m
}

pub struct Summary {
    pub marginal: Matrix<Rat>,
    pub joint_entropy: f64,
    pub marginal_entropy: f64,
    /// `‖√ρ − ρ‖_F`; a pure state is its own square root.
    pub sqrt_gap: f64,
}

pub fn run_example() -> qgm::Result<Summary> {
    let rho = bell();
    let shape = SubsystemShape::qubits(2);
    let marginal = partial_trace(&rho, &shape, &[0])?;
    let rows: Vec<Vec<String>> = marginal.to_rows().iter().map(|r| r.iter().map(|v| v.to_text()).collect()).collect();
    println!("tr_B of the Bell state: {rows:?}");

    let rho_f = rho.map(Scalar::to_f64);
    let opts = EntropyOptions::default();
    let joint_entropy = von_neumann(&rho_f, opts)?.value;
    let marginal_entropy = von_neumann(&marginal.map(Scalar::to_f64), opts)?.value;
    println!("S(AB) = {joint_entropy:.3e} bits, S(A) = {marginal_entropy} bits");

    let sqrt_gap = mat_sqrt(&rho_f, 1e-9)?.distance(&rho_f);
    println!("|sqrt(rho) - rho| = {sqrt_gap:.1e}");
    Ok(Summary {
        marginal,
        joint_entropy,
        marginal_entropy,
        sqrt_gap,
    })
}

#[allow(dead_code)]
fn main() -> qgm::Result<()> {
    run_example().map(|_| ())
}
