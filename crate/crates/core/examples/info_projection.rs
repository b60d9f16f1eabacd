// Information projection of an 8x8 integer matrix onto the Gibbs manifold of
// the three-qubit chain graph state model, with optimality certificates.

use qgm::graphs::Graph;
use qgm::matcore::Matrix;
use qgm::pauli::{graph_hamiltonians, simultaneous_diag};
use qgm::project::{certify_projection, info_project, CertificateReport, ProjectOptions, ProjectionResult};

pub const RHO: [[i64; 8]; 8] = [
    [84, -22, 11, -51, -15, -8, -26, 4],
    [-22, 51, -5, -7, 23, -13, 17, 40],
    [11, -5, 51, 25, -16, -3, 9, 28],
    [-51, -7, 25, 70, -19, 17, 18, -26],
    [-15, 23, -16, -19, 92, 32, 23, 24],
    [-8, -13, -3, 17, 32, 62, 2, -36],
    [-26, 17, 9, 18, 23, 2, 94, 10],
    [4, 40, 28, -26, 24, -36, 10, 109],
];

/// Reference projection with eight distinct entries up to sign.
pub fn reference() -> Matrix<f64> {
    let [a, b, c, d, e, f, g, h] = [20.5417, 12.5, 20.5, 12.4746, 5.5, 3.34685, 5.48884, 3.34006];
    Matrix::from_rows(vec![
        vec![a, -b, -c, -d, -e, f, -g, -h],
        vec![-b, a, d, c, f, -e, h, g],
        vec![-c, d, a, b, g, -h, e, f],
        vec![-d, c, b, a, h, -g, f, e],
        vec![-e, f, g, h, a, -b, c, d],
        vec![f, -e, -h, -g, -b, a, -d, -c],
        vec![-g, h, e, f, c, -d, a, b],
        vec![-h, g, f, e, d, -c, b, a],
    ])
    .expect("square")
}

pub fn rho() -> Matrix<f64> {
    Matrix::from_fn(8, 8, |i, j| RHO[i][j] as f64)
}

pub fn max_entry_gap(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
    a.data().iter().zip(b.data()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub struct Outcome {
    pub result: ProjectionResult,
    pub certificates: CertificateReport,
    /// Largest entrywise gap to [`reference`].
    pub gap: f64,
    /// The same gap after projecting `2ρ` instead.
    pub gap_doubled: f64,
}

pub fn run_example() -> qgm::Result<Outcome> {
    let g = Graph::builtin("chain3").expect("builtin graph");
    let model = simultaneous_diag(&graph_hamiltonians(&g))?;
    let rho = rho();
    let result = info_project(&rho, &model, ProjectOptions::default())?;
    println!("dual coefficients {:?}", result.dual);
    println!("moments b = {:?}, residual {:.2e}", result.b, result.residual);
    println!("rho* diagonal {:.5}, D(rho||rho*) = {:.4} bits", result.rho_star.get(0, 0), result.rel_entropy);

    let certificates = certify_projection(&rho, &result, &model, 32, 7)?;
    println!(
        "certificates: entropy margin {:.2e}, minimality margin {:.2e}, restart spread {:.2e}",
        certificates.entropy_margin, certificates.minimality_margin, certificates.restart_spread
    );

    let gap = max_entry_gap(&result.rho_star, &reference());
    let doubled = info_project(&rho.scale(&2.0), &model, ProjectOptions::default())?;
    let gap_doubled = max_entry_gap(&doubled.rho_star, &reference());
    println!("largest gap to the reference matrix: {gap:.3e} (for 2*rho: {gap_doubled:.3e})");

    Ok(Outcome {
        result,
        certificates,
        gap,
        gap_doubled,
    })
}

#[allow(dead_code)]
fn main() -> qgm::Result<()> {
    run_example().map(|_| ())
}
