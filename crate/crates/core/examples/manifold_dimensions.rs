// Dimensions of parametrised families from the rank of a finite-difference
// Jacobian at random parameters.

use qgm::graphs::Graph;
use qgm::matcore::SubsystemShape;
use qgm::samplers::{estimate_dim, DecomposableParam, ExpSymParam, LssmParam, Parametrisation, QcmiParam, DEFAULT_FD_STEP};

pub fn run_example() -> qgm::Result<Vec<(String, usize)>> {
    let g = Graph::builtin("chain3").expect("builtin graph");
    let shape = SubsystemShape::qubits(3);
    let families: Vec<Box<dyn Parametrisation>> = vec![
        Box::new(LssmParam::new(&g, &shape)?),
        Box::new(DecomposableParam::new(&g, &shape)?),
        Box::new(QcmiParam { psd: false }),
        Box::new(ExpSymParam { n: 2 }),
    ];
    let mut out = Vec::new();
    for p in &families {
        let est = estimate_dim(p.as_ref(), 1, 3, DEFAULT_FD_STEP)?;
        println!(
            "{:>18}: {:>2} parameters, dimension {:>2} (smallest kept singular value {:.1e})",
            p.name(),
            p.n_params(),
            est.dim,
            est.smallest_kept.iter().copied().fold(f64::INFINITY, f64::min)
        );
        out.push((p.name(), est.dim));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> qgm::Result<()> {
    run_example().map(|_| ())
}
