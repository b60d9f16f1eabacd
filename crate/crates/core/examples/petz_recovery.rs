// Rebuilding Markov states on trees from their two-body marginals.

use qgm::entropy::qcmi;
use qgm::graphs::Graph;
use qgm::matcore::{partial_trace, SubsystemShape};
use qgm::rng::rng_for;
use qgm::samplers::{commuting_tree_gibbs, petz_chain3, petz_tree, MarginalPack, PETZ_TOL};

pub struct Recovery {
    pub graph: &'static str,
    /// Largest `‖σ − ρ‖_F` over the sampled states.
    pub max_error: f64,
    /// Largest `‖R − R′‖_F` over all recursion steps.
    pub max_discrepancy: f64,
}

pub fn recover(name: &'static str, seed: u64, count: usize) -> qgm::Result<Recovery> {
    let g = Graph::builtin(name).expect("builtin graph");
    let shape = SubsystemShape::qubits(g.n());
    let mut out = Recovery {
        graph: name,
        max_error: 0.0,
        max_discrepancy: 0.0,
    };
    for i in 0..count as u64 {
        let rho = commuting_tree_gibbs(&g, &mut rng_for(seed, i))?;
        let pack = MarginalPack::from_state(&rho, &shape, &g)?;
        let rec = petz_tree(&g, &pack, PETZ_TOL)?;
        out.max_error = out.max_error.max(rec.sigma.distance(&rho));
        out.max_discrepancy = out.max_discrepancy.max(rec.discrepancy);
    }
    Ok(out)
}

pub fn run_example() -> qgm::Result<Vec<Recovery>> {
    let mut all = Vec::new();
    for name in ["chain3", "chain4", "claw"] {
        let r = recover(name, 99, 25)?;
        println!(
            "{:>6}: 25 states, max error {:.2e}, max |R - R'| {:.2e}",
            r.graph, r.max_error, r.max_discrepancy
        );
        all.push(r);
    }

    // off the Markov locus the two recovery maps part ways
    let shape = SubsystemShape::qubits(3);
    let rho = qgm::rng::random_state(&mut rng_for(3, 0), 8);
    let out = petz_chain3(
        &partial_trace(&rho, &shape, &[0, 1])?,
        &partial_trace(&rho, &shape, &[1, 2])?,
        PETZ_TOL,
    )?;
    println!(
        "generic state: I(A:C|B) = {:.3e} bits, |R - R'| = {:.2e}, recovered I(A:C|B) = {:.3e}",
        qcmi(&rho, &shape, &[0], &[2], &[1])?,
        out.discrepancy,
        qcmi(&out.sigma, &shape, &[0], &[2], &[1])?
    );
    Ok(all)
}

#[allow(dead_code)]
fn main() -> qgm::Result<()> {
    run_example().map(|_| ())
}
