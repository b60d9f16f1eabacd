// Graph-state stabilisers: commuting Pauli Hamiltonians, stabilised subspace
// dimensions and the integer eigenbasis that diagonalises them together.

use qgm::graphs::Graph;
use qgm::pauli::{gf2_rank, graph_hamiltonians, simultaneous_diag, StabilizerGroup};

pub struct Summary {
    pub words: Vec<String>,
    /// `stab_dimension` after keeping the first `m` generators, `m = 1..=n`.
    pub dimensions: Vec<usize>,
    pub sign_basis: bool,
}

pub fn run_example() -> qgm::Result<Summary> {
    let g = Graph::builtin("fig1").expect("builtin graph");
    let hs = graph_hamiltonians(&g);
    let words: Vec<String> = hs.iter().map(|w| w.to_string()).collect();
    println!("Hamiltonians of fig1: {}", words.join(", "));
    for (i, p) in hs.iter().enumerate() {
        for q in &hs[i + 1..] {
            assert!(p.commutes(q)?);
        }
    }
    println!("pairwise commuting, GF(2) rank {}", gf2_rank(&hs));

    let mut dimensions = Vec::new();
    for m in 1..=hs.len() {
        let group = StabilizerGroup::new(g.n(), hs[..m].to_vec())?;
        dimensions.push(group.stab_dimension()?);
    }
    println!("stabilised dimensions with 1..4 generators: {dimensions:?}");

    let model = simultaneous_diag(&hs)?;
    println!("eigenbasis has +-1 entries: {}", model.is_sign_basis());
    println!("sign matrix A:");
    for row in &model.a {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>2}")).collect();
        println!("  {}", cells.join(" "));
    }
    Ok(Summary {
        words,
        dimensions,
        sign_basis: model.is_sign_basis(),
    })
}

#[allow(dead_code)]
fn main() -> qgm::Result<()> {
    run_example().map(|_| ())
}
