// Points of the three-qubit chain QCMI variety: two known linear relations, a
// quintic, vanishing conditional mutual information on the state locus, and
// the linear relations rediscovered by interpolation.

use qgm::entropy::qcmi;
use qgm::implicit::{vandermonde_kernel, KernelOptions, Monomial, Poly};
use qgm::matcore::scalar::rat_int;
use qgm::matcore::{Rat, SubsystemShape};
use qgm::samplers::{sample_qcmi_chain3, sample_qcmi_chain3_states};

const AMBIENT: usize = 36;

/// `(coefficient, 1-based variables)` for each term of the quintic.
const QUINTIC: [(i64, [usize; 5]); 15] = [
    (-1, [13, 22, 29, 31, 33]),
    (-1, [13, 22, 31, 31, 35]),
    (1, [13, 24, 29, 29, 33]),
    (1, [13, 24, 29, 31, 35]),
    (1, [22, 22, 29, 31, 33]),
    (1, [22, 22, 31, 31, 35]),
    (1, [22, 24, 25, 29, 35]),
    (-1, [22, 24, 25, 31, 33]),
    (-1, [22, 24, 29, 29, 33]),
    (-2, [22, 24, 29, 31, 35]),
    (1, [22, 24, 31, 31, 33]),
    (-1, [23, 24, 24, 29, 35]),
    (1, [23, 24, 24, 31, 33]),
    (1, [24, 24, 29, 29, 35]),
    (-1, [24, 24, 29, 31, 33]),
];

fn poly(terms: &[(i64, &[usize])]) -> Poly<Rat> {
    let mut p = Poly::zero(AMBIENT);
    for (c, vars) in terms {
        let mut m = Monomial::one();
        for v in *vars {
            m = m.mul(&Monomial::var(v - 1));
        }
        p.add_term(m, rat_int(*c));
    }
    p
}

/// The two linear relations and the quintic, in 1-based `z` coordinates.
pub fn relations() -> (Vec<Poly<Rat>>, Poly<Rat>) {
    let linear = vec![
        poly(&[(1, &[14]), (-1, &[18]), (1, &[23]), (-1, &[29])]),
        poly(&[(1, &[12]), (-1, &[16]), (-1, &[25]), (1, &[31])]),
    ];
    let quintic: Vec<(i64, &[usize])> = QUINTIC.iter().map(|(c, v)| (*c, &v[..])).collect();
    (linear, poly(&quintic))
}

pub struct Residuals {
    /// Largest `|ℓ(z)| / max|z|` over points and both linear forms.
    pub linear: f64,
    /// Largest `|q(z)| / max|z|⁵`.
    pub quintic: f64,
}

pub fn residuals(points: &[Vec<f64>]) -> qgm::Result<Residuals> {
    let (linear, quintic) = relations();
    let linear: Vec<Poly<f64>> = linear.iter().map(Poly::to_f64).collect();
    let quintic = quintic.to_f64();
    let mut out = Residuals {
        linear: 0.0,
        quintic: 0.0,
    };
    for z in points {
        let scale = z.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        for l in &linear {
            out.linear = out.linear.max(l.eval(z)?.abs() / scale);
        }
        out.quintic = out.quintic.max(quintic.eval(z)?.abs() / scale.powi(5));
    }
    Ok(out)
}

pub struct Summary {
    pub residuals: Residuals,
    pub max_state_qcmi: f64,
    pub linear_found: usize,
}

pub fn run_example() -> qgm::Result<Summary> {
    let set = sample_qcmi_chain3(2026, 200)?;
    let residuals = residuals(&set.points)?;
    println!(
        "200 points: linear residual {:.2e}, quintic residual {:.2e}",
        residuals.linear, residuals.quintic
    );

    let shape = SubsystemShape::qubits(3);
    let mut max_state_qcmi = 0.0f64;
    for rho in sample_qcmi_chain3_states(2026, 50)?.states() {
        max_state_qcmi = max_state_qcmi.max(qcmi(&rho, &shape, &[0], &[2], &[1])?);
    }
    println!("largest I(A:C|B) over 50 states on the variety: {max_state_qcmi:.2e} bits");

    let kernel = vandermonde_kernel(&set.points, 1, &KernelOptions::default())?;
    println!("interpolation finds {} linear relations:", kernel.linear.len());
    for l in &kernel.linear {
        println!("  {}", l.display_with("z"));
    }
    Ok(Summary {
        residuals,
        max_state_qcmi,
        linear_found: kernel.linear.len(),
    })
}

#[allow(dead_code)]
fn main() -> qgm::Result<()> {
    run_example().map(|_| ())
}
