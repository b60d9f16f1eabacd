use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::matcore::json::float_matrix_json;
use crate::matcore::symmat::to_coords;
use crate::matcore::{
    embed, kron, kron_all, mat_exp, mat_inv_sqrt, mat_sqrt, min_eigenvalue, partial_trace, permute_factors,
    DynMatrix, Matrix, SubsystemShape,
};
use crate::rng::{rng_for, uniform_symmetric};

use super::sampleset::{SampleMeta, SampleSet};

/// Default tolerance for marginal compatibility and invertibility.
pub const PETZ_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct PetzOutput {
    /// `R(ρ_AB, ρ_BC)`, conjugating `ρ_BC` by `ρ_AB^{1/2} ρ_B^{-1/2}`.
    pub sigma: Matrix<f64>,
    /// The primed form, conjugating `ρ_AB` by `ρ_BC^{1/2} ρ_B^{-1/2}`.
    pub sigma_primed: Matrix<f64>,
    /// `‖σ − σ′‖_F`.
    pub discrepancy: f64,
}

fn check_invertible(m: &Matrix<f64>, what: &str, tol: f64) -> Result<()> {
    let e = min_eigenvalue(m)?;
    if e <= tol {
        return Err(Error::SingularMarginal(format!("{what}: minimum eigenvalue {e:e}")));
    }
    Ok(())
}

/// Joins `ρ_AB` and `ρ_BC` through their common `B`, with `A` and `C` of
/// dimensions `da` and `dc`. Output factors are ordered `A, B, C`.
pub fn petz_join(rho_ab: &Matrix<f64>, rho_bc: &Matrix<f64>, da: usize, dc: usize, tol: f64) -> Result<PetzOutput> {
    let nab = rho_ab.rows();
    if !rho_ab.is_square() || !rho_bc.is_square() || nab % da != 0 {
        return Err(Error::DimensionMismatch(format!("ρ_AB is {nab}x{}", rho_ab.cols())));
    }
    let db = nab / da;
    if rho_bc.rows() != db * dc {
        return Err(Error::DimensionMismatch(format!(
            "ρ_BC is {}x{} but B has dimension {db}",
            rho_bc.rows(),
            rho_bc.rows()
        )));
    }
    let sab = SubsystemShape::new(vec![da, db])?;
    let sbc = SubsystemShape::new(vec![db, dc])?;
    let rb = partial_trace(rho_ab, &sab, &[1])?;
    let rb2 = partial_trace(rho_bc, &sbc, &[0])?;
    let gap = rb.distance(&rb2);
    if gap >= tol {
        return Err(Error::IncompatibleMarginals(format!("‖tr_A ρ_AB − tr_C ρ_BC‖_F = {gap:e}")));
    }
    check_invertible(rho_ab, "ρ_AB", tol)?;
    check_invertible(rho_bc, "ρ_BC", tol)?;
    check_invertible(&rb, "ρ_B", tol)?;

    let (ia, ic) = (Matrix::identity(da), Matrix::identity(dc));
    let y = kron_all(&[ia.clone(), mat_inv_sqrt(&rb, 0.0)?, ic.clone()]);
    let x = kron(&mat_sqrt(rho_ab, 0.0)?, &ic);
    let z = kron(&ia, rho_bc);
    let sigma = x.dot(&y).dot(&z).dot(&y).dot(&x).symmetrized();

    let x2 = kron(&ia, &mat_sqrt(rho_bc, 0.0)?);
    let z2 = kron(rho_ab, &ic);
    let sigma_primed = x2.dot(&y).dot(&z2).dot(&y).dot(&x2).symmetrized();
    let discrepancy = sigma.distance(&sigma_primed);
    Ok(PetzOutput {
        sigma,
        sigma_primed,
        discrepancy,
    })
}

/// Three-qubit recovery from the two-qubit marginals `ρ_AB`, `ρ_BC`.
pub fn petz_chain3(rho_ab: &Matrix<f64>, rho_bc: &Matrix<f64>, tol: f64) -> Result<PetzOutput> {
    if rho_ab.rows() != 4 || rho_bc.rows() != 4 {
        return Err(Error::DimensionMismatch("petz_chain3 takes 4x4 marginals".into()));
    }
    petz_join(rho_ab, rho_bc, 2, 2, tol)
}

/// One- and two-body marginals of a state on a graph; edges as `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalPack {
    pub shape: SubsystemShape,
    pub two_body: BTreeMap<(usize, usize), Matrix<f64>>,
    pub one_body: BTreeMap<usize, Matrix<f64>>,
}

impl MarginalPack {
    pub fn from_state(rho: &Matrix<f64>, shape: &SubsystemShape, g: &Graph) -> Result<Self> {
        shape.check_dim(rho.rows())?;
        if shape.len() != g.n() {
            return Err(Error::InvalidShape("shape and graph sizes differ".into()));
        }
        let two_body = g
            .edges()
            .map(|(u, v)| Ok(((u, v), partial_trace(rho, shape, &[u, v])?)))
            .collect::<Result<_>>()?;
        let one_body = (0..g.n())
            .map(|v| Ok((v, partial_trace(rho, shape, &[v])?)))
            .collect::<Result<_>>()?;
        Ok(MarginalPack {
            shape: shape.clone(),
            two_body,
            one_body,
        })
    }

    /// Every edge of `g` carries a marginal, and marginals sharing a vertex
    /// agree on it (and with `one_body`, where given) within `tol`.
    pub fn check(&self, g: &Graph, tol: f64) -> Result<()> {
        if self.shape.len() != g.n() {
            return Err(Error::InvalidShape("shape and graph sizes differ".into()));
        }
        let mut seen: BTreeMap<usize, Matrix<f64>> = self.one_body.clone();
        for (u, v) in g.edges() {
            let m = self
                .two_body
                .get(&(u, v))
                .ok_or_else(|| Error::IncompatibleMarginals(format!("no marginal on edge {}-{}", u + 1, v + 1)))?;
            let sub = self.shape.select(&[u, v])?;
            sub.check_dim(m.rows())?;
            for (pos, w) in [(0, u), (1, v)] {
                let r = partial_trace(m, &sub, &[pos])?;
                match seen.get(&w) {
                    Some(prev) if prev.distance(&r) >= tol => {
                        return Err(Error::IncompatibleMarginals(format!(
                            "vertex {} marginals differ by {:e}",
                            w + 1,
                            prev.distance(&r)
                        )))
                    }
                    Some(_) => {}
                    None => {
                        seen.insert(w, r);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "shape": self.shape.dims(),
            "two_body": self.two_body.iter().map(|(&(u, v), m)| json!({
                "edge": [u + 1, v + 1],
                "matrix": float_matrix_json(m),
            })).collect::<Vec<_>>(),
            "one_body": self.one_body.iter().map(|(&v, m)| json!({
                "vertex": v + 1,
                "matrix": float_matrix_json(m),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let dims: Vec<usize> = serde_json::from_value(v["shape"].clone())?;
        let shape = SubsystemShape::new(dims)?;
        let matrix = |m: &Value| -> Result<Matrix<f64>> { Ok(DynMatrix::from_json(m)?.to_f64()) };
        let mut two_body = BTreeMap::new();
        for e in v["two_body"].as_array().into_iter().flatten() {
            let [a, b]: [usize; 2] = serde_json::from_value(e["edge"].clone())?;
            if a == 0 || b == 0 || a == b {
                return Err(Error::Parse(format!("bad edge {a}-{b}")));
            }
            two_body.insert((a.min(b) - 1, a.max(b) - 1), matrix(&e["matrix"])?);
        }
        let mut one_body = BTreeMap::new();
        for e in v["one_body"].as_array().into_iter().flatten() {
            let w: usize = serde_json::from_value(e["vertex"].clone())?;
            if w == 0 {
                return Err(Error::Parse("vertices are 1-based".into()));
            }
            one_body.insert(w - 1, matrix(&e["matrix"])?);
        }
        Ok(MarginalPack {
            shape,
            two_body,
            one_body,
        })
    }
}

#[derive(Debug, Clone)]
pub struct PetzTreeOutput {
    pub sigma: Matrix<f64>,
    /// Largest `‖σ − σ′‖_F` over all recursion steps.
    pub discrepancy: f64,
}

/// Global state of a tree from its edge marginals, recovering two leaves at a
/// time in [`Graph::petz_order`] order.
pub fn petz_tree(g: &Graph, pack: &MarginalPack, tol: f64) -> Result<PetzTreeOutput> {
    if !g.is_tree() {
        return Err(Error::NotATree);
    }
    if g.n() < 2 {
        return Err(Error::InvalidGraph("need at least two vertices".into()));
    }
    pack.check(g, tol)?;
    let mut memo = HashMap::new();
    let mut worst = 0.0f64;
    let full = (1u32 << g.n()) - 1;
    let sigma = recover(g, pack, full, tol, &mut memo, &mut worst)?;
    Ok(PetzTreeOutput {
        sigma,
        discrepancy: worst,
    })
}

fn members(mask: u32) -> Vec<usize> {
    (0..32).filter(|&v| mask & (1 << v) != 0).collect()
}

fn position(list: &[usize], v: usize) -> usize {
    list.iter().position(|&x| x == v).expect("member")
}

fn recover(
    g: &Graph,
    pack: &MarginalPack,
    mask: u32,
    tol: f64,
    memo: &mut HashMap<u32, Matrix<f64>>,
    worst: &mut f64,
) -> Result<Matrix<f64>> {
    if let Some(m) = memo.get(&mask) {
        return Ok(m.clone());
    }
    let vs = members(mask);
    if vs.len() == 2 {
        return pack
            .two_body
            .get(&(vs[0], vs[1]))
            .cloned()
            .ok_or_else(|| Error::IncompatibleMarginals(format!("no marginal on {}-{}", vs[0] + 1, vs[1] + 1)));
    }
    let leaves = g.leaves_within(&vs);
    let (v1, v2) = (leaves[0], leaves[1]);
    let b: Vec<usize> = vs.iter().copied().filter(|&v| v != v1 && v != v2).collect();
    let ab_vs: Vec<usize> = vs.iter().copied().filter(|&v| v != v2).collect();
    let bc_vs: Vec<usize> = vs.iter().copied().filter(|&v| v != v1).collect();
    let rho_ab = recover(g, pack, mask & !(1 << v2), tol, memo, worst)?;
    let rho_bc = recover(g, pack, mask & !(1 << v1), tol, memo, worst)?;

    // bring A to the front of ρ_AB and C to the back of ρ_BC
    let perm_ab: Vec<usize> = std::iter::once(v1).chain(b.iter().copied()).map(|v| position(&ab_vs, v)).collect();
    let perm_bc: Vec<usize> = b.iter().copied().chain(std::iter::once(v2)).map(|v| position(&bc_vs, v)).collect();
    let rho_ab = permute_factors(&rho_ab, &pack.shape.select(&ab_vs)?, &perm_ab)?;
    let rho_bc = permute_factors(&rho_bc, &pack.shape.select(&bc_vs)?, &perm_bc)?;
    let dims = pack.shape.dims();
    let out = petz_join(&rho_ab, &rho_bc, dims[v1], dims[v2], tol)?;
    *worst = worst.max(out.discrepancy);

    let order: Vec<usize> = std::iter::once(v1).chain(b).chain(std::iter::once(v2)).collect();
    let back: Vec<usize> = vs.iter().map(|&v| position(&order, v)).collect();
    let sigma = permute_factors(&out.sigma, &pack.shape.select(&order)?, &back)?;
    memo.insert(mask, sigma.clone());
    Ok(sigma)
}

fn rotated_projectors(rng: &mut impl Rng) -> [Matrix<f64>; 2] {
    let t: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let (s, c) = t.sin_cos();
    let p0 = Matrix::from_rows(vec![vec![c * c, c * s], vec![c * s, s * s]]).expect("2x2");
    let p1 = Matrix::from_rows(vec![vec![s * s, -c * s], vec![-c * s, c * c]]).expect("2x2");
    [p0, p1]
}

/// Random qubit state `exp(H)/tr` on a tree whose edge terms commute, so the
/// state is Markov along every path. Internal vertices get a random rotated
/// projector pair `P_0, P_1`; an edge between internal vertices carries
/// `Σ c_ab P_a ⊗ P_b` and an edge to a leaf `Σ_a P_a ⊗ S_a` with random `S_a`.
pub fn commuting_tree_gibbs(g: &Graph, rng: &mut impl Rng) -> Result<Matrix<f64>> {
    if !g.is_tree() {
        return Err(Error::NotATree);
    }
    let shape = SubsystemShape::qubits(g.n());
    let internal: Vec<bool> = (0..g.n()).map(|v| g.degree(v) >= 2).collect();
    let projectors: Vec<Option<[Matrix<f64>; 2]>> = internal
        .iter()
        .map(|&i| i.then(|| rotated_projectors(rng)))
        .collect();
    let d = shape.total_dim();
    let mut h = Matrix::zeros(d, d);
    for (u, v) in g.edges() {
        let term = match (&projectors[u], &projectors[v]) {
            (Some(pu), Some(pv)) => {
                let mut t = Matrix::zeros(4, 4);
                for a in &pu[..] {
                    for b in &pv[..] {
                        let c: f64 = rng.gen_range(-1.0..=1.0);
                        t = t.try_add(&kron(a, b).scale(&c))?;
                    }
                }
                t
            }
            (Some(pu), None) => {
                let mut t = Matrix::zeros(4, 4);
                for a in &pu[..] {
                    t = t.try_add(&kron(a, &uniform_symmetric(rng, 2)))?;
                }
                t
            }
            (None, Some(pv)) => {
                let mut t = Matrix::zeros(4, 4);
                for b in &pv[..] {
                    t = t.try_add(&kron(&uniform_symmetric(rng, 2), b))?;
                }
                t
            }
            (None, None) => uniform_symmetric(rng, 4),
        };
        h = h.try_add(&embed(&term, &shape, &[u, v])?)?;
    }
    let e = mat_exp(&h)?;
    let t = e.trace();
    Ok(e.scale(&(1.0 / t)))
}

/// Petz-recovered states from the edge marginals of random full-rank states.
pub fn sample_petz(g: &Graph, seed: u64, count: usize) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let shape = SubsystemShape::qubits(g.n());
    if shape.total_dim() > 16 {
        return Err(Error::InvalidShape("at most 4 qubits".into()));
    }
    use rayon::prelude::*;
    let points = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let rho = crate::rng::random_state(&mut rng_for(seed, i), shape.total_dim());
            let pack = MarginalPack::from_state(&rho, &shape, g)?;
            Ok(to_coords(&petz_tree(g, &pack, PETZ_TOL)?.sigma))
        })
        .collect::<Result<Vec<_>>>()?;
    let meta = SampleMeta {
        generator: "petz".into(),
        seed,
        count,
        params: json!({"graph": g.to_edge_list(), "marginals_of": "random_state"}),
        non_state: Vec::new(),
    };
    SampleSet::new(shape.total_dim(), meta, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::qcmi;
    use crate::rng::random_state;

    fn marginals3(rho: &Matrix<f64>) -> (Matrix<f64>, Matrix<f64>) {
        let s = SubsystemShape::qubits(3);
        (partial_trace(rho, &s, &[0, 1]).unwrap(), partial_trace(rho, &s, &[1, 2]).unwrap())
    }

    #[test]
    fn product_marginals_give_product() {
        let mut rng = rng_for(1, 0);
        let (a, b, c) = (random_state(&mut rng, 2), random_state(&mut rng, 2), random_state(&mut rng, 2));
        let out = petz_chain3(&kron(&a, &b), &kron(&b, &c), PETZ_TOL).unwrap();
        assert!(out.sigma.distance(&kron_all(&[a, b, c])) < 1e-12);
        assert!(out.discrepancy < 1e-12);
    }

    #[test]
    fn markov_states_are_recovered() {
        let g = Graph::builtin("chain3").unwrap();
        for i in 0..10 {
            let rho = commuting_tree_gibbs(&g, &mut rng_for(2, i)).unwrap();
            let s = SubsystemShape::qubits(3);
            assert!(qcmi(&rho, &s, &[0], &[2], &[1]).unwrap().abs() < 1e-9);
            let (ab, bc) = marginals3(&rho);
            let out = petz_chain3(&ab, &bc, PETZ_TOL).unwrap();
            assert!(out.sigma.distance(&rho) < 1e-10);
            assert!(out.discrepancy < 1e-10);
        }
    }

    #[test]
    fn generic_states_are_not() {
        let rho = random_state(&mut rng_for(3, 0), 8);
        let (ab, bc) = marginals3(&rho);
        let out = petz_chain3(&ab, &bc, PETZ_TOL).unwrap();
        assert!(out.sigma.distance(&rho) > 1e-3);
        // only the AB marginal is reproduced off the Markov locus, and the two forms disagree
        let (ab2, bc2) = marginals3(&out.sigma);
        assert!(ab2.distance(&ab) < 1e-12);
        assert!(bc2.distance(&bc) > 1e-4);
        assert!(out.discrepancy > 1e-4);
    }

    #[test]
    fn recovered_markov_states_are_fixed_points() {
        let g = Graph::builtin("chain3").unwrap();
        let rho = commuting_tree_gibbs(&g, &mut rng_for(3, 1)).unwrap();
        let (ab, bc) = marginals3(&rho);
        let once = petz_chain3(&ab, &bc, PETZ_TOL).unwrap().sigma;
        let (ab2, bc2) = marginals3(&once);
        let twice = petz_chain3(&ab2, &bc2, PETZ_TOL).unwrap().sigma;
        assert!(twice.distance(&once) < 1e-9);
    }

    #[test]
    fn rejects_bad_marginals() {
        let mut rng = rng_for(4, 0);
        let ab = random_state(&mut rng, 4);
        let bc = random_state(&mut rng, 4);
        assert!(matches!(petz_chain3(&ab, &bc, PETZ_TOL), Err(Error::IncompatibleMarginals(_))));
        let pure = Matrix::diag(&[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(petz_chain3(&pure, &pure, PETZ_TOL), Err(Error::SingularMarginal(_))));
    }

    #[test]
    fn trees_are_recovered() {
        for name in ["chain3", "chain4", "claw"] {
            let g = Graph::builtin(name).unwrap();
            let shape = SubsystemShape::qubits(g.n());
            for i in 0..3 {
                let rho = commuting_tree_gibbs(&g, &mut rng_for(5, i)).unwrap();
                let pack = MarginalPack::from_state(&rho, &shape, &g).unwrap();
                let out = petz_tree(&g, &pack, PETZ_TOL).unwrap();
                assert!(out.sigma.distance(&rho) < 1e-8, "{name}: {}", out.sigma.distance(&rho));
                assert!(out.discrepancy < 1e-8);
            }
        }
    }

    #[test]
    fn pack_json_roundtrip() {
        let g = Graph::builtin("chain3").unwrap();
        let rho = random_state(&mut rng_for(6, 0), 8);
        let pack = MarginalPack::from_state(&rho, &SubsystemShape::qubits(3), &g).unwrap();
        let back = MarginalPack::from_json(&pack.to_json()).unwrap();
        assert_eq!(back.two_body.len(), 2);
        assert!(back.two_body[&(0, 1)].distance(&pack.two_body[&(0, 1)]) < 1e-15);
        let out = sample_petz(&g, 1, 3).unwrap();
        assert_eq!(out.ambient_dim, 36);
    }
}
