use std::collections::HashSet;

use nalgebra::{DMatrix, SVD};

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::matcore::symmat::{ambient_dim, from_coords};
use crate::matcore::{embed, kron, kron_all, mat_exp, Matrix, SubsystemShape};

/// A smooth map from parameter vectors to symmetric matrices.
pub trait Parametrisation: Sync {
    fn name(&self) -> String;

    fn n_params(&self) -> usize;

    /// Side length of the produced matrices.
    fn side(&self) -> usize;

    fn eval(&self, params: &[f64]) -> Result<Matrix<f64>>;
}

fn check_len(p: &impl Parametrisation, params: &[f64]) -> Result<()> {
    if params.len() != p.n_params() {
        return Err(Error::ArityMismatch {
            expected: p.n_params(),
            got: params.len(),
        });
    }
    Ok(())
}

/// Basis of `𝕊^d`: the identity, `E_ii − E_dd` for `i < d`, then `E_ij + E_ji`.
pub fn local_symmetric_basis(d: usize) -> Vec<Matrix<f64>> {
    let mut out = vec![Matrix::identity(d)];
    for i in 0..d - 1 {
        let mut m = Matrix::zeros(d, d);
        m.set(i, i, 1.0);
        m.set(d - 1, d - 1, -1.0);
        out.push(m);
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut m = Matrix::zeros(d, d);
            m.set(i, j, 1.0);
            m.set(j, i, 1.0);
            out.push(m);
        }
    }
    out
}

/// Orthonormal basis of `𝕊^d` under the trace inner product.
fn orthonormal_symmetric_basis(d: usize) -> Vec<Matrix<f64>> {
    let mut out = Vec::new();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in i..d {
            let mut m = Matrix::zeros(d, d);
            if i == j {
                m.set(i, i, 1.0);
            } else {
                m.set(i, j, r);
                m.set(j, i, r);
            }
            out.push(m);
        }
    }
    out
}

fn check_graph_shape(g: &Graph, shape: &SubsystemShape) -> Result<()> {
    if shape.len() != g.n() {
        return Err(Error::InvalidShape(format!(
            "graph has {} vertices but the shape has {} factors",
            g.n(),
            shape.len()
        )));
    }
    if shape.total_dim() > 16 {
        return Err(Error::InvalidShape(format!(
            "total dimension {} exceeds 16",
            shape.total_dim()
        )));
    }
    Ok(())
}

fn linear_combination(basis: &[Matrix<f64>], coeffs: &[f64]) -> Matrix<f64> {
    let n = basis[0].rows();
    let mut h = Matrix::zeros(n, n);
    for (b, &c) in basis.iter().zip(coeffs) {
        for (x, y) in h.data_mut().iter_mut().zip(b.data()) {
            *x += c * y;
        }
    }
    h
}

/// `θ ↦ exp(Σ θ_k B_k)` over the clique-local basis of `L_G`.
#[derive(Debug, Clone)]
pub struct LssmParam {
    shape: SubsystemShape,
    labels: Vec<Vec<usize>>,
    basis: Vec<Matrix<f64>>,
}

impl LssmParam {
    pub fn new(g: &Graph, shape: &SubsystemShape) -> Result<Self> {
        check_graph_shape(g, shape)?;
        let locals: Vec<Vec<Matrix<f64>>> = shape.dims().iter().map(|&d| local_symmetric_basis(d)).collect();
        let mut seen = HashSet::new();
        let mut labels = Vec::new();
        for clique in g.cliques() {
            let mut label = vec![0usize; g.n()];
            push_labels(&clique, 0, &locals, &mut label, &mut seen, &mut labels);
        }
        let basis = labels
            .iter()
            .map(|label| {
                let factors: Vec<Matrix<f64>> = label.iter().enumerate().map(|(v, &k)| locals[v][k].clone()).collect();
                kron_all(&factors)
            })
            .collect();
        Ok(LssmParam {
            shape: shape.clone(),
            labels,
            basis,
        })
    }

    pub fn basis(&self) -> &[Matrix<f64>] {
        &self.basis
    }

    /// Local basis index per vertex, `0` meaning the identity.
    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    /// Relative distance of `log(point)` from the span of the basis.
    pub fn family_residual(&self, point: &Matrix<f64>) -> Result<f64> {
        let log = crate::matcore::mat_log(point, 0.0)?;
        span_residual(&self.basis, &log)
    }
}

fn push_labels(
    clique: &[usize],
    pos: usize,
    locals: &[Vec<Matrix<f64>>],
    label: &mut Vec<usize>,
    seen: &mut HashSet<Vec<usize>>,
    out: &mut Vec<Vec<usize>>,
) {
    if pos == clique.len() {
        if seen.insert(label.clone()) {
            out.push(label.clone());
        }
        return;
    }
    let v = clique[pos];
    for k in 0..locals[v].len() {
        label[v] = k;
        push_labels(clique, pos + 1, locals, label, seen, out);
    }
    label[v] = 0;
}

/// Relative Frobenius distance of `m` from the span of `basis` (least squares).
pub fn span_residual(basis: &[Matrix<f64>], m: &Matrix<f64>) -> Result<f64> {
    let len = m.data().len();
    let a = DMatrix::from_fn(len, basis.len(), |i, k| basis[k].data()[i]);
    let b = DMatrix::from_column_slice(len, 1, m.data());
    let svd = SVD::new(a.clone(), true, true);
    let x = svd
        .solve(&b, 1e-12)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let r = &a * x - &b;
    Ok(r.norm() / b.norm().max(f64::MIN_POSITIVE))
}

impl Parametrisation for LssmParam {
    fn name(&self) -> String {
        "gibbs-lssm".into()
    }

    fn n_params(&self) -> usize {
        self.basis.len()
    }

    fn side(&self) -> usize {
        self.shape.total_dim()
    }

    fn eval(&self, params: &[f64]) -> Result<Matrix<f64>> {
        check_len(self, params)?;
        mat_exp(&linear_combination(&self.basis, params))
    }
}

/// `θ ↦ exp(Σ_C ⊗_{v∈C} S_v)`: one symmetric factor per clique vertex, identity elsewhere.
#[derive(Debug, Clone)]
pub struct DecomposableParam {
    shape: SubsystemShape,
    cliques: Vec<Vec<usize>>,
}

impl DecomposableParam {
    pub fn new(g: &Graph, shape: &SubsystemShape) -> Result<Self> {
        check_graph_shape(g, shape)?;
        Ok(DecomposableParam {
            shape: shape.clone(),
            cliques: g.cliques(),
        })
    }

    /// The exponent `H` for a parameter vector.
    pub fn hamiltonian(&self, params: &[f64]) -> Result<Matrix<f64>> {
        check_len(self, params)?;
        let n = self.shape.total_dim();
        let mut h = Matrix::zeros(n, n);
        let mut rest = params;
        for clique in &self.cliques {
            let mut factors = Vec::with_capacity(clique.len());
            for &v in clique {
                let d = self.shape.dims()[v];
                let (mine, tail) = rest.split_at(ambient_dim(d));
                factors.push(from_coords(mine)?);
                rest = tail;
            }
            let term = embed(&kron_all(&factors), &self.shape, clique)?;
            h = h.try_add(&term)?;
        }
        Ok(h)
    }
}

impl Parametrisation for DecomposableParam {
    fn name(&self) -> String {
        "gibbs-dec".into()
    }

    fn n_params(&self) -> usize {
        self.cliques
            .iter()
            .flatten()
            .map(|&v| ambient_dim(self.shape.dims()[v]))
            .sum()
    }

    fn side(&self) -> usize {
        self.shape.total_dim()
    }

    fn eval(&self, params: &[f64]) -> Result<Matrix<f64>> {
        mat_exp(&self.hamiltonian(params)?)
    }
}

/// `θ ↦ exp(Σ θ_i H_i)` for a fixed list of Hamiltonians.
#[derive(Debug, Clone)]
pub struct ModelGibbsParam {
    hamiltonians: Vec<Matrix<f64>>,
}

impl ModelGibbsParam {
    pub fn new(hamiltonians: Vec<Matrix<f64>>) -> Result<Self> {
        let n = hamiltonians
            .first()
            .map(Matrix::rows)
            .ok_or_else(|| Error::InvalidArgument("no Hamiltonians".into()))?;
        if hamiltonians.iter().any(|h| h.rows() != n || !h.is_square()) {
            return Err(Error::DimensionMismatch("Hamiltonians differ in size".into()));
        }
        Ok(ModelGibbsParam { hamiltonians })
    }
}

impl Parametrisation for ModelGibbsParam {
    fn name(&self) -> String {
        "gibbs-model".into()
    }

    fn n_params(&self) -> usize {
        self.hamiltonians.len()
    }

    fn side(&self) -> usize {
        self.hamiltonians[0].rows()
    }

    fn eval(&self, params: &[f64]) -> Result<Matrix<f64>> {
        check_len(self, params)?;
        mat_exp(&linear_combination(&self.hamiltonians, params))
    }
}

/// `θ ↦ exp(S(θ))` over all of `𝕊^n`.
#[derive(Debug, Clone, Copy)]
pub struct ExpSymParam {
    pub n: usize,
}

impl Parametrisation for ExpSymParam {
    fn name(&self) -> String {
        "exp-sym".into()
    }

    fn n_params(&self) -> usize {
        ambient_dim(self.n)
    }

    fn side(&self) -> usize {
        self.n
    }

    fn eval(&self, params: &[f64]) -> Result<Matrix<f64>> {
        check_len(self, params)?;
        mat_exp(&from_coords(params)?)
    }
}

/// Factorised three-qubit matrices `(M ⊗ Id₂)(Id₂ ⊗ N)` with `[M ⊗ Id₂, Id₂ ⊗ N] = 0`.
///
/// `M` comes straight from the parameters; `N` is the orthogonal projection of
/// a second free matrix `Q` onto the kernel of `N ↦ [M ⊗ Id₂, Id₂ ⊗ N]`. With
/// `psd` set, `M = G·Gᵀ` and `Q = H·Hᵀ` instead, which keeps products PSD.
#[derive(Debug, Clone, Copy)]
pub struct QcmiParam {
    pub psd: bool,
}

/// Kernel dimension cut, relative to the largest singular value of the commutator map.
const COMMUTANT_TOL: f64 = 1e-9;

impl QcmiParam {
    fn factors(&self, params: &[f64]) -> (Matrix<f64>, Matrix<f64>) {
        if self.psd {
            let g = Matrix::from_fn(4, 4, |i, j| params[4 * i + j]);
            let h = Matrix::from_fn(4, 4, |i, j| params[16 + 4 * i + j]);
            (
                g.dot(&g.transpose()).symmetrized(),
                h.dot(&h.transpose()).symmetrized(),
            )
        } else {
            (
                from_coords(&params[..10]).expect("10 coordinates"),
                from_coords(&params[10..]).expect("10 coordinates"),
            )
        }
    }

    /// `M` and the commuting `N` for a parameter vector.
    pub fn pair(&self, params: &[f64]) -> Result<(Matrix<f64>, Matrix<f64>)> {
        check_len(self, params)?;
        let (m, q) = self.factors(params);
        let i2 = Matrix::identity(2);
        let big_m = kron(&m, &i2);
        let basis = orthonormal_symmetric_basis(4);
        let cols: Vec<Matrix<f64>> = basis
            .iter()
            .map(|b| big_m.commutator(&kron(&i2, b)))
            .collect::<Result<_>>()?;
        let l = DMatrix::from_fn(64, basis.len(), |r, k| cols[k].data()[r]);
        let svd = SVD::new(l, false, true);
        let vt = svd.v_t.ok_or_else(|| Error::DegenerateSample("SVD failed".into()))?;
        let top = svd.singular_values.max();
        let kernel: Vec<usize> = (0..basis.len())
            .filter(|&k| svd.singular_values[k] <= COMMUTANT_TOL * top)
            .collect();
        if kernel.is_empty() {
            return Err(Error::DegenerateSample("commutant kernel is trivial".into()));
        }
        let qc: Vec<f64> = basis
            .iter()
            .map(|b| q.data().iter().zip(b.data()).map(|(x, y)| x * y).sum())
            .collect();
        let mut nc = vec![0.0; basis.len()];
        for &k in &kernel {
            let row = vt.row(k);
            let d: f64 = row.iter().zip(&qc).map(|(a, b)| a * b).sum();
            for (c, &v) in nc.iter_mut().zip(row.iter()) {
                *c += d * v;
            }
        }
        let n = linear_combination(&basis, &nc);
        let resid = big_m.commutator(&kron(&i2, &n))?.frobenius_norm();
        if resid > 1e-10 * (m.frobenius_norm() * n.frobenius_norm()).max(1.0) {
            return Err(Error::DegenerateSample(format!("commutator residual {resid:e}")));
        }
        Ok((m, n))
    }
}

impl Parametrisation for QcmiParam {
    fn name(&self) -> String {
        if self.psd { "qcmi-psd" } else { "qcmi" }.into()
    }

    fn n_params(&self) -> usize {
        if self.psd {
            32
        } else {
            20
        }
    }

    fn side(&self) -> usize {
        8
    }

    fn eval(&self, params: &[f64]) -> Result<Matrix<f64>> {
        let (m, n) = self.pair(params)?;
        let i2 = Matrix::identity(2);
        Ok(kron(&m, &i2).dot(&kron(&i2, &n)).symmetrized())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::is_psd;
    use crate::rng::{rng_for, uniform_vec};

    #[test]
    fn lssm_basis_size() {
        let g = Graph::builtin("chain3").unwrap();
        let p = LssmParam::new(&g, &SubsystemShape::qubits(3)).unwrap();
        assert_eq!(p.n_params(), 15);
        assert_eq!(p.eval(&[0.0; 15]).unwrap(), Matrix::identity(8));
        let claw = Graph::builtin("claw").unwrap();
        // three edges of 9 labels sharing the 3 centre-only labels and the identity
        assert_eq!(LssmParam::new(&claw, &SubsystemShape::qubits(4)).unwrap().n_params(), 21);
        assert!(LssmParam::new(&g, &SubsystemShape::qubits(2)).is_err());
    }

    #[test]
    fn gibbs_points_stay_in_family() {
        let g = Graph::builtin("chain3").unwrap();
        let p = LssmParam::new(&g, &SubsystemShape::qubits(3)).unwrap();
        let x = p.eval(&uniform_vec(&mut rng_for(1, 0), 15)).unwrap();
        assert!(is_psd(&x, 0.0));
        assert!(p.family_residual(&x).unwrap() < 1e-8);
        let off = x.try_add(&Matrix::diag(&[0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(p.family_residual(&off).unwrap() > 1e-4);
    }

    #[test]
    fn decomposable_family() {
        let g = Graph::builtin("chain3").unwrap();
        let p = DecomposableParam::new(&g, &SubsystemShape::qubits(3)).unwrap();
        assert_eq!(p.n_params(), 12);
        // diagonal factors give a diagonal exponential
        let mut theta = uniform_vec(&mut rng_for(2, 0), 12);
        for k in (1..12).step_by(3) {
            theta[k] = 0.0;
        }
        let x = p.eval(&theta).unwrap();
        assert!((0..8).all(|i| (0..8).all(|j| i == j || *x.get(i, j) == 0.0)));
    }

    #[test]
    fn qcmi_pairs_commute_and_satisfy_linear_relations() {
        for psd in [false, true] {
            let p = QcmiParam { psd };
            for i in 0..20 {
                let theta = uniform_vec(&mut rng_for(3, i), p.n_params());
                let (m, n) = p.pair(&theta).unwrap();
                let i2 = Matrix::identity(2);
                let c = kron(&m, &i2).commutator(&kron(&i2, &n)).unwrap();
                assert!(c.frobenius_norm() < 1e-10);
                let z = crate::matcore::symmat::to_coords(&p.eval(&theta).unwrap());
                let scale = z.iter().fold(0.0f64, |a, b| a.max(b.abs()));
                assert!((z[13] - z[17] + z[22] - z[28]).abs() < 1e-9 * scale);
                assert!((z[11] - z[15] - z[24] + z[30]).abs() < 1e-9 * scale);
                if psd {
                    assert!(is_psd(&p.eval(&theta).unwrap(), 1e-12));
                }
            }
        }
    }

    #[test]
    fn diagonal_qcmi_factors_give_monomials() {
        let p = QcmiParam { psd: false };
        let mut theta = vec![0.0; 20];
        // diagonal coordinates of a 4×4 matrix in coordinate order: 0, 2, 5, 9
        for (k, &i) in [0usize, 2, 5, 9].iter().enumerate() {
            theta[i] = 1.0 + k as f64;
            theta[10 + i] = 0.5 + k as f64;
        }
        let (m, n) = p.pair(&theta).unwrap();
        let x = p.eval(&theta).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let row = 4 * a + 2 * b + c;
                    let want = m.get(2 * a + b, 2 * a + b) * n.get(2 * b + c, 2 * b + c);
                    assert!((x.get(row, row) - want).abs() < 1e-12);
                }
            }
        }
        assert!((0..8).all(|i| (0..8).all(|j| i == j || x.get(i, j).abs() < 1e-12)));
    }
}
