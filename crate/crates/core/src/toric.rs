//! Toric ideals of integer matrices by bounded fiber connectivity, and the
//! coordinate change carrying them to equations of commuting Gibbs varieties.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::implicit::{Monomial, MonomialBasis, Poly};
use crate::matcore::exact::rank;
use crate::matcore::scalar::rat_int;
use crate::matcore::symmat::{ambient_dim, coord_pairs};
use crate::matcore::{Matrix, Rat};
use crate::pauli::ToricModel;

pub const MAX_COLUMNS: usize = 32;
pub const MAX_DEGREE_BOUND: u32 = 4;

/// `x^plus − x^minus`, with `plus` the graded-lex larger monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Binomial {
    pub plus: Vec<u32>,
    pub minus: Vec<u32>,
}

impl Binomial {
    pub fn n_vars(&self) -> usize {
        self.plus.len()
    }

    pub fn degree(&self) -> u32 {
        self.plus.iter().sum::<u32>().max(self.minus.iter().sum())
    }

    /// The lattice vector `u = plus − minus`.
    pub fn lattice_vector(&self) -> Vec<i64> {
        self.plus.iter().zip(&self.minus).map(|(&a, &b)| a as i64 - b as i64).collect()
    }

    pub fn to_poly(&self) -> Poly<Rat> {
        let n = self.n_vars();
        let mut p = Poly::zero(n);
        p.add_term(Monomial::from_dense(&self.plus), rat_int(1));
        p.add_term(Monomial::from_dense(&self.minus), rat_int(-1));
        p
    }
}

impl fmt::Display for Binomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mono = |e: &[u32]| -> String {
            let parts: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{k}", i + 1) })
                .collect();
            if parts.is_empty() {
                "1".into()
            } else {
                parts.join("*")
            }
        };
        write!(f, "{} - {}", mono(&self.plus), mono(&self.minus))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Toric,
    Conjugated,
}

/// Generators of an ideal with exact rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealPresentation {
    pub n_vars: usize,
    pub generators: Vec<Poly<Rat>>,
    pub provenance: Provenance,
}

impl IdealPresentation {
    pub fn to_json(&self) -> Value {
        json!({
            "n_vars": self.n_vars,
            "provenance": self.provenance,
            "generators": self.generators.iter().map(Poly::to_json).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToricIdeal {
    pub a: Vec<Vec<i64>>,
    pub degree_bound: u32,
    /// Generators in the order found: by degree, then by fiber.
    pub binomials: Vec<Binomial>,
}

impl ToricIdeal {
    pub fn presentation(&self) -> IdealPresentation {
        IdealPresentation {
            n_vars: self.a.first().map_or(0, Vec::len),
            generators: self.binomials.iter().map(Binomial::to_poly).collect(),
            provenance: Provenance::Toric,
        }
    }
}

/// `A` with column `c` equal to `2·bits(c) − 1`, bits big-endian over `n` rows.
pub fn hypercube_matrix(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..1usize << n).map(|c| 2 * ((c >> (n - 1 - i)) & 1) as i64 - 1).collect())
        .collect()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // keep the smaller index as root so roots are graded-lex minimal
        if ra < rb {
            self.0[rb] = ra;
        } else if rb < ra {
            self.0[ra] = rb;
        }
    }
}

fn add(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Binomial generators of `I_A` up to degree `degree_bound`.
///
/// For each degree `d ≤ degree_bound`, monomials of degree `≤ d` are grouped
/// into fibers of `u ↦ A·u` and joined by the moves of the generators found
/// so far; every fiber that is still disconnected contributes one binomial per
/// extra component, tying the component's smallest monomial to the fiber's.
/// The same test one degree higher must then succeed without new generators,
/// otherwise the bound is reported as insufficient.
pub fn toric_ideal(a: &[Vec<i64>], degree_bound: u32) -> Result<ToricIdeal> {
    let ncols = a.first().map_or(0, Vec::len);
    if ncols == 0 || a.iter().any(|r| r.len() != ncols) {
        return Err(Error::InvalidShape("A must be a nonempty rectangular matrix".into()));
    }
    if ncols > MAX_COLUMNS {
        return Err(Error::InvalidArgument(format!("at most {MAX_COLUMNS} columns, got {ncols}")));
    }
    if degree_bound == 0 || degree_bound > MAX_DEGREE_BOUND {
        return Err(Error::InvalidArgument(format!(
            "degree bound must lie in 1..={MAX_DEGREE_BOUND}"
        )));
    }
    let basis = MonomialBasis::new(ncols, degree_bound + 1);
    let exps = basis.exponents();
    let degrees: Vec<u32> = (0..exps.len()).map(|k| basis.degree_of(k)).collect();
    let index: HashMap<&[u32], usize> = exps.iter().enumerate().map(|(k, e)| (e.as_slice(), k)).collect();
    let fibers: Vec<Vec<i64>> = exps
        .par_iter()
        .map(|e| a.iter().map(|row| row.iter().zip(e).map(|(x, &k)| x * k as i64).sum()).collect())
        .collect();

    let mut gens: Vec<Binomial> = Vec::new();
    for layer in 1..=degree_bound + 1 {
        let limit = exps.partition_point(|e| e.iter().sum::<u32>() <= layer);
        let mut uf = UnionFind::new(limit);
        for g in &gens {
            let gd = g.degree();
            for w in 0..limit {
                if degrees[w] + gd > layer {
                    break;
                }
                let (Some(&i), Some(&j)) = (
                    index.get(add(&exps[w], &g.plus).as_slice()),
                    index.get(add(&exps[w], &g.minus).as_slice()),
                ) else {
                    continue;
                };
                uf.union(i, j);
            }
        }
        // fiber → first monomial and the component roots seen, in index order
        let mut by_fiber: BTreeMap<&[i64], (usize, Vec<usize>)> = BTreeMap::new();
        let mut order: Vec<&[i64]> = Vec::new();
        for k in 0..limit {
            let root = uf.find(k);
            let entry = by_fiber.entry(fibers[k].as_slice()).or_insert_with(|| {
                order.push(fibers[k].as_slice());
                (k, Vec::new())
            });
            if !entry.1.contains(&root) {
                entry.1.push(root);
            }
        }
        let mut fresh = Vec::new();
        for f in order {
            let (first, roots) = &by_fiber[f];
            // roots are component minima, so the first monomial is its own root
            for &r in roots.iter().filter(|&&r| r != *first) {
                fresh.push(Binomial {
                    plus: exps[r].clone(),
                    minus: exps[*first].clone(),
                });
            }
        }
        if layer == degree_bound + 1 {
            if let Some(w) = fresh.first() {
                return Err(Error::DegreeBoundInsufficient {
                    bound: degree_bound,
                    witness: w.to_string(),
                });
            }
        } else {
            gens.extend(fresh);
        }
    }
    Ok(ToricIdeal {
        a: a.to_vec(),
        degree_bound,
        binomials: gens,
    })
}

fn hypercube_cache() -> &'static Mutex<HashMap<usize, Arc<ToricIdeal>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<ToricIdeal>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Quadratic generators of the `n`-bit independence model, computed once per `n`.
pub fn precompute_hypercube_ideal(n: usize) -> Result<Arc<ToricIdeal>> {
    if n == 0 || n > 5 {
        return Err(Error::InvalidArgument(format!("hypercube size must lie in 1..=5, got {n}")));
    }
    if let Some(hit) = hypercube_cache().lock().expect("cache lock").get(&n) {
        return Ok(Arc::clone(hit));
    }
    let ideal = Arc::new(toric_ideal(&hypercube_matrix(n), 2)?);
    let mut cache = hypercube_cache().lock().expect("cache lock");
    Ok(Arc::clone(cache.entry(n).or_insert(ideal)))
}

/// Exact check that `b` vanishes at `x_c = Π_i t_i^{a_ic}`.
pub fn vanishes_at(a: &[Vec<i64>], b: &Binomial, t: &[Rat]) -> bool {
    let point: Vec<Rat> = (0..b.n_vars())
        .map(|c| {
            a.iter().zip(t).fold(Rat::one(), |acc, (row, ti)| {
                let e = row[c];
                let p = num_traits::pow(ti.clone(), e.unsigned_abs() as usize);
                if e < 0 {
                    acc / p
                } else {
                    acc * p
                }
            })
        })
        .collect();
    b.to_poly().eval_exact(&point).map(|v| v.is_zero()).unwrap_or(false)
}

/// Equations of a commuting Gibbs variety in the ambient coordinates `y`.
#[derive(Debug, Clone)]
pub struct GvEquations {
    pub presentation: IdealPresentation,
    /// Off-diagonal entries of `OᵀYO`; the first `n_linear` generators.
    pub n_linear: usize,
    /// Pulled-back toric generators; the remaining generators.
    pub n_toric: usize,
    /// Rank of the pulled-back generators modulo the linear forms.
    pub reduced_rank: usize,
}

fn denominators_cleared(p: Poly<Rat>) -> Poly<Rat> {
    let mut l = num_bigint::BigInt::one();
    for (_, c) in p.terms() {
        l = l.lcm(c.denom());
    }
    let scaled = p.scale(&Rat::from_integer(l));
    let mut g = num_bigint::BigInt::zero();
    for (_, c) in scaled.terms() {
        g = g.gcd(c.numer());
    }
    let lead_negative = scaled.leading().is_some_and(|(_, c)| c.is_negative());
    if g.is_zero() {
        return scaled;
    }
    let g = if lead_negative { -g } else { g };
    scaled.scale(&Rat::new(num_bigint::BigInt::one(), g))
}

/// Pulls the toric ideal of `model.a` back through `p_j = (OᵀYO)_jj / w_j`
/// and adds the off-diagonal entries of `OᵀYO` as linear forms.
pub fn gv_equations(model: &ToricModel, degree_bound: u32) -> Result<GvEquations> {
    let n = model.dim();
    let m = ambient_dim(n);
    let pairs = coord_pairs(n);
    let o = &model.o;
    // (OᵀYO)_ij = Σ_{a≥b} y_ab (O_ai O_bj + O_bi O_aj), halved on the diagonal a = b
    let entry = |i: usize, j: usize| -> Vec<i64> {
        pairs
            .iter()
            .map(|&(a, b)| {
                if a == b {
                    o[a][i] * o[a][j]
                } else {
                    o[a][i] * o[b][j] + o[b][i] * o[a][j]
                }
            })
            .collect()
    };
    let linear_poly = |coefs: &[i64], scale: &Rat| -> Poly<Rat> {
        let mut p = Poly::zero(m);
        for (k, &c) in coefs.iter().enumerate() {
            if c != 0 {
                p.add_term(Monomial::var(k), rat_int(c) * scale.clone());
            }
        }
        p
    };

    let mut generators = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            generators.push(denominators_cleared(linear_poly(&entry(i, j), &Rat::one())));
        }
    }
    let n_linear = generators.len();

    let diag: Vec<Poly<Rat>> = (0..n)
        .map(|j| linear_poly(&entry(j, j), &Rat::new(1.into(), model.weights[j].into())))
        .collect();
    let ideal = toric_ideal(&model.a, degree_bound)?;
    let pulled: Vec<Poly<Rat>> = ideal
        .binomials
        .par_iter()
        .map(|b| {
            let side = |e: &[u32]| -> Result<Poly<Rat>> {
                let mut acc = Poly::constant(m, Rat::one());
                for (j, &k) in e.iter().enumerate() {
                    for _ in 0..k {
                        acc = acc.mul(&diag[j])?;
                    }
                }
                Ok(acc)
            };
            Ok(denominators_cleared(side(&b.plus)?.sub(&side(&b.minus)?)?))
        })
        .collect::<Result<_>>()?;
    let n_toric = pulled.len();
    let reduced_rank = reduced_rank(model, &pulled)?;
    generators.extend(pulled);
    Ok(GvEquations {
        presentation: IdealPresentation {
            n_vars: m,
            generators,
            provenance: Provenance::Conjugated,
        },
        n_linear,
        n_toric,
        reduced_rank,
    })
}

/// Substitutes `Y = Σ_j p_j o_j o_jᵀ / w_j`, which parametrises the zero set of
/// the linear forms, and returns the polynomial in `p` (coefficients scaled by
/// `L^deg`, `L = lcm(w)`), keyed by sorted variable lists.
fn restrict_to_diagonal(model: &ToricModel, g: &Poly<Rat>) -> Result<BTreeMap<Vec<usize>, Rat>> {
    let n = model.dim();
    let l = model.weights.iter().fold(1i64, |acc, &w| acc.lcm(&w));
    // y_ab = (1/L) Σ_j c[ab][j] p_j
    let c: Vec<Vec<i128>> = coord_pairs(n)
        .iter()
        .map(|&(a, b)| {
            (0..n)
                .map(|j| (model.o[a][j] * model.o[b][j] * (l / model.weights[j])) as i128)
                .collect()
        })
        .collect();
    let deg = g.degree();
    if deg > 2 {
        return Err(Error::InvalidArgument("restriction implemented up to degree 2".into()));
    }
    // accumulate L^deg · g(y(p)) as integers: constant, linear, quadratic parts
    let mut constant: i128 = 0;
    let mut linear = vec![0i128; n];
    let mut quad = vec![vec![0i128; n]; n];
    let l = l as i128;
    for (mono, coef) in g.terms() {
        if !coef.is_integer() {
            return Err(Error::InvalidArgument("expected integer coefficients".into()));
        }
        let k: i128 = coef.to_integer().try_into().map_err(|_| Error::InvalidArgument("coefficient overflow".into()))?;
        let vars: Vec<usize> = mono
            .pairs()
            .iter()
            .flat_map(|&(v, e)| std::iter::repeat(v as usize).take(e as usize))
            .collect();
        match vars.as_slice() {
            [] => constant += k * l.pow(deg),
            [u] => {
                let s = k * l.pow(deg - 1);
                for (lin, cu) in linear.iter_mut().zip(&c[*u]) {
                    *lin += s * cu;
                }
            }
            [u, v] => {
                for (i, ci) in c[*u].iter().enumerate() {
                    if *ci == 0 {
                        continue;
                    }
                    for (j, cj) in c[*v].iter().enumerate() {
                        quad[i][j] += k * ci * cj;
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    let mut out = BTreeMap::new();
    if constant != 0 {
        out.insert(vec![], Rat::from_integer(constant.into()));
    }
    for (i, &v) in linear.iter().enumerate() {
        if v != 0 {
            out.insert(vec![i], Rat::from_integer(v.into()));
        }
    }
    for i in 0..n {
        for j in i..n {
            let v = if i == j { quad[i][i] } else { quad[i][j] + quad[j][i] };
            if v != 0 {
                out.insert(vec![i, j], Rat::from_integer(v.into()));
            }
        }
    }
    Ok(out)
}

/// Exact rank of the generators after restriction to the zero set of the linear forms.
fn reduced_rank(model: &ToricModel, gens: &[Poly<Rat>]) -> Result<usize> {
    let rows: Vec<BTreeMap<Vec<usize>, Rat>> = gens
        .par_iter()
        .map(|g| restrict_to_diagonal(model, g))
        .collect::<Result<_>>()?;
    let mut cols: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for r in &rows {
        for k in r.keys() {
            let next = cols.len();
            cols.entry(k.clone()).or_insert(next);
        }
    }
    let mut mat = Matrix::from_fn(rows.len(), cols.len(), |_, _| Rat::zero());
    for (i, r) in rows.iter().enumerate() {
        for (k, v) in r {
            mat.set(i, cols[k], v.clone());
        }
    }
    Ok(rank(&mat))
}

/// Largest relative residual `|g(y)| / Σ|terms|` of each generator over the points.
pub fn relative_residuals(gens: &[Poly<Rat>], points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let fgens: Vec<Poly<f64>> = gens.iter().map(Poly::to_f64).collect();
    fgens
        .par_iter()
        .map(|g| {
            let mut worst = 0.0f64;
            for z in points {
                let v = g.eval(z)?.abs();
                let mag = g.term_magnitude(z)?;
                if mag > 0.0 {
                    worst = worst.max(v / mag);
                }
            }
            Ok(worst)
        })
        .collect()
}

/// `Y ↦ (OᵀYO)_jj / w_j`, the diagonal coordinates of a point in the eigenbasis.
pub fn diagonal_coordinates(model: &ToricModel, y: &Matrix<f64>) -> Vec<f64> {
    let n = model.dim();
    (0..n)
        .map(|j| {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s += model.o[a][j] as f64 * y.get(a, b) * model.o[b][j] as f64;
                }
            }
            s / model.weights[j] as f64
        })
        .collect()
}
