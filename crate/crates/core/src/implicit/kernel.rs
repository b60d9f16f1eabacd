use nalgebra::{DMatrix, SVD};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::basis::MonomialBasis;
use super::poly::{CoefJson, Monomial, Poly};
use crate::error::{Error, Result};
use crate::matcore::json::float_value;
use crate::matcore::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct KernelOptions {
    /// Singular values below `tol·σ_max` span the kernel.
    pub tol: f64,
    /// Minimum ratio between the smallest kept and largest cut singular value.
    pub min_gap: f64,
    /// Every `holdout_every`-th point is held out for validation.
    pub holdout_every: usize,
    /// Retention threshold on held-out residuals, relative to `scale^degree`.
    pub residual_tol: f64,
    /// Training points required per basis monomial.
    pub oversample: f64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions {
            tol: 1e-8,
            min_gap: 10.0,
            holdout_every: 5,
            residual_tol: 1e-6,
            oversample: 1.2,
        }
    }
}

impl KernelOptions {
    pub fn with_tol(tol: f64) -> Self {
        KernelOptions {
            tol,
            ..Self::default()
        }
    }
}

/// Outcome of one interpolation run. Degree-`d` relations are searched on the
/// quotient by the linear relations, so `kernel_dim` counts only new ones.
#[derive(Debug, Clone)]
pub struct KernelReport {
    pub degree: u32,
    pub kernel_dim: usize,
    pub affine_rank: usize,
    pub basis_size: usize,
    pub train_points: usize,
    pub holdout_points: usize,
    /// Smallest kept over largest cut singular value; `None` with an empty kernel.
    pub gap_ratio: Option<f64>,
    /// Smallest kept singular value relative to the largest.
    pub smallest_kept: f64,
    /// Largest held-out residual over retained polynomials.
    pub residual: f64,
    /// Kernel vectors discarded by holdout validation.
    pub rejected: usize,
    pub linear: Vec<Poly<f64>>,
    pub basis: Vec<Poly<f64>>,
}

impl KernelReport {
    pub fn to_json(&self) -> Value {
        let polys = |ps: &[Poly<f64>]| ps.iter().map(Poly::to_json).collect::<Vec<_>>();
        json!({
            "degree": self.degree,
            "kernel_dim": self.kernel_dim,
            "linear_dim": self.linear.len(),
            "affine_rank": self.affine_rank,
            "basis_size": self.basis_size,
            "train_points": self.train_points,
            "holdout_points": self.holdout_points,
            "gap_ratio": self.gap_ratio.map(float_value),
            "smallest_kept": float_value(self.smallest_kept),
            "residual": float_value(self.residual),
            "rejected": self.rejected,
            "linear": polys(&self.linear),
            "basis": polys(&self.basis),
        })
    }
}

struct RankSplit {
    rank: usize,
    gap_ratio: Option<f64>,
    smallest_kept: f64,
    /// Right singular vectors as columns, descending singular value order.
    v: DMatrix<f64>,
}

fn rank_split(m: DMatrix<f64>, opts: &KernelOptions) -> Result<RankSplit> {
    let ncols = m.ncols();
    let svd = SVD::new(m, false, true);
    let vt = svd.v_t.ok_or_else(|| Error::InvalidArgument("SVD without V".into()))?;
    let mut sv: Vec<(f64, usize)> = svd.singular_values.iter().copied().zip(0..).collect();
    sv.sort_by(|a, b| b.0.total_cmp(&a.0));
    // rows beyond the rank of a wide matrix carry implicit zero singular values
    let mut values: Vec<f64> = sv.iter().map(|s| s.0).collect();
    values.resize(ncols, 0.0);
    let top = values.first().copied().unwrap_or(0.0);
    let rank = values.iter().filter(|&&s| s > opts.tol * top).count();
    let gap_ratio = (rank < ncols && rank > 0).then(|| {
        let cut = values[rank];
        if cut == 0.0 {
            f64::INFINITY
        } else {
            values[rank - 1] / cut
        }
    });
    if let Some(g) = gap_ratio {
        if g < opts.min_gap {
            return Err(Error::UnstableRank {
                gap_ratio: g,
                required: opts.min_gap,
            });
        }
    }
    let smallest_kept = if rank > 0 && top > 0.0 { values[rank - 1] / top } else { 0.0 };

    // full V: complete the computed rows of Vᵀ with an orthonormal complement
    let mut v = DMatrix::<f64>::zeros(ncols, ncols);
    for (k, &(_, idx)) in sv.iter().enumerate() {
        v.set_column(k, &vt.row(idx).transpose());
    }
    if sv.len() < ncols {
        complete_basis(&mut v, sv.len());
    }
    Ok(RankSplit {
        rank,
        gap_ratio,
        smallest_kept,
        v,
    })
}

/// Fills columns `filled..` of `v` with an orthonormal complement of the first ones.
fn complete_basis(v: &mut DMatrix<f64>, filled: usize) {
    let n = v.nrows();
    let mut k = filled;
    for e in 0..n {
        if k == n {
            break;
        }
        let mut c = DMatrix::<f64>::zeros(n, 1);
        c[(e, 0)] = 1.0;
        for _ in 0..2 {
            for j in 0..k {
                let d = v.column(j).dot(&c.column(0));
                for i in 0..n {
                    c[(i, 0)] -= d * v[(i, j)];
                }
            }
        }
        let norm = c.norm();
        if norm > 1e-8 {
            v.set_column(k, &(c.column(0) / norm));
            k += 1;
        }
    }
}

/// Gauss–Jordan on the rows of a kernel basis; each result has a unit pivot
/// that vanishes in the other rows, then is scaled to max-abs coefficient 1.
fn sparsify(mut rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let (p, best) = (r..rows.len())
            .map(|i| (i, rows[i][c].abs()))
            .fold((r, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best < 1e-10 {
            continue;
        }
        rows.swap(r, p);
        let inv = 1.0 / rows[r][c];
        rows[r].iter_mut().for_each(|v| *v *= inv);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0.0 {
                let f = row[c];
                row.iter_mut().zip(&pivot).for_each(|(v, p)| *v -= f * p);
            }
        }
        r += 1;
    }
    for row in &mut rows {
        let m = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        row.iter_mut().for_each(|v| {
            *v /= m;
            if v.abs() < 1e-12 {
                *v = 0.0;
            }
        });
    }
    rows
}

fn required_total(train_needed: usize, every: usize) -> usize {
    (1usize..)
        .find(|&n| n - n.div_ceil(every) >= train_needed)
        .unwrap_or(usize::MAX)
}

fn check_points(points: &[Vec<f64>]) -> Result<usize> {
    let m = points
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InsufficientSamples { needed: 1, got: 0 })?;
    for p in points {
        if p.len() != m {
            return Err(Error::ArityMismatch {
                expected: m,
                got: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
    }
    Ok(m)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Finds the polynomial relations of degree `≤ degree` vanishing on `points`.
pub fn vandermonde_kernel(points: &[Vec<f64>], degree: u32, opts: &KernelOptions) -> Result<KernelReport> {
    if degree == 0 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    let m = check_points(points)?;
    let every = opts.holdout_every.max(2);
    let mut holdout = Vec::new();
    let mut train = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if i % every == 0 {
            holdout.push(p);
        } else {
            train.push(p);
        }
    }

    let need_linear = (opts.oversample * (m + 1) as f64).ceil() as usize;
    if train.len() < need_linear {
        return Err(Error::InsufficientSamples {
            needed: required_total(need_linear, every),
            got: points.len(),
        });
    }

    // centre and scale every coordinate to unit RMS
    let nt = train.len() as f64;
    let mu: Vec<f64> = (0..m).map(|l| train.iter().map(|p| p[l]).sum::<f64>() / nt).collect();
    let s: Vec<f64> = (0..m)
        .map(|l| {
            let rms = (train.iter().map(|p| (p[l] - mu[l]).powi(2)).sum::<f64>() / nt).sqrt();
            if rms > 0.0 {
                rms
            } else {
                1.0
            }
        })
        .collect();
    let normalise = |p: &Vec<f64>| -> Vec<f64> { (0..m).map(|l| (p[l] - mu[l]) / s[l]).collect() };
    let zt: Vec<Vec<f64>> = train.iter().map(|p| normalise(p)).collect();
    let zh: Vec<Vec<f64>> = holdout.iter().map(|p| normalise(p)).collect();

    let zmat = DMatrix::from_fn(zt.len(), m, |i, j| zt[i][j]);
    let lin = rank_split(zmat, opts)?;
    let r = lin.rank;

    // linear relations: right singular vectors beyond the rank
    let lin_rows: Vec<Vec<f64>> = (r..m).map(|k| lin.v.column(k).iter().copied().collect()).collect();
    let mut residual = 0.0f64;
    let mut rejected = 0;
    let mut linear = Vec::new();
    for row in sparsify(lin_rows) {
        let worst = zh
            .iter()
            .map(|z| row.iter().zip(z).map(|(a, b)| a * b).sum::<f64>().abs() / max_abs(z).max(1.0))
            .fold(0.0f64, f64::max);
        if worst > opts.residual_tol {
            rejected += 1;
            continue;
        }
        if degree == 1 {
            residual = residual.max(worst);
        }
        linear.push(linear_to_z(&row, &mu, &s));
    }

    if degree == 1 {
        return Ok(KernelReport {
            degree,
            kernel_dim: linear.len(),
            affine_rank: r,
            basis_size: m + 1,
            train_points: train.len(),
            holdout_points: holdout.len(),
            gap_ratio: lin.gap_ratio,
            smallest_kept: lin.smallest_kept,
            residual,
            rejected,
            linear,
            basis: Vec::new(),
        });
    }

    // quotient coordinates q = V_rᵀ ẑ, each rescaled to unit RMS
    let project = |z: &Vec<f64>| -> Vec<f64> {
        (0..r)
            .map(|k| (0..m).map(|l| lin.v[(l, k)] * z[l]).sum::<f64>())
            .collect()
    };
    let qt_raw: Vec<Vec<f64>> = zt.iter().map(project).collect();
    let t: Vec<f64> = (0..r)
        .map(|k| {
            let rms = (qt_raw.iter().map(|q| q[k] * q[k]).sum::<f64>() / nt).sqrt();
            if rms > 0.0 {
                rms
            } else {
                1.0
            }
        })
        .collect();
    let rescale = |q: Vec<f64>| -> Vec<f64> { q.into_iter().zip(&t).map(|(v, tk)| v / tk).collect() };
    let qt: Vec<Vec<f64>> = qt_raw.into_iter().map(rescale).collect();
    let qh: Vec<Vec<f64>> = zh.iter().map(|z| rescale(project(z))).collect();

    let basis = MonomialBasis::new(r, degree);
    let need = (opts.oversample * basis.len() as f64).ceil() as usize;
    if train.len() < need {
        return Err(Error::InsufficientSamples {
            needed: required_total(need, every),
            got: points.len(),
        });
    }
    let rows: Vec<Vec<f64>> = qt.par_iter().map(|q| basis.eval_row(q)).collect();
    let vmat = DMatrix::from_fn(rows.len(), basis.len(), |i, j| rows[i][j]);
    let split = rank_split(vmat, opts)?;
    let b = basis.len();
    let kernel_rows: Vec<Vec<f64>> = (split.rank..b)
        .map(|k| split.v.column(k).iter().copied().collect())
        .collect();

    // affine map z ↦ q̂
    let w: Vec<Vec<f64>> = (0..r)
        .map(|k| (0..m).map(|l| lin.v[(l, k)] / (s[l] * t[k])).collect())
        .collect();
    let w0: Vec<f64> = w
        .iter()
        .map(|wk| -wk.iter().zip(&mu).map(|(a, b)| a * b).sum::<f64>())
        .collect();

    let mut polys = Vec::new();
    let mut dropped = 0;
    let mut worst_kept = 0.0f64;
    for row in sparsify(kernel_rows) {
        let worst = qh
            .iter()
            .map(|q| {
                let v: f64 = basis.eval_row(q).iter().zip(&row).map(|(a, c)| a * c).sum();
                v.abs() / max_abs(q).max(1.0).powi(degree as i32)
            })
            .fold(0.0f64, f64::max);
        if worst > opts.residual_tol {
            dropped += 1;
            continue;
        }
        worst_kept = worst_kept.max(worst);
        polys.push(quotient_to_z(&basis, &row, &w, &w0, m)?);
    }

    Ok(KernelReport {
        degree,
        kernel_dim: polys.len(),
        affine_rank: r,
        basis_size: b,
        train_points: train.len(),
        holdout_points: holdout.len(),
        gap_ratio: split.gap_ratio,
        smallest_kept: split.smallest_kept,
        residual: worst_kept,
        rejected: dropped,
        linear,
        basis: polys,
    })
}

fn normalised(mut p: Poly<f64>) -> Poly<f64> {
    let m = p.max_abs_coeff();
    if m > 0.0 {
        p = p.scale(&(1.0 / m));
    }
    let n = p.n_vars();
    // snap round-off around integers so printed relations read cleanly
    let kept: Vec<(Monomial, f64)> = p
        .terms()
        .filter(|(_, c)| c.abs() >= 1e-12)
        .map(|(m, c)| (m.clone(), if (c - c.round()).abs() < 1e-10 { c.round() } else { *c }))
        .collect();
    Poly::from_terms(n, kept).expect("same arity")
}

fn linear_to_z(row: &[f64], mu: &[f64], s: &[f64]) -> Poly<f64> {
    let m = row.len();
    let mut terms = Vec::with_capacity(m + 1);
    let mut c0 = 0.0;
    for l in 0..m {
        if row[l] != 0.0 {
            terms.push((Monomial::var(l), row[l] / s[l]));
            c0 -= row[l] * mu[l] / s[l];
        }
    }
    terms.push((Monomial::one(), c0));
    normalised(Poly::from_terms(m, terms).expect("indices in range"))
}

/// Pulls a polynomial in the quotient coordinates `q̂ = W z + w0` back to `z`.
fn quotient_to_z(basis: &MonomialBasis, coef: &[f64], w: &[Vec<f64>], w0: &[f64], m: usize) -> Result<Poly<f64>> {
    let r = w.len();
    if basis.max_degree() > 2 {
        let forms: Vec<Poly<f64>> = (0..r)
            .map(|k| {
                let mut terms: Vec<(Monomial, f64)> = (0..m).map(|l| (Monomial::var(l), w[k][l])).collect();
                terms.push((Monomial::one(), w0[k]));
                Poly::from_terms(m, terms)
            })
            .collect::<Result<_>>()?;
        let mut q = Poly::zero(r);
        for (k, &c) in coef.iter().enumerate() {
            q.add_term(basis.monomial(k), c);
        }
        return Ok(normalised(q.substitute(&forms)?));
    }
    // p(q) = c + bᵀq + qᵀCq, expanded densely
    let mut c = 0.0;
    let mut bvec = vec![0.0; r];
    let mut cm = vec![vec![0.0; r]; r];
    for (k, &cf) in coef.iter().enumerate() {
        if cf == 0.0 {
            continue;
        }
        let mono = basis.monomial(k);
        let vars: Vec<usize> = mono
            .pairs()
            .iter()
            .flat_map(|&(v, e)| std::iter::repeat(v as usize).take(e as usize))
            .collect();
        match vars.as_slice() {
            [] => c += cf,
            [a] => bvec[*a] += cf,
            [a, b] if a == b => cm[*a][*a] += cf,
            [a, b] => {
                cm[*a][*b] += cf / 2.0;
                cm[*b][*a] += cf / 2.0;
            }
            _ => unreachable!("degree at most 2"),
        }
    }
    // z-space quadratic form Wᵀ C W, linear part Wᵀ(b + 2 C w0), constant
    let cw0: Vec<f64> = (0..r).map(|k| (0..r).map(|j| cm[k][j] * w0[j]).sum()).collect();
    let lin_q: Vec<f64> = (0..r).map(|k| bvec[k] + 2.0 * cw0[k]).collect();
    let constant = c + (0..r).map(|k| bvec[k] * w0[k] + w0[k] * cw0[k]).sum::<f64>();
    let cw: Vec<Vec<f64>> = (0..r)
        .map(|k| (0..m).map(|l| (0..r).map(|j| cm[k][j] * w[j][l]).sum()).collect())
        .collect();
    let mut terms = Vec::new();
    terms.push((Monomial::one(), constant));
    for l in 0..m {
        let v: f64 = (0..r).map(|k| w[k][l] * lin_q[k]).sum();
        terms.push((Monomial::var(l), v));
    }
    for a in 0..m {
        for b in a..m {
            let v: f64 = (0..r).map(|k| w[k][a] * cw[k][b]).sum();
            let v = if a == b { v } else { 2.0 * v };
            terms.push((Monomial::from_pairs(&[(a, 1), (b, 1)]), v));
        }
    }
    Ok(normalised(Poly::from_terms(m, terms)?))
}

/// Worst-case residuals of one candidate over a sample.
#[derive(Debug, Clone, Serialize)]
pub struct Membership {
    pub degree: u32,
    /// `max |p(z)|`.
    pub max_abs: f64,
    /// `max |p(z)| / (max_l |z_l|)^deg`.
    pub max_scaled: f64,
    /// `max |p(z)| / Σ_t |c_t m_t(z)|`.
    pub max_relative: f64,
    /// `max_scaled ≤ tol`.
    pub passed: bool,
}

/// Evaluates each candidate on every point.
pub fn membership<C: Scalar>(points: &[Vec<f64>], candidates: &[Poly<C>], tol: f64) -> Result<Vec<Membership>> {
    candidates
        .par_iter()
        .map(|p| {
            let deg = p.degree();
            let (mut a, mut s, mut rel) = (0.0f64, 0.0f64, 0.0f64);
            for z in points {
                let v = p.eval(z)?.abs();
                let scale = max_abs(z).max(f64::MIN_POSITIVE).powi(deg as i32);
                let mag = p.term_magnitude(z)?;
                a = a.max(v);
                s = s.max(v / scale);
                rel = rel.max(if mag > 0.0 { v / mag } else { 0.0 });
            }
            Ok(Membership {
                degree: deg,
                max_abs: a,
                max_scaled: s,
                max_relative: rel,
                passed: s <= tol,
            })
        })
        .collect()
}

/// Serialises a list of polynomials.
pub fn polys_to_json<C: CoefJson>(ps: &[Poly<C>]) -> Value {
    Value::Array(ps.iter().map(Poly::to_json).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn circle(n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = crate::rng::rng_for(seed, 0);
        (0..n)
            .map(|_| {
                let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                vec![th.cos(), th.sin()]
            })
            .collect()
    }

    #[test]
    fn unit_circle() {
        let pts = circle(40, 1);
        let lin = vandermonde_kernel(&pts, 1, &KernelOptions::default()).unwrap();
        assert_eq!(lin.kernel_dim, 0);
        let rep = vandermonde_kernel(&pts, 2, &KernelOptions::default()).unwrap();
        assert_eq!(rep.kernel_dim, 1);
        let p = &rep.basis[0];
        // ∝ x² + y² − 1
        let x2 = p.coefficient(&Monomial::from_dense(&[2, 0])).copied().unwrap();
        let y2 = p.coefficient(&Monomial::from_dense(&[0, 2])).copied().unwrap();
        let one = p.coefficient(&Monomial::one()).copied().unwrap();
        assert!((x2 - y2).abs() < 1e-8 && (x2 + one).abs() < 1e-8);
        assert!(p.len() <= 6);
        for q in circle(10, 2) {
            assert!(p.eval(&q).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn plane_and_cubic() {
        let mut rng = crate::rng::rng_for(3, 0);
        // points on the twisted cubic, shifted: (t, t², t³) + (1, 2, 3)
        let pts: Vec<Vec<f64>> = (0..80)
            .map(|_| {
                let t: f64 = rng.gen_range(-1.0..1.0);
                vec![t + 1.0, t * t + 2.0, t * t * t + 3.0]
            })
            .collect();
        let rep = vandermonde_kernel(&pts, 2, &KernelOptions::default()).unwrap();
        assert_eq!(rep.linear.len(), 0);
        assert_eq!(rep.kernel_dim, 3);
        let rows = membership(&pts, &rep.basis, 1e-8).unwrap();
        assert!(rows.iter().all(|r| r.passed), "{rows:?}");

        let flat: Vec<Vec<f64>> = (0..30)
            .map(|_| {
                let (a, b): (f64, f64) = (rng.gen(), rng.gen());
                vec![a, b, 2.0 * a - b + 0.5]
            })
            .collect();
        let rep = vandermonde_kernel(&flat, 1, &KernelOptions::default()).unwrap();
        assert_eq!(rep.kernel_dim, 1);
        assert_eq!(rep.affine_rank, 2);
        let p = &rep.linear[0];
        assert!(p.eval(&[0.0, 0.0, 0.5]).unwrap().abs() < 1e-10);
    }

    #[test]
    fn errors() {
        let pts = circle(8, 1);
        assert!(matches!(
            vandermonde_kernel(&pts, 2, &KernelOptions::default()),
            Err(Error::InsufficientSamples { .. })
        ));
        assert!(vandermonde_kernel(&[], 1, &KernelOptions::default()).is_err());
        let ragged = vec![vec![1.0, 2.0], vec![1.0]];
        assert!(matches!(
            vandermonde_kernel(&ragged, 1, &KernelOptions::default()),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn rank_gap_is_enforced() {
        let d = |vals: &[f64]| {
            let mut m = DMatrix::<f64>::zeros(6, vals.len());
            for (i, v) in vals.iter().enumerate() {
                m[(i, i)] = *v;
            }
            m
        };
        let opts = KernelOptions::default();
        assert!(matches!(
            rank_split(d(&[1.0, 0.5, 2e-8, 5e-9]), &opts),
            Err(Error::UnstableRank { .. })
        ));
        let ok = rank_split(d(&[1.0, 0.5, 2e-8, 1e-12]), &opts).unwrap();
        assert_eq!(ok.rank, 3);
        assert!(ok.gap_ratio.unwrap() > 1e3);
        assert_eq!(rank_split(d(&[1.0, 0.5]), &opts).unwrap().gap_ratio, None);
    }

    #[test]
    fn membership_flags_non_members() {
        let pts = circle(20, 9);
        let mut good = Poly::<f64>::zero(2);
        good.add_term(Monomial::from_dense(&[2, 0]), 1.0);
        good.add_term(Monomial::from_dense(&[0, 2]), 1.0);
        good.add_term(Monomial::one(), -1.0);
        let mut bad = good.clone();
        bad.add_term(Monomial::from_dense(&[1, 1]), 0.3);
        let rows = membership(&pts, &[good, bad], 1e-9).unwrap();
        assert!(rows[0].passed && rows[0].max_relative < 1e-12);
        assert!(!rows[1].passed && rows[1].max_scaled > 1e-3);
    }
}
