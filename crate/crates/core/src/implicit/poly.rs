use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matcore::json::float_value;
use crate::matcore::scalar::{format_rat, parse_rat};
use crate::matcore::{Rat, Scalar};

/// Sparse monomial: `(variable, power)` pairs sorted by variable, powers positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        Monomial(vec![(i as u32, 1)])
    }

    pub fn from_dense(exps: &[u32]) -> Self {
        Monomial(
            exps.iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| (i as u32, e))
                .collect(),
        )
    }

    /// From `(variable, power)` pairs in any order; repeated variables add up.
    pub fn from_pairs(pairs: &[(usize, u32)]) -> Self {
        let mut map = BTreeMap::new();
        for &(v, e) in pairs {
            *map.entry(v as u32).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn to_dense(&self, n_vars: usize) -> Vec<u32> {
        let mut out = vec![0; n_vars];
        for &(v, e) in &self.0 {
            out[v as usize] = e;
        }
        out
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|&(v, _)| v as usize)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(&(va, ea)), Some(&(vb, eb))) if va == vb => {
                    out.push((va, ea + eb));
                    i += 1;
                    j += 1;
                }
                (Some(&x), Some(&y)) if x.0 < y.0 => {
                    out.push(x);
                    i += 1;
                }
                (Some(_), Some(&y)) => {
                    out.push(y);
                    j += 1;
                }
                (Some(&x), None) => {
                    out.push(x);
                    i += 1;
                }
                (None, Some(&y)) => {
                    out.push(y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Monomial(out)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.0
            .iter()
            .map(|&(v, e)| point[v as usize].powi(e as i32))
            .product()
    }

    pub fn eval_exact(&self, point: &[Rat]) -> Rat {
        self.0.iter().fold(Rat::from_i64(1), |acc, &(v, e)| {
            acc * num_traits::pow(point[v as usize].clone(), e as usize)
        })
    }
}

/// Graded lexicographic order: lower degree first; within a degree, the
/// monomial with the larger power of the earliest differing variable first.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (x, y) in self.0.iter().zip(&other.0) {
                if x.0 != y.0 {
                    // the monomial carrying the smaller variable index is larger in lex
                    return if x.0 < y.0 { Ordering::Less } else { Ordering::Greater };
                }
                if x.1 != y.1 {
                    return y.1.cmp(&x.1);
                }
            }
            self.0.len().cmp(&other.0.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in `n_vars` variables with coefficients in `C`; zero terms are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<C> {
    n_vars: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Scalar> Poly<C> {
    pub fn zero(n_vars: usize) -> Self {
        Poly {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, c: C) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(n_vars: usize, i: usize) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(Monomial::var(i), C::from_i64(1));
        p
    }

    pub fn from_terms(n_vars: usize, terms: impl IntoIterator<Item = (Monomial, C)>) -> Result<Self> {
        let mut p = Self::zero(n_vars);
        for (m, c) in terms {
            if m.max_var().is_some_and(|v| v >= n_vars) {
                return Err(Error::ArityMismatch {
                    expected: n_vars,
                    got: m.max_var().unwrap_or(0) + 1,
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&C> {
        self.terms.get(m)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Terms in decreasing graded-lex order, leading term first.
    pub fn leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_vars != other.n_vars {
            return Err(Error::ArityMismatch {
                expected: self.n_vars,
                got: other.n_vars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.n_vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero(self.n_vars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::constant(self.n_vars, C::from_i64(1));
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Replaces variable `i` by `forms[i]`; all forms share an arity, which
    /// becomes the arity of the result.
    pub fn substitute(&self, forms: &[Poly<C>]) -> Result<Self> {
        if forms.len() != self.n_vars {
            return Err(Error::ArityMismatch {
                expected: self.n_vars,
                got: forms.len(),
            });
        }
        let target = forms.first().map_or(0, Poly::n_vars);
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut t = Self::constant(target, c.clone());
            for &(v, e) in m.pairs() {
                t = t.mul(&forms[v as usize].pow(e)?)?;
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::zero(self.n_vars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn to_f64(&self) -> Poly<f64> {
        self.map_coeffs(Scalar::to_f64)
    }

    fn check_arity(&self, len: usize) -> Result<()> {
        if len != self.n_vars {
            return Err(Error::ArityMismatch {
                expected: self.n_vars,
                got: len,
            });
        }
        Ok(())
    }

    /// Floating-point evaluation.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        self.check_arity(point.len())?;
        Ok(self.terms.iter().map(|(m, c)| c.to_f64() * m.eval_f64(point)).sum())
    }

    /// `Σ |c_t · m_t(point)|`, the scale against which a residual is relative.
    pub fn term_magnitude(&self, point: &[f64]) -> Result<f64> {
        self.check_arity(point.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| (c.to_f64() * m.eval_f64(point)).abs())
            .sum())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.to_f64().abs()))
    }

    /// Renders with variables `z1, z2, …`.
    pub fn display_with(&self, var: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let cf = c.to_f64();
            let neg = cf < 0.0;
            let mag = coefficient_text(c, neg);
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = m
                .pairs()
                .iter()
                .map(|&(v, e)| {
                    if e == 1 {
                        format!("{var}{}", v + 1)
                    } else {
                        format!("{var}{}^{e}", v + 1)
                    }
                })
                .collect();
            match (mag.as_str(), mono.is_empty()) {
                (_, true) => s.push_str(&mag),
                ("1", false) => s.push_str(&mono.join("*")),
                _ => s.push_str(&format!("{mag}*{}", mono.join("*"))),
            }
        }
        s
    }
}

fn coefficient_text<C: Scalar>(c: &C, neg: bool) -> String {
    if neg {
        (-c.clone()).to_text()
    } else {
        c.to_text()
    }
}

impl<C: Scalar> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("z"))
    }
}

impl Poly<Rat> {
    pub fn eval_exact(&self, point: &[Rat]) -> Result<Rat> {
        self.check_arity(point.len())?;
        Ok(self
            .terms
            .iter()
            .fold(Rat::zero(), |acc, (m, c)| acc + c.clone() * m.eval_exact(point)))
    }
}

/// Serialisation of coefficients: rationals as `"p/q"` strings, floats as numbers.
pub trait CoefJson: Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl CoefJson for Rat {
    fn to_json(&self) -> Value {
        Value::String(format_rat(self))
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rat(s),
            Value::Number(n) if n.is_i64() => Ok(Rat::from_i64(n.as_i64().unwrap_or_default())),
            other => Err(Error::Parse(format!("not a rational coefficient: {other}"))),
        }
    }
}

impl CoefJson for f64 {
    fn to_json(&self) -> Value {
        float_value(*self)
    }

    fn from_json(v: &Value) -> Result<Self> {
        v.as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::Parse(format!("not a finite coefficient: {v}")))
    }
}

/// Above this many variables terms are written as sparse `[[var, power], …]`
/// lists under `"sparse"` instead of dense `"exp"` vectors.
pub const DENSE_EXP_LIMIT: usize = 64;

impl<C: CoefJson> Poly<C> {
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                if self.n_vars <= DENSE_EXP_LIMIT {
                    json!({"exp": m.to_dense(self.n_vars), "coef": c.to_json()})
                } else {
                    let sparse: Vec<[u32; 2]> = m.pairs().iter().map(|&(v, e)| [v, e]).collect();
                    json!({"sparse": sparse, "coef": c.to_json()})
                }
            })
            .collect();
        json!({"n_vars": self.n_vars, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n_vars = v["n_vars"]
            .as_u64()
            .ok_or_else(|| Error::Parse("missing n_vars".into()))? as usize;
        let terms = v["terms"]
            .as_array()
            .ok_or_else(|| Error::Parse("missing terms".into()))?;
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            let c = C::from_json(&t["coef"])?;
            let m = if let Some(exp) = t["exp"].as_array() {
                if exp.len() != n_vars {
                    return Err(Error::ArityMismatch {
                        expected: n_vars,
                        got: exp.len(),
                    });
                }
                let dense: Vec<u32> = exp
                    .iter()
                    .map(|e| e.as_u64().map(|e| e as u32).ok_or_else(|| Error::Parse("bad exponent".into())))
                    .collect::<Result<_>>()?;
                Monomial::from_dense(&dense)
            } else if let Some(sp) = t["sparse"].as_array() {
                let pairs: Vec<(usize, u32)> = sp
                    .iter()
                    .map(|p| match (p[0].as_u64(), p[1].as_u64()) {
                        (Some(v), Some(e)) => Ok((v as usize, e as u32)),
                        _ => Err(Error::Parse("bad sparse exponent".into())),
                    })
                    .collect::<Result<_>>()?;
                Monomial::from_pairs(&pairs)
            } else {
                return Err(Error::Parse("term without exp".into()));
            };
            out.push((m, c));
        }
        Self::from_terms(n_vars, out)
    }
}
