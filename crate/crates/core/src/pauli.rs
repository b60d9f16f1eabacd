//! Pauli words over GF(2), stabiliser groups, their projectors and the
//! simultaneous eigenbasis of a commuting family.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::matcore::exact::rank as exact_rank;
use crate::matcore::{Matrix, Rat};

pub const MAX_QUBITS: usize = 64;

/// Largest qubit count for which dense matrices are built.
pub const MAX_DENSE_QUBITS: usize = 10;

/// `±P_1⊗…⊗P_n`; qubit `j` is bit `j` of `x` and `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliWord {
    n: usize,
    x: u64,
    z: u64,
    negative: bool,
}

fn bits_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliWord {
    pub fn new(n: usize, x: u64, z: u64, negative: bool) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidPauli(format!("qubit count {n} outside 1..=64")));
        }
        if (x | z) & !bits_mask(n) != 0 {
            return Err(Error::InvalidPauli("support beyond the qubit count".into()));
        }
        Ok(PauliWord { n, x, z, negative })
    }

    pub fn identity(n: usize) -> Self {
        PauliWord { n, x: 0, z: 0, negative: false }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn sign(&self) -> i64 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn negated(&self) -> Self {
        PauliWord { negative: !self.negative, ..*self }
    }

    pub fn has_y(&self) -> bool {
        self.x & self.z != 0
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Letter on qubit `j`.
    pub fn letter(&self, j: usize) -> char {
        match ((self.x >> j) & 1, (self.z >> j) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        }
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "Pauli words on {} and {} qubits",
                self.n, other.n
            )));
        }
        Ok(())
    }

    /// Symplectic product `x_p·z_q + z_p·x_q` over GF(2).
    pub fn symplectic(&self, other: &Self) -> Result<bool> {
        self.check_size(other)?;
        Ok(((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 1)
    }

    pub fn commutes(&self, other: &Self) -> Result<bool> {
        Ok(!self.symplectic(other)?)
    }

    /// Phase exponent `k` and masks with `self = i^k X^x Z^z` (per qubit X before Z).
    fn phased(&self) -> (u32, u64, u64) {
        let k = (if self.negative { 2 } else { 0 }) + (self.x & self.z).count_ones();
        (k % 4, self.x, self.z)
    }

    /// Product `self · other` as `i^k · word`, with `word` carrying sign `+1`.
    pub fn product(&self, other: &Self) -> Result<(u32, PauliWord)> {
        self.check_size(other)?;
        let (a, x1, z1) = self.phased();
        let (b, x2, z2) = other.phased();
        let mut k = a + b + 2 * (z1 & x2).count_ones();
        let (x, z) = (x1 ^ x2, z1 ^ z2);
        // back to the letter convention, where each Y absorbs one factor of i
        k = (k + 4 - (x & z).count_ones() % 4) % 4;
        Ok((k, PauliWord { n: self.n, x, z, negative: false }))
    }

    /// Bit mask of the word in big-endian basis-index order.
    fn basis_mask(&self, bits: u64) -> usize {
        let mut m = 0usize;
        for j in 0..self.n {
            if (bits >> j) & 1 == 1 {
                m |= 1 << (self.n - 1 - j);
            }
        }
        m
    }

    /// Dense integer matrix; Y-free words only.
    pub fn to_dense(&self) -> Result<Matrix<i64>> {
        if self.has_y() {
            return Err(Error::YNotSupported);
        }
        if self.n > MAX_DENSE_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "dense realisation limited to {MAX_DENSE_QUBITS} qubits"
            )));
        }
        let dim = 1usize << self.n;
        let bx = self.basis_mask(self.x);
        let bz = self.basis_mask(self.z);
        let mut m = Matrix::zeros(dim, dim);
        for r in 0..dim {
            let s = if (bz & r).count_ones() % 2 == 1 { -1 } else { 1 };
            m.set(r ^ bx, r, s * self.sign());
        }
        Ok(m)
    }

    pub fn to_dense_f64(&self) -> Result<Matrix<f64>> {
        Ok(self.to_dense()?.map(|&v| v as f64))
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            write!(f, "-")?;
        }
        for j in 0..self.n {
            write!(f, "{}", self.letter(j))?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, body) = if let Some(r) = s.strip_prefix('-').or_else(|| s.strip_prefix('\u{2212}')) {
            (true, r)
        } else {
            (false, s.strip_prefix('+').unwrap_or(s))
        };
        let n = body.chars().count();
        if n == 0 {
            return Err(Error::InvalidPauli(format!("empty word {s:?}")));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (j, ch) in body.chars().enumerate() {
            if j >= MAX_QUBITS {
                return Err(Error::InvalidPauli("more than 64 qubits".into()));
            }
            match ch.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= 1 << j,
                'Z' => z |= 1 << j,
                'Y' => {
                    x |= 1 << j;
                    z |= 1 << j;
                }
                other => return Err(Error::InvalidPauli(format!("bad letter {other:?} in {s:?}"))),
            }
        }
        PauliWord::new(n, x, z, negative)
    }
}

impl Serialize for PauliWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Parses one word per line; blank lines and `#` comments are skipped.
pub fn parse_words(text: &str) -> Result<Vec<PauliWord>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::parse)
        .collect()
}

/// `H_i = σ_X` on vertex `i`, `σ_Z` on its neighbours, identity elsewhere.
pub fn graph_hamiltonians(g: &Graph) -> Vec<PauliWord> {
    (0..g.n())
        .map(|i| {
            let z = g.neighbors(i).iter().fold(0u64, |m, &v| m | (1 << v));
            PauliWord { n: g.n(), x: 1 << i, z, negative: false }
        })
        .collect()
}

/// Rank over GF(2) of `(x|z)` rows.
pub fn gf2_rank(words: &[PauliWord]) -> usize {
    let mut rows: Vec<u128> = words
        .iter()
        .map(|w| (w.x as u128) | ((w.z as u128) << 64))
        .collect();
    let mut rank = 0;
    for bit in 0..128 {
        let Some(p) = (rank..rows.len()).find(|&i| (rows[i] >> bit) & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank];
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && (*r >> bit) & 1 == 1 {
                *r ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

/// Independent, pairwise commuting Pauli words generating a group without `−Id`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilizerGroup {
    n: usize,
    gens: Vec<PauliWord>,
}

impl StabilizerGroup {
    pub fn new(n: usize, gens: Vec<PauliWord>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidStabilizer(format!("qubit count {n}")));
        }
        for g in &gens {
            if g.n != n {
                return Err(Error::InvalidStabilizer(format!(
                    "generator {g} has {} qubits, expected {n}",
                    g.n
                )));
            }
        }
        for (i, p) in gens.iter().enumerate() {
            for (j, q) in gens.iter().enumerate().skip(i + 1) {
                if p.symplectic(q)? {
                    return Err(Error::InvalidStabilizer(format!(
                        "generators {} ({p}) and {} ({q}) anticommute",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if gf2_rank(&gens) != gens.len() {
            return Err(Error::InvalidStabilizer("generators are not independent".into()));
        }
        let s = StabilizerGroup { n, gens };
        if s.contains_minus_identity()? {
            return Err(Error::InvalidStabilizer("the group contains -Id".into()));
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> &[PauliWord] {
        &self.gens
    }

    /// Number of stabilised qubits `k = n − #generators`.
    pub fn k(&self) -> usize {
        self.n - self.gens.len()
    }

    /// Enumerates all generator products with phase tracking (up to 20
    /// generators), and for at most 6 Y-free qubits repeats the check with
    /// dense matrices. Larger groups rely on independence: no nonempty product
    /// of independent words has trivial support.
    pub fn contains_minus_identity(&self) -> Result<bool> {
        let m = self.gens.len();
        if m <= 20 {
            for mask in 1u64..(1u64 << m) {
                let mut acc = (0u32, PauliWord::identity(self.n));
                for (i, g) in self.gens.iter().enumerate() {
                    if (mask >> i) & 1 == 1 {
                        let (k, w) = acc.1.product(g)?;
                        acc = ((acc.0 + k) % 4, w);
                    }
                }
                if acc.1.is_identity() && acc.0 == 2 {
                    return Ok(true);
                }
            }
        }
        if self.n <= 6 && m <= 12 && self.gens.iter().all(|g| !g.has_y()) {
            let dim = 1usize << self.n;
            let minus = Matrix::<i64>::identity(dim).scale(&-1);
            let dense: Vec<Matrix<i64>> = self.gens.iter().map(|g| g.to_dense()).collect::<Result<_>>()?;
            for mask in 1u64..(1u64 << m) {
                let mut acc = Matrix::<i64>::identity(dim);
                for (i, d) in dense.iter().enumerate() {
                    if (mask >> i) & 1 == 1 {
                        acc = &acc * d;
                    }
                }
                if acc == minus {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// `2^m · P^x = ∏_j (Id + (−1)^{x_j} p_j)` as an integer matrix.
    fn projector_numerator(&self, x: &[bool]) -> Result<Matrix<i64>> {
        if x.len() != self.gens.len() {
            return Err(Error::DimensionMismatch(format!(
                "syndrome has {} bits for {} generators",
                x.len(),
                self.gens.len()
            )));
        }
        let dim = 1usize << self.n;
        let id = Matrix::<i64>::identity(dim);
        let mut acc = id.clone();
        for (g, &bit) in self.gens.iter().zip(x) {
            let p = g.to_dense()?;
            let f = if bit { &id - &p } else { &id + &p };
            acc = &acc * &f;
        }
        Ok(acc)
    }

    /// Exact projector `P^x = 2^{−m} ∏_j (Id + (−1)^{x_j} p_j)`.
    pub fn projector(&self, x: &[bool]) -> Result<Matrix<Rat>> {
        let num = self.projector_numerator(x)?;
        let denom = Rat::from_integer((1i64 << self.gens.len()).into());
        Ok(num.map(|&v| Rat::from_integer(v.into()) / denom.clone()))
    }

    /// Dimension of the joint `+1` eigenspace, from the exact rank of `P^0`.
    pub fn stab_dimension(&self) -> Result<usize> {
        let zero = vec![false; self.gens.len()];
        Ok(exact_rank(&self.projector(&zero)?))
    }

    /// A word anticommuting with generator `i` and commuting with the others.
    pub fn conjugating_word(&self, i: usize) -> Result<PauliWord> {
        let m = self.gens.len();
        if i >= m {
            return Err(Error::InvalidArgument(format!(
                "generator index {} out of range 1..={m}",
                i + 1
            )));
        }
        // unknown v = (x_v | z_v); row j reads z_{g_j}·x_v + x_{g_j}·z_v
        let n = self.n;
        let mut rows: Vec<(u128, bool)> = self
            .gens
            .iter()
            .enumerate()
            .map(|(j, g)| ((g.z as u128) | ((g.x as u128) << n), j == i))
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for bit in 0..2 * n {
            let Some(p) = (r..rows.len()).find(|&k| (rows[k].0 >> bit) & 1 == 1) else {
                continue;
            };
            rows.swap(r, p);
            let pivot = rows[r];
            for (k, row) in rows.iter_mut().enumerate() {
                if k != r && (row.0 >> bit) & 1 == 1 {
                    row.0 ^= pivot.0;
                    row.1 ^= pivot.1;
                }
            }
            pivots.push(bit);
            r += 1;
        }
        if rows[r..].iter().any(|row| row.1) {
            return Err(Error::InvalidStabilizer(
                "no conjugating word exists; generators are dependent".into(),
            ));
        }
        let mut v: u128 = 0;
        for (row, &bit) in rows.iter().zip(&pivots) {
            if row.1 {
                v |= 1 << bit;
            }
        }
        let mask = bits_mask(n) as u128;
        let word = PauliWord::new(n, (v & mask) as u64, ((v >> n) & mask) as u64, false)?;
        for (j, g) in self.gens.iter().enumerate() {
            if word.symplectic(g)? != (j == i) {
                return Err(Error::InvalidStabilizer("conjugating word check failed".into()));
            }
        }
        Ok(word)
    }
}

/// Random Y-free stabiliser group on `n` qubits with `m ≤ n` generators,
/// built by rejection: each new signed word must commute with the previous
/// ones and raise the GF(2) rank.
pub fn random_stabilizer(rng: &mut impl Rng, n: usize, m: usize) -> Result<StabilizerGroup> {
    if n == 0 || n > MAX_QUBITS || m > n {
        return Err(Error::InvalidArgument(format!("cannot draw {m} generators on {n} qubits")));
    }
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut gens: Vec<PauliWord> = Vec::with_capacity(m);
    let mut attempts = 0usize;
    while gens.len() < m {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::DegenerateSample("no admissible generator found".into()));
        }
        let x = rng.gen::<u64>() & mask;
        // Y-free: a qubit carries X or Z, never both
        let z = rng.gen::<u64>() & mask & !x;
        let w = PauliWord::new(n, x, z, rng.gen())?;
        if w.is_identity() || gens.iter().any(|g| !w.commutes(g).unwrap_or(false)) {
            continue;
        }
        gens.push(w);
        if gf2_rank(&gens) < gens.len() {
            gens.pop();
        }
    }
    StabilizerGroup::new(n, gens)
}

/// Simultaneous integer eigenbasis of `n` commuting generators on `n` qubits.
///
/// Column `c` of `o` spans the image of `P^x` where `x` is the big-endian
/// binary expansion of `c`; `a[i][c] = (−1)^{x_i}` is the eigenvalue of
/// generator `i` on it and `weights[c] = ‖o_c‖²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToricModel {
    pub n: usize,
    pub a: Vec<Vec<i64>>,
    pub o: Vec<Vec<i64>>,
    pub weights: Vec<i64>,
    pub gens: Vec<PauliWord>,
}

impl ToricModel {
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn o_matrix(&self) -> Matrix<i64> {
        Matrix::from_rows(self.o.clone()).expect("square basis")
    }

    pub fn column(&self, c: usize) -> Vec<i64> {
        self.o.iter().map(|row| row[c]).collect()
    }

    /// Whether `O` has `±1` entries, so that `O·Oᵀ = 2^n·Id`.
    pub fn is_sign_basis(&self) -> bool {
        self.o.iter().flatten().all(|&v| v == 1 || v == -1)
    }

    pub fn hamiltonians_f64(&self) -> Result<Vec<Matrix<f64>>> {
        self.gens.iter().map(PauliWord::to_dense_f64).collect()
    }

    /// Exact check of `Oᵀ H_i O = diag(a_i ⊙ w)` and `Oᵀ O = diag(w)`.
    pub fn verify(&self) -> Result<()> {
        let o = self.o_matrix();
        let ot = o.transpose();
        let gram = &ot * &o;
        if gram != Matrix::diag(&self.weights) {
            return Err(Error::InvalidStabilizer("eigenbasis is not orthogonal".into()));
        }
        for (i, g) in self.gens.iter().enumerate() {
            let d = &(&ot * &g.to_dense()?) * &o;
            let want: Vec<i64> = self.a[i].iter().zip(&self.weights).map(|(a, w)| a * w).collect();
            if d != Matrix::diag(&want) {
                return Err(Error::InvalidStabilizer(format!(
                    "generator {} is not diagonalised",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

pub fn simultaneous_diag(gens: &[PauliWord]) -> Result<ToricModel> {
    let n = gens
        .first()
        .map(PauliWord::n)
        .ok_or_else(|| Error::InvalidStabilizer("no generators".into()))?;
    if gens.iter().any(PauliWord::has_y) {
        return Err(Error::YNotSupported);
    }
    let group = StabilizerGroup::new(n, gens.to_vec())?;
    if gens.len() != n {
        return Err(Error::InvalidStabilizer(format!(
            "simultaneous diagonalisation needs {n} generators, got {}",
            gens.len()
        )));
    }
    if n > MAX_DENSE_QUBITS {
        return Err(Error::InvalidArgument(format!("at most {MAX_DENSE_QUBITS} qubits")));
    }
    let dim = 1usize << n;
    let mut cols = Vec::with_capacity(dim);
    let mut a = vec![vec![0i64; dim]; n];
    for c in 0..dim {
        let x: Vec<bool> = (0..n).map(|i| (c >> (n - 1 - i)) & 1 == 1).collect();
        let p = group.projector_numerator(&x)?;
        let j = (0..dim)
            .find(|&j| (0..dim).any(|r| *p.get(r, j) != 0))
            .ok_or_else(|| Error::InvalidStabilizer(format!("projector {c} vanishes")))?;
        let col = p.column(j);
        let g = col.iter().fold(0i64, |g, v| g.gcd(v));
        cols.push(col.iter().map(|v| v / g).collect::<Vec<_>>());
        for (i, bit) in x.iter().enumerate() {
            a[i][c] = if *bit { -1 } else { 1 };
        }
    }
    let o: Vec<Vec<i64>> = (0..dim).map(|r| cols.iter().map(|col| col[r]).collect()).collect();
    let weights = cols.iter().map(|col| col.iter().map(|v| v * v).sum()).collect();
    let model = ToricModel {
        n,
        a,
        o,
        weights,
        gens: gens.to_vec(),
    };
    model.verify()?;
    Ok(model)
}
