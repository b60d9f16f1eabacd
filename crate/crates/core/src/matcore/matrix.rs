use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

use super::scalar::Ring;
use super::shape::SubsystemShape;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn diag(values: &[T]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = v.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> T {
        let n = self.rows.min(self.cols);
        (0..n).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get_mut(i, j);
                    *cur = cur.clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    /// `self · other − other · self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.try_sub(&other.matmul(self)?)
    }

    pub fn is_symmetric_exact(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(T::is_zero)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }
}

impl Matrix<f64> {
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Symmetrised copy `(M + Mᵀ)/2`.
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self.get(i, j) + self.get(j, i))
        })
    }

    /// Frobenius distance.
    pub fn distance(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Dense product with a cache-friendlier loop than the generic path.
    pub fn dot(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            let orow = &mut out[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Matrix {
            rows: self.rows,
            cols: other.cols,
            data: out,
        }
    }
}

impl<T: Ring> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_add(rhs).expect("matrix addition dimension mismatch")
    }
}

impl<T: Ring> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_sub(rhs).expect("matrix subtraction dimension mismatch")
    }
}

impl<T: Ring> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.matmul(rhs).expect("matrix product dimension mismatch")
    }
}

/// Kronecker product; factor `a` is the slow (big-endian) index.
pub fn kron<T: Ring>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (ar, ac, br, bc) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = Matrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    let y = b.get(k, l);
                    if y.is_zero() {
                        continue;
                    }
                    out.set(i * br + k, j * bc + l, x.clone() * y.clone());
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, the first being slowest-varying.
pub fn kron_all<T: Ring>(factors: &[Matrix<T>]) -> Matrix<T> {
    factors
        .iter()
        .fold(Matrix::identity(1), |acc, f| kron(&acc, f))
}

/// Flat offsets of every multi-index over `factors`, enumerated big-endian.
fn offsets(shape: &SubsystemShape, factors: &[usize]) -> Vec<usize> {
    let strides = shape.strides();
    let mut out = vec![0usize];
    for &f in factors {
        let d = shape.dims()[f];
        let mut next = Vec::with_capacity(out.len() * d);
        for &base in &out {
            for digit in 0..d {
                next.push(base + digit * strides[f]);
            }
        }
        out = next;
    }
    out
}

/// Partial trace keeping the listed factors (in ascending factor order).
pub fn partial_trace<T: Ring>(
    m: &Matrix<T>,
    shape: &SubsystemShape,
    keep: &[usize],
) -> Result<Matrix<T>> {
    if !m.is_square() || m.rows() != shape.total_dim() {
        return Err(Error::InvalidShape(format!(
            "matrix is {}x{} but shape {:?} has dimension {}",
            m.rows(),
            m.cols(),
            shape.dims(),
            shape.total_dim()
        )));
    }
    if keep.is_empty() {
        return Err(Error::InvalidShape("keep set is empty".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&k| k >= shape.len()) {
        return Err(Error::InvalidShape(format!("invalid keep set {keep:?}")));
    }
    let traced: Vec<usize> = (0..shape.len()).filter(|f| !kept.contains(f)).collect();
    let kept_off = offsets(shape, &kept);
    let traced_off = offsets(shape, &traced);
    let d = kept_off.len();
    let mut out = Matrix::zeros(d, d);
    for (r, &ro) in kept_off.iter().enumerate() {
        for (c, &co) in kept_off.iter().enumerate() {
            let mut acc = T::zero();
            for &t in &traced_off {
                acc = acc + m.get(ro + t, co + t).clone();
            }
            out.set(r, c, acc);
        }
    }
    Ok(out)
}

/// Reorders tensor factors: factor `j` of the output is factor `perm[j]` of the input.
pub fn permute_factors<T: Ring>(
    m: &Matrix<T>,
    shape: &SubsystemShape,
    perm: &[usize],
) -> Result<Matrix<T>> {
    if m.rows() != shape.total_dim() || !m.is_square() {
        return Err(Error::InvalidShape("matrix does not match shape".into()));
    }
    let mut check = perm.to_vec();
    check.sort_unstable();
    if check != (0..shape.len()).collect::<Vec<_>>() {
        return Err(Error::InvalidShape(format!("{perm:?} is not a permutation")));
    }
    // offsets(shape, perm) enumerates input indices in output (big-endian over perm) order
    let idx = offsets(shape, perm);
    let n = idx.len();
    Ok(Matrix::from_fn(n, n, |i, j| m.get(idx[i], idx[j]).clone()))
}

/// Embeds an operator acting on `factors` (ascending) into the full space,
/// acting as identity on the remaining factors.
pub fn embed<T: Ring>(op: &Matrix<T>, shape: &SubsystemShape, factors: &[usize]) -> Result<Matrix<T>> {
    let mut sorted = factors.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.as_slice() != factors || factors.iter().any(|&f| f >= shape.len()) {
        return Err(Error::InvalidShape(format!(
            "factor list {factors:?} must be ascending and within the shape"
        )));
    }
    let sub_dim: usize = factors.iter().map(|&f| shape.dims()[f]).product();
    if op.rows() != sub_dim || !op.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{} but factors {factors:?} span dimension {sub_dim}",
            op.rows(),
            op.cols()
        )));
    }
    let rest: Vec<usize> = (0..shape.len()).filter(|f| !factors.contains(f)).collect();
    let op_off = offsets(shape, factors);
    let rest_off = offsets(shape, &rest);
    let n = shape.total_dim();
    let mut out = Matrix::zeros(n, n);
    for &r in &rest_off {
        for (i, &oi) in op_off.iter().enumerate() {
            for (j, &oj) in op_off.iter().enumerate() {
                let v = op.get(i, j);
                if !v.is_zero() {
                    out.set(r + oi, r + oj, v.clone());
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::scalar::{rat, rat_int, Rat};

    fn sx() -> Matrix<i64> {
        Matrix::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap()
    }
    fn sz() -> Matrix<i64> {
        Matrix::from_rows(vec![vec![1, 0], vec![0, -1]]).unwrap()
    }

    #[test]
    fn kron_identity() {
        let i2 = Matrix::<i64>::identity(2);
        assert_eq!(kron(&i2, &i2), Matrix::identity(4));
    }

    #[test]
    fn kron_sigma_x_sigma_z() {
        let k = kron(&sx(), &sz());
        // 1-based (1,3)=1, (2,4)=-1, (3,1)=1, (4,2)=-1
        assert_eq!(*k.get(0, 2), 1);
        assert_eq!(*k.get(1, 3), -1);
        assert_eq!(*k.get(2, 0), 1);
        assert_eq!(*k.get(3, 1), -1);
        let nonzero = k.data().iter().filter(|v| **v != 0).count();
        assert_eq!(nonzero, 4);
    }

    #[test]
    fn kron_diagonal() {
        let a = Matrix::diag(&[rat_int(2), rat_int(3)]);
        let b = Matrix::diag(&[rat(1, 2), rat_int(5)]);
        let expect = Matrix::diag(&[rat_int(1), rat_int(10), rat(3, 2), rat_int(15)]);
        assert_eq!(kron(&a, &b), expect);
    }

    #[test]
    fn partial_trace_of_product() {
        let a: Matrix<Rat> = Matrix::from_rows(vec![
            vec![rat(1, 3), rat(1, 5)],
            vec![rat(1, 5), rat(2, 3)],
        ])
        .unwrap();
        let b: Matrix<Rat> = Matrix::from_rows(vec![
            vec![rat(3, 4), rat(-1, 7)],
            vec![rat(-1, 7), rat(1, 4)],
        ])
        .unwrap();
        let c = Matrix::diag(&[rat(1, 2), rat(1, 2)]);
        let abc = kron_all(&[a.clone(), b.clone(), c.clone()]);
        let shape = SubsystemShape::qubits(3);
        assert_eq!(partial_trace(&abc, &shape, &[0]).unwrap(), a);
        assert_eq!(partial_trace(&abc, &shape, &[1]).unwrap(), b);
        assert_eq!(partial_trace(&abc, &shape, &[0, 2]).unwrap(), kron(&a, &c));
    }

    #[test]
    fn partial_trace_rejects_bad_shape() {
        let m = Matrix::<i64>::identity(8);
        let shape = SubsystemShape::qubits(2);
        assert!(partial_trace(&m, &shape, &[0]).is_err());
        let shape = SubsystemShape::qubits(3);
        assert!(partial_trace(&m, &shape, &[]).is_err());
        assert!(partial_trace(&m, &shape, &[3]).is_err());
    }

    #[test]
    fn permute_swaps_kron_order() {
        let shape = SubsystemShape::qubits(2);
        let ab = kron(&sx(), &sz());
        let ba = kron(&sz(), &sx());
        assert_eq!(permute_factors(&ab, &shape, &[1, 0]).unwrap(), ba);
    }

    #[test]
    fn embed_matches_kron() {
        let shape = SubsystemShape::qubits(3);
        let i2 = Matrix::<i64>::identity(2);
        let e = embed(&kron(&sx(), &sz()), &shape, &[0, 2]).unwrap();
        assert_eq!(e, kron_all(&[sx(), i2.clone(), sz()]));
        let e = embed(&sz(), &shape, &[1]).unwrap();
        assert_eq!(e, kron_all(&[i2.clone(), sz(), i2]));
    }

    #[test]
    fn mismatched_product_errors() {
        let a = Matrix::<i64>::zeros(2, 3);
        assert!(a.matmul(&a).is_err());
    }
}
