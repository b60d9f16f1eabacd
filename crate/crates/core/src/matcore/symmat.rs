use crate::error::{Error, Result};

use super::matrix::Matrix;
use super::scalar::{Ring, Scalar};

/// Symmetric matrix stored as its upper triangle, row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat<T> {
    n: usize,
    upper: Vec<T>,
}

#[inline]
fn upper_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl<T: Ring> SymMat<T> {
    /// Takes the upper triangle of `m` without checking the lower one.
    pub fn from_upper_of(m: &Matrix<T>) -> Result<Self> {
        if !m.is_square() || m.rows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "expected a nonempty square matrix, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows();
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                upper.push(m.get(i, j).clone());
            }
        }
        Ok(SymMat { n, upper })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.upper[upper_index(self.n, i, j)]
    }

    pub fn to_matrix(&self) -> Matrix<T> {
        Matrix::from_fn(self.n, self.n, |i, j| self.get(i, j).clone())
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn hs_inner(&self, other: &Self) -> Result<T> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.n, other.n)));
        }
        let mut acc = T::zero();
        for i in 0..self.n {
            for j in i..self.n {
                let p = self.get(i, j).clone() * other.get(i, j).clone();
                acc = if i == j { acc + p } else { acc + p.clone() + p };
            }
        }
        Ok(acc)
    }
}

impl<T: Scalar> SymMat<T> {
    /// Checked conversion: the lower triangle must mirror the upper one
    /// (exactly for rationals, within `tol` for floats).
    pub fn from_matrix(m: &Matrix<T>, tol: f64) -> Result<Self> {
        let s = Self::from_upper_of(m)?;
        for i in 0..s.n {
            for j in 0..i {
                if !m.get(i, j).near(m.get(j, i), tol) {
                    return Err(Error::NotSymmetric(format!(
                        "entry ({},{}) differs from ({},{})",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(s)
    }
}

/// Trace of the product, `tr(a·b)`.
pub fn hs_inner<T: Ring>(a: &Matrix<T>, b: &Matrix<T>) -> Result<T> {
    if a.rows() != b.cols() || a.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut acc = T::zero();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            acc = acc + a.get(i, j).clone() * b.get(j, i).clone();
        }
    }
    Ok(acc)
}

/// Number of independent entries of an `n × n` symmetric matrix.
pub fn ambient_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Inverse of [`ambient_dim`], if `m` is triangular.
pub fn side_from_ambient(m: usize) -> Option<usize> {
    let n = ((((8 * m + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
    (ambient_dim(n) == m).then_some(n)
}

/// Coordinate order used for sample points and polynomial variables:
/// the lower triangle read row by row, so `(1,1), (2,1), (2,2), (3,1), …`.
pub fn coord_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(ambient_dim(n));
    for i in 0..n {
        for j in 0..=i {
            out.push((i, j));
        }
    }
    out
}

/// Index of entry `(i, j)` (either order) in [`coord_pairs`] order.
pub fn coord_index(i: usize, j: usize) -> usize {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    i * (i + 1) / 2 + j
}

pub fn to_coords<T: Ring>(m: &Matrix<T>) -> Vec<T> {
    coord_pairs(m.rows())
        .into_iter()
        .map(|(i, j)| m.get(i, j).clone())
        .collect()
}

pub fn from_coords<T: Ring>(coords: &[T]) -> Result<Matrix<T>> {
    let n = side_from_ambient(coords.len()).ok_or_else(|| {
        Error::DimensionMismatch(format!("{} is not a triangular number", coords.len()))
    })?;
    Ok(Matrix::from_fn(n, n, |i, j| coords[coord_index(i, j)].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::scalar::{rat, Rat};

    #[test]
    fn roundtrip_and_symmetry_check() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let s = SymMat::from_matrix(&m, 1e-12).unwrap();
        assert_eq!(s.to_matrix(), m);
        assert_eq!(*s.get(1, 0), 2.0);
        let bad = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.5, 3.0]]).unwrap();
        assert!(matches!(SymMat::from_matrix(&bad, 1e-12), Err(Error::NotSymmetric(_))));
        let exact: Matrix<Rat> =
            Matrix::from_rows(vec![vec![rat(1, 2), rat(1, 3)], vec![rat(1, 3), rat(0, 1)]]).unwrap();
        assert!(SymMat::from_matrix(&exact, 0.0).is_ok());
    }

    #[test]
    fn inner_product_identities() {
        let sx = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let sz = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert_eq!(hs_inner(&sx, &sz).unwrap(), 0.0);
        let m = Matrix::from_rows(vec![vec![2.0, -1.0], vec![-1.0, 5.0]]).unwrap();
        assert_eq!(hs_inner(&Matrix::identity(2), &m).unwrap(), 7.0);
        let f = m.frobenius_norm();
        assert!((hs_inner(&m, &m).unwrap() - f * f).abs() < 1e-12);
        let s = SymMat::from_upper_of(&m).unwrap();
        assert_eq!(s.hs_inner(&s).unwrap(), hs_inner(&m, &m).unwrap());
    }

    #[test]
    fn coordinate_order() {
        assert_eq!(coord_pairs(3), vec![(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)]);
        for (k, (i, j)) in coord_pairs(8).into_iter().enumerate() {
            assert_eq!(coord_index(i, j), k);
            assert_eq!(coord_index(j, i), k);
        }
        let m = Matrix::from_fn(4, 4, |i, j| (i + j) as f64 + (i * j) as f64);
        assert_eq!(from_coords(&to_coords(&m)).unwrap(), m);
        assert_eq!(side_from_ambient(36), Some(8));
        assert_eq!(side_from_ambient(35), None);
    }
}
