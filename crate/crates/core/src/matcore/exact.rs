//! Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use super::matrix::Matrix;
use super::scalar::Rat;

/// Reduced row echelon form; returns the matrix and its pivot columns.
pub fn rref(m: &Matrix<Rat>) -> (Matrix<Rat>, Vec<usize>) {
    let mut rows = m.to_rows();
    let ncols = m.cols();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rat::one() / rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let out = if rows.is_empty() {
        Matrix::zeros(0, ncols)
    } else {
        Matrix::from_rows(rows).expect("rows keep their length")
    };
    (out, pivots)
}

pub fn rank(m: &Matrix<Rat>) -> usize {
    rref(m).1.len()
}

/// Rank of a list of sparse rational row vectors given as `(column, value)` pairs.
pub fn sparse_rank(rows: &[Vec<(usize, Rat)>], ncols: usize) -> usize {
    let dense = Matrix::from_fn(rows.len(), ncols, |_, _| Rat::zero());
    let mut dense = dense;
    for (i, row) in rows.iter().enumerate() {
        for (c, v) in row {
            dense.set(i, *c, v.clone());
        }
    }
    rank(&dense)
}
