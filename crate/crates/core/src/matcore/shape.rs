use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Local dimensions `(d_1, …, d_N)` of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemShape {
    dims: Vec<usize>,
}

impl SubsystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape("no factors".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidShape(format!("local dimension {d} < 2")));
        }
        Ok(SubsystemShape { dims })
    }

    pub fn qubits(n: usize) -> Self {
        SubsystemShape { dims: vec![2; n] }
    }

    /// Shape for an `n`-dimensional space with `factors` factors of equal size.
    pub fn for_dimension(n: usize, factors: usize) -> Result<Self> {
        if factors == 0 {
            return Err(Error::InvalidShape("no factors".into()));
        }
        let d = (n as f64).powf(1.0 / factors as f64).round() as usize;
        let shape = Self::new(vec![d; factors])?;
        shape.check_dim(n)?;
        Ok(shape)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Big-endian strides: factor 0 varies slowest.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.dims[k + 1];
        }
        s
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.total_dim() != n {
            return Err(Error::InvalidShape(format!(
                "shape {:?} has dimension {} but matrix has {}",
                self.dims,
                self.total_dim(),
                n
            )));
        }
        Ok(())
    }

    /// Shape restricted to the listed factors, in the order given.
    pub fn select(&self, factors: &[usize]) -> Result<Self> {
        let dims = factors
            .iter()
            .map(|&f| {
                self.dims
                    .get(f)
                    .copied()
                    .ok_or_else(|| Error::InvalidShape(format!("factor {f} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_factors() {
        assert!(SubsystemShape::new(vec![2, 1]).is_err());
        assert!(SubsystemShape::new(vec![]).is_err());
    }

    #[test]
    fn strides_are_big_endian() {
        let s = SubsystemShape::new(vec![2, 3, 4]).unwrap();
        assert_eq!(s.strides(), vec![12, 4, 1]);
        assert_eq!(s.total_dim(), 24);
    }

    #[test]
    fn infers_equal_factors() {
        assert_eq!(SubsystemShape::for_dimension(8, 3).unwrap(), SubsystemShape::qubits(3));
        assert!(SubsystemShape::for_dimension(8, 2).is_err());
    }
}
