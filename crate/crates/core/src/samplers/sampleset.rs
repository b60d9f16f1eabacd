use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matcore::symmat::{ambient_dim, from_coords, side_from_ambient};
use crate::matcore::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub generator: String,
    pub seed: u64,
    pub count: usize,
    #[serde(default)]
    pub params: Value,
    /// Indices of points that are not (normalisable to) states.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub non_state: Vec<usize>,
}

/// Points of a variety of symmetric matrices, each flattened in
/// [`coord_pairs`](crate::matcore::symmat::coord_pairs) order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub ambient_dim: usize,
    pub meta: SampleMeta,
    pub points: Vec<Vec<f64>>,
}

impl SampleSet {
    pub fn new(side: usize, meta: SampleMeta, points: Vec<Vec<f64>>) -> Result<Self> {
        let set = SampleSet {
            ambient_dim: ambient_dim(side),
            meta,
            points,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        if side_from_ambient(self.ambient_dim).is_none() {
            return Err(Error::DimensionMismatch(format!(
                "ambient dimension {} is not triangular",
                self.ambient_dim
            )));
        }
        for p in &self.points {
            if p.len() != self.ambient_dim {
                return Err(Error::ArityMismatch {
                    expected: self.ambient_dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(())
    }

    /// Side length `n` of the sampled `n × n` matrices.
    pub fn side(&self) -> usize {
        side_from_ambient(self.ambient_dim).unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn matrix(&self, k: usize) -> Matrix<f64> {
        from_coords(&self.points[k]).expect("validated length")
    }

    /// Points that are states, as matrices.
    pub fn states(&self) -> Vec<Matrix<f64>> {
        (0..self.len())
            .filter(|k| !self.meta.non_state.contains(k))
            .map(|k| self.matrix(k))
            .collect()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let set: SampleSet = serde_json::from_str(s)?;
        set.validate()?;
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> SampleMeta {
        SampleMeta {
            generator: "test".into(),
            seed: 1,
            count: 1,
            params: Value::Null,
            non_state: vec![],
        }
    }

    #[test]
    fn roundtrip_and_validation() {
        let set = SampleSet::new(2, meta(), vec![vec![1.0, 0.5, 2.0]]).unwrap();
        assert_eq!(set.side(), 2);
        assert_eq!(*set.matrix(0).get(0, 1), 0.5);
        let back = SampleSet::from_json_str(&set.to_json_string()).unwrap();
        assert_eq!(back, set);
        assert!(SampleSet::new(2, meta(), vec![vec![1.0]]).is_err());
        assert!(SampleSet::from_json_str(r#"{"ambient_dim":4,"meta":{"generator":"x","seed":0,"count":0},"points":[]}"#).is_err());
    }
}
