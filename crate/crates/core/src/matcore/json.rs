//! Matrix files: `{"n": 4, "scalar": "rational"|"float", "rows": [[..], ..]}`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

use super::matrix::{kron, Matrix};
use super::scalar::{format_rat, parse_rat, Rat, Scalar, ScalarKind};

/// Absolute tolerance for the symmetry check on float input.
pub const FLOAT_SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Serialize, Deserialize)]
struct MatrixFile {
    n: usize,
    scalar: String,
    rows: Vec<Vec<Value>>,
}

/// A square matrix whose scalar kind is only known at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum DynMatrix {
    Rational(Matrix<Rat>),
    Float(Matrix<f64>),
}

impl DynMatrix {
    pub fn kind(&self) -> ScalarKind {
        match self {
            DynMatrix::Rational(_) => ScalarKind::Rational,
            DynMatrix::Float(_) => ScalarKind::Float,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            DynMatrix::Rational(m) => m.rows(),
            DynMatrix::Float(m) => m.rows(),
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        match self {
            DynMatrix::Rational(m) => m.map(Scalar::to_f64),
            DynMatrix::Float(m) => m.clone(),
        }
    }

    /// Kronecker product; both operands must share a scalar kind.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (DynMatrix::Rational(a), DynMatrix::Rational(b)) => Ok(DynMatrix::Rational(kron(a, b))),
            (DynMatrix::Float(a), DynMatrix::Float(b)) => Ok(DynMatrix::Float(kron(a, b))),
            _ => Err(Error::ScalarKindMismatch {
                left: self.kind().name(),
                right: other.kind().name(),
            }),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            DynMatrix::Rational(m) => matrix_json(m, |v| Value::String(format_rat(v))),
            DynMatrix::Float(m) => matrix_json(m, |v| float_value(*v)),
        }
    }

    /// Parses and validates a matrix document. Non-symmetric input is rejected.
    pub fn from_json(value: &Value) -> Result<Self> {
        let file: MatrixFile = serde_json::from_value(value.clone())?;
        if file.n == 0 || file.rows.len() != file.n || file.rows.iter().any(|r| r.len() != file.n) {
            return Err(Error::DimensionMismatch(format!(
                "declared n = {} but rows do not form an n x n array",
                file.n
            )));
        }
        let out = match file.scalar.as_str() {
            "rational" => {
                let rows = file
                    .rows
                    .iter()
                    .map(|r| r.iter().map(rational_entry).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                DynMatrix::Rational(Matrix::from_rows(rows)?)
            }
            "float" => {
                let rows = file
                    .rows
                    .iter()
                    .map(|r| r.iter().map(float_entry).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                DynMatrix::Float(Matrix::from_rows(rows)?)
            }
            other => return Err(Error::Parse(format!("unknown scalar kind {other:?}"))),
        };
        out.check_symmetric()?;
        Ok(out)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    fn check_symmetric(&self) -> Result<()> {
        let n = self.n();
        let ok = |i: usize, j: usize| match self {
            DynMatrix::Rational(m) => m.get(i, j) == m.get(j, i),
            DynMatrix::Float(m) => (m.get(i, j) - m.get(j, i)).abs() <= FLOAT_SYMMETRY_TOL,
        };
        for i in 0..n {
            for j in 0..i {
                if !ok(i, j) {
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
        Ok(())
    }
}

fn matrix_json<T: Scalar>(m: &Matrix<T>, f: impl Fn(&T) -> Value) -> Value {
    serde_json::json!({
        "n": m.rows(),
        "scalar": T::KIND.name(),
        "rows": m.to_rows().iter().map(|r| r.iter().map(&f).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

/// JSON number for a finite float; non-finite values become `null`.
pub fn float_value(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn float_matrix_json(m: &Matrix<f64>) -> Value {
    DynMatrix::Float(m.clone()).to_json()
}

fn rational_entry(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(n) if n.is_i64() => Ok(Rat::from_i64(n.as_i64().unwrap_or_default())),
        other => Err(Error::Parse(format!("not a rational entry: {other}"))),
    }
}

fn float_entry(v: &Value) -> Result<f64> {
    let x = match v {
        Value::Number(n) => n.as_f64().ok_or(Error::NonFinite)?,
        Value::String(s) => s
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))?,
        Value::Null => return Err(Error::NonFinite),
        other => return Err(Error::Parse(format!("not a float entry: {other}"))),
    };
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(x)
}
