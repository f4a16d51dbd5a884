//! JSON conversions: complex scalars are `[re, im]`, points are arrays of
//! complex scalars, matrices are row-major arrays of rows.

use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde_json::{Map, Number, Value};

use hyperkos::{HermitianMatrix, PointConfig, Tolerance, C64};

pub const SCHEMA: &str = "1";

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Core(hyperkos::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_disagreement() => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) if e.is_disagreement() => "disagreement",
            CliError::Core(hyperkos::Error::Coherence(_)) => "coherence",
            _ => "invalid_input",
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<hyperkos::Error> for CliError {
    fn from(e: hyperkos::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

/// 17 significant digits; non-finite values become null.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    // adding zero turns -0 into 0
    Number::from_str(&format!("{:.16e}", x + 0.0)).map(Value::Number).unwrap_or(Value::Null)
}

pub fn complex(z: C64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

pub fn real_vec(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

pub fn real_matrix(m: &DMatrix<f64>) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| num(m[(i, j)])).collect())).collect())
}

pub fn complex_matrix(m: &DMatrix<C64>) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| complex(m[(i, j)])).collect())).collect())
}

pub fn points(x: &PointConfig) -> Value {
    Value::Array(x.points().iter().map(|p| Value::Array(p.coords().iter().map(|&z| complex(z)).collect())).collect())
}

pub fn field<'a>(v: &'a Value, key: &str) -> CliResult<&'a Value> {
    v.get(key).ok_or_else(|| invalid(format!("missing field \"{key}\"")))
}

pub fn to_f64(v: &Value) -> CliResult<f64> {
    v.as_f64().ok_or_else(|| invalid(format!("expected a number, found {v}")))
}

pub fn get_f64(v: &Value, key: &str) -> CliResult<f64> {
    to_f64(field(v, key)?)
}

/// `[re, im]`, or a plain number for a real value.
pub fn to_complex(v: &Value) -> CliResult<C64> {
    if let Some(x) = v.as_f64() {
        return Ok(C64::new(x, 0.0));
    }
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => Ok(C64::new(to_f64(re)?, to_f64(im)?)),
        _ => Err(invalid(format!("expected a complex scalar [re, im], found {v}"))),
    }
}

pub fn get_complex(v: &Value, key: &str) -> CliResult<C64> {
    to_complex(field(v, key)?)
}

pub fn array<'a>(v: &'a Value, what: &str) -> CliResult<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| invalid(format!("{what} must be an array")))
}

pub fn to_real_vec(v: &Value) -> CliResult<Vec<f64>> {
    array(v, "vector")?.iter().map(to_f64).collect()
}

pub fn to_triple(v: &Value) -> CliResult<[f64; 3]> {
    let a = to_real_vec(v)?;
    a.try_into().map_err(|_| invalid("expected three numbers"))
}

pub fn to_matrix(v: &Value) -> CliResult<DMatrix<C64>> {
    let rows = array(v, "matrix")?;
    let n = rows.len();
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let row = array(row, "matrix row")?;
        if row.len() != n {
            return Err(invalid("matrix must be square"));
        }
        for (j, e) in row.iter().enumerate() {
            m[(i, j)] = to_complex(e)?;
        }
    }
    Ok(m)
}

pub fn to_hermitian(v: &Value, tol: &Tolerance) -> CliResult<HermitianMatrix> {
    Ok(HermitianMatrix::new(to_matrix(v)?, tol)?)
}

pub fn to_points(v: &Value, tol: &Tolerance) -> CliResult<PointConfig> {
    let rows = array(v, "points")?;
    let coords = rows
        .iter()
        .map(|p| array(p, "point")?.iter().map(to_complex).collect::<CliResult<Vec<C64>>>())
        .collect::<CliResult<Vec<_>>>()?;
    Ok(PointConfig::from_coords(&coords, tol)?)
}

pub fn to_dvector(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

/// Object builder that stamps the schema version.
pub fn doc(pairs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), Value::String(SCHEMA.into()));
    for (k, v) in pairs {
        m.insert(k.into(), v);
    }
    Value::Object(m)
}

pub fn obj(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

pub fn error_doc(e: &CliError) -> Value {
    doc(vec![(
        "error",
        obj(vec![("kind", Value::String(e.kind().into())), ("message", Value::String(e.to_string()))]),
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_carry_seventeen_digits() {
        assert_eq!(num(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(num(1.0 / 3.0).as_f64().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(to_complex(&serde_json::json!([1.0, -2.0])).unwrap(), C64::new(1.0, -2.0));
        assert_eq!(to_complex(&serde_json::json!(0.5)).unwrap(), C64::new(0.5, 0.0));
        assert!(to_complex(&serde_json::json!([1.0])).is_err());
    }
}
