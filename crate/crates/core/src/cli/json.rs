//! JSON forms of the core types.
//!
//! Matrices are `{"N", "n", "shape", "s11"?, "entries"}` with each entry an
//! ascending list of z-coefficients. Rationals are `"p/q"` strings, complex
//! numbers `[re, im]` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{json, Value};

use crate::algebra::scalar::{parse_rational, rational_to_string};
use crate::algebra::{Field, Mat, Poly, Rational};
use crate::curve::SpectralCurve;
use crate::error::{Error, Result};
use crate::lax::{LaxMatrix, Shape};

/// Scalars with a fixed JSON encoding.
pub trait JsonScalar: Field {
    const BACKEND: Backend;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

fn bad(what: &str, v: &Value) -> Error {
    Error::Serialization(format!("expected {what}, found {v}"))
}

impl JsonScalar for Rational {
    const BACKEND: Backend = Backend::Exact;

    fn to_json(&self) -> Value {
        Value::String(rational_to_string(self))
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap_or_default().into())),
            _ => Err(bad("a \"p/q\" string", v)),
        }
    }
}

impl JsonScalar for Complex64 {
    const BACKEND: Backend = Backend::Float;

    fn to_json(&self) -> Value {
        json!([self.re, self.im])
    }

    fn from_json(v: &Value) -> Result<Self> {
        let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("[re, im]", v))?;
        let part = |x: &Value| x.as_f64().ok_or_else(|| bad("a number", x));
        Ok(Complex64::new(part(&pair[0])?, part(&pair[1])?))
    }
}

pub fn ser_rational<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_to_string(q))
}

/// Serde adapter for bounds that may be infinite: written as `null`, read
/// back as `+inf`.
pub mod unbounded {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

pub fn poly_to_json<F: JsonScalar>(p: &Poly<F>) -> Value {
    Value::Array(p.coeffs().iter().map(JsonScalar::to_json).collect())
}

pub fn poly_from_json<F: JsonScalar>(v: &Value) -> Result<Poly<F>> {
    let items = v.as_array().ok_or_else(|| bad("a coefficient list", v))?;
    Ok(Poly::new(items.iter().map(F::from_json).collect::<Result<_>>()?))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Serialization(format!("missing field {key:?}")))
}

fn usize_field(v: &Value, key: &str) -> Result<usize> {
    let f = field(v, key)?;
    f.as_u64().map(|x| x as usize).ok_or_else(|| bad("a non-negative integer", f))
}

/// Which backend a document was written with, from its first scalar.
pub fn detect_backend(v: &Value) -> Backend {
    fn first_scalar(v: &Value) -> Option<&Value> {
        match v {
            Value::String(_) => Some(v),
            Value::Array(a) if a.len() == 2 && a.iter().all(Value::is_number) => Some(v),
            Value::Array(a) => a.iter().find_map(first_scalar),
            Value::Object(o) => o.values().find_map(first_scalar),
            _ => None,
        }
    }
    match v.get("backend").and_then(Value::as_str) {
        Some("exact") => Backend::Exact,
        Some("float") => Backend::Float,
        _ => match first_scalar(v) {
            Some(Value::String(_)) => Backend::Exact,
            _ => Backend::Float,
        },
    }
}

pub fn lax_to_json<F: JsonScalar>(l: &LaxMatrix<F>) -> Value {
    let entries: Vec<Vec<Value>> =
        (0..l.order()).map(|r| (0..l.order()).map(|c| poly_to_json(l.entry(r, c))).collect()).collect();
    let mut v = json!({
        "N": l.order(),
        "n": l.pole_degree(),
        "shape": l.shape(),
        "backend": F::BACKEND,
        "entries": entries,
    });
    if let Some(s) = l.s11() {
        v["s11"] = s.to_json();
    }
    v
}

pub fn lax_from_json<F: JsonScalar>(v: &Value) -> Result<LaxMatrix<F>> {
    let nn = usize_field(v, "N")?;
    let n = usize_field(v, "n")?;
    let shape: Shape =
        serde_json::from_value(field(v, "shape")?.clone()).map_err(|e| Error::Serialization(e.to_string()))?;
    let rows = field(v, "entries")?.as_array().ok_or_else(|| bad("an entry grid", v))?;
    if rows.len() != nn {
        return Err(Error::DimensionMismatch { expected: nn, got: rows.len() });
    }
    let mut grid = Vec::with_capacity(nn);
    for row in rows {
        let cells = row.as_array().filter(|r| r.len() == nn).ok_or_else(|| bad("a row of N entries", row))?;
        grid.push(cells.iter().map(poly_from_json::<F>).collect::<Result<Vec<_>>>()?);
    }
    let entries = Mat::from_rows(grid);
    let s11 = v.get("s11").map(F::from_json).transpose()?;
    LaxMatrix::from_entries(nn, n, shape, entries, s11)
}

pub fn curve_to_json<F: JsonScalar>(c: &SpectralCurve<F>) -> Value {
    json!({
        "N": c.order(),
        "n": c.pole_degree(),
        "backend": F::BACKEND,
        "t": c.coefficients().iter().map(poly_to_json).collect::<Vec<_>>(),
    })
}

pub fn curve_from_json<F: JsonScalar>(v: &Value) -> Result<SpectralCurve<F>> {
    let t = field(v, "t")?.as_array().ok_or_else(|| bad("a list of t_k", v))?;
    SpectralCurve::new(usize_field(v, "N")?, usize_field(v, "n")?, t.iter().map(poly_from_json).collect::<Result<_>>()?)
}

pub fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn from_value<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Serialization(e.to_string()))
}
