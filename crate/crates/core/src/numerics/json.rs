use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use super::{Field, Mat, C64};
use crate::{Error, Result};

/// Wire form of a matrix: `{"field", "n", "data"}` with row-major entries,
/// bare floats over ℝ and `[re, im]` pairs over ℂ.
#[derive(Clone, Debug, Serialize)]
pub struct MatJson {
    pub field: Field,
    pub n: usize,
    pub data: Vec<Value>,
}

impl From<&Mat> for MatJson {
    fn from(m: &Mat) -> Self {
        let (field, n) = (m.field(), m.n());
        Self {
            field,
            n,
            data: entries_to_json(field, n, |i, j| m.get(i, j)),
        }
    }
}

pub(crate) fn entries_to_json(field: Field, n: usize, get: impl Fn(usize, usize) -> C64) -> Vec<Value> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let z = get(i, j);
            out.push(match field {
                Field::Real => json!(z.re),
                Field::Complex => json!([z.re, z.im]),
            });
        }
    }
    out
}

pub(crate) fn field_of(obj: &Value) -> Result<Field> {
    match obj.get("field") {
        None => Err(Error::Parse("missing field `field`".into())),
        Some(Value::String(s)) if s == "real" => Ok(Field::Real),
        Some(Value::String(s)) if s == "complex" => Ok(Field::Complex),
        Some(other) => Err(Error::Parse(format!(
            "`field` must be \"real\" or \"complex\", got {other}"
        ))),
    }
}

pub(crate) fn n_of(obj: &Value) -> Result<usize> {
    match obj.get("n") {
        None => Err(Error::Parse("missing field `n`".into())),
        Some(v) => v
            .as_u64()
            .filter(|&n| n > 0)
            .map(|n| n as usize)
            .ok_or_else(|| Error::Parse(format!("`n` must be a positive integer, got {v}"))),
    }
}

fn number(v: &Value, ctx: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::Parse(format!("{ctx}: expected a number, got {v}")))
}

/// Parses `side²` row-major entries from the `data` array.
pub(crate) fn entries_from_json(obj: &Value, field: Field, side: usize) -> Result<Vec<C64>> {
    let data = obj
        .get("data")
        .ok_or_else(|| Error::Parse("missing field `data`".into()))?
        .as_array()
        .ok_or_else(|| Error::Parse("`data` must be an array".into()))?;
    if data.len() != side * side {
        return Err(Error::Parse(format!(
            "`data` has {} entries, expected {}",
            data.len(),
            side * side
        )));
    }
    data.iter()
        .enumerate()
        .map(|(idx, v)| {
            let ctx = format!("data[{idx}]");
            match field {
                Field::Real => Ok(C64::new(number(v, &ctx)?, 0.0)),
                Field::Complex => match v.as_array() {
                    Some(pair) if pair.len() == 2 => Ok(C64::new(
                        number(&pair[0], &ctx)?,
                        number(&pair[1], &ctx)?,
                    )),
                    _ => Err(Error::Parse(format!("{ctx}: expected [re, im] pair, got {v}"))),
                },
            }
        })
        .collect()
}

pub(crate) fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!("line {} column {}: {e}", e.line(), e.column()))
    })
}

pub fn mat_from_value(obj: &Value) -> Result<Mat> {
    if !obj.is_object() {
        return Err(Error::Parse("matrix must be a JSON object".into()));
    }
    let field = field_of(obj)?;
    let n = n_of(obj)?;
    let entries = entries_from_json(obj, field, n)?;
    match field {
        Field::Real => {
            let re: Vec<f64> = entries.iter().map(|z| z.re).collect();
            Mat::from_real(n, &re)
        }
        Field::Complex => Mat::from_complex(n, &entries),
    }
}

pub fn parse_mat(text: &str) -> Result<Mat> {
    mat_from_value(&parse_value(text)?)
}

pub fn to_json_string(m: &Mat) -> String {
    serde_json::to_string(&MatJson::from(m)).expect("matrix JSON is always serializable")
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        mat_from_value(&v).map_err(D::Error::custom)
    }
}
