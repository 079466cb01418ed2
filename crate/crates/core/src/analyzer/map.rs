use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::isometry::IsometryForm;
use crate::numerics::json::{entries_from_json, entries_to_json, field_of, n_of, parse_value};
use crate::numerics::{singular_values, Field, Mat, Tolerances};
use crate::{Error, Result};

/// A linear map on `𝕄_n` given by its `n² × n²` matrix on column-major
/// vectorizations: `vec(T(X)) = T·vec(X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixLinearMap {
    field: Field,
    n: usize,
    t: Mat,
    pub label: Option<String>,
}

impl MatrixLinearMap {
    pub fn new(field: Field, n: usize, t: Mat) -> Result<Self> {
        if t.n() != n * n {
            return Err(Error::ShapeError(format!(
                "map matrix must be {0}x{0} for n={n}, got {1}x{1}",
                n * n,
                t.n()
            )));
        }
        if t.field() != field {
            return Err(Error::FieldError(format!("map is over {field}, matrix over {}", t.field())));
        }
        t.check_finite()?;
        Ok(Self {
            field,
            n,
            t,
            label: None,
        })
    }

    /// Tabulates `f` on the matrix units.
    pub fn from_fn(field: Field, n: usize, f: impl Fn(&Mat) -> Result<Mat>) -> Result<Self> {
        let mut t = DMatrix::zeros(n * n, n * n);
        for j in 0..n {
            for i in 0..n {
                let img = f(&Mat::unit(field, n, i, j))?;
                if img.n() != n {
                    return Err(Error::ShapeError("map changes the matrix size".into()));
                }
                t.set_column(i + j * n, &img.vec_col_major());
            }
        }
        Self::new(field, n, Mat::new(field, t)?)
    }

    pub fn from_form(form: &IsometryForm) -> Result<Self> {
        let mut m = Self::new(form.field, form.n, form.matrix()?)?;
        m.label = Some(format!("{:?} form", form.exceptional));
        Ok(m)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Mat {
        &self.t
    }

    pub fn apply(&self, x: &Mat) -> Result<Mat> {
        if x.n() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "map acts on {0}x{0}, got {1}x{1}",
                self.n,
                x.n()
            )));
        }
        if x.field() != self.field {
            return Err(Error::FieldError(format!("map acts on {} matrices", self.field)));
        }
        let v = self.t.data() * x.vec_col_major();
        Ok(Mat::from_vec_col_major(self.field, self.n, &v))
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &MatrixLinearMap) -> Result<Self> {
        if self.n != other.n || self.field != other.field {
            return Err(Error::DimensionMismatch("maps act on different spaces".into()));
        }
        Self::new(self.field, self.n, &self.t * &other.t)
    }

    /// `s_min(T) > τ_rank·(1 + s_max(T))`.
    pub fn is_invertible(&self, tol: &Tolerances) -> Result<bool> {
        let s = singular_values(&self.t)?;
        Ok(s[s.len() - 1] > tol.tau_rank * (1.0 + s[0]))
    }

    pub fn inverse(&self, tol: &Tolerances) -> Result<Self> {
        if !self.is_invertible(tol)? {
            return Err(Error::SingularMap);
        }
        let inv = self
            .t
            .data()
            .clone()
            .try_inverse()
            .ok_or(Error::SingularMap)?;
        let mut m = Self::new(self.field, self.n, Mat::new(self.field, inv)?)?;
        m.label = self.label.as_ref().map(|l| format!("inverse of {l}"));
        Ok(m)
    }

    pub fn to_value(&self) -> Value {
        let nn = self.n * self.n;
        let mut v = json!({
            "field": self.field,
            "n": self.n,
            "vec_convention": "column-major",
            "data": entries_to_json(self.field, nn, |i, j| self.t.get(i, j)),
        });
        if let Some(l) = &self.label {
            v["label"] = json!(l);
        }
        v
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_value()).expect("map JSON is always serializable")
    }

    pub fn from_value(obj: &Value) -> Result<Self> {
        if !obj.is_object() {
            return Err(Error::Parse("map must be a JSON object".into()));
        }
        let field = field_of(obj)?;
        let n = n_of(obj)?;
        match obj.get("vec_convention") {
            None => {}
            Some(Value::String(s)) if s == "column-major" => {}
            Some(other) => {
                return Err(Error::Parse(format!(
                    "`vec_convention` must be \"column-major\", got {other}"
                )))
            }
        }
        let nn = n * n;
        let entries = entries_from_json(obj, field, nn)?;
        let t = Mat::new(field, DMatrix::from_row_slice(nn, nn, &entries))?;
        let mut m = Self::new(field, n, t)?;
        m.label = match obj.get("label") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(other) => return Err(Error::Parse(format!("`label` must be a string, got {other}"))),
        };
        Ok(m)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_value(&parse_value(text)?)
    }
}

impl Serialize for MatrixLinearMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixLinearMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        Self::from_value(&v).map_err(serde::de::Error::custom)
    }
}
