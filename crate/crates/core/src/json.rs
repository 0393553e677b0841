//! Serde glue for arbitrary-precision integers.
//!
//! Matrix and vector entries are serialized as plain JSON numbers; the
//! `arbitrary_precision` feature of serde_json keeps them exact beyond the
//! i64/f64 range.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntMat;

/// A JSON integer of unbounded size.
#[derive(Clone, Debug, PartialEq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = serde_json::Number::from_string_unchecked(self.0.to_string());
        n.serialize(s)
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let n = serde_json::Number::deserialize(d)?;
        let s = n.to_string();
        let v: BigInt = s
            .parse()
            .map_err(|_| serde::de::Error::custom(format!("expected an integer, got {}", s)))?;
        Ok(JsonInt(v))
    }
}

pub fn mat_to_repr(m: &IntMat) -> Vec<Vec<JsonInt>> {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(JsonInt).collect())
        .collect()
}

pub fn mat_from_repr(rows: Vec<Vec<JsonInt>>) -> Result<IntMat> {
    IntMat::from_bigint_rows(rows.into_iter().map(|r| r.into_iter().map(|x| x.0).collect()).collect())
}

pub fn vec_to_repr(v: &[BigInt]) -> Vec<JsonInt> {
    v.iter().cloned().map(JsonInt).collect()
}

pub fn vec_from_repr(v: Vec<JsonInt>) -> Vec<BigInt> {
    v.into_iter().map(|x| x.0).collect()
}

/// Parse a JSON array of integers.
pub fn parse_int_vec(s: &str) -> Result<Vec<BigInt>> {
    let v: Vec<JsonInt> = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
    Ok(vec_from_repr(v))
}
