//! Report assembly: one JSON document per run, all values exact.
//!
//! Decimal approximations are always labeled with a leading "≈" and carry
//! twelve significant digits; everything else is a rational string.

use std::collections::BTreeMap;

use interlace_core::{
    decimal_approx, rational_to_string, QuadraticFieldElement, Rational, RootBracket, UniPoly,
};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "CERTIFIED")]
    Certified,
    #[serde(rename = "SATISFIED")]
    Satisfied,
    #[serde(rename = "HYPOTHESIS_VIOLATED")]
    HypothesisViolated,
    #[serde(rename = "ERROR")]
    Error,
}

/// The single output document. Field order is fixed, map keys are sorted,
/// so identical inputs and flags produce identical bytes.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub args: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_sha256: Option<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results: Option<Value>,
}

impl Report {
    pub fn render(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

pub fn digest_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

pub fn rat_str(r: &Rational) -> String {
    rational_to_string(r)
}

pub fn approx(r: &Rational) -> String {
    format!("≈{}", decimal_approx(r, SIGNIFICANT_DIGITS))
}

/// Coefficient list, constant term first.
pub fn poly_value(p: &UniPoly) -> Value {
    Value::Array(p.coeffs().iter().map(|c| Value::String(rat_str(c))).collect())
}

pub fn bracket_value(lo: &Rational, hi: &Rational) -> Value {
    json!([rat_str(lo), rat_str(hi)])
}

pub fn root_bracket_value(b: &RootBracket) -> Value {
    json!({
        "bracket": bracket_value(&b.lo, &b.hi),
        "decimal": approx(&b.midpoint()),
    })
}

/// Exact a + b sqrt(r) plus its labeled approximation.
pub fn quadratic_value(q: &QuadraticFieldElement) -> Value {
    json!({
        "rational_part": rat_str(q.rational_part()),
        "radical_coeff": rat_str(q.radical_coeff()),
        "radicand": rat_str(q.radicand()),
        "decimal": format!("≈{}", q.approx_decimal(SIGNIFICANT_DIGITS)),
    })
}
