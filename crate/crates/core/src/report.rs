//! Serialization conventions shared by every report: rationals as
//! `{"num", "den"}` objects and reals as decimal strings.

use num_rational::Rational64;
use serde::{Serialize, Serializer};

use crate::utility::Utility;

#[derive(Serialize)]
struct Fraction {
    num: i64,
    den: i64,
}

pub fn ser_rational<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    Fraction {
        num: *r.numer(),
        den: *r.denom(),
    }
    .serialize(s)
}

pub fn ser_real<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_real(*v))
}

pub fn ser_reals<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| format_real(*x)))
}

pub fn ser_utility<S: Serializer>(u: &Utility, s: S) -> Result<S::Ok, S::Error> {
    match u {
        Utility::Exact(r) => ser_rational(r, s),
        Utility::Real(v) => ser_real(v, s),
    }
}

pub fn ser_opt_utility<S: Serializer>(u: &Option<Utility>, s: S) -> Result<S::Ok, S::Error> {
    match u {
        Some(u) => ser_utility(u, s),
        None => s.serialize_none(),
    }
}

/// Shortest decimal string that round-trips to the same `f64`.
pub fn format_real(v: f64) -> String {
    format!("{v:?}")
}

/// Wrapper that serializes a utility with the shared conventions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UtilityValue(pub Utility);

impl Serialize for UtilityValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ser_utility(&self.0, s)
    }
}

/// Wrapper that serializes a rational as `{"num", "den"}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RationalValue(pub Rational64);

impl Serialize for RationalValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ser_rational(&self.0, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_and_reals() {
        let r = serde_json::to_string(&RationalValue(Rational64::new(2, 4))).unwrap();
        assert_eq!(r, r#"{"num":1,"den":2}"#);
        let u = serde_json::to_string(&UtilityValue(Utility::Real(0.1))).unwrap();
        assert_eq!(u, r#""0.1""#);
    }
}
