//! The row type shared by every verification table.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// An observed or predicted value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Quantity {
    Int(BigInt),
    Rational(BigRational),
    /// A decimal rendering of a high-precision real.
    Real(String),
}

impl Quantity {
    pub fn int(n: impl Into<BigInt>) -> Self {
        Quantity::Int(n.into())
    }

    /// Integers are stored as `Int`, everything else as `Rational`.
    pub fn rational(r: BigRational) -> Self {
        if r.is_integer() {
            Quantity::Int(r.to_integer())
        } else {
            Quantity::Rational(r)
        }
    }

    /// Exact value; decimals are read as the rational they spell out.
    pub fn to_rational(&self) -> BigRational {
        match self {
            Quantity::Int(n) => BigRational::from_integer(n.clone()),
            Quantity::Rational(r) => r.clone(),
            Quantity::Real(s) => parse_decimal(s).unwrap_or_else(BigRational::zero),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Int(n) => write!(f, "{n}"),
            Quantity::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Quantity::Real(s) => write!(f, "{s}"),
        }
    }
}

/// Parses `-12.345` style decimals exactly.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits: String = format!("{int}{frac}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let r = BigRational::new(n, BigInt::from(10).pow(frac.len() as u32));
    Some(if neg { -r } else { r })
}

/// One verified count: `matches` holds exactly when |observed - predicted| <= tolerance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub label: String,
    pub params: BTreeMap<String, String>,
    pub observed: Quantity,
    pub predicted: Quantity,
    #[serde(rename = "match")]
    pub matches: bool,
    pub tolerance: BigRational,
}

impl CountRecord {
    pub fn new(
        label: impl Into<String>,
        params: BTreeMap<String, String>,
        observed: Quantity,
        predicted: Quantity,
        tolerance: BigRational,
    ) -> Self {
        let diff = (observed.to_rational() - predicted.to_rational()).abs();
        CountRecord {
            label: label.into(),
            params,
            matches: diff <= tolerance,
            observed,
            predicted,
            tolerance,
        }
    }

    pub fn exact(label: impl Into<String>, params: BTreeMap<String, String>, observed: Quantity, predicted: Quantity) -> Self {
        Self::new(label, params, observed, predicted, BigRational::zero())
    }

    /// Whether the stored flag agrees with the stored values.
    pub fn is_consistent(&self) -> bool {
        let diff = (self.observed.to_rational() - self.predicted.to_rational()).abs();
        self.matches == (diff <= self.tolerance)
    }
}

/// Builds a parameter map from `(key, value)` pairs.
pub fn params<K: ToString, V: ToString>(pairs: impl IntoIterator<Item = (K, V)>) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn match_semantics() {
        let r = CountRecord::exact("x", params([("q", 2)]), Quantity::int(42), Quantity::int(42));
        assert!(r.matches && r.is_consistent());
        let tol = BigRational::new(1.into(), 1000.into());
        let r = CountRecord::new("y", params([("q", 3)]), Quantity::Real("3.5062".into()), Quantity::Real("3.5061".into()), tol);
        assert!(r.matches);
        assert_eq!(parse_decimal("-0.25"), Some(BigRational::new((-1).into(), 4.into())));
    }
}
