//! Exact rational scalars and vectors, plus their JSON encoding.
//!
//! Rationals are written as `[num, den]` integer pairs. Integers of any
//! size are emitted as plain JSON numbers.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{BaryError, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^-n` as an exact rational.
pub fn pow2_inv(n: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << n)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Huge numerators and denominators overflow the direct conversion.
        let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
        let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (q.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Parses `"3"`, `"-1/4"`, or a decimal such as `"0.125"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((int_part, frac)) = s.split_once('.') {
        if s.contains('/') {
            return Err(BaryError::input(format!("cannot parse rational {s:?}")));
        }
        let neg = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac);
        let num = BigInt::from_str(&digits)
            .map_err(|_| BaryError::input(format!("cannot parse rational {s:?}")))?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(num, den);
        return Ok(if neg { -q } else { q });
    }
    let q = Rational::from_str(s)
        .map_err(|_| BaryError::input(format!("cannot parse rational {s:?}")))?;
    Ok(q)
}

/// Parses a comma separated list of rationals, e.g. `"1/2,1/3,1/6"`.
pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

/// A point of `Q^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(pub Vec<Rational>);

impl RationalVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        RationalVector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        RationalVector(vec![Rational::zero(); dim])
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        RationalVector(coords.iter().map(|&c| int(c)).collect())
    }

    pub fn from_pairs(coords: &[(i64, i64)]) -> Self {
        RationalVector(coords.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        RationalVector(self.0.iter().map(|c| c * s).collect())
    }

    pub fn dot(&self, other: &Self) -> Rational {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * b)
            .fold(Rational::zero(), |acc, t| acc + t)
    }

    pub fn norm_sq(&self) -> Rational {
        self.dot(self)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }

    /// `self + t * dir`
    pub fn add_scaled(&self, t: &Rational, dir: &Self) -> Self {
        RationalVector(self.0.iter().zip(&dir.0).map(|(a, d)| a + t * d).collect())
    }

    pub(crate) fn check_dim(&self, dim: usize, what: &str) -> Result<()> {
        if self.dim() != dim {
            return Err(BaryError::input(format!(
                "{what} has dimension {}, expected {dim}",
                self.dim()
            )));
        }
        Ok(())
    }
}

impl Index<usize> for RationalVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl Add for &RationalVector {
    type Output = RationalVector;
    fn add(self, rhs: Self) -> RationalVector {
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RationalVector {
    type Output = RationalVector;
    fn sub(self, rhs: Self) -> RationalVector {
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl<'a> Mul<&'a Rational> for &'a RationalVector {
    type Output = RationalVector;
    fn mul(self, rhs: &'a Rational) -> RationalVector {
        self.scale(rhs)
    }
}

impl Neg for &RationalVector {
    type Output = RationalVector;
    fn neg(self) -> RationalVector {
        RationalVector(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl FromIterator<Rational> for RationalVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        RationalVector(iter.into_iter().collect())
    }
}

fn bigint_to_number(n: &BigInt) -> serde_json::Number {
    serde_json::Number::from_str(&n.to_string()).expect("integer literal is a valid JSON number")
}

fn number_to_bigint(n: &serde_json::Number) -> Option<BigInt> {
    BigInt::from_str(&n.to_string()).ok()
}

/// `[num, den]` JSON pair for a rational.
pub fn rational_to_json(q: &Rational) -> serde_json::Value {
    serde_json::Value::Array(vec![
        serde_json::Value::Number(bigint_to_number(q.numer())),
        serde_json::Value::Number(bigint_to_number(q.denom())),
    ])
}

pub fn rational_from_json(v: &serde_json::Value) -> Result<Rational> {
    let bad = || BaryError::input(format!("expected [num, den] integer pair, got {v}"));
    match v {
        serde_json::Value::Array(pair) if pair.len() == 2 => {
            let num = match &pair[0] {
                serde_json::Value::Number(n) => number_to_bigint(n).ok_or_else(bad)?,
                _ => return Err(bad()),
            };
            let den = match &pair[1] {
                serde_json::Value::Number(n) => number_to_bigint(n).ok_or_else(bad)?,
                _ => return Err(bad()),
            };
            if den.is_zero() || den.is_negative() {
                return Err(BaryError::input(format!(
                    "denominator must be positive in {v}"
                )));
            }
            Ok(Rational::new(num, den))
        }
        serde_json::Value::Number(n) => {
            Ok(Rational::from_integer(number_to_bigint(n).ok_or_else(bad)?))
        }
        _ => Err(bad()),
    }
}

/// Serde adapter: `Rational` as `[num, den]`.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational_to_json(q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        rational_from_json(&v).map_err(D::Error::custom)
    }
}

/// Serde adapter: `Vec<Rational>` as a list of `[num, den]`.
pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(qs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_json::Value::Array(qs.iter().map(rational_to_json).collect()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter()
            .map(|e| rational_from_json(e).map_err(D::Error::custom))
            .collect()
    }
}

impl Serialize for RationalVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_rational_vec::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for RationalVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        serde_rational_vec::deserialize(d).map(RationalVector)
    }
}
