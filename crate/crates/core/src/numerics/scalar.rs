//! Scalar backends.
//!
//! Every engine is written once against [`Backend`] and instantiated with
//! either [`Exact`] (reduced big rationals) or [`Float`] (IEEE doubles).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arithmetic shared by the exact and floating-point backends.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Serialize
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_u64(n: u64) -> Self;
    fn from_biguint(n: &BigUint) -> Self;

    /// `num / den`; `den` must be nonzero.
    fn ratio(num: u64, den: u64) -> Self {
        Self::from_u64(num) / Self::from_u64(den)
    }

    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;

    /// `|self - other|` rounded to a double, for discrepancy reports.
    fn abs_diff(&self, other: &Self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Exact,
    Float,
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendKind::Exact => f.write_str("exact"),
            BackendKind::Float => f.write_str("float"),
        }
    }
}

/// A scalar backend. Engines are generic over this trait.
pub trait Backend: Copy + Send + Sync + 'static {
    type Value: Scalar;
    const KIND: BackendKind;

    /// `Π numerators / Π denominators`, with every factor a positive integer.
    ///
    /// Empty lists are empty products. Denominators must be nonzero.
    fn product(numerators: &[u64], denominators: &[u64]) -> Self::Value;
}

/// Reduced big-rational backend.
#[derive(Debug, Clone, Copy, Default)]
pub struct Exact;

/// IEEE-754 double backend.
#[derive(Debug, Clone, Copy, Default)]
pub struct Float;

impl Backend for Exact {
    type Value = ExactScalar;
    const KIND: BackendKind = BackendKind::Exact;

    fn product(numerators: &[u64], denominators: &[u64]) -> ExactScalar {
        let num: BigUint = numerators.iter().map(|&n| BigUint::from(n)).product();
        let den: BigUint = denominators.iter().map(|&d| BigUint::from(d)).product();
        assert!(!den.is_zero(), "zero denominator in product");
        ExactScalar(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
}

impl Backend for Float {
    type Value = FloatScalar;
    const KIND: BackendKind = BackendKind::Float;

    /// Multiplies numerators while the running value is below one and divides
    /// by denominators while it is at or above one, so the partial product
    /// stays within a factor of the largest operand of 1 until one list runs
    /// out. Factorials of 200 and probabilities near 1e-430 never materialize.
    fn product(numerators: &[u64], denominators: &[u64]) -> FloatScalar {
        let (mut n, mut d) = (numerators.iter(), denominators.iter());
        let mut acc = 1.0f64;
        let (mut next_n, mut next_d) = (n.next(), d.next());
        loop {
            match (next_n, next_d) {
                (None, None) => break,
                (Some(&a), Some(&b)) => {
                    if acc >= 1.0 {
                        acc /= b as f64;
                        next_d = d.next();
                    } else {
                        acc *= a as f64;
                        next_n = n.next();
                    }
                }
                (Some(&a), None) => {
                    acc *= a as f64;
                    next_n = n.next();
                }
                (None, Some(&b)) => {
                    acc /= b as f64;
                    next_d = d.next();
                }
            }
        }
        FloatScalar(acc)
    }
}

/// An exact rational, always stored in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactScalar(BigRational);

impl ExactScalar {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        ExactScalar(BigRational::new(num.into(), den.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        ExactScalar(BigRational::from_integer(n.into()))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for ExactScalar {
    fn from(r: BigRational) -> Self {
        ExactScalar(r)
    }
}

impl From<BigUint> for ExactScalar {
    fn from(n: BigUint) -> Self {
        ExactScalar::from_integer(BigInt::from(n))
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactScalar({self})")
    }
}

/// `p/q` in lowest terms, or plain `n` for integers.
impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseExactError(String);

impl FromStr for ExactScalar {
    type Err = ParseExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseExactError(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let num: BigInt = num.parse().map_err(|_| err())?;
        let den: BigInt = den.parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        Ok(ExactScalar::new(num, den))
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($ty:ident, $trait:ident, $method:ident) => {
        impl $trait for $ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                $ty(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(ExactScalar, Add, add);
forward_binop!(ExactScalar, Sub, sub);
forward_binop!(ExactScalar, Mul, mul);
forward_binop!(ExactScalar, Div, div);
forward_binop!(FloatScalar, Add, add);
forward_binop!(FloatScalar, Sub, sub);
forward_binop!(FloatScalar, Mul, mul);
forward_binop!(FloatScalar, Div, div);

impl Scalar for ExactScalar {
    fn zero() -> Self {
        ExactScalar(BigRational::zero())
    }

    fn one() -> Self {
        ExactScalar(BigRational::one())
    }

    fn from_u64(n: u64) -> Self {
        ExactScalar::from_integer(n)
    }

    fn from_biguint(n: &BigUint) -> Self {
        ExactScalar::from_integer(BigInt::from(n.clone()))
    }

    fn ratio(num: u64, den: u64) -> Self {
        ExactScalar::new(num, den)
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn abs_diff(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

/// A double-precision value; prints as the shortest decimal that round-trips.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct FloatScalar(pub f64);

impl FloatScalar {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<f64> for FloatScalar {
    fn from(v: f64) -> Self {
        FloatScalar(v)
    }
}

impl fmt::Display for FloatScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl Serialize for FloatScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.0)
    }
}

impl Scalar for FloatScalar {
    fn zero() -> Self {
        FloatScalar(0.0)
    }

    fn one() -> Self {
        FloatScalar(1.0)
    }

    fn from_u64(n: u64) -> Self {
        FloatScalar(n as f64)
    }

    fn from_biguint(n: &BigUint) -> Self {
        FloatScalar(n.to_f64().unwrap_or(f64::INFINITY))
    }

    fn ratio(num: u64, den: u64) -> Self {
        FloatScalar(num as f64 / den as f64)
    }

    fn to_f64(&self) -> f64 {
        self.0
    }

    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }

    fn abs_diff(&self, other: &Self) -> f64 {
        (self.0 - other.0).abs()
    }
}

/// Either backend's value, for callers that choose the backend at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyScalar {
    Exact(ExactScalar),
    Float(FloatScalar),
}

impl AnyScalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            AnyScalar::Exact(v) => v.to_f64(),
            AnyScalar::Float(v) => v.0,
        }
    }
}

impl PartialOrd for AnyScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (AnyScalar::Exact(a), AnyScalar::Exact(b)) => a.partial_cmp(b),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for AnyScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyScalar::Exact(v) => v.fmt(f),
            AnyScalar::Float(v) => v.fmt(f),
        }
    }
}

impl Serialize for AnyScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            AnyScalar::Exact(v) => v.serialize(serializer),
            AnyScalar::Float(v) => v.serialize(serializer),
        }
    }
}

/// Converts a backend value into [`AnyScalar`].
pub trait IntoAny {
    fn into_any(self) -> AnyScalar;
}

impl IntoAny for ExactScalar {
    fn into_any(self) -> AnyScalar {
        AnyScalar::Exact(self)
    }
}

impl IntoAny for FloatScalar {
    fn into_any(self) -> AnyScalar {
        AnyScalar::Float(self)
    }
}
