//! Scalar abstraction and extended nonnegative reals.
//!
//! [`ExtNonneg`] is the value type of every criterion formula. Its
//! arithmetic is total on `[0, +inf]`:
//!
//! * `0 * inf = 0`
//! * `inf / inf = 0` and `0 / 0 = 0`
//! * `x / 0 = inf` for `x > 0`
//! * `0^0 = inf^0 = 1`
//!
//! so no operation ever produces NaN.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul};

use num_traits::{Float, FromPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Floating point types the numerical core can run on.
pub trait Scalar: Float + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// A value in `[0, +inf]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExtNonneg<T: Scalar = f64>(T);

impl<T: Scalar> ExtNonneg<T> {
    pub fn zero() -> Self {
        Self(T::zero())
    }

    pub fn one() -> Self {
        Self(T::one())
    }

    pub fn infinity() -> Self {
        Self(T::infinity())
    }

    /// Builds a value from a raw scalar. Negative inputs and NaN clamp to 0;
    /// `-0.0` becomes `0.0`.
    pub fn new(x: T) -> Self {
        if x.is_nan() || x <= T::zero() {
            Self(T::zero())
        } else {
            Self(x)
        }
    }

    pub fn get(self) -> T {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_zero(self) -> bool {
        self.0 == T::zero()
    }

    pub fn max(self, other: Self) -> Self {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }

    pub fn powf(self, a: T) -> Self {
        let z = T::zero();
        if a == z {
            return Self::one();
        }
        if self.0 == z {
            return if a > z { Self::zero() } else { Self::infinity() };
        }
        if self.0.is_infinite() {
            return if a > z { Self::infinity() } else { Self::zero() };
        }
        Self::new(self.0.powf(a))
    }

    pub fn recip(self) -> Self {
        Self::one() / self
    }
}

impl<T: Scalar> Add for ExtNonneg<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl<T: Scalar> Mul for ExtNonneg<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            Self::zero()
        } else {
            Self(self.0 * rhs.0)
        }
    }
}

impl<T: Scalar> Div for ExtNonneg<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        if self.is_infinite() && rhs.is_infinite() {
            return Self::zero();
        }
        if rhs.is_zero() {
            return Self::infinity();
        }
        Self::new(self.0 / rhs.0)
    }
}

impl<T: Scalar> Sum for ExtNonneg<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl<T: Scalar> PartialEq for ExtNonneg<T> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl<T: Scalar> Eq for ExtNonneg<T> {}

impl<T: Scalar> PartialOrd for ExtNonneg<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for ExtNonneg<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // values are never NaN
        self.0.partial_cmp(&other.0).unwrap_or(Ordering::Equal)
    }
}

impl<T: Scalar> fmt::Display for ExtNonneg<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl From<f64> for ExtNonneg<f64> {
    fn from(x: f64) -> Self {
        Self::new(x)
    }
}

impl Serialize for ExtNonneg<f64> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtNonneg<f64> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(Self::new(x)),
            Repr::Str(s) if s == "inf" => Ok(Self::infinity()),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("bad extended value {s:?}"))),
        }
    }
}
