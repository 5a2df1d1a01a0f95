//! Exact scalar types for edge bounds and path costs.
//!
//! All search and oracle code is generic over [`Scalar`]. The trait is
//! implemented for every `Ratio<I>` over a signed integer type, so the same
//! algorithms run on `Ratio<i64>`, `Ratio<i128>` and `BigRational`.
//! Floating point types are deliberately not `Scalar`: they are not `Ord`,
//! and bound comparisons must be exact.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + Ord
    + Hash
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_u64(value: u64) -> Self;

    /// Parses `"12"`, `"1.5"`, `"2e3"` or `"7/3"` without rounding.
    fn parse_exact(text: &str) -> Option<Self>;

    /// Terminating decimal rendering, or `None` when the denominator has a
    /// prime factor other than 2 and 5.
    fn decimal_text(&self) -> Option<String>;

    /// Lossy conversion used only for reporting.
    fn to_f64(&self) -> f64;
}

impl<I> Scalar for Ratio<I>
where
    I: Integer
        + Signed
        + Clone
        + Hash
        + Debug
        + Display
        + FromStr
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static,
{
    fn from_u64(value: u64) -> Self {
        Ratio::from_integer(I::from_u64(value).expect("integer out of range for scalar type"))
    }

    fn parse_exact(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let num = parse_integer::<I>(num.trim())?;
            let den = parse_integer::<I>(den.trim())?;
            if den.is_zero() {
                return None;
            }
            return Some(Ratio::new(num, den));
        }
        let (mantissa, exponent) = match text.find(['e', 'E']) {
            Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
            None => (text, 0),
        };
        let (negative, mantissa) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let mut value = Ratio::from_integer(parse_integer::<I>(&digits)?);
        let scale = exponent - frac_part.len() as i32;
        let ten = Ratio::from_integer(I::from_u8(10)?);
        for _ in 0..scale.unsigned_abs() {
            value = if scale > 0 { value * ten.clone() } else { value / ten.clone() };
        }
        Some(if negative { -value } else { value })
    }

    fn decimal_text(&self) -> Option<String> {
        let two = I::from_u8(2)?;
        let five = I::from_u8(5)?;
        let ten = I::from_u8(10)?;
        let mut den = self.denom().clone();
        let (mut twos, mut fives) = (0usize, 0usize);
        while den.is_multiple_of(&two) {
            den = den / two.clone();
            twos += 1;
        }
        while den.is_multiple_of(&five) {
            den = den / five.clone();
            fives += 1;
        }
        if !den.is_one() {
            return None;
        }
        let places = twos.max(fives);
        if places == 0 {
            return Some(self.numer().to_string());
        }
        let mut scale = I::one();
        for _ in 0..places {
            scale = scale * ten.clone();
        }
        let scaled = (self.clone() * Ratio::from_integer(scale.clone())).to_integer();
        let sign = if scaled.is_negative() { "-" } else { "" };
        let scaled = scaled.abs();
        let (int_part, frac_part) = scaled.div_rem(&scale);
        let frac = frac_part.to_string();
        Some(format!("{sign}{int_part}.{}{frac}", "0".repeat(places - frac.len())))
    }

    fn to_f64(&self) -> f64 {
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) => n / d,
            _ => f64::NAN,
        }
    }
}

fn parse_integer<I: FromStr>(text: &str) -> Option<I> {
    if text.is_empty() {
        return None;
    }
    text.parse().ok()
}

/// A scalar extended with positive infinity.
///
/// `Finite(_) < Infinite` for every finite value; the derived ordering relies
/// on the variant order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> Extended<T> {
    pub fn zero() -> Self {
        Extended::Finite(T::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn into_finite(self) -> Option<T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Finite(v) => v.to_f64(),
            Extended::Infinite => f64::INFINITY,
        }
    }

    /// Accepts anything [`Scalar::parse_exact`] does, plus `inf`/`∞`.
    pub fn parse(text: &str) -> Option<Self> {
        match text.trim() {
            "inf" | "Inf" | "INF" | "infinity" | "∞" => Some(Extended::Infinite),
            other => T::parse_exact(other).map(Extended::Finite),
        }
    }
}

impl<T: Scalar> From<T> for Extended<T> {
    fn from(value: T) -> Self {
        Extended::Finite(value)
    }
}

impl<T: Scalar> Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => Display::fmt(v, f),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

/// Serializes a scalar as its exact decimal, or `p/q` when it has none.
pub fn serialize_display<T: Scalar, S: serde::Serializer>(value: &T, ser: S) -> Result<S::Ok, S::Error> {
    match value.decimal_text() {
        Some(text) => ser.serialize_str(&text),
        None => ser.collect_str(value),
    }
}

impl<T: Scalar> serde::Serialize for Extended<T> {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => serialize_display(v, ser),
            Extended::Infinite => ser.serialize_str("inf"),
        }
    }
}
