//! Scalar backends and interval-set algebra.
//!
//! Every algorithm in the crate is generic over [`Scalar`]. Two backends are
//! provided:
//!
//! * [`Rational`]: arbitrary-precision rationals. Comparisons are exact and
//!   total; this is the default wherever all inputs are rational.
//! * [`Float`]: binary `f64` values compared with a process-wide tolerance
//!   `eps_cmp` (see [`set_float_tolerance`]): `a == b` iff `|a - b| <= eps_cmp`.

mod interval;

pub use interval::{Interval, IntervalSet};

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact backend.
pub type Rational = BigRational;

/// Numerator and denominator of a reduced rational, cheap to hash.
pub(crate) type RationalKey = (BigInt, BigInt);

/// Default comparison tolerance of the float backend.
pub const DEFAULT_EPS_CMP: f64 = 1e-12;

static EPS_CMP_BITS: AtomicU64 = AtomicU64::new(0x3D71_9799_812D_EA11); // 1e-12

/// Sets the comparison tolerance used by every [`Float`] comparison.
pub fn set_float_tolerance(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidTolerance(eps));
    }
    EPS_CMP_BITS.store(eps.to_bits(), AtomicOrdering::Relaxed);
    Ok(())
}

/// Current comparison tolerance of the float backend.
pub fn float_tolerance() -> f64 {
    f64::from_bits(EPS_CMP_BITS.load(AtomicOrdering::Relaxed))
}

/// A real number in one of the two backends.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` for the rational backend.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact for the rational backend (every finite `f64` is a dyadic rational).
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Parses `p/q`, integers and decimals (`0.05`, `-1.5e-3`). Decimals are
    /// read exactly under the rational backend.
    fn parse(text: &str) -> Result<Self>;
    /// Total order; tolerance-aware for the float backend.
    fn compare(&self, other: &Self) -> Ordering;
    /// Square root when it is representable in the backend (perfect rational
    /// squares only for [`Rational`]); `None` for negative input.
    fn sqrt_exact(&self) -> Option<Self>;
    /// Exact value, when the backend has one.
    fn to_rational(&self) -> Option<Rational>;
    fn from_rational(r: Rational) -> Self;

    /// `a·x + b`.
    fn mul_add(a: &Self, x: &Self, b: &Self) -> Self {
        a.clone() * x.clone() + b.clone()
    }

    fn sum_values(values: impl IntoIterator<Item = Self>) -> Self {
        values.into_iter().fold(Self::zero(), |acc, v| acc + v)
    }

    fn is_zero_value(&self) -> bool {
        self.compare(&Self::zero()) == Ordering::Equal
    }
    fn eq_value(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Equal
    }
    fn lt(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Less
    }
    fn le(&self, other: &Self) -> bool {
        self.compare(other) != Ordering::Greater
    }
    fn gt(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Greater
    }
    fn ge(&self, other: &Self) -> bool {
        self.compare(other) != Ordering::Less
    }
    fn abs(&self) -> Self {
        if self.lt(&Self::zero()) {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn max_of(&self, other: &Self) -> Self {
        if self.ge(other) {
            self.clone()
        } else {
            other.clone()
        }
    }
    fn min_of(&self, other: &Self) -> Self {
        if self.le(other) {
            self.clone()
        } else {
            other.clone()
        }
    }
    fn midpoint(&self, other: &Self) -> Self {
        (self.clone() + other.clone()) / Self::from_ratio(2, 1)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num::One::one()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(num.into(), den.into())
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite float")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn parse(text: &str) -> Result<Self> {
        parse_rational(text)
    }
    fn compare(&self, other: &Self) -> Ordering {
        // Denominators are positive; cross-multiplying beats `Ratio::cmp`.
        if self.denom() == other.denom() {
            return self.numer().cmp(other.numer());
        }
        (self.numer() * other.denom()).cmp(&(other.numer() * self.denom()))
    }
    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer();
        let d = self.denom();
        let rn = n.sqrt();
        let rd = d.sqrt();
        if &(&rn * &rn) == n && &(&rd * &rd) == d {
            Some(BigRational::new(rn, rd))
        } else {
            None
        }
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn from_rational(r: Rational) -> Self {
        r
    }

    /// Reduces once; power-of-two denominators reduce by shifting.
    ///
    /// Every prime shared by the numerator and denominator divides
    /// `a.numer · a.denom · b.denom`, so when that is short the common factor
    /// is stripped with small gcds instead of one over the full operands.
    fn mul_add(a: &Self, x: &Self, b: &Self) -> Self {
        if a.is_zero() {
            return b.clone();
        }
        let ax = a.denom() * x.denom();
        let mut num = a.numer() * x.numer() * b.denom() + b.numer() * &ax;
        let mut den = ax * b.denom();
        if num.is_zero() {
            return <BigRational as Zero>::zero();
        }
        let e = den.bits() - 1;
        if den.trailing_zeros() == Some(e) {
            let t = num.trailing_zeros().unwrap_or(0).min(e);
            return BigRational::new_raw(num >> t, den >> t);
        }
        let m = (a.numer() * a.denom() * b.denom()).abs();
        if 4 * m.bits() >= den.bits() {
            return BigRational::new(num, den);
        }
        loop {
            let t = (&num % &m).gcd(&m).gcd(&(&den % &m));
            if t.is_one() {
                return BigRational::new_raw(num, den);
            }
            num /= &t;
            den /= &t;
        }
    }

    /// Accumulates over a common denominator and reduces once.
    fn sum_values(values: impl IntoIterator<Item = Self>) -> Self {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for v in values {
            let (p, q) = v.into();
            if (&den % &q).is_zero() {
                num += p * (&den / &q);
            } else if (&q % &den).is_zero() {
                num = num * (&q / &den) + p;
                den = q;
            } else {
                let l = den.lcm(&q);
                num = num * (&l / &den) + p * (&l / &q);
                den = l;
            }
        }
        BigRational::new(num, den)
    }
}

fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::ParseScalar(text.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = t[pos + 1..].parse().map_err(|_| bad())?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(&all_digits).map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    if exponent.abs() > 10_000 {
        return Err(bad());
    }
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Float backend value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Float(pub f64);

impl fmt::Display for Float {
    // `f64`'s Display is the shortest representation that round-trips.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! float_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Float {
            type Output = Float;
            fn $method(self, rhs: Float) -> Float {
                Float(self.0 $op rhs.0)
            }
        }
    };
}

float_binop!(Add, add, +);
float_binop!(Sub, sub, -);
float_binop!(Mul, mul, *);
float_binop!(Div, div, /);

impl Neg for Float {
    type Output = Float;
    fn neg(self) -> Float {
        Float(-self.0)
    }
}

impl Scalar for Float {
    const EXACT: bool = false;

    fn zero() -> Self {
        Float(0.0)
    }
    fn one() -> Self {
        Float(1.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Float(num as f64 / den as f64)
    }
    fn from_f64(v: f64) -> Self {
        Float(v)
    }
    fn to_f64(&self) -> f64 {
        self.0
    }
    fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| Error::ParseScalar(text.to_string()))?;
            let q: f64 = q.trim().parse().map_err(|_| Error::ParseScalar(text.to_string()))?;
            if q == 0.0 {
                return Err(Error::ParseScalar(text.to_string()));
            }
            return Ok(Float(p / q));
        }
        t.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Float)
            .ok_or_else(|| Error::ParseScalar(text.to_string()))
    }
    fn compare(&self, other: &Self) -> Ordering {
        if (self.0 - other.0).abs() <= float_tolerance() {
            Ordering::Equal
        } else if self.0 < other.0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
    fn sqrt_exact(&self) -> Option<Self> {
        if self.0 < 0.0 {
            None
        } else {
            Some(Float(self.0.sqrt()))
        }
    }
    fn to_rational(&self) -> Option<Rational> {
        None
    }
    fn from_rational(r: Rational) -> Self {
        Float(ToPrimitive::to_f64(&r).expect("finite"))
    }
}

/// Rounds `v` to the nearest multiple of `2^-bits`, as an exact rational.
pub fn dyadic_round(v: f64, bits: u32) -> Rational {
    let scale = (1u64 << bits) as f64;
    let n = (v * scale).round();
    BigRational::new(BigInt::from(n as i64), BigInt::from(1u64 << bits))
}
