//! Exact rational arithmetic and the round-to-nearest model.
//!
//! [`Rational`] is a normalized big-integer fraction. It is the reference
//! number type: every quantity handled by this crate (bound coefficients,
//! `t = i·D/A`, the bounds themselves) is rational, so floor and ceil of
//! exact values are always computable.
//!
//! [`round_to_format`] maps a rational onto the set
//! `F = {0} ∪ {M·β^e : β^(p-1) <= |M| < β^p}` with an unbounded exponent,
//! choosing the nearest element and breaking ties toward an even
//! significand.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::float_model::FloatFormat;
use crate::{Error, Result};

/// Exact fraction with a positive denominator, always in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        // Ratio::new reduces and moves the sign onto the numerator.
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    /// `base^exp` for any integer exponent. `base` must be nonzero when
    /// `exp < 0`.
    pub fn pow_int(base: &BigInt, exp: i64) -> Self {
        let magnitude = base.pow(exp.unsigned_abs() as u32);
        if exp >= 0 {
            Rational::from_integer(magnitude)
        } else {
            Rational(BigRational::new(BigInt::one(), magnitude))
        }
    }

    /// Largest integer `<= self`.
    pub fn floor(&self) -> BigInt {
        self.0.numer().div_floor(self.0.denom())
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> BigInt {
        -((-self.0.numer()).div_floor(self.0.denom()))
    }

    /// `floor(self + 1/2)`.
    pub fn round_half_up(&self) -> BigInt {
        let two = BigInt::from(2);
        (self.0.numer() * &two + self.0.denom()).div_floor(&(self.0.denom() * two))
    }

    /// Nearest `f64`, for display only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact conversion of a value whose numerator and denominator are
    /// small enough and whose denominator is a power of two no larger than
    /// 2^1074; returns `None` otherwise.
    pub fn to_f64_exact(&self) -> Option<f64> {
        let den = self.0.denom();
        if den.sign() != Sign::Plus || (den & (den - BigInt::one())) != BigInt::zero() {
            return None;
        }
        let shift = den.bits() - 1;
        let num = self.0.numer().to_i64()?;
        if num.unsigned_abs() >= 1 << 53 || shift > 1074 {
            return None;
        }
        let mut value = num as f64;
        // Split the scaling so each factor stays a normal power of two.
        let mut remaining = shift as i32;
        while remaining > 0 {
            let step = remaining.min(1000);
            value *= 2f64.powi(-step);
            remaining -= step;
        }
        Some(value)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rational({})", self)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational($trait::$method(self.0, &rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(&self.0, rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
// Panics on a zero divisor, like the integer operators; use
// `Rational::checked_div` when the divisor is untrusted.
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// Normalized `num/den`.
pub fn rat(num: i64, den: i64) -> Result<Rational> {
    Rational::new(num, den)
}

pub fn floor_rat(q: &Rational) -> BigInt {
    q.floor()
}

pub fn ceil_rat(q: &Rational) -> BigInt {
    q.ceil()
}

pub fn round_half_up_rat(q: &Rational) -> BigInt {
    q.round_half_up()
}

/// Position of a nonzero rational relative to one binade of `F`.
struct Scaled {
    exponent: i64,
    /// `floor(|q| / β^exponent)`
    significand: BigInt,
    /// `|q| / β^exponent - significand`, as `remainder / divisor`.
    remainder: BigInt,
    divisor: BigInt,
}

fn scale(abs_num: &BigInt, den: &BigInt, base: &BigInt, exponent: i64) -> Scaled {
    let (n, d) = if exponent >= 0 {
        (abs_num.clone(), den * base.pow(exponent as u32))
    } else {
        (abs_num * base.pow(exponent.unsigned_abs() as u32), den.clone())
    };
    let (significand, remainder) = n.div_mod_floor(&d);
    Scaled {
        exponent,
        significand,
        remainder,
        divisor: d,
    }
}

/// Find the unique exponent `e` with `β^(p-1) <= |q|/β^e < β^p`.
fn locate(q: &Rational, fmt: FloatFormat) -> Scaled {
    let base = BigInt::from(fmt.base());
    let low = base.pow(fmt.precision() - 1);
    let high = &low * &base;
    let abs_num = q.numer().abs();
    let den = q.denom();

    let log2_q = abs_num.bits() as f64 - den.bits() as f64;
    let log_base = (fmt.base() as f64).log2();
    let mut exponent = (log2_q / log_base).floor() as i64 - (fmt.precision() as i64 - 1);
    loop {
        let s = scale(&abs_num, den, &base, exponent);
        if s.significand < low {
            exponent -= 1;
        } else if s.significand >= high {
            exponent += 1;
        } else {
            return s;
        }
    }
}

/// Round `q` to the nearest element of `F` for the given format, ties to
/// the even significand.
pub fn round_to_format(q: &Rational, fmt: FloatFormat) -> Rational {
    if q.is_zero() {
        return Rational::zero();
    }
    let s = locate(q, fmt);
    let twice_rem: BigInt = &s.remainder * 2u32;
    let round_up = match twice_rem.cmp(&s.divisor) {
        Ordering::Less => false,
        Ordering::Greater => true,
        Ordering::Equal => s.significand.is_odd(),
    };
    let mut significand = s.significand;
    if round_up {
        // β^p - 1 rounds up to β^p = β^(p-1)·β^(e+1), still in F.
        significand += 1;
    }
    let base = BigInt::from(fmt.base());
    let magnitude = Rational::from_integer(significand) * Rational::pow_int(&base, s.exponent);
    if q.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

/// Membership in `F`: zero, or `M·β^e` with a `p`-digit significand.
pub fn is_in_format(q: &Rational, fmt: FloatFormat) -> bool {
    if q.is_zero() {
        return true;
    }
    locate(q, fmt).remainder.is_zero()
}
