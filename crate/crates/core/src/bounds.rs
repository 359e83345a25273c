//! Candidate intervals for the skew-compensated clock.
//!
//! With `t = i·D/A` and `0 < D < A`, the compensated clock lies in
//! `[floor(t), ceil(t)]`. Since `t` itself is only available as a rounded
//! value `t̂ = fl(fl(i)·fl(fl(D)/fl(A)))`, the interval is widened by
//! coefficients that absorb every rounding in that pipeline:
//!
//! - theoretical: `c_lo = (1-u+2u²)/((1+u)²(1+2u))`,
//!   `c_hi = (1+2u)³(1+u-2u²)/(1+u)²`
//! - practical: `c_lo = (1-u)/(1+2u)³`, `c_hi = (1+2u)³`, built only from
//!   `1-u` and `1+2u`, both exactly representable
//! - approximate: `t̂ ± (1 + ε)` with `ε = eps_coeff·i`
//!
//! The reference interval evaluates the theoretical coefficients against the
//! exact `t` in rational arithmetic.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::exact_rational::{round_to_format, Rational};
use crate::float_model::{unit_roundoff, FloatFormat};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundMethod {
    Theoretical,
    Practical,
    Approximate,
}

impl BoundMethod {
    pub const ALL: [BoundMethod; 3] = [
        BoundMethod::Theoretical,
        BoundMethod::Practical,
        BoundMethod::Approximate,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundMethod::Theoretical => "theoretical",
            BoundMethod::Practical => "practical",
            BoundMethod::Approximate => "approximate",
        }
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "theoretical" => Ok(BoundMethod::Theoretical),
            "practical" => Ok(BoundMethod::Practical),
            "approximate" => Ok(BoundMethod::Approximate),
            other => Err(format!(
                "unknown method '{other}' (expected theoretical, practical or approximate)"
            )),
        }
    }
}

/// Hardware working precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Precision {
    Binary32,
    Binary64,
}

impl Precision {
    pub const ALL: [Precision; 2] = [Precision::Binary32, Precision::Binary64];

    pub fn format(&self) -> FloatFormat {
        match self {
            Precision::Binary32 => FloatFormat::BINARY32,
            Precision::Binary64 => FloatFormat::BINARY64,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Precision::Binary32 => "binary32",
            Precision::Binary64 => "binary64",
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "binary32" | "single" | "f32" => Ok(Precision::Binary32),
            "binary64" | "double" | "f64" => Ok(Precision::Binary64),
            other => Err(format!("unknown precision '{other}' (expected binary32 or binary64)")),
        }
    }
}

/// How an interval was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntervalOrigin {
    /// Computed in hardware floating point.
    Working(BoundMethod, Precision),
    /// Theoretical coefficients against the exact `t`, for the given format's `u`.
    Reference(FloatFormat),
}

/// Integer range `[lb, ub]` of candidates for the compensated clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CandidateInterval {
    pub lb: i64,
    pub ub: i64,
    pub origin: IntervalOrigin,
}

impl CandidateInterval {
    /// Number of unit steps between the bounds, `ub - lb`.
    pub fn width(&self) -> i64 {
        self.ub - self.lb
    }

    pub fn contains(&self, value: i64) -> bool {
        self.lb <= value && value <= self.ub
    }
}

/// Hardware float type used as a working precision.
pub trait WorkingFloat:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    const FORMAT: FloatFormat;

    fn one() -> Self;
    fn two() -> Self;
    /// `2^-p`, exactly representable.
    fn unit_roundoff() -> Self;
    /// Round-to-nearest-even conversion.
    fn from_u64(v: u64) -> Self;
    fn to_f64(self) -> f64;

    /// Correctly rounded conversion of an exact rational.
    fn from_rational(q: &Rational) -> Self;
}

impl WorkingFloat for f32 {
    const FORMAT: FloatFormat = FloatFormat::BINARY32;

    fn one() -> Self {
        1.0
    }
    fn two() -> Self {
        2.0
    }
    fn unit_roundoff() -> Self {
        f32::EPSILON / 2.0
    }
    fn from_u64(v: u64) -> Self {
        v as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn from_rational(q: &Rational) -> Self {
        let rounded = round_to_format(q, Self::FORMAT);
        rounded
            .to_f64_exact()
            .expect("binary32 value outside the finite normal range") as f32
    }
}

impl WorkingFloat for f64 {
    const FORMAT: FloatFormat = FloatFormat::BINARY64;

    fn one() -> Self {
        1.0
    }
    fn two() -> Self {
        2.0
    }
    fn unit_roundoff() -> Self {
        f64::EPSILON / 2.0
    }
    fn from_u64(v: u64) -> Self {
        v as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn from_rational(q: &Rational) -> Self {
        round_to_format(q, Self::FORMAT)
            .to_f64_exact()
            .expect("binary64 value outside the finite normal range")
    }
}

/// Exact coefficients `(c_lo, c_hi)` with `c_lo·t <= fl(t) <= c_hi·t`
/// for the three-rounding, one-division, one-multiplication pipeline.
pub fn optimal_coefficients(fmt: FloatFormat) -> Result<(Rational, Rational)> {
    if fmt.base() != 2 {
        return Err(Error::UnsupportedBase(fmt.base()));
    }
    let u = unit_roundoff(fmt);
    let one = Rational::one();
    let two = Rational::from_integer(2);
    let u2 = &u * &u;
    let one_plus_u = &one + &u;
    let one_plus_2u = &one + &two * &u;
    let one_plus_u_sq = &one_plus_u * &one_plus_u;

    let lo = (&one - &u + &two * &u2) / (&one_plus_u_sq * &one_plus_2u);
    let hi = cube(&one_plus_2u) * (&one + &u - &two * &u2) / one_plus_u_sq;
    Ok((lo, hi))
}

/// Exact loosened coefficients `((1-u)/(1+2u)³, (1+2u)³)`.
pub fn practical_coefficients(fmt: FloatFormat) -> Result<(Rational, Rational)> {
    if fmt.base() != 2 {
        return Err(Error::UnsupportedBase(fmt.base()));
    }
    let u = unit_roundoff(fmt);
    let one = Rational::one();
    let w3 = cube(&(&one + Rational::from_integer(2) * &u));
    let lo = (&one - &u) / &w3;
    Ok((lo, w3))
}

fn cube(x: &Rational) -> Rational {
    x * x * x
}

/// `fl(fl(i)·fl(fl(D)/fl(A)))` in the working type.
pub fn t_hat<F: WorkingFloat>(i: u64, d: u64, a: u64) -> Result<F> {
    if a == 0 {
        return Err(Error::ZeroDivisor);
    }
    Ok(F::from_u64(i) * (F::from_u64(d) / F::from_u64(a)))
}

/// `t̂` for the given precision, widened losslessly to `f64`.
pub fn compute_t_hat(i: u64, d: u64, a: u64, precision: Precision) -> Result<f64> {
    match precision {
        Precision::Binary32 => t_hat::<f32>(i, d, a).map(|v| v as f64),
        Precision::Binary64 => t_hat::<f64>(i, d, a),
    }
}

/// The same pipeline as [`compute_t_hat`], with every operation performed
/// exactly and then rounded by [`round_to_format`].
pub fn emulated_t_hat(i: u64, d: u64, a: u64, fmt: FloatFormat) -> Result<Rational> {
    if a == 0 {
        return Err(Error::ZeroDivisor);
    }
    let fl = |q: Rational| round_to_format(&q, fmt);
    let fi = fl(Rational::from(i));
    let fd = fl(Rational::from(d));
    let fa = fl(Rational::from(a));
    let quotient = fl(fd / fa);
    Ok(fl(fi * quotient))
}

/// Theoretical coefficients evaluated in the working precision: numerator
/// and denominator separately, then one division.
fn theoretical_working<F: WorkingFloat>() -> (F, F) {
    let one = F::one();
    let two = F::two();
    let u = F::unit_roundoff();
    let u2 = u * u;
    let one_plus_u = one + u;
    let one_plus_2u = one + two * u;
    let cube = (one_plus_2u * one_plus_2u) * one_plus_2u;

    let num_lo = (one - u) + two * u2;
    let den_lo = (one_plus_u * one_plus_u) * one_plus_2u;
    let num_hi = cube * (one_plus_u - two * u2);
    let den_hi = one_plus_u * one_plus_u;
    (num_lo / den_lo, num_hi / den_hi)
}

/// Practical coefficients in the working precision: `(1+2u)³` by two
/// products, then `(1-u)` divided by it.
fn practical_working<F: WorkingFloat>() -> (F, F) {
    let one = F::one();
    let u = F::unit_roundoff();
    let w = one + F::two() * u;
    let hi = (w * w) * w;
    let lo = (one - u) / hi;
    (lo, hi)
}

fn floor_i64(v: f64) -> i64 {
    v.floor() as i64
}

fn ceil_i64(v: f64) -> i64 {
    v.ceil() as i64
}

fn validate_slope(d: u64, a: u64) -> Result<()> {
    if a == 0 {
        return Err(Error::ZeroDivisor);
    }
    if d == 0 || d >= a {
        return Err(Error::InvalidSlope { d, a });
    }
    Ok(())
}

fn working_interval<F: WorkingFloat>(
    i: u64,
    d: u64,
    a: u64,
    method: BoundMethod,
    eps_coeff: &Rational,
) -> Result<(i64, i64)> {
    let t = t_hat::<F>(i, d, a)?;
    let (lo, hi) = match method {
        BoundMethod::Theoretical => {
            let (c_lo, c_hi) = theoretical_working::<F>();
            (c_lo * t, c_hi * t)
        }
        BoundMethod::Practical => {
            let (c_lo, c_hi) = practical_working::<F>();
            (c_lo * t, c_hi * t)
        }
        BoundMethod::Approximate => {
            let eps = F::from_rational(&(eps_coeff * Rational::from(i)));
            let margin = F::one() + eps;
            (t - margin, t + margin)
        }
    };
    Ok((floor_i64(lo.to_f64()), ceil_i64(hi.to_f64())))
}

/// Candidate interval for `t = i·D/A` computed in the working precision.
///
/// `eps_coeff` only affects [`BoundMethod::Approximate`], where the margin
/// is `1 + fl(eps_coeff·i)`.
pub fn candidate_interval(
    i: u64,
    d: u64,
    a: u64,
    method: BoundMethod,
    precision: Precision,
    eps_coeff: &Rational,
) -> Result<CandidateInterval> {
    validate_slope(d, a)?;
    let (lb, ub) = match precision {
        Precision::Binary32 => working_interval::<f32>(i, d, a, method, eps_coeff)?,
        Precision::Binary64 => working_interval::<f64>(i, d, a, method, eps_coeff)?,
    };
    Ok(CandidateInterval {
        lb,
        ub,
        origin: IntervalOrigin::Working(method, precision),
    })
}

/// Exact theoretical coefficients, reusable across many reference intervals.
#[derive(Debug, Clone)]
pub struct ReferenceBounds {
    format: FloatFormat,
    c_lo: Rational,
    c_hi: Rational,
}

impl ReferenceBounds {
    pub fn new(fmt: FloatFormat) -> Result<Self> {
        let (c_lo, c_hi) = optimal_coefficients(fmt)?;
        Ok(ReferenceBounds {
            format: fmt,
            c_lo,
            c_hi,
        })
    }

    pub fn interval(&self, i: u64, d: u64, a: u64) -> Result<CandidateInterval> {
        validate_slope(d, a)?;
        let t = Rational::new(BigInt::from(i) * BigInt::from(d), BigInt::from(a))?;
        let lb = to_i64(&(&self.c_lo * &t).floor())?;
        let ub = to_i64(&(&self.c_hi * &t).ceil())?;
        Ok(CandidateInterval {
            lb,
            ub,
            origin: IntervalOrigin::Reference(self.format),
        })
    }
}

fn to_i64(v: &BigInt) -> Result<i64> {
    v.to_i64()
        .ok_or_else(|| Error::OverflowRisk(format!("bound {v} does not fit in i64")))
}

/// `[floor(c_lo·t), ceil(c_hi·t)]` with the theoretical coefficients for
/// `fmt` and exact `t = i·D/A`.
pub fn reference_interval(i: u64, d: u64, a: u64, fmt: FloatFormat) -> Result<CandidateInterval> {
    ReferenceBounds::new(fmt)?.interval(i, d, a)
}

/// `(reference.lb - candidate.lb, candidate.ub - reference.ub)`. Negative
/// entries mean the candidate cut into the guaranteed interval.
pub fn interval_deltas(candidate: &CandidateInterval, reference: &CandidateInterval) -> (i64, i64) {
    (reference.lb - candidate.lb, candidate.ub - reference.ub)
}
