//! Floating-point formats, unit roundoff and optimal relative error bounds.

use std::fmt;

use num_bigint::BigInt;

use crate::exact_rational::{round_to_format, Rational};
use crate::{Error, Result};

/// A base-`β`, precision-`p` floating-point format with unbounded exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FloatFormat {
    base: u32,
    precision: u32,
}

impl FloatFormat {
    pub const BINARY32: FloatFormat = FloatFormat {
        base: 2,
        precision: 24,
    };
    pub const BINARY64: FloatFormat = FloatFormat {
        base: 2,
        precision: 53,
    };

    pub fn new(base: u32, precision: u32) -> Result<Self> {
        if base < 2 || precision < 2 {
            return Err(Error::InvalidFormat { base, precision });
        }
        Ok(FloatFormat { base, precision })
    }

    /// Base-2 format with `precision` significand bits.
    pub fn binary(precision: u32) -> Result<Self> {
        Self::new(2, precision)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn unit_roundoff(&self) -> Rational {
        unit_roundoff(*self)
    }
}

impl fmt::Display for FloatFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FloatFormat::BINARY32 => f.write_str("binary32"),
            FloatFormat::BINARY64 => f.write_str("binary64"),
            FloatFormat { base, precision } => write!(f, "base{}p{}", base, precision),
        }
    }
}

/// `u = β^(1-p) / 2`.
pub fn unit_roundoff(fmt: FloatFormat) -> Rational {
    let base = BigInt::from(fmt.base);
    Rational::pow_int(&base, 1 - fmt.precision as i64) / Rational::from_integer(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    /// Rounding an arbitrary real into the format.
    Rounding,
    /// Product of two format elements.
    Multiply,
    /// Quotient of two format elements.
    Divide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    /// `|t - fl(t)| / |t|`
    E1,
    /// `|t - fl(t)| / |fl(t)|`
    E2,
}

/// Optimal bound on the relative error of a single correctly rounded
/// operation.
///
/// Rounding and multiplication share `u/(1+u)` (E1) and `u` (E2). Division
/// in base 2 is slightly tighter: `u - 2u²` and `(u - 2u²)/(1 + u - 2u²)`.
pub fn op_error_bound(kind: OpKind, which: ErrorKind, fmt: FloatFormat) -> Rational {
    let u = unit_roundoff(fmt);
    let one = Rational::one();
    match (kind, which, fmt.base) {
        (OpKind::Divide, ErrorKind::E1, 2) => &u - Rational::from_integer(2) * &u * &u,
        (OpKind::Divide, ErrorKind::E2, 2) => {
            let num = &u - Rational::from_integer(2) * &u * &u;
            let den = &one + &num;
            num / den
        }
        (_, ErrorKind::E1, _) => &u / (&one + &u),
        (_, ErrorKind::E2, _) => u,
    }
}

/// Per-operation bounds for the `fl(fl(x)·fl(fl(y)/fl(z)))` pipeline: three
/// input roundings, one division, one multiplication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorBudget {
    pub format: FloatFormat,
    /// rounding of `x`
    pub delta1_bound: Rational,
    /// rounding of `y`
    pub delta2_bound: Rational,
    /// rounding of `z`
    pub delta3_bound: Rational,
    /// the division
    pub delta4_bound: Rational,
    /// the multiplication
    pub delta5_bound: Rational,
}

impl ErrorBudget {
    pub fn for_format(fmt: FloatFormat) -> Self {
        let rounding = op_error_bound(OpKind::Rounding, ErrorKind::E1, fmt);
        ErrorBudget {
            format: fmt,
            delta1_bound: rounding.clone(),
            delta2_bound: rounding.clone(),
            delta3_bound: rounding,
            delta4_bound: op_error_bound(OpKind::Divide, ErrorKind::E1, fmt),
            delta5_bound: op_error_bound(OpKind::Multiply, ErrorKind::E1, fmt),
        }
    }
}

/// Realized `(E1, E2)` of rounding `t` into `fmt`; both zero at `t = 0`.
pub fn relative_errors(t: &Rational, fmt: FloatFormat) -> (Rational, Rational) {
    if t.is_zero() {
        return (Rational::zero(), Rational::zero());
    }
    let rounded = round_to_format(t, fmt);
    let diff = (t - &rounded).abs();
    let e1 = &diff / t.abs();
    // rounding a nonzero value never yields zero with an unbounded exponent
    let e2 = diff / rounded.abs();
    (e1, e2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_rational::rat;
    use proptest::prelude::*;

    fn pow2(e: i64) -> Rational {
        Rational::pow_int(&BigInt::from(2), e)
    }

    #[test]
    fn unit_roundoff_values() {
        assert_eq!(unit_roundoff(FloatFormat::BINARY32), pow2(-24));
        assert_eq!(unit_roundoff(FloatFormat::BINARY64), pow2(-53));
        assert_eq!(unit_roundoff(FloatFormat::new(10, 3).unwrap()), rat(1, 200).unwrap());
    }

    #[test]
    fn format_validation() {
        assert!(FloatFormat::new(1, 24).is_err());
        assert!(FloatFormat::new(2, 1).is_err());
        assert_eq!(FloatFormat::binary(24).unwrap(), FloatFormat::BINARY32);
    }

    #[test]
    fn table_bounds() {
        let fmt = FloatFormat::BINARY32;
        let u = pow2(-24);
        let one = Rational::one();
        let two = Rational::from_integer(2);
        let div_e1 = &u - &two * &u * &u;
        assert_eq!(op_error_bound(OpKind::Divide, ErrorKind::E1, fmt), div_e1);
        assert_eq!(
            op_error_bound(OpKind::Divide, ErrorKind::E2, fmt),
            &div_e1 / (&one + &div_e1)
        );
        assert_eq!(op_error_bound(OpKind::Multiply, ErrorKind::E1, fmt), &u / (&one + &u));
        assert_eq!(op_error_bound(OpKind::Multiply, ErrorKind::E2, fmt), u.clone());
        assert_eq!(op_error_bound(OpKind::Rounding, ErrorKind::E2, fmt), u);

        let dec = FloatFormat::new(10, 4).unwrap();
        let ud = unit_roundoff(dec);
        assert_eq!(op_error_bound(OpKind::Divide, ErrorKind::E1, dec), &ud / (&one + &ud));
        assert_eq!(op_error_bound(OpKind::Divide, ErrorKind::E2, dec), ud);
    }

    #[test]
    fn division_bound_tighter_in_base_two() {
        for p in 2..=64 {
            let fmt = FloatFormat::binary(p).unwrap();
            assert!(
                op_error_bound(OpKind::Divide, ErrorKind::E1, fmt)
                    < op_error_bound(OpKind::Multiply, ErrorKind::E1, fmt)
            );
        }
    }

    #[test]
    fn budget_matches_table() {
        let b = ErrorBudget::for_format(FloatFormat::BINARY32);
        let u = pow2(-24);
        assert_eq!(b.delta1_bound, &u / (Rational::one() + &u));
        assert_eq!(b.delta4_bound, &u - Rational::from_integer(2) * &u * &u);
        for d in [&b.delta1_bound, &b.delta2_bound, &b.delta3_bound, &b.delta4_bound, &b.delta5_bound] {
            assert!(!d.is_negative() && *d < Rational::one());
        }
    }

    #[test]
    fn relative_error_examples() {
        let fmt = FloatFormat::BINARY32;
        assert_eq!(relative_errors(&rat(3, 8).unwrap(), fmt), (Rational::zero(), Rational::zero()));
        assert_eq!(relative_errors(&Rational::zero(), fmt), (Rational::zero(), Rational::zero()));

        let u = pow2(-24);
        let midpoint = Rational::one() + &u;
        let (e1, e2) = relative_errors(&midpoint, fmt);
        assert_eq!(e1, &u / (Rational::one() + &u));
        assert_eq!(e2, u);
    }

    #[test]
    fn one_third_relative_errors() {
        // 1/3 in binary32 is 11184811·2^-25: the 24-bit significand of
        // 2^25/3 = 11184810.67 rounds up. Errors follow by hand:
        // |1/3 - 11184811/2^25| = 1/(3·2^25).
        let t = rat(1, 3).unwrap();
        let (e1, e2) = relative_errors(&t, FloatFormat::BINARY32);
        let diff = Rational::one() / Rational::from_integer(3i64 << 25);
        assert_eq!(e1, &diff * Rational::from_integer(3));
        assert_eq!(e2, &diff / rat(11184811, 1 << 25).unwrap());
    }

    proptest! {
        #[test]
        fn rounding_errors_within_table(n in 1i64..i64::MAX, d in 1i64..i64::MAX) {
            let fmt = FloatFormat::BINARY32;
            let (e1, e2) = relative_errors(&rat(n, d).unwrap(), fmt);
            prop_assert!(e1 <= op_error_bound(OpKind::Rounding, ErrorKind::E1, fmt));
            prop_assert!(e2 <= op_error_bound(OpKind::Rounding, ErrorKind::E2, fmt));
        }

        #[test]
        fn products_and_quotients_within_table(
            mx in (1i64 << 23)..(1i64 << 24), ex in -40i64..40,
            my in (1i64 << 23)..(1i64 << 24), ey in -40i64..40,
        ) {
            let fmt = FloatFormat::BINARY32;
            let x = Rational::from_integer(mx) * pow2(ex);
            let y = Rational::from_integer(my) * pow2(ey);
            let (product_e1, _) = relative_errors(&(&x * &y), fmt);
            let (quotient_e1, quotient_e2) = relative_errors(&(&x / &y), fmt);
            prop_assert!(product_e1 <= op_error_bound(OpKind::Multiply, ErrorKind::E1, fmt));
            prop_assert!(quotient_e1 <= op_error_bound(OpKind::Divide, ErrorKind::E1, fmt));
            prop_assert!(quotient_e2 <= op_error_bound(OpKind::Divide, ErrorKind::E2, fmt));
        }
    }
}
