use num_bigint::BigInt;
use num_traits::ToPrimitive;
use skewcomp::Rational;

/// Exact value of a decimal literal such as `1e9`, `-0.25` or `1.5E-7`.
pub fn parse_decimal(s: &str) -> Result<Rational, String> {
    let bad = || format!("invalid number '{s}'");
    let s = s.trim();
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
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
    if exponent.abs() > 1000 {
        return Err(format!("exponent out of range in '{s}'"));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().map_err(|_| bad())?);
    value = value * Rational::pow_int(&BigInt::from(10), exponent - frac_part.len() as i64);
    Ok(if negative { -value } else { value })
}

/// Nonnegative integer, accepting scientific shorthand like `1e9`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let q = parse_decimal(s)?;
    if !q.is_integer() || q.is_negative() {
        return Err(format!("'{s}' is not a nonnegative integer"));
    }
    q.numer().to_u64().ok_or_else(|| format!("'{s}' does not fit in 64 bits"))
}

pub fn parse_positive(s: &str) -> Result<u64, String> {
    match parse_count(s)? {
        0 => Err(format!("'{s}' must be positive")),
        n => Ok(n),
    }
}
