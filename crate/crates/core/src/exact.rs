//! Exact rational helpers shared by the matrix builder and the parameter formulas.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses a plain or scientific decimal literal (`-0.623538`, `1.5e-3`) exactly.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(pos) => (&digits[..pos], &digits[pos + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let numer: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().ok()? };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(if negative { -value } else { value })
}

/// The decimal number a user meant when typing `x`: the shortest round-trip
/// representation of the double, read back exactly.
pub fn from_f64_decimal(x: f64) -> Rational {
    parse_decimal(&format!("{x:e}")).expect("finite f64 always formats as a decimal")
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

/// Rounds `r` to `digits` significant decimal digits (half away from zero)
/// and renders it without trailing zeros.
pub fn to_significant(r: &Rational, digits: usize) -> String {
    let digits = digits.max(1);
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let a = r.abs();

    // exponent e with 10^e <= a < 10^(e+1)
    let mut e = (a.numer().bits() as i64 - a.denom().bits() as i64) * 30103 / 100000;
    let scaled_at = |e: i64| -> Rational {
        if e >= 0 {
            a.clone() / Rational::from_integer(pow10(e as u32))
        } else {
            a.clone() * Rational::from_integer(pow10((-e) as u32))
        }
    };
    loop {
        let s = scaled_at(e);
        if s >= int(10) {
            e += 1;
        } else if s < Rational::one() {
            e -= 1;
        } else {
            break;
        }
    }

    let shift = digits as i64 - 1 - e;
    let shifted = if shift >= 0 {
        a * Rational::from_integer(pow10(shift as u32))
    } else {
        a / Rational::from_integer(pow10((-shift) as u32))
    };
    let (q, rem) = shifted.numer().div_rem(shifted.denom());
    let mut mant = q;
    if rem * BigInt::from(2) >= *shifted.denom() {
        mant += 1;
    }
    if mant == pow10(digits as u32) {
        mant = pow10(digits as u32 - 1);
        e += 1;
    }
    let mut ds = mant.to_string();
    debug_assert_eq!(ds.len(), digits);

    let body = if (-6..21).contains(&e) {
        if e >= 0 {
            let point = e as usize + 1;
            if ds.len() <= point {
                ds.push_str(&"0".repeat(point - ds.len()));
                ds
            } else {
                let (a, b) = ds.split_at(point);
                trim_fraction(format!("{a}.{b}"))
            }
        } else {
            trim_fraction(format!("0.{}{}", "0".repeat((-e - 1) as usize), ds))
        }
    } else {
        let (a, b) = ds.split_at(1);
        let m = if b.is_empty() { a.to_string() } else { trim_fraction(format!("{a}.{b}")) };
        format!("{m}e{e}")
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn trim_fraction(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0');
    t.strip_suffix('.').unwrap_or(t).to_string()
}

/// Shortest round-trip rendering of a double.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Renders with `digits` significant digits when given, shortest round trip otherwise.
pub fn fmt_f64_digits(x: f64, digits: Option<usize>) -> String {
    match digits {
        Some(d) if x.is_finite() => to_significant(&from_f64_exact(x), d),
        _ => fmt_f64(x),
    }
}

/// Exact binary value of a double.
pub fn from_f64_exact(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// `p/q` for non-integers, `p` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_decimal_forms() {
        assert_eq!(parse_decimal("0.039").unwrap(), frac(39, 1000));
        assert_eq!(parse_decimal("-1.5e-3").unwrap(), frac(-3, 2000));
        assert_eq!(parse_decimal("12").unwrap(), int(12));
        assert_eq!(parse_decimal(".5").unwrap(), frac(1, 2));
        assert!(parse_decimal("abc").is_none());
        assert!(parse_decimal("").is_none());
    }

    #[test]
    fn f64_decimal_is_the_typed_literal() {
        assert_eq!(from_f64_decimal(0.623538), frac(623538, 1_000_000));
        assert_eq!(from_f64_decimal(1e-20), parse_decimal("1e-20").unwrap());
    }

    #[test]
    fn significant_digit_rounding() {
        assert_eq!(to_significant(&frac(1, 3), 5), "0.33333");
        assert_eq!(to_significant(&frac(2, 3), 5), "0.66667");
        assert_eq!(to_significant(&frac(-2, 3), 3), "-0.667");
        assert_eq!(to_significant(&int(1234), 2), "1200");
        assert_eq!(to_significant(&frac(9999, 1000), 3), "10");
        assert_eq!(to_significant(&frac(2436118, 1_000_000), 17), "2.436118");
        assert_eq!(to_significant(&frac(1, 1_000_000_000), 3), "1e-9");
        assert_eq!(to_significant(&frac(1, 1000), 3), "0.001");
    }

    #[test]
    fn rational_rendering() {
        assert_eq!(fmt_rational(&int(-3)), "-3");
        assert_eq!(fmt_rational(&frac(2, 54)), "1/27");
    }
}
