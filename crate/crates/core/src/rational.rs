//! Exact rational numbers and their text forms.
//!
//! Probabilities and term values are arbitrary-precision rationals
//! throughout; nothing in this crate rounds. Text forms accepted everywhere
//! a rational appears (model files, formula constants): an integer `"3"`,
//! a fraction `"num/den"`, or a finite decimal `"0.0474"` which is read
//! exactly (474/10000). The canonical output form is the fraction in lowest
//! terms, printed without the denominator when it is 1.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::str::FromStr;

pub type Rational = BigRational;

/// Shorthand for a rational from two machine integers.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse error for rational text forms.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational {text:?}: {reason}")]
pub struct RationalParseError {
    pub text: String,
    pub reason: String,
}

fn err(text: &str, reason: &str) -> RationalParseError {
    RationalParseError {
        text: text.to_string(),
        reason: reason.to_string(),
    }
}

/// Parse `"3"`, `"-3"`, `"num/den"`, or a finite decimal like `"0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(err(text, "empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| err(text, "bad numerator"))?;
        let d = BigInt::from_str(den.trim()).map_err(|_| err(text, "bad denominator"))?;
        if d.is_zero() {
            return Err(err(text, "zero denominator"));
        }
        if d.is_negative() {
            return Err(err(text, "negative denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let (sign, int_digits) = match int_part.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        let int_digits = if int_digits.is_empty() { "0" } else { int_digits };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err(text, "bad decimal digits"));
        }
        let whole = BigInt::from_str(int_digits).map_err(|_| err(text, "bad integer part"))?;
        let frac = BigInt::from_str(frac_part).map_err(|_| err(text, "bad fraction part"))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let value = Rational::new(whole * &scale + frac, scale);
        return Ok(if sign < 0 { -value } else { value });
    }
    let n = BigInt::from_str(s).map_err(|_| err(text, "not a number"))?;
    Ok(Rational::from(n))
}

/// Canonical text form: lowest terms, `"num"` when the denominator is 1,
/// `"num/den"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Fixed-precision decimal rendering, rounding half away from zero.
pub fn format_decimal(r: &Rational, places: usize) -> String {
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = r * Rational::from(scale.clone());
    // round half away from zero: floor(|x| + 1/2) with the sign restored
    let half = ratio(1, 2);
    let magnitude = (scaled.abs() + half).floor().to_integer();
    let negative = r.is_negative() && !magnitude.is_zero();
    let digits = magnitude.to_string();
    let (int_part, frac_part) = if digits.len() > places {
        let split = digits.len() - places;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        ("0".to_string(), format!("{digits:0>places$}"))
    };
    let sign = if negative { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_lowest_terms_output() {
        let r = parse_rational("4266/10000").unwrap();
        assert_eq!(r, ratio(2133, 5000));
        assert_eq!(format_rational(&r), "2133/5000");
    }

    #[test]
    fn parses_decimal_exactly() {
        assert_eq!(parse_rational("0.0474").unwrap(), ratio(474, 10000));
        assert_eq!(parse_rational("-0.5").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational(".25").unwrap(), ratio(1, 4));
    }

    #[test]
    fn parses_integers() {
        assert_eq!(parse_rational("1").unwrap(), ratio(1, 1));
        assert_eq!(format_rational(&ratio(3, 1)), "3");
        assert_eq!(format_rational(&ratio(0, 5)), "0");
    }

    #[test]
    fn rejects_bad_forms() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("a").is_err());
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_decimal(&ratio(2133, 5000), 6), "0.426600");
        assert_eq!(format_decimal(&ratio(1, 3), 4), "0.3333");
        assert_eq!(format_decimal(&ratio(-1, 2), 2), "-0.50");
        assert_eq!(format_decimal(&ratio(0, 1), 6), "0.000000");
        assert_eq!(format_decimal(&ratio(1, 1), 0), "1");
    }
}
