//! Exact rational numbers and their textual forms.
//!
//! Accepted inputs are integers (`7`, `-3`), fractions (`"5/2"`) and decimal
//! strings (`"2.5"`, `"1e-6"`, `"-0.01"`). Decimals are converted exactly, so
//! `"0.1"` is `1/10` and never a binary approximation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::Rational(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let numer: BigInt = parse_integer(p.trim()).ok_or_else(bad)?;
        let denom: BigInt = parse_integer(q.trim()).ok_or_else(bad)?;
        if denom.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(numer, denom));
    }
    parse_decimal(s).ok_or_else(bad)
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.trim_start_matches('+').parse().ok()
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (negative, rest) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match rest.find(['e', 'E']) {
        Some(pos) => {
            let exp = &rest[pos + 1..];
            let exp_digits = exp.strip_prefix(['+', '-']).unwrap_or(exp);
            if exp_digits.is_empty() || !exp_digits.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            (&rest[..pos], exp.trim_start_matches('+').parse::<i32>().ok()?)
        }
        None => (rest, 0),
    };
    let (whole, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{whole}{frac}").parse().ok()?;
    let scale = exponent - i32::try_from(frac.len()).ok()?;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(digits);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Reads a rational from a JSON token: an integer or a string.
pub fn rational_from_json(value: &Value, field: &str) -> Result<Rational> {
    match value {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(int(i))
            } else if let Some(u) = n.as_u64() {
                Ok(Rational::from_integer(BigInt::from(u)))
            } else {
                Err(Error::field(
                    field,
                    format!("non-integer number {n}; write it as a string such as \"{n}\" or \"p/q\""),
                ))
            }
        }
        Value::String(s) => parse_rational(s).map_err(|_| {
            Error::field(field, format!("`{s}` is not an integer, decimal or p/q rational"))
        }),
        other => Err(Error::field(field, format!("expected a rational, found {other}"))),
    }
}

/// Integers within i64 become JSON numbers, everything else a `"p/q"` string.
pub fn rational_to_json(r: &Rational) -> Value {
    if r.is_integer() {
        if let Some(i) = r.numer().to_i64() {
            return Value::from(i);
        }
    }
    Value::String(r.to_string())
}

/// Compact display for human tables: the exact form when it fits in 12
/// characters, otherwise a decimal approximation prefixed by `~`.
pub fn display_short(r: &Rational) -> String {
    const WIDTH: usize = 12;
    let exact = r.to_string();
    if exact.len() <= WIDTH {
        return exact;
    }
    let approx = r.to_f64().unwrap_or(f64::NAN);
    let mut text = format!("~{approx:.10}");
    if text.len() > WIDTH {
        text = format!("~{approx:.4e}");
    }
    text.truncate(WIDTH);
    text
}

pub fn is_nonnegative(r: &Rational) -> bool {
    !r.is_negative()
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_accepted_forms() {
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational("5/2").unwrap(), ratio(5, 2));
        assert_eq!(parse_rational("10/4").unwrap(), ratio(5, 2));
        assert_eq!(parse_rational("2.5").unwrap(), ratio(5, 2));
        assert_eq!(parse_rational("0.1").unwrap(), ratio(1, 10));
        assert_eq!(parse_rational("-0.01").unwrap(), ratio(-1, 100));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("1e-6").unwrap(), ratio(1, 1_000_000));
        assert_eq!(parse_rational("2.5E2").unwrap(), int(250));
        assert_eq!(parse_rational("3/-6").unwrap(), ratio(-1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1/0", "1..2", "1e", "--1", "1/2/3", "."] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn json_forms() {
        let v: Value = serde_json::json!(["4", 4, "1/3", 2.5]);
        let arr = v.as_array().unwrap();
        assert_eq!(rational_from_json(&arr[0], "x").unwrap(), int(4));
        assert_eq!(rational_from_json(&arr[1], "x").unwrap(), int(4));
        assert_eq!(rational_from_json(&arr[2], "x").unwrap(), ratio(1, 3));
        assert!(rational_from_json(&arr[3], "x").is_err());
        assert_eq!(rational_to_json(&int(3)), serde_json::json!(3));
        assert_eq!(rational_to_json(&ratio(-7, 2)), serde_json::json!("-7/2"));
    }

    #[test]
    fn short_display() {
        assert_eq!(display_short(&ratio(19, 3)), "19/3");
        let long = ratio(1, 10_000_000_007);
        let shown = display_short(&long);
        assert!(shown.len() <= 12 && shown.starts_with('~'), "{shown}");
    }
}
