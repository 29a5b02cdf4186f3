//! Exact rationals and their textual form.
//!
//! Probabilities and coefficients are written as `"p/q"` (or `"p"` for
//! integers). Input additionally accepts decimal strings such as `"0.125"`,
//! converted without rounding.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a finite decimal like `"-0.35"`.
pub fn parse(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("invalid rational {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits_ok = frac.chars().all(|c| c.is_ascii_digit())
            && whole
                .trim_start_matches(['-', '+'])
                .chars()
                .all(|c| c.is_ascii_digit());
        if !digits_ok || (whole.trim_start_matches(['-', '+']).is_empty() && frac.is_empty()) {
            return Err(bad());
        }
        let whole_abs = whole.trim_start_matches(['-', '+']);
        let mantissa: BigInt = format!("{}{}", if whole_abs.is_empty() { "0" } else { whole_abs }, frac)
            .parse()
            .map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(mantissa, scale);
        return Ok(if negative { -value } else { value });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Canonical text: reduced `"p/q"`, or `"p"` when the denominator is one.
pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) mod serde_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse(" 6/4 ").unwrap(), ratio(3, 2));
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse("-0.5").unwrap(), ratio(-1, 2));
        assert_eq!(parse(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse("1.").unwrap(), int(1));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "1/0", "abc", "1/2/3", "0.1.2", ".", "1e-3"] {
            assert!(parse(s).is_err(), "{s}");
        }
    }

    #[test]
    fn formats_reduced() {
        assert_eq!(format(&ratio(2, 4)), "1/2");
        assert_eq!(format(&ratio(-6, 3)), "-2");
        assert_eq!(format(&int(0)), "0");
    }
}
