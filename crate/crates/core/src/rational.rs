//! Exact rational scalars and their text forms.
//!
//! [`Rational`] is an arbitrary-precision fraction that is always kept in
//! lowest terms with a positive denominator. Every LP scalar and every
//! density constant in the crate is one of these.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders `q` as `num/den`, or as a bare integer when the denominator is 1.
pub fn to_fraction_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `num/den` or a bare integer. Rejects zero denominators.
pub fn parse_fraction(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = |m: &str| Error::parse(0, format!("{m}: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.trim().parse().map_err(|_| bad("bad numerator"))?;
    let d: BigInt = d.trim().parse().map_err(|_| bad("bad denominator"))?;
    if d.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(n, d))
}

/// Exact decimal rendering with `places` digits after the point, rounding
/// half away from zero.
pub fn to_decimal(q: &Rational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = q.numer() * &scale;
    let den = q.denom();
    let (mut quot, rem) = scaled.abs().div_rem(den);
    if rem * 2 >= *den {
        quot += 1;
    }
    let digits = quot.to_string();
    let neg = q.is_negative() && !quot.is_zero();
    let (int_part, frac_part) = if places == 0 {
        (digits, String::new())
    } else if digits.len() <= places {
        ("0".to_string(), format!("{digits:0>places$}"))
    } else {
        let cut = digits.len() - places;
        (digits[..cut].to_string(), digits[cut..].to_string())
    };
    let sign = if neg { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Floating-point approximation, for display only.
pub fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// A closed rational interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.lo <= *q && *q <= self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}
