//! Shared numeric helpers: the high-precision float type, exact conversions
//! between floats and rationals, and the text forms used on the wire.
//!
//! dashu rounds the result of a binary operation to the larger precision of
//! its operands, so every constant that takes part in float arithmetic is
//! built through [`float`] / [`float_rat`] with an explicit precision.

use std::str::FromStr;

use dashu::base::{Abs, Sign};
use dashu::float::round::mode::{HalfAway, HalfEven};
use dashu::float::FBig;
use dashu::integer::{IBig, UBig};
use dashu::rational::RBig;

use crate::error::{Error, Result};

/// Binary float with round-half-even, used for every real-valued quantity.
pub type Float = FBig<HalfEven, 2>;

/// Internal working precision in bits.
pub const DEFAULT_PRECISION: usize = 120;

pub fn float<T: Into<IBig>>(x: T, prec: usize) -> Float {
    Float::from(x.into()).with_precision(prec).value()
}

pub fn float_rat(r: &RBig, prec: usize) -> Float {
    let num = Float::from(r.numerator().clone()).with_precision(prec).value();
    let den = Float::from(IBig::from(r.denominator().clone()))
        .with_precision(prec)
        .value();
    num / den
}

pub fn float_f64(x: f64, prec: usize) -> Float {
    Float::try_from(x)
        .expect("finite f64")
        .with_precision(prec)
        .value()
}

/// Exact value of a finite float as a rational.
pub fn float_to_rational(x: &Float) -> RBig {
    let repr = x.repr();
    let sig = repr.significand().clone();
    let exp = repr.exponent();
    if exp >= 0 {
        RBig::from(sig << exp as usize)
    } else {
        RBig::from_parts(sig, UBig::ONE << (-exp) as usize)
    }
}

pub fn to_f64(x: &Float) -> f64 {
    x.to_f64().value()
}

pub fn rat_to_f64(r: &RBig) -> f64 {
    r.to_f64().value()
}

/// Round to `prec` bits (or extend) without changing the value more than one ulp.
pub fn with_prec(x: &Float, prec: usize) -> Float {
    x.clone().with_precision(prec).value()
}

pub fn pow_u(base: u64, exp: u32) -> UBig {
    UBig::from(base).pow(exp as usize)
}

pub fn ipow(base: &IBig, exp: u32) -> IBig {
    base.pow(exp as usize)
}

/// `p^exp` as a rational with `exp` of either sign.
pub fn rat_pow_i(base: u64, exp: i64) -> RBig {
    let mag = pow_u(base, exp.unsigned_abs() as u32);
    if exp >= 0 {
        RBig::from(mag)
    } else {
        RBig::from_parts(IBig::ONE, mag)
    }
}

/// Rational rendered as `numerator/denominator` in lowest terms, always with a slash.
pub fn rational_string(r: &RBig) -> String {
    format!("{}/{}", r.numerator(), r.denominator())
}

/// Parses `a/b`, an integer, or a finite decimal such as `0.25` exactly.
pub fn parse_rational(s: &str) -> Result<RBig> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = IBig::from_str(n.trim()).map_err(|_| bad())?;
        let d = IBig::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(RBig::from_parts_signed(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int_digits = int.trim().trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let whole = if int_digits.is_empty() {
            IBig::ZERO
        } else {
            IBig::from_str(int_digits).map_err(|_| bad())?
        };
        let scale = IBig::from(10u8).pow(frac.len());
        let frac_val = if frac.is_empty() {
            IBig::ZERO
        } else {
            IBig::from_str(frac).map_err(|_| bad())?
        };
        let mut num = whole * &scale + frac_val;
        if neg {
            num = -num;
        }
        return Ok(RBig::from_parts_signed(num, scale));
    }
    if let Some((mant, exp)) = s.split_once(['e', 'E']) {
        let m = parse_rational(mant)?;
        let e: i32 = exp.trim().parse().map_err(|_| bad())?;
        return Ok(m * rat_pow_i(10, e as i64));
    }
    IBig::from_str(s).map(RBig::from).map_err(|_| bad())
}

/// Decimal rendering with `digits` significant digits, plain notation when
/// the exponent is moderate.
pub fn format_float(x: &Float, digits: usize) -> String {
    if x.repr().is_zero() {
        return "0".to_string();
    }
    let dec: FBig<HalfAway, 10> = x.to_decimal().value();
    let dec = dec.with_precision(digits.max(1)).value();
    let repr = dec.repr();
    let sig = repr.significand().clone();
    let exp = repr.exponent();
    render_decimal(sig, exp)
}

/// Same as [`format_float`] for an `f64` (at most 17 meaningful digits).
pub fn format_f64(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    format_float(&float_f64(x, 64), digits.min(17))
}

fn render_decimal(sig: IBig, exp: isize) -> String {
    let neg = sig.sign() == Sign::Negative;
    let mut digits = sig.abs().to_string();
    let mut exp = exp;
    while digits.len() > 1 && digits.ends_with('0') {
        digits.pop();
        exp += 1;
    }
    let n = digits.len() as isize;
    let point = n + exp; // position of the decimal point from the left
    let body = if exp >= 0 && point <= 40 {
        let mut s = digits.clone();
        s.extend(std::iter::repeat_n('0', exp as usize));
        s
    } else if point > 0 && exp < 0 {
        let (a, b) = digits.split_at(point as usize);
        format!("{a}.{b}")
    } else if point <= 0 && point > -20 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else {
        let (a, b) = digits.split_at(1);
        let e = point - 1;
        if b.is_empty() {
            format!("{a}e{e}")
        } else {
            format!("{a}.{b}e{e}")
        }
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// `v_p(n)` for a nonzero integer, without the zero check.
pub(crate) fn valuation_nonzero(n: &IBig, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = IBig::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = (&n / &p, &n % &p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

pub(crate) fn serialize_ibig<S: serde::Serializer>(n: &IBig, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

pub(crate) fn serialize_rbig<S: serde::Serializer>(r: &RBig, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings() {
        let r = parse_rational("6/8").unwrap();
        assert_eq!(rational_string(&r), "3/4");
        assert_eq!(rational_string(&parse_rational("5").unwrap()), "5/1");
        assert_eq!(rational_string(&parse_rational("0.25").unwrap()), "1/4");
        assert_eq!(rational_string(&parse_rational("-1.5").unwrap()), "-3/2");
        assert_eq!(rational_string(&parse_rational("1e4").unwrap()), "10000/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn float_round_trip_is_exact() {
        let x = float_rat(&parse_rational("1/3").unwrap(), 120);
        let r = float_to_rational(&x);
        assert!(float_rat(&r, 120) == x);
        assert!((rat_to_f64(&r) - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_float(&float(15, 120), 30), "15");
        assert_eq!(format_f64(0.25, 10), "0.25");
        assert_eq!(format_f64(-2.5, 10), "-2.5");
        let third = float_rat(&parse_rational("1/3").unwrap(), 120);
        assert_eq!(format_float(&third, 5), "0.33333");
        assert_eq!(format_f64(1.5e-30, 3), "1.5e-30");
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation_nonzero(&IBig::from(-54), 3), 3);
        assert_eq!(valuation_nonzero(&IBig::from(1), 5), 0);
    }
}
