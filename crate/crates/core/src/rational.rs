//! Exact rational scalars.
//!
//! All series coefficients are `Rational` end to end; floating point only
//! appears when a value is evaluated or reported. `num_rational::BigRational`
//! already maintains the canonical form this crate relies on (reduced
//! fraction, positive denominator), so the type is re-exported rather than
//! wrapped, with the parse/format/convert helpers the rest of the crate needs.

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Rational from an integer.
pub fn rat_i64(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Rational `p/q`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Canonical string form `numerator/denominator` in base 10.
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator {num:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator {den:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

/// Lossless-as-possible conversion to f64.
///
/// `Ratio::to_f64` returns `NaN` once numerator and denominator both
/// overflow f64 even when the quotient is representable, so the wide case is
/// handled by shifting both parts down before dividing.
pub fn to_f64(x: &Rational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
        // Genuine overflow only when the quotient itself is out of range.
        if x.numer().bits() as i64 - x.denom().bits() as i64 > 1100 {
            return v;
        }
    }
    if x.is_zero() {
        return 0.0;
    }
    let numer = x.numer();
    let denom = x.denom();
    let nb = numer.bits() as i64;
    let db = denom.bits() as i64;
    // Keep ~96 significant bits of each side, track the binary exponent.
    let shift_n = (nb - 96).max(0);
    let shift_d = (db - 96).max(0);
    let n_red: BigInt = numer >> shift_n as usize;
    let d_red: BigInt = denom >> shift_d as usize;
    let n_f = n_red.to_f64().unwrap_or(match n_red.sign() {
        Sign::Minus => f64::NEG_INFINITY,
        _ => f64::INFINITY,
    });
    let d_f = d_red.to_f64().unwrap_or(f64::INFINITY);
    (n_f / d_f) * 2f64.powi((shift_n - shift_d) as i32)
}

/// Natural logarithm of |x| for a nonzero rational, safe for values far
/// outside f64 range.
pub fn ln_abs(x: &Rational) -> f64 {
    assert!(!x.is_zero(), "ln_abs of zero");
    let numer = x.numer().abs();
    let denom = x.denom().clone();
    let ln_big = |v: &BigInt| -> f64 {
        let bits = v.bits() as i64;
        let shift = (bits - 64).max(0);
        let top: BigInt = v >> shift as usize;
        (top.to_f64().unwrap()).ln() + (shift as f64) * std::f64::consts::LN_2
    };
    ln_big(&numer) - ln_big(&denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "-24/51", "0/1", "17", "-5/10"] {
            let v = parse_rational(s).unwrap();
            let back = parse_rational(&format_rational(&v)).unwrap();
            assert_eq!(v, back);
        }
        assert_eq!(parse_rational("-5/10").unwrap(), rat(-1, 2));
        assert_eq!(format_rational(&rat(-5, 10)), "-1/2");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn canonical_form_is_maintained() {
        let v = Rational::new(BigInt::from(6), BigInt::from(-8));
        assert_eq!(v.numer(), &BigInt::from(-3));
        assert_eq!(v.denom(), &BigInt::from(4));
    }

    #[test]
    fn wide_values_convert_finitely() {
        let big = Rational::from_integer(BigInt::one() << 2000u32)
            / Rational::from_integer((BigInt::one() << 2000u32) + 1);
        let f = to_f64(&big);
        assert!((f - 1.0).abs() < 1e-12, "got {f}");

        let huge = Rational::from_integer(BigInt::one() << 1500u32)
            / Rational::from_integer((BigInt::one() << 1400u32) + 3);
        let f = to_f64(&huge);
        assert!(f.is_finite());
        assert!((f.log2() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn ln_abs_matches_f64_in_range() {
        let v = rat(355, 113);
        assert!((ln_abs(&v) - (355.0f64 / 113.0).ln()).abs() < 1e-12);
        let w = rat(-7, 9);
        assert!((ln_abs(&w) - (7.0f64 / 9.0).ln()).abs() < 1e-12);
    }
}
