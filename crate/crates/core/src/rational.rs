//! Exact rational scalars and the exact rotations used by the generators.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact scalar used for every coordinate and time in the crate.
pub type Q = BigRational;

/// Resolution used for the half-angle tangent of non-quarter rotations.
const TAN_BITS: u32 = 30;

pub fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn q_frac(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact conversion of a finite double. Every finite `f64` is a dyadic rational.
pub fn q_from_f64(v: f64) -> Option<Q> {
    if v.is_finite() {
        Q::from_float(v)
    } else {
        None
    }
}

/// `"p/q"` for non-integers, `"p"` for integers.
pub fn fmt_q(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Decimal rendering with a fixed number of fractional digits (truncated toward zero
/// after rounding half away from zero). Deterministic for a given value.
pub fn fmt_decimal(q: &Q, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = q * Q::from_integer(scale.clone());
    let rounded = scaled.round().to_integer();
    let neg = rounded.is_negative();
    let abs = rounded.abs();
    let int_part = &abs / &scale;
    let frac_part = &abs % &scale;
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    s.push_str(&int_part.to_string());
    if digits > 0 {
        s.push('.');
        let f = frac_part.to_string();
        for _ in f.len()..digits as usize {
            s.push('0');
        }
        s.push_str(&f);
    }
    s
}

/// Parses `"p/q"`, an integer, or a decimal literal (with optional exponent) exactly.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_digits, frac_digits) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_digits.is_empty() && frac_digits.is_empty() {
        return None;
    }
    if !int_digits
        .bytes()
        .chain(frac_digits.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_digits}{frac_digits}");
    let mut value = Q::from_integer(digits.parse::<BigInt>().ok()?);
    let shift = exp - frac_digits.len() as i32;
    let ten = Q::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= ten.pow(shift);
    } else {
        value /= ten.pow(-shift);
    }
    Some(if neg { -value } else { value })
}

/// A rotation matrix `[[c, -s], [s, c]]` with `c² + s² = 1` holding exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactRotation {
    pub cos: Q,
    pub sin: Q,
}

impl ExactRotation {
    pub fn identity() -> Self {
        Self {
            cos: Q::one(),
            sin: Q::zero(),
        }
    }

    /// Rotation by `turns` full turns counterclockwise.
    ///
    /// Multiples of a quarter turn are exact. Other angles go through a rational
    /// half-angle tangent rounded to 2^-30, so the matrix is an exact isometry whose
    /// angle is within ~1e-9 of the requested one.
    pub fn from_turns(turns: &Q) -> Self {
        let quarters = turns * q_int(4);
        let whole = quarters.floor();
        let rem = &quarters - &whole;
        let k = whole.to_integer().mod_floor_i64(4);
        let base = if rem.is_zero() {
            Self::identity()
        } else {
            let angle = q_to_f64(&rem) * PI / 2.0;
            let scale = (1u64 << TAN_BITS) as f64;
            let u = Q::new(
                BigInt::from(((angle / 2.0).tan() * scale).round() as i64),
                BigInt::from(1u64 << TAN_BITS),
            );
            let u2 = &u * &u;
            let den = Q::one() + &u2;
            Self {
                cos: (Q::one() - &u2) / &den,
                sin: (&u * q_int(2)) / &den,
            }
        };
        base.quarter(k)
    }

    fn quarter(self, k: i64) -> Self {
        let Self { cos, sin } = self;
        match k {
            0 => Self { cos, sin },
            1 => Self {
                cos: -sin,
                sin: cos,
            },
            2 => Self {
                cos: -cos,
                sin: -sin,
            },
            _ => Self {
                cos: sin,
                sin: -cos,
            },
        }
    }

    pub fn apply(&self, x: &Q, y: &Q) -> (Q, Q) {
        (&self.cos * x - &self.sin * y, &self.sin * x + &self.cos * y)
    }
}

trait ModFloor {
    fn mod_floor_i64(&self, m: i64) -> i64;
}

impl ModFloor for BigInt {
    fn mod_floor_i64(&self, m: i64) -> i64 {
        use num_integer::Integer;
        self.mod_floor(&BigInt::from(m)).to_i64().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_q("1/3"), Some(q_frac(1, 3)));
        assert_eq!(parse_q("-4"), Some(q_int(-4)));
        assert_eq!(parse_q("0.25"), Some(q_frac(1, 4)));
        assert_eq!(parse_q("1e-3"), Some(q_frac(1, 1000)));
        assert_eq!(parse_q("-.5"), Some(q_frac(-1, 2)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(parse_q("abc"), None);
        assert_eq!(parse_q(""), None);
    }

    #[test]
    fn formats_round_trip() {
        for q in [q_frac(7, 12), q_int(3), q_frac(-1, 6)] {
            assert_eq!(parse_q(&fmt_q(&q)), Some(q));
        }
        assert_eq!(fmt_decimal(&q_frac(2, 3), 4), "0.6667");
        assert_eq!(fmt_decimal(&q_frac(-1, 8), 2), "-0.13");
        assert_eq!(fmt_decimal(&q_int(1), 3), "1.000");
    }

    #[test]
    fn rotations_are_exact_isometries() {
        for t in [
            q_frac(1, 7),
            q_frac(3, 8),
            q_frac(5, 16),
            q_frac(-2, 3),
            q_frac(9, 5),
        ] {
            let r = ExactRotation::from_turns(&t);
            assert_eq!(&r.cos * &r.cos + &r.sin * &r.sin, Q::one());
            let want = q_to_f64(&t) * 2.0 * PI;
            assert!((q_to_f64(&r.cos) - want.cos()).abs() < 1e-8);
            assert!((q_to_f64(&r.sin) - want.sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn quarter_turns_are_exact() {
        let half = ExactRotation::from_turns(&q_frac(1, 2));
        assert_eq!(half.cos, q_int(-1));
        assert_eq!(half.sin, q_int(0));
        assert_eq!(
            ExactRotation::from_turns(&q_int(1)),
            ExactRotation::identity()
        );
        let three_q = ExactRotation::from_turns(&q_frac(3, 4));
        assert_eq!((three_q.cos, three_q.sin), (q_int(0), q_int(-1)));
    }
}
