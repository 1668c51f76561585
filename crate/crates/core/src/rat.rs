//! Exact rational scalar helpers shared across the crate.

use num::bigint::{BigInt, Sign};
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// Shorthand constructor for an integer-valued rational.
pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Builds `num/den`, reducing and normalizing the sign.
pub fn rat(num: i64, den: i64) -> BigRational {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses the exchange syntax: either an integer literal or `p/q`.
///
/// Rejects unreduced fractions, non-positive denominators and empty input, so
/// a file round-trips to the exact same byte representation.
pub fn parse_rat(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational literal".into());
    }
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|e| format!("bad integer `{s}`: {e}"))?;
            Ok(BigRational::from_integer(n))
        }
        Some((num, den)) => {
            let n: BigInt = num
                .parse()
                .map_err(|e| format!("bad numerator `{num}`: {e}"))?;
            let d: BigInt = den
                .parse()
                .map_err(|e| format!("bad denominator `{den}`: {e}"))?;
            if d.sign() != Sign::Plus {
                return Err(format!("denominator must be positive in `{s}`"));
            }
            if num::integer::gcd(n.abs(), d.clone()) != BigInt::one() {
                return Err(format!("unreduced fraction `{s}`"));
            }
            Ok(BigRational::new_raw(n, d))
        }
    }
}

/// Renders a rational in the exchange syntax (`p` or `p/q`).
pub fn format_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Floor of a rational as a big integer.
pub fn rat_floor(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

/// Nearest integer, rounding ties towards +infinity (`floor(x + 1/2)`).
pub fn round_nearest(r: &BigRational) -> BigInt {
    rat_floor(&(r + BigRational::new(BigInt::one(), BigInt::from(2))))
}

/// Largest integer `k >= 0` with `k^2 <= r`, or `None` for negative `r`.
pub fn rat_isqrt_floor(r: &BigRational) -> Option<BigInt> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(BigInt::zero());
    }
    let mut k = rat_floor(r).sqrt();
    let as_rat = |k: &BigInt| BigRational::from_integer(k * k);
    while as_rat(&(k.clone() + 1)) <= *r {
        k += 1;
    }
    while as_rat(&k) > *r {
        k -= 1;
    }
    Some(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_accepts_reduced_only() {
        assert_eq!(parse_rat("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rat("-7").unwrap(), rat_int(-7));
        assert!(parse_rat("2/4").is_err());
        assert!(parse_rat("1/-2").is_err());
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn round_ties_up() {
        assert_eq!(round_nearest(&rat(1, 2)), BigInt::from(1));
        assert_eq!(round_nearest(&rat(-1, 2)), BigInt::from(0));
        assert_eq!(round_nearest(&rat(-3, 2)), BigInt::from(-1));
    }

    #[test]
    fn isqrt_floor_matches_brute_force() {
        for n in 0..200i64 {
            let r = rat(n, 3);
            let k = rat_isqrt_floor(&r).unwrap();
            assert!(BigRational::from_integer(k.clone() * k.clone()) <= r);
            let k1 = k + 1;
            assert!(BigRational::from_integer(k1.clone() * k1) > r);
        }
    }
}
