//! Exact integer and rational helpers shared by the counting code.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision nonnegative count.
pub type BigCount = BigUint;
/// Exact rational companion used for weights and probabilities.
pub type Ratio = BigRational;

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Binomial coefficient with `C(a, b) = 0` whenever `b < 0`, `b > a` or `a < 0`.
pub fn binomial(a: i64, b: i64) -> BigUint {
    if b < 0 || a < 0 || b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b) as u64;
    let a = a as u64;
    let mut acc = BigUint::one();
    for k in 0..b {
        acc = acc * (a - k) / (k + 1);
    }
    acc
}

pub fn ratio_int(v: impl Into<BigInt>) -> Ratio {
    Ratio::from_integer(v.into())
}

pub fn ratio_uint(v: &BigUint) -> Ratio {
    Ratio::from_integer(BigInt::from(v.clone()))
}

/// `base^exp` for a possibly negative exponent, with `0^0 = 1`.
pub fn ratio_pow(base: &Ratio, exp: i64) -> Result<Ratio> {
    if exp == 0 {
        return Ok(Ratio::one());
    }
    if base.is_zero() {
        if exp < 0 {
            return Err(Error::NonIntegerResult("zero raised to a negative power".into()));
        }
        return Ok(Ratio::zero());
    }
    let e = exp.unsigned_abs();
    let numer = num_traits::pow::pow(base.numer().clone(), e as usize);
    let denom = num_traits::pow::pow(base.denom().clone(), e as usize);
    Ok(if exp > 0 { Ratio::new(numer, denom) } else { Ratio::new(denom, numer) })
}

/// Converts an exact rational to a count, failing if it is not a nonnegative integer.
pub fn to_count(value: &Ratio, what: &str) -> Result<BigCount> {
    if !value.is_integer() {
        return Err(Error::NonIntegerResult(format!("{what} evaluated to {value}")));
    }
    if value.is_negative() {
        return Err(Error::NonIntegerResult(format!("{what} evaluated to negative {value}")));
    }
    Ok(value.to_integer().to_biguint().expect("nonnegative"))
}

pub fn count_to_u64(c: &BigCount) -> Option<u64> {
    c.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_edges() {
        assert_eq!(binomial(8, 3), BigUint::from(56u32));
        assert_eq!(binomial(3, 4), BigUint::zero());
        assert_eq!(binomial(3, -1), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(-1, 0), BigUint::zero());
    }

    #[test]
    fn pow_conventions() {
        assert_eq!(ratio_pow(&Ratio::zero(), 0).unwrap(), Ratio::one());
        assert_eq!(ratio_pow(&ratio_int(2), -2).unwrap(), Ratio::new(1.into(), 4.into()));
        assert!(ratio_pow(&Ratio::zero(), -1).is_err());
    }

    #[test]
    fn integrality() {
        assert!(to_count(&Ratio::new(3.into(), 2.into()), "x").is_err());
        assert_eq!(to_count(&ratio_int(6), "x").unwrap(), BigUint::from(6u32));
    }
}
