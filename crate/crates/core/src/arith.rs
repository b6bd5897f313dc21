//! Small integer and rational helpers shared by the exact modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `base^exp` for a possibly negative integer exponent.
pub fn rpow(base: &Rational, exp: i64) -> Rational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), exp.unsigned_abs() as usize)
    }
}

pub fn ipow(base: i64, exp: i64) -> Rational {
    rpow(&int(base), exp)
}

pub fn to_f64(r: &Rational) -> f64 {
    // Ratio::to_f64 handles huge numerators and denominators without overflow.
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut p = 3u64;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 2;
    }
    true
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = isqrt_i128(n);
    (r * r == n).then_some(r)
}

fn isqrt_i128(n: i128) -> i128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn check_discriminant(d: i64) -> Result<u64> {
    if d > 0 && d % 4 == 1 && is_prime(d as u64) {
        Ok(d as u64)
    } else {
        Err(Error::InvalidDiscriminant(d))
    }
}

/// Rational from a numerator/denominator pair, rejecting zero denominators.
pub fn rational_from_pair(pair: &[BigInt; 2]) -> Result<Rational> {
    if pair[1].is_zero() {
        return Err(Error::Schema("zero denominator".into()));
    }
    Ok(Rational::new(pair[0].clone(), pair[1].clone()))
}

pub fn rational_to_pair(r: &Rational) -> [BigInt; 2] {
    [r.numer().clone(), r.denom().clone()]
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// Renders `num/den`, or just `num` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn abs_rational(r: &Rational) -> Rational {
    r.abs()
}

pub mod serde_rational {
    //! Serializes a rational as `[num, den]` with arbitrary-size integers.
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        BigPair::from(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let pair = BigPair::deserialize(d)?;
        pair.to_rational().map_err(D::Error::custom)
    }

    /// JSON numbers of any size, kept as decimal strings through serde_json's
    /// arbitrary-precision-free path by accepting either numbers or strings.
    #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
    pub struct BigPair(pub JsonInt, pub JsonInt);

    impl From<&Rational> for BigPair {
        fn from(r: &Rational) -> Self {
            BigPair(JsonInt(r.numer().clone()), JsonInt(r.denom().clone()))
        }
    }

    impl BigPair {
        pub fn to_rational(&self) -> std::result::Result<Rational, String> {
            if self.1 .0.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(Rational::new(self.0 .0.clone(), self.1 .0.clone()))
        }
    }

    /// An integer written as a bare JSON number when it fits in 64 bits and as
    /// a decimal string otherwise.
    #[derive(Clone, Debug, PartialEq, Eq)]
    pub struct JsonInt(pub BigInt);

    impl Serialize for JsonInt {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            match self.0.to_i64() {
                Some(v) => s.serialize_i64(v),
                None => s.serialize_str(&self.0.to_string()),
            }
        }
    }

    impl<'de> Deserialize<'de> for JsonInt {
        fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
            let v = serde_json::Value::deserialize(d)?;
            match v {
                serde_json::Value::Number(n) => {
                    if let Some(i) = n.as_i64() {
                        Ok(JsonInt(BigInt::from(i)))
                    } else if let Some(u) = n.as_u64() {
                        Ok(JsonInt(BigInt::from(u)))
                    } else {
                        Err(D::Error::custom("expected an integer"))
                    }
                }
                serde_json::Value::String(s) => s
                    .parse::<BigInt>()
                    .map(JsonInt)
                    .map_err(|_| D::Error::custom("expected a decimal integer string")),
                _ => Err(D::Error::custom("expected an integer")),
            }
        }
    }
}

pub use serde_rational::{BigPair, JsonInt};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_and_divisors() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(1), 1);
    }

    #[test]
    fn discriminant_validation() {
        assert!(check_discriminant(5).is_ok());
        assert!(check_discriminant(29).is_ok());
        assert!(check_discriminant(7).is_err());
        assert!(check_discriminant(21).is_err());
        assert!(check_discriminant(-3).is_err());
    }

    #[test]
    fn rational_powers() {
        assert_eq!(ipow(2, -3), rat(1, 8));
        assert_eq!(ipow(3, 0), int(1));
        assert_eq!(fmt_rational(&rat(-6, 4)), "-3/2");
    }
}
