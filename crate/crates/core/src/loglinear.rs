//! Exact numbers of the form `c₀ + Σ_p c_p·log p` with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, int, Rational};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LogLinear {
    constant: Rational,
    terms: BTreeMap<u64, Rational>,
}

impl LogLinear {
    pub fn zero() -> Self {
        LogLinear::default()
    }

    pub fn constant(c: Rational) -> Self {
        LogLinear {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    /// `coeff · log n`, expanded over the prime factors of `n`.
    pub fn log_of(n: u64, coeff: Rational) -> Self {
        assert!(n >= 1, "log of zero");
        let mut out = LogLinear::zero();
        for (p, e) in arith::factorize(n) {
            out.add_log_prime(p, &coeff * int(e as i64));
        }
        out
    }

    pub fn add_log_prime(&mut self, p: u64, c: Rational) {
        let entry = self.terms.entry(p).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    /// Coefficient of `log p`; zero when absent.
    pub fn coeff(&self, p: u64) -> Rational {
        self.terms.get(&p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(p, c)| (*p, c))
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return LogLinear::zero();
        }
        LogLinear {
            constant: &self.constant * r,
            terms: self.terms.iter().map(|(p, c)| (*p, c * r)).collect(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        // Sum smallest magnitudes first for reproducibility.
        let mut parts: Vec<f64> = self
            .terms
            .iter()
            .map(|(p, c)| arith::to_f64(c) * (*p as f64).ln())
            .collect();
        parts.push(arith::to_f64(&self.constant));
        parts.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        parts.iter().sum()
    }
}

impl Add for &LogLinear {
    type Output = LogLinear;
    fn add(self, rhs: &LogLinear) -> LogLinear {
        let mut out = self.clone();
        out.constant += &rhs.constant;
        for (p, c) in &rhs.terms {
            out.add_log_prime(*p, c.clone());
        }
        out
    }
}

impl Add for LogLinear {
    type Output = LogLinear;
    fn add(self, rhs: LogLinear) -> LogLinear {
        &self + &rhs
    }
}

impl Neg for &LogLinear {
    type Output = LogLinear;
    fn neg(self) -> LogLinear {
        self.scale(&int(-1))
    }
}

impl Neg for LogLinear {
    type Output = LogLinear;
    fn neg(self) -> LogLinear {
        self.scale(&int(-1))
    }
}

impl Sub for &LogLinear {
    type Output = LogLinear;
    fn sub(self, rhs: &LogLinear) -> LogLinear {
        self + &(-rhs)
    }
}

impl Sub for LogLinear {
    type Output = LogLinear;
    fn sub(self, rhs: LogLinear) -> LogLinear {
        &self - &rhs
    }
}

impl Mul<&Rational> for &LogLinear {
    type Output = LogLinear;
    fn mul(self, rhs: &Rational) -> LogLinear {
        self.scale(rhs)
    }
}

impl fmt::Display for LogLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.constant.is_zero() || self.terms.is_empty() {
            write!(f, "{}", arith::fmt_rational(&self.constant))?;
            first = false;
        }
        for (p, c) in &self.terms {
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = arith::fmt_rational(&c.abs());
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag == "1" {
                write!(f, "log({p})")?;
            } else {
                write!(f, "{mag}*log({p})")?;
            }
            first = false;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct LogLinearJson {
    #[serde(with = "arith::serde_rational")]
    constant: Rational,
    log_terms: Vec<LogTermJson>,
}

#[derive(Serialize, Deserialize)]
struct LogTermJson {
    p: u64,
    #[serde(with = "arith::serde_rational")]
    c: Rational,
}

impl Serialize for LogLinear {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LogLinearJson {
            constant: self.constant.clone(),
            log_terms: self
                .terms
                .iter()
                .map(|(p, c)| LogTermJson {
                    p: *p,
                    c: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogLinear {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = LogLinearJson::deserialize(d)?;
        let mut out = LogLinear::constant(raw.constant);
        for t in raw.log_terms {
            if t.p < 2 || !arith::is_prime(t.p) {
                return Err(serde::de::Error::custom(format!(
                    "log term base {} is not prime",
                    t.p
                )));
            }
            out.add_log_prime(t.p, t.c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn log_of_composite_factors() {
        let x = LogLinear::log_of(12, rat(1, 2));
        assert_eq!(x.coeff(2), int(1));
        assert_eq!(x.coeff(3), rat(1, 2));
        assert!((x.to_f64() - 0.5 * 12f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn cancellation_is_canonical() {
        let a = LogLinear::log_of(6, int(1));
        let b = LogLinear::log_of(2, int(1)) + LogLinear::log_of(3, int(1));
        assert_eq!(a, b);
        assert!((&a - &b).is_zero());
        assert_eq!((&a - &b).terms().count(), 0);
    }

    #[test]
    fn display_and_json() {
        let x = LogLinear::constant(rat(3, 2)) + LogLinear::log_of(2, rat(-1, 3));
        assert_eq!(x.to_string(), "3/2 - 1/3*log(2)");
        let js = serde_json::to_string(&x).unwrap();
        let back: LogLinear = serde_json::from_str(&js).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<LogLinear>(
            r#"{"constant":[0,1],"log_terms":[{"p":4,"c":[1,1]}]}"#
        )
        .is_err());
    }
}
