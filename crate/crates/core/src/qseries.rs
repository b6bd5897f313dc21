//! Truncated Laurent series in `q` with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, int, BigPair, Rational};
use crate::characters::{chi, l_exact};
use crate::error::{Error, Result};

/// `Σ_{n ≥ valuation} c(n) qⁿ + O(q^prec)`.
///
/// `coeffs[i]` is the coefficient of `q^{valuation + i}`; every exponent
/// below `prec` is known. The leading stored coefficient is nonzero unless
/// the series is zero to its precision, in which case `coeffs` is empty and
/// `valuation == prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QLaurentSeries {
    valuation: i64,
    coeffs: Vec<Rational>,
    prec: i64,
}

impl QLaurentSeries {
    /// Builds a series from coefficients starting at `start`, truncating or
    /// zero-padding to `prec`.
    pub fn new(start: i64, mut coeffs: Vec<Rational>, prec: i64) -> Self {
        let len = (prec - start).max(0) as usize;
        coeffs.resize(len, Rational::zero());
        let mut s = QLaurentSeries {
            valuation: start,
            coeffs,
            prec,
        };
        s.normalize();
        s
    }

    pub fn from_ints(start: i64, coeffs: &[i64], prec: i64) -> Self {
        QLaurentSeries::new(start, coeffs.iter().map(|&c| int(c)).collect(), prec)
    }

    pub fn zero(prec: i64) -> Self {
        QLaurentSeries::new(prec, Vec::new(), prec)
    }

    pub fn one(prec: i64) -> Self {
        QLaurentSeries::monomial(0, int(1), prec)
    }

    pub fn monomial(n: i64, c: Rational, prec: i64) -> Self {
        if n >= prec {
            return QLaurentSeries::zero(prec);
        }
        QLaurentSeries::new(n, vec![c], prec)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.valuation += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.valuation = self.prec;
        }
    }

    /// Lowest exponent with a nonzero coefficient (or `prec` for zero).
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `qⁿ`; panics if `n ≥ prec`.
    pub fn coeff(&self, n: i64) -> Rational {
        assert!(
            n < self.prec,
            "coefficient q^{n} unknown at precision {}",
            self.prec
        );
        if n < self.valuation {
            Rational::zero()
        } else {
            self.coeffs[(n - self.valuation) as usize].clone()
        }
    }

    pub fn coeff_ref(&self, n: i64) -> Option<&Rational> {
        if n < self.valuation || n >= self.prec {
            None
        } else {
            Some(&self.coeffs[(n - self.valuation) as usize])
        }
    }

    /// Nonzero `(n, c(n))` pairs in increasing order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        let v = self.valuation;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (v + i as i64, c))
    }

    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        let keep = (prec - self.valuation).max(0) as usize;
        QLaurentSeries::new(
            self.valuation,
            self.coeffs[..keep.min(self.coeffs.len())].to_vec(),
            prec,
        )
    }

    /// The terms with negative exponent, `[(n, c(n))]` in increasing order.
    pub fn principal_part(&self) -> Vec<(i64, Rational)> {
        self.terms()
            .take_while(|(n, _)| *n < 0)
            .map(|(n, c)| (n, c.clone()))
            .collect()
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QLaurentSeries::new(
            self.valuation,
            self.coeffs.iter().map(|c| c * r).collect(),
            self.prec,
        )
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        QLaurentSeries::new(self.valuation + k, self.coeffs.clone(), self.prec + k)
    }

    pub fn checked_mul(&self, other: &Self) -> Self {
        let prec = (self.valuation + other.prec).min(other.valuation + self.prec);
        let val = self.valuation + other.valuation;
        if self.is_zero() || other.is_zero() || val >= prec {
            return QLaurentSeries::zero(prec);
        }
        let len = (prec - val) as usize;
        let mut out = vec![Rational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        QLaurentSeries::new(val, out, prec)
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return QLaurentSeries::one(self.prec - self.valuation);
        }
        let mut acc: Option<QLaurentSeries> = None;
        let mut base = self.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => &a * &base,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = &base * &base;
        }
        acc.expect("e > 0")
    }

    /// Multiplicative inverse; the result has valuation `−v` and the same
    /// relative precision as `self`.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let v = self.valuation;
        let rel = (self.prec - v) as usize;
        let a0_inv = self.coeffs[0].recip();
        let mut b: Vec<Rational> = Vec::with_capacity(rel);
        b.push(a0_inv.clone());
        for n in 1..rel {
            let mut acc = Rational::zero();
            for k in 1..=n {
                let a = &self.coeffs[k];
                if !a.is_zero() {
                    acc += a * &b[n - k];
                }
            }
            b.push(-acc * &a0_inv);
        }
        Ok(QLaurentSeries::new(-v, b, -v + rel as i64))
    }

    /// Exponent `n ↦ D·n`; precision scales by `D`.
    pub fn substitute_qd(&self, d: u64) -> Self {
        let d = d as i64;
        if self.is_zero() {
            return QLaurentSeries::zero(self.prec * d);
        }
        let mut out = vec![Rational::zero(); ((self.prec - self.valuation) * d) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * d as usize] = c.clone();
        }
        QLaurentSeries::new(self.valuation * d, out, self.prec * d)
    }

    /// Evaluation at a real `q` with `|q| < 1`, for diagnostics.
    pub fn eval_real(&self, q: f64) -> f64 {
        self.terms()
            .map(|(n, c)| arith::to_f64(c) * q.powi(n as i32))
            .sum()
    }
}

impl<'a> Add<&'a QLaurentSeries> for &'a QLaurentSeries {
    type Output = QLaurentSeries;
    fn add(self, rhs: &'a QLaurentSeries) -> QLaurentSeries {
        let prec = self.prec.min(rhs.prec);
        let start = self.valuation.min(rhs.valuation).min(prec);
        let len = (prec - start) as usize;
        let mut out = vec![Rational::zero(); len];
        for s in [self, rhs] {
            for (i, c) in s.coeffs.iter().enumerate() {
                let idx = (s.valuation - start) as usize + i;
                if idx >= len {
                    break;
                }
                out[idx] += c;
            }
        }
        QLaurentSeries::new(start, out, prec)
    }
}

impl Add for QLaurentSeries {
    type Output = QLaurentSeries;
    fn add(self, rhs: QLaurentSeries) -> QLaurentSeries {
        &self + &rhs
    }
}

impl Neg for &QLaurentSeries {
    type Output = QLaurentSeries;
    fn neg(self) -> QLaurentSeries {
        self.scale(&int(-1))
    }
}

impl<'a> Sub<&'a QLaurentSeries> for &'a QLaurentSeries {
    type Output = QLaurentSeries;
    fn sub(self, rhs: &'a QLaurentSeries) -> QLaurentSeries {
        self + &(-rhs)
    }
}

impl Sub for QLaurentSeries {
    type Output = QLaurentSeries;
    fn sub(self, rhs: QLaurentSeries) -> QLaurentSeries {
        &self - &rhs
    }
}

impl<'a> Mul<&'a QLaurentSeries> for &'a QLaurentSeries {
    type Output = QLaurentSeries;
    fn mul(self, rhs: &'a QLaurentSeries) -> QLaurentSeries {
        self.checked_mul(rhs)
    }
}

impl Mul for QLaurentSeries {
    type Output = QLaurentSeries;
    fn mul(self, rhs: QLaurentSeries) -> QLaurentSeries {
        self.checked_mul(&rhs)
    }
}

impl fmt::Display for QLaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})*q^{}", arith::fmt_rational(c), n)?;
        }
        write!(
            f,
            "{}O(q^{})",
            if self.is_zero() { "" } else { " + " },
            self.prec
        )
    }
}

/// Inverse of a series with nonzero leading coefficient, truncated at `prec`.
pub fn invert_unit_series(f: &QLaurentSeries, prec: i64) -> Result<QLaurentSeries> {
    Ok(f.inverse()?.truncate(prec))
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    valuation: i64,
    prec: i64,
    coeffs: Vec<BigPair>,
}

/// Largest `prec − valuation` accepted from external input.
pub const MAX_SERIES_LEN: i64 = 1 << 20;

impl QLaurentSeries {
    /// Builds from untrusted `[num, den]` pairs, rejecting malformed shapes.
    pub fn from_pairs(valuation: i64, pairs: Vec<Rational>, prec: i64) -> Result<Self> {
        if prec < valuation {
            return Err(Error::Schema(format!(
                "prec {prec} below valuation {valuation}"
            )));
        }
        if prec
            .checked_sub(valuation)
            .map_or(true, |l| l > MAX_SERIES_LEN)
        {
            return Err(Error::Schema("series too long".into()));
        }
        if pairs.len() as i64 > prec - valuation {
            return Err(Error::Schema(format!(
                "{} coefficients do not fit between q^{valuation} and q^{prec}",
                pairs.len()
            )));
        }
        Ok(QLaurentSeries::new(valuation, pairs, prec))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("series serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl Serialize for QLaurentSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson {
            valuation: self.valuation,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(BigPair::from).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QLaurentSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = SeriesJson::deserialize(d)?;
        let coeffs = raw
            .coeffs
            .iter()
            .map(|p| p.to_rational())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        QLaurentSeries::from_pairs(raw.valuation, coeffs, raw.prec).map_err(D::Error::custom)
    }
}

fn divisor_power_sum(n: u64, k: u32) -> BigInt {
    arith::divisors(n)
        .into_iter()
        .map(|d| num_traits::pow(BigInt::from(d), k as usize))
        .sum()
}

/// `1 + c Σ_{n≥1} σ_k(n) qⁿ`.
fn level_one_eisenstein(c: i64, k: u32, prec: i64) -> QLaurentSeries {
    let mut coeffs = vec![int(1)];
    for n in 1..prec.max(1) {
        coeffs.push(Rational::from_integer(divisor_power_sum(n as u64, k) * c));
    }
    QLaurentSeries::new(0, coeffs, prec)
}

pub fn e4(prec: i64) -> QLaurentSeries {
    level_one_eisenstein(240, 3, prec)
}

pub fn e6(prec: i64) -> QLaurentSeries {
    level_one_eisenstein(-504, 5, prec)
}

/// `Δ = q Π (1 − qⁿ)²⁴`, as `q·(η³/q^{1/8})⁸` with Jacobi's identity
/// `Π(1 − qⁿ)³ = Σ (−1)^k (2k+1) q^{k(k+1)/2}`.
pub fn delta(prec: i64) -> QLaurentSeries {
    let rel = (prec - 1).max(0);
    let mut cube = vec![Rational::zero(); rel as usize];
    let mut k = 0i64;
    while k * (k + 1) / 2 < rel {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        cube[(k * (k + 1) / 2) as usize] = int(sign * (2 * k + 1));
        k += 1;
    }
    let cube = QLaurentSeries::new(0, cube, rel);
    let p8 = cube.pow(8);
    p8.shift(1)
}

/// `j = E₄³/Δ`.
pub fn j_invariant(prec: i64) -> QLaurentSeries {
    // E₄³/Δ has valuation −1; Δ must be known to relative precision prec + 1.
    let d = delta(prec + 2);
    let e = e4(prec + 1);
    let inv = d.inverse().expect("Δ has leading coefficient 1");
    (&e.pow(3) * &inv).truncate(prec)
}

/// The plus-space Eisenstein series of even weight `k ≥ 2` and character
/// `χ_D`:
/// `1 + (2/L(1−k, χ_D)) Σ_{n≥1} Σ_{d|n} d^{k−1}(χ_D(d) + χ_D(n/d)) qⁿ`.
pub fn eisenstein_plus(d: u64, k: u32, prec: i64) -> Result<QLaurentSeries> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "weight must be even and at least 2, got {k}"
        )));
    }
    let l = l_exact(d as i64, 1 - k as i64)?;
    let scale = int(2) / l;
    let mut coeffs = vec![int(1)];
    for n in 1..prec.max(1) {
        let mut acc = BigInt::zero();
        for dv in arith::divisors(n as u64) {
            let w = chi(d, dv as i64) + chi(d, n / dv as i64);
            if w != 0 {
                acc += num_traits::pow(BigInt::from(dv), (k - 1) as usize) * w;
            }
        }
        coeffs.push(Rational::from_integer(acc) * &scale);
    }
    Ok(QLaurentSeries::new(0, coeffs, prec))
}

/// `E₁₂⁺` for discriminant `D`.
pub fn e12plus(d: u64, prec: i64) -> Result<QLaurentSeries> {
    eisenstein_plus(d, 12, prec)
}

/// Names accepted by [`standard_series`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StandardSeries {
    Delta,
    E4,
    E6,
    J,
    E12Plus(u64),
}

pub fn standard_series(name: StandardSeries, prec: i64) -> Result<QLaurentSeries> {
    if prec < 1 {
        return Err(Error::InvalidArgument(format!(
            "prec must be at least 1, got {prec}"
        )));
    }
    Ok(match name {
        StandardSeries::Delta => delta(prec),
        StandardSeries::E4 => e4(prec),
        StandardSeries::E6 => e6(prec),
        StandardSeries::J => j_invariant(prec),
        StandardSeries::E12Plus(d) => {
            arith::check_discriminant(d as i64)?;
            e12plus(d, prec)?
        }
    })
}

/// Exponents `n < prec` with `c(n) ≠ 0` and `χ_D(n) = −ε`.
pub fn plus_space_violations(f: &QLaurentSeries, d: u64, epsilon: i8) -> Vec<i64> {
    f.terms()
        .filter(|(n, _)| chi(d, *n) == -epsilon)
        .map(|(n, _)| n)
        .collect()
}

impl QLaurentSeries {
    pub fn is_one(&self) -> bool {
        self.valuation == 0
            && self.coeffs.len() >= 1
            && self.coeffs[0].is_one()
            && self.coeffs[1..].iter().all(|c| c.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    /// `q Π_{n<N}(1 − qⁿ)²⁴` expanded with i128 arithmetic.
    fn delta_oracle(prec: usize) -> Vec<i128> {
        let mut p = vec![0i128; prec];
        p[0] = 1;
        for n in 1..prec {
            for _ in 0..24 {
                for i in (n..prec).rev() {
                    p[i] -= p[i - n];
                }
            }
        }
        let mut out = vec![0i128; prec + 1];
        out[1..].copy_from_slice(&p);
        out
    }

    #[test]
    fn delta_matches_product() {
        let d = delta(30);
        let oracle = delta_oracle(29);
        for n in 0..30 {
            assert_eq!(
                d.coeff(n),
                Rational::from_integer(BigInt::from(oracle[n as usize])),
                "n={n}"
            );
        }
        assert_eq!(d.coeff(2), int(-24));
        assert_eq!(d.coeff(3), int(252));
    }

    #[test]
    fn j_coefficients() {
        let j = j_invariant(5);
        assert_eq!(j.valuation(), -1);
        assert_eq!(j.coeff(-1), int(1));
        assert_eq!(j.coeff(0), int(744));
        assert_eq!(j.coeff(1), int(196884));
        assert_eq!(j.coeff(2), int(21493760));
        assert_eq!(j.prec(), 5);
    }

    #[test]
    fn inverse_of_delta() {
        let d = delta(20);
        let inv = d.inverse().unwrap();
        assert_eq!(inv.valuation(), -1);
        assert_eq!(inv.coeff(0), int(24));
        // 24-coloured partitions of 2
        assert_eq!(inv.coeff(1), int(324));
        assert!((&d * &inv).is_one());
        let g = QLaurentSeries::from_ints(0, &[1, -1], 10);
        let gi = invert_unit_series(&g, 10).unwrap();
        for n in 0..10 {
            assert_eq!(gi.coeff(n), int(1));
        }
        assert!(QLaurentSeries::zero(5).inverse().is_err());
    }

    #[test]
    fn j_times_delta_is_e4_cubed() {
        let prec = 25;
        let lhs = &j_invariant(prec) * &delta(prec + 1);
        let rhs = e4(prec).pow(3);
        let p = lhs.prec().min(rhs.prec());
        assert_eq!(lhs.truncate(p), rhs.truncate(p));
    }

    #[test]
    fn e4_e6_relation_to_delta() {
        // 1728 Δ = E₄³ − E₆²
        let p = 30;
        let lhs = delta(p).scale(&int(1728));
        let rhs = &e4(p).pow(3) - &e6(p).pow(2);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution() {
        let d5 = delta(10).substitute_qd(5);
        assert_eq!(d5.valuation(), 5);
        assert_eq!(d5.prec(), 50);
        let f = QLaurentSeries::from_ints(0, &[1, 1], 4).substitute_qd(7);
        assert_eq!(f.coeff(7), int(1));
        assert_eq!(f.coeff(1), int(0));
        assert_eq!(j_invariant(3).substitute_qd(13).valuation(), -13);
    }

    #[test]
    fn eisenstein_plus_space() {
        let e = e12plus(5, 60).unwrap();
        assert_eq!(e.coeff(1), int(4) / l_exact(5, -11).unwrap());
        assert!(plus_space_violations(&e, 5, 1).is_empty());
        let e2 = eisenstein_plus(5, 2, 200).unwrap();
        assert!(plus_space_violations(&e2, 5, 1).is_empty());
        for n in 1..60 {
            assert_eq!(
                e2.coeff(n),
                crate::divisor_sums::eisenstein_coeff(5, n).unwrap()
            );
        }
        let q2 = QLaurentSeries::monomial(2, int(1), 10);
        assert_eq!(plus_space_violations(&q2, 5, 1), vec![2]);
        for d in [13, 17, 29] {
            for k in [2, 4, 6, 8, 10, 12, 14] {
                let e = eisenstein_plus(d, k, 80).unwrap();
                assert!(plus_space_violations(&e, d, 1).is_empty());
            }
        }
    }

    #[test]
    fn precision_bookkeeping() {
        let a = QLaurentSeries::from_ints(-2, &[1, 2, 3], 5);
        let b = QLaurentSeries::from_ints(1, &[1], 3);
        let c = &a * &b;
        // a known to q^5, b known to q^3: product known to min(-2+3, 1+5) = 1
        assert_eq!(c.prec(), 1);
        assert_eq!(c.coeff(-1), int(1));
        assert_eq!(c.coeff(0), int(2));
        assert_eq!((&a + &b).prec(), 3);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let f = QLaurentSeries::new(-1, vec![rat(1, 3), int(0), rat(-5, 2)], 4);
        let js = serde_json::to_string(&f).unwrap();
        let g: QLaurentSeries = serde_json::from_str(&js).unwrap();
        assert_eq!(f, g);
        assert!(QLaurentSeries::from_json_str(r#"{"valuation":0,"prec":-1,"coeffs":[]}"#).is_err());
        assert!(
            QLaurentSeries::from_json_str(r#"{"valuation":0,"prec":1,"coeffs":[[1,0]]}"#).is_err()
        );
        assert!(QLaurentSeries::from_json_str(
            r#"{"valuation":0,"prec":1,"coeffs":[[1,1],[2,1]]}"#
        )
        .is_err());
        let big = r#"{"valuation":0,"prec":2,"coeffs":[["123456789012345678901234567890",7]]}"#;
        let h = QLaurentSeries::from_json_str(big).unwrap();
        assert_eq!(
            serde_json::from_value::<QLaurentSeries>(h.to_json_value()).unwrap(),
            h
        );
    }

    fn arb_series() -> impl Strategy<Value = QLaurentSeries> {
        (
            -3i64..3,
            proptest::collection::vec(-20i64..20, 1..12),
            0i64..4,
        )
            .prop_map(|(v, cs, extra)| {
                let prec = v + cs.len() as i64 + extra;
                QLaurentSeries::from_ints(v, &cs, prec)
            })
    }

    proptest! {
        #[test]
        fn associativity(a in arb_series(), b in arb_series(), c in arb_series()) {
            let l = &(&a * &b) * &c;
            let r = &a * &(&b * &c);
            let p = l.prec().min(r.prec());
            prop_assert_eq!(l.truncate(p), r.truncate(p));
        }

        #[test]
        fn distributivity(a in arb_series(), b in arb_series(), c in arb_series()) {
            let l = &a * &(&b + &c);
            let r = &(&a * &b) + &(&a * &c);
            let p = l.prec().min(r.prec());
            prop_assert_eq!(l.truncate(p), r.truncate(p));
        }

        #[test]
        fn inverse_property(cs in proptest::collection::vec(-5i64..5, 1..15)) {
            let mut cs = cs;
            cs[0] = 1;
            let f = QLaurentSeries::from_ints(0, &cs, cs.len() as i64);
            let prod = &f * &f.inverse().unwrap();
            prop_assert!(prod.is_one());
        }

        #[test]
        fn substitution_is_homomorphism(a in arb_series(), b in arb_series(), d in prop::sample::select(vec![5u64, 13])) {
            let l = (&a * &b).substitute_qd(d);
            let r = &a.substitute_qd(d) * &b.substitute_qd(d);
            let p = l.prec().min(r.prec());
            prop_assert_eq!(l.truncate(p), r.truncate(p));
            let s = (&a + &b).substitute_qd(d);
            let t = &a.substitute_qd(d) + &b.substitute_qd(d);
            prop_assert_eq!(s, t);
        }
    }
}
