//! Exact arithmetic in the real quadratic field `K = Q(√D)` for a prime
//! discriminant `D ≡ 1 (mod 4)`.
//!
//! Elements are stored as `a + b√D` with rational `a`, `b`. Lattice
//! membership (`O_K`, the inverse different) is a predicate rather than a
//! type constraint, so one element type serves every lattice used here.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, int, rat, Rational};
use crate::error::{Error, Result};

/// The field data attached to a discriminant.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldCtx {
    d: u64,
    sqrt_d: f64,
    eps0: QuadElem,
}

impl FieldCtx {
    pub fn new(d: i64) -> Result<Self> {
        let eps0 = fundamental_unit(d)?;
        let d = d as u64;
        Ok(FieldCtx {
            d,
            sqrt_d: (d as f64).sqrt(),
            eps0,
        })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn sqrt_d(&self) -> f64 {
        self.sqrt_d
    }

    /// The fundamental unit `ε₀ > 1`; it has norm −1.
    pub fn eps0(&self) -> &QuadElem {
        &self.eps0
    }

    pub fn elem(&self, a: Rational, b: Rational) -> QuadElem {
        QuadElem::new(self.d, a, b)
    }

    pub fn zero(&self) -> QuadElem {
        QuadElem::zero(self.d)
    }

    pub fn one(&self) -> QuadElem {
        QuadElem::from_rational(self.d, int(1))
    }

    /// `√D` itself.
    pub fn sqrt_elem(&self) -> QuadElem {
        QuadElem::new(self.d, int(0), int(1))
    }

    /// `ω = (1 + √D)/2`, the second element of the integral basis `(1, ω)`.
    pub fn omega(&self) -> QuadElem {
        QuadElem::new(self.d, rat(1, 2), rat(1, 2))
    }

    /// `(l₁ + l₂ ω)/√D`: integer coordinates on the inverse different.
    pub fn from_inverse_different_coords(&self, l1: i64, l2: i64) -> QuadElem {
        // (l1 + l2 ω)/√D = (l1 + l2/2)/√D + l2/2 = l2/2 + (2 l1 + l2)/(2D) √D
        QuadElem::new(
            self.d,
            rat(l2, 2),
            Rational::new(BigInt::from(2 * l1 + l2), BigInt::from(2 * self.d as i64)),
        )
    }
}

/// An element `a + b√D` of `K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    d: u64,
    a: Rational,
    b: Rational,
}

impl QuadElem {
    pub fn new(d: u64, a: Rational, b: Rational) -> Self {
        QuadElem { d, a, b }
    }

    pub fn zero(d: u64) -> Self {
        QuadElem::new(d, int(0), int(0))
    }

    pub fn from_rational(d: u64, a: Rational) -> Self {
        QuadElem::new(d, a, int(0))
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn same_field(&self, other: &QuadElem) -> Result<()> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(Error::ContextMismatch {
                left: self.d,
                right: other.d,
            })
        }
    }

    pub fn checked_add(&self, other: &QuadElem) -> Result<QuadElem> {
        self.same_field(other)?;
        Ok(QuadElem::new(
            self.d,
            &self.a + &other.a,
            &self.b + &other.b,
        ))
    }

    pub fn checked_sub(&self, other: &QuadElem) -> Result<QuadElem> {
        self.same_field(other)?;
        Ok(QuadElem::new(
            self.d,
            &self.a - &other.a,
            &self.b - &other.b,
        ))
    }

    pub fn checked_mul(&self, other: &QuadElem) -> Result<QuadElem> {
        self.same_field(other)?;
        let d = int(self.d as i64);
        let a = &self.a * &other.a + &self.b * &other.b * d;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(QuadElem::new(self.d, a, b))
    }

    pub fn checked_div(&self, other: &QuadElem) -> Result<QuadElem> {
        self.same_field(other)?;
        let inv = other
            .inverse()
            .ok_or_else(|| Error::InvalidArgument("division by zero in K".into()))?;
        self.checked_mul(&inv)
    }

    pub fn scale(&self, r: &Rational) -> QuadElem {
        QuadElem::new(self.d, &self.a * r, &self.b * r)
    }

    pub fn conj(&self) -> QuadElem {
        QuadElem::new(self.d, self.a.clone(), -self.b.clone())
    }

    pub fn trace(&self) -> Rational {
        &self.a + &self.a
    }

    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * int(self.d as i64)
    }

    pub fn inverse(&self) -> Option<QuadElem> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(self.conj().scale(&n.recip()))
    }

    pub fn pow(&self, e: i64) -> QuadElem {
        let base = if e < 0 {
            self.inverse().expect("inverse of zero")
        } else {
            self.clone()
        };
        let mut acc = QuadElem::from_rational(self.d, int(1));
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Sign of the first real embedding (√D ↦ +√D), computed exactly.
    pub fn signum(&self) -> i8 {
        sign_of(&self.a, &self.b, self.d)
    }

    /// Sign of the conjugate embedding.
    pub fn signum_conj(&self) -> i8 {
        sign_of(&self.a, &(-self.b.clone()), self.d)
    }

    /// Exact comparison of the first embeddings.
    pub fn cmp_real(&self, other: &QuadElem) -> Ordering {
        let diff = self - other;
        diff.signum().cmp(&0)
    }

    pub fn to_f64(&self) -> f64 {
        arith::to_f64(&self.a) + arith::to_f64(&self.b) * (self.d as f64).sqrt()
    }

    pub fn conj_f64(&self) -> f64 {
        arith::to_f64(&self.a) - arith::to_f64(&self.b) * (self.d as f64).sqrt()
    }

    /// Membership in `O_K`: `x = (u + v√D)/2` with integers `u ≡ v (mod 2)`.
    pub fn in_ok(&self) -> bool {
        let u = &self.a * int(2);
        let v = &self.b * int(2);
        u.is_integer() && v.is_integer() && (u.to_integer() - v.to_integer()).is_even()
    }

    /// Membership in the inverse different `𝔡⁻¹ = (1/√D) O_K`.
    pub fn in_inverse_different(&self) -> bool {
        let sd = QuadElem::new(self.d, int(0), int(1));
        (&sd * self).in_ok()
    }

    /// Integer coordinates `(l₁, l₂)` with `self = (l₁ + l₂ω)/√D`, if `self ∈ 𝔡⁻¹`.
    pub fn inverse_different_coords(&self) -> Option<(i64, i64)> {
        if !self.in_inverse_different() {
            return None;
        }
        // self = l2/2 + (2 l1 + l2)/(2D) √D
        let l2 = (&self.a * int(2)).to_integer();
        let t = (&self.b * int(2 * self.d as i64)).to_integer();
        let l1 = (t - &l2) / BigInt::from(2);
        Some((l1.to_i64()?, l2.to_i64()?))
    }
}

fn sign_of(a: &Rational, b: &Rational, d: u64) -> i8 {
    let sa = a.signum();
    let sb = b.signum();
    let sa = if sa.is_zero() {
        0
    } else if sa.is_positive() {
        1
    } else {
        -1
    };
    let sb = if sb.is_zero() {
        0
    } else if sb.is_positive() {
        1
    } else {
        -1
    };
    if sa == sb || sb == 0 {
        return sa;
    }
    if sa == 0 {
        return sb;
    }
    // opposite signs: compare a² with D b²
    let lhs = a * a;
    let rhs = b * b * int(d as i64);
    match lhs.cmp(&rhs) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => 0,
    }
}

/// Exact sign of `a + b√D` for rational `a`, `b`.
pub fn sign_of_surd(a: &Rational, b: &Rational, d: u64) -> i8 {
    sign_of(a, b, d)
}

/// Lexicographic order on `(a, b)`; used for deterministic map keys, not the
/// real ordering.
impl Ord for QuadElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d
            .cmp(&other.d)
            .then_with(|| self.a.cmp(&other.a))
            .then_with(|| self.b.cmp(&other.b))
    }
}

impl PartialOrd for QuadElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a QuadElem> for &'a QuadElem {
            type Output = QuadElem;
            /// Panics on operands from different fields; use the checked form
            /// to get an error instead.
            fn $method(self, rhs: &'a QuadElem) -> QuadElem {
                self.$checked(rhs).expect("mixed-field arithmetic")
            }
        }
        impl $trait<QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: QuadElem) -> QuadElem {
                (&self).$checked(&rhs).expect("mixed-field arithmetic")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem::new(self.d, -self.a, -self.b)
    }
}

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem::new(self.d, -self.a.clone(), -self.b.clone())
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + {}*sqrt({})",
            arith::fmt_rational(&self.a),
            arith::fmt_rational(&self.b),
            self.d
        )
    }
}

/// JSON form `{"a": [num, den], "b": [num, den]}`; the discriminant travels
/// with the enclosing object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadElemJson {
    #[serde(with = "arith::serde_rational")]
    pub a: Rational,
    #[serde(with = "arith::serde_rational")]
    pub b: Rational,
}

impl From<&QuadElem> for QuadElemJson {
    fn from(x: &QuadElem) -> Self {
        QuadElemJson {
            a: x.a.clone(),
            b: x.b.clone(),
        }
    }
}

impl QuadElemJson {
    pub fn into_elem(self, d: u64) -> QuadElem {
        QuadElem::new(d, self.a, self.b)
    }
}

/// Fundamental unit `ε₀ > 1` of `O_K` from the continued fraction of
/// `ω = (1 + √D)/2`.
///
/// The first convergent `h/k` with `N(h − kω) = ±1` yields `ε₀ = h − kω'`.
pub fn fundamental_unit(d: i64) -> Result<QuadElem> {
    let du = arith::check_discriminant(d)?;
    let dd = BigInt::from(d);
    let sqrt_floor = BigInt::from(arith::isqrt(du));
    let disc_quarter = BigInt::from((d - 1) / 4);

    // x = (P + √D)/Q, starting from ω = (1 + √D)/2.
    let mut p = BigInt::one();
    let mut q = BigInt::from(2);
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    loop {
        let a = (&p + &sqrt_floor).div_floor(&q);
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);

        // N(h − kω) = h² − hk − k²(D−1)/4
        let norm = &h * &h - &h * &k - &k * &k * &disc_quarter;
        if norm.abs().is_one() {
            // h − kω' = h − k/2 + (k/2)√D
            let a = Rational::new(BigInt::from(2) * &h - &k, BigInt::from(2));
            let b = Rational::new(k.clone(), BigInt::from(2));
            let eps = QuadElem::new(du, a, b);
            debug_assert_eq!(eps.norm().abs(), int(1));
            return Ok(eps);
        }

        p = &a * &q - &p;
        q = (&dd - &p * &p) / &q;
    }
}

/// Whether `x ≫ 0`, i.e. both real embeddings are strictly positive.
pub fn is_totally_positive(x: &QuadElem) -> bool {
    x.signum() > 0 && x.signum_conj() > 0
}

/// All `λ ∈ 𝔡⁻¹` with `N(λ) = q_target` and `max(|λ|, |λ'|) ≤ bound`, in a
/// deterministic order (by trace, then by the `√D` coordinate).
///
/// Writing `λ = v/2 + u√D/(2D)` with integers `u ≡ v (mod 2)`, the norm
/// condition becomes `u² = D v² − 4D·q_target`, so the search is a single
/// loop over `v`.
pub fn enumerate_norm_in_inverse_different(
    ctx: &FieldCtx,
    q_target: &Rational,
    bound: f64,
) -> Vec<QuadElem> {
    let mut out = Vec::new();
    if !(bound > 0.0) {
        return out;
    }
    let d = ctx.d as i128;
    let scaled = q_target * int(4 * ctx.d as i64);
    if !scaled.is_integer() {
        return out;
    }
    let Some(four_d_q) = scaled.to_integer().to_i128() else {
        return out;
    };
    let bound_q = match Rational::from_float(bound) {
        Some(b) => b,
        None => return out,
    };
    let vmax = (2.0 * bound).floor() as i128 + 1;
    for v in -vmax..=vmax {
        let rhs = d * v * v - four_d_q;
        let Some(u_abs) = arith::is_square(rhs) else {
            continue;
        };
        let us: Vec<i128> = if u_abs == 0 {
            vec![0]
        } else {
            vec![-u_abs, u_abs]
        };
        for u in us {
            if (u - v).rem_euclid(2) != 0 {
                continue;
            }
            let lam = QuadElem::new(
                ctx.d,
                Rational::new(BigInt::from(v), BigInt::from(2)),
                Rational::new(BigInt::from(u), BigInt::from(2 * d)),
            );
            if within_bound(&lam, &bound_q) {
                out.push(lam);
            }
        }
    }
    out
}

fn within_bound(x: &QuadElem, bound: &Rational) -> bool {
    // |x| ≤ B and |x'| ≤ B  ⇔  |a| + |b|√D ≤ B
    let lhs_a = bound - x.a.abs();
    let lhs_b = -x.b.abs();
    sign_of(&lhs_a, &lhs_b, x.d) >= 0
}
