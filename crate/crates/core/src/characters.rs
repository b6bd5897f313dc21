//! The quadratic character `χ_D` and exact special values at negative
//! integers.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, int, Rational};
use crate::error::{Error, Result};

/// `χ_D` for a prime discriminant `D ≡ 1 (mod 4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadChar {
    d: u64,
}

impl QuadChar {
    pub fn new(d: i64) -> Result<Self> {
        Ok(QuadChar {
            d: arith::check_discriminant(d)?,
        })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn eval(&self, n: i64) -> i8 {
        jacobi(n, self.d as i64)
    }
}

/// `χ_D(n)`, the Jacobi symbol `(n/D)`.
///
/// For `D ≡ 1 (mod 4)` this agrees with the Kronecker symbol `(D/n)`.
pub fn chi(d: u64, n: i64) -> i8 {
    jacobi(n, d as i64)
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: i64) -> i8 {
    assert!(
        n > 0 && n % 2 == 1,
        "Jacobi symbol needs an odd positive modulus"
    );
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Bernoulli numbers `B_0 … B_n` with `B_1 = −1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(int(1));
    for m in 1..=n {
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = Rational::zero();
        let mut binom = BigInt::from(1); // C(m+1, 0)
        for (j, bj) in b.iter().enumerate() {
            acc += bj * Rational::from_integer(binom.clone());
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / Rational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// The Bernoulli polynomial `B_k(x)` at a rational point.
pub fn bernoulli_poly(k: usize, x: &Rational) -> Rational {
    let b = bernoulli_numbers(k);
    bernoulli_poly_with(&b, k, x)
}

fn bernoulli_poly_with(b: &[Rational], k: usize, x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    let mut binom = BigInt::from(1);
    for (j, bj) in b.iter().enumerate().take(k + 1) {
        acc += bj * Rational::from_integer(binom.clone()) * arith::rpow(x, (k - j) as i64);
        binom = binom * BigInt::from(k - j) / BigInt::from(j + 1);
    }
    acc
}

/// `B_{k,χ_D} = D^{k−1} Σ_{a=1}^{D} χ_D(a) B_k(a/D)` for even `k ≥ 2`.
pub fn generalized_bernoulli(k: u32, d: i64) -> Result<Rational> {
    let du = arith::check_discriminant(d)?;
    if k < 2 || k % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "generalized Bernoulli number needs even k >= 2, got {k}"
        )));
    }
    let b = bernoulli_numbers(k as usize);
    let mut acc = Rational::zero();
    for a in 1..=d {
        let c = chi(du, a);
        if c == 0 {
            continue;
        }
        let term = bernoulli_poly_with(&b, k as usize, &arith::rat(a, d));
        if c > 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc * arith::ipow(d, k as i64 - 1))
}

/// An exact value of `ζ(s)` (when `character_d == 0`) or `L(s, χ_D)` at a
/// negative odd integer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactLValue {
    #[serde(with = "arith::serde_rational")]
    pub value: Rational,
    pub argument: i64,
    pub character_d: i64,
}

fn check_negative_odd(s: i64) -> Result<u32> {
    if s < 0 && s % 2 != 0 {
        Ok((1 - s) as u32)
    } else {
        Err(Error::InvalidArgument(format!(
            "exact values are available at negative odd integers only, got s={s}"
        )))
    }
}

/// `L(s, χ_D) = −B_{1−s,χ}/(1−s)` for `s = −1, −3, …`.
pub fn l_exact(d: i64, s: i64) -> Result<Rational> {
    let k = check_negative_odd(s)?;
    let b = generalized_bernoulli(k, d)?;
    Ok(-b / int(k as i64))
}

/// `ζ(s) = −B_{1−s}/(1−s)` for `s = −1, −3, …`.
pub fn zeta_exact(s: i64) -> Result<Rational> {
    let k = check_negative_odd(s)?;
    let b = bernoulli_numbers(k as usize);
    Ok(-b[k as usize].clone() / int(k as i64))
}

pub fn l_value(d: i64, s: i64) -> Result<ExactLValue> {
    Ok(ExactLValue {
        value: l_exact(d, s)?,
        argument: s,
        character_d: d,
    })
}

pub fn zeta_value(s: i64) -> Result<ExactLValue> {
    Ok(ExactLValue {
        value: zeta_exact(s)?,
        argument: s,
        character_d: 0,
    })
}

/// `ζ_K(−1) = ζ(−1)·L(−1, χ_D)`; always positive.
pub fn zeta_k_minus1(d: i64) -> Result<Rational> {
    let v = zeta_exact(-1)? * l_exact(d, -1)?;
    debug_assert!(v.is_positive());
    Ok(v)
}
