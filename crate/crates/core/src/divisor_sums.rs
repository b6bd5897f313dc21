//! Generalized divisor sums `σ_m(s)`, Hirzebruch–Zagier volumes and the
//! coefficients of the weight-2 plus-space Eisenstein series.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, int, Rational};
use crate::characters::{chi, l_exact, zeta_k_minus1};
use crate::error::{Error, Result};
use crate::loglinear::LogLinear;

/// Value of `σ_m(s)`: exact when `1 − s` is even, a float otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum SigmaValue {
    Exact(Rational),
    Float(f64),
}

impl SigmaValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            SigmaValue::Exact(r) => arith::to_f64(r),
            SigmaValue::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            SigmaValue::Exact(r) => Some(r),
            SigmaValue::Float(_) => None,
        }
    }
}

fn check_m(m: i64) -> Result<u64> {
    if m >= 1 {
        Ok(m as u64)
    } else {
        Err(Error::InvalidArgument(format!(
            "m must be positive, got {m}"
        )))
    }
}

/// `σ_m(s) = m^{(1−s)/2} Σ_{d|m} d^s (χ_D(d) + χ_D(m/d))` at an integer `s`.
pub fn sigma(d: u64, m: i64, s: i64) -> Result<SigmaValue> {
    let m = check_m(m)?;
    if (1 - s) % 2 != 0 {
        return Ok(SigmaValue::Float(sigma_real(d, m as i64, s as f64)?));
    }
    let mut acc = Rational::zero();
    for dv in arith::divisors(m) {
        let w = chi(d, dv as i64) + chi(d, (m / dv) as i64);
        if w != 0 {
            acc += arith::ipow(dv as i64, s) * int(w as i64);
        }
    }
    Ok(SigmaValue::Exact(acc * arith::ipow(m as i64, (1 - s) / 2)))
}

/// Exact `σ_m(s)`, rejecting `s` with `1 − s` odd.
pub fn sigma_exact(d: u64, m: i64, s: i64) -> Result<Rational> {
    match sigma(d, m, s)? {
        SigmaValue::Exact(r) => Ok(r),
        SigmaValue::Float(_) => Err(Error::InvalidArgument(format!(
            "σ_m(s) is irrational in general for even s={s}"
        ))),
    }
}

/// `σ_m(s)` at real `s` by the direct divisor sum.
pub fn sigma_real(d: u64, m: i64, s: f64) -> Result<f64> {
    let m = check_m(m)?;
    let mut acc = 0.0;
    for dv in arith::divisors(m) {
        let w = chi(d, dv as i64) + chi(d, (m / dv) as i64);
        if w != 0 {
            acc += w as f64 * (dv as f64).powf(s);
        }
    }
    Ok(acc * (m as f64).powf((1.0 - s) / 2.0))
}

/// Splits `m = m₀·D^δ` with `gcd(m₀, D) = 1`.
fn split_d_part(d: u64, mut m: u64) -> (u64, u32) {
    let mut delta = 0;
    while m % d == 0 {
        m /= d;
        delta += 1;
    }
    (m, delta)
}

/// `σ_m(s)` from its Euler product
/// `m^{(1−s)/2}(1 + χ(m₀)D^{δs}) Π_{p^v ∥ m₀} (1 − χ(p)^{v+1}p^{(v+1)s})/(1 − χ(p)p^s)`.
pub fn sigma_euler(d: u64, m: i64, s: i64) -> Result<Rational> {
    let mu = check_m(m)?;
    if (1 - s) % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "the exact Euler product needs 1 - s even, got s={s}"
        )));
    }
    let (m0, delta) = split_d_part(d, mu);
    let c0 = chi(d, m0 as i64) as i64;
    let mut acc = if delta == 0 {
        int(1 + c0)
    } else {
        int(1) + int(c0) * arith::ipow(d as i64, delta as i64 * s)
    };
    for (p, v) in arith::factorize(m0) {
        let c = chi(d, p as i64) as i64;
        let v = v as i64;
        let cv1 = if (v + 1) % 2 == 0 { c * c } else { c };
        let num = int(1) - int(cv1) * arith::ipow(p as i64, (v + 1) * s);
        let den = int(1) - int(c) * arith::ipow(p as i64, s);
        acc *= num / den;
    }
    Ok(acc * arith::ipow(m, (1 - s) / 2))
}

/// `σ'_m(−1)/σ_m(−1)` as an exact combination of logarithms.
///
/// Obtained by differentiating the logarithm of the Euler product factor by
/// factor.
pub fn sigma_logderiv_minus1(d: u64, m: i64) -> Result<LogLinear> {
    let mu = check_m(m)?;
    if chi(d, m) == -1 {
        return Err(Error::EmptyDivisor { m: mu });
    }
    let mut out = LogLinear::log_of(mu, arith::rat(-1, 2));
    let (m0, delta) = split_d_part(d, mu);
    if delta > 0 {
        // δ log D · χ(m₀) D^{−δ} / (1 + χ(m₀) D^{−δ})
        let c0 = int(chi(d, m0 as i64) as i64);
        let x = &c0 * arith::ipow(d as i64, -(delta as i64));
        let coeff = int(delta as i64) * &x / (int(1) + &x);
        out.add_log_prime(d, coeff);
    }
    for (p, v) in arith::factorize(m0) {
        let c = chi(d, p as i64) as i64;
        let v = v as i64;
        let cv1 = int(if (v + 1) % 2 == 0 { c * c } else { c });
        let top = &cv1 * arith::ipow(p as i64, -(v + 1));
        let coeff_top = -(int(v + 1) * &top) / (int(1) - &top);
        let bot = int(c) * arith::ipow(p as i64, -1);
        let coeff_bot = &bot / (int(1) - &bot);
        out.add_log_prime(p, coeff_top + coeff_bot);
    }
    Ok(out)
}

/// `Σ_{p | m} (p − χ(p))/(p + χ(p)) · log p`, the closed form of
/// `−2σ'_m(−1)/σ_m(−1)` for square-free `m` coprime to `D`.
pub fn squarefree_logderiv_sum(d: u64, m: u64) -> Result<LogLinear> {
    let f = arith::factorize(m);
    if f.iter().any(|&(p, e)| e > 1 || p == d) {
        return Err(Error::InvalidArgument(format!(
            "{m} is not square-free and coprime to {d}"
        )));
    }
    let mut out = LogLinear::zero();
    for (p, _) in f {
        let c = chi(d, p as i64) as i64;
        out.add_log_prime(p, arith::rat(p as i64 - c, p as i64 + c));
    }
    Ok(out)
}

/// `vol(T(m)) = σ_m(−1)/24`.
pub fn vol_t(d: u64, m: i64) -> Result<Rational> {
    Ok(sigma_exact(d, m, -1)? / int(24))
}

/// `φ_m(1) = 2·vol(T(m))/ζ_K(−1)`.
pub fn phi_m_at_1(d: u64, m: i64) -> Result<Rational> {
    Ok(vol_t(d, m)? * int(2) / zeta_k_minus1(d as i64)?)
}

/// Coefficient `B_D(n)` of the Eisenstein series `E(τ) = 1 + Σ B_D(n) qⁿ`.
pub fn eisenstein_coeff(d: u64, n: i64) -> Result<Rational> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!(
            "n must be non-negative, got {n}"
        )));
    }
    if n == 0 {
        return Ok(Rational::one());
    }
    Ok(sigma_exact(d, n, -1)? * int(2) / l_exact(d as i64, -1)?)
}

/// Coarse type of the divisor `T(m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HZClass {
    Empty,
    Isotropic,
    Anisotropic,
}

impl std::fmt::Display for HZClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            HZClass::Empty => "empty",
            HZClass::Isotropic => "isotropic",
            HZClass::Anisotropic => "anisotropic",
        };
        f.write_str(s)
    }
}

pub fn classify_t(d: u64, m: i64) -> Result<HZClass> {
    let mu = check_m(m)?;
    if chi(d, m) == -1 {
        return Ok(HZClass::Empty);
    }
    let isotropic = arith::factorize(mu)
        .iter()
        .all(|&(p, e)| chi(d, p as i64) != -1 || e % 2 == 0);
    Ok(if isotropic {
        HZClass::Isotropic
    } else {
        HZClass::Anisotropic
    })
}
