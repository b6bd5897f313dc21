//! Floating-point zeta and Dirichlet L-functions on the real line.
//!
//! The Hurwitz zeta function and its `s`-derivative come from Euler–Maclaurin
//! summation, which also continues them to `s < 1`. Gamma and digamma are
//! taken from `statrs`.

use std::sync::OnceLock;

use crate::arith;
use crate::characters::{bernoulli_numbers, chi};
use crate::error::{Error, Result};

pub use statrs::consts::EULER_MASCHERONI;
pub use statrs::function::gamma::{digamma, gamma, ln_gamma};

const EM_TERMS: usize = 14;

/// `B_{2j}/(2j)!` for `j = 1..=EM_TERMS`.
fn em_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let b = bernoulli_numbers(2 * EM_TERMS);
        let mut fact = 1.0f64;
        let mut out = Vec::with_capacity(EM_TERMS);
        for j in 1..=EM_TERMS {
            fact *= ((2 * j - 1) * (2 * j)) as f64;
            out.push(arith::to_f64(&b[2 * j]) / fact);
        }
        out
    })
}

/// `ζ(s, a)` and `∂ζ(s, a)/∂s` for real `s ≠ 1` and `a > 0`.
pub fn hurwitz_zeta_with_derivative(s: f64, a: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "hurwitz zeta needs a > 0, got a={a}, s={s}"
        )));
    }
    if (s - 1.0).abs() < 1e-12 {
        return Err(Error::InvalidArgument(
            "hurwitz zeta has a pole at s = 1".into(),
        ));
    }
    // Fewer direct terms for s < 1, where they grow and cancel against the tail.
    let n = if s < 1.0 { 8 } else { 20 } + s.abs().ceil() as usize;
    let mut val = 0.0;
    let mut der = 0.0;
    for k in 0..n {
        let x = k as f64 + a;
        let lx = x.ln();
        let p = x.powf(-s);
        val += p;
        der -= lx * p;
    }
    let x = n as f64 + a;
    let lx = x.ln();
    let xs = x.powf(-s);
    let x1s = x * xs;
    val += x1s / (s - 1.0) + 0.5 * xs;
    der += -lx * x1s / (s - 1.0) - x1s / ((s - 1.0) * (s - 1.0)) - 0.5 * lx * xs;

    // Σ_j B_{2j}/(2j)! · P_j(s) · x^{−s−2j+1} with P_j(s) = s(s+1)…(s+2j−2)
    let coeffs = em_coefficients();
    let mut poly = s;
    let mut poly_der = 1.0;
    let mut xpow = xs / x;
    for (j, c) in coeffs.iter().enumerate() {
        if j > 0 {
            let i1 = (2 * j - 1) as f64;
            let i2 = (2 * j) as f64;
            // multiply by (s + i1)(s + i2)
            let q = (s + i1) * (s + i2);
            let dq = 2.0 * s + i1 + i2;
            poly_der = poly_der * q + poly * dq;
            poly *= q;
            xpow /= x * x;
        }
        val += c * poly * xpow;
        der += c * (poly_der - lx * poly) * xpow;
    }
    Ok((val, der))
}

pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    Ok(hurwitz_zeta_with_derivative(s, a)?.0)
}

/// `ζ(s)` and `ζ'(s)`.
pub fn zeta_with_derivative(s: f64) -> Result<(f64, f64)> {
    hurwitz_zeta_with_derivative(s, 1.0)
}

pub fn zeta(s: f64) -> Result<f64> {
    Ok(zeta_with_derivative(s)?.0)
}

/// `L(s, χ_D)` and `L'(s, χ_D)` from
/// `L(s, χ) = D^{−s} Σ_{a=1}^{D} χ(a) ζ(s, a/D)`.
pub fn dirichlet_l_with_derivative(d: u64, s: f64) -> Result<(f64, f64)> {
    arith::check_discriminant(d as i64)?;
    if (s - 1.0).abs() < 1e-12 {
        // The sum is finite at s = 1 but the Hurwitz pieces are not.
        return Err(Error::InvalidArgument(
            "L(s, χ) is not evaluated at s = 1 here".into(),
        ));
    }
    let df = d as f64;
    let mut sum = 0.0;
    let mut sum_der = 0.0;
    for a in 1..d {
        let c = chi(d, a as i64);
        if c == 0 {
            continue;
        }
        let (v, dv) = hurwitz_zeta_with_derivative(s, a as f64 / df)?;
        sum += c as f64 * v;
        sum_der += c as f64 * dv;
    }
    let scale = df.powf(-s);
    let val = scale * sum;
    Ok((val, scale * sum_der - df.ln() * val))
}

pub fn dirichlet_l(d: u64, s: f64) -> Result<f64> {
    Ok(dirichlet_l_with_derivative(d, s)?.0)
}
