//! Numeric Green functions for the Hirzebruch–Zagier divisors.
//!
//! `Φ_m(z, s)` is a sum of `Q_{s−1}(t)` over the lattice points of a
//! quadric. The points are found by Fincke–Pohst enumeration of the
//! majorant `2|az₁z₂ + λz₁ + λ'z₂ + b|²/(y₁y₂) + 4(ab − λλ')`, which equals
//! `(4m/D)·t` on the quadric.
//!
//! The sum is cut off smoothly at `t ≈ T`. Far points are replaced by their
//! mean density `φ_m(1)·dt`, the residue of `Φ_m` at `s = 1`. The same model
//! gives the regularized value at `s = 1` directly, since
//! `∫₁^∞ Q_{s−1}(t) dt = 1/(s(s−1))`. What the model misses decays like
//! `T^{1/2−s}`; sums at `T/4` and `T` are combined to remove it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{AnalyticConstants, AnalyticValue};
use crate::arith::{self, int, Rational};
use crate::borcherds::WeylChamber;
use crate::characters::chi;
use crate::divisor_sums::{phi_m_at_1, sigma_logderiv_minus1, sigma_real, vol_t};
use crate::error::{Error, Result};
use crate::loglinear::LogLinear;
use crate::special;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenConfig {
    pub s: f64,
    /// Cutoff `T` on the Legendre argument.
    pub lattice_radius: f64,
    pub quadrature_tol: f64,
    pub extrapolation_offsets: Vec<f64>,
    /// The cutoff weight is 1 below `taper_start·T` and falls smoothly to 0 at `T`.
    pub taper_start: f64,
}

impl Default for GreenConfig {
    fn default() -> Self {
        GreenConfig {
            s: 1.0,
            lattice_radius: 40_000.0,
            quadrature_tol: 1e-12,
            extrapolation_offsets: vec![0.32, 0.16, 0.08, 0.04],
            taper_start: 0.05,
        }
    }
}

impl GreenConfig {
    fn validate(&self) -> Result<()> {
        if !(self.lattice_radius > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "lattice_radius must exceed 1, got {}",
                self.lattice_radius
            )));
        }
        if !(self.taper_start > 0.0 && self.taper_start < 1.0) {
            return Err(Error::InvalidArgument(
                "taper_start must lie in (0, 1)".into(),
            ));
        }
        if !(self.quadrature_tol > 0.0) {
            return Err(Error::InvalidArgument(
                "quadrature_tol must be positive".into(),
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Legendre functions of the second kind

fn check_legendre_args(s: f64, t: f64) -> Result<()> {
    if !(t > 1.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Legendre Q needs t > 1, got {t}"
        )));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Legendre Q needs s > 0, got {s}"
        )));
    }
    Ok(())
}

/// `Q_{s−1}(t) = ∫₀^∞ (t + √(t²−1) cosh u)^{−s} du` by adaptive quadrature.
pub fn legendre_q_quadrature(s: f64, t: f64, tol: f64) -> Result<f64> {
    check_legendre_args(s, t)?;
    let r = ((t - 1.0) * (t + 1.0)).sqrt();
    let f = |u: f64| (t + r * u.cosh()).powf(-s);
    // Beyond u₀ the cosh term dominates and the integrand decays like e^{−su}.
    let u0 = (2.0 / r).ln().max(0.0);
    let u_end = u0 + (1.0 / (s * tol * 1e-3)).ln().max(1.0) / s + 2.0;
    let a = quadrature::integrate(f, 0.0, u0.max(1e-3), tol * 0.1);
    let b = quadrature::integrate(f, u0.max(1e-3), u_end, tol * 0.1);
    Ok(a.integral + b.integral)
}

/// `Γ(s)²/(2Γ(2s))`, the prefactor of the hypergeometric form of `Q_{s−1}`.
fn q_prefactor(s: f64) -> f64 {
    (2.0 * special::ln_gamma(s) - special::ln_gamma(2.0 * s)).exp() / 2.0
}

/// `Q_{s−1}(t) = Γ(s)²/(2Γ(2s)) · z^s · ₂F₁(s, s; 2s; z)` with `z = 2/(1+t)`.
fn legendre_q_series(s: f64, t: f64) -> f64 {
    let z = 2.0 / (1.0 + t);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        term *= (s + k) * (s + k) / ((2.0 * s + k) * (k + 1.0)) * z;
        sum += term;
        k += 1.0;
        if term.abs() < 1e-17 * sum.abs() || k > 2000.0 {
            break;
        }
    }
    q_prefactor(s) * z.powf(s) * sum
}

/// `Q_{s−1}(t)` for `t > 1`, `s > 0`: closed forms for `s = 1, 2`, the
/// hypergeometric series for `t ≥ 3`, quadrature otherwise.
pub fn legendre_q(s: f64, t: f64) -> Result<f64> {
    check_legendre_args(s, t)?;
    if s == 1.0 {
        return Ok(q0(t));
    }
    if s == 2.0 {
        return Ok(q1(t));
    }
    if t >= 3.0 {
        return Ok(legendre_q_series(s, t));
    }
    legendre_q_quadrature(s, t, 1e-13)
}

/// `Q₀(t) = ½ log((t+1)/(t−1))`.
pub fn q0(t: f64) -> f64 {
    0.5 * ((t + 1.0) / (t - 1.0)).ln()
}

/// `Q₁(t) = (t/2) log((t+1)/(t−1)) − 1`.
pub fn q1(t: f64) -> f64 {
    if t > 50.0 {
        // series in 1/t² avoids the cancellation
        let u = 1.0 / (t * t);
        return u * (1.0 / 3.0 + u * (1.0 / 5.0 + u * (1.0 / 7.0 + u * (1.0 / 9.0 + u / 11.0))));
    }
    t * q0(t) - 1.0
}

/// `∫_T^∞ Q_{s−1}(t) dt` for `s > 1`, integrating the hypergeometric series
/// termwise.
pub fn legendre_q_tail_integral(s: f64, t_cut: f64) -> Result<f64> {
    if !(s > 1.0) || !(t_cut >= 3.0) {
        return Err(Error::InvalidArgument(format!(
            "tail integral needs s > 1 and T ≥ 3, got s={s}, T={t_cut}"
        )));
    }
    let z = 2.0 / (1.0 + t_cut);
    // ∫_T^∞ z(t)^p dt = 2 z_T^{p−1}/(p−1)
    let mut coeff = 1.0;
    let mut zp = z.powf(s - 1.0);
    let mut sum = 2.0 * zp / (s - 1.0);
    let mut k = 0.0;
    loop {
        coeff *= (s + k) * (s + k) / ((2.0 * s + k) * (k + 1.0));
        zp *= z;
        let term = coeff * 2.0 * zp / (s + k);
        sum += term;
        k += 1.0;
        if term.abs() < 1e-17 * sum.abs() || k > 2000.0 {
            break;
        }
    }
    Ok(q_prefactor(s) * sum)
}

/// `∫₁^T Q₀(t) dt = T Q₀(T) + ½ log(T² − 1) − log 2`.
fn q0_integral_from_one(t: f64) -> f64 {
    t * q0(t) + 0.5 * ((t - 1.0) * (t + 1.0)).ln() - 2f64.ln()
}

// ---------------------------------------------------------------------------
// Lattice enumeration

/// The point `(z₁, z₂) ∈ H²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HPoint {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl HPoint {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        HPoint {
            z1: Complex64::new(x1, y1),
            z2: Complex64::new(x2, y2),
        }
    }

    pub fn swap(&self) -> Self {
        HPoint {
            z1: self.z2,
            z2: self.z1,
        }
    }

    fn check(&self) -> Result<()> {
        let ok = |c: Complex64| c.re.is_finite() && c.im.is_finite() && c.im > 0.0;
        if ok(self.z1) && ok(self.z2) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "point {self:?} is not in H×H"
            )))
        }
    }
}

/// Legendre arguments `t ≤ t_max` of all `(a, b, λ)` with `ab − N(λ) = m/D`,
/// with multiplicity.
pub fn lattice_arguments(d: u64, m: u64, z: &HPoint, t_max: f64) -> Result<Vec<f64>> {
    arith::check_discriminant(d as i64)?;
    z.check()?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let df = d as f64;
    let sd = df.sqrt();
    let (z1, z2) = (z.z1, z.z2);
    let yy = z1.im * z2.im;
    let omega = (1.0 + sd) / 2.0;
    let omega_c = (1.0 - sd) / 2.0;

    // Coordinates x = (b, a, l₁, l₂) with λ = (l₁ + l₂ω)/√D.
    let v = [
        Complex64::new(1.0, 0.0),
        z1 * z2,
        (z1 - z2) / sd,
        (z1 * omega - z2 * omega_c) / sd,
    ];
    // 4·(ab − N(λ)) with N(λ) = −(l₁² + l₁l₂ − l₂²(D−1)/4)/D
    let mut q4 = [[0.0f64; 4]; 4];
    q4[0][1] = 2.0;
    q4[1][0] = 2.0;
    q4[2][2] = 4.0 / df;
    q4[2][3] = 2.0 / df;
    q4[3][2] = 2.0 / df;
    q4[3][3] = -(df - 1.0) / df;
    let mut gram = [[0.0f64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            gram[i][j] = 2.0 * (v[i] * v[j].conj()).re / yy + q4[i][j];
        }
    }
    let radius = 4.0 * m as f64 / df * t_max;
    let q = fincke_pohst_form(&gram)
        .ok_or_else(|| Error::Convergence("majorant is not positive definite".into()))?;

    let scale = 2.0 * yy * m as f64 / df;
    let quarter = (d as i64 - 1) / 4;
    let mut out = Vec::new();
    let mut on_divisor = false;
    let mut visit = |x: &[i64; 4]| {
        let val = v[0] * x[0] as f64 + v[1] * x[1] as f64 + v[2] * x[2] as f64 + v[3] * x[3] as f64;
        let t = 1.0 + val.norm_sqr() / scale;
        if t - 1.0 < 1e-13 {
            on_divisor = true;
        } else if t <= t_max {
            out.push(t);
        }
    };
    enumerate(&q, radius, |x_upper, lo, hi| {
        // x_upper = (a, l₁, l₂); solve D·a·b = m − (l₁² + l₁l₂ − l₂²(D−1)/4) for b
        let (a, l1, l2) = (x_upper[0], x_upper[1], x_upper[2]);
        let rest = m as i64 - (l1 * l1 + l1 * l2 - l2 * l2 * quarter);
        if a == 0 {
            if rest == 0 {
                for b in lo..=hi {
                    visit(&[b, a, l1, l2]);
                }
            }
        } else {
            let da = d as i64 * a;
            if rest % da == 0 {
                let b = rest / da;
                if b >= lo && b <= hi {
                    visit(&[b, a, l1, l2]);
                }
            }
        }
    });
    if on_divisor {
        return Err(Error::OnDivisor { m });
    }
    Ok(out)
}

/// Cholesky data `q` with `x·G·x = Σᵢ qᵢᵢ (xᵢ + Σ_{j>i} qᵢⱼ xⱼ)²`.
fn fincke_pohst_form(g: &[[f64; 4]; 4]) -> Option<[[f64; 4]; 4]> {
    let mut q = *g;
    for i in 0..4 {
        if !(q[i][i] > 0.0) {
            return None;
        }
        for j in i + 1..4 {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..4 {
            for l in k..4 {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    Some(q)
}

/// Visits every `(x₁, x₂, x₃)` of the ellipsoid's projection and hands the
/// admissible integer range of `x₀` to `inner`.
fn enumerate(q: &[[f64; 4]; 4], radius: f64, mut inner: impl FnMut(&[i64; 3], i64, i64)) {
    let slack = 1e-9 * radius.max(1.0);
    let mut x = [0i64; 4];
    fn rec(
        level: usize,
        q: &[[f64; 4]; 4],
        x: &mut [i64; 4],
        remaining: f64,
        slack: f64,
        inner: &mut dyn FnMut(&[i64; 3], i64, i64),
    ) {
        let center: f64 = -(level + 1..4)
            .map(|j| q[level][j] * x[j] as f64)
            .sum::<f64>();
        let half = ((remaining + slack).max(0.0) / q[level][level]).sqrt();
        let lo = (center - half).ceil() as i64;
        let hi = (center + half).floor() as i64;
        if level == 0 {
            inner(&[x[1], x[2], x[3]], lo, hi);
            return;
        }
        for xi in lo..=hi {
            x[level] = xi;
            let dev = xi as f64 - center;
            let rem = remaining - q[level][level] * dev * dev;
            if rem < -slack {
                continue;
            }
            rec(level - 1, q, x, rem, slack, inner);
        }
        x[level] = 0;
    }
    rec(3, q, &mut x, radius, slack, &mut inner);
}

// ---------------------------------------------------------------------------
// Green functions

fn taper(x: f64, x0: f64) -> f64 {
    if x <= x0 {
        return 1.0;
    }
    if x >= 1.0 {
        return 0.0;
    }
    let u = (x - x0) / (1.0 - x0);
    let a = (-1.0 / u).exp();
    let b = (-1.0 / (1.0 - u)).exp();
    b / (a + b)
}

/// Result of a truncated lattice sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSum {
    pub value: f64,
    /// Size of the correction from the cutoff extrapolation.
    pub tail_estimate: f64,
    pub terms: usize,
}

fn check_m_nonempty(d: u64, m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    if chi(d, m as i64) == -1 {
        return Err(Error::EmptyDivisor { m });
    }
    Ok(())
}

/// `Σ Q_{s−1}(t)·w(t/T)` over the lattice plus the density model of
/// everything the weight removes. At `s = 1` the model's divergent part
/// `c/(s−1)` is dropped.
fn modelled_sum(ts: &[f64], s: f64, t_cut: f64, x0: f64, density: f64, tol: f64) -> Result<f64> {
    let mut total = 0.0;
    for &t in ts.iter().filter(|&&t| t <= t_cut) {
        total += legendre_q(s, t)? * taper(t / t_cut, x0);
    }
    let start = x0 * t_cut;
    if s == 1.0 {
        // c·∫₁^∞ Q₀ (1 − w) dt − c/(s−1) → −c·∫₁^∞ Q₀ w dt − c
        let f = |t: f64| q0(t) * taper(t / t_cut, x0);
        let model =
            q0_integral_from_one(start) + quadrature::integrate(f, start, t_cut, tol).integral;
        return Ok(total - density * (model + 1.0));
    }
    let f = |t: f64| legendre_q(s, t).unwrap_or(f64::NAN) * (1.0 - taper(t / t_cut, x0));
    let inside = quadrature::integrate(f, start, t_cut, tol).integral;
    Ok(total + density * (inside + legendre_q_tail_integral(s, t_cut)?))
}

/// The lattice sum at cutoffs `T/4` and `T`, extrapolated in `T`.
///
/// After the density model the error decays like `T^{1/2−s}`, so the two
/// values are combined to cancel that term.
fn extrapolated_sum(d: i64, m: u64, z: &HPoint, s: f64, cfg: &GreenConfig) -> Result<LatticeSum> {
    let du = arith::check_discriminant(d)?;
    cfg.validate()?;
    check_m_nonempty(du, m)?;
    let t_cut = cfg.lattice_radius;
    let x0 = cfg.taper_start;
    if x0 * t_cut / 4.0 < 3.0 {
        return Err(Error::InvalidArgument(format!(
            "lattice_radius {t_cut} is too small for taper_start {x0}"
        )));
    }
    let ts = lattice_arguments(du, m, z, t_cut)?;
    let density = arith::to_f64(&phi_m_at_1(du, m as i64)?);
    let coarse = modelled_sum(&ts, s, t_cut / 4.0, x0, density, cfg.quadrature_tol)?;
    let fine = modelled_sum(&ts, s, t_cut, x0, density, cfg.quadrature_tol)?;
    let gain = 4f64.powf(s - 0.5);
    let correction = (fine - coarse) / (gain - 1.0);
    Ok(LatticeSum {
        value: fine + correction,
        tail_estimate: correction.abs(),
        terms: ts.len(),
    })
}

/// `Φ_m(z, s)` for `s > 1`.
pub fn phi_m(d: i64, m: u64, z: &HPoint, s: f64, cfg: &GreenConfig) -> Result<LatticeSum> {
    if !(s > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "the lattice sum needs s > 1, got {s}"
        )));
    }
    extrapolated_sum(d, m, z, s, cfg)
}

/// The regularized `Φ_m(z) = lim_{s→1} (Φ_m(z, s) − φ_m(1)/(s − 1))`.
pub fn phi_m_regularized(d: i64, m: u64, z: &HPoint, cfg: &GreenConfig) -> Result<LatticeSum> {
    extrapolated_sum(d, m, z, 1.0, cfg)
}

/// `φ_m(s) = Γ(s−½)²/(Γ(s+½)Γ(s)) · (π/D)^{2s−½} · σ_m(2s−1)/L(2s, χ_D)`,
/// equivalent by the functional equation to
/// `−Γ(s−½)/Γ(3/2−s) · σ_m(2s−1)/L(1−2s, χ_D)` and finite at `s = 3/2`.
pub fn phi_m_s(d: u64, m: u64, s: f64) -> Result<f64> {
    if !(s > 0.5) {
        return Err(Error::InvalidArgument(format!(
            "φ_m(s) is evaluated for s > 1/2, got {s}"
        )));
    }
    let g = (2.0 * special::ln_gamma(s - 0.5) - special::ln_gamma(s + 0.5) - special::ln_gamma(s))
        .exp();
    let sigma = sigma_real(d, m as i64, 2.0 * s - 1.0)?;
    let l = special::dirichlet_l(d, 2.0 * s)?;
    Ok(g * (PI / d as f64).powf(2.0 * s - 0.5) * sigma / l)
}

/// The constant term `u₀(y₁, y₂, s)` of `Φ_m` on the Weyl chamber `W`.
pub fn constant_term_u0(
    d: i64,
    m: u64,
    y1: f64,
    y2: f64,
    s: f64,
    chamber: &WeylChamber,
) -> Result<f64> {
    let du = arith::check_discriminant(d)?;
    if chamber.d() != du {
        return Err(Error::ContextMismatch {
            left: du,
            right: chamber.d(),
        });
    }
    if (s - 1.0).abs() < 1e-12 {
        return Err(Error::InvalidArgument("u0 has a pole at s = 1".into()));
    }
    if !chamber.contains(y1, y2) {
        return Err(Error::SampleOnWall { m });
    }
    if chamber.supports().binary_search(&m).is_err() {
        return Err(Error::SupportMismatch { m });
    }
    if chi(du, m as i64) == -1 {
        return Ok(0.0);
    }
    let first = 2.0
        * special::zeta(2.0 * s - 1.0)?
        * phi_m_s(du, m, s)?
        * (PI * PI * y1 * y2 / du as f64).powf(1.0 - s);
    let eps = chamber.ctx().eps0().to_f64();
    let e = eps.powf(2.0 - 4.0 * s);
    let mut walls = 0.0;
    for lam in chamber.r_set(m) {
        let a = lam.to_f64() * y1;
        let b = -lam.conj_f64() * y2;
        walls += e * a.powf(1.0 - s) * b.powf(s) + b.powf(1.0 - s) * a.powf(s);
    }
    Ok(first + 4.0 * PI / (2.0 * s - 1.0) / (1.0 - e) * walls)
}

/// `L_m` split into the exact part and the analytic constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LmConstant {
    #[serde(with = "arith::serde_rational")]
    pub phi_at_1: Rational,
    /// `−2σ'_m(−1)/σ_m(−1)`.
    pub sigma_term: LogLinear,
    /// `L_m = φ_m(1)·(2L'/L(−1) + log D − 2σ'/σ)`.
    pub value: AnalyticValue,
}

pub fn l_m_const(d: i64, m: u64) -> Result<LmConstant> {
    let du = arith::check_discriminant(d)?;
    check_m_nonempty(du, m)?;
    let phi = phi_m_at_1(du, m as i64)?;
    let sigma_term = sigma_logderiv_minus1(du, m as i64)?.scale(&int(-2));
    let exact = &LogLinear::log_of(du, int(1)) + &sigma_term;
    let inner = AnalyticValue {
        d: du,
        exact,
        zeta_logderiv: Rational::from_integer(0.into()),
        l_logderiv: int(2),
    };
    Ok(LmConstant {
        value: inner.scale(&phi),
        phi_at_1: phi,
        sigma_term,
    })
}

/// `∫ G_m ω² = −vol(T(m))·(2L'/L(−1) − 2σ'_m/σ_m(−1) + 1 + log D)`.
pub fn green_volume_integral(d: i64, m: u64) -> Result<AnalyticValue> {
    let du = arith::check_discriminant(d)?;
    check_m_nonempty(du, m)?;
    let vol = vol_t(du, m as i64)?;
    let sigma_term = sigma_logderiv_minus1(du, m as i64)?.scale(&int(-2));
    let exact = &(&LogLinear::log_of(du, int(1)) + &sigma_term) + &LogLinear::constant(int(1));
    let inner = AnalyticValue {
        d: du,
        exact,
        zeta_logderiv: Rational::from_integer(0.into()),
        l_logderiv: int(2),
    };
    Ok(inner.scale(&-vol))
}

/// `G_m(z) = ½(Φ_m(z) − L_m)`, with `Φ_m` regularized at `s = 1`.
pub fn g_m_value(
    d: i64,
    m: u64,
    z: &HPoint,
    cfg: &GreenConfig,
    consts: &AnalyticConstants,
) -> Result<LatticeSum> {
    let phi = phi_m_regularized(d, m, z, cfg)?;
    let lm = l_m_const(d, m)?.value.eval(consts);
    Ok(LatticeSum {
        value: 0.5 * (phi.value - lm),
        tail_estimate: 0.5 * phi.tail_estimate,
        terms: phi.terms,
    })
}

/// `G_m(z)` by Richardson extrapolation of `Φ_m(z, s) − φ_m(1)/(s − 1)` from
/// `s = 1 + offsets` to `s = 1`.
pub fn g_m_richardson(
    d: i64,
    m: u64,
    z: &HPoint,
    cfg: &GreenConfig,
    consts: &AnalyticConstants,
) -> Result<f64> {
    let du = arith::check_discriminant(d)?;
    if cfg.extrapolation_offsets.len() < 2 || cfg.extrapolation_offsets.iter().any(|&h| !(h > 0.0))
    {
        return Err(Error::InvalidArgument(
            "need at least two positive offsets".into(),
        ));
    }
    let c = arith::to_f64(&phi_m_at_1(du, m as i64)?);
    let mut hs = Vec::new();
    let mut vals = Vec::new();
    for &h in &cfg.extrapolation_offsets {
        let v = phi_m(d, m, z, 1.0 + h, cfg)?.value - c / h;
        hs.push(h);
        vals.push(v);
    }
    let limit = neville_at_zero(&hs, &vals)?;
    let lm = l_m_const(d, m)?.value.eval(consts);
    Ok(0.5 * (limit - lm))
}

/// Polynomial extrapolation to 0 through `(hᵢ, vᵢ)`; fails when successive
/// corrections stop shrinking.
fn neville_at_zero(h: &[f64], v: &[f64]) -> Result<f64> {
    let n = h.len();
    let mut p = v.to_vec();
    let mut prev_change = f64::INFINITY;
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (h[i + k] * p[i] - h[i] * p[i + 1]) / (h[i + k] - h[i]);
        }
        let change = (p[0] - p[1.min(n - k - 1)]).abs();
        if k > 1 && change > 10.0 * prev_change && change > 1e-9 {
            return Err(Error::Convergence(format!(
                "extrapolation diverges: corrections {prev_change:e} then {change:e}"
            )));
        }
        prev_change = change;
    }
    Ok(p[0])
}
