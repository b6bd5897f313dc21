//! Closed-form arithmetic intersection numbers on Hilbert modular surfaces
//! of level `N`.
//!
//! Every number is an [`AnalyticValue`]: rationals, rational multiples of
//! `log p`, and rational multiples of `ζ'(−1)/ζ(−1)` and `L'(−1,χ_D)/L(−1,χ_D)`.
//! The values live in `R_N`, the reals modulo `Q·log p` for `p | N`, so each
//! result also names those primes.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::analytic::{analytic_constants, AnalyticConstants, AnalyticValue};
use crate::arith::{self, int, rat, BigPair, Rational};
use crate::characters::{chi, zeta_k_minus1};
use crate::divisor_sums::{classify_t, eisenstein_coeff, sigma_logderiv_minus1, vol_t};
use crate::error::{Error, Result};
use crate::loglinear::LogLinear;
use crate::obstruction::{build_input_form, c_tilde_of, PrincipalPart};

/// `[Γ_K : Γ_K(N)] = |SL₂(O_K/N)|`, a product over the prime ideal powers
/// `𝔭^e ∥ N` of `N(𝔭)^{3e}(1 − N(𝔭)^{−2})`.
pub fn congruence_index(d: i64, n: u64) -> Result<BigInt> {
    let du = arith::check_discriminant(d)?;
    if n == 0 {
        return Err(Error::InvalidArgument("level N must be at least 1".into()));
    }
    let mut out = BigInt::one();
    for (p, e) in arith::factorize(n) {
        let pb = BigInt::from(p);
        // (norm of 𝔭, exponent of 𝔭 in N, number of such 𝔭)
        let (q, f, count) = match chi(du, p as i64) {
            1 => (pb.clone(), e, 2),
            -1 => (&pb * &pb, e, 1),
            _ => (pb.clone(), 2 * e, 1),
        };
        let local = q.pow(3 * f - 2) * (&q * &q - 1);
        for _ in 0..count {
            out *= &local;
        }
    }
    Ok(out)
}

/// `d_N = φ(N)·[Γ_K : Γ_K(N)]`, the degree of the level-`N` cover.
pub fn d_n(d: i64, n: u64) -> Result<BigInt> {
    Ok(BigInt::from(arith::euler_phi(n)) * congruence_index(d, n)?)
}

/// Primes `p | N`: results are defined modulo `Q·log p` for these.
pub fn caveat_primes(n: u64) -> Vec<u64> {
    arith::factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// A warning for levels below 3, where the moduli problem is not a scheme and
/// the closed forms are formal.
pub fn level_warning(n: u64) -> Option<String> {
    (n < 3).then(|| format!("level N={n} < 3: the value is the formal closed form"))
}

fn analytic(d: u64, exact: LogLinear, zeta: Rational, l: Rational) -> AnalyticValue {
    AnalyticValue {
        d,
        exact,
        zeta_logderiv: zeta,
        l_logderiv: l,
    }
}

fn check_weight(k: i64) -> Result<Rational> {
    if k == 0 {
        return Err(Error::InvalidArgument("weight k must be nonzero".into()));
    }
    Ok(int(k))
}

/// `M̄_k(Γ_K(N))³ = −k³ d_N ζ_K(−1)(ζ_K'/ζ_K(−1) + ζ'/ζ(−1) + 3/2 + ½ log D)`.
pub fn self_intersection(d: i64, n: u64, k: i64) -> Result<AnalyticValue> {
    let du = arith::check_discriminant(d)?;
    let kr = check_weight(k)?;
    let scale = -(&kr * &kr * &kr) * Rational::from_integer(d_n(d, n)?) * zeta_k_minus1(d)?;
    let inner = analytic(
        du,
        &LogLinear::constant(rat(3, 2)) + &LogLinear::log_of(du, rat(1, 2)),
        int(2),
        int(1),
    );
    Ok(inner.scale(&scale))
}

/// `T̂_N(m)·ĉ₁(M̄_k)² = −k² d_N vol(T(m))(2ζ_K'/ζ_K(−1) + 2ζ'/ζ(−1) + 3 + log D)`.
pub fn hz_pairing(d: i64, n: u64, k: i64, m: u64) -> Result<AnalyticValue> {
    let du = arith::check_discriminant(d)?;
    let kr = check_weight(k)?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let vol = vol_t(du, m as i64)?;
    if vol.is_zero() {
        return Ok(AnalyticValue::zero(du));
    }
    let scale = -(&kr * &kr) * Rational::from_integer(d_n(d, n)?) * vol;
    let inner = analytic(
        du,
        &LogLinear::constant(int(3)) + &LogLinear::log_of(du, int(1)),
        int(4),
        int(2),
    );
    Ok(inner.scale(&scale))
}

fn height_prefactor(d: i64, n: u64, k: i64, m: u64) -> Result<Rational> {
    let du = arith::check_discriminant(d)?;
    let kr = check_weight(k)?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    if chi(du, m as i64) == -1 {
        return Err(Error::EmptyDivisor { m });
    }
    Ok(-(int(4) * &kr * &kr) * Rational::from_integer(d_n(d, n)?) * vol_t(du, m as i64)?)
}

/// Faltings height of `T_N(m)`:
/// `−(2k)² d_N vol(T(m))(ζ'/ζ(−1) + ½ + ½σ'_m(−1)/σ_m(−1))`.
///
/// For isotropic or non-compact `T(m)` this is the value obtained from the
/// same intersection formula and serves as a definition.
pub fn faltings_height(d: i64, n: u64, k: i64, m: u64) -> Result<AnalyticValue> {
    let du = arith::check_discriminant(d)?;
    let pre = height_prefactor(d, n, k, m)?;
    let sigma = sigma_logderiv_minus1(du, m as i64)?.scale(&rat(1, 2));
    let inner = analytic(du, &LogLinear::constant(rat(1, 2)) + &sigma, int(1), int(0));
    Ok(inner.scale(&pre))
}

fn squarefree_primes_with_character(d: u64, m: u64, want: i8) -> Result<Vec<u64>> {
    let f = arith::factorize(m);
    if f.iter().any(|&(p, e)| e > 1 || chi(d, p as i64) != want) {
        return Err(Error::InvalidArgument(format!(
            "{m} must be square-free with χ_D(p) = {want} for every p | m"
        )));
    }
    Ok(f.into_iter().map(|(p, _)| p).collect())
}

fn height_with_prime_sum(
    d: i64,
    n: u64,
    k: i64,
    m: u64,
    primes: &[u64],
    sign: i64,
) -> Result<AnalyticValue> {
    let du = d as u64;
    let pre = height_prefactor(d, n, k, m)?;
    let mut exact = LogLinear::constant(rat(1, 2));
    for &p in primes {
        let p = p as i64;
        exact.add_log_prime(p as u64, rat(-(p - sign), 4 * (p + sign)));
    }
    Ok(analytic(du, exact, int(1), int(0)).scale(&pre))
}

/// The height for square-free `m` whose primes all split:
/// `−(2k)² d_N vol(T(m))(ζ'/ζ(−1) + ½ − ¼ Σ_{p|m} (p−1)/(p+1) log p)`.
pub fn faltings_height_split(d: i64, n: u64, k: i64, m: u64) -> Result<AnalyticValue> {
    let du = arith::check_discriminant(d)?;
    let primes = squarefree_primes_with_character(du, m, 1)?;
    height_with_prime_sum(d, n, k, m, &primes, 1)
}

/// The height for square-free `m` with an even number of prime factors, all
/// inert (then `T(m)` is a compact Shimura curve):
/// `−(2k)² d_N vol(T(m))(ζ'/ζ(−1) + ½ − ¼ Σ_{p|m} (p+1)/(p−1) log p)`.
pub fn faltings_height_inert(d: i64, n: u64, k: i64, m: u64) -> Result<AnalyticValue> {
    let du = arith::check_discriminant(d)?;
    let primes = squarefree_primes_with_character(du, m, -1)?;
    if primes.len() % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "{m} has an odd number of prime factors"
        )));
    }
    height_with_prime_sum(d, n, k, m, &primes, -1)
}

/// A symbolic value and its floating-point evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportValue {
    pub symbolic: AnalyticValue,
    pub value: f64,
}

impl ReportValue {
    fn new(symbolic: AnalyticValue, consts: &AnalyticConstants) -> Self {
        let value = symbolic.eval(consts);
        ReportValue { symbolic, value }
    }
}

/// `c(0)·ĉ₁(M̄_1)·ĉ₁(M̄_k)² − Σ c̃(n)·T̂_N(−n)·ĉ₁(M̄_k)²` for one input form;
/// it vanishes because the form's Borcherds product realizes the relation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub principal_part: String,
    #[serde(with = "arith::serde_rational")]
    pub weight: Rational,
    pub residual: AnalyticValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionReport {
    #[serde(rename = "D")]
    pub d: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub k: i64,
    pub d_n: arith::JsonInt,
    pub self_intersection: ReportValue,
    pub volumes: BTreeMap<u64, BigPair>,
    pub eisenstein: BTreeMap<u64, BigPair>,
    pub classes: BTreeMap<u64, String>,
    pub pairings: BTreeMap<u64, ReportValue>,
    pub heights: BTreeMap<u64, ReportValue>,
    /// `pairing(m)/B_D(m)` for the `m` with `B_D(m) ≠ 0`.
    pub eisenstein_ratio: BTreeMap<u64, f64>,
    /// The common value of the ratio.
    pub eisenstein_ratio_symbolic: AnalyticValue,
    /// `m ≤ m_max` with `B_D(m) = 0`; no ratio is formed for these.
    pub flagged: Vec<u64>,
    pub relations: Vec<RelationCheck>,
    /// `m` whose principal part `q^{−m}` is obstructed.
    pub obstructed: Vec<u64>,
    pub caveat_primes: Vec<u64>,
    pub warnings: Vec<String>,
}

impl IntersectionReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Tabulates pairings, heights and Eisenstein ratios for `1 ≤ m ≤ m_max`,
/// and checks the relations coming from the input forms `q^{−m} + O(1)`.
pub fn generating_series_report(d: i64, n: u64, k: i64, m_max: u64) -> Result<IntersectionReport> {
    let du = arith::check_discriminant(d)?;
    check_weight(k)?;
    if m_max == 0 {
        return Err(Error::InvalidArgument("m_max must be at least 1".into()));
    }
    let consts = analytic_constants(du, 1e-12)?;
    let self_int = self_intersection(d, n, k)?;
    // vol(T(m)) = −B_D(m)·ζ_K(−1)/4, so pairing(m)/B_D(m) = −self_intersection/(2k)
    let ratio_symbolic = self_int.scale(&(rat(-1, 2) / int(k)));

    let mut report = IntersectionReport {
        d: du,
        n,
        k,
        d_n: arith::JsonInt(d_n(d, n)?),
        self_intersection: ReportValue::new(self_int.clone(), &consts),
        volumes: BTreeMap::new(),
        eisenstein: BTreeMap::new(),
        classes: BTreeMap::new(),
        pairings: BTreeMap::new(),
        heights: BTreeMap::new(),
        eisenstein_ratio: BTreeMap::new(),
        eisenstein_ratio_symbolic: ratio_symbolic.clone(),
        flagged: Vec::new(),
        relations: Vec::new(),
        obstructed: Vec::new(),
        caveat_primes: caveat_primes(n),
        warnings: level_warning(n).into_iter().collect(),
    };
    let expected_ratio = ratio_symbolic.eval(&consts);

    for m in 1..=m_max {
        let b = eisenstein_coeff(du, m as i64)?;
        let pairing = hz_pairing(d, n, k, m)?;
        report
            .volumes
            .insert(m, BigPair::from(&vol_t(du, m as i64)?));
        report.eisenstein.insert(m, BigPair::from(&b));
        report
            .classes
            .insert(m, classify_t(du, m as i64)?.to_string());
        if b.is_zero() {
            report.flagged.push(m);
        } else {
            let exact_ratio = pairing.scale(&(int(1) / &b));
            if exact_ratio != ratio_symbolic {
                return Err(Error::Convergence(format!(
                    "pairing({m})/B_D({m}) = {exact_ratio} differs from {ratio_symbolic}"
                )));
            }
            let r = pairing.eval(&consts) / arith::to_f64(&b);
            if (r - expected_ratio).abs() > 1e-10 * expected_ratio.abs() {
                return Err(Error::Convergence(format!(
                    "float ratio at m={m} is {r}, expected {expected_ratio}"
                )));
            }
            report.eisenstein_ratio.insert(m, r);
            report
                .heights
                .insert(m, ReportValue::new(faltings_height(d, n, k, m)?, &consts));
        }
        report
            .pairings
            .insert(m, ReportValue::new(pairing, &consts));
    }

    for m in 1..=m_max {
        if chi(du, m as i64) == -1 {
            continue;
        }
        let pp = PrincipalPart::new(d, [(-(m as i64), 1)])?;
        match relation_check(&pp, n, k) {
            Ok(check) => report.relations.push(check),
            Err(Error::Obstructed(_)) => report.obstructed.push(m),
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// Builds the input form with principal part `pp` and evaluates its relation
/// residual.
pub fn relation_check(pp: &PrincipalPart, n: u64, k: i64) -> Result<RelationCheck> {
    let d = pp.d();
    let f = build_input_form(pp, 1)?;
    let weight = f.coeff(0);
    let mut residual = self_intersection(d as i64, n, k)?.scale(&(&weight / int(k)));
    for (e, _) in pp.terms() {
        let c = c_tilde_of(d, &f, e);
        let pairing = hz_pairing(d as i64, n, k, (-e) as u64)?;
        residual = residual.sub(&pairing.scale(&c));
    }
    Ok(RelationCheck {
        principal_part: pp.to_string(),
        weight,
        residual,
    })
}

/// `true` when `v` is zero modulo `Q·log p` for the caveat primes `p | N`.
pub fn vanishes_in_r_n(v: &AnalyticValue, n: u64) -> bool {
    let caveat = caveat_primes(n);
    v.zeta_logderiv.is_zero()
        && v.l_logderiv.is_zero()
        && v.exact.constant_part().is_zero()
        && v.exact
            .terms()
            .all(|(p, c)| c.is_zero() || caveat.contains(&p))
}
