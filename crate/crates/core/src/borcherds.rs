//! Weyl chambers, Weyl vectors and Borcherds product expansions.
//!
//! A chamber is selected by a sample point `(y₁, y₂)` and never described by
//! inequalities. All wall tests are exact: the sample coordinates are read
//! as the dyadic rationals their `f64` values denote.
//!
//! Product expansions are truncated by a grade `tr(w·ν)`, where `w ≫ 0`
//! lies inside the chamber. When the chamber contains the diagonal `w = 1`
//! and the grade is the trace; otherwise `w` is the sum of the two boundary
//! rays scaled to trace 2, which keeps every factor of positive grade.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, int, BigPair, JsonInt, Rational};
use crate::divisor_sums::{classify_t, HZClass};
use crate::error::{Error, Result};
use crate::obstruction::{self, PrincipalPart};
use crate::qseries::QLaurentSeries;
use crate::quadfield::{
    enumerate_norm_in_inverse_different, sign_of_surd, FieldCtx, QuadElem, QuadElemJson,
};

/// A Weyl chamber for the walls `S(m)`, `m ∈ supports`, given by one
/// interior point.
#[derive(Clone, Debug)]
pub struct WeylChamber {
    ctx: FieldCtx,
    supports: Vec<u64>,
    sample: (f64, f64),
    r_sets: BTreeMap<u64, Vec<QuadElem>>,
    walls: Option<(QuadElem, QuadElem)>,
    walls_checked: bool,
}

impl WeylChamber {
    pub fn d(&self) -> u64 {
        self.ctx.d()
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn supports(&self) -> &[u64] {
        &self.supports
    }

    pub fn sample(&self) -> (f64, f64) {
        self.sample
    }

    pub fn walls_checked(&self) -> bool {
        self.walls_checked
    }

    /// `R(W, m)`, sorted by increasing wall ratio `−λ'/λ`.
    pub fn r_set(&self, m: u64) -> &[QuadElem] {
        self.r_sets.get(&m).map_or(&[], |v| v.as_slice())
    }

    pub fn r_sets(&self) -> &BTreeMap<u64, Vec<QuadElem>> {
        &self.r_sets
    }

    /// The normals `(λ_lo, λ_hi)`, both positive, of the walls bounding the
    /// chamber: `λ_lo y₁ + λ_lo' y₂ > 0 > λ_hi y₁ + λ_hi' y₂` inside. `None`
    /// when no support contributes a wall.
    pub fn walls(&self) -> Option<&(QuadElem, QuadElem)> {
        self.walls.as_ref()
    }

    /// Whether `(y₁, y₂)` lies strictly inside the chamber.
    pub fn contains(&self, y1: f64, y2: f64) -> bool {
        if !(y1 > 0.0 && y2 > 0.0) {
            return false;
        }
        match &self.walls {
            None => true,
            Some((lo, hi)) => pairing_f64(lo, y1, y2) > 0.0 && pairing_f64(hi, y1, y2) < 0.0,
        }
    }

    /// The grading element `w ≫ 0` with `tr(w) = 2`, inside the chamber.
    pub fn grading_element(&self) -> QuadElem {
        let one = self.ctx.one();
        let Some((lo, hi)) = &self.walls else {
            return one;
        };
        if lo.trace().is_positive() && hi.trace().is_negative() {
            return one;
        }
        let b = wall_ray(&self.ctx, lo) + wall_ray(&self.ctx, hi);
        let t = b.trace();
        b.scale(&(int(2) / t))
    }
}

/// `−λ'√D`, a totally positive point on the wall of `λ`.
fn wall_ray(ctx: &FieldCtx, lam: &QuadElem) -> QuadElem {
    -(lam.conj() * ctx.sqrt_elem())
}

fn pairing_f64(lam: &QuadElem, y1: f64, y2: f64) -> f64 {
    lam.to_f64() * y1 + lam.conj_f64() * y2
}

/// Exact sign of `λy₁ + λ'y₂`.
fn pairing_sign(lam: &QuadElem, y1: &Rational, y2: &Rational) -> i8 {
    let a = lam.a() * &(y1 + y2);
    let b = lam.b() * &(y1 - y2);
    sign_of_surd(&a, &b, lam.d())
}

/// Orders positive wall normals by their ratio `−λ'/λ`.
fn cmp_wall_ratio(lam: &QuadElem, mu: &QuadElem) -> std::cmp::Ordering {
    // r_λ < r_μ  ⇔  λμ' − λ'μ < 0  ⇔  the √D part of λμ' is negative
    let prod = lam * &mu.conj();
    prod.b().cmp(&Rational::zero())
}

pub fn weyl_chamber(d: i64, supports: &[u64], sample: (f64, f64)) -> Result<WeylChamber> {
    let (y1, y2) = sample;
    if !(y1.is_finite() && y2.is_finite() && y1 > 0.0 && y2 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sample point must have positive finite coordinates, got ({y1}, {y2})"
        )));
    }
    let ctx = FieldCtx::new(d)?;
    let du = ctx.d();
    let mut supports: Vec<u64> = supports.to_vec();
    supports.sort_unstable();
    supports.dedup();
    if supports.first() == Some(&0) {
        return Err(Error::InvalidArgument("supports must be positive".into()));
    }

    let y1q = Rational::from_float(y1).expect("finite");
    let y2q = Rational::from_float(y2).expect("finite");
    let eps2 = ctx.eps0().pow(2);
    let eps2_f = eps2.to_f64();
    let r = y1 / y2;

    let mut r_sets = BTreeMap::new();
    for &m in &supports {
        let target = Rational::new(BigInt::from(-(m as i64)), BigInt::from(du));
        let bound = (m as f64 / du as f64).sqrt() * (1.0 / r.sqrt()).max(r.sqrt() * eps2_f);
        let bound = bound * (1.0 + 1e-9) + 1e-9;
        let mut set = Vec::new();
        for lam in enumerate_norm_in_inverse_different(&ctx, &target, bound) {
            if lam.signum() <= 0 {
                continue;
            }
            let s1 = pairing_sign(&lam, &y1q, &y2q);
            if s1 == 0 {
                return Err(Error::SampleOnWall { m });
            }
            if s1 > 0 {
                continue;
            }
            let shifted = &eps2 * &lam;
            let s2 = pairing_sign(&shifted, &y1q, &y2q);
            if s2 == 0 {
                return Err(Error::SampleOnWall { m });
            }
            if s2 > 0 {
                set.push(lam);
            }
        }
        set.sort_by(cmp_wall_ratio);
        r_sets.insert(m, set);
    }

    let all: Vec<&QuadElem> = r_sets.values().flatten().collect();
    let walls = if all.is_empty() {
        None
    } else {
        let hi = all
            .iter()
            .copied()
            .min_by(|a, b| cmp_wall_ratio(a, b))
            .cloned();
        let lo = all
            .iter()
            .copied()
            .max_by(|a, b| cmp_wall_ratio(a, b))
            .map(|l| &eps2 * l);
        lo.zip(hi)
    };

    Ok(WeylChamber {
        ctx,
        supports,
        sample,
        r_sets,
        walls,
        walls_checked: true,
    })
}

/// `ρ_W = ε₀/tr(ε₀) · Σ_{n<0} c̃(n) Σ_{λ∈R(W,−n)} λ`.
pub fn weyl_vector(pp: &PrincipalPart, chamber: &WeylChamber) -> Result<QuadElem> {
    if pp.d() != chamber.d() {
        return Err(Error::ContextMismatch {
            left: pp.d(),
            right: chamber.d(),
        });
    }
    let ctx = &chamber.ctx;
    let mut sum = ctx.zero();
    for (n, c) in pp.terms() {
        let m = n.unsigned_abs();
        if chamber.supports.binary_search(&m).is_err() {
            return Err(Error::SupportMismatch { m });
        }
        let c = Rational::from_integer(c.clone());
        for lam in chamber.r_set(m) {
            sum = sum + lam.scale(&c);
        }
    }
    let eps = ctx.eps0();
    Ok((eps * &sum).scale(&eps.trace().recip()))
}

/// One component `mult · T(m)` of a lift's divisor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorTerm {
    pub m: u64,
    pub multiplicity: JsonInt,
    pub class: String,
}

/// `Σ_{n<0} c̃(n) T(−n)` with the type of each `T(m)`.
pub fn lift_divisor(pp: &PrincipalPart) -> Result<Vec<(u64, BigInt, HZClass)>> {
    pp.support()
        .into_iter()
        .map(|m| {
            let class = classify_t(pp.d(), m as i64)?;
            Ok((m, pp.c_tilde(-(m as i64)), class))
        })
        .collect()
}

/// Least common denominator of the exponents `c̃(n)` known in `f`.
///
/// The product is integral exactly when this is 1; a power `F^N` with `N`
/// a multiple of it has integral exponents.
pub fn exponent_denominator(d: u64, f: &QLaurentSeries) -> BigInt {
    let mut l = BigInt::one();
    for (n, _) in f.terms() {
        let ct = obstruction::c_tilde_of(d, f, n);
        l = l.lcm(ct.denom());
    }
    l
}

/// A truncated Fourier expansion `Σ a(ν) e(νz₁ + ν'z₂)` of a Hilbert
/// modular form, with lift metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct HilbertSeries {
    d: u64,
    weight: Rational,
    weyl_vector: QuadElem,
    grading: QuadElem,
    trace_bound: Rational,
    coeffs: BTreeMap<QuadElem, BigInt>,
    divisor: Vec<DivisorTerm>,
    convergence_bound: Rational,
    walls: Option<(QuadElem, QuadElem)>,
}

impl HilbertSeries {
    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn weyl_vector(&self) -> &QuadElem {
        &self.weyl_vector
    }

    /// The element `w` whose grade `tr(w·ν)` bounds the indices.
    pub fn grading(&self) -> &QuadElem {
        &self.grading
    }

    pub fn trace_bound(&self) -> &Rational {
        &self.trace_bound
    }

    pub fn divisor(&self) -> &[DivisorTerm] {
        &self.divisor
    }

    /// The product converges where `y₁y₂` exceeds this.
    pub fn convergence_bound(&self) -> &Rational {
        &self.convergence_bound
    }

    pub fn coeffs(&self) -> &BTreeMap<QuadElem, BigInt> {
        &self.coeffs
    }

    pub fn coeff(&self, nu: &QuadElem) -> BigInt {
        self.coeffs.get(nu).cloned().unwrap_or_default()
    }

    pub fn grade(&self, nu: &QuadElem) -> Rational {
        (&self.grading * nu).trace()
    }

    /// Nonzero coefficient with the smallest grade.
    pub fn leading_term(&self) -> Option<(&QuadElem, &BigInt)> {
        self.coeffs
            .iter()
            .min_by(|a, b| self.grade(a.0).cmp(&self.grade(b.0)))
    }

    /// Drops indices of grade above `bound`.
    pub fn truncate(&self, bound: &Rational) -> HilbertSeries {
        let bound = bound.min(&self.trace_bound).clone();
        let mut out = self.clone();
        out.coeffs
            .retain(|nu, _| (&self.grading * nu).trace() <= bound);
        out.trace_bound = bound;
        out
    }

    /// Product of two expansions sharing the grading. The result is exact up
    /// to the largest grade both factors determine.
    pub fn checked_mul(&self, other: &HilbertSeries) -> Result<HilbertSeries> {
        if self.d != other.d {
            return Err(Error::ContextMismatch {
                left: self.d,
                right: other.d,
            });
        }
        if self.grading != other.grading {
            return Err(Error::InvalidArgument(
                "expansions use different gradings".into(),
            ));
        }
        let g1 = self.grade(&self.weyl_vector);
        let g2 = other.grade(&other.weyl_vector);
        let bound = (&self.trace_bound + &g2).min(&other.trace_bound + &g1);
        let mut coeffs: BTreeMap<QuadElem, BigInt> = BTreeMap::new();
        for (n1, c1) in &self.coeffs {
            for (n2, c2) in &other.coeffs {
                let nu = n1 + n2;
                if self.grade(&nu) > bound {
                    continue;
                }
                *coeffs.entry(nu).or_default() += c1 * c2;
            }
        }
        coeffs.retain(|_, c| !c.is_zero());

        let mut div: BTreeMap<u64, (BigInt, String)> = BTreeMap::new();
        for t in self.divisor.iter().chain(&other.divisor) {
            let e = div.entry(t.m).or_insert((BigInt::zero(), t.class.clone()));
            e.0 += &t.multiplicity.0;
        }
        let divisor = div
            .into_iter()
            .filter(|(_, (c, _))| !c.is_zero())
            .map(|(m, (c, class))| DivisorTerm {
                m,
                multiplicity: JsonInt(c),
                class,
            })
            .collect();
        let walls = if self.walls == other.walls {
            self.walls.clone()
        } else {
            None
        };

        Ok(HilbertSeries {
            d: self.d,
            weight: &self.weight + &other.weight,
            weyl_vector: &self.weyl_vector + &other.weyl_vector,
            grading: self.grading.clone(),
            trace_bound: bound,
            coeffs,
            divisor,
            convergence_bound: (&self.convergence_bound)
                .max(&other.convergence_bound)
                .clone(),
            walls,
        })
    }

    /// Evaluates the truncated expansion at `(z₁, z₂)`.
    pub fn eval(&self, z1: Complex64, z2: Complex64) -> Result<Complex64> {
        self.check_domain(z1.im, z2.im)?;
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        let mut sum = Complex64::zero();
        for (nu, c) in &self.coeffs {
            let arg = z1 * nu.to_f64() + z2 * nu.conj_f64();
            sum += (two_pi_i * arg).exp() * c.to_f64().unwrap_or(f64::NAN);
        }
        Ok(sum)
    }

    /// `−log‖F‖_Pet = −log|F| − (k/2)·log(16π²y₁y₂)`.
    pub fn neg_log_petersson(&self, z1: Complex64, z2: Complex64) -> Result<f64> {
        let v = self.eval(z1, z2)?;
        let k = arith::to_f64(&self.weight);
        let pi = std::f64::consts::PI;
        Ok(-v.norm().ln() - 0.5 * k * (16.0 * pi * pi * z1.im * z2.im).ln())
    }

    fn check_domain(&self, y1: f64, y2: f64) -> Result<()> {
        if !(y1 > 0.0 && y2 > 0.0) || y1 * y2 <= arith::to_f64(&self.convergence_bound) {
            return Err(Error::InvalidArgument(format!(
                "({y1}, {y2}) is outside the convergence domain y1*y2 > {}",
                arith::fmt_rational(&self.convergence_bound)
            )));
        }
        if let Some((lo, hi)) = &self.walls {
            if !(pairing_f64(lo, y1, y2) > 0.0 && pairing_f64(hi, y1, y2) < 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "({y1}, {y2}) is outside the Weyl chamber of the expansion"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("series serializes")
    }

    fn to_json(&self) -> HilbertSeriesJson {
        HilbertSeriesJson {
            d: self.d as i64,
            weight: BigPair::from(&self.weight),
            weyl_vector: QuadElemJson::from(&self.weyl_vector),
            trace_bound: BigPair::from(&self.trace_bound),
            coeffs: self
                .coeffs
                .iter()
                .map(|(nu, c)| CoeffJson {
                    nu: QuadElemJson::from(nu),
                    c: JsonInt(c.clone()),
                })
                .collect(),
            grading: Some(QuadElemJson::from(&self.grading)),
            convergence_bound: Some(BigPair::from(&self.convergence_bound)),
            divisor: Some(self.divisor.clone()),
            walls: self
                .walls
                .as_ref()
                .map(|(lo, hi)| [QuadElemJson::from(lo), QuadElemJson::from(hi)]),
        }
    }

    /// Parses and validates the JSON form. Indices must differ from the Weyl
    /// vector by elements of the inverse different and respect the bound.
    pub fn from_json_str(s: &str) -> Result<HilbertSeries> {
        let raw: HilbertSeriesJson = serde_json::from_str(s)?;
        let d = arith::check_discriminant(raw.d)?;
        let pair = |p: &BigPair| p.to_rational().map_err(Error::Schema);
        let weight = pair(&raw.weight)?;
        let trace_bound = pair(&raw.trace_bound)?;
        let weyl_vector = raw.weyl_vector.into_elem(d);
        let grading = raw
            .grading
            .map_or_else(|| QuadElem::from_rational(d, int(1)), |g| g.into_elem(d));
        if !crate::quadfield::is_totally_positive(&grading) || grading.trace() != int(2) {
            return Err(Error::Schema(
                "grading must be totally positive with trace 2".into(),
            ));
        }
        let convergence_bound = match &raw.convergence_bound {
            Some(p) => pair(p)?,
            None => Rational::zero(),
        };
        if convergence_bound.is_negative() {
            return Err(Error::Schema("convergence bound is negative".into()));
        }
        let mut coeffs = BTreeMap::new();
        for entry in raw.coeffs {
            let nu = entry.nu.into_elem(d);
            if !(&nu - &weyl_vector).in_inverse_different() {
                return Err(Error::Schema(format!(
                    "index {nu} is off the expansion lattice"
                )));
            }
            if (&grading * &nu).trace() > trace_bound {
                return Err(Error::Schema(format!("index {nu} exceeds the trace bound")));
            }
            if entry.c.0.is_zero() {
                continue;
            }
            if coeffs.insert(nu.clone(), entry.c.0).is_some() {
                return Err(Error::Schema(format!("duplicate index {nu}")));
            }
        }
        let walls = raw.walls.map(|[lo, hi]| (lo.into_elem(d), hi.into_elem(d)));
        Ok(HilbertSeries {
            d,
            weight,
            weyl_vector,
            grading,
            trace_bound,
            coeffs,
            divisor: raw.divisor.unwrap_or_default(),
            convergence_bound,
            walls,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct HilbertSeriesJson {
    #[serde(rename = "D")]
    d: i64,
    weight: BigPair,
    weyl_vector: QuadElemJson,
    trace_bound: BigPair,
    coeffs: Vec<CoeffJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grading: Option<QuadElemJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    convergence_bound: Option<BigPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    divisor: Option<Vec<DivisorTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    walls: Option<[QuadElemJson; 2]>,
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    nu: QuadElemJson,
    c: JsonInt,
}

/// Default truncation `10·tr(ρ_W) + 10`.
pub fn default_trace_bound(rho: &QuadElem) -> Rational {
    rho.trace() * int(10) + int(10)
}

/// Linear grade `tr(w·ν)` in the coordinates `ν = v/2 + u√D/(2D)`, scaled
/// to integers.
struct Grader {
    scale: BigInt,
    along_v: i64,
    along_u: i64,
}

impl Grader {
    fn new(w: &QuadElem) -> Result<Self> {
        // tr(wν) = w.a·v + w.b·u
        let scale = w.a().denom().lcm(w.b().denom());
        let sr = Rational::from_integer(scale.clone());
        let conv = |x: Rational| {
            x.to_integer()
                .to_i64()
                .ok_or_else(|| Error::InvalidArgument("grading element too large".into()))
        };
        Ok(Grader {
            along_v: conv(w.a() * &sr)?,
            along_u: conv(w.b() * &sr)?,
            scale,
        })
    }

    fn grade(&self, u: i64, v: i64) -> i64 {
        self.along_v * v + self.along_u * u
    }

    /// `floor(scale · x)`.
    fn scaled_floor(&self, x: &Rational) -> Result<i64> {
        (x * Rational::from_integer(self.scale.clone()))
            .floor()
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::InvalidArgument("trace bound too large".into()))
    }
}

/// Coefficient precision needed from the input form to expand to `bound`.
pub fn required_precision(
    chamber: &WeylChamber,
    pp: &PrincipalPart,
    bound: &Rational,
) -> Result<i64> {
    let rho = weyl_vector(pp, chamber)?;
    let w = chamber.grading_element();
    let room = bound - (&w * &rho).trace();
    if room.is_negative() {
        return Ok(1);
    }
    // tr(wν) ≥ 2√(N(w)N(ν)) for ν ≫ 0
    let nmax = int(chamber.d() as i64) * &room * &room / (int(4) * w.norm());
    Ok(nmax.floor().to_integer().to_i64().unwrap_or(i64::MAX - 1) + 1)
}

/// Builds the input form for `pp` and lifts it.
pub fn lift_principal_part(
    pp: &PrincipalPart,
    chamber: &WeylChamber,
    bound: &Rational,
) -> Result<HilbertSeries> {
    let prec = required_precision(chamber, pp, bound)?.max(1);
    let f = obstruction::build_input_form(pp, prec)?;
    borcherds_lift(&f, chamber, bound)
}

/// Expands `e(ρ_W z₁ + ρ_W' z₂) Π_{(ν,W)>0} (1 − e(νz₁ + ν'z₂))^{c̃(D·N(ν))}`
/// up to grade `bound`.
pub fn borcherds_lift(
    f: &QLaurentSeries,
    chamber: &WeylChamber,
    bound: &Rational,
) -> Result<HilbertSeries> {
    let d = chamber.d();
    let ctx = &chamber.ctx;
    let pp = obstruction::principal_part_of(d as i64, f)?;
    let rho = weyl_vector(&pp, chamber)?;
    let w = chamber.grading_element();
    let rho_grade = (&w * &rho).trace();
    if bound < &rho_grade {
        return Err(Error::TraceBoundTooSmall {
            bound: arith::fmt_rational(bound),
            needed: arith::fmt_rational(&rho_grade),
        });
    }
    let grader = Grader::new(&w)?;
    let room = grader.scaled_floor(&(bound - &rho_grade))?;

    let factors = factor_indices(chamber, &w, &grader, room, f)?;
    let series = expand_product(&factors, &grader, room);

    let mut coeffs = BTreeMap::new();
    for ((u, v), c) in series {
        if c.is_zero() {
            continue;
        }
        let offset = QuadElem::new(
            d,
            Rational::new(BigInt::from(v), BigInt::from(2)),
            Rational::new(BigInt::from(u), BigInt::from(2 * d as i64)),
        );
        coeffs.insert(&rho + &offset, c);
    }

    let divisor = lift_divisor(&pp)?
        .into_iter()
        .map(|(m, c, class)| DivisorTerm {
            m,
            multiplicity: JsonInt(c),
            class: class.to_string(),
        })
        .collect();
    debug_assert!(ctx.d() == d);

    Ok(HilbertSeries {
        d,
        weight: f.coeff(0),
        weyl_vector: rho,
        grading: w,
        trace_bound: bound.clone(),
        coeffs,
        divisor,
        convergence_bound: Rational::new(BigInt::from(pp.max_pole()), BigInt::from(d)),
        walls: chamber.walls.clone(),
    })
}

struct Factor {
    u: i64,
    v: i64,
    grade: i64,
    exponent: BigInt,
}

/// All `ν ∈ 𝔡⁻¹` positive on the chamber with `0 < grade ≤ room` and a
/// nonzero exponent.
fn factor_indices(
    chamber: &WeylChamber,
    w: &QuadElem,
    grader: &Grader,
    room: i64,
    f: &QLaurentSeries,
) -> Result<Vec<Factor>> {
    let d = chamber.d() as i64;
    let sd = (d as f64).sqrt();
    if room <= 0 {
        return Ok(Vec::new());
    }
    let room_f = room as f64 / grader.scale.to_f64().unwrap_or(f64::INFINITY);

    // Boundary rays of the chamber as points (y₁, y₂), and the dual-cone
    // tests as integer linear forms in (u, v).
    let (rays, ray_forms): ([(f64, f64); 2], Option<[Grader; 2]>) = match chamber.walls() {
        None => ([(1.0, 0.0), (0.0, 1.0)], None),
        Some((lo, hi)) => {
            let b1 = wall_ray(&chamber.ctx, lo);
            let b2 = wall_ray(&chamber.ctx, hi);
            (
                [(b1.to_f64(), b1.conj_f64()), (b2.to_f64(), b2.conj_f64())],
                Some([Grader::new(&b1)?, Grader::new(&b2)?]),
            )
        }
    };

    // w = β₁ r₁ + β₂ r₂ with β > 0, so each pairing (ν, rᵢ) ≤ room/βᵢ.
    let (w1, w2) = (w.to_f64(), w.conj_f64());
    let det = rays[0].0 * rays[1].1 - rays[0].1 * rays[1].0;
    let beta1 = (w1 * rays[1].1 - w2 * rays[1].0) / det;
    let beta2 = (rays[0].0 * w2 - rays[0].1 * w1) / det;
    let s_max = [
        room_f / beta1 * (1.0 + 1e-9) + 1e-9,
        room_f / beta2 * (1.0 + 1e-9) + 1e-9,
    ];

    // Corners of the region in (ν, ν') coordinates.
    let (mut vlo, mut vhi, mut ulo, mut uhi) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for s1 in [0.0, s_max[0]] {
        for s2 in [0.0, s_max[1]] {
            // x r₁ + y r₁' = s1, x r₂ + y r₂' = s2
            let x = (s1 * rays[1].1 - s2 * rays[0].1) / det;
            let y = (rays[0].0 * s2 - rays[1].0 * s1) / det;
            let v = x + y;
            let u = sd * (x - y);
            vlo = vlo.min(v);
            vhi = vhi.max(v);
            ulo = ulo.min(u);
            uhi = uhi.max(u);
        }
    }
    let (vlo, vhi) = (vlo.floor() as i64 - 1, vhi.ceil() as i64 + 1);
    let (ulo, uhi) = (ulo.floor() as i64 - 1, uhi.ceil() as i64 + 1);

    let mut out = Vec::new();
    for v in vlo..=vhi {
        for u in ulo..=uhi {
            if (u - v).rem_euclid(2) != 0 || (u == 0 && v == 0) {
                continue;
            }
            let g = grader.grade(u, v);
            if g <= 0 || g > room {
                continue;
            }
            let positive = match &ray_forms {
                Some([r1, r2]) => r1.grade(u, v) >= 0 && r2.grade(u, v) >= 0,
                None => {
                    v > 0 && (u as i128) * (u as i128) < (d as i128) * (v as i128) * (v as i128)
                }
            };
            if !positive {
                continue;
            }
            let n = (d * v * v - u * u) / 4;
            if n >= f.prec() {
                return Err(Error::PrecisionTooSmall {
                    needed: n + 1,
                    available: f.prec(),
                });
            }
            let ct = obstruction::c_tilde_of(d as u64, f, n);
            if ct.is_zero() {
                continue;
            }
            if !arith::is_integer(&ct) {
                return Err(Error::NonIntegerExponent {
                    n,
                    value: arith::fmt_rational(&ct),
                });
            }
            out.push(Factor {
                u,
                v,
                grade: g,
                exponent: ct.to_integer(),
            });
        }
    }
    Ok(out)
}

/// `(−1)^k · binom(c, k)` for `k = 0..=kmax`, the coefficients of `(1 − X)^c`.
fn binomial_series(c: &BigInt, kmax: i64) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(kmax as usize + 1);
    let mut cur = BigInt::one();
    out.push(cur.clone());
    for k in 1..=kmax {
        // binom(c, k) = binom(c, k−1)·(c − k + 1)/k, sign flips each step
        cur = -(cur * (c - BigInt::from(k - 1))) / BigInt::from(k);
        if cur.is_zero() {
            break;
        }
        out.push(cur.clone());
    }
    out
}

fn expand_product(factors: &[Factor], grader: &Grader, room: i64) -> HashMap<(i64, i64), BigInt> {
    let mut series: HashMap<(i64, i64), BigInt> = HashMap::new();
    series.insert((0, 0), BigInt::one());
    for fac in factors {
        let kmax = room / fac.grade;
        let binom = binomial_series(&fac.exponent, kmax);
        let mut next: HashMap<(i64, i64), BigInt> = HashMap::with_capacity(series.len() * 2);
        for (&(u, v), c) in &series {
            let g0 = grader.grade(u, v);
            for (k, b) in binom.iter().enumerate() {
                let k = k as i64;
                if g0 + k * fac.grade > room {
                    break;
                }
                let key = (u + k * fac.u, v + k * fac.v);
                *next.entry(key).or_default() += c * b;
            }
        }
        next.retain(|_, c| !c.is_zero());
        series = next;
    }
    series
}
