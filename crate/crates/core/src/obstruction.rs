//! Principal parts, the obstruction pairing against weight-2 cusp forms, and
//! construction of weakly holomorphic weight-0 plus-space forms with a
//! prescribed principal part.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, int, BigPair, Rational};
use crate::characters::chi;
use crate::divisor_sums::{eisenstein_coeff, vol_t};
use crate::error::{Error, Result};
use crate::qseries::{self, plus_space_violations, QLaurentSeries};

/// `(dim M₂⁺(D, χ_D), dim S₂⁺(D, χ_D))`.
pub fn dim_plus_space(d: i64) -> Result<(u64, u64)> {
    let du = arith::check_discriminant(d)?;
    let m = (du + 19) / 24;
    Ok((m, m - 1))
}

/// The principal part `{n < 0 ↦ c̃(n)}` of a weight-0 plus-space form, in the
/// tilde normalization (`c̃(n) = 2c(n)` when `D | n`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipalPart {
    d: u64,
    terms: BTreeMap<i64, BigInt>,
}

impl PrincipalPart {
    pub fn empty(d: u64) -> Self {
        PrincipalPart {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn new(d: i64, terms: impl IntoIterator<Item = (i64, i64)>) -> Result<Self> {
        Self::from_big(d, terms.into_iter().map(|(n, c)| (n, BigInt::from(c))))
    }

    pub fn from_big(d: i64, terms: impl IntoIterator<Item = (i64, BigInt)>) -> Result<Self> {
        let du = arith::check_discriminant(d)?;
        let mut pp = PrincipalPart::empty(du);
        for (n, c) in terms {
            if n >= 0 {
                return Err(Error::InvalidArgument(format!(
                    "principal part exponents must be negative, got {n}"
                )));
            }
            if c.is_zero() {
                continue;
            }
            if chi(du, n) == -1 {
                return Err(Error::PlusSpaceViolation(n));
            }
            if pp.terms.insert(n, c).is_some() {
                return Err(Error::InvalidArgument(format!("exponent {n} given twice")));
            }
        }
        Ok(pp)
    }

    /// Parses `"-1:1, -4:2"`.
    pub fn parse(d: i64, s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for item in s.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (n, c) = item.split_once(':').ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "principal part term '{item}' is not of the form n:c"
                ))
            })?;
            let n: i64 = n
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad exponent '{}'", n.trim())))?;
            let c: BigInt = c
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad coefficient '{}'", c.trim())))?;
            terms.push((n, c));
        }
        Self::from_big(d, terms)
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(n, c̃(n))` with `c̃(n) ≠ 0`, most negative first.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(n, c)| (*n, c))
    }

    pub fn c_tilde(&self, n: i64) -> BigInt {
        self.terms.get(&n).cloned().unwrap_or_default()
    }

    /// The actual Fourier coefficient `c(n)`.
    pub fn c(&self, n: i64) -> Rational {
        let ct = Rational::from_integer(self.c_tilde(n));
        if n % self.d as i64 == 0 {
            ct / int(2)
        } else {
            ct
        }
    }

    /// Largest pole order `max(−n)`, zero when empty.
    pub fn max_pole(&self) -> u64 {
        self.terms.keys().next().map_or(0, |n| n.unsigned_abs())
    }

    /// The divisor indices `m = −n` with nonzero multiplicity.
    pub fn support(&self) -> Vec<u64> {
        self.terms.keys().rev().map(|n| n.unsigned_abs()).collect()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::ContextMismatch {
                left: self.d,
                right: other.d,
            });
        }
        let mut out = self.clone();
        for (n, c) in &other.terms {
            let e = out.terms.entry(*n).or_default();
            *e += c;
            if e.is_zero() {
                out.terms.remove(n);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return PrincipalPart::empty(self.d);
        }
        PrincipalPart {
            d: self.d,
            terms: self.terms.iter().map(|(n, c)| (*n, c * k)).collect(),
        }
    }
}

impl fmt::Display for PrincipalPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(n, c)| format!("{n}:{c}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// `c(0) = −½ Σ c̃(n) B_D(−n)`.
pub fn constant_term(pp: &PrincipalPart) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (n, c) in pp.terms() {
        acc += eisenstein_coeff(pp.d, -n)? * Rational::from_integer(c.clone());
    }
    Ok(-acc / int(2))
}

/// `c(0)` through volumes: `(2/ζ_K(−1)) Σ c̃(n) vol(T(−n))`.
pub fn constant_term_from_volumes(pp: &PrincipalPart) -> Result<Rational> {
    let zk = crate::characters::zeta_k_minus1(pp.d as i64)?;
    let mut acc = Rational::zero();
    for (n, c) in pp.terms() {
        acc += vol_t(pp.d, -n)? * Rational::from_integer(c.clone());
    }
    Ok(acc * int(2) / zk)
}

/// A list of weight-2 plus-space cusp forms supplied from outside.
#[derive(Clone, Debug, PartialEq)]
pub struct CuspBasis {
    pub d: u64,
    pub prec: i64,
    pub forms: Vec<QLaurentSeries>,
    pub provenance: String,
}

#[derive(Serialize, Deserialize)]
struct CuspBasisJson {
    #[serde(rename = "D")]
    d: i64,
    weight: i64,
    prec: i64,
    forms: Vec<CuspFormJson>,
    provenance: String,
}

#[derive(Serialize, Deserialize)]
struct CuspFormJson {
    coeffs: Vec<BigPair>,
    valuation: i64,
}

impl CuspBasis {
    pub fn new(
        d: i64,
        prec: i64,
        forms: Vec<QLaurentSeries>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let du = arith::check_discriminant(d)?;
        if prec < 1 {
            return Err(Error::Schema(format!("prec must be positive, got {prec}")));
        }
        for (i, f) in forms.iter().enumerate() {
            if f.prec() < prec {
                return Err(Error::Schema(format!(
                    "form {i} is known only below q^{}",
                    f.prec()
                )));
            }
            if f.valuation() < 1 {
                return Err(Error::Schema(format!("form {i} is not cuspidal")));
            }
            if let Some(&n) = plus_space_violations(f, du, 1).first() {
                return Err(Error::PlusSpaceViolation(n));
            }
        }
        let forms: Vec<QLaurentSeries> = forms.into_iter().map(|f| f.truncate(prec)).collect();
        if rank(&forms, 1, prec) < forms.len() {
            return Err(Error::Schema("cusp forms are linearly dependent".into()));
        }
        Ok(CuspBasis {
            d: du,
            prec,
            forms,
            provenance: provenance.into(),
        })
    }

    pub fn empty(d: i64) -> Result<Self> {
        CuspBasis::new(d, 1, Vec::new(), "empty")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: CuspBasisJson = serde_json::from_str(s)?;
        if raw.weight != 2 {
            return Err(Error::Schema(format!(
                "weight must be 2, got {}",
                raw.weight
            )));
        }
        if raw.prec < 1 || raw.prec > qseries::MAX_SERIES_LEN {
            return Err(Error::Schema(format!("prec {} out of range", raw.prec)));
        }
        let mut forms = Vec::with_capacity(raw.forms.len());
        for f in raw.forms {
            if f.valuation < 1 {
                return Err(Error::Schema(format!(
                    "form valuation {} is not positive",
                    f.valuation
                )));
            }
            let coeffs = f
                .coeffs
                .iter()
                .map(|p| p.to_rational())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(Error::Schema)?;
            forms.push(QLaurentSeries::from_pairs(f.valuation, coeffs, raw.prec)?);
        }
        CuspBasis::new(raw.d, raw.prec, forms, raw.provenance)
    }

    pub fn to_json_string(&self) -> String {
        let forms = self
            .forms
            .iter()
            .map(|f| CuspFormJson {
                coeffs: (1..self.prec).map(|n| BigPair::from(&f.coeff(n))).collect(),
                valuation: 1,
            })
            .collect();
        let raw = CuspBasisJson {
            d: self.d as i64,
            weight: 2,
            prec: self.prec,
            forms,
            provenance: self.provenance.clone(),
        };
        serde_json::to_string(&raw).expect("basis serializes")
    }
}

pub fn load_cusp_basis(path: impl AsRef<Path>) -> Result<CuspBasis> {
    let s = std::fs::read_to_string(path)?;
    CuspBasis::from_json_str(&s)
}

pub fn save_cusp_basis(basis: &CuspBasis, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, basis.to_json_string() + "\n")?;
    Ok(())
}

/// `Σ_{n<0} c̃(n) b(−n)` for each form `Σ b(m) qᵐ` of the basis.
pub fn obstruction_pairing(pp: &PrincipalPart, basis: &CuspBasis) -> Result<Vec<Rational>> {
    if pp.d != basis.d {
        return Err(Error::ContextMismatch {
            left: pp.d,
            right: basis.d,
        });
    }
    let needed = pp.max_pole() as i64 + 1;
    if !basis.forms.is_empty() && basis.prec < needed {
        return Err(Error::PrecisionTooSmall {
            needed,
            available: basis.prec,
        });
    }
    Ok(basis
        .forms
        .iter()
        .map(|g| {
            pp.terms()
                .map(|(n, c)| g.coeff(-n) * Rational::from_integer(c.clone()))
                .sum()
        })
        .collect())
}

fn rank(forms: &[QLaurentSeries], from: i64, to: i64) -> usize {
    let mut rows: Vec<Vec<Rational>> = forms
        .iter()
        .map(|f| (from..to).map(|n| f.coeff(n)).collect())
        .collect();
    let cols = (to - from).max(0) as usize;
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = &rows[i][c] / &pivot;
            for k in c..cols {
                let v = &rows[r][k] * &f;
                rows[i][k] -= v;
            }
        }
        r += 1;
    }
    r
}

/// Monomial `E₄^i E₆^j` of the given even weight `w ≠ 2`.
fn e4_e6_exponents(w: u32) -> (u32, u32) {
    debug_assert!(w % 2 == 0 && w != 2);
    let j = if w % 4 == 0 { 0 } else { 1 };
    ((w - 6 * j) / 4, j)
}

/// A candidate `E_k⁺(τ)·R(Dτ)` with `R = E₄^i E₆^j Δ^{−pole}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Candidate {
    k: u32,
    e4: u32,
    e6: u32,
    pole: u32,
}

/// Candidates of weight `weight` whose top pole is at most `D·max_height`:
/// for every even `k ≥ 2`, the smallest `a` with `12a + weight − k ≥ 0` and
/// `≠ 2`, then `j^c` for `c = 0 … max_height − a`.
fn candidates(weight: u32, max_height: u32) -> Vec<Candidate> {
    let mut out = Vec::new();
    let mut k = 2u32;
    loop {
        let mut a = 0u32;
        while 12 * a + weight < k || 12 * a + weight - k == 2 {
            a += 1;
        }
        if a > max_height {
            if a > max_height + 1 {
                break;
            }
            k += 2;
            continue;
        }
        let w = 12 * a + weight - k;
        let (i, j) = e4_e6_exponents(w);
        for c in 0..=(max_height - a) {
            out.push(Candidate {
                k,
                e4: i + 3 * c,
                e6: j,
                pole: a + c,
            });
        }
        k += 2;
    }
    out
}

/// Integer series `Σ coeffs[i] q^{val+i} + O(q^prec)`.
#[derive(Clone, Debug)]
struct IntSeries {
    val: i64,
    coeffs: Vec<BigInt>,
}

impl IntSeries {
    fn prec(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    fn coeff(&self, n: i64) -> BigInt {
        if n < self.val || n >= self.prec() {
            BigInt::zero()
        } else {
            self.coeffs[(n - self.val) as usize].clone()
        }
    }

    /// Clears denominators of a rational series.
    fn from_series(f: &QLaurentSeries, start: i64) -> (IntSeries, BigInt) {
        let mut den = BigInt::from(1);
        for (_, c) in f.terms() {
            den = num_integer::Integer::lcm(&den, c.denom());
        }
        let coeffs = (start..f.prec())
            .map(|n| (f.coeff(n) * Rational::from_integer(den.clone())).to_integer())
            .collect();
        (IntSeries { val: start, coeffs }, den)
    }

    /// Product known below `prec`; `self` dense, `other` arbitrary.
    fn mul(&self, other: &IntSeries, prec: i64) -> IntSeries {
        let val = self.val + other.val;
        let len = (prec - val).max(0) as usize;
        let mut out = vec![BigInt::zero(); len];
        for (j, b) in other.coeffs.iter().enumerate() {
            if b.is_zero() || j >= len {
                continue;
            }
            for (i, a) in self.coeffs.iter().enumerate().take(len - j) {
                if !a.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        IntSeries { val, coeffs: out }
    }
}

/// Integer multiples of the family members, each known below `q^prec`.
fn family_int(d: u64, weight: u32, max_height: u32, prec: i64) -> Result<Vec<IntSeries>> {
    arith::check_discriminant(d as i64)?;
    if weight != 0 && weight != 2 {
        return Err(Error::InvalidArgument(format!(
            "weight must be 0 or 2, got {weight}"
        )));
    }
    let di = d as i64;
    let cands = candidates(weight, max_height);
    let rel = prec.div_euclid(di) + max_height as i64 + 2;
    let e4 = qseries::e4(rel);
    let e6 = qseries::e6(rel);
    let inv_prod = qseries::delta(rel + 1).shift(-1).inverse()?;
    let mut e4_pows = vec![QLaurentSeries::one(rel)];
    let mut e6_pows = vec![QLaurentSeries::one(rel)];
    let mut inv_pows = vec![QLaurentSeries::one(rel)];
    let mut eis_cache: HashMap<u32, IntSeries> = HashMap::new();
    let eis_prec = prec + di * max_height as i64;
    let mut out = Vec::with_capacity(cands.len());
    for c in cands {
        while e4_pows.len() <= c.e4 as usize {
            let next = e4_pows.last().unwrap() * &e4;
            e4_pows.push(next);
        }
        while e6_pows.len() <= c.e6 as usize {
            let next = e6_pows.last().unwrap() * &e6;
            e6_pows.push(next);
        }
        while inv_pows.len() <= c.pole as usize {
            let next = inv_pows.last().unwrap() * &inv_prod;
            inv_pows.push(next);
        }
        let r = (&(&e4_pows[c.e4 as usize] * &e6_pows[c.e6 as usize]) * &inv_pows[c.pole as usize])
            .shift(-(c.pole as i64))
            .substitute_qd(d);
        let (r_int, _) = IntSeries::from_series(&r, r.valuation().min(r.prec()));
        if !eis_cache.contains_key(&c.k) {
            let e = qseries::eisenstein_plus(d, c.k, eis_prec)?;
            eis_cache.insert(c.k, IntSeries::from_series(&e, 0).0);
        }
        let eis = &eis_cache[&c.k];
        out.push(eis.mul(&r_int, prec));
    }
    Ok(out)
}

/// Weakly holomorphic plus-space forms `E_k⁺(τ)·R(Dτ)` of weight 0 or 2 with
/// poles of order at most `D·max_height`, known below `q^prec`, each scaled
/// to integer coefficients.
///
/// Each is `E_k⁺(τ)·(E₄^i E₆^j/Δ^a)(Dτ)·j(Dτ)^c`, a product of a plus-space
/// Eisenstein series with a level-one form in `Dτ`.
pub fn weakly_holomorphic_family(
    d: u64,
    weight: u32,
    max_height: u32,
    prec: i64,
) -> Result<Vec<QLaurentSeries>> {
    Ok(family_int(d, weight, max_height, prec)?
        .into_iter()
        .map(|f| {
            QLaurentSeries::new(
                f.val,
                f.coeffs.into_iter().map(Rational::from_integer).collect(),
                prec,
            )
        })
        .collect())
}

/// Reduced weight-0 input forms for one discriminant: for each pivot
/// exponent `n`, a form `q^n + Σ_{free m} x_m q^m + O(1)`.
#[derive(Clone, Debug)]
pub struct InputFormBasis {
    pub d: u64,
    pub prec: i64,
    /// Largest pole order covered.
    pub max_pole: u64,
    /// Admissible exponents with no reduced form of their own; their number
    /// is `dim S₂⁺`.
    pub free: Vec<i64>,
    forms: BTreeMap<i64, QLaurentSeries>,
}

impl InputFormBasis {
    pub fn pivots(&self) -> impl Iterator<Item = i64> + '_ {
        self.forms.keys().copied()
    }

    pub fn form(&self, n: i64) -> Option<&QLaurentSeries> {
        self.forms.get(&n)
    }
}

fn admissible_exponents(d: u64, max_pole: i64) -> Vec<i64> {
    (1..=max_pole)
        .rev()
        .map(|m| -m)
        .filter(|&n| chi(d, n) != -1)
        .collect()
}

fn content(v: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for x in v {
        if !x.is_zero() {
            g = num_integer::Integer::gcd(&g, x);
            if g.is_one() {
                break;
            }
        }
    }
    g
}

fn make_primitive(v: &mut [BigInt]) {
    let g = content(v);
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x /= &g;
            }
        }
    }
}

/// Gauss–Jordan over the integers on the principal-part columns, most
/// negative exponent first, pivoting on the row with the smallest entry.
/// Rows are kept primitive so that entries track the reduced forms rather
/// than the raw family. Returns the normalized form for each pivot exponent
/// and the free exponents.
fn reduce_rows(
    mut rows: Vec<IntSeries>,
    cols: &[i64],
    prec: i64,
) -> (BTreeMap<i64, QLaurentSeries>, Vec<i64>) {
    let start = cols.first().copied().unwrap_or(0).min(0);
    let len = (prec - start) as usize;
    let mut dense: Vec<Vec<BigInt>> = rows
        .drain(..)
        .map(|r| {
            let mut v: Vec<BigInt> = (0..len).map(|i| r.coeff(start + i as i64)).collect();
            make_primitive(&mut v);
            v
        })
        .collect();
    let nr = dense.len();
    let mut used = vec![false; nr];
    let mut pivots: BTreeMap<i64, usize> = BTreeMap::new();
    let mut free = Vec::new();
    for &n in cols {
        let ci = (n - start) as usize;
        let best = (0..nr)
            .filter(|&i| !used[i] && !dense[i][ci].is_zero())
            .max_by(|&i, &j| dense[j][ci].abs().cmp(&dense[i][ci].abs()).then(j.cmp(&i)));
        let Some(p) = best else {
            free.push(n);
            continue;
        };
        used[p] = true;
        let prow = std::mem::take(&mut dense[p]);
        let piv = prow[ci].clone();
        for (i, row) in dense.iter_mut().enumerate() {
            if i == p || row[ci].is_zero() {
                continue;
            }
            let g = num_integer::Integer::gcd(&piv, &row[ci]);
            let a = &row[ci] / &g;
            let b = &piv / &g;
            for (x, y) in row.iter_mut().zip(&prow) {
                if y.is_zero() {
                    if !x.is_zero() {
                        *x *= &b;
                    }
                } else {
                    *x = &*x * &b - y * &a;
                }
            }
            make_primitive(row);
        }
        dense[p] = prow;
        pivots.insert(n, p);
    }
    let forms = pivots
        .into_iter()
        .map(|(n, p)| {
            let piv = Rational::from_integer(dense[p][(n - start) as usize].clone());
            let coeffs = dense[p]
                .iter()
                .map(|c| Rational::from_integer(c.clone()) / &piv)
                .collect();
            (n, QLaurentSeries::new(start, coeffs, prec))
        })
        .collect();
    (forms, free)
}

/// Reduces the weight-0 family until its principal parts span a subspace
/// of codimension `dim S₂⁺` among the admissible principal parts with poles
/// up to `D·height`.
fn reduce_family(d: u64, min_pole: u64, prec: i64) -> Result<InputFormBasis> {
    let (_, dim_s) = dim_plus_space(d as i64)?;
    let di = d as i64;
    let mut height = ((min_pole.max(1) as i64 + di - 1) / di) as u32;
    loop {
        let max_pole = di * height as i64;
        let cols = admissible_exponents(d, max_pole);
        if (candidates(0, height).len() as u64) + dim_s < cols.len() as u64 {
            height += 1;
            continue;
        }
        let rows = family_int(d, 0, height, prec)?;
        let (forms, free) = reduce_rows(rows, &cols, prec);
        if free.len() as u64 <= dim_s {
            return Ok(InputFormBasis {
                d,
                prec,
                max_pole: max_pole as u64,
                free,
                forms,
            });
        }
        if height >= 40 {
            return Err(Error::Convergence(format!(
                "spanning family for D={d} still misses {} principal parts",
                free.len() as u64 - dim_s
            )));
        }
        height += 1;
    }
}

type BasisKey = (u64, i64);

fn basis_cache() -> &'static Mutex<HashMap<BasisKey, Arc<InputFormBasis>>> {
    static CACHE: OnceLock<Mutex<HashMap<BasisKey, Arc<InputFormBasis>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The reduced input forms for `D` covering poles up to at least `max_pole`,
/// known below `q^prec`. Results are cached per `(D, prec)`.
pub fn input_form_basis(d: i64, max_pole: u64, prec: i64) -> Result<Arc<InputFormBasis>> {
    let du = arith::check_discriminant(d)?;
    if prec < 1 {
        return Err(Error::PrecisionTooSmall {
            needed: 1,
            available: prec,
        });
    }
    let key = (du, prec);
    if let Some(b) = basis_cache().lock().expect("cache lock").get(&key) {
        if b.max_pole >= max_pole {
            return Ok(b.clone());
        }
    }
    let b = Arc::new(reduce_family(du, max_pole, prec)?);
    basis_cache()
        .lock()
        .expect("cache lock")
        .insert(key, b.clone());
    Ok(b)
}

/// The form `f ∈ A₀⁺(D, χ_D)` with principal part `pp`, known below `q^prec`.
///
/// Fails with [`Error::Obstructed`] when no such form exists; when a cusp
/// basis is supplied the error carries the nonzero pairings.
pub fn build_input_form(pp: &PrincipalPart, prec: i64) -> Result<QLaurentSeries> {
    build_input_form_checked(pp, prec, None)
}

pub fn build_input_form_checked(
    pp: &PrincipalPart,
    prec: i64,
    basis: Option<&CuspBasis>,
) -> Result<QLaurentSeries> {
    if let Some(b) = basis {
        let pairings = obstruction_pairing(pp, b)?;
        if pairings.iter().any(|x| !x.is_zero()) {
            return Err(Error::Obstructed(
                pairings.iter().map(arith::fmt_rational).collect(),
            ));
        }
    }
    if prec < 1 {
        return Err(Error::PrecisionTooSmall {
            needed: 1,
            available: prec,
        });
    }
    let reduced = input_form_basis(pp.d as i64, pp.max_pole(), prec)?;
    let mut f = QLaurentSeries::zero(prec);
    for n in reduced.pivots() {
        let c = pp.c(n);
        if !c.is_zero() {
            f = &f + &reduced.form(n).expect("pivot form").scale(&c);
        }
    }
    for &m in &reduced.free {
        if f.coeff(m) != pp.c(m) {
            return Err(Error::Obstructed(vec![format!(
                "principal part is not realizable: coefficient of q^{m} is forced to {}",
                arith::fmt_rational(&f.coeff(m))
            )]));
        }
    }
    debug_assert_eq!(f.coeff(0), constant_term(pp).expect("constant term"));
    Ok(f)
}

/// Principal part of a weight-0 series, in tilde normalization; fails if some
/// `c̃(n)` is not an integer.
pub fn principal_part_of(d: i64, f: &QLaurentSeries) -> Result<PrincipalPart> {
    let du = arith::check_discriminant(d)?;
    let mut terms = Vec::new();
    for (n, c) in f.principal_part() {
        let ct = if n % du as i64 == 0 { c * int(2) } else { c };
        if !arith::is_integer(&ct) {
            return Err(Error::NonIntegerExponent {
                n,
                value: arith::fmt_rational(&ct),
            });
        }
        terms.push((n, ct.to_integer()));
    }
    PrincipalPart::from_big(d, terms)
}

/// `c̃(n)` of a weight-0 series as a Rational.
pub fn c_tilde_of(d: u64, f: &QLaurentSeries, n: i64) -> Rational {
    let c = f.coeff(n);
    if n % d as i64 == 0 {
        c * int(2)
    } else {
        c
    }
}

/// `c̃(n)` as an integer exponent, if it is one.
pub fn integer_c_tilde(d: u64, f: &QLaurentSeries, n: i64) -> Result<i64> {
    let ct = c_tilde_of(d, f, n);
    if !arith::is_integer(&ct) {
        return Err(Error::NonIntegerExponent {
            n,
            value: arith::fmt_rational(&ct),
        });
    }
    ct.to_integer()
        .to_i64()
        .ok_or_else(|| Error::NonIntegerExponent {
            n,
            value: arith::fmt_rational(&ct),
        })
}
