//! Helpers shared by integration tests.
#![allow(dead_code)]

use hz_arith::arith::{int, Rational};
use hz_arith::obstruction::weakly_holomorphic_family;
use hz_arith::qseries::{eisenstein_plus, QLaurentSeries};
use num_traits::Zero;

pub const D29_FIXTURE: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/tests/data/cusp_basis_d29.json"
);

/// Rows of the weight-2 family combined so that their principal parts
/// vanish, with the Eisenstein part removed: cusp forms of weight 2.
pub fn weight_two_cusp_forms(d: u64, height: u32, prec: i64) -> Vec<QLaurentSeries> {
    let mut rows = weakly_holomorphic_family(d, 2, height, prec).unwrap();
    let cols: Vec<i64> = (1..=(d as i64 * height as i64)).rev().map(|m| -m).collect();
    let mut used = vec![false; rows.len()];
    for &n in &cols {
        let Some(p) = (0..rows.len()).find(|&i| !used[i] && !rows[i].coeff(n).is_zero()) else {
            continue;
        };
        used[p] = true;
        let inv = rows[p].coeff(n).recip();
        rows[p] = rows[p].scale(&inv);
        for i in 0..rows.len() {
            if i != p && !used[i] && !rows[i].coeff(n).is_zero() {
                let f = rows[i].coeff(n);
                rows[i] = &rows[i] - &rows[p].scale(&f);
            }
        }
    }
    let eis = eisenstein_plus(d, 2, prec).unwrap();
    let mut cusp: Vec<QLaurentSeries> = Vec::new();
    for (i, r) in rows.into_iter().enumerate() {
        if used[i] || r.is_zero() {
            continue;
        }
        assert!(r.valuation() >= 0);
        let g = &r - &eis.scale(&r.coeff(0));
        if g.is_zero() {
            continue;
        }
        // reduce against the forms found so far
        let mut g = g;
        for h in &cusp {
            let v = h.valuation();
            let c = g.coeff(v);
            if !c.is_zero() {
                g = &g - &h.scale(&c);
            }
        }
        if !g.is_zero() {
            let lead = g.coeff(g.valuation());
            cusp.push(g.scale(&(int(1) / lead)));
        }
    }
    cusp
}

pub fn rational_sum<'a>(it: impl Iterator<Item = &'a Rational>) -> Rational {
    it.fold(Rational::zero(), |a, b| a + b)
}
