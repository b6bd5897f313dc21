use hz_arith::arith::{int, rat, Rational};
use hz_arith::borcherds::{lift_principal_part, weyl_chamber, weyl_vector};
use hz_arith::characters::{chi, l_exact, zeta_exact, zeta_k_minus1};
use hz_arith::loglinear::LogLinear;
use hz_arith::obstruction::{build_input_form, constant_term, PrincipalPart};
use hz_arith::qseries::QLaurentSeries;
use hz_arith::quadfield::{fundamental_unit, QuadElem};
use num_traits::{One, Signed};
use proptest::prelude::*;

const DISCS: [u64; 5] = [5, 13, 17, 29, 41];

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

fn elem(d: u64) -> impl Strategy<Value = QuadElem> {
    (small_rational(), small_rational()).prop_map(move |(a, b)| QuadElem::new(d, a, b))
}

fn disc_and_elems() -> impl Strategy<Value = (QuadElem, QuadElem, QuadElem)> {
    prop::sample::select(&DISCS[..]).prop_flat_map(|d| (elem(d), elem(d), elem(d)))
}

fn admissible_terms(d: i64) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((1i64..=8, -4i64..=4), 1..4).prop_map(move |v| {
        let mut seen = std::collections::BTreeMap::new();
        for (n, c) in v {
            if chi(d as u64, n) != -1 && c != 0 {
                seen.insert(-n, c);
            }
        }
        seen.into_iter().collect()
    })
}

proptest! {
    #[test]
    fn field_arithmetic((x, y, z) in disc_and_elems()) {
        let xy = x.checked_mul(&y).unwrap();
        prop_assert_eq!(&xy, &y.checked_mul(&x).unwrap());
        prop_assert_eq!(xy.norm(), x.norm() * y.norm());
        prop_assert_eq!(xy.conj(), x.conj().checked_mul(&y.conj()).unwrap());
        let lhs = x.checked_mul(&y.checked_add(&z).unwrap()).unwrap();
        let rhs = xy.checked_add(&x.checked_mul(&z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(x.checked_add(&x.conj()).unwrap(), QuadElem::from_rational(x.d(), x.trace()));
        if let Some(inv) = x.inverse() {
            prop_assert_eq!(x.checked_mul(&inv).unwrap(), QuadElem::from_rational(x.d(), int(1)));
        }
        let approx = x.to_f64() * y.to_f64();
        prop_assert!((xy.to_f64() - approx).abs() <= 1e-9 * (1.0 + approx.abs()));
    }

    #[test]
    fn character_is_multiplicative_and_periodic(
        d in prop::sample::select(&DISCS[..]),
        a in -500i64..500,
        b in -500i64..500,
    ) {
        prop_assert_eq!(chi(d, a * b), chi(d, a) * chi(d, b));
        prop_assert_eq!(chi(d, a + d as i64), chi(d, a));
        prop_assert_eq!(chi(d, -1), 1);
    }

    #[test]
    fn log_linear_is_a_vector_space(
        c1 in small_rational(),
        c2 in small_rational(),
        r in small_rational(),
        p in prop::sample::select(vec![2u64, 3, 5, 7, 11]),
    ) {
        let u = &LogLinear::constant(c1) + &LogLinear::log_of(p, c2.clone());
        let v = LogLinear::log_of(12, r.clone());
        let sum = &u + &v;
        prop_assert!(((&sum).to_f64() - u.to_f64() - v.to_f64()).abs() < 1e-9);
        prop_assert_eq!(sum.scale(&r), &u.scale(&r) + &v.scale(&r));
        prop_assert!((&u - &u).is_zero());
        // log 12 = 2 log 2 + log 3
        prop_assert_eq!(v.coeff(2), &r * int(2));
    }

    #[test]
    fn principal_parts_round_trip_through_text(terms in admissible_terms(13)) {
        prop_assume!(!terms.is_empty());
        let pp = PrincipalPart::new(13, terms).unwrap();
        prop_assert_eq!(PrincipalPart::parse(13, &pp.to_string()).unwrap(), pp);
    }

    #[test]
    fn input_forms_are_linear(a in admissible_terms(5), b in admissible_terms(5)) {
        prop_assume!(!a.is_empty() && !b.is_empty());
        let pa = PrincipalPart::new(5, a).unwrap();
        let pb = PrincipalPart::new(5, b).unwrap();
        let Ok(sum) = pa.checked_add(&pb) else { return Ok(()); };
        prop_assume!(!sum.is_empty());
        let prec = 30;
        let fa = build_input_form(&pa, prec).unwrap();
        let fb = build_input_form(&pb, prec).unwrap();
        prop_assert_eq!(build_input_form(&sum, prec).unwrap(), &fa + &fb);
        prop_assert_eq!(
            constant_term(&sum).unwrap(),
            constant_term(&pa).unwrap() + constant_term(&pb).unwrap()
        );
    }

    #[test]
    fn lift_weight_is_the_constant_term(terms in admissible_terms(5)) {
        prop_assume!(!terms.is_empty());
        let pp = PrincipalPart::new(5, terms).unwrap();
        let chamber = weyl_chamber(5, &pp.support(), (1.0, 1.23)).unwrap();
        let rho = weyl_vector(&pp, &chamber).unwrap();
        let w = chamber.grading_element();
        let bound = w.checked_mul(&rho).unwrap().trace() + int(2);
        let f = lift_principal_part(&pp, &chamber, &bound).unwrap();
        prop_assert_eq!(f.weight(), &constant_term(&pp).unwrap());
        prop_assert_eq!(f.weyl_vector(), &rho);
    }

    #[test]
    fn series_json_round_trip(
        val in -5i64..5,
        coeffs in prop::collection::vec(small_rational(), 0..12),
    ) {
        let prec = val + coeffs.len() as i64;
        let f = QLaurentSeries::new(val, coeffs, prec);
        let text = f.to_json_value().to_string();
        prop_assert_eq!(QLaurentSeries::from_json_str(&text).unwrap(), f);
    }
}

#[test]
fn fundamental_units_have_norm_minus_one() {
    // every prime D ≡ 1 (mod 4) has a unit of norm −1
    for d in DISCS {
        let e = fundamental_unit(d as i64).unwrap();
        assert_eq!(e.norm(), int(-1), "D={d}");
        assert!(e.to_f64() > 1.0);
        assert!(e.a().denom().is_one() || *e.a().denom() == 2.into());
        assert!(e.b().abs() > Rational::from_integer(0.into()));
    }
}

#[test]
fn dedekind_zeta_factors() {
    for d in DISCS {
        let zk = zeta_k_minus1(d as i64).unwrap();
        assert_eq!(zk, zeta_exact(-1).unwrap() * l_exact(d as i64, -1).unwrap());
    }
}
