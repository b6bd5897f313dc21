use hz_arith::analytic::analytic_constants;
use hz_arith::arith::{int, to_f64};
use hz_arith::borcherds::{lift_principal_part, weyl_chamber};
use hz_arith::divisor_sums::phi_m_at_1;
use hz_arith::green::*;
use hz_arith::obstruction::PrincipalPart;
use hz_arith::Error;
use num_complex::Complex64;

fn cfg(radius: f64) -> GreenConfig {
    GreenConfig {
        lattice_radius: radius,
        ..GreenConfig::default()
    }
}

#[test]
fn q0_quadrature_matches_closed_form_on_a_grid() {
    for i in 0..40 {
        let t = 1.0 + 0.01 * 1.3f64.powi(i);
        let num = legendre_q_quadrature(1.0, t, 1e-12).unwrap();
        assert!((num - q0(t)).abs() < 1e-10, "t={t}: {num} vs {}", q0(t));
    }
}

#[test]
fn invariance_under_translations_units_and_swap() {
    let z = HPoint::new(0.17, 0.9, -0.31, 1.3);
    let c = cfg(3000.0);
    let base = phi_m(5, 1, &z, 1.5, &c).unwrap();
    let tol = 2.0 * base.tail_estimate + 1e-9;
    let omega = (1.0 + 5f64.sqrt()) / 2.0;
    let omega_c = (1.0 - 5f64.sqrt()) / 2.0;
    let eps2 = omega * omega;
    let moved = [
        HPoint::new(1.17, 0.9, 0.69, 1.3),
        HPoint::new(0.17 + omega, 0.9, -0.31 + omega_c, 1.3),
        HPoint {
            z1: z.z1 * eps2,
            z2: z.z2 / eps2,
        },
        z.swap(),
    ];
    for w in moved {
        let v = phi_m(5, 1, &w, 1.5, &c).unwrap();
        assert!(
            (v.value - base.value).abs() < tol,
            "{w:?}: {} vs {}",
            v.value,
            base.value
        );
    }
}

#[test]
fn eigenfunction_of_the_laplacian_at_s_2() {
    let (x1, y1, x2, y2) = (0.23, 0.8, -0.11, 1.4);
    let s = 2.0;
    let c = cfg(4000.0);
    let f = |a: f64, b: f64| {
        phi_m(5, 1, &HPoint::new(a, b, x2, y2), s, &c)
            .unwrap()
            .value
    };
    let center = f(x1, y1);
    let lap = |h: f64| {
        let sum = f(x1 + h, y1) + f(x1 - h, y1) + f(x1, y1 + h) + f(x1, y1 - h) - 4.0 * center;
        y1 * y1 * sum / (h * h)
    };
    // O(h²) stencil error removed by one Richardson step
    let lap = (4.0 * lap(0.01) - lap(0.02)) / 3.0;
    let expected = s * (s - 1.0) * center;
    assert!(
        ((lap - expected) / expected).abs() < 1e-3,
        "{lap} vs {expected}"
    );
}

fn torus_average(d: i64, m: u64, y1: f64, y2: f64, s: f64, n: usize, c: &GreenConfig) -> f64 {
    let sd = (d as f64).sqrt();
    let (w, wc) = ((1.0 + sd) / 2.0, (1.0 - sd) / 2.0);
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (i as f64 / n as f64, j as f64 / n as f64);
            acc += phi_m(d, m, &HPoint::new(a + b * w, y1, a + b * wc, y2), s, c)
                .unwrap()
                .value;
        }
    }
    acc / (n * n) as f64
}

#[test]
fn torus_average_matches_constant_term() {
    for (d, m, y1, y2) in [(5i64, 1u64, 1.0, 1.2), (5, 4, 1.0, 1.2), (13, 1, 1.0, 1.3)] {
        let chamber = weyl_chamber(d, &[m], (y1, y2)).unwrap();
        let u0 = constant_term_u0(d, m, y1, y2, 1.5, &chamber).unwrap();
        let avg = torus_average(d, m, y1, y2, 1.5, 12, &cfg(2000.0));
        assert!(((avg - u0) / u0).abs() < 1e-2, "D={d} m={m}: {avg} vs {u0}");
    }
}

#[test]
fn constant_term_has_residue_phi_at_one() {
    let chamber = weyl_chamber(5, &[1], (1.0, 1.2)).unwrap();
    let h = 1e-7;
    let u0 = constant_term_u0(5, 1, 1.0, 1.2, 1.0 + h, &chamber).unwrap();
    let phi = to_f64(&phi_m_at_1(5, 1).unwrap());
    assert!((h * u0 - phi).abs() < 1e-5);
    assert!(constant_term_u0(5, 1, 1.0, 1.2, 1.0, &chamber).is_err());
}

#[test]
fn constant_term_vanishes_for_inert_m() {
    let chamber = weyl_chamber(5, &[2], (1.0, 1.2)).unwrap();
    assert!(chamber.r_set(2).is_empty());
    assert_eq!(
        constant_term_u0(5, 2, 1.0, 1.2, 1.5, &chamber).unwrap(),
        0.0
    );
}

#[test]
fn constant_term_rejects_points_outside_the_chamber() {
    let chamber = weyl_chamber(5, &[1], (1.0, 1.2)).unwrap();
    assert!(matches!(
        constant_term_u0(5, 1, 1.2, 1.0, 1.5, &chamber),
        Err(Error::SampleOnWall { .. })
    ));
}

/// `−log‖F‖_Pet = G₁` for the lift of `q⁻¹ + O(1)` at `D = 5`.
#[test]
fn borcherds_norm_identity() {
    let chamber = weyl_chamber(5, &[1], (1.0, 1.2)).unwrap();
    let pp = PrincipalPart::new(5, [(-1i64, 1i64)]).unwrap();
    let f = lift_principal_part(&pp, &chamber, &int(12)).unwrap();
    let w = f.grading();
    let (y1, y2) = (w.to_f64(), w.conj_f64());
    let consts = analytic_constants(5, 1e-12).unwrap();
    let c = GreenConfig::default();
    for (x1, x2) in [(0.13, 0.41), (0.37, -0.2)] {
        let lhs = f
            .neg_log_petersson(Complex64::new(x1, y1), Complex64::new(x2, y2))
            .unwrap();
        let g = g_m_value(5, 1, &HPoint::new(x1, y1, x2, y2), &c, &consts).unwrap();
        assert!(
            (lhs - g.value).abs() < 1e-2,
            "({x1}, {x2}): {lhs} vs {}",
            g.value
        );
    }
}

#[test]
fn richardson_in_s_agrees_with_direct_regularization() {
    let consts = analytic_constants(5, 1e-12).unwrap();
    let z = HPoint::new(0.13, 0.6, 0.41, 1.4);
    let c = cfg(10_000.0);
    let direct = g_m_value(5, 1, &z, &c, &consts).unwrap().value;
    let rich = g_m_richardson(5, 1, &z, &c, &consts).unwrap();
    assert!((direct - rich).abs() < 1e-2, "{direct} vs {rich}");
}

#[test]
fn logarithmic_singularity_along_the_diagonal() {
    // T(1) contains the diagonal for D = 5, cut out by z₁ − z₂
    let consts = analytic_constants(5, 1e-12).unwrap();
    let c = cfg(4000.0);
    let at = |delta: f64| {
        let z = HPoint::new(0.2, 1.1, 0.2 + delta, 1.1 + delta);
        let g = g_m_value(5, 1, &z, &c, &consts).unwrap().value;
        g + 0.5 * (2.0 * delta * delta).ln()
    };
    let (a, b, e) = (at(1e-2), at(1e-3), at(1e-4));
    assert!((b - e).abs() < 1e-3, "{a} {b} {e}");
    assert!((a - b).abs() < 0.1);
    assert!(matches!(
        g_m_value(5, 1, &HPoint::new(0.2, 1.1, 0.2, 1.1), &c, &consts),
        Err(Error::OnDivisor { m: 1 })
    ));
}

#[test]
fn growth_towards_the_cusp() {
    // G₁ + (φ₁(1)/2)·log(16π²y₁y₂) − 2π·tr(ρy) = −log|1 + O(e^{−cy})| along a ray in the chamber
    let consts = analytic_constants(5, 1e-12).unwrap();
    let chamber = weyl_chamber(5, &[1], (1.0, 1.2)).unwrap();
    let pp = PrincipalPart::new(5, [(-1i64, 1i64)]).unwrap();
    let rho = hz_arith::borcherds::weyl_vector(&pp, &chamber).unwrap();
    let phi = to_f64(&phi_m_at_1(5, 1).unwrap());
    let c = cfg(10_000.0);
    let pi = std::f64::consts::PI;
    let mut last = f64::INFINITY;
    for y in [1.0, 2.0, 3.0, 4.0] {
        let (y1, y2) = (y, 1.2 * y);
        let g = g_m_value(5, 1, &HPoint::new(0.1, y1, 0.3, y2), &c, &consts)
            .unwrap()
            .value;
        let rest = g + 0.5 * phi * (16.0 * pi * pi * y1 * y2).ln()
            - 2.0 * pi * (rho.to_f64() * y1 + rho.conj_f64() * y2);
        assert!(rest.abs() < 0.8 * last, "y={y}: {rest}");
        last = rest.abs();
    }
    assert!(last < 0.15);
}

#[test]
fn inputs_are_validated() {
    let z = HPoint::new(0.1, 0.8, 0.2, 1.1);
    assert!(phi_m(5, 1, &z, 1.0, &cfg(1000.0)).is_err());
    assert!(phi_m(6, 1, &z, 1.5, &cfg(1000.0)).is_err());
    assert!(phi_m(5, 1, &HPoint::new(0.1, -0.8, 0.2, 1.1), 1.5, &cfg(1000.0)).is_err());
    assert!(phi_m(5, 1, &z, 1.5, &cfg(10.0)).is_err());
    let consts = analytic_constants(5, 1e-12).unwrap();
    assert!(matches!(
        g_m_value(5, 3, &z, &cfg(1000.0), &consts),
        Err(Error::EmptyDivisor { m: 3 })
    ));
}
