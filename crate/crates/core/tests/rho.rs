mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use proptest::prelude::*;
use squeezed_compton::rho::{
    rho, rho_asymptotic, rho_bessel, rho_quadrature, rho_small_zeta, RhoMethod, MAX_ZETA0,
};

const GT: f64 = 0.0693;

fn q(z: f64, g: f64, t: f64) -> f64 {
    rho_quadrature(z, g, t).unwrap().value
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

#[test]
fn quadrature_matches_direct_oracle() {
    for &(z, g) in &[(1e-3, 0.05), (0.5, 0.3), (3.45, GT), (8.0, 1e-3), (10.0, 1e-3), (40.0, 0.01)] {
        for t in [0.0, FRAC_PI_4, FRAC_PI_2, PI] {
            let got = q(z, g, t);
            let want = common::rho(z, g, t);
            assert!((got - want).abs() <= 1e-8 * want.max(1.0), "({z}, {g}, {t}): {got} vs {want}");
        }
    }
}

#[test]
fn zero_squeezing_is_exactly_one() {
    for m in RhoMethod::ALL {
        for t in [0.0, 1.0, PI] {
            assert_eq!(m.eval(0.0, GT, t).unwrap().value, 1.0, "{m}");
        }
    }
}

#[test]
fn small_zeta_examples() {
    let z = 1e-3;
    let lin = 1.0 - (PI / 2.0).sqrt() * z * GT;
    let d = (q(z, GT, 0.0) - lin).abs();
    assert!(d < 2.0 * (z * z + z * GT * GT), "{d}");
    assert!((rho_small_zeta(z, GT, 0.0).unwrap().value - q(z, GT, 0.0)).abs() < 1e-4);
    assert!(rel(rho_small_zeta(z, 0.05, 0.0).unwrap().value, q(z, 0.05, 0.0)) < 1e-4);
    assert_eq!(rho_small_zeta(0.7, 0.2, FRAC_PI_2).unwrap().value, 1.0 + 0.0 * FRAC_PI_2.cos());
    let lo = rho_small_zeta(z, GT, 0.0).unwrap().value;
    let hi = rho_small_zeta(z, GT, PI).unwrap().value;
    assert!(((1.0 - lo) - (hi - 1.0)).abs() < 1e-15);
}

#[test]
fn bessel_examples() {
    for t in [0.0, FRAC_PI_4, FRAC_PI_2, PI] {
        let b = rho_bessel(3.45, GT, t).unwrap().value;
        assert!(rel(b, q(3.45, GT, t)) < 0.02, "{t}: {b}");
    }
    assert!(rel(rho_bessel(8.0, 1e-3, FRAC_PI_2).unwrap().value, q(8.0, 1e-3, FRAC_PI_2)) < 0.01);
    assert!(rho_bessel(MAX_ZETA0 + 1.0, 1e-3, 0.0).is_err());
    assert!(rho_bessel(MAX_ZETA0, 1e-3, PI).unwrap().value.is_finite());
}

#[test]
fn asymptotic_examples() {
    let z = 10.0;
    let g = 1e-3;
    let a = rho_asymptotic(z, g, 0.0).unwrap().value;
    assert!((a - (1.0 - g * (2.0 * z).sqrt())).abs() < 1e-15);
    assert!(rel(a, rho_bessel(z, g, 0.0).unwrap().value) < 0.01);
    let b6 = rho_bessel(6.0, g, PI).unwrap().value;
    assert!(rel(rho_asymptotic(6.0, g, PI).unwrap().value, b6) < 0.05);
    for t in [0.0, FRAC_PI_4] {
        let b = rho_bessel(3.45, GT, t).unwrap().value;
        assert!(rel(rho_asymptotic(3.45, GT, t).unwrap().value, b) < 0.10, "{t}");
    }
}

#[test]
fn reference_values_at_defaults() {
    let r0 = q(3.45, GT, 0.0);
    let r4 = q(3.45, GT, FRAC_PI_4);
    assert!((r0 - 0.848_853_79).abs() < 1e-7, "{r0}");
    assert!((r4 - 1.033_203_2).abs() < 1e-6, "{r4}");
}

#[test]
fn results_carry_method_and_regime() {
    let r = rho_bessel(1.0, 0.01, 0.0).unwrap();
    assert_eq!(r.method, RhoMethod::Bessel);
    assert!(!r.validity.is_empty());
    assert_eq!(rho(1e-6, 0.1, 0.0).unwrap().method, RhoMethod::SmallZeta);
    assert_eq!(rho(3.45, GT, 0.0).unwrap().method, RhoMethod::Quadrature);
    assert!(rho(-1.0, GT, 0.0).is_err());
    assert!(rho(1.0, 0.0, 0.0).is_err());
    assert!(rho(1.0, GT, f64::NAN).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nondecreasing_in_theta0(z in 0.0f64..20.0, g in 1e-3f64..1.0, a in 0.0f64..PI, b in 0.0f64..PI) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(q(z, g, lo) <= q(z, g, hi) + 1e-12);
    }

    #[test]
    fn enhancement_exceeds_suppression(z in 2.0f64..30.0, g in 1e-3f64..1.0) {
        prop_assert!(q(z, g, PI) - 1.0 >= 1.0 - q(z, g, 0.0));
    }

    #[test]
    fn quadrature_is_nonnegative(z in 0.0f64..MAX_ZETA0, g in 1e-3f64..10.0, t in 0.0f64..PI) {
        prop_assert!(q(z, g, t) >= 0.0);
    }
}
