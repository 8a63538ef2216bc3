use squeezed_compton::units::{
    chi0, eta_parameter, fs_to_inverse_ev, intensity_from_xi0, inverse_ev_to_fs, tau_from_fwhm,
    xi0_from_intensity, BeamParams, PulseParams, SqueezeParams, ELECTRON_MASS_MEV,
};
use squeezed_compton::ErrorKind;

use proptest::prelude::*;

#[test]
fn duration_conversion() {
    assert_eq!(fs_to_inverse_ev(0.0).unwrap(), 0.0);
    assert!((fs_to_inverse_ev(0.6582).unwrap() - 1.0).abs() < 1e-4);
    assert!((fs_to_inverse_ev(658.2).unwrap() / 1000.0 - 1.0).abs() < 1e-4);
    let tau = tau_from_fwhm(fs_to_inverse_ev(40.0).unwrap());
    assert!((tau - 36.5).abs() < 0.05, "{tau}");
    assert!((inverse_ev_to_fs(tau) - 24.0).abs() < 0.05);
    assert!(fs_to_inverse_ev(-0.1).is_err());
}

#[test]
fn eta_examples() {
    let eta0 = eta_parameter(1e4, 1.55).unwrap();
    assert!((eta0 - 0.0594).abs() < 5e-4, "{eta0}");
    assert!(eta_parameter(1e-9, 1.55).unwrap() < 1e-12);
    let m2 = ELECTRON_MASS_MEV * ELECTRON_MASS_MEV;
    assert!((eta_parameter(m2 / 1.55e-6, 1.55).unwrap() - 1.0).abs() < 1e-12);
    assert!(eta_parameter(1e4, 0.0).is_err());
}

#[test]
fn chi0_at_defaults() {
    let pulse = PulseParams::from_fwhm_fs(1.55, 40.0, 5.0).unwrap();
    let chi = chi0(&pulse, 5.0).unwrap();
    assert!((chi - 0.30).abs() < 0.01, "{chi}");
    assert!((pulse.omega0_tau() - 56.6).abs() < 0.1);
}

#[test]
fn intensity_round_trip() {
    let xi = xi0_from_intensity(1e20, 1.55);
    assert!((intensity_from_xi0(xi, 1.55) / 1e20 - 1.0).abs() < 1e-12);
    let i5 = intensity_from_xi0(5.0, 1.55);
    assert!(i5 > 1e20 && i5 < 1.1e20, "{i5}");
}

#[test]
fn constructors_reject_invalid_input() {
    for r in [
        PulseParams::new(-1.0, 36.5, 5.0).map(|_| ()),
        PulseParams::new(1.55, f64::NAN, 5.0).map(|_| ()),
        PulseParams::from_fwhm_fs(1.55, 0.0, 5.0).map(|_| ()),
        SqueezeParams::new(f64::INFINITY, 1e-3, 0.0).map(|_| ()),
        SqueezeParams::new(1.0, -1e-3, 0.0).map(|_| ()),
        SqueezeParams::new(1.0, 1e-3, f64::NAN).map(|_| ()),
        BeamParams::new(0.0, 0.0, 1).map(|_| ()),
        BeamParams::new(5.0, -0.1, 1).map(|_| ()),
        BeamParams::new(5.0, 0.5, 0).map(|_| ()),
    ] {
        let e = r.unwrap_err();
        assert_eq!(e.kind(), ErrorKind::Config, "{e}");
    }
}

#[test]
fn squeeze_profile() {
    let s = SqueezeParams::new(3.45, 1.9e-3, 0.0).unwrap();
    assert_eq!(s.zeta_at(1.55, 1.55), 3.45);
    assert!((s.zeta_at(1.55 + 1.9e-3, 1.55) - 1.725).abs() < 1e-12);
    assert!(!SqueezeParams::none().is_squeezed());
}

proptest! {
    #[test]
    fn fs_round_trip(t in 1e-6f64..1e6) {
        let back = inverse_ev_to_fs(fs_to_inverse_ev(t).unwrap());
        prop_assert!((back - t).abs() <= 1e-12 * t);
    }

    #[test]
    fn eta_linear_in_p_minus(p in 1e-3f64..1e5, k in 0.1f64..10.0) {
        let a = eta_parameter(p, 1.55).unwrap();
        let b = eta_parameter(k * p, 1.55).unwrap();
        prop_assert!((b / a / k - 1.0).abs() < 1e-12);
    }

    #[test]
    fn theta0_is_wrapped(t in -50.0f64..50.0) {
        let s = SqueezeParams::new(1.0, 1e-3, t).unwrap();
        prop_assert!(s.theta0() >= 0.0 && s.theta0() < 2.0 * std::f64::consts::PI);
        prop_assert!((s.theta0().cos() - t.cos()).abs() < 1e-9);
    }
}
