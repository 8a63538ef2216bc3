//! Peak-field enhancement factor ρ(ζ₀, Γτ, θ₀) and its closed-form
//! approximations.
//!
//! All functions take the squeezing amplitude ζ₀, the dimensionless width
//! Γτ of the Lorentzian squeezing profile and the squeezing angle θ₀.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use crate::error::{Error, Result};
use crate::specfun::quad::integrate;
use crate::specfun::{bessel_i_scaled, BesselIOrder};

/// Largest ζ₀ accepted; e^{ζ₀} is formed explicitly by the closed forms.
pub const MAX_ZETA0: f64 = 600.0;

/// Absolute accuracy targeted by [`rho_quadrature`].
pub const QUADRATURE_ABS_TOL: f64 = 1e-10;
/// Relative accuracy used instead once ρ is large.
pub const QUADRATURE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RhoMethod {
    Quadrature,
    SmallZeta,
    Bessel,
    Asymptotic,
}

impl RhoMethod {
    pub const ALL: [RhoMethod; 4] = [
        RhoMethod::Quadrature,
        RhoMethod::SmallZeta,
        RhoMethod::Bessel,
        RhoMethod::Asymptotic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RhoMethod::Quadrature => "quadrature",
            RhoMethod::SmallZeta => "small_zeta",
            RhoMethod::Bessel => "bessel",
            RhoMethod::Asymptotic => "asymptotic",
        }
    }

    /// Regime in which the method is derived.
    pub fn validity(self) -> &'static str {
        match self {
            RhoMethod::Quadrature => "exact",
            RhoMethod::SmallZeta => "zeta0 << 1",
            RhoMethod::Bessel => "gamma_tau << 1 and gamma_tau*sqrt(zeta0) << 1",
            RhoMethod::Asymptotic => "zeta0 >> 1 and gamma_tau*sqrt(zeta0) << 1",
        }
    }

    /// Evaluate ρ with this method.
    pub fn eval(self, zeta0: f64, gamma_tau: f64, theta0: f64) -> Result<RhoResult> {
        match self {
            RhoMethod::Quadrature => rho_quadrature(zeta0, gamma_tau, theta0),
            RhoMethod::SmallZeta => rho_small_zeta(zeta0, gamma_tau, theta0),
            RhoMethod::Bessel => rho_bessel(zeta0, gamma_tau, theta0),
            RhoMethod::Asymptotic => rho_asymptotic(zeta0, gamma_tau, theta0),
        }
    }
}

impl fmt::Display for RhoMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoResult {
    pub value: f64,
    pub method: RhoMethod,
    pub validity: &'static str,
}

impl RhoResult {
    fn new(value: f64, method: RhoMethod) -> Self {
        RhoResult {
            value,
            method,
            validity: method.validity(),
        }
    }
}

fn check(zeta0: f64, gamma_tau: f64, theta0: f64) -> Result<()> {
    if !(zeta0 >= 0.0) || zeta0 > MAX_ZETA0 {
        return Err(Error::invalid(
            "zeta0",
            format!("must lie in [0, {MAX_ZETA0}], got {zeta0}"),
        ));
    }
    if !(gamma_tau > 0.0) || !gamma_tau.is_finite() {
        return Err(Error::invalid(
            "gamma_tau",
            format!("must be finite and > 0, got {gamma_tau}"),
        ));
    }
    if !theta0.is_finite() {
        return Err(Error::invalid("theta0", format!("must be finite, got {theta0}")));
    }
    Ok(())
}

fn weights(theta0: f64) -> (f64, f64) {
    let s = (0.5 * theta0).sin();
    let c = (0.5 * theta0).cos();
    (s * s, c * c)
}

/// ρ by adaptive quadrature over s = (ω − ω₀)/Γ.
///
/// The unit Gaussian normalization is subtracted analytically, so only
/// the e^{±ζ₀/(1+s²)} − 1 parts are integrated and ζ₀ = 0 gives exactly 1.
pub fn rho_quadrature(zeta0: f64, gamma_tau: f64, theta0: f64) -> Result<RhoResult> {
    check(zeta0, gamma_tau, theta0)?;
    if zeta0 == 0.0 {
        return Ok(RhoResult::new(1.0, RhoMethod::Quadrature));
    }
    let (ws, wc) = weights(theta0);
    let g2 = gamma_tau * gamma_tau;
    let integrand = |s: f64| {
        let z = zeta0 / (1.0 + s * s);
        (ws * z.exp_m1() + wc * (-z).exp_m1()) * (-0.5 * g2 * s * s).exp()
    };

    let s_max = 10f64.max(8.0 / gamma_tau).max(5.0 * zeta0.sqrt());
    let mut breaks = Vec::new();
    let mut b = 1.0;
    while b < s_max {
        breaks.push(b);
        breaks.push(3.0 * b);
        b *= 10.0;
    }
    breaks.push(1.0 / gamma_tau);
    breaks.push(3.0 / gamma_tau);

    let pref = 2.0 * gamma_tau / (2.0 * PI).sqrt();
    let tol = 0.1 * QUADRATURE_ABS_TOL / pref;
    let body = integrate(integrand, 0.0, s_max, &breaks, tol, 0.1 * QUADRATURE_REL_TOL)?;

    // |integrand| ≤ (e^{ζ₀/(1+S²)} − 1 + 1)·e^{−Γ²τ²s²/2} beyond S
    let amp = (zeta0 / (1.0 + s_max * s_max)).exp();
    let tail = amp * (-0.5 * g2 * s_max * s_max).exp() / (g2 * s_max);
    let value = 1.0 + pref * body.value;
    let allowed = QUADRATURE_ABS_TOL.max(QUADRATURE_REL_TOL * value.abs());
    if pref * (body.error + tail) > allowed {
        return Err(Error::NoConvergence {
            what: "rho_quadrature",
            detail: format!("error bound {:.3e} above {allowed:.3e}", pref * (body.error + tail)),
        });
    }
    Ok(RhoResult::new(value, RhoMethod::Quadrature))
}

/// First order in ζ₀: 1 − cos θ₀·√(π/2)·ζ₀Γτ.
pub fn rho_small_zeta(zeta0: f64, gamma_tau: f64, theta0: f64) -> Result<RhoResult> {
    check(zeta0, gamma_tau, theta0)?;
    let c = if zeta0 == 0.0 { 0.0 } else { theta0.cos() };
    Ok(RhoResult::new(
        1.0 - c * FRAC_PI_2.sqrt() * zeta0 * gamma_tau,
        RhoMethod::SmallZeta,
    ))
}

/// Lorentzian integrated against a flat Gaussian, giving modified Bessel
/// functions of argument ζ₀/2.
pub fn rho_bessel(zeta0: f64, gamma_tau: f64, theta0: f64) -> Result<RhoResult> {
    check(zeta0, gamma_tau, theta0)?;
    if zeta0 == 0.0 {
        return Ok(RhoResult::new(1.0, RhoMethod::Bessel));
    }
    let (ws, wc) = weights(theta0);
    let x = 0.5 * zeta0;
    let i0 = bessel_i_scaled(BesselIOrder::Zero, x)?;
    let i1 = bessel_i_scaled(BesselIOrder::One, x)?;
    // e^{x}(I₀ − I₁) = e^{2x}·[e^{−x}(I₀ − I₁)], e^{−x}(I₀ + I₁) directly
    let up = if ws == 0.0 { 0.0 } else { ws * zeta0.exp() * (i0 - i1) };
    let down = wc * (i0 + i1);
    Ok(RhoResult::new(
        1.0 + FRAC_PI_2.sqrt() * zeta0 * gamma_tau * (up - down),
        RhoMethod::Bessel,
    ))
}

/// Leading large-ζ₀ behaviour of [`rho_bessel`].
pub fn rho_asymptotic(zeta0: f64, gamma_tau: f64, theta0: f64) -> Result<RhoResult> {
    check(zeta0, gamma_tau, theta0)?;
    if zeta0 == 0.0 {
        return Ok(RhoResult::new(1.0, RhoMethod::Asymptotic));
    }
    let (ws, wc) = weights(theta0);
    let r = (2.0 * zeta0).sqrt();
    let up = if ws == 0.0 { 0.0 } else { ws * zeta0.exp() / r };
    Ok(RhoResult::new(
        1.0 + gamma_tau * (up - wc * r),
        RhoMethod::Asymptotic,
    ))
}

/// Picks a method for the given parameters: a closed form when its
/// expansion parameter is below 1e-4, quadrature otherwise. The chosen
/// method is reported in the result.
pub fn rho(zeta0: f64, gamma_tau: f64, theta0: f64) -> Result<RhoResult> {
    check(zeta0, gamma_tau, theta0)?;
    let method = if zeta0 <= 1e-4 {
        RhoMethod::SmallZeta
    } else if gamma_tau * zeta0.sqrt().max(1.0) <= 1e-4 {
        RhoMethod::Bessel
    } else {
        RhoMethod::Quadrature
    };
    method.eval(zeta0, gamma_tau, theta0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_squeezing_is_one_everywhere() {
        for m in RhoMethod::ALL {
            for th in [0.0, 1.0, PI] {
                assert_eq!(m.eval(0.0, 0.07, th).unwrap().value, 1.0, "{m}");
            }
        }
    }

    #[test]
    fn quadrature_reference_values() {
        let cases = [
            (10.0, 1e-3, 0.0, 0.995_654_55),
            (10.0, 1e-3, PI, 6.402_098_3),
            (3.45, 0.0693, 0.0, 0.848_853_79),
            (3.45, 0.0693, PI / 4.0, 1.033_203_2),
        ];
        for (z, g, th, want) in cases {
            let got = rho_quadrature(z, g, th).unwrap().value;
            assert!((got - want).abs() < 1e-7, "{z} {g} {th}: {got}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(rho_quadrature(-1.0, 0.1, 0.0).is_err());
        assert!(rho_bessel(1.0, 0.0, 0.0).is_err());
        assert!(rho_asymptotic(700.0, 0.1, 0.0).is_err());
        assert!(rho_small_zeta(1.0, 0.1, f64::NAN).is_err());
    }

    #[test]
    fn dispatcher_reports_method() {
        assert_eq!(rho(1e-5, 0.1, 0.0).unwrap().method, RhoMethod::SmallZeta);
        assert_eq!(rho(5.0, 1e-5, 0.0).unwrap().method, RhoMethod::Bessel);
        assert_eq!(rho(3.45, 0.07, 0.0).unwrap().method, RhoMethod::Quadrature);
    }
}
