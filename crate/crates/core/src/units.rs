//! Physical constants, unit conversions and validated parameter bundles.
//!
//! Conventions used throughout the crate:
//!
//! * energies in eV (laser) or MeV (electrons, photons);
//! * times in eV⁻¹ (ħ = 1), converted from fs at the boundary;
//! * the laser phase is the dimensionless ϕ = ω₀(t − z), so one carrier
//!   period spans 2π;
//! * the head-on light-cone momentum of an electron is p₋ = ε − p_z ≈ 2ε.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Fine-structure constant.
pub const ALPHA: f64 = 1.0 / 137.035_999_084;

/// Electron rest energy (MeV).
pub const ELECTRON_MASS_MEV: f64 = 0.510_998_95;

/// Reduced Planck constant (eV·s).
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

/// Reduced Compton wavelength ħ/mc (cm). Documentation only.
pub const COMPTON_WAVELENGTH_CM: f64 = 3.861_592_679_6e-11;

/// Critical (Schwinger) field m²c³/(ħ|e|) in V/cm. Documentation only.
pub const CRITICAL_FIELD_V_PER_CM: f64 = 1.323_285_5e16;

// SI constants for the intensity <-> xi0 conversion.
const ELEMENTARY_CHARGE_C: f64 = 1.602_176_634e-19;
const ELECTRON_MASS_KG: f64 = 9.109_383_701_5e-31;
const SPEED_OF_LIGHT_M_S: f64 = 2.997_924_58e8;
const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// The full set of constants, for callers that want them bundled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysConstants {
    pub alpha: f64,
    pub electron_mass_mev: f64,
    pub hbar_ev_s: f64,
}

impl PhysConstants {
    pub const fn standard() -> Self {
        PhysConstants {
            alpha: ALPHA,
            electron_mass_mev: ELECTRON_MASS_MEV,
            hbar_ev_s: HBAR_EV_S,
        }
    }
}

impl Default for PhysConstants {
    fn default() -> Self {
        Self::standard()
    }
}

/// Converts a duration in fs to eV⁻¹.
pub fn fs_to_inverse_ev(t_fs: f64) -> Result<f64> {
    if !(t_fs >= 0.0) || !t_fs.is_finite() {
        return Err(Error::invalid("duration_fs", format!("must be finite and >= 0, got {t_fs}")));
    }
    Ok(t_fs * 1e-15 / HBAR_EV_S)
}

/// Converts a duration in eV⁻¹ back to fs.
pub fn inverse_ev_to_fs(t: f64) -> f64 {
    t * HBAR_EV_S * 1e15
}

/// Gaussian field-envelope scale τ from the intensity FWHM, τ = τ_FWHM / (2√ln 2).
pub fn tau_from_fwhm(tau_fwhm: f64) -> f64 {
    tau_fwhm / (2.0 * std::f64::consts::LN_2.sqrt())
}

/// Light-front energy parameter η = ω₀p₋/m² of a head-on collision.
///
/// `p_minus` in MeV, `omega0` in eV.
pub fn eta_parameter(p_minus: f64, omega0: f64) -> Result<f64> {
    if !(p_minus > 0.0) || !p_minus.is_finite() {
        return Err(Error::invalid("p_minus", format!("must be > 0, got {p_minus}")));
    }
    if !(omega0 > 0.0) {
        return Err(Error::invalid("omega0", format!("must be > 0, got {omega0}")));
    }
    Ok(eta_unchecked(p_minus, omega0 * 1e-6))
}

/// η with ω₀ already in MeV; hot-path version without validation.
#[inline]
pub(crate) fn eta_unchecked(p_minus_mev: f64, omega0_mev: f64) -> f64 {
    omega0_mev * p_minus_mev / (ELECTRON_MASS_MEV * ELECTRON_MASS_MEV)
}

/// ξ₀ = |e|E₀/(mω₀c) for an instantaneous peak intensity I₀ = ε₀cE₀².
///
/// With this convention I₀ = 10²⁰ W/cm² at ω₀ = 1.55 eV gives ξ₀ ≈ 4.84.
/// Using the cycle-averaged ε₀cE₀²/2 instead multiplies ξ₀ by √2.
pub fn xi0_from_intensity(intensity_w_cm2: f64, omega0_ev: f64) -> f64 {
    let intensity_si = intensity_w_cm2 * 1e4;
    let e_field = (intensity_si / (SPEED_OF_LIGHT_M_S * VACUUM_PERMITTIVITY)).sqrt();
    let omega_si = omega0_ev / HBAR_EV_S;
    ELEMENTARY_CHARGE_C * e_field / (ELECTRON_MASS_KG * omega_si * SPEED_OF_LIGHT_M_S)
}

/// Inverse of [`xi0_from_intensity`].
pub fn intensity_from_xi0(xi0: f64, omega0_ev: f64) -> f64 {
    let unit = xi0_from_intensity(1.0, omega0_ev);
    (xi0 / unit).powi(2)
}

/// Laser pulse parameters: central frequency, Gaussian envelope scale, and
/// classical nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    omega0: f64,
    tau: f64,
    xi0: f64,
    carrier_phase: f64,
}

impl PulseParams {
    /// `omega0` in eV, `tau` in eV⁻¹.
    pub fn new(omega0: f64, tau: f64, xi0: f64) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::invalid("omega0_eV", format!("must be > 0, got {omega0}")));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::invalid("tau", format!("must be > 0, got {tau}")));
        }
        if !(xi0 >= 0.0) || !xi0.is_finite() {
            return Err(Error::invalid("xi0", format!("must be >= 0, got {xi0}")));
        }
        Ok(PulseParams {
            omega0,
            tau,
            xi0,
            carrier_phase: 0.0,
        })
    }

    /// Laboratory units: `omega0` in eV, intensity FWHM in fs.
    pub fn from_fwhm_fs(omega0_ev: f64, tau_fwhm_fs: f64, xi0: f64) -> Result<Self> {
        if !(tau_fwhm_fs > 0.0) {
            return Err(Error::invalid("tau_fwhm_fs", format!("must be > 0, got {tau_fwhm_fs}")));
        }
        let tau = tau_from_fwhm(fs_to_inverse_ev(tau_fwhm_fs)?);
        Self::new(omega0_ev, tau, xi0)
    }

    pub fn with_carrier_phase(mut self, phase: f64) -> Result<Self> {
        if !phase.is_finite() {
            return Err(Error::invalid("carrier_phase_rad", "must be finite"));
        }
        self.carrier_phase = phase;
        Ok(self)
    }

    pub fn with_xi0(self, xi0: f64) -> Result<Self> {
        Self::new(self.omega0, self.tau, xi0)?.with_carrier_phase(self.carrier_phase)
    }

    /// Central photon energy (eV).
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Envelope scale τ (eV⁻¹).
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn xi0(&self) -> f64 {
        self.xi0
    }

    pub fn carrier_phase(&self) -> f64 {
        self.carrier_phase
    }

    /// ω₀τ, the number of radians per envelope scale.
    pub fn omega0_tau(&self) -> f64 {
        self.omega0 * self.tau
    }

    /// Non-fatal warnings about the regime of validity.
    pub fn soft_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.omega0_tau() < 10.0 {
            w.push(format!(
                "omega0*tau = {:.2} < 10: the long-pulse assumption is poorly satisfied",
                self.omega0_tau()
            ));
        }
        w
    }
}

/// Lorentzian squeezing profile parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    zeta0: f64,
    gamma: f64,
    theta0: f64,
}

impl SqueezeParams {
    /// `gamma` is the Lorentzian half-width in eV; `theta0` is wrapped into [0, 2π).
    pub fn new(zeta0: f64, gamma: f64, theta0: f64) -> Result<Self> {
        if !(zeta0 >= 0.0) || !zeta0.is_finite() {
            return Err(Error::invalid("zeta0", format!("must be >= 0, got {zeta0}")));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::invalid("gamma_eV", format!("must be > 0, got {gamma}")));
        }
        if !theta0.is_finite() {
            return Err(Error::invalid("theta0_rad", "must be finite"));
        }
        let mut theta0 = theta0.rem_euclid(2.0 * PI);
        if theta0 >= 2.0 * PI {
            theta0 = 0.0;
        }
        Ok(SqueezeParams { zeta0, gamma, theta0 })
    }

    /// No squeezing. The width is irrelevant but must be valid.
    pub fn none() -> Self {
        SqueezeParams {
            zeta0: 0.0,
            gamma: 1.0,
            theta0: 0.0,
        }
    }

    pub fn zeta0(&self) -> f64 {
        self.zeta0
    }

    /// Lorentzian half-width Γ (eV).
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// ζ(ω) = ζ₀ / (1 + (ω − ω₀)²/Γ²).
    #[inline]
    pub fn zeta_at(&self, omega: f64, omega0: f64) -> f64 {
        let s = (omega - omega0) / self.gamma;
        self.zeta0 / (1.0 + s * s)
    }

    pub fn is_squeezed(&self) -> bool {
        self.zeta0 > 0.0
    }
}

/// Electron beam: Gaussian energy distribution truncated at ±5σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParams {
    mean_energy_gev: f64,
    sigma_energy_gev: f64,
    n_electrons: usize,
}

impl BeamParams {
    pub fn new(mean_energy_gev: f64, sigma_energy_gev: f64, n_electrons: usize) -> Result<Self> {
        if !(mean_energy_gev > 0.0) || !mean_energy_gev.is_finite() {
            return Err(Error::invalid(
                "beam_energy_GeV",
                format!("must be > 0, got {mean_energy_gev}"),
            ));
        }
        if !(sigma_energy_gev >= 0.0) || !sigma_energy_gev.is_finite() {
            return Err(Error::invalid(
                "beam_sigma_GeV",
                format!("must be >= 0, got {sigma_energy_gev}"),
            ));
        }
        if !(mean_energy_gev > 5.0 * sigma_energy_gev) {
            return Err(Error::invalid(
                "beam_sigma_GeV",
                format!("mean energy {mean_energy_gev} GeV must exceed 5 sigma ({sigma_energy_gev} GeV)"),
            ));
        }
        if n_electrons == 0 {
            return Err(Error::invalid("n_electrons", "must be >= 1"));
        }
        Ok(BeamParams {
            mean_energy_gev,
            sigma_energy_gev,
            n_electrons,
        })
    }

    pub fn mean_energy_gev(&self) -> f64 {
        self.mean_energy_gev
    }

    pub fn sigma_energy_gev(&self) -> f64 {
        self.sigma_energy_gev
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    /// Mean light-cone momentum 2ε in MeV.
    pub fn mean_p_minus_mev(&self) -> f64 {
        2e3 * self.mean_energy_gev
    }
}

/// χ₀ = ξ₀·η(2ε, ω₀) for a beam of energy `energy_gev` head-on with the pulse.
pub fn chi0(pulse: &PulseParams, energy_gev: f64) -> Result<f64> {
    Ok(pulse.xi0() * eta_parameter(2e3 * energy_gev, pulse.omega0())?)
}
