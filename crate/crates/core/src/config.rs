//! Run configuration: a flat TOML file of `key = value` lines.
//!
//! Every key is optional and defaults to the unsqueezed 5 GeV / ξ₀ = 5
//! baseline. Unknown keys are rejected.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldRequest, PhaseWindow, DEFAULT_PHASE_STEP};
use crate::lcfa::DEFAULT_U_FLOOR;
use crate::mc::{BinScale, McSettings, SpectrumSpec, DEFAULT_PROB_CAP};
use crate::rho::MAX_ZETA0;
use crate::units::{intensity_from_xi0, BeamParams, PulseParams, SqueezeParams};

/// Version string written into every output.
pub const ARTIFACT_VERSION: &str = concat!("squeezed-compton ", env!("CARGO_PKG_VERSION"));

/// The file as written, with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    #[serde(rename = "omega0_eV")]
    pub omega0_ev: f64,
    pub tau_fwhm_fs: f64,
    pub xi0: f64,
    pub carrier_phase_rad: f64,
    pub zeta0: f64,
    #[serde(rename = "gamma_eV")]
    pub gamma_ev: f64,
    pub theta0_rad: f64,
    #[serde(rename = "beam_energy_GeV")]
    pub beam_energy_gev: f64,
    #[serde(rename = "beam_sigma_GeV")]
    pub beam_sigma_gev: f64,
    pub n_electrons: u64,
    pub seed: u64,
    pub spot_radius_um: f64,
    #[serde(rename = "peak_intensity_W_cm2", skip_serializing_if = "Option::is_none")]
    pub peak_intensity_w_cm2: Option<f64>,
    pub phi_step: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_half_width: Option<f64>,
    #[serde(rename = "omega_window_eV", skip_serializing_if = "Option::is_none")]
    pub omega_window_ev: Option<f64>,
    pub mc_prob_cap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_max_step: Option<f64>,
    pub u_floor: f64,
    pub spectrum_bins: u64,
    #[serde(rename = "spectrum_min_MeV")]
    pub spectrum_min_mev: f64,
    #[serde(rename = "spectrum_max_MeV")]
    pub spectrum_max_mev: f64,
    pub spectrum_scale: String,
    pub breit_wheeler: bool,
    pub output_dir: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump_phi_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump_phi_max: Option<f64>,
    pub rho_zeta0: Vec<f64>,
    pub rho_gamma_tau: Vec<f64>,
    pub rho_theta0: Vec<f64>,
    pub write_photons: bool,
    pub write_rate_table: bool,
}

impl Default for ConfigFile {
    fn default() -> Self {
        ConfigFile {
            omega0_ev: 1.55,
            tau_fwhm_fs: 40.0,
            xi0: 5.0,
            carrier_phase_rad: 0.0,
            zeta0: 0.0,
            gamma_ev: 1.9e-3,
            theta0_rad: 0.0,
            beam_energy_gev: 5.0,
            beam_sigma_gev: 0.5,
            n_electrons: 10_000,
            seed: 1,
            spot_radius_um: 3.0,
            peak_intensity_w_cm2: None,
            phi_step: DEFAULT_PHASE_STEP,
            phi_half_width: None,
            omega_window_ev: None,
            mc_prob_cap: DEFAULT_PROB_CAP,
            mc_max_step: None,
            u_floor: DEFAULT_U_FLOOR,
            spectrum_bins: 400,
            spectrum_min_mev: 0.0,
            spectrum_max_mev: 8000.0,
            spectrum_scale: "linear".into(),
            breit_wheeler: true,
            output_dir: "out".into(),
            dump_phi_min: None,
            dump_phi_max: None,
            rho_zeta0: vec![0.0, 1e-3, 0.1, 1.0, 3.45, 6.0, 8.0, 10.0],
            rho_gamma_tau: vec![1e-3, 0.05, 0.0693],
            rho_theta0: vec![0.0, 0.25 * PI, 0.5 * PI, 0.75 * PI, PI],
            write_photons: false,
            write_rate_table: false,
        }
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().trim().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Sorted `key = value` pairs in TOML syntax; keys left on auto are omitted.
    pub fn echo(&self) -> Vec<(String, String)> {
        let table = toml::Table::try_from(self).expect("config serializes");
        let mut out: Vec<(String, String)> = table
            .into_iter()
            .map(|(k, v)| (k, v.to_string()))
            .collect();
        out.sort();
        out
    }

    pub fn to_toml(&self) -> String {
        self.echo()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn validate(&self) -> Result<RunConfig> {
        RunConfig::from_file(self.clone())
    }
}

/// Rectangular lattice of ρ evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoLattice {
    pub zeta0: Vec<f64>,
    pub gamma_tau: Vec<f64>,
    pub theta0: Vec<f64>,
}

/// Validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub pulse: PulseParams,
    pub squeeze: SqueezeParams,
    pub beam: BeamParams,
    pub field: FieldRequest,
    pub spot_radius_um: f64,
    pub peak_intensity_w_cm2: f64,
    pub mc: McSettings,
    pub u_floor: f64,
    pub spectrum: SpectrumSpec,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub dump_range: Option<(f64, f64)>,
    pub rho: RhoLattice,
    pub write_photons: bool,
    pub write_rate_table: bool,
    file: ConfigFile,
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

fn finite(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("must be finite, got {v}")))
    }
}

impl RunConfig {
    pub fn from_file(file: ConfigFile) -> Result<Self> {
        let pulse = PulseParams::from_fwhm_fs(file.omega0_ev, file.tau_fwhm_fs, file.xi0)?
            .with_carrier_phase(file.carrier_phase_rad)?;
        let squeeze = SqueezeParams::new(file.zeta0, file.gamma_ev, file.theta0_rad)?;
        let n_electrons = usize::try_from(file.n_electrons)
            .map_err(|_| Error::invalid("n_electrons", "too large"))?;
        let beam = BeamParams::new(file.beam_energy_gev, file.beam_sigma_gev, n_electrons)?;

        positive("phi_step", file.phi_step)?;
        let window = match file.phi_half_width {
            None => PhaseWindow::Auto,
            Some(h) => PhaseWindow::Symmetric(positive("phi_half_width", h)?),
        };
        if let Some(w) = file.omega_window_ev {
            positive("omega_window_eV", w)?;
        }
        let field = FieldRequest {
            step: file.phi_step,
            window,
            omega_window: file.omega_window_ev,
        };

        let spot_radius_um = positive("spot_radius_um", file.spot_radius_um)?;
        let peak_intensity_w_cm2 = match file.peak_intensity_w_cm2 {
            Some(i) if i >= 0.0 && i.is_finite() => i,
            Some(i) => {
                return Err(Error::invalid(
                    "peak_intensity_W_cm2",
                    format!("must be finite and >= 0, got {i}"),
                ))
            }
            None => intensity_from_xi0(file.xi0, file.omega0_ev),
        };

        let mc = McSettings {
            prob_cap: file.mc_prob_cap,
            max_step: match file.mc_max_step {
                None => f64::INFINITY,
                Some(s) => positive("mc_max_step", s)?,
            },
            breit_wheeler: file.breit_wheeler,
        };
        mc.validate()?;

        if !(file.u_floor > 0.0 && file.u_floor < 1e-3) {
            return Err(Error::invalid(
                "u_floor",
                format!("must lie in (0, 1e-3), got {}", file.u_floor),
            ));
        }

        let scale = match file.spectrum_scale.as_str() {
            "linear" => BinScale::Linear,
            "log" => BinScale::Log,
            other => {
                return Err(Error::invalid(
                    "spectrum_scale",
                    format!("expected \"linear\" or \"log\", got {other:?}"),
                ))
            }
        };
        let spectrum = SpectrumSpec {
            bins: usize::try_from(file.spectrum_bins)
                .map_err(|_| Error::invalid("spectrum_bins", "too large"))?,
            min_mev: file.spectrum_min_mev,
            max_mev: file.spectrum_max_mev,
            scale,
        };
        spectrum.edges()?;

        let dump_range = match (file.dump_phi_min, file.dump_phi_max) {
            (None, None) => None,
            (lo, hi) => {
                let lo = finite("dump_phi_min", lo.unwrap_or(f64::NEG_INFINITY).max(-f64::MAX))?;
                let hi = finite("dump_phi_max", hi.unwrap_or(f64::INFINITY).min(f64::MAX))?;
                if !(hi > lo) {
                    return Err(Error::invalid("dump_phi_max", "must exceed dump_phi_min"));
                }
                Some((lo, hi))
            }
        };

        for &z in &file.rho_zeta0 {
            if !(z >= 0.0 && z <= MAX_ZETA0) {
                return Err(Error::invalid(
                    "rho_zeta0",
                    format!("entries must lie in [0, {MAX_ZETA0}], got {z}"),
                ));
            }
        }
        for &g in &file.rho_gamma_tau {
            positive("rho_gamma_tau", g)?;
        }
        for &t in &file.rho_theta0 {
            finite("rho_theta0", t)?;
        }
        let rho = RhoLattice {
            zeta0: file.rho_zeta0.clone(),
            gamma_tau: file.rho_gamma_tau.clone(),
            theta0: file.rho_theta0.clone(),
        };

        Ok(RunConfig {
            pulse,
            squeeze,
            beam,
            field,
            spot_radius_um,
            peak_intensity_w_cm2,
            mc,
            u_floor: file.u_floor,
            spectrum,
            seed: file.seed,
            output_dir: PathBuf::from(&file.output_dir),
            dump_range,
            rho,
            write_photons: file.write_photons,
            write_rate_table: file.write_rate_table,
            file,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        ConfigFile::load(path)?.validate()
    }

    pub fn file(&self) -> &ConfigFile {
        &self.file
    }

    /// Version line followed by the effective configuration.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out = vec![("version".to_string(), ARTIFACT_VERSION.to_string())];
        out.extend(self.file.echo());
        out
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.file.seed = seed;
        self
    }

    pub fn with_output_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.output_dir = dir.into();
        self.file.output_dir = self.output_dir.display().to_string();
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_baseline() {
        let c = ConfigFile::parse("").unwrap().validate().unwrap();
        assert_eq!(c.pulse.xi0(), 5.0);
        assert_eq!(c.squeeze.zeta0(), 0.0);
        assert_eq!(c.beam.n_electrons(), 10_000);
        assert_eq!(c.field.window, PhaseWindow::Auto);
    }

    #[test]
    fn unknown_key_is_named() {
        let e = ConfigFile::parse("tau_fs = 40.0\n").unwrap_err();
        assert!(e.to_string().contains("tau_fs"), "{e}");
    }

    #[test]
    fn bad_value_is_named() {
        let e = ConfigFile::parse("zeta0 = -1.0\n").unwrap().validate().unwrap_err();
        assert!(e.to_string().contains("zeta0"), "{e}");
        let e = ConfigFile::parse("spectrum_scale = \"cubic\"\n").unwrap().validate().unwrap_err();
        assert!(e.to_string().contains("spectrum_scale"), "{e}");
    }

    #[test]
    fn echo_round_trips() {
        let mut f = ConfigFile::default();
        f.theta0_rad = PI / 4.0;
        f.zeta0 = 3.45;
        f.peak_intensity_w_cm2 = Some(1e20);
        let back = ConfigFile::parse(&f.to_toml()).unwrap();
        assert_eq!(back, f);
    }
}
