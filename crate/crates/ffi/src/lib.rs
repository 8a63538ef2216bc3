//! C ABI for the squeezed-compton simulator.
//!
//! Every fallible function returns an [`SqcStatus`] and writes its result
//! through an out-pointer. After a non-OK status,
//! [`sqc_last_error_message`] describes the failure. Objects are opaque and
//! released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use squeezed_compton::cli::{run_simulation, with_workers};
use squeezed_compton::config::RunConfig;
use squeezed_compton::field::{pulse_energy, synthesize_field, FieldGrid, FieldRequest, PhaseWindow};
use squeezed_compton::lcfa::{RateTable, CHI_MAX};
use squeezed_compton::rho::RhoMethod;
use squeezed_compton::specfun::{bessel_i, bessel_k, BesselIOrder, BesselOrder};
use squeezed_compton::units::{BeamParams, PulseParams, SqueezeParams};
use squeezed_compton::{Error, ErrorKind};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Numerical = 3,
    Io = 4,
    Config = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqcBesselOrder {
    OneThird = 0,
    TwoThirds = 1,
    FiveThirds = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqcBesselIOrder {
    Zero = 0,
    One = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqcRhoMethod {
    Quadrature = 0,
    SmallZeta = 1,
    Bessel = 2,
    Asymptotic = 3,
}

/// Laser pulse in laboratory units.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SqcPulse {
    pub omega0_ev: f64,
    pub tau_fwhm_fs: f64,
    pub xi0: f64,
    pub carrier_phase_rad: f64,
}

/// Lorentzian squeezing profile; `zeta0 = 0` means no squeezing.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SqcSqueeze {
    pub zeta0: f64,
    pub gamma_ev: f64,
    pub theta0_rad: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SqcSummary {
    pub n_electrons: u64,
    pub seed: u64,
    pub mean_emitted_energy_mev: f64,
    pub mean_emitted_energy_stderr_mev: f64,
    pub mean_photon_count: f64,
    pub mean_photon_count_stderr: f64,
    pub pair_count: u64,
    pub pulse_energy_j: f64,
}

/// Synthesized field on a uniform phase grid.
pub struct SqcFieldGrid {
    inner: FieldGrid,
}

/// Tabulated emission rates and inverse CDFs.
pub struct SqcRateTable {
    inner: RateTable,
}

/// Validated run configuration.
pub struct SqcConfig {
    inner: RunConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> SqcStatus {
    match e {
        Error::InvalidParameter { .. } => SqcStatus::InvalidParameter,
        Error::Config(_) => SqcStatus::Config,
        Error::Io(_) => SqcStatus::Io,
        _ => match e.kind() {
            ErrorKind::Numerical => SqcStatus::Numerical,
            ErrorKind::Config => SqcStatus::InvalidParameter,
            ErrorKind::Runtime => SqcStatus::Io,
        },
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> SqcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SqcStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_last_error(format!("null pointer passed as `{name}`"));
            SqcStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            SqcStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

unsafe fn in_ref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

/// Message for the last failure on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sqc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sqc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sqc_bessel_k(order: SqcBesselOrder, x: f64, out: *mut f64) -> SqcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let order = match order {
            SqcBesselOrder::OneThird => BesselOrder::OneThird,
            SqcBesselOrder::TwoThirds => BesselOrder::TwoThirds,
            SqcBesselOrder::FiveThirds => BesselOrder::FiveThirds,
        };
        *out = bessel_k(order, x)?;
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sqc_bessel_i(order: SqcBesselIOrder, x: f64, out: *mut f64) -> SqcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let order = match order {
            SqcBesselIOrder::Zero => BesselIOrder::Zero,
            SqcBesselIOrder::One => BesselIOrder::One,
        };
        *out = bessel_i(order, x)?;
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sqc_rho(
    method: SqcRhoMethod,
    zeta0: f64,
    gamma_tau: f64,
    theta0: f64,
    out: *mut f64,
) -> SqcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let method = match method {
            SqcRhoMethod::Quadrature => RhoMethod::Quadrature,
            SqcRhoMethod::SmallZeta => RhoMethod::SmallZeta,
            SqcRhoMethod::Bessel => RhoMethod::Bessel,
            SqcRhoMethod::Asymptotic => RhoMethod::Asymptotic,
        };
        *out = method.eval(zeta0, gamma_tau, theta0)?.value;
        Ok(())
    })
}

/// Synthesizes the field. `phi_half_width <= 0` sizes the window
/// automatically. On success `*out` owns a grid to be released with
/// [`sqc_field_free`].
///
/// # Safety
/// `pulse` and `squeeze` must point to valid structs; `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn sqc_field_synthesize(
    pulse: *const SqcPulse,
    squeeze: *const SqcSqueeze,
    phi_step: f64,
    phi_half_width: f64,
    out: *mut *mut SqcFieldGrid,
) -> SqcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let p = in_ref(pulse, "pulse")?;
        let s = in_ref(squeeze, "squeeze")?;
        let pulse = PulseParams::from_fwhm_fs(p.omega0_ev, p.tau_fwhm_fs, p.xi0)?
            .with_carrier_phase(p.carrier_phase_rad)?;
        let squeeze = if s.zeta0 == 0.0 {
            SqueezeParams::none()
        } else {
            SqueezeParams::new(s.zeta0, s.gamma_ev, s.theta0_rad)?
        };
        let request = FieldRequest {
            step: phi_step,
            window: if phi_half_width > 0.0 {
                PhaseWindow::Symmetric(phi_half_width)
            } else {
                PhaseWindow::Auto
            },
            omega_window: None,
        };
        let grid = synthesize_field(&pulse, &squeeze, &request)?;
        *out = Box::into_raw(Box::new(SqcFieldGrid { inner: grid }));
        Ok(())
    })
}

/// # Safety
/// `grid` must come from [`sqc_field_synthesize`]; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sqc_field_len(grid: *const SqcFieldGrid, out: *mut usize) -> SqcStatus {
    guard(|| {
        let g = in_ref(grid, "grid")?;
        *out_ref(out, "out")? = g.inner.len();
        Ok(())
    })
}

/// Copies ϕ, f_Z and ξ into caller buffers of `capacity` elements. Any of
/// the three buffers may be NULL to skip it.
///
/// # Safety
/// `grid` must come from [`sqc_field_synthesize`]; non-NULL buffers must
/// hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn sqc_field_copy(
    grid: *const SqcFieldGrid,
    phi: *mut f64,
    f: *mut f64,
    xi: *mut f64,
    capacity: usize,
) -> SqcStatus {
    guard(|| {
        let g = &in_ref(grid, "grid")?.inner;
        let n = g.len();
        if capacity < n {
            return Err(Error::InvalidParameter {
                name: "capacity",
                reason: format!("grid has {n} points, buffer holds {capacity}"),
            }
            .into());
        }
        if !phi.is_null() {
            let dst = std::slice::from_raw_parts_mut(phi, n);
            for (i, d) in dst.iter_mut().enumerate() {
                *d = g.phi(i);
            }
        }
        if !f.is_null() {
            std::slice::from_raw_parts_mut(f, n).copy_from_slice(g.f_values());
        }
        if !xi.is_null() {
            std::slice::from_raw_parts_mut(xi, n).copy_from_slice(g.xi_values());
        }
        Ok(())
    })
}

/// Pulse energy in J for a spot radius in μm and peak intensity in W/cm².
///
/// # Safety
/// `grid` must come from [`sqc_field_synthesize`]; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sqc_field_pulse_energy(
    grid: *const SqcFieldGrid,
    spot_radius_um: f64,
    peak_intensity_w_cm2: f64,
    out: *mut f64,
) -> SqcStatus {
    guard(|| {
        let g = in_ref(grid, "grid")?;
        *out_ref(out, "out")? = pulse_energy(&g.inner, spot_radius_um, peak_intensity_w_cm2)?;
        Ok(())
    })
}

/// # Safety
/// `grid` must be NULL or come from [`sqc_field_synthesize`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sqc_field_free(grid: *mut SqcFieldGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sqc_rate_table_build(u_floor: f64, out: *mut *mut SqcRateTable) -> SqcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let table = RateTable::build(u_floor)?;
        *out = Box::into_raw(Box::new(SqcRateTable { inner: table }));
        Ok(())
    })
}

/// R(χ) = ∫₀¹ F(χ, u) du.
///
/// # Safety
/// `table` must come from [`sqc_rate_table_build`]; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sqc_rate_table_total_rate(
    table: *const SqcRateTable,
    chi: f64,
    out: *mut f64,
) -> SqcStatus {
    guard(|| {
        let t = in_ref(table, "table")?;
        let out = out_ref(out, "out")?;
        check_chi(chi)?;
        *out = t.inner.total_rate(chi);
        Ok(())
    })
}

/// Photon fraction u at quantile `q` in [0, 1).
///
/// # Safety
/// `table` must come from [`sqc_rate_table_build`]; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sqc_rate_table_sample(
    table: *const SqcRateTable,
    chi: f64,
    q: f64,
    out: *mut f64,
) -> SqcStatus {
    guard(|| {
        let t = in_ref(table, "table")?;
        let out = out_ref(out, "out")?;
        check_chi(chi)?;
        if !(0.0..1.0).contains(&q) {
            return Err(Error::InvalidParameter {
                name: "q",
                reason: format!("must lie in [0, 1), got {q}"),
            }
            .into());
        }
        *out = t.inner.sample(chi, q);
        Ok(())
    })
}

fn check_chi(chi: f64) -> Result<(), Failure> {
    if chi > 0.0 && chi <= CHI_MAX {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "chi",
            reason: format!("must lie in (0, {CHI_MAX}], got {chi}"),
        }
        .into())
    }
}

/// # Safety
/// `table` must be NULL or come from [`sqc_rate_table_build`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sqc_rate_table_free(table: *mut SqcRateTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Loads and validates a TOML configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sqc_config_load(path: *const c_char, out: *mut *mut SqcConfig) -> SqcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        if path.is_null() {
            return Err(Failure::Null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Error::Config("path is not valid UTF-8".into()))?;
        let cfg = RunConfig::load(Path::new(path))?;
        *out = Box::into_raw(Box::new(SqcConfig { inner: cfg }));
        Ok(())
    })
}

/// # Safety
/// `config` must come from [`sqc_config_load`].
#[no_mangle]
pub unsafe extern "C" fn sqc_config_set_seed(config: *mut SqcConfig, seed: u64) -> SqcStatus {
    guard(|| {
        let c = out_ref(config, "config")?;
        c.inner = c.inner.clone().with_seed(seed);
        Ok(())
    })
}

/// # Safety
/// `config` must come from [`sqc_config_load`].
#[no_mangle]
pub unsafe extern "C" fn sqc_config_set_n_electrons(config: *mut SqcConfig, n: u64) -> SqcStatus {
    guard(|| {
        let c = out_ref(config, "config")?;
        let n = usize::try_from(n).map_err(|_| Error::InvalidParameter {
            name: "n_electrons",
            reason: "too large".into(),
        })?;
        let b = c.inner.beam;
        c.inner.beam = BeamParams::new(b.mean_energy_gev(), b.sigma_energy_gev(), n)?;
        Ok(())
    })
}

/// # Safety
/// `config` must be NULL or come from [`sqc_config_load`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sqc_config_free(config: *mut SqcConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the full simulation in memory (no files) on `workers` threads
/// (0 = all cores) and fills `out`.
///
/// # Safety
/// `config` must come from [`sqc_config_load`]; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sqc_simulate(
    config: *const SqcConfig,
    workers: usize,
    out: *mut SqcSummary,
) -> SqcStatus {
    guard(|| {
        let cfg = &in_ref(config, "config")?.inner;
        let out = out_ref(out, "out")?;
        let sim = with_workers(workers, || run_simulation(cfg))?;
        let s = &sim.result.summary;
        *out = SqcSummary {
            n_electrons: s.n_electrons as u64,
            seed: s.seed,
            mean_emitted_energy_mev: s.mean_emitted_energy,
            mean_emitted_energy_stderr_mev: s.mean_emitted_energy_stderr,
            mean_photon_count: s.mean_photon_count,
            mean_photon_count_stderr: s.mean_photon_count_stderr,
            pair_count: s.pair_count,
            pulse_energy_j: sim.pulse_energy,
        };
        Ok(())
    })
}
