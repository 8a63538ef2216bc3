//! Synthesis of the frequency-modulated plane-wave profile f_Z(ϕ) and the
//! local field parameter ξ(ϕ) = −ξ₀ df_Z/dϕ.
//!
//! With x = ω − ω₀, g = e^{−τ²x²/2} and
//! c(ω) = e^{iψ} cosh ζ(ω) − e^{−iψ} e^{−iθ₀} sinh ζ(ω) (ψ the carrier phase),
//!
//! ```text
//! f_Z(ϕ)  = (ω₀τ/√(2π)) ∫ dω (g/ω) Re[c e^{iωϕ/ω₀}]
//! ξ(ϕ)/ξ₀ = (τ/√(2π))   ∫ dω  g    Im[c e^{iωϕ/ω₀}]
//! ```
//!
//! Both integrals are evaluated with one composite Gauss–Legendre rule on a
//! truncated ω window. Pulling out the carrier e^{iϕ} leaves slowly varying
//! sums, which are marched along the uniform phase grid by complex rotation.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::specfun::quad::GaussLegendre;
use crate::units::{PulseParams, SqueezeParams, HBAR_EV_S};

/// Largest admissible phase step.
pub const MAX_PHASE_STEP: f64 = 0.15;
/// Default phase step.
pub const DEFAULT_PHASE_STEP: f64 = 0.1;

const GL_ORDER: usize = 16;
const BOUNDARY_LIMIT: f64 = 1e-8;
const PANEL_TOLERANCE: f64 = 1e-6;
const EDGE_ENVELOPE: f64 = 1e-4;
const ENERGY_CAPTURE: f64 = 1e-4;
const CHUNK: usize = 1024;
const TILE: usize = 256;

/// b(ω)/A₀ = √(2π) ω₀τ e^{−τ²(ω−ω₀)²/2}.
pub fn spectral_amplitude(omega: f64, pulse: &PulseParams) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::invalid("omega", format!("must be > 0, got {omega}")));
    }
    let x = omega - pulse.omega0();
    let t = pulse.tau();
    Ok((2.0 * PI).sqrt() * pulse.omega0_tau() * (-0.5 * t * t * x * x).exp())
}

/// E(φ, ω) = cosh ζ(ω) e^{−iωφ} − sinh ζ(ω) e^{−iθ₀} e^{iωφ}, with φ = ϕ/ω₀.
pub fn mode_function(
    phi: f64,
    omega: f64,
    squeeze: &SqueezeParams,
    pulse: &PulseParams,
) -> Result<Complex64> {
    if !(omega > 0.0) {
        return Err(Error::invalid("omega", format!("must be > 0, got {omega}")));
    }
    let zeta = squeeze.zeta_at(omega, pulse.omega0());
    let arg = omega * phi / pulse.omega0();
    let forward = Complex64::from_polar(1.0, -arg);
    let backward = Complex64::from_polar(1.0, arg - squeeze.theta0());
    Ok(zeta.cosh() * forward - zeta.sinh() * backward)
}

/// c(ω) for the grid integrals, including the carrier phase.
fn mode_coefficient(omega: f64, pulse: &PulseParams, squeeze: &SqueezeParams) -> Complex64 {
    let zeta = squeeze.zeta_at(omega, pulse.omega0());
    let psi = pulse.carrier_phase();
    if zeta == 0.0 {
        return Complex64::from_polar(1.0, psi);
    }
    Complex64::from_polar(zeta.cosh(), psi) - Complex64::from_polar(zeta.sinh(), -psi - squeeze.theta0())
}

/// |c(ω)|² = cosh 2ζ − sinh 2ζ cos(θ₀ + 2ψ).
fn mode_norm_sqr(omega: f64, pulse: &PulseParams, squeeze: &SqueezeParams) -> f64 {
    let zeta = squeeze.zeta_at(omega, pulse.omega0());
    (2.0 * zeta).cosh() - (2.0 * zeta).sinh() * (squeeze.theta0() + 2.0 * pulse.carrier_phase()).cos()
}

/// Half-width W of the ω window: max(8/τ, 10Γ) for a squeezed pulse.
pub fn default_omega_window(pulse: &PulseParams, squeeze: &SqueezeParams) -> f64 {
    let gauss = 8.0 / pulse.tau();
    if squeeze.is_squeezed() {
        gauss.max(10.0 * squeeze.gamma())
    } else {
        gauss
    }
}

/// Exact ∫(ξ/ξ₀)² dϕ over the whole line from the spectrum (Parseval):
/// ω₀ (τ²/2) ∫ g² |c|² dω.
pub fn parseval_energy_integral(pulse: &PulseParams, squeeze: &SqueezeParams) -> f64 {
    let w0 = pulse.omega0();
    let tau = pulse.tau();
    let half = 10.0 / tau;
    let lo = (w0 - half).max(0.0);
    let panels = if squeeze.is_squeezed() {
        ((w0 + half - lo) / (0.25 * squeeze.gamma())).ceil().max(64.0) as usize
    } else {
        64
    };
    let gl = GaussLegendre::new(GL_ORDER);
    let s: f64 = gl
        .composite(lo, w0 + half, panels)
        .iter()
        .map(|&(w, wt)| {
            let x = w - w0;
            wt * (-tau * tau * x * x).exp() * mode_norm_sqr(w, pulse, squeeze)
        })
        .sum();
    w0 * 0.5 * tau * tau * s
}

/// How the phase extent of the grid is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseWindow {
    /// Grow a symmetric window until the pulse is contained.
    Auto,
    /// Symmetric window [−h, h].
    Symmetric(f64),
    /// Explicit bounds.
    Bounds(f64, f64),
}

/// Grid request for [`synthesize_field`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRequest {
    pub step: f64,
    pub window: PhaseWindow,
    /// Override for the ω half-window (eV).
    pub omega_window: Option<f64>,
}

impl Default for FieldRequest {
    fn default() -> Self {
        FieldRequest {
            step: DEFAULT_PHASE_STEP,
            window: PhaseWindow::Auto,
            omega_window: None,
        }
    }
}

/// Diagnostics of a synthesis run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisInfo {
    pub omega_window: f64,
    pub panels: usize,
    pub boundary_ratio: f64,
    /// ∫(ξ/ξ₀)² dϕ from the spectrum.
    pub parseval_energy: f64,
    /// Fraction of `parseval_energy` captured on the grid.
    pub captured_fraction: f64,
}

/// Uniformly sampled f_Z(ϕ) and ξ(ϕ).
///
/// Sample `i` sits at ϕ = origin + (first + i)·step.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    origin: f64,
    first: i64,
    step: f64,
    f: Vec<f64>,
    xi: Vec<f64>,
    pulse: PulseParams,
    squeeze: SqueezeParams,
    info: Option<SynthesisInfo>,
}

impl FieldGrid {
    /// Grid from raw samples; used for reloading dumps and for tests.
    pub fn from_samples(
        origin: f64,
        first: i64,
        step: f64,
        f: Vec<f64>,
        xi: Vec<f64>,
        pulse: PulseParams,
        squeeze: SqueezeParams,
    ) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::invalid("phi_step", format!("must be > 0, got {step}")));
        }
        if step > MAX_PHASE_STEP {
            return Err(Error::GridTooCoarse { step });
        }
        if f.len() != xi.len() || f.len() < 2 {
            return Err(Error::invalid("grid", "f and xi need equal length >= 2"));
        }
        if f.iter().chain(&xi).any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid", "non-finite sample"));
        }
        Ok(FieldGrid {
            origin,
            first,
            step,
            f,
            xi,
            pulse,
            squeeze,
            info: None,
        })
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    #[inline]
    pub fn phi(&self, i: usize) -> f64 {
        self.origin + (self.first + i as i64) as f64 * self.step
    }

    pub fn phi_min(&self) -> f64 {
        self.phi(0)
    }

    pub fn phi_max(&self) -> f64 {
        self.phi(self.len() - 1)
    }

    pub fn f_values(&self) -> &[f64] {
        &self.f
    }

    /// ξ(ϕ) samples (absolute, i.e. including ξ₀).
    pub fn xi_values(&self) -> &[f64] {
        &self.xi
    }

    pub fn pulse(&self) -> &PulseParams {
        &self.pulse
    }

    pub fn squeeze(&self) -> &SqueezeParams {
        &self.squeeze
    }

    pub fn info(&self) -> Option<&SynthesisInfo> {
        self.info.as_ref()
    }

    /// Linear interpolation of f_Z; zero outside the grid.
    pub fn f_at(&self, phi: f64) -> f64 {
        interp(&self.f, self.phi_min(), self.step, phi)
    }

    /// Linear interpolation of ξ; zero outside the grid.
    pub fn xi_at(&self, phi: f64) -> f64 {
        interp(&self.xi, self.phi_min(), self.step, phi)
    }

    /// ∫(ξ/ξ₀)² dϕ over the grid (rectangle rule, exact for band-limited data).
    pub fn energy_integral(&self) -> f64 {
        let xi0 = self.pulse.xi0();
        if xi0 == 0.0 {
            return 0.0;
        }
        let s: f64 = self.xi.iter().map(|v| v * v).sum();
        s * self.step / (xi0 * xi0)
    }

    /// Largest |ξ|/ξ₀ within one carrier period of either end.
    pub fn edge_amplitude(&self) -> f64 {
        let xi0 = self.pulse.xi0();
        if xi0 == 0.0 {
            return 0.0;
        }
        let m = ((2.0 * PI / self.step).ceil() as usize).min(self.len());
        let head = self.xi[..m].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let tail = self.xi[self.len() - m..].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        head.max(tail) / xi0
    }

    /// Write `# key = value` echo lines, the grid parameters, a `phi,f_Z,xi`
    /// header and one row per sample with ϕ in `[lo, hi]` (all rows if `None`).
    pub fn write_csv<W: Write>(
        &self,
        mut out: W,
        echo: &[(String, String)],
        range: Option<(f64, f64)>,
    ) -> Result<()> {
        let (i0, i1) = match range {
            None => (0, self.len()),
            Some((lo, hi)) => {
                let a = (0..self.len()).find(|&i| self.phi(i) >= lo).unwrap_or(self.len());
                let b = (0..self.len()).rev().find(|&i| self.phi(i) <= hi).map_or(0, |i| i + 1);
                (a, b.max(a))
            }
        };
        for (k, v) in echo {
            writeln!(out, "# {k} = {v}")?;
        }
        let p = &self.pulse;
        let s = &self.squeeze;
        writeln!(out, "# grid.omega0_eV = {}", p.omega0())?;
        writeln!(out, "# grid.tau_inv_eV = {}", p.tau())?;
        writeln!(out, "# grid.xi0 = {}", p.xi0())?;
        writeln!(out, "# grid.carrier_phase_rad = {}", p.carrier_phase())?;
        writeln!(out, "# grid.zeta0 = {}", s.zeta0())?;
        writeln!(out, "# grid.gamma_eV = {}", s.gamma())?;
        writeln!(out, "# grid.theta0_rad = {}", s.theta0())?;
        writeln!(out, "# grid.origin = {}", self.origin)?;
        writeln!(out, "# grid.first = {}", self.first + i0 as i64)?;
        writeln!(out, "# grid.step = {}", self.step)?;
        writeln!(out, "phi,f_Z,xi")?;
        for i in i0..i1 {
            writeln!(out, "{},{},{}", self.phi(i), self.f[i], self.xi[i])?;
        }
        Ok(())
    }

    /// Inverse of [`FieldGrid::write_csv`]; returns the grid and the echo lines
    /// that preceded the grid parameters.
    pub fn read_csv<R: BufRead>(input: R) -> Result<(FieldGrid, Vec<(String, String)>)> {
        let mut echo = Vec::new();
        let mut grid_keys = std::collections::HashMap::new();
        let mut header_seen = false;
        let mut f = Vec::new();
        let mut xi = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let bad = |what: &str| Error::Config(format!("field dump line {}: {what}", lineno + 1));
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest.split_once('=').ok_or_else(|| bad("comment without `=`"))?;
                let (k, v) = (k.trim().to_string(), v.trim().to_string());
                if let Some(g) = k.strip_prefix("grid.") {
                    grid_keys.insert(g.to_string(), v);
                } else {
                    echo.push((k, v));
                }
                continue;
            }
            if !header_seen {
                if line.trim() != "phi,f_Z,xi" {
                    return Err(bad("expected header `phi,f_Z,xi`"));
                }
                header_seen = true;
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(bad("expected three columns"));
            }
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("unparsable number"));
            parse(cols[0])?;
            f.push(parse(cols[1])?);
            xi.push(parse(cols[2])?);
        }
        let get = |k: &str| -> Result<f64> {
            grid_keys
                .get(k)
                .ok_or_else(|| Error::Config(format!("field dump lacks `grid.{k}`")))?
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("field dump: bad `grid.{k}`")))
        };
        let pulse = PulseParams::new(get("omega0_eV")?, get("tau_inv_eV")?, get("xi0")?)?
            .with_carrier_phase(get("carrier_phase_rad")?)?;
        let zeta0 = get("zeta0")?;
        let squeeze = SqueezeParams::new(zeta0, get("gamma_eV")?, get("theta0_rad")?)?;
        let first = grid_keys
            .get("first")
            .and_then(|v| v.parse::<i64>().ok())
            .ok_or_else(|| Error::Config("field dump lacks `grid.first`".into()))?;
        let grid = FieldGrid::from_samples(get("origin")?, first, get("step")?, f, xi, pulse, squeeze)?;
        Ok((grid, echo))
    }
}

fn interp(v: &[f64], x0: f64, h: f64, x: f64) -> f64 {
    let t = (x - x0) / h;
    if !(t >= 0.0) || t > (v.len() - 1) as f64 {
        return 0.0;
    }
    let i = (t.floor() as usize).min(v.len() - 2);
    let s = t - i as f64;
    v[i] + s * (v[i + 1] - v[i])
}

/// Quadrature nodes folded with the spectral weights, structure of arrays,
/// padded to a multiple of eight with zero weights.
struct NodeSet {
    /// (ω_k − ω₀)/ω₀
    k: Vec<f64>,
    a_re: Vec<f64>,
    a_im: Vec<f64>,
    b_re: Vec<f64>,
    b_im: Vec<f64>,
    c_f: f64,
    c_xi: f64,
}

struct Spectrum {
    pulse: PulseParams,
    squeeze: SqueezeParams,
    lo: f64,
    hi: f64,
}

impl Spectrum {
    fn new(pulse: &PulseParams, squeeze: &SqueezeParams, half: f64) -> Result<Self> {
        if !(half > 0.0) || !half.is_finite() {
            return Err(Error::invalid("omega_window_eV", format!("must be > 0, got {half}")));
        }
        let w0 = pulse.omega0();
        let lo = (w0 - half).max(1e-6 * w0);
        let sp = Spectrum {
            pulse: *pulse,
            squeeze: *squeeze,
            lo,
            hi: w0 + half,
        };
        Ok(sp)
    }

    fn magnitude(&self, w: f64) -> f64 {
        let x = w - self.pulse.omega0();
        let t = self.pulse.tau();
        let g = (-0.5 * t * t * x * x).exp();
        g * mode_norm_sqr(w, &self.pulse, &self.squeeze).max(0.0).sqrt() * (self.pulse.omega0() / w).max(1.0)
    }

    /// Integrand magnitude at the window edges relative to its peak.
    fn boundary_ratio(&self) -> f64 {
        let gl = GaussLegendre::new(GL_ORDER);
        let panels = (((self.hi - self.lo) / (0.1 * self.squeeze.gamma())).ceil() as usize).clamp(64, 1 << 16);
        let peak = gl
            .composite(self.lo, self.hi, panels)
            .iter()
            .map(|&(w, _)| self.magnitude(w))
            .fold(self.magnitude(self.pulse.omega0()), f64::max);
        self.magnitude(self.lo).max(self.magnitude(self.hi)) / peak
    }

    fn nodes(&self, panels: usize) -> NodeSet {
        let gl = GaussLegendre::new(GL_ORDER);
        let w0 = self.pulse.omega0();
        let tau = self.pulse.tau();
        let pts = gl.composite(self.lo, self.hi, panels);
        let n = pts.len().div_ceil(8) * 8;
        let mut set = NodeSet {
            k: vec![0.0; n],
            a_re: vec![0.0; n],
            a_im: vec![0.0; n],
            b_re: vec![0.0; n],
            b_im: vec![0.0; n],
            c_f: self.pulse.omega0_tau() / (2.0 * PI).sqrt(),
            c_xi: tau / (2.0 * PI).sqrt(),
        };
        for (i, &(w, wt)) in pts.iter().enumerate() {
            let x = w - w0;
            let g = (-0.5 * tau * tau * x * x).exp();
            let b = wt * g * mode_coefficient(w, &self.pulse, &self.squeeze);
            let a = b / w;
            set.k[i] = x / w0;
            set.a_re[i] = a.re;
            set.a_im[i] = a.im;
            set.b_re[i] = b.re;
            set.b_im[i] = b.im;
        }
        set
    }
}

impl NodeSet {
    /// Envelope sums S_f, S_ξ at one phase, evaluated directly.
    fn sums_direct(&self, phi: f64) -> (Complex64, Complex64) {
        let mut sf = Complex64::new(0.0, 0.0);
        let mut sx = Complex64::new(0.0, 0.0);
        for i in 0..self.k.len() {
            let (s, c) = (self.k[i] * phi).sin_cos();
            let z = Complex64::new(c, s);
            sf += Complex64::new(self.a_re[i], self.a_im[i]) * z;
            sx += Complex64::new(self.b_re[i], self.b_im[i]) * z;
        }
        (sf, sx)
    }

    /// (f_Z, ξ/ξ₀) at one phase.
    fn eval_direct(&self, phi: f64) -> (f64, f64) {
        let (sf, sx) = self.sums_direct(phi);
        let carrier = Complex64::from_polar(1.0, phi);
        (self.c_f * (carrier * sf).re, self.c_xi * (carrier * sx).im)
    }

    /// Envelope sums on ϕ₀ + j·h, j < n, by rotation.
    fn sums_chunk(&self, phi0: f64, h: f64, sf: &mut [Complex64], sx: &mut [Complex64]) {
        let n = sf.len();
        for v in sf.iter_mut().chain(sx.iter_mut()) {
            *v = Complex64::new(0.0, 0.0);
        }
        let mut zr = [0.0; TILE];
        let mut zi = [0.0; TILE];
        let mut rr = [0.0; TILE];
        let mut ri = [0.0; TILE];
        for start in (0..self.k.len()).step_by(TILE) {
            let end = (start + TILE).min(self.k.len());
            let m = end - start;
            for i in 0..m {
                let k = self.k[start + i];
                let (s, c) = (k * phi0).sin_cos();
                zr[i] = c;
                zi[i] = s;
                let (s, c) = (k * h).sin_cos();
                rr[i] = c;
                ri[i] = s;
            }
            let ar = &self.a_re[start..end];
            let ai = &self.a_im[start..end];
            let br = &self.b_re[start..end];
            let bi = &self.b_im[start..end];
            for j in 0..n {
                let mut acc = [[0.0f64; 8]; 4];
                for (((((((zr8, zi8), rr8), ri8), ar8), ai8), br8), bi8) in zr[..m]
                    .chunks_exact_mut(8)
                    .zip(zi[..m].chunks_exact_mut(8))
                    .zip(rr[..m].chunks_exact(8))
                    .zip(ri[..m].chunks_exact(8))
                    .zip(ar.chunks_exact(8))
                    .zip(ai.chunks_exact(8))
                    .zip(br.chunks_exact(8))
                    .zip(bi.chunks_exact(8))
                {
                    for l in 0..8 {
                        let (x, y) = (zr8[l], zi8[l]);
                        acc[0][l] += ar8[l] * x - ai8[l] * y;
                        acc[1][l] += ar8[l] * y + ai8[l] * x;
                        acc[2][l] += br8[l] * x - bi8[l] * y;
                        acc[3][l] += br8[l] * y + bi8[l] * x;
                        zr8[l] = x * rr8[l] - y * ri8[l];
                        zi8[l] = x * ri8[l] + y * rr8[l];
                    }
                }
                let sum = |a: &[f64; 8]| ((a[0] + a[1]) + (a[2] + a[3])) + ((a[4] + a[5]) + (a[6] + a[7]));
                sf[j] += Complex64::new(sum(&acc[0]), sum(&acc[1]));
                sx[j] += Complex64::new(sum(&acc[2]), sum(&acc[3]));
            }
        }
    }
}

/// Panel count at which f and ξ on a sample of phases stop changing.
fn converge_panels(spec: &Spectrum, phi_lo: f64, phi_hi: f64) -> Result<(NodeSet, usize)> {
    let width = spec.hi - spec.lo;
    let phi_far = phi_lo.abs().max(phi_hi.abs()) / spec.pulse.omega0();
    let mut panels = 64f64.max((width * phi_far / (4.0 * PI)).ceil());
    if spec.squeeze.is_squeezed() {
        panels = panels.max((width / (0.5 * spec.squeeze.gamma())).ceil());
    }
    let mut panels = panels as usize;
    let mut probes: Vec<f64> = (0..=32).map(|i| phi_lo + (phi_hi - phi_lo) * i as f64 / 32.0).collect();
    if phi_lo < 0.0 && phi_hi > 0.0 {
        probes.push(0.0);
    }
    let mut current = spec.nodes(panels);
    let mut values: Vec<(f64, f64)> = probes.iter().map(|&p| current.eval_direct(p)).collect();
    loop {
        if panels > 1 << 22 {
            return Err(Error::NoConvergence {
                what: "field quadrature",
                detail: format!("panel count exceeded {}", 1 << 22),
            });
        }
        let finer = spec.nodes(2 * panels);
        let next: Vec<(f64, f64)> = probes.iter().map(|&p| finer.eval_direct(p)).collect();
        let peak = next
            .iter()
            .fold(1e-300f64, |a, &(f, x)| a.max(f.abs()).max(x.abs()));
        let change = values
            .iter()
            .zip(&next)
            .fold(0.0f64, |a, (u, v)| a.max((u.0 - v.0).abs()).max((u.1 - v.1).abs()));
        if change <= PANEL_TOLERANCE * peak {
            return Ok((current, panels));
        }
        panels *= 2;
        current = finer;
        values = next;
    }
}

/// Fill f and ξ/ξ₀ on ϕ = (first + i)·h.
fn fill_grid(nodes: &NodeSet, first: i64, h: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut f = vec![0.0; n];
    let mut xi = vec![0.0; n];
    f.par_chunks_mut(CHUNK)
        .zip(xi.par_chunks_mut(CHUNK))
        .enumerate()
        .for_each(|(c, (fc, xc))| {
            let m = fc.len();
            let j0 = first + (c * CHUNK) as i64;
            let mut sf = vec![Complex64::new(0.0, 0.0); m];
            let mut sx = vec![Complex64::new(0.0, 0.0); m];
            nodes.sums_chunk(j0 as f64 * h, h, &mut sf, &mut sx);
            for j in 0..m {
                let phi = (j0 + j as i64) as f64 * h;
                let carrier = Complex64::from_polar(1.0, phi);
                fc[j] = nodes.c_f * (carrier * sf[j]).re;
                xc[j] = nodes.c_xi * (carrier * sx[j]).im;
            }
        });
    (f, xi)
}

/// Envelope |ξ|/ξ₀ (analytic-signal magnitude) on ϕ = (first + i)·h.
fn envelope(nodes: &NodeSet, first: i64, h: f64, n: usize) -> Vec<f64> {
    let mut env = vec![0.0; n];
    env.par_chunks_mut(CHUNK).enumerate().for_each(|(c, ec)| {
        let m = ec.len();
        let j0 = first + (c * CHUNK) as i64;
        let mut sf = vec![Complex64::new(0.0, 0.0); m];
        let mut sx = vec![Complex64::new(0.0, 0.0); m];
        nodes.sums_chunk(j0 as f64 * h, h, &mut sf, &mut sx);
        for j in 0..m {
            ec[j] = nodes.c_xi * sx[j].norm();
        }
    });
    env
}

fn initial_half_width(pulse: &PulseParams, squeeze: &SqueezeParams) -> f64 {
    let base = 8.0 * pulse.omega0_tau();
    if squeeze.is_squeezed() {
        base.max(4.0 * pulse.omega0() / squeeze.gamma())
    } else {
        base
    }
}

fn edges_quiet(values: &[f64]) -> bool {
    let n = values.len();
    let m = (n / 10).max(1);
    values[..m].iter().chain(&values[n - m..]).all(|v| v.abs() < EDGE_ENVELOPE)
}

/// Synthesize f_Z and ξ on a uniform phase grid.
pub fn synthesize_field(
    pulse: &PulseParams,
    squeeze: &SqueezeParams,
    request: &FieldRequest,
) -> Result<FieldGrid> {
    let h = request.step;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::invalid("phi_step", format!("must be > 0, got {h}")));
    }
    if h > MAX_PHASE_STEP {
        return Err(Error::GridTooCoarse { step: h });
    }
    let half_w = request
        .omega_window
        .unwrap_or_else(|| default_omega_window(pulse, squeeze));
    let spec = Spectrum::new(pulse, squeeze, half_w)?;
    let boundary_ratio = spec.boundary_ratio();
    if boundary_ratio > BOUNDARY_LIMIT {
        return Err(Error::WindowTooSmall { ratio: boundary_ratio });
    }
    let parseval = parseval_energy_integral(pulse, squeeze);

    let build = |first: i64, n: usize, nodes: &NodeSet, panels: usize| {
        let (f, xi_rel) = fill_grid(nodes, first, h, n);
        let captured = xi_rel.iter().map(|v| v * v).sum::<f64>() * h;
        let xi = xi_rel.iter().map(|v| v * pulse.xi0()).collect();
        let grid = FieldGrid {
            origin: 0.0,
            first,
            step: h,
            f,
            xi,
            pulse: *pulse,
            squeeze: *squeeze,
            info: Some(SynthesisInfo {
                omega_window: half_w,
                panels,
                boundary_ratio,
                parseval_energy: parseval,
                captured_fraction: captured / parseval,
            }),
        };
        (grid, xi_rel)
    };

    match request.window {
        PhaseWindow::Bounds(lo, hi) => {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::invalid("phi_bounds", format!("need finite lo < hi, got [{lo}, {hi}]")));
            }
            let first = (lo / h).ceil() as i64;
            let last = (hi / h).floor() as i64;
            if last <= first {
                return Err(Error::invalid("phi_bounds", "window holds fewer than two samples"));
            }
            let (nodes, panels) = converge_panels(&spec, lo, hi)?;
            Ok(build(first, (last - first + 1) as usize, &nodes, panels).0)
        }
        PhaseWindow::Symmetric(half) => {
            if !(half > 0.0) || !half.is_finite() {
                return Err(Error::invalid("phi_half_width", format!("must be > 0, got {half}")));
            }
            let k = (half / h).floor() as i64;
            let (nodes, panels) = converge_panels(&spec, -half, half)?;
            Ok(build(-k, (2 * k + 1) as usize, &nodes, panels).0)
        }
        PhaseWindow::Auto => {
            let mut half = initial_half_width(pulse, squeeze);
            for _ in 0..24 {
                let (nodes, panels) = converge_panels(&spec, -half, half)?;
                // coarse envelope scan; the envelope has bandwidth W/ω₀ ≪ 1
                let hc = 1.0;
                let kc = (half / hc).ceil() as i64;
                let env = envelope(&nodes, -kc, hc, (2 * kc + 1) as usize);
                let coarse_energy = env.iter().map(|e| 0.5 * e * e).sum::<f64>() * hc;
                if !edges_quiet(&env) || coarse_energy < (1.0 - ENERGY_CAPTURE) * parseval {
                    half *= 1.5;
                    continue;
                }
                let k = (half / h).ceil() as i64;
                let (grid, xi_rel) = build(-k, (2 * k + 1) as usize, &nodes, panels);
                let captured = grid.info.map_or(0.0, |i| i.captured_fraction);
                if edges_quiet(&xi_rel) && captured >= 1.0 - ENERGY_CAPTURE {
                    return Ok(grid);
                }
                half *= 1.5;
            }
            Err(Error::NoConvergence {
                what: "phase-window sizing",
                detail: format!("pulse not contained within |phi| <= {half:.0}"),
            })
        }
    }
}

/// Largest |Im| of the two conjugate halves of the f_Z integrand summed
/// independently, relative to max |f_Z|, over the given phases.
pub fn imaginary_residue(
    pulse: &PulseParams,
    squeeze: &SqueezeParams,
    phis: &[f64],
    omega_window: Option<f64>,
) -> Result<f64> {
    let half = omega_window.unwrap_or_else(|| default_omega_window(pulse, squeeze));
    let spec = Spectrum::new(pulse, squeeze, half)?;
    let lo = phis.iter().copied().fold(0.0f64, f64::min);
    let hi = phis.iter().copied().fold(0.0f64, f64::max);
    let (_, panels) = converge_panels(&spec, lo.min(-1.0), hi.max(1.0))?;
    let gl = GaussLegendre::new(GL_ORDER);
    let pts = gl.composite(spec.lo, spec.hi, panels);
    let psi = pulse.carrier_phase();
    let mut worst_im = 0.0f64;
    let mut peak = 0.0f64;
    for &phi in phis {
        let mut total = Complex64::new(0.0, 0.0);
        for &(w, wt) in &pts {
            let b = spectral_amplitude(w, pulse)? * Complex64::from_polar(1.0, -psi);
            let e = mode_function(phi, w, squeeze, pulse)?;
            let zeta = squeeze.zeta_at(w, pulse.omega0());
            let arg = w * phi / pulse.omega0();
            let e_conj = zeta.cosh() * Complex64::from_polar(1.0, arg)
                - zeta.sinh() * Complex64::from_polar(1.0, squeeze.theta0() - arg);
            let weight = wt / (2.0 * PI) / (2.0 * w);
            total += weight * (b * e + b.conj() * e_conj);
        }
        worst_im = worst_im.max(total.im.abs());
        peak = peak.max(total.re.abs());
    }
    Ok(if peak > 0.0 { worst_im / peak } else { worst_im })
}

/// Pulse energy in joules: π σ₀² I₀ (1/ω₀) ∫(ξ/ξ₀)² dϕ.
///
/// `spot_radius_um` is σ₀ in μm, `peak_intensity_w_cm2` the intensity that
/// corresponds to ξ₀.
pub fn pulse_energy(grid: &FieldGrid, spot_radius_um: f64, peak_intensity_w_cm2: f64) -> Result<f64> {
    if !(spot_radius_um > 0.0) || !spot_radius_um.is_finite() {
        return Err(Error::invalid("spot_radius_um", format!("must be > 0, got {spot_radius_um}")));
    }
    if !(peak_intensity_w_cm2 >= 0.0) || !peak_intensity_w_cm2.is_finite() {
        return Err(Error::invalid(
            "peak_intensity_W_cm2",
            format!("must be >= 0, got {peak_intensity_w_cm2}"),
        ));
    }
    if grid.pulse().xi0() == 0.0 {
        return Ok(0.0);
    }
    let edge = grid.edge_amplitude();
    if edge >= 1e-3 {
        return Err(Error::TruncatedPulse { edge });
    }
    let sigma_cm = spot_radius_um * 1e-4;
    let duration_s = grid.energy_integral() / grid.pulse().omega0() * HBAR_EV_S;
    Ok(PI * sigma_cm * sigma_cm * peak_intensity_w_cm2 * duration_s)
}
