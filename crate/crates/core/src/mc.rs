//! One-dimensional kinetic Monte Carlo of photon emission along the pulse.
//!
//! Between emissions an electron keeps its light-cone momentum p₋. The phase
//! axis is marched in steps Δϕ; each step emits with probability
//! P = α/(√3πη) R(χ) Δϕ. The Bernoulli trials are realized by inverse
//! transform: one uniform U per waiting time, emission in the first step
//! where the running survival Π(1 − P) drops below U.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::FieldGrid;
use crate::lcfa::{RateTable, CHI_MAX, RATE_PREFACTOR};
use crate::units::{eta_unchecked, BeamParams};

/// Default per-step probability cap.
pub const DEFAULT_PROB_CAP: f64 = 0.01;
/// Hard limit on the per-step probability.
pub const HARD_PROB_LIMIT: f64 = 0.05;

/// Tracked electron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectronState {
    /// Light-cone momentum p₋ (MeV).
    pub p_minus: f64,
    pub phi: f64,
    pub weight: f64,
}

impl ElectronState {
    /// Electron of energy ε (GeV) entering the pulse head-on, p₋ = 2ε.
    pub fn from_energy_gev(energy_gev: f64, phi: f64) -> Result<Self> {
        if !(energy_gev > 0.0) || !energy_gev.is_finite() {
            return Err(Error::invalid("energy", format!("must be > 0, got {energy_gev}")));
        }
        Ok(ElectronState {
            p_minus: 2e3 * energy_gev,
            phi,
            weight: 1.0,
        })
    }
}

/// Emitted photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonRecord {
    /// ω_γ = u p₋/2 (MeV).
    pub energy: f64,
    pub emission_phi: f64,
    pub parent_chi: f64,
    /// Decayed into a pair before leaving the pulse.
    pub converted: bool,
}

/// Marching controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub prob_cap: f64,
    /// Largest Δϕ; the grid step is used when larger.
    pub max_step: f64,
    pub breit_wheeler: bool,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            prob_cap: DEFAULT_PROB_CAP,
            max_step: f64::INFINITY,
            breit_wheeler: true,
        }
    }
}

impl McSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.prob_cap > 0.0 && self.prob_cap <= HARD_PROB_LIMIT) {
            return Err(Error::invalid(
                "mc_prob_cap",
                format!("must lie in (0, {HARD_PROB_LIMIT}], got {}", self.prob_cap),
            ));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::invalid("mc_max_step", format!("must be > 0, got {}", self.max_step)));
        }
        Ok(())
    }
}

/// Field grid prepared for marching: |ξ| suffix maxima for pair thinning and
/// η per MeV of p₋.
pub struct McField<'a> {
    grid: &'a FieldGrid,
    suffix_max: Vec<f64>,
    /// |ξ| at cell midpoints and cell maxima
    cell_mid: Vec<f64>,
    cell_max: Vec<f64>,
    eta_per_mev: f64,
}

impl<'a> McField<'a> {
    pub fn new(grid: &'a FieldGrid) -> Self {
        let xi = grid.xi_values();
        let mut suffix_max = vec![0.0; xi.len()];
        let mut m = 0.0f64;
        for i in (0..xi.len()).rev() {
            m = m.max(xi[i].abs());
            suffix_max[i] = m;
        }
        let cell_mid = xi.windows(2).map(|w| (0.5 * (w[0] + w[1])).abs()).collect();
        let cell_max = xi.windows(2).map(|w| w[0].abs().max(w[1].abs())).collect();
        McField {
            grid,
            suffix_max,
            cell_mid,
            cell_max,
            eta_per_mev: eta_unchecked(1.0, grid.pulse().omega0() * 1e-6),
        }
    }

    pub fn grid(&self) -> &FieldGrid {
        self.grid
    }
}

/// Outcome of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub photons: Vec<PhotonRecord>,
    pub initial: ElectronState,
    pub final_state: ElectronState,
    pub pairs: u64,
    pub chi_clamped: u64,
    pub max_step_probability: f64,
}

impl Trajectory {
    pub fn emitted_energy(&self) -> f64 {
        self.photons.iter().map(|p| p.energy).sum()
    }
}

/// March one electron through the grid.
///
/// `emission` drives the emission waiting times and photon fractions;
/// `pairs`, when given, drives pair conversion of each emitted photon.
pub fn simulate_electron<R1: Rng, R2: Rng>(
    field: &McField<'_>,
    table: &RateTable,
    settings: &McSettings,
    initial: ElectronState,
    emission: &mut R1,
    mut pairs: Option<&mut R2>,
) -> Result<Trajectory> {
    settings.validate()?;
    if !(initial.p_minus > 0.0) || !initial.p_minus.is_finite() {
        return Err(Error::invalid("p_minus", format!("must be > 0, got {}", initial.p_minus)));
    }
    let grid = field.grid;
    let xi = grid.xi_values();
    let h = grid.step();
    let base_sub = if settings.max_step < h {
        (h / settings.max_step).ceil() as usize
    } else {
        1
    };
    let cap = settings.prob_cap;

    // R(χ)/χ is largest at χ = 0, so this bounds P for any p₋
    let roc_max = table.rate_over_chi_fast(0.0);
    let fast_limit = cap * base_sub as f64 / (RATE_PREFACTOR * roc_max * h);

    let mut w = Walker {
        p_minus: initial.p_minus,
        eta: field.eta_per_mev * initial.p_minus,
        survival: 1.0,
        threshold: 1.0 - emission.random::<f64>(),
        photons: Vec::new(),
        pairs: 0,
        clamped: 0,
        max_p: 0.0,
    };

    for j in 0..xi.len() - 1 {
        let xmax = field.cell_max[j];
        if xmax == 0.0 {
            continue;
        }
        if base_sub == 1 && xmax <= fast_limit {
            let x = field.cell_mid[j];
            let chi = x * w.eta;
            let p = RATE_PREFACTOR * x * table.rate_over_chi_fast(chi) * h;
            w.max_p = w.max_p.max(p);
            w.survival *= 1.0 - p;
            if w.survival < w.threshold {
                w.emit(field, table, j, grid.phi(j) + 0.5 * h, chi, emission, pairs.as_deref_mut());
            }
            continue;
        }
        let n_sub = if xmax <= fast_limit {
            base_sub
        } else {
            let p_bound = RATE_PREFACTOR * xmax * table.rate_over_chi_fast(xmax * w.eta) * h;
            base_sub.max((p_bound / cap).ceil() as usize)
        };
        let (x0, x1) = (xi[j], xi[j + 1]);
        let dphi = h / n_sub as f64;
        for k in 0..n_sub {
            let t = (k as f64 + 0.5) / n_sub as f64;
            let x = (x0 + t * (x1 - x0)).abs();
            let chi = x * w.eta;
            if chi > CHI_MAX {
                w.clamped += 1;
            }
            let p = RATE_PREFACTOR * x * table.rate_over_chi_fast(chi) * dphi;
            if p > HARD_PROB_LIMIT {
                return Err(Error::NoConvergence {
                    what: "step refinement",
                    detail: format!("emission probability {p:.3} per step exceeds {HARD_PROB_LIMIT}"),
                });
            }
            w.max_p = w.max_p.max(p);
            w.survival *= 1.0 - p;
            if w.survival < w.threshold {
                w.emit(field, table, j, grid.phi(j) + t * h, chi, emission, pairs.as_deref_mut());
            }
        }
    }
    Ok(Trajectory {
        photons: w.photons,
        initial,
        final_state: ElectronState {
            p_minus: w.p_minus,
            phi: grid.phi_max(),
            weight: initial.weight,
        },
        pairs: w.pairs,
        chi_clamped: w.clamped,
        max_step_probability: w.max_p,
    })
}

struct Walker {
    p_minus: f64,
    eta: f64,
    survival: f64,
    threshold: f64,
    photons: Vec<PhotonRecord>,
    pairs: u64,
    clamped: u64,
    max_p: f64,
}

impl Walker {
    #[allow(clippy::too_many_arguments)]
    fn emit<R1: Rng, R2: Rng>(
        &mut self,
        field: &McField<'_>,
        table: &RateTable,
        cell: usize,
        phi: f64,
        chi: f64,
        emission: &mut R1,
        pairs: Option<&mut R2>,
    ) {
        let u = table.sample(chi, emission.random::<f64>());
        let mut record = PhotonRecord {
            energy: 0.5 * u * self.p_minus,
            emission_phi: phi,
            parent_chi: chi,
            converted: false,
        };
        if let Some(rng) = pairs {
            if photon_converts(field, table, cell, phi, u * self.p_minus, rng) {
                record.converted = true;
                self.pairs += 1;
            }
        }
        self.photons.push(record);
        self.p_minus *= 1.0 - u;
        self.eta = field.eta_per_mev * self.p_minus;
        self.survival = 1.0;
        self.threshold = 1.0 - emission.random::<f64>();
    }
}

/// Thinning of the pair-production process along the photon's remaining path.
fn photon_converts<R: Rng>(
    field: &McField<'_>,
    table: &RateTable,
    cell: usize,
    phi_start: f64,
    k_minus: f64,
    rng: &mut R,
) -> bool {
    let grid = field.grid;
    let eta_g = field.eta_per_mev * k_minus;
    if !(eta_g > 0.0) {
        return false;
    }
    let end = grid.phi_max();
    let mut phi = phi_start;
    let mut idx = cell;
    loop {
        let majorant = table.breit_wheeler_rate(field.suffix_max[idx] * eta_g, eta_g);
        if !(majorant > 0.0) {
            return false;
        }
        let e: f64 = -(1.0 - rng.random::<f64>()).ln();
        phi += e / majorant;
        if phi >= end {
            return false;
        }
        let rate = table.breit_wheeler_rate(grid.xi_at(phi).abs() * eta_g, eta_g);
        if rng.random::<f64>() * majorant < rate {
            return true;
        }
        idx = (((phi - grid.phi_min()) / grid.step()).floor() as usize).min(grid.len() - 1);
    }
}

/// Photon-energy binning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSpec {
    pub bins: usize,
    pub min_mev: f64,
    pub max_mev: f64,
    pub scale: BinScale,
}

impl Default for SpectrumSpec {
    fn default() -> Self {
        SpectrumSpec {
            bins: 400,
            min_mev: 0.0,
            max_mev: 8000.0,
            scale: BinScale::Linear,
        }
    }
}

impl SpectrumSpec {
    pub fn edges(&self) -> Result<Vec<f64>> {
        if self.bins == 0 {
            return Err(Error::invalid("spectrum_bins", "must be >= 1"));
        }
        if !(self.max_mev > self.min_mev) || !self.max_mev.is_finite() || !(self.min_mev >= 0.0) {
            return Err(Error::invalid(
                "spectrum_max_MeV",
                format!("need 0 <= min < max, got [{}, {}]", self.min_mev, self.max_mev),
            ));
        }
        let n = self.bins;
        Ok(match self.scale {
            BinScale::Linear => (0..=n)
                .map(|i| self.min_mev + (self.max_mev - self.min_mev) * i as f64 / n as f64)
                .collect(),
            BinScale::Log => {
                if self.min_mev <= 0.0 {
                    return Err(Error::invalid("spectrum_min_MeV", "log binning needs min > 0"));
                }
                let (a, b) = (self.min_mev.ln(), self.max_mev.ln());
                (0..=n).map(|i| (a + (b - a) * i as f64 / n as f64).exp()).collect()
            }
        })
    }
}

/// Per-electron differential emitted energy dE/dω.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumHist {
    pub edges: Vec<f64>,
    pub de_domega: Vec<f64>,
    pub counts: Vec<u64>,
    pub n_electrons: usize,
    pub underflow_count: u64,
    pub underflow_energy: f64,
    pub overflow_count: u64,
    pub overflow_energy: f64,
}

impl SpectrumHist {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// ∫ dE/dω dω over the binned range (MeV per electron).
    pub fn integral(&self) -> f64 {
        self.edges
            .windows(2)
            .zip(&self.de_domega)
            .map(|(w, v)| v * (w[1] - w[0]))
            .sum()
    }

    pub fn write_csv<W: Write>(&self, mut out: W, echo: &[(String, String)]) -> Result<()> {
        for (k, v) in echo {
            writeln!(out, "# {k} = {v}")?;
        }
        writeln!(out, "# underflow_count = {}", self.underflow_count)?;
        writeln!(out, "# underflow_energy_MeV_per_electron = {}", self.per_electron(self.underflow_energy))?;
        writeln!(out, "# overflow_count = {}", self.overflow_count)?;
        writeln!(out, "# overflow_energy_MeV_per_electron = {}", self.per_electron(self.overflow_energy))?;
        writeln!(out, "omega_MeV,dE_domega")?;
        for (c, v) in self.centers().iter().zip(&self.de_domega) {
            writeln!(out, "{c},{v}")?;
        }
        Ok(())
    }

    fn per_electron(&self, e: f64) -> f64 {
        if self.n_electrons == 0 {
            0.0
        } else {
            e / self.n_electrons as f64
        }
    }
}

/// dE/dω[bin] = Σ ω·weight / (n_electrons · width); photons outside the
/// binned range go to explicit under/overflow buckets.
pub fn accumulate_spectrum<'a, I>(records: I, spec: &SpectrumSpec, n_electrons: usize) -> Result<SpectrumHist>
where
    I: IntoIterator<Item = (&'a PhotonRecord, f64)>,
{
    if n_electrons == 0 {
        return Err(Error::invalid("n_electrons", "must be >= 1"));
    }
    let edges = spec.edges()?;
    let n = spec.bins;
    let mut energy = vec![0.0; n];
    let mut counts = vec![0u64; n];
    let mut hist = SpectrumHist {
        edges,
        de_domega: Vec::new(),
        counts: Vec::new(),
        n_electrons,
        underflow_count: 0,
        underflow_energy: 0.0,
        overflow_count: 0,
        overflow_energy: 0.0,
    };
    for (r, weight) in records {
        let w = r.energy * weight;
        if r.energy < spec.min_mev {
            hist.underflow_count += 1;
            hist.underflow_energy += w;
            continue;
        }
        if r.energy >= spec.max_mev {
            hist.overflow_count += 1;
            hist.overflow_energy += w;
            continue;
        }
        let b = match spec.scale {
            BinScale::Linear => ((r.energy - spec.min_mev) / (spec.max_mev - spec.min_mev) * n as f64) as usize,
            BinScale::Log => {
                ((r.energy / spec.min_mev).ln() / (spec.max_mev / spec.min_mev).ln() * n as f64) as usize
            }
        };
        // guard against rounding at bin edges
        let mut b = b.min(n - 1);
        while b > 0 && r.energy < hist.edges[b] {
            b -= 1;
        }
        while b + 1 < n && r.energy >= hist.edges[b + 1] {
            b += 1;
        }
        energy[b] += w;
        counts[b] += 1;
    }
    hist.de_domega = energy
        .iter()
        .zip(hist.edges.windows(2))
        .map(|(e, w)| e / (n_electrons as f64 * (w[1] - w[0])))
        .collect();
    hist.counts = counts;
    Ok(hist)
}

/// Scalar results of an ensemble run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub n_electrons: usize,
    pub seed: u64,
    /// Σ photon energies / n_electrons (MeV).
    pub mean_emitted_energy: f64,
    pub mean_emitted_energy_stderr: f64,
    pub mean_photon_count: f64,
    pub mean_photon_count_stderr: f64,
    pub pair_count: u64,
    pub chi_clamped_count: u64,
    pub max_step_probability: f64,
    /// Filled in by the caller when the pulse energy is known (J).
    pub pulse_energy: Option<f64>,
}

/// Inputs of an ensemble run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    pub beam: BeamParams,
    pub settings: McSettings,
    pub spectrum: SpectrumSpec,
    pub seed: u64,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
    pub keep_photons: bool,
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub spectrum: SpectrumHist,
    pub summary: RunSummary,
    /// All photons in electron order when `keep_photons` was set.
    pub photons: Option<Vec<PhotonRecord>>,
}

/// Random streams for electron `index`: emission and pair conversion.
pub fn electron_streams(seed: u64, index: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut a = ChaCha8Rng::seed_from_u64(seed);
    a.set_stream(2 * index);
    let mut b = ChaCha8Rng::seed_from_u64(seed);
    b.set_stream(2 * index + 1);
    (a, b)
}

/// Initial energy (GeV) from a Gaussian truncated at ±5σ.
pub fn sample_beam_energy<R: Rng>(beam: &BeamParams, rng: &mut R) -> Result<f64> {
    let (mu, sigma) = (beam.mean_energy_gev(), beam.sigma_energy_gev());
    if sigma == 0.0 {
        return Ok(mu);
    }
    let normal = Normal::new(mu, sigma).map_err(|e| Error::invalid("beam_sigma_GeV", e.to_string()))?;
    loop {
        let e = normal.sample(rng);
        if (e - mu).abs() <= 5.0 * sigma {
            return Ok(e);
        }
    }
}

fn run_one(
    field: &McField<'_>,
    table: &RateTable,
    cfg: &EnsembleConfig,
    index: usize,
) -> Result<Trajectory> {
    let (mut em, mut bw) = electron_streams(cfg.seed, index as u64);
    let energy = sample_beam_energy(&cfg.beam, &mut em)?;
    let initial = ElectronState::from_energy_gev(energy, field.grid.phi_min())?;
    let pairs = if cfg.settings.breit_wheeler { Some(&mut bw) } else { None };
    simulate_electron(field, table, &cfg.settings, initial, &mut em, pairs)
}

/// Run the ensemble; results do not depend on the worker count.
pub fn run_ensemble(grid: &FieldGrid, table: &RateTable, cfg: &EnsembleConfig) -> Result<EnsembleResult> {
    cfg.settings.validate()?;
    cfg.spectrum.edges()?;
    let field = McField::new(grid);
    let n = cfg.beam.n_electrons();
    let work = || -> Result<Vec<Trajectory>> {
        (0..n)
            .into_par_iter()
            .map(|i| run_one(&field, table, cfg, i))
            .collect()
    };
    let trajectories = if cfg.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::invalid("workers", e.to_string()))?
            .install(work)?
    } else {
        work()?
    };
    summarize(&trajectories, cfg)
}

fn summarize(trajectories: &[Trajectory], cfg: &EnsembleConfig) -> Result<EnsembleResult> {
    let n = trajectories.len();
    let nf = n as f64;
    let mut total_energy = 0.0;
    let mut total_count = 0.0;
    let mut pairs = 0;
    let mut clamped = 0;
    let mut max_p = 0.0f64;
    for t in trajectories {
        for p in &t.photons {
            total_energy += p.energy;
        }
        total_count += t.photons.len() as f64;
        pairs += t.pairs;
        clamped += t.chi_clamped;
        max_p = max_p.max(t.max_step_probability);
    }
    let mean_e = total_energy / nf;
    let mean_n = total_count / nf;
    let (mut var_e, mut var_n) = (0.0, 0.0);
    for t in trajectories {
        let de = t.emitted_energy() - mean_e;
        let dn = t.photons.len() as f64 - mean_n;
        var_e += de * de;
        var_n += dn * dn;
    }
    let stderr = |v: f64| if n > 1 { (v / (nf - 1.0) / nf).sqrt() } else { 0.0 };
    let spectrum = accumulate_spectrum(
        trajectories
            .iter()
            .flat_map(|t| t.photons.iter())
            .filter(|p| !p.converted)
            .map(|p| (p, 1.0)),
        &cfg.spectrum,
        n,
    )?;
    let photons = cfg
        .keep_photons
        .then(|| trajectories.iter().flat_map(|t| t.photons.iter().copied()).collect());
    Ok(EnsembleResult {
        spectrum,
        summary: RunSummary {
            n_electrons: n,
            seed: cfg.seed,
            mean_emitted_energy: mean_e,
            mean_emitted_energy_stderr: stderr(var_e),
            mean_photon_count: mean_n,
            mean_photon_count_stderr: stderr(var_n),
            pair_count: pairs,
            chi_clamped_count: clamped,
            max_step_probability: max_p,
            pulse_energy: None,
        },
        photons,
    })
}

/// CSV `energy_MeV,emission_phi,parent_chi` of the given photons.
pub fn write_photons_csv<W: Write>(mut out: W, photons: &[PhotonRecord], echo: &[(String, String)]) -> Result<()> {
    for (k, v) in echo {
        writeln!(out, "# {k} = {v}")?;
    }
    writeln!(out, "energy_MeV,emission_phi,parent_chi")?;
    for p in photons {
        writeln!(out, "{},{},{}", p.energy, p.emission_phi, p.parent_chi)?;
    }
    Ok(())
}
