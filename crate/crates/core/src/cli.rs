//! Command-line workflows: `simulate`, `rho-scan` and `field-dump`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::{RhoLattice, RunConfig, ARTIFACT_VERSION};
use crate::error::{Error, Result};
use crate::field::{pulse_energy, synthesize_field, FieldGrid};
use crate::lcfa::RateTable;
use crate::mc::{run_ensemble, write_photons_csv, EnsembleConfig, EnsembleResult};
use crate::rho::RhoMethod;
use crate::units::chi0;

pub const SPECTRUM_FILE: &str = "spectrum.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const PHOTONS_FILE: &str = "photons.csv";
pub const RATE_TABLE_FILE: &str = "rate_table.csv";
pub const FIELD_FILE: &str = "field.csv";
pub const RHO_SCAN_FILE: &str = "rho_scan.csv";

#[derive(Debug, Parser)]
#[command(name = "squeezed-compton", version, about = "Nonlinear Compton emission in squeezed laser pulses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the Monte Carlo and write the spectrum and summary.
    Simulate(CommonArgs),
    /// Evaluate the peak-field factor on the configured lattice.
    RhoScan(CommonArgs),
    /// Write the synthesized field on its phase grid.
    FieldDump(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Configuration file (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Override the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

impl CommonArgs {
    pub fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg = cfg.with_seed(seed);
        }
        if let Some(out) = &self.out {
            cfg = cfg.with_output_dir(out.clone());
        }
        Ok(cfg)
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Runs `f` on a pool of `workers` threads, or the global pool when 0.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if workers == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?
        .install(f)
}

/// Everything `simulate` computes, before it is written out.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub grid: FieldGrid,
    pub table: RateTable,
    pub pulse_energy: f64,
    pub result: EnsembleResult,
}

pub fn run_simulation(cfg: &RunConfig) -> Result<Simulation> {
    let grid = synthesize_field(&cfg.pulse, &cfg.squeeze, &cfg.field)?;
    let energy = pulse_energy(&grid, cfg.spot_radius_um, cfg.peak_intensity_w_cm2)?;
    let table = RateTable::build(cfg.u_floor)?;
    let ens = EnsembleConfig {
        beam: cfg.beam,
        settings: cfg.mc,
        spectrum: cfg.spectrum,
        seed: cfg.seed,
        workers: 0,
        keep_photons: cfg.write_photons,
    };
    let mut result = run_ensemble(&grid, &table, &ens)?;
    result.summary.pulse_energy = Some(energy);
    Ok(Simulation {
        grid,
        table,
        pulse_energy: energy,
        result,
    })
}

/// The summary document of a simulation.
pub fn summary_json(cfg: &RunConfig, sim: &Simulation) -> Result<serde_json::Value> {
    let s = &sim.result.summary;
    let h = &sim.result.spectrum;
    let info = sim.grid.info();
    let rho = if cfg.squeeze.is_squeezed() {
        let gt = cfg.squeeze.gamma() * cfg.pulse.tau();
        Some(RhoMethod::Quadrature.eval(cfg.squeeze.zeta0(), gt, cfg.squeeze.theta0())?.value)
    } else {
        None
    };
    Ok(json!({
        "version": ARTIFACT_VERSION,
        "config": cfg.file(),
        "pulse_energy_J": sim.pulse_energy,
        "chi0": chi0(&cfg.pulse, cfg.beam.mean_energy_gev())?,
        "rho_quadrature": rho,
        "field": {
            "phi_min": sim.grid.phi_min(),
            "phi_max": sim.grid.phi_max(),
            "phi_step": sim.grid.step(),
            "points": sim.grid.len(),
            "omega_window_eV": info.map(|i| i.omega_window),
            "quadrature_panels": info.map(|i| i.panels),
            "captured_energy_fraction": info.map(|i| i.captured_fraction),
            "edge_amplitude": sim.grid.edge_amplitude(),
        },
        "n_electrons": s.n_electrons,
        "seed": s.seed,
        "mean_emitted_energy_MeV": s.mean_emitted_energy,
        "mean_emitted_energy_stderr_MeV": s.mean_emitted_energy_stderr,
        "mean_photon_count": s.mean_photon_count,
        "mean_photon_count_stderr": s.mean_photon_count_stderr,
        "pair_count": s.pair_count,
        "chi_clamped_count": s.chi_clamped_count,
        "max_step_probability": s.max_step_probability,
        "spectrum_integral_MeV": h.integral(),
        "spectrum_underflow_count": h.underflow_count,
        "spectrum_underflow_energy_MeV": h.underflow_energy,
        "spectrum_overflow_count": h.overflow_count,
        "spectrum_overflow_energy_MeV": h.overflow_energy,
    }))
}

/// Runs `simulate` and writes its files; returns the paths written.
pub fn cmd_simulate(cfg: &RunConfig, workers: usize) -> Result<Vec<PathBuf>> {
    for w in cfg.pulse.soft_warnings() {
        eprintln!("warning: {w}");
    }
    let sim = with_workers(workers, || run_simulation(cfg))?;
    let echo = cfg.echo();
    let dir = &cfg.output_dir;
    let mut written = Vec::new();

    let mut out = create(dir, SPECTRUM_FILE)?;
    sim.result.spectrum.write_csv(&mut out, &echo)?;
    out.flush()?;
    written.push(dir.join(SPECTRUM_FILE));

    let mut out = create(dir, SUMMARY_FILE)?;
    serde_json::to_writer_pretty(&mut out, &summary_json(cfg, &sim)?)
        .map_err(|e| Error::Io(e.into()))?;
    writeln!(out)?;
    out.flush()?;
    written.push(dir.join(SUMMARY_FILE));

    if let Some(photons) = &sim.result.photons {
        let mut out = create(dir, PHOTONS_FILE)?;
        write_photons_csv(&mut out, photons, &echo)?;
        out.flush()?;
        written.push(dir.join(PHOTONS_FILE));
    }
    if cfg.write_rate_table {
        let mut out = create(dir, RATE_TABLE_FILE)?;
        sim.table.write_csv(&mut out, &echo)?;
        out.flush()?;
        written.push(dir.join(RATE_TABLE_FILE));
    }
    Ok(written)
}

/// One lattice point of a ρ scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoRow {
    pub zeta0: f64,
    pub gamma_tau: f64,
    pub theta0: f64,
    pub quadrature: f64,
    pub bessel: f64,
    pub asymptotic: f64,
    pub small_zeta: f64,
}

pub fn rho_scan_rows(lattice: &RhoLattice) -> Result<Vec<RhoRow>> {
    let mut rows = Vec::new();
    for &zeta0 in &lattice.zeta0 {
        for &gamma_tau in &lattice.gamma_tau {
            for &theta0 in &lattice.theta0 {
                let ev = |m: RhoMethod| m.eval(zeta0, gamma_tau, theta0).map(|r| r.value);
                rows.push(RhoRow {
                    zeta0,
                    gamma_tau,
                    theta0,
                    quadrature: ev(RhoMethod::Quadrature)?,
                    bessel: ev(RhoMethod::Bessel)?,
                    asymptotic: ev(RhoMethod::Asymptotic)?,
                    small_zeta: ev(RhoMethod::SmallZeta)?,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_rho_scan<W: Write>(mut out: W, rows: &[RhoRow], echo: &[(String, String)]) -> Result<()> {
    for (k, v) in echo {
        writeln!(out, "# {k} = {v}")?;
    }
    writeln!(out, "zeta0,gamma_tau,theta0,rho_quadrature,rho_bessel,rho_asymptotic,rho_small_zeta")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.zeta0, r.gamma_tau, r.theta0, r.quadrature, r.bessel, r.asymptotic, r.small_zeta
        )?;
    }
    Ok(())
}

pub fn cmd_rho_scan(cfg: &RunConfig) -> Result<PathBuf> {
    let rows = rho_scan_rows(&cfg.rho)?;
    let mut out = create(&cfg.output_dir, RHO_SCAN_FILE)?;
    write_rho_scan(&mut out, &rows, &cfg.echo())?;
    out.flush()?;
    Ok(cfg.output_dir.join(RHO_SCAN_FILE))
}

pub fn cmd_field_dump(cfg: &RunConfig, workers: usize) -> Result<PathBuf> {
    for w in cfg.pulse.soft_warnings() {
        eprintln!("warning: {w}");
    }
    let grid = with_workers(workers, || synthesize_field(&cfg.pulse, &cfg.squeeze, &cfg.field))?;
    let mut out = create(&cfg.output_dir, FIELD_FILE)?;
    grid.write_csv(&mut out, &cfg.echo(), cfg.dump_range)?;
    out.flush()?;
    Ok(cfg.output_dir.join(FIELD_FILE))
}

/// Runs the parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Simulate(a) => a.load().and_then(|c| cmd_simulate(&c, a.workers)),
        Command::RhoScan(a) => a.load().and_then(|c| cmd_rho_scan(&c).map(|p| vec![p])),
        Command::FieldDump(a) => a.load().and_then(|c| cmd_field_dump(&c, a.workers).map(|p| vec![p])),
    };
    match outcome {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.kind().exit_code()
        }
    }
}
