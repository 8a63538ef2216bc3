mod common;

use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use squeezed_compton::field::{synthesize_field, FieldGrid, FieldRequest};
use squeezed_compton::lcfa::{RateTable, DEFAULT_U_FLOOR, RATE_PREFACTOR};
use squeezed_compton::mc::{
    accumulate_spectrum, electron_streams, run_ensemble, sample_beam_energy, simulate_electron, BinScale,
    ElectronState, EnsembleConfig, EnsembleResult, McField, McSettings, PhotonRecord, SpectrumSpec,
};
use squeezed_compton::units::{eta_parameter, BeamParams, PulseParams, SqueezeParams};

fn table() -> &'static RateTable {
    static T: OnceLock<RateTable> = OnceLock::new();
    T.get_or_init(|| RateTable::build(DEFAULT_U_FLOOR).unwrap())
}

fn grid_for(xi0: f64) -> FieldGrid {
    let p = PulseParams::from_fwhm_fs(1.55, 40.0, xi0).unwrap();
    synthesize_field(&p, &SqueezeParams::none(), &FieldRequest::default()).unwrap()
}

fn default_grid() -> &'static FieldGrid {
    static G: OnceLock<FieldGrid> = OnceLock::new();
    G.get_or_init(|| grid_for(5.0))
}

fn config(n: usize, seed: u64, workers: usize) -> EnsembleConfig {
    EnsembleConfig {
        beam: BeamParams::new(5.0, 0.5, n).unwrap(),
        settings: McSettings::default(),
        spectrum: SpectrumSpec::default(),
        seed,
        workers,
        keep_photons: true,
    }
}

fn run(n: usize, seed: u64, workers: usize) -> EnsembleResult {
    run_ensemble(default_grid(), table(), &config(n, seed, workers)).unwrap()
}

fn one_electron(grid: &FieldGrid, energy_gev: f64, index: u64, settings: &McSettings) -> squeezed_compton::mc::Trajectory {
    let field = McField::new(grid);
    let (mut a, mut b) = electron_streams(99, index);
    let init = ElectronState::from_energy_gev(energy_gev, grid.phi_min()).unwrap();
    simulate_electron(&field, table(), settings, init, &mut a, Some(&mut b)).unwrap()
}

#[test]
fn zero_field_emits_nothing() {
    let g = grid_for(0.0);
    let t = one_electron(&g, 5.0, 0, &McSettings::default());
    assert!(t.photons.is_empty());
    assert_eq!(t.final_state.p_minus, t.initial.p_minus);
    let cfg = EnsembleConfig {
        beam: BeamParams::new(5.0, 0.0, 50).unwrap(),
        ..config(50, 1, 1)
    };
    let r = run_ensemble(&g, table(), &cfg).unwrap();
    assert_eq!(r.summary.mean_emitted_energy, 0.0);
    assert!(r.spectrum.de_domega.iter().all(|&v| v == 0.0));
}

#[test]
fn recoil_telescopes() {
    for i in 0..200 {
        let t = one_electron(default_grid(), 5.0, i, &McSettings::default());
        let lost = 0.5 * (t.initial.p_minus - t.final_state.p_minus);
        assert!((t.emitted_energy() - lost).abs() <= 1e-9 * t.initial.p_minus, "{i}");
        let mut p = t.initial.p_minus;
        for ph in &t.photons {
            assert!(ph.energy > 0.0 && ph.energy < 0.5 * p);
            p -= 2.0 * ph.energy;
            assert!(p > 0.0);
        }
        assert!(t.photons.windows(2).all(|w| w[1].emission_phi >= w[0].emission_phi));
        assert!(t.max_step_probability <= 0.01 + 1e-12);
    }
}

#[test]
fn initial_light_cone_momentum() {
    let e = ElectronState::from_energy_gev(5.0, -3.0).unwrap();
    assert_eq!(e.p_minus, 1e4);
    assert!(ElectronState::from_energy_gev(0.0, 0.0).is_err());
}

#[test]
fn weak_field_matches_rate_integral() {
    let g = grid_for(0.25);
    let energy = 5.0;
    let p_minus = 2e3 * energy;
    let eta = eta_parameter(p_minus, 1.55).unwrap();
    let h = g.step();
    let chi_max = g.xi_values().iter().fold(0.0f64, |m, v| m.max(v.abs())) * eta;
    // R/χ and ∫uF/χ² are smooth in χ; tabulate them on a fine uniform grid
    let n = 32;
    let node = |k: usize| chi_max * (k as f64).max(1e-3) / n as f64;
    let r0: Vec<f64> = (0..=n).map(|k| common::compton_rate(node(k)) / node(k)).collect();
    let r1: Vec<f64> = (0..=n).map(|k| common::compton_moment(node(k), 1) / node(k).powi(2)).collect();
    let interp = |t: &[f64], chi: f64| {
        let x = chi / chi_max * n as f64;
        let i = (x as usize).min(n - 1);
        t[i] + (x - i as f64) * (t[i + 1] - t[i])
    };
    let (mut count, mut emitted) = (0.0, 0.0);
    for &x in g.xi_values() {
        let chi = x.abs() * eta;
        count += RATE_PREFACTOR / eta * chi * interp(&r0, chi) * h;
        emitted += RATE_PREFACTOR / eta * chi * chi * interp(&r1, chi) * h * 0.5 * p_minus;
    }
    let cfg = EnsembleConfig {
        beam: BeamParams::new(energy, 0.0, 20_000).unwrap(),
        settings: McSettings {
            breit_wheeler: false,
            ..McSettings::default()
        },
        ..config(20_000, 5, 0)
    };
    let s = run_ensemble(&g, table(), &cfg).unwrap().summary;
    let dn = (s.mean_photon_count - count).abs();
    assert!(dn <= 4.0 * s.mean_photon_count_stderr + 5e-3 * count, "{} vs {count}", s.mean_photon_count);
    let de = (s.mean_emitted_energy - emitted).abs();
    assert!(de <= 4.0 * s.mean_emitted_energy_stderr + 5e-3 * emitted, "{} vs {emitted}", s.mean_emitted_energy);
}

#[test]
fn spectrum_integral_matches_mean_energy() {
    let r = run(2000, 3, 0);
    let h = &r.spectrum;
    let mean = r.summary.mean_emitted_energy;
    assert!((h.integral() / mean - 1.0).abs() < 5e-3, "{} vs {mean}", h.integral());
    let all = h.integral()
        + (h.underflow_energy + h.overflow_energy) / h.n_electrons as f64;
    let converted: f64 = r.photons.as_ref().unwrap().iter().filter(|p| p.converted).map(|p| p.energy).sum();
    assert!((all + converted / 2000.0 - mean).abs() <= 1e-9 * mean);
    assert!(h.de_domega.iter().all(|&v| v >= 0.0));
    assert_eq!(h.counts.iter().sum::<u64>() as usize + h.overflow_count as usize + h.underflow_count as usize,
        r.photons.as_ref().unwrap().iter().filter(|p| !p.converted).count());
}

#[test]
fn histogram_examples() {
    let rec = |e: f64| PhotonRecord {
        energy: e,
        emission_phi: 0.0,
        parent_chi: 0.1,
        converted: false,
    };
    let spec = SpectrumSpec {
        bins: 4,
        min_mev: 0.0,
        max_mev: 8.0,
        scale: BinScale::Linear,
    };
    let photons = [rec(1.0), rec(1.5), rec(2.0), rec(7.999), rec(8.0), rec(100.0)];
    let h = accumulate_spectrum(photons.iter().map(|p| (p, 1.0)), &spec, 2).unwrap();
    assert_eq!(h.counts, vec![2, 1, 0, 1]);
    assert_eq!(h.de_domega[0], 2.5 / 4.0);
    assert_eq!(h.de_domega[1], 2.0 / 4.0);
    assert_eq!(h.overflow_count, 2);
    assert_eq!(h.overflow_energy, 108.0);
    assert_eq!(h.centers(), vec![1.0, 3.0, 5.0, 7.0]);

    let log = SpectrumSpec {
        bins: 3,
        min_mev: 1.0,
        max_mev: 1000.0,
        scale: BinScale::Log,
    };
    let photons = [rec(0.5), rec(1.0), rec(10.0), rec(999.0)];
    let h = accumulate_spectrum(photons.iter().map(|p| (p, 2.0)), &log, 1).unwrap();
    assert_eq!(h.counts, vec![1, 1, 1]);
    assert_eq!(h.underflow_count, 1);
    assert_eq!(h.underflow_energy, 1.0);
    assert!((h.de_domega[1] - 20.0 / 90.0).abs() < 1e-12);
    let bad = SpectrumSpec { min_mev: 0.0, ..log };
    assert!(accumulate_spectrum(photons.iter().map(|p| (p, 1.0)), &bad, 1).is_err());
    assert!(accumulate_spectrum(photons.iter().map(|p| (p, 1.0)), &spec, 0).is_err());
}

#[test]
fn single_electron_is_deterministic() {
    let a = run(1, 11, 1);
    let b = run(1, 11, 1);
    assert_eq!(a.photons, b.photons);
    assert_eq!(a.spectrum, b.spectrum);
}

#[test]
fn worker_count_does_not_change_results() {
    let a = run(400, 17, 1);
    for w in [2, 8] {
        let b = run(400, 17, w);
        assert_eq!(a.photons, b.photons);
        assert_eq!(a.summary, b.summary);
        assert_eq!(a.spectrum, b.spectrum);
    }
    let c = run(400, 18, 1);
    assert_ne!(a.summary.mean_emitted_energy, c.summary.mean_emitted_energy);
}

#[test]
fn standard_error_scales_as_inverse_sqrt_n() {
    let e: Vec<f64> = [100, 1000, 10_000]
        .iter()
        .map(|&n| run(n, 23, 0).summary.mean_emitted_energy_stderr)
        .collect();
    for w in e.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio / 10f64.sqrt() - 1.0).abs() < 0.25, "{ratio}");
    }
}

#[test]
fn pair_conversion_is_rare_at_defaults() {
    let r = run(2000, 29, 0);
    let photons = r.photons.unwrap();
    let frac = r.summary.pair_count as f64 / photons.len() as f64;
    assert!(frac < 1e-3, "{frac}");
    assert_eq!(r.summary.pair_count as usize, photons.iter().filter(|p| p.converted).count());
}

#[test]
fn step_cap_is_respected_and_validated() {
    let fine = McSettings {
        max_step: 0.03,
        ..McSettings::default()
    };
    let t = one_electron(default_grid(), 5.0, 3, &fine);
    assert!(t.max_step_probability <= 0.01);
    let bad = McSettings {
        prob_cap: 0.2,
        ..McSettings::default()
    };
    let field = McField::new(default_grid());
    let (mut a, mut b) = electron_streams(1, 0);
    let init = ElectronState::from_energy_gev(5.0, 0.0).unwrap();
    assert!(simulate_electron(&field, table(), &bad, init, &mut a, Some(&mut b)).is_err());
    let mut cfg = config(10, 1, 1);
    cfg.spectrum.bins = 0;
    assert!(run_ensemble(default_grid(), table(), &cfg).is_err());
}

#[test]
fn beam_energy_sampling() {
    let beam = BeamParams::new(5.0, 0.5, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let xs: Vec<f64> = (0..20_000).map(|_| sample_beam_energy(&beam, &mut rng).unwrap()).collect();
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    assert!((mean - 5.0).abs() < 4.0 * 0.5 / (xs.len() as f64).sqrt());
    assert!((var.sqrt() / 0.5 - 1.0).abs() < 0.03);
    assert!(xs.iter().all(|x| (x - 5.0).abs() <= 2.5));
    let cold = BeamParams::new(5.0, 0.0, 1).unwrap();
    assert_eq!(sample_beam_energy(&cold, &mut rng).unwrap(), 5.0);
}

#[test]
fn streams_are_distinct() {
    use rand::Rng;
    let (mut a, mut b) = electron_streams(1, 0);
    let (mut c, _) = electron_streams(1, 1);
    let (x, y, z): (u64, u64, u64) = (a.random(), b.random(), c.random());
    assert!(x != y && x != z && y != z);
    let (mut a2, _) = electron_streams(1, 0);
    assert_eq!(a2.random::<u64>(), x);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn momentum_never_increases(index in 0u64..10_000, energy in 1.0f64..10.0) {
        let t = one_electron(default_grid(), energy, index, &McSettings::default());
        let mut p = t.initial.p_minus;
        for ph in &t.photons {
            let next = p - 2.0 * ph.energy;
            prop_assert!(next <= p && next > 0.0);
            p = next;
        }
        prop_assert!((p - t.final_state.p_minus).abs() <= 1e-9 * t.initial.p_minus);
    }
}
