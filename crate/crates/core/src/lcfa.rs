//! Locally-constant-field emission (nonlinear Compton) and pair-production
//! (nonlinear Breit–Wheeler) probabilities.
//!
//! Photon emission:
//!
//! ```text
//! d²P/(dϕ du) = α/(√3 π η) F(χ, u)
//! F(χ, u)     = ∫_z^∞ K_{5/3} + u²/(1−u) K_{2/3}(z),   z = 2u / (3χ(1−u))
//! ```
//!
//! All u-integrals are done in the variable s with z = s³, where
//! u = 3χz/(2 + 3χz). The integrand is then finite at s = 0, and the
//! Bessel parts depend on s only, so one set of Bessel evaluations serves
//! every χ.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::specfun::bessel::{k23_k53, k_third_pair};
use crate::specfun::interp::Pchip;
use crate::specfun::k53::K53TailTable;
use crate::specfun::quad::{integrate, GaussLegendre};
use crate::units::ALPHA;

/// Tabulated χ range.
pub const CHI_MIN: f64 = 1e-5;
pub const CHI_MAX: f64 = 20.0;
/// Default lower cutoff on sampled u.
pub const DEFAULT_U_FLOOR: f64 = 1e-7;

const CHI_POINTS: usize = 512;
const QUANTILE_CELLS: usize = 1024;
const FAST_POINTS: usize = 4001;
const S_MAX: f64 = 8.9;
const S_PANELS: usize = 2048;
const S_ORDER: usize = 4;

const BW_CHI_MIN: f64 = 1e-2;
const BW_POINTS: usize = 256;

/// Prefactor α/(√3 π).
pub const RATE_PREFACTOR: f64 = ALPHA / (1.732_050_807_568_877_2 * PI);

/// F(χ, u).
pub fn compton_spectral_density(chi: f64, u: f64) -> Result<f64> {
    if !(chi > 0.0) || !chi.is_finite() {
        return Err(Error::Domain {
            function: "compton_spectral_density",
            x: chi,
            reason: "chi must be > 0",
        });
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain {
            function: "compton_spectral_density",
            x: u,
            reason: "u must lie in (0, 1)",
        });
    }
    let z = 2.0 * u / (3.0 * chi * (1.0 - u));
    let (k23, _) = k23_k53(z);
    Ok(K53TailTable::global().eval(z) + u * u / (1.0 - u) * k23)
}

/// Fixed quadrature in s with the χ-independent Bessel factors cached.
struct SGrid {
    s: Vec<f64>,
    z: Vec<f64>,
    /// 3s² times the quadrature weight
    w: Vec<f64>,
    tail: Vec<f64>,
    k23: Vec<f64>,
}

impl SGrid {
    fn global() -> &'static SGrid {
        static GRID: OnceLock<SGrid> = OnceLock::new();
        GRID.get_or_init(|| {
            let gl = GaussLegendre::new(S_ORDER);
            let pts = gl.composite(0.0, S_MAX, S_PANELS);
            let table = K53TailTable::global();
            let mut g = SGrid {
                s: Vec::with_capacity(pts.len()),
                z: Vec::with_capacity(pts.len()),
                w: Vec::with_capacity(pts.len()),
                tail: Vec::with_capacity(pts.len()),
                k23: Vec::with_capacity(pts.len()),
            };
            for (s, wt) in pts {
                let z = s * s * s;
                g.s.push(s);
                g.z.push(z);
                g.w.push(3.0 * s * s * wt);
                g.tail.push(table.eval(z));
                g.k23.push(k_third_pair(z.min(705.0)).1);
            }
            g
        })
    }

    /// Integrand F(χ, u(z)) du/dz at node j, and u there.
    #[inline]
    fn density(&self, chi: f64, j: usize) -> (f64, f64) {
        let z = self.z[j];
        let d = 2.0 + 3.0 * chi * z;
        let u = 3.0 * chi * z / d;
        let ratio = 9.0 * chi * chi * z * z / (2.0 * d);
        let f = self.tail[j] + ratio * self.k23[j];
        (f * 6.0 * chi / (d * d), u)
    }

    /// (∫F du, ∫uF du).
    fn moments(&self, chi: f64) -> (f64, f64) {
        let mut r = 0.0;
        let mut m = 0.0;
        for j in 0..self.z.len() {
            let (d, u) = self.density(chi, j);
            r += self.w[j] * d;
            m += self.w[j] * d * u;
        }
        (r, m)
    }

    /// Normalized CDF at panel edges s_p = p·S_MAX/S_PANELS.
    fn panel_cdf(&self, chi: f64) -> Vec<f64> {
        let mut c = Vec::with_capacity(S_PANELS + 1);
        c.push(0.0);
        let mut acc = 0.0;
        for p in 0..S_PANELS {
            for j in p * S_ORDER..(p + 1) * S_ORDER {
                acc += self.w[j] * self.density(chi, j).0;
            }
            c.push(acc);
        }
        for v in c.iter_mut() {
            *v /= acc;
        }
        c
    }
}

/// ∫₀¹ F(χ, u) du by the fixed s-quadrature.
pub fn total_rate_direct(chi: f64) -> f64 {
    if chi <= 0.0 {
        return 0.0;
    }
    SGrid::global().moments(chi).0
}

/// ⟨u⟩ = ∫uF du / ∫F du.
pub fn mean_photon_fraction(chi: f64) -> f64 {
    let (r, m) = SGrid::global().moments(chi);
    m / r
}

/// Quantum-to-classical radiated power ratio ∫uF du / (2πχ²/√3).
pub fn gaunt_factor(chi: f64) -> f64 {
    let (_, m) = SGrid::global().moments(chi);
    m / (2.0 * PI * chi * chi / 3f64.sqrt())
}

/// Pair-production bracket
/// T(χ_γ) = ∫₀¹ dv [K_{2/3}(z)/(v(1−v)) − ∫_z^∞ K_{5/3}],  z = 2/(3χ_γ v(1−v)).
///
/// The rate per unit phase is α/(√3 π η_γ) T(χ_γ).
pub fn breit_wheeler_bracket_direct(chi_gamma: f64) -> Result<f64> {
    if !(chi_gamma >= 0.0) || !chi_gamma.is_finite() {
        return Err(Error::Domain {
            function: "breit_wheeler_total_rate",
            x: chi_gamma,
            reason: "chi_gamma must be >= 0",
        });
    }
    if chi_gamma == 0.0 {
        return Ok(0.0);
    }
    if 8.0 / (3.0 * chi_gamma) > 700.0 {
        return Ok(0.0);
    }
    let table = K53TailTable::global();
    let integrand = |v: f64| {
        let p = v * (1.0 - v);
        if p <= 0.0 {
            return 0.0;
        }
        let z = 2.0 / (3.0 * chi_gamma * p);
        if z > 705.0 {
            return 0.0;
        }
        k23_k53(z).0 / p - table.eval(z)
    };
    let r = integrate(integrand, 0.0, 0.5, &[], 0.0, 1e-10)?;
    Ok(2.0 * r.value)
}

/// Small-χ_γ asymptote (9π/(16√2)) χ_γ e^{−8/(3χ_γ)}.
pub fn breit_wheeler_bracket_asymptotic(chi_gamma: f64) -> f64 {
    if chi_gamma <= 0.0 {
        return 0.0;
    }
    9.0 * PI / (16.0 * 2f64.sqrt()) * chi_gamma * (-8.0 / (3.0 * chi_gamma)).exp()
}

/// Emission tables over χ ∈ [10⁻⁵, 20].
#[derive(Debug, Clone)]
pub struct RateTable {
    ln_chi_min: f64,
    ln_chi_step: f64,
    chi_grid: Vec<f64>,
    total_rate: Vec<f64>,
    /// ln(R/χ) against ln χ
    rate_interp: Pchip,
    /// u^{1/3} at w_k = k/QUANTILE_CELLS, q = 1 − (1 − w)⁴; one row per χ
    inv_cdf: Vec<f64>,
    /// R/χ on χ = k·CHI_MAX/(FAST_POINTS − 1)
    fast: Vec<f64>,
    fast_step: f64,
    fast_inv_step: f64,
    /// ln T + 8/(3χ) against ln χ
    bw_interp: Pchip,
    u_floor: f64,
}

impl RateTable {
    pub fn build(u_floor: f64) -> Result<Self> {
        if !(u_floor > 0.0 && u_floor < 1e-3) {
            return Err(Error::invalid("u_floor", format!("must lie in (0, 1e-3), got {u_floor}")));
        }
        let grid = SGrid::global();
        let ln_min = CHI_MIN.ln();
        let ln_step = (CHI_MAX.ln() - ln_min) / (CHI_POINTS - 1) as f64;
        let chi_grid: Vec<f64> = (0..CHI_POINTS).map(|i| (ln_min + ln_step * i as f64).exp()).collect();
        let total_rate: Vec<f64> = chi_grid.iter().map(|&c| grid.moments(c).0).collect();
        let rate_interp = Pchip::uniform(
            ln_min,
            ln_step,
            chi_grid.iter().zip(&total_rate).map(|(c, r)| (r / c).ln()).collect(),
        );

        let h_s = S_MAX / S_PANELS as f64;
        let mut inv_cdf = Vec::with_capacity(CHI_POINTS * (QUANTILE_CELLS + 1));
        for &chi in &chi_grid {
            let cdf = grid.panel_cdf(chi);
            let mut p = 0usize;
            for k in 0..=QUANTILE_CELLS {
                if k == QUANTILE_CELLS {
                    inv_cdf.push(1.0);
                    break;
                }
                let w = k as f64 / QUANTILE_CELLS as f64;
                let q = 1.0 - (1.0 - w).powi(4);
                while p + 1 < S_PANELS && cdf[p + 1] <= q {
                    p += 1;
                }
                let span = cdf[p + 1] - cdf[p];
                let frac = if span > 0.0 { ((q - cdf[p]) / span).clamp(0.0, 1.0) } else { 0.0 };
                let s = h_s * (p as f64 + frac);
                let z = s * s * s;
                let u = 3.0 * chi * z / (2.0 + 3.0 * chi * z);
                inv_cdf.push(u.cbrt());
            }
        }

        let fast_step = CHI_MAX / (FAST_POINTS - 1) as f64;
        let fast = (0..FAST_POINTS)
            .map(|k| {
                let chi = if k == 0 { 1e-12 } else { k as f64 * fast_step };
                grid.moments(chi).0 / chi
            })
            .collect();

        let bw_ln_min = BW_CHI_MIN.ln();
        let bw_step = (CHI_MAX.ln() - bw_ln_min) / (BW_POINTS - 1) as f64;
        let mut bw = Vec::with_capacity(BW_POINTS);
        for i in 0..BW_POINTS {
            let chi = (bw_ln_min + bw_step * i as f64).exp();
            let t = breit_wheeler_bracket_direct(chi)?;
            bw.push(t.ln() + 8.0 / (3.0 * chi));
        }
        let table = RateTable {
            ln_chi_min: ln_min,
            ln_chi_step: ln_step,
            chi_grid,
            total_rate,
            rate_interp,
            inv_cdf,
            fast,
            fast_step,
            fast_inv_step: 1.0 / fast_step,
            bw_interp: Pchip::uniform(bw_ln_min, bw_step, bw),
            u_floor,
        };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        if !self.total_rate.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::NoConvergence {
                what: "rate table",
                detail: "total rate not strictly increasing in chi".into(),
            });
        }
        for row in self.inv_cdf.chunks(QUANTILE_CELLS + 1) {
            if !row.windows(2).all(|w| w[1] > w[0]) {
                return Err(Error::NoConvergence {
                    what: "rate table",
                    detail: "inverse CDF row not strictly increasing".into(),
                });
            }
        }
        Ok(())
    }

    pub fn u_floor(&self) -> f64 {
        self.u_floor
    }

    pub fn chi_grid(&self) -> &[f64] {
        &self.chi_grid
    }

    pub fn total_rate_grid(&self) -> &[f64] {
        &self.total_rate
    }

    /// Number of quantile cells per inverse-CDF row.
    pub fn quantile_cells(&self) -> usize {
        QUANTILE_CELLS
    }

    /// Inverse-CDF row at grid index `i`, as u values.
    pub fn inv_cdf_row(&self, i: usize) -> Vec<f64> {
        let n = QUANTILE_CELLS + 1;
        self.inv_cdf[i * n..(i + 1) * n].iter().map(|t| t * t * t).collect()
    }

    /// Whether χ lies inside the tabulated range (below it the small-χ
    /// scaling is exact to leading order).
    pub fn in_range(&self, chi: f64) -> bool {
        chi <= CHI_MAX
    }

    /// R(χ) = ∫₀¹ F du, interpolated; linear below χ = 10⁻⁵, clamped above 20.
    pub fn total_rate(&self, chi: f64) -> f64 {
        if chi <= 0.0 {
            return 0.0;
        }
        let c = chi.min(CHI_MAX);
        let lc = c.ln().max(self.ln_chi_min);
        chi.min(CHI_MAX) * self.rate_interp.eval(lc).exp()
    }

    /// R(χ) from the uniform table (hot path; no logarithm).
    #[inline]
    pub fn total_rate_fast(&self, chi: f64) -> f64 {
        let c = chi.clamp(0.0, CHI_MAX);
        let t = c / self.fast_step;
        let i = (t as usize).min(FAST_POINTS - 2);
        let f = t - i as f64;
        c * (self.fast[i] + f * (self.fast[i + 1] - self.fast[i]))
    }

    /// R(χ)/χ from the uniform table.
    #[inline]
    pub fn rate_over_chi_fast(&self, chi: f64) -> f64 {
        let t = chi.clamp(0.0, CHI_MAX) * self.fast_inv_step;
        let i = (t as usize).min(FAST_POINTS - 2);
        let f = t - i as f64;
        self.fast[i] + f * (self.fast[i + 1] - self.fast[i])
    }

    /// Emission probability per unit phase for an electron with parameter η.
    #[inline]
    pub fn emission_rate(&self, chi: f64, eta: f64) -> f64 {
        RATE_PREFACTOR / eta * self.total_rate_fast(chi)
    }

    /// Inverse-CDF draw of u for uniform `q` ∈ [0, 1).
    pub fn sample(&self, chi: f64, q: f64) -> f64 {
        if chi <= 0.0 {
            return self.u_floor;
        }
        let q = q.clamp(0.0, 1.0);
        let w = 1.0 - (1.0 - q).sqrt().sqrt();
        let tw = w * QUANTILE_CELLS as f64;
        let k = (tw as usize).min(QUANTILE_CELLS - 1);
        let fw = tw - k as f64;

        let c = chi.min(CHI_MAX);
        let (lc, scale) = if c < CHI_MIN {
            (self.ln_chi_min, c / CHI_MIN)
        } else {
            (c.ln(), 1.0)
        };
        let tc = (lc - self.ln_chi_min) / self.ln_chi_step;
        let i = (tc.max(0.0) as usize).min(CHI_POINTS - 2);
        let fc = (tc - i as f64).clamp(0.0, 1.0);
        let n = QUANTILE_CELLS + 1;
        let at = |row: usize| {
            let r = &self.inv_cdf[row * n..];
            r[k] + fw * (r[k + 1] - r[k])
        };
        let t = at(i) + fc * (at(i + 1) - at(i));
        let u = t * t * t * scale;
        u.max(self.u_floor).min(1.0 - f64::EPSILON)
    }

    /// Pair-production bracket T(χ_γ) from the table; asymptotic below 0.01.
    pub fn breit_wheeler_bracket(&self, chi_gamma: f64) -> f64 {
        if chi_gamma <= 0.0 {
            return 0.0;
        }
        if chi_gamma < BW_CHI_MIN {
            return breit_wheeler_bracket_asymptotic(chi_gamma);
        }
        let c = chi_gamma.min(CHI_MAX);
        (self.bw_interp.eval(c.ln()) - 8.0 / (3.0 * c)).exp()
    }

    /// Pair-production probability per unit phase for a photon with η_γ.
    pub fn breit_wheeler_rate(&self, chi_gamma: f64, eta_gamma: f64) -> f64 {
        if eta_gamma <= 0.0 {
            return 0.0;
        }
        RATE_PREFACTOR / eta_gamma * self.breit_wheeler_bracket(chi_gamma)
    }

    /// CSV `chi,total_rate` over the χ grid, preceded by `# key = value` lines.
    pub fn write_csv<W: Write>(&self, mut out: W, echo: &[(String, String)]) -> Result<()> {
        for (k, v) in echo {
            writeln!(out, "# {k} = {v}")?;
        }
        writeln!(out, "chi,total_rate")?;
        for (c, r) in self.chi_grid.iter().zip(&self.total_rate) {
            writeln!(out, "{c},{r}")?;
        }
        Ok(())
    }
}
