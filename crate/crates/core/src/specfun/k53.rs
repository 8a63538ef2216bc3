//! The synchrotron tail integral ∫ₓ^∞ K_{5/3}(y) dy.
//!
//! Exchanging the order of integration in K_ν(y) = ∫₀^∞ e^{−y cosh t} cosh νt dt
//! gives
//!
//! ```text
//! ∫ₓ^∞ K_{5/3}(y) dy = e^{−x} ∫₀^∞ e^{−x (cosh t − 1)} cosh(5t/3) / cosh t dt
//! ```
//!
//! whose integrand is analytic in the strip |Im t| < π/2, so the trapezoid
//! rule converges geometrically.

use std::sync::OnceLock;

use super::bessel::K_UNDERFLOW;
use super::interp::Pchip;
use crate::error::{Error, Result};

/// lim_{x→0} x^{2/3} ∫ₓ^∞ K_{5/3} = (3/4) 2^{5/3} Γ(5/3).
pub const K53_TAIL_SMALL_X_COEFF: f64 = 2.149_528_241_534_48;

/// ∫ₓ^∞ K_{5/3}(y) dy by direct quadrature.
pub fn bessel_k53_tail(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(Error::Domain {
            function: "bessel_k53_tail",
            x,
            reason: "x must be > 0",
        });
    }
    if x > K_UNDERFLOW {
        return Ok(0.0);
    }
    Ok(tail_direct(x))
}

fn tail_direct(x: f64) -> f64 {
    let h = 0.25f64.min(0.5 / x.sqrt());
    let integrand = |t: f64| {
        let c = t.cosh();
        // cosh t − 1 = 2 sinh²(t/2), accurate near t = 0
        let s = (0.5 * t).sinh();
        (-2.0 * x * s * s).exp() * (5.0 * t / 3.0).cosh() / c
    };
    let mut sum = 0.5 * integrand(0.0);
    let mut peak = sum;
    let mut k = 1usize;
    loop {
        let t = k as f64 * h;
        let v = integrand(t);
        sum += v;
        peak = peak.max(v);
        if v < 1e-18 * peak && x * (t.cosh() - 1.0) > 1.0 {
            break;
        }
        k += 1;
    }
    (-x).exp() * sum * h
}

/// Interpolation table for the tail in (ln x, ln tail + x).
#[derive(Debug, Clone)]
pub struct K53TailTable {
    interp: Pchip,
}

impl K53TailTable {
    pub const X_MIN: f64 = 1e-12;
    pub const POINTS: usize = 8193;

    pub fn build() -> Self {
        let lo = Self::X_MIN.ln();
        let hi = K_UNDERFLOW.ln();
        let h = (hi - lo) / (Self::POINTS - 1) as f64;
        let y = (0..Self::POINTS)
            .map(|i| {
                let x = (lo + h * i as f64).exp();
                tail_direct(x).ln() + x
            })
            .collect();
        K53TailTable {
            interp: Pchip::uniform(lo, h, y),
        }
    }

    /// Shared process-wide table.
    pub fn global() -> &'static K53TailTable {
        static TABLE: OnceLock<K53TailTable> = OnceLock::new();
        TABLE.get_or_init(K53TailTable::build)
    }

    /// Tail value; x ≤ 0 is the caller's responsibility.
    pub fn eval(&self, x: f64) -> f64 {
        if x < Self::X_MIN {
            let at_min = (self.interp.eval(self.interp.x_min()) - Self::X_MIN).exp();
            return at_min * (x / Self::X_MIN).powf(-2.0 / 3.0);
        }
        if x > K_UNDERFLOW {
            return 0.0;
        }
        (self.interp.eval(x.ln()) - x).exp()
    }
}
