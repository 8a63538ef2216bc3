//! Modified Bessel functions K_ν (ν = 1/3, 2/3, 5/3) and I_ν (ν = 0, 1).
//!
//! K_ν is evaluated by three regimes:
//!
//! | x              | method                                             |
//! |----------------|----------------------------------------------------|
//! | (0, 2]         | K_ν = π/(2 sin νπ) (I₋ν − I_ν), ascending series   |
//! | (2, 25)        | Steed's continued fraction (Temme's CF2) at μ = −1/3 |
//! | [25, 705]      | Hankel asymptotic expansion                        |
//! | > 705          | underflow, returns 0                               |
//!
//! K_{5/3} always comes from the upward recurrence
//! K_{5/3} = K_{1/3} + (4/3x) K_{2/3}, which is stable for K.
//!
//! I₀ and I₁ use the ascending series up to x = 30 and the asymptotic
//! expansion beyond, up to the overflow guard at x = 350.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Orders of K exposed by this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BesselOrder {
    OneThird,
    TwoThirds,
    FiveThirds,
}

impl BesselOrder {
    pub fn nu(self) -> f64 {
        match self {
            BesselOrder::OneThird => 1.0 / 3.0,
            BesselOrder::TwoThirds => 2.0 / 3.0,
            BesselOrder::FiveThirds => 5.0 / 3.0,
        }
    }

    pub const ALL: [BesselOrder; 3] = [
        BesselOrder::OneThird,
        BesselOrder::TwoThirds,
        BesselOrder::FiveThirds,
    ];
}

/// Orders of I exposed by this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BesselIOrder {
    Zero,
    One,
}

/// Upper end of the ascending-series regime for K.
pub const K_SERIES_MAX: f64 = 2.0;
/// Lower end of the asymptotic regime for K.
pub const K_ASYMPTOTIC_MIN: f64 = 25.0;
/// Beyond this K underflows and is returned as zero.
pub const K_UNDERFLOW: f64 = 705.0;
/// Crossover between series and asymptotic expansion for I.
pub const I_ASYMPTOTIC_MIN: f64 = 30.0;
/// Overflow guard for I.
pub const I_MAX_ARG: f64 = 350.0;

// Γ(4/3), Γ(2/3), Γ(5/3), Γ(1/3)
const GAMMA_4_3: f64 = 0.892_979_511_569_249_211_4;
const GAMMA_2_3: f64 = 1.354_117_939_426_400_416_9;
const GAMMA_5_3: f64 = 0.902_745_292_950_933_611_3;
const GAMMA_1_3: f64 = 2.678_938_534_707_747_633_6;

/// K_ν(x) for x > 0.
pub fn bessel_k(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(Error::Domain {
            function: "bessel_k",
            x,
            reason: "x must be > 0",
        });
    }
    if x > K_UNDERFLOW {
        return Ok(0.0);
    }
    let (k13, k23) = k_third_pair(x);
    Ok(match order {
        BesselOrder::OneThird => k13,
        BesselOrder::TwoThirds => k23,
        BesselOrder::FiveThirds => k13 + 4.0 / (3.0 * x) * k23,
    })
}

/// (K_{1/3}(x), K_{2/3}(x)) for 0 < x ≤ 705, without argument checks.
pub(crate) fn k_third_pair(x: f64) -> (f64, f64) {
    if x <= K_SERIES_MAX {
        (
            k_series(x, 1.0 / 3.0, GAMMA_4_3, GAMMA_2_3),
            k_series(x, 2.0 / 3.0, GAMMA_5_3, GAMMA_1_3),
        )
    } else if x < K_ASYMPTOTIC_MIN {
        steed_cf2(x, -1.0 / 3.0)
    } else {
        (k_asymptotic(x, 1.0 / 3.0), k_asymptotic(x, 2.0 / 3.0))
    }
}

/// K_{2/3}(x) and K_{5/3}(x) together; used by the emission rates.
pub(crate) fn k23_k53(x: f64) -> (f64, f64) {
    if x > K_UNDERFLOW {
        return (0.0, 0.0);
    }
    let (k13, k23) = k_third_pair(x);
    (k23, k13 + 4.0 / (3.0 * x) * k23)
}

/// Ascending series of I_{-ν} − I_ν. `g_plus` = Γ(1+ν), `g_minus` = Γ(1−ν).
fn k_series(x: f64, nu: f64, g_plus: f64, g_minus: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut t_minus = half.powf(-nu) / g_minus;
    let mut t_plus = half.powf(nu) / g_plus;
    let mut sum = t_minus - t_plus;
    for k in 1..200 {
        let kf = k as f64;
        t_minus *= q / (kf * (kf - nu));
        t_plus *= q / (kf * (kf + nu));
        let d = t_minus - t_plus;
        sum += d;
        if d.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    PI / (2.0 * (nu * PI).sin()) * sum
}

/// Steed's method for K_μ and K_{μ+1}, |μ| ≤ 1/2, x ≥ 2.
fn steed_cf2(x: f64, mu: f64) -> (f64, f64) {
    const EPS: f64 = 1e-16;
    let mu2 = mu * mu;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu2;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k_mu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
    (k_mu, k_mu1)
}

/// Hankel expansion √(π/2x) e^{−x} Σ a_k(ν)/x^k.
fn k_asymptotic(x: f64, nu: f64) -> f64 {
    let m = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = term * (m - odd * odd) / (kf * 8.0 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (PI / (2.0 * x)).sqrt() * (-x).exp() * sum
}

/// I_ν(x) for 0 ≤ x ≤ 350.
pub fn bessel_i(order: BesselIOrder, x: f64) -> Result<f64> {
    check_i_arg(x)?;
    Ok(bessel_i_scaled_unchecked(order, x) * x.exp())
}

/// e^{−x} I_ν(x) for 0 ≤ x ≤ 350; avoids overflow in combinations such as
/// e^{x/2}[I₀(x/2) ± I₁(x/2)].
pub fn bessel_i_scaled(order: BesselIOrder, x: f64) -> Result<f64> {
    check_i_arg(x)?;
    Ok(bessel_i_scaled_unchecked(order, x))
}

fn check_i_arg(x: f64) -> Result<()> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            function: "bessel_i",
            x,
            reason: "x must be >= 0",
        });
    }
    if x > I_MAX_ARG {
        return Err(Error::Domain {
            function: "bessel_i",
            x,
            reason: "x exceeds the overflow guard 350",
        });
    }
    Ok(())
}

fn bessel_i_scaled_unchecked(order: BesselIOrder, x: f64) -> f64 {
    let nu = match order {
        BesselIOrder::Zero => 0.0,
        BesselIOrder::One => 1.0,
    };
    if x < I_ASYMPTOTIC_MIN {
        let half = 0.5 * x;
        let q = half * half;
        let mut term = if nu == 0.0 { 1.0 } else { half };
        let mut sum = term;
        for k in 1..500 {
            let kf = k as f64;
            term *= q / (kf * (kf + nu));
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum * (-x).exp()
    } else {
        let m = 4.0 * nu * nu;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..80 {
            let kf = k as f64;
            let odd = 2.0 * kf - 1.0;
            let next = -term * (m - odd * odd) / (kf * 8.0 * x);
            if next.abs() > term.abs() {
                break;
            }
            term = next;
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        sum / (2.0 * PI * x).sqrt()
    }
}
