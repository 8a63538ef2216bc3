//! Independent reference implementations for the integration tests.
//!
//! Everything here uses plain trapezoid or adaptive Simpson quadrature on
//! textbook integral representations, so it shares no numerical code with
//! the library.

#![allow(dead_code)]

use std::f64::consts::PI;

fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let floor = 1e-15 * (left.abs() + right.abs());
    if depth == 0 || delta.abs() <= 15.0 * tol.max(floor) {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Adaptive Simpson on each piece with a relative tolerance, estimated from
/// a first coarse pass.
pub fn simpson_piece_values<F: Fn(f64) -> f64>(f: &F, edges: &[f64], rel: f64) -> Vec<f64> {
    let rough: f64 = edges
        .windows(2)
        .map(|w| {
            let scale = [w[0], 0.5 * (w[0] + w[1]), w[1]]
                .iter()
                .fold(0.0f64, |m, &x| m.max(f(x).abs()));
            simpson(f, w[0], w[1], (1e-3 * (w[1] - w[0]).abs() * scale).max(1e-300)).abs()
        })
        .sum();
    let tol = (rel * rough).max(1e-300) / edges.len() as f64;
    edges.windows(2).map(|w| simpson(f, w[0], w[1], tol)).collect()
}

pub fn simpson_pieces<F: Fn(f64) -> f64>(f: &F, edges: &[f64], rel: f64) -> f64 {
    simpson_piece_values(f, edges, rel).iter().sum()
}

fn geometric_edges(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let mut e = vec![0.0];
    let decades = (hi / lo).log10().ceil() as usize;
    let n = decades * per_decade;
    for i in 0..=n {
        e.push(lo * (hi / lo).powf(i as f64 / n as f64));
    }
    e
}

/// Trapezoid sums of an integrand analytic in a strip around [0, ∞) (or
/// periodic on [0, t_end]), halving the step until two sums agree.
fn trapezoid_converged<F: Fn(f64) -> f64>(g: &F, t_end: f64, h0: f64) -> f64 {
    let sum = |h: f64| {
        let n = (t_end / h).ceil() as usize;
        let mut s = 0.5 * (g(0.0) + g(n as f64 * h));
        for k in 1..n {
            s += g(k as f64 * h);
        }
        s * h
    };
    let mut h = h0;
    let mut prev = sum(h);
    loop {
        h *= 0.5;
        let cur = sum(h);
        if (cur - prev).abs() <= 1e-15 * cur.abs() || h < 1e-4 {
            return cur;
        }
        prev = cur;
    }
}

/// e^x K_ν(x) = ∫₀^∞ e^{−x(cosh t − 1)} cosh νt dt.
pub fn bessel_k_scaled(nu: f64, x: f64) -> f64 {
    let expo = |t: f64| {
        let s = (0.5 * t).sinh();
        -2.0 * x * s * s + nu * t
    };
    let g = |t: f64| expo(t).exp() * 0.5 * (1.0 + (-2.0 * nu * t).exp());
    let mut best = 0.0f64;
    let mut t = 0.0f64;
    loop {
        t += 0.05;
        let e = expo(t);
        best = best.max(e);
        if e < best - 50.0 {
            break;
        }
    }
    trapezoid_converged(&g, t, 0.25)
}

pub fn bessel_k(nu: f64, x: f64) -> f64 {
    bessel_k_scaled(nu, x) * (-x).exp()
}

/// e^{−x} I_n(x) = (1/π) ∫₀^π e^{x(cos t − 1)} cos nt dt, integer n.
pub fn bessel_i_scaled(n: u32, x: f64) -> f64 {
    let g = |t: f64| (x * (t.cos() - 1.0)).exp() * (n as f64 * t).cos();
    trapezoid_converged(&g, PI, PI / 16.0) / PI
}

pub fn bessel_i(n: u32, x: f64) -> f64 {
    bessel_i_scaled(n, x) * x.exp()
}

/// e^x ∫ₓ^∞ K_{5/3}(y) dy = ∫₀^∞ e^{−s} [e^{x+s} K_{5/3}(x + s)] ds, nested.
pub fn k53_tail_nested_scaled(x: f64) -> f64 {
    let g = |s: f64| (-s).exp() * bessel_k_scaled(5.0 / 3.0, x + s);
    let mut edges = geometric_edges(x.min(1.0) * 1e-2, 1.0, 4);
    for k in 2..=60 {
        edges.push(k as f64);
    }
    simpson_pieces(&g, &edges, 1e-10)
}

pub fn k53_tail_nested(x: f64) -> f64 {
    k53_tail_nested_scaled(x) * (-x).exp()
}

/// ∫ₓ^∞ K_{5/3} from the exchanged-order single integral
/// e^{−x} ∫₀^∞ e^{−x(cosh t − 1)} cosh(5t/3)/cosh t dt.
pub fn k53_tail(x: f64) -> f64 {
    let g = |t: f64| {
        let s = (0.5 * t).sinh();
        (-2.0 * x * s * s).exp() * (5.0 * t / 3.0).cosh() / t.cosh()
    };
    let mut t_end = 1.0;
    while g(t_end) > 1e-22 * g(0.0) {
        t_end += 1.0;
    }
    let edges: Vec<f64> = (0..=(8 * t_end as usize)).map(|i| i as f64 / 8.0).collect();
    simpson_pieces(&g, &edges, 1e-12) * (-x).exp()
}

/// F(χ, u) = ∫_z^∞ K_{5/3} + u²/(1−u) K_{2/3}(z), z = 2u/(3χ(1−u)).
pub fn compton_f(chi: f64, u: f64) -> f64 {
    let z = 2.0 * u / (3.0 * chi * (1.0 - u));
    if z > 700.0 {
        return 0.0;
    }
    k53_tail(z) + u * u / (1.0 - u) * bessel_k(2.0 / 3.0, z)
}

/// u-moments ∫uⁿF du for n = 0, 1, via u = v³.
pub fn compton_moment(chi: f64, n: i32) -> f64 {
    let g = |v: f64| {
        if v <= 0.0 || v >= 1.0 {
            return 0.0;
        }
        let u = v * v * v;
        3.0 * v * v * u.powi(n) * compton_f(chi, u)
    };
    // F lives at u ≲ 30χ
    let v_knee = (30.0 * chi).min(0.5).cbrt();
    let mut edges: Vec<f64> = (0..=16).map(|i| v_knee * i as f64 / 16.0).collect();
    for i in 1..=16 {
        edges.push(v_knee + (1.0 - v_knee) * i as f64 / 16.0);
    }
    simpson_pieces(&g, &edges, 1e-9)
}

pub fn compton_rate(chi: f64) -> f64 {
    compton_moment(chi, 0)
}

/// Normalized CDF of u at one χ, accumulated once over fixed pieces in
/// v = u^{1/3}, so each query only integrates a partial piece.
pub struct ComptonCdf {
    chi: f64,
    nodes: Vec<f64>,
    cum: Vec<f64>,
}

impl ComptonCdf {
    pub fn new(chi: f64) -> Self {
        let v_knee = (30.0 * chi).min(0.5).cbrt();
        let mut nodes: Vec<f64> = (0..=128).map(|i| v_knee * i as f64 / 128.0).collect();
        for i in 1..=64 {
            nodes.push(v_knee + (1.0 - v_knee) * i as f64 / 64.0);
        }
        let pieces = simpson_piece_values(&|v| Self::density(chi, v), &nodes, 1e-11);
        let mut cum = vec![0.0];
        for p in pieces {
            cum.push(cum.last().unwrap() + p);
        }
        ComptonCdf { chi, nodes, cum }
    }

    fn density(chi: f64, v: f64) -> f64 {
        if v <= 0.0 || v >= 1.0 {
            return 0.0;
        }
        let u = v * v * v;
        3.0 * v * v * compton_f(chi, u)
    }

    /// ∫₀¹ F du.
    pub fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn cdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let v = u.cbrt();
        let k = self.nodes.partition_point(|&n| n <= v) - 1;
        let a = self.nodes[k];
        let tol = 1e-12 * self.total() / self.nodes.len() as f64;
        let chi = self.chi;
        let part = if v > a { simpson(&|x| Self::density(chi, x), a, v, tol) } else { 0.0 };
        (self.cum[k] + part) / self.total()
    }
}

/// T(χ) = ∫₀¹ [K_{2/3}(z)/(v(1−v)) − ∫_z^∞ K_{5/3}] dv, z = 2/(3χ v(1−v)).
pub fn breit_wheeler_bracket(chi: f64) -> f64 {
    let g = |v: f64| {
        let p = v * (1.0 - v);
        if p <= 0.0 {
            return 0.0;
        }
        let z = 2.0 / (3.0 * chi * p);
        if z > 700.0 {
            return 0.0;
        }
        bessel_k(2.0 / 3.0, z) / p - k53_tail(z)
    };
    let edges: Vec<f64> = (0..=32).map(|i| 0.5 * i as f64 / 32.0).collect();
    2.0 * simpson_pieces(&g, &edges, 1e-9)
}

/// ρ straight from its definition, without subtracting the normalization.
pub fn rho(zeta0: f64, gamma_tau: f64, theta0: f64) -> f64 {
    let ws = (0.5 * theta0).sin().powi(2);
    let wc = (0.5 * theta0).cos().powi(2);
    let g = |s: f64| {
        let z = zeta0 / (1.0 + s * s);
        (ws * z.exp() + wc * (-z).exp()) * (-0.5 * gamma_tau * gamma_tau * s * s).exp()
    };
    let s_end = 12.0 / gamma_tau + 10.0;
    let mut edges = vec![0.0, 0.5, 1.0, 2.0, 4.0, 8.0];
    let mut e = 16.0;
    while e < s_end {
        edges.push(e);
        e *= 2.0;
    }
    edges.push(s_end);
    2.0 * gamma_tau / (2.0 * PI).sqrt() * simpson_pieces(&g, &edges, 1e-12)
}

/// Unsqueezed ξ/ξ₀ for carrier phase 0, exact: e^{−ϕ²/2(ω₀τ)²} sin ϕ.
pub fn xi_unsqueezed(phi: f64, omega0_tau: f64) -> f64 {
    (-0.5 * (phi / omega0_tau).powi(2)).exp() * phi.sin()
}

/// Plain Gaussian-envelope approximation e^{−ϕ²/2(ω₀τ)²} cos ϕ.
pub fn f_gaussian_envelope(phi: f64, omega0_tau: f64) -> f64 {
    (-0.5 * (phi / omega0_tau).powi(2)).exp() * phi.cos()
}

/// Unsqueezed f_Z including the exact 1/ω weight, as the asymptotic series
/// e^{−ε²ϕ²/2} Re[e^{iϕ} Σₙ (−iε)ⁿ Heₙ(εϕ)], ε = 1/(ω₀τ), summed to its
/// smallest term.
pub fn f_unsqueezed(phi: f64, omega0_tau: f64) -> f64 {
    let eps = 1.0 / omega0_tau;
    let x = eps * phi;
    // He_{n+1} = x He_n − n He_{n−1}
    let (mut h_prev, mut h) = (1.0, x);
    let mut re = 1.0;
    let mut im = 0.0;
    let mut last = f64::INFINITY;
    let mut epow = 1.0;
    for n in 1..200 {
        epow *= eps;
        let term = epow * h;
        if term.abs() > last && n > 4 {
            break;
        }
        last = term.abs();
        // (−i)^n
        match n % 4 {
            0 => re += term,
            1 => im -= term,
            2 => re -= term,
            _ => im += term,
        }
        let next = x * h - n as f64 * h_prev;
        h_prev = h;
        h = next;
    }
    let (s, c) = phi.sin_cos();
    (-0.5 * x * x).exp() * (c * re - s * im)
}
