//! Monotone piecewise-cubic Hermite interpolation (Fritsch–Carlson) on a
//! uniform grid.

#[derive(Debug, Clone)]
pub struct Pchip {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    /// Build from samples `y` at x0, x0+h, ... . Needs at least two points.
    pub fn uniform(x0: f64, h: f64, y: Vec<f64>) -> Self {
        assert!(y.len() >= 2 && h > 0.0);
        let n = y.len();
        let delta: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let (a, b) = (delta[i - 1], delta[i]);
            d[i] = if a * b <= 0.0 {
                0.0
            } else {
                // harmonic mean, equal spacing
                2.0 * a * b / (a + b)
            };
        }
        d[0] = end_slope(delta[0], delta.get(1).copied().unwrap_or(delta[0]));
        d[n - 1] = end_slope(delta[n - 2], if n > 2 { delta[n - 3] } else { delta[n - 2] });
        Pchip { x0, h, y, d }
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.h * (self.y.len() - 1) as f64
    }

    /// Evaluate; arguments outside the grid are clamped to the end cells and
    /// extrapolated with the end cubic.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let t = (x - self.x0) / self.h;
        let i = (t.floor().max(0.0) as usize).min(n - 2);
        let s = t - i as f64;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * self.h * self.d[i] + h01 * self.y[i + 1] + h11 * self.h * self.d[i + 1]
    }
}

fn end_slope(d0: f64, d1: f64) -> f64 {
    let d = (3.0 * d0 - d1) / 2.0;
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}
