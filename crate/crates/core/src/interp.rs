//! Monotone cubic (Fritsch-Carlson) interpolation with an exponential tail.

/// Piecewise cubic Hermite interpolant preserving monotonicity of the data.
///
/// Beyond `tail_start` the interpolant is replaced by `c x^{-1/2} e^{-x}`,
/// the decay of a transformed ground state; below the first knot it is held
/// constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
    tail: Option<(f64, f64)>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        assert!(x.len() == y.len() && x.len() >= 2);
        let n = x.len();
        let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut m = vec![0.0; n];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        m[0] = end_slope(
            h[0],
            h.get(1).copied().unwrap_or(h[0]),
            delta[0],
            delta.get(1).copied().unwrap_or(delta[0]),
        );
        m[n - 1] = end_slope(
            h[n - 2],
            if n > 2 { h[n - 3] } else { h[n - 2] },
            delta[n - 2],
            if n > 2 { delta[n - 3] } else { delta[n - 2] },
        );
        Pchip {
            x,
            y,
            m,
            tail: None,
        }
    }

    /// Attaches `c x^{-1/2} e^{-x}` for `x > start`, with `c` the geometric
    /// mean fit of the data on `[lo, hi]`.
    pub fn with_exponential_tail(mut self, lo: f64, hi: f64, start: f64) -> Self {
        let logs: Vec<f64> = self
            .x
            .iter()
            .zip(&self.y)
            .filter(|(x, y)| **x >= lo && **x <= hi && **y > 0.0)
            .map(|(x, y)| y.ln() + 0.5 * x.ln() + x)
            .collect();
        if !logs.is_empty() {
            let c = (logs.iter().sum::<f64>() / logs.len() as f64).exp();
            self.tail = Some((start, c));
        }
        self
    }

    pub fn tail_coefficient(&self) -> Option<f64> {
        self.tail.map(|t| t.1)
    }

    pub fn tail_start(&self) -> Option<f64> {
        self.tail.map(|t| t.0)
    }

    fn locate(&self, t: f64) -> usize {
        let k = self.x.partition_point(|&xi| xi <= t);
        k.clamp(1, self.x.len() - 1) - 1
    }

    pub fn value(&self, t: f64) -> f64 {
        if let Some((start, c)) = self.tail {
            if t > start {
                return c * t.powf(-0.5) * (-t).exp();
            }
        }
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.m[i] + h01 * self.y[i + 1] + h11 * h * self.m[i + 1]
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if let Some((start, c)) = self.tail {
            if t > start {
                return -c * t.powf(-0.5) * (-t).exp() * (1.0 + 0.5 / t);
            }
        }
        let n = self.x.len();
        if t <= self.x[0] || t >= self.x[n - 1] {
            return 0.0;
        }
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        (d00 * self.y[i] + d01 * self.y[i + 1]) / h + d10 * self.m[i] + d11 * self.m[i + 1]
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}
