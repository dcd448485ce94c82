use serde::{Deserialize, Serialize};

use crate::field::RadialField;
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    /// Extrapolated `v(0) = lim r^{(d-2)/2} Q(r)`.
    pub v0: f64,
    /// `sup |v(r) - v0|/v0` over the nodes with `r <= 10 r_1`.
    pub near_fit: f64,
    /// Least-squares slope of `log(r^{(d-1)/2} e^r Q(r))`.
    pub far_rate: f64,
    /// `exp` of the mean of the same logarithm over the fit window.
    pub far_prefactor: f64,
    /// `v0 > 0` and `|far_rate| <= 0.05`.
    pub acceptable: bool,
}

/// Behaviour of a ground state at the origin and at infinity, fitting the tail
/// on `[r_max/2, 3 r_max/4]`.
pub fn asymptotics_report(q: &RadialField, params: &ModelParams) -> AsymptoticsReport {
    let r_max = q.grid.r_max;
    asymptotics_report_on(q, params, 0.5 * r_max, 0.75 * r_max)
}

/// As [`asymptotics_report`] with an explicit tail window `[lo, hi]`.
pub fn asymptotics_report_on(
    q: &RadialField,
    _params: &ModelParams,
    lo: f64,
    hi: f64,
) -> AsymptoticsReport {
    let r = &q.grid.nodes;
    let v: Vec<f64> = q.values.iter().map(|z| z.re).collect();
    // r^{(d-1)/2} u = r^{1/2} v in every dimension
    let v0 = v[0] - r[0] * (v[1] - v[0]) / (r[1] - r[0]);
    let near_fit = r
        .iter()
        .zip(&v)
        .take_while(|(x, _)| **x <= 10.0 * r[0])
        .map(|(_, y)| (y - v0).abs() / v0.abs())
        .fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = r
        .iter()
        .zip(&v)
        .filter(|(x, y)| **x >= lo && **x <= hi && **y > 0.0)
        .map(|(x, y)| (*x, 0.5 * x.ln() + x + y.ln()))
        .collect();
    let (far_rate, far_prefactor) = if pts.len() >= 2 {
        let nf = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        (sxy / sxx, my.exp())
    } else {
        (f64::NAN, f64::NAN)
    };
    AsymptoticsReport {
        v0,
        near_fit,
        far_rate,
        far_prefactor,
        acceptable: v0 > 0.0 && far_rate.abs() <= 0.05 && far_prefactor.is_finite(),
    }
}
