use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pseudoconformal::profile_interpolant;
use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::functionals::{energy, gamma_prime, hardy_seminorm_sq, mass, weighted_moment};
use crate::params::ModelParams;
use crate::riesz::RieszOperator;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundtripReport {
    /// `E(v0)` for `v0 = u0 e^{i|x|^2/(4 T)}`; zero for minimal-mass blow-up data.
    pub energy_v0: f64,
    /// `E(v0) / ||sqrt(L) Q||^2`.
    pub energy_v0_relative: f64,
    pub energy_u0: f64,
    /// Dilation `mu` of the best fit `|v0| ~ mu v_Q(mu r)` (unit-mass dilation in `L^2`).
    pub fitted_scale: f64,
    /// Phase of `<v_Q(mu .), v0>`.
    pub fitted_phase: f64,
    /// `|| |v0| - mu v_Q(mu .) || / ||v0||`.
    pub fit_residual: f64,
    /// `sqrt(Gamma(0) / (8 E(u0)))`, the blow-up time implied by the second-moment law.
    pub virial_time: Option<f64>,
    /// `Gamma'(0) / (-16 E(u0) T)`; one for the explicit solution.
    pub gamma_prime_ratio: Option<f64>,
    /// No quadratic phase to remove: the datum behaves like a standing wave.
    pub degenerate: bool,
}

/// Removes the quadratic phase of a minimal-mass datum and compares the
/// remainder with a dilated ground state.
///
/// `q` is a ground state on the same grid, `t_blow` the blow-up time (as
/// estimated by a simulation). A diagnostic, not a proof of the
/// characterization.
pub fn characterization_roundtrip(
    u0: &RadialField,
    q: &RadialField,
    params: &ModelParams,
    riesz: &RieszOperator,
    t_blow: f64,
) -> Result<RoundtripReport> {
    riesz.check_grid(u0)?;
    riesz.check_grid(q)?;
    if !(t_blow > 0.0 && t_blow.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "blow-up time must be positive, got {t_blow}"
        )));
    }
    let m_u = mass(u0, params);
    let m_q = mass(q, params);
    if (m_u - m_q).abs() > 1e-3 * m_q {
        return Err(Error::MassMismatch {
            mass: m_u,
            target: m_q,
        });
    }
    let grid = u0.grid.clone();
    let v0_vals: Vec<Complex64> = u0
        .values
        .iter()
        .zip(&grid.nodes)
        .map(|(z, r)| z * Complex64::from_polar(1.0, r * r / (4.0 * t_blow)))
        .collect();
    let v0 = RadialField::new(grid.clone(), v0_vals)?;
    let h_q = hardy_seminorm_sq(q, params);
    let energy_v0 = energy(&v0, params, riesz);
    let energy_u0 = energy(u0, params, riesz);

    let interp = profile_interpolant(q);
    let moduli = v0.moduli();
    let w2 = &grid.w_2;
    let misfit = |mu: f64| -> f64 {
        grid.nodes
            .iter()
            .zip(&moduli)
            .zip(w2)
            .map(|((r, a), w)| w * (a - mu * interp.value(mu * r)).powi(2))
            .sum()
    };
    // golden-section search in log(mu), bracketed on a coarse scan
    let scan: Vec<f64> = (-40..=40).map(|k| k as f64 * 0.1).collect();
    let best = scan
        .iter()
        .copied()
        .min_by(|a, b| misfit(a.exp()).total_cmp(&misfit(b.exp())))
        .expect("nonempty scan");
    let (mut lo, mut hi) = (best - 0.1, best + 0.1);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if misfit(a.exp()) < misfit(b.exp()) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let mu = (0.5 * (lo + hi)).exp();
    let overlap: Complex64 = grid
        .nodes
        .iter()
        .zip(&v0.values)
        .zip(w2)
        .map(|((r, z), w)| z * (w * mu * interp.value(mu * r)))
        .sum();
    let norm_v0: f64 = moduli
        .iter()
        .zip(w2)
        .map(|(a, w)| w * a * a)
        .sum::<f64>()
        .sqrt();

    let gamma0 = weighted_moment(u0, params);
    let gp0 = gamma_prime(u0, params);
    let degenerate = energy_u0 <= 1e-6 * h_q || gp0.abs() <= 1e-9 * gamma0.max(1.0);
    let virial_time = (!degenerate).then(|| (gamma0 / (8.0 * energy_u0)).sqrt());
    let gamma_prime_ratio = virial_time.map(|t| gp0 / (-16.0 * energy_u0 * t));
    Ok(RoundtripReport {
        energy_v0,
        energy_v0_relative: energy_v0 / h_q,
        energy_u0,
        fitted_scale: mu,
        fitted_phase: overlap.arg(),
        fit_residual: misfit(mu).sqrt() / norm_v0,
        virial_time,
        gamma_prime_ratio,
        degenerate,
    })
}
