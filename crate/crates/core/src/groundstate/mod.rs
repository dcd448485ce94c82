//! Weinstein-optimal profiles, the ground-state equation and its identities.

mod asymptotics;
mod newton;
mod rescale;
mod weinstein;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use asymptotics::{asymptotics_report, asymptotics_report_on, AsymptoticsReport};
pub use newton::{solve_euler_lagrange, NewtonSolution};
pub use rescale::{el_residual, rescale_to_ground_state};
pub use weinstein::{
    gaussian_initial_guess, minimize_weinstein, weinstein_value, WeinsteinMinimum,
};

use crate::error::Result;
use crate::field::RadialField;
use crate::functionals::{hardy_seminorm_sq, mass};
use crate::params::{ModelParams, Regime};
use crate::riesz::RieszOperator;

/// Mass, Hardy norm, Choquard integral and energy of a ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `||Q||_{L^2}`.
    pub m_gs: f64,
    /// `||sqrt(L) Q||_{L^2}`.
    pub h_gs: f64,
    /// `int (I_alpha * Q^p) Q^p dx`.
    pub n_gs: f64,
    pub e_gs: f64,
}

/// Closed-form threshold quantities from the sharp constant.
///
/// `N_gs` is `M_gs^2/(1-theta)`, the value forced by the two Pohozaev
/// identities.
pub fn threshold_quantities(c: f64, params: &ModelParams) -> Thresholds {
    let df = params.d as f64;
    let (alpha, p, th) = (params.alpha, params.p, params.theta);
    let a = df * p - df - alpha;
    let b = a - 2.0;
    let cp = c.powf(p / (p - 1.0));
    let m_gs = th.powf(-a / (4.0 * (p - 1.0))) * (1.0 - th).powf(b / (4.0 * (p - 1.0))) * cp;
    let h_gs =
        th.powf(0.5 - a / (4.0 * (p - 1.0))) * (1.0 - th).powf(b / (4.0 * (p - 1.0)) - 0.5) * cp;
    let n_gs =
        th.powf(-a / (2.0 * (p - 1.0))) * (1.0 - th).powf(-1.0 + b / (2.0 * (p - 1.0))) * cp * cp;
    Thresholds {
        m_gs,
        h_gs,
        n_gs,
        e_gs: 0.5 * h_gs * h_gs - n_gs / (2.0 * p),
    }
}

/// Threshold quantities measured directly on a profile.
pub fn direct_norms(q: &RadialField, params: &ModelParams, riesz: &RieszOperator) -> Thresholds {
    let m2 = mass(q, params);
    let h2 = hardy_seminorm_sq(q, params);
    let n = riesz.choquard_integral(q);
    Thresholds {
        m_gs: m2.sqrt(),
        h_gs: h2.sqrt(),
        n_gs: n,
        e_gs: 0.5 * h2 - n / (2.0 * params.p),
    }
}

/// `theta^{theta/2} (1-theta)^{1/(2p)-theta/2} ||Q||^{(p-1)/p}`.
pub fn sharp_constant_from_mass(m: f64, params: &ModelParams) -> f64 {
    let (p, th) = (params.p, params.theta);
    th.powf(th / 2.0) * (1.0 - th).powf(1.0 / (2.0 * p) - th / 2.0) * m.powf((p - 1.0) / p)
}

#[derive(Debug, Clone)]
pub struct GroundStateResult {
    /// A ground state: real, positive, maximal at the first node.
    pub q: RadialField,
    /// Choquard operator on the grid of `q` (the solver's grid).
    pub riesz: Arc<RieszOperator>,
    pub sharp_c: f64,
    /// Closed-form constants computed from `sharp_c`.
    pub thresholds: Thresholds,
    /// The same quantities measured on `q`.
    pub direct: Thresholds,
    pub pohozaev_residual_1: f64,
    pub pohozaev_residual_2: f64,
    pub el_residual: f64,
    /// Descent iterations.
    pub iterations: usize,
    /// Petviashvili sweeps spent polishing `q`.
    pub polish_sweeps: usize,
    pub converged: bool,
    /// Dilation `b` under which the minimiser solves the equation exactly.
    pub dilation: f64,
    /// Part of `q` was taken from the fitted exponential tail.
    pub tail_extended: bool,
}

impl GroundStateResult {
    pub fn m_gs(&self) -> f64 {
        self.thresholds.m_gs
    }

    pub fn h_gs(&self) -> f64 {
        self.thresholds.h_gs
    }

    pub fn n_gs(&self) -> f64 {
        self.thresholds.n_gs
    }

    pub fn e_gs(&self) -> f64 {
        self.thresholds.e_gs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Existence {
    Exists,
    ExcludedLow,
    ExcludedHigh,
}

pub fn existence_classifier(params: &ModelParams) -> Existence {
    match params.regime {
        Regime::GroundStateRange => Existence::Exists,
        Regime::ExcludedLow => Existence::ExcludedLow,
        Regime::ExcludedHigh => Existence::ExcludedHigh,
    }
}

/// Pohozaev ratios `(N/M^2, H^2/M^2)` of a profile.
pub fn pohozaev_ratios(q: &RadialField, params: &ModelParams, riesz: &RieszOperator) -> (f64, f64) {
    let m2 = mass(q, params);
    (
        riesz.choquard_integral(q) / m2,
        hardy_seminorm_sq(q, params) / m2,
    )
}

/// Exact values `2p/(d+alpha-(d-2)p)` and `(dp-d-alpha)/(d+alpha-(d-2)p)`.
pub fn pohozaev_targets(params: &ModelParams) -> (f64, f64) {
    let df = params.d as f64;
    let den = params.choquard_dilation_degree();
    (
        2.0 * params.p / den,
        (df * params.p - df - params.alpha) / den,
    )
}

/// Relative residuals of the two Pohozaev identities.
pub fn pohozaev_check(q: &RadialField, params: &ModelParams, riesz: &RieszOperator) -> (f64, f64) {
    let (r1, r2) = pohozaev_ratios(q, params, riesz);
    let (t1, t2) = pohozaev_targets(params);
    ((r1 - t1).abs() / t1, (r2 - t2).abs() / t2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-7,
            max_iter: 20_000,
        }
    }
}

/// Gaussian start, Weinstein descent, then rescaling to the ground-state equation.
pub fn compute_ground_state(
    params: &ModelParams,
    riesz: &RieszOperator,
    opts: SolverOptions,
) -> Result<GroundStateResult> {
    params.require_ground_state_range()?;
    let init = gaussian_initial_guess(params, riesz.grid.clone());
    let min = minimize_weinstein(params, riesz, &init, opts.tol, opts.max_iter)?;
    rescale_to_ground_state(&min, params, riesz, opts.tol)
}
