use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::functionals::{gamma_prime, hardy_seminorm_sq, mass, stiffness, weighted_moment};
use crate::linalg::{thomas, SymTridiag};
use crate::params::ModelParams;
use crate::riesz::RieszOperator;

/// Conserved quantities and virial data of one field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub mass: f64,
    pub energy: f64,
    pub hardy_norm_sq: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
    /// Right-hand side of the virial identity,
    /// `16 E + 8 (d+alpha+2-dp) G(u)`.
    pub gamma_second: f64,
}

pub fn diagnostics(f: &RadialField, params: &ModelParams, riesz: &RieszOperator) -> Diagnostics {
    let h2 = hardy_seminorm_sq(f, params);
    let g = riesz.choquard_energy(f);
    let e = 0.5 * h2 - g;
    Diagnostics {
        mass: mass(f, params),
        energy: e,
        hardy_norm_sq: h2,
        gamma: weighted_moment(f, params),
        gamma_prime: gamma_prime(f, params),
        gamma_second: 16.0 * e + 8.0 * params.virial_coefficient() * g,
    }
}

/// `(Gamma, Gamma', Gamma'')` of a state, the last from the virial identity.
pub fn virial_diagnostics(
    state: &SimState,
    params: &ModelParams,
    riesz: &RieszOperator,
) -> (f64, f64, f64) {
    let d = diagnostics(&state.field, params, riesz);
    (d.gamma, d.gamma_prime, d.gamma_second)
}

#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub field: RadialField,
    /// Step that produced this state (the initial step for `t = 0`).
    pub dt: f64,
    pub diagnostics: Diagnostics,
}

impl SimState {
    pub fn new(
        field: RadialField,
        t: f64,
        dt: f64,
        params: &ModelParams,
        riesz: &RieszOperator,
    ) -> Result<Self> {
        riesz.check_grid(&field)?;
        let diagnostics = diagnostics(&field, params, riesz);
        Ok(SimState {
            t,
            field,
            dt,
            diagnostics,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeOptions {
    /// Include the Choquard term; `false` gives the free Hardy flow.
    pub nonlinear: bool,
    /// Relative change of the new iterate that ends the fixed point.
    pub fp_tol: f64,
    pub fp_max_iter: usize,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        SchemeOptions {
            nonlinear: true,
            fp_tol: 1e-10,
            fp_max_iter: 25,
        }
    }
}

/// Crank-Nicolson propagator for `i D v' = S v - F(v)` with
/// `F(v) = (A |v|^p) |v|^{p-2} v`:
/// `(D + i dt S/2) v1 = (D - i dt S/2) v0 + i dt F((v0 + v1)/2)`,
/// solved by fixed-point iteration on `v1`.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    riesz: &'a RieszOperator,
    stiff: SymTridiag,
    w2: &'a [f64],
    opts: SchemeOptions,
}

impl<'a> Propagator<'a> {
    pub fn new(riesz: &'a RieszOperator, opts: SchemeOptions) -> Self {
        Propagator {
            riesz,
            stiff: stiffness(&riesz.grid),
            w2: &riesz.grid.w_2,
            opts,
        }
    }

    fn dnorm(&self, v: &[Complex64]) -> f64 {
        v.iter()
            .zip(self.w2)
            .map(|(z, w)| w * z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// One step of signed length `dt`; returns the new values and the number
    /// of fixed-point iterations used.
    pub fn advance(&self, v0: &[Complex64], dt: f64) -> Result<(Vec<Complex64>, usize)> {
        let i = Complex64::new(0.0, 1.0);
        let h = i * (0.5 * dt);
        let sv0 = self.stiff.apply(v0);
        let base: Vec<Complex64> = (0..v0.len())
            .map(|j| v0[j] * self.w2[j] - h * sv0[j])
            .collect();
        let diag: Vec<Complex64> = self
            .stiff
            .diag
            .iter()
            .zip(self.w2)
            .map(|(s, w)| Complex64::new(*w, 0.0) + h * s)
            .collect();
        let off: Vec<Complex64> = self.stiff.off.iter().map(|s| h * s).collect();
        if !self.opts.nonlinear {
            return Ok((thomas(&off, &diag, &off, &base), 0));
        }
        let mut v1 = v0.to_vec();
        let mut change = f64::INFINITY;
        for k in 1..=self.opts.fp_max_iter {
            let mid: Vec<Complex64> = v0.iter().zip(&v1).map(|(a, b)| 0.5 * (a + b)).collect();
            let f = self.riesz.force(&mid);
            let rhs: Vec<Complex64> = base.iter().zip(&f).map(|(b, fj)| b + i * dt * fj).collect();
            let next = thomas(&off, &diag, &off, &rhs);
            let diff: Vec<Complex64> = next.iter().zip(&v1).map(|(a, b)| a - b).collect();
            let scale = self.dnorm(&next);
            change = if scale == 0.0 {
                0.0
            } else {
                self.dnorm(&diff) / scale
            };
            if !change.is_finite() {
                break;
            }
            v1 = next;
            if change < self.opts.fp_tol {
                return Ok((v1, k));
            }
        }
        Err(Error::StepFailure {
            iterations: self.opts.fp_max_iter,
            residual: change,
        })
    }
}

/// One Crank-Nicolson step of signed length `dt` with default options.
pub fn step(
    state: &SimState,
    dt: f64,
    riesz: &RieszOperator,
    params: &ModelParams,
) -> Result<SimState> {
    step_with(state, dt, riesz, params, SchemeOptions::default())
}

pub fn step_with(
    state: &SimState,
    dt: f64,
    riesz: &RieszOperator,
    params: &ModelParams,
    opts: SchemeOptions,
) -> Result<SimState> {
    params.require_dynamics()?;
    riesz.check_grid(&state.field)?;
    if !dt.is_finite() || dt == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "time step must be finite and nonzero, got {dt}"
        )));
    }
    let (v, _) = Propagator::new(riesz, opts).advance(&state.field.values, dt)?;
    let field = RadialField::new(state.field.grid.clone(), v)?;
    SimState::new(field, state.t + dt, dt, params, riesz)
}
