use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::functionals::{energy, hardy_seminorm_sq, mass, weighted_moment};
use crate::grid::RadialGrid;
use crate::interp::Pchip;
use crate::params::ModelParams;
use crate::quadrature::GaussRule;
use crate::riesz::RieszOperator;

/// Monotone cubic interpolant of a transformed ground state `v = r^{(d-2)/2} Q`,
/// with a knot at `r = 0` and the tail `c r^{-1/2} e^{-r}` fitted on
/// `[r_max/2, 3 r_max/4]` and used beyond `3 r_max/4`.
pub fn profile_interpolant(q: &RadialField) -> Pchip {
    let g = &q.grid;
    let v: Vec<f64> = q.values.iter().map(|z| z.re).collect();
    let mut xs = Vec::with_capacity(v.len() + 1);
    let mut ys = Vec::with_capacity(v.len() + 1);
    xs.push(0.0);
    ys.push(v[0] - g.nodes[0] * (v[1] - v[0]) / (g.nodes[1] - g.nodes[0]));
    xs.extend_from_slice(&g.nodes);
    ys.extend_from_slice(&v);
    Pchip::new(xs, ys).with_exponential_tail(0.5 * g.r_max, 0.75 * g.r_max, 0.75 * g.r_max)
}

/// `u(t, x) = e^{i gamma} e^{i lambda^2/(T-t)} e^{-i|x|^2/(4(T-t))}
/// (lambda/(T-t))^{d/2} Q(lambda x/(T-t))`, the explicit solution blowing up
/// at `T` in the mass-critical case.
///
/// In the transformed variable the amplitude is `L v_Q(L r)` with
/// `L = lambda/(T-t)` in every dimension.
#[derive(Debug, Clone)]
pub struct PseudoconformalSolution {
    pub q: RadialField,
    pub params: ModelParams,
    pub blowup_time: f64,
    pub lambda: f64,
    pub gamma: f64,
    /// Evaluation is refused beyond `t_fraction * T`.
    pub t_fraction: f64,
    profile: Pchip,
    /// `int |y|^2 Q^2 dy`.
    pub q_moment: f64,
    /// `||Q||^2`.
    pub q_mass: f64,
    /// `||sqrt(L) Q||^2`.
    pub q_hardy_sq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimalMassReport {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub gamma_t: f64,
    /// `|Gamma(t) - 8 E(u0) (T-t)^2| / Gamma(t)`.
    pub gamma_law_residual: f64,
    /// `||sqrt(L) u(t)|| (T-t)`.
    pub hardy_growth: f64,
}

impl PseudoconformalSolution {
    pub fn new(
        q: RadialField,
        params: &ModelParams,
        blowup_time: f64,
        lambda: f64,
        gamma: f64,
    ) -> Result<Self> {
        let df = params.d as f64;
        if !params.mass_critical || params.alpha <= df - 2.0 {
            return Err(Error::InvalidArgument(
                "the explicit blow-up solution needs p = (d+alpha+2)/d and d-2 < alpha < d".into(),
            ));
        }
        if !(blowup_time > 0.0 && lambda > 0.0 && blowup_time.is_finite() && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need T > 0 and lambda > 0, got T = {blowup_time}, lambda = {lambda}"
            )));
        }
        if q.is_zero() {
            return Err(Error::ZeroField);
        }
        let profile = profile_interpolant(&q);
        Ok(PseudoconformalSolution {
            q_moment: weighted_moment(&q, params),
            q_mass: mass(&q, params),
            q_hardy_sq: hardy_seminorm_sq(&q, params),
            q,
            params: *params,
            blowup_time,
            lambda,
            gamma,
            t_fraction: 1.0 - 1e-3,
            profile,
        })
    }

    /// Concentration factor `lambda/(T-t)`.
    pub fn concentration(&self, t: f64) -> f64 {
        self.lambda / (self.blowup_time - t)
    }

    fn check_time(&self, t: f64, limit: f64) -> Result<()> {
        if t >= 0.0 && t <= limit && t < self.blowup_time {
            Ok(())
        } else {
            Err(Error::TimeOutOfRange {
                t,
                limit: self.blowup_time,
            })
        }
    }

    /// The solution at time `t` sampled on `grid`.
    pub fn evaluate(&self, t: f64, grid: Arc<RadialGrid>) -> Result<RadialField> {
        self.check_time(t, self.t_fraction * self.blowup_time)?;
        let tau = self.blowup_time - t;
        let l = self.lambda / tau;
        let phase0 = self.gamma + self.lambda * self.lambda / tau;
        Ok(RadialField::from_fn(grid, |r| {
            let amp = l * self.profile.value(l * r);
            Complex64::from_polar(amp, phase0 - r * r / (4.0 * tau))
        }))
    }

    /// `Gamma(t) = ((T-t)/lambda)^2 int |y|^2 Q^2 dy`.
    pub fn gamma_exact(&self, t: f64) -> f64 {
        let s = (self.blowup_time - t) / self.lambda;
        s * s * self.q_moment
    }

    /// `||sqrt(L) u(t)||^2 = (lambda/(T-t))^2 ||sqrt(L)Q||^2 + Gamma(t)/(4(T-t)^2)`.
    pub fn hardy_sq_exact(&self, t: f64) -> f64 {
        let tau = self.blowup_time - t;
        let l = self.lambda / tau;
        l * l * self.q_hardy_sq + self.gamma_exact(t) / (4.0 * tau * tau)
    }

    /// Largest phase increment between adjacent nodes of `grid` among the
    /// nodes inside the radius that carries all but `1e-12` of the mass at `t`.
    pub fn phase_step(&self, t: f64, grid: &RadialGrid) -> f64 {
        let tau = self.blowup_time - t;
        let l = self.lambda / tau;
        let dens: Vec<f64> = grid
            .nodes
            .iter()
            .zip(&grid.w_2)
            .map(|(r, w)| w * (l * self.profile.value(l * r)).powi(2))
            .collect();
        let total: f64 = dens.iter().sum();
        let mut acc = 0.0;
        let mut last = grid.len() - 1;
        for (j, m) in dens.iter().enumerate() {
            acc += m;
            if acc >= total * (1.0 - 1e-12) {
                last = j;
                break;
            }
        }
        (1..=last.max(1))
            .map(|j| (grid.nodes[j].powi(2) - grid.nodes[j - 1].powi(2)) / (4.0 * tau))
            .fold(0.0, f64::max)
    }

    /// Mass, energy and the second-moment law at `t`, all from direct
    /// evaluation on the operator's grid.
    pub fn minimal_mass_diagnostics(
        &self,
        t: f64,
        riesz: &RieszOperator,
    ) -> Result<MinimalMassReport> {
        let params = &self.params;
        let u0 = self.evaluate(0.0, riesz.grid.clone())?;
        let e0 = energy(&u0, params, riesz);
        let u = self.evaluate(t, riesz.grid.clone())?;
        let gamma_t = weighted_moment(&u, params);
        let tau = self.blowup_time - t;
        Ok(MinimalMassReport {
            t,
            mass: mass(&u, params),
            energy: energy(&u, params, riesz),
            gamma_t,
            gamma_law_residual: (gamma_t - 8.0 * e0 * tau * tau).abs() / gamma_t,
            hardy_growth: hardy_seminorm_sq(&u, params).sqrt() * tau,
        })
    }

    /// `int_{|x| < rho} |u(t)|^2 dx = |S^{d-1}| int_0^{L rho} v_Q(y)^2 y dy`,
    /// integrated on the cells of `Q`'s grid by Gauss-Legendre quadrature of
    /// the interpolant, then on the tail.
    pub fn mass_concentration(&self, t: f64, rho: f64) -> Result<f64> {
        self.check_time(t, self.blowup_time)?;
        if !(rho > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "radius must be positive, got {rho}"
            )));
        }
        let upper = self.concentration(t) * rho;
        let rule = GaussRule::new(8);
        let f = |y: f64| {
            let v = self.profile.value(y);
            v * v * y
        };
        let edges = &self.q.grid.edges;
        let mut total = 0.0;
        for k in 0..edges.len() - 1 {
            let (a, b) = (edges[k], edges[k + 1]);
            if a >= upper {
                break;
            }
            total += rule.integrate(a, b.min(upper), f);
        }
        let r_end = *edges.last().expect("grid has edges");
        if upper > r_end {
            // unit panels over the exponential tail
            let mut a = r_end;
            while a < upper && a < r_end + 60.0 {
                let b = (a + 1.0).min(upper);
                total += rule.integrate(a, b, f);
                a = b;
            }
        }
        Ok(self.params.sphere_area * total)
    }
}
