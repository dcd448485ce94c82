//! Minimisation of the Weinstein quotient
//! `W(u) = ||sqrt(L)u||^theta ||u||^{1-theta} / (int (I_alpha*|u|^p)|u|^p)^{1/(2p)}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::functionals::{hardy_seminorm_sq, mass, stiffness};
use crate::linalg::SymTridiag;
use crate::params::ModelParams;
use crate::riesz::RieszOperator;

/// `W(u)` evaluated from the three discrete functionals.
pub fn weinstein_value(f: &RadialField, params: &ModelParams, riesz: &RieszOperator) -> f64 {
    let h2 = hardy_seminorm_sq(f, params);
    let m2 = mass(f, params);
    let n = riesz.choquard_integral(f);
    h2.powf(params.theta / 2.0) * m2.powf((1.0 - params.theta) / 2.0)
        / n.powf(1.0 / (2.0 * params.p))
}

#[derive(Debug, Clone)]
pub struct WeinsteinMinimum {
    /// Descent limit, real and nonnegative, normalised to unit mass.
    pub field: RadialField,
    /// `W` at the returned field.
    pub sharp_c: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Preconditioned gradient norm of `log W` at the returned field.
    pub grad_norm: f64,
}

pub(crate) struct Quotient<'a> {
    params: &'a ModelParams,
    /// Weight of the penalty `(ln(h/m) - ln(theta/(1-theta)))^2 / 2`.
    penalty: f64,
    riesz: &'a RieszOperator,
    stiff: SymTridiag,
    w2: &'a [f64],
}

pub(crate) struct Eval {
    pub j: f64,
    pub grad: Vec<f64>,
    pub h: f64,
    pub m: f64,
}

impl<'a> Quotient<'a> {
    pub(crate) fn new(params: &'a ModelParams, riesz: &'a RieszOperator) -> Self {
        Quotient {
            params,
            penalty: SCALE_PENALTY,
            riesz,
            stiff: stiffness(&riesz.grid),
            w2: &riesz.grid.w_2,
        }
    }

    /// `J = (theta/2) ln h + ((1-theta)/2) ln m - ln(n)/(2p)` and its gradient.
    pub(crate) fn eval(&self, v: &[f64]) -> Eval {
        let p = self.params.p;
        let th = self.params.theta;
        let g: Vec<f64> = v.iter().map(|x| x.powf(p)).collect();
        let ag = self.riesz.apply_matrix(&g);
        let n: f64 = g.iter().zip(&ag).map(|(a, b)| a * b).sum();
        let sv = self.stiff.apply(v);
        let h: f64 = v.iter().zip(&sv).map(|(a, b)| a * b).sum();
        let m: f64 = v.iter().zip(self.w2).map(|(a, w)| w * a * a).sum();
        let dev = (h / m).ln() - (th / (1.0 - th)).ln();
        let j = 0.5 * th * h.ln() + 0.5 * (1.0 - th) * m.ln() - n.ln() / (2.0 * p)
            + 0.5 * self.penalty * dev * dev;
        let k = self.penalty * dev;
        let grad = (0..v.len())
            .map(|i| {
                (th + 2.0 * k) * sv[i] / h + (1.0 - th - 2.0 * k) * self.w2[i] * v[i] / m
                    - ag[i] * v[i].powf(p - 1.0) / n
            })
            .collect();
        Eval { j, grad, h, m }
    }

    fn preconditioner(&self, e: &Eval) -> SymTridiag {
        let th = self.params.theta;
        let diag: Vec<f64> = self.w2.iter().map(|w| (1.0 - th) * w / e.m).collect();
        self.stiff.combine(th / e.h, &diag)
    }
}

/// Positivity clamp that also drops values whose powers would be subnormal.
fn flush(x: f64) -> f64 {
    if x > 1e-100 {
        x
    } else {
        0.0
    }
}

fn normalise(v: &mut [f64], w2: &[f64]) {
    let m: f64 = v.iter().zip(w2).map(|(a, w)| w * a * a).sum();
    let s = 1.0 / m.sqrt();
    v.iter_mut().for_each(|x| *x *= s);
}

const SCALE_PENALTY: f64 = 1.0;

/// Sobolev-preconditioned projected gradient descent on `log W`.
///
/// `W` is dilation invariant but its discretisation is not: left alone the
/// descent drifts toward profiles a few cells wide, where the discrete
/// quotient is smallest. A penalty on `ln(h/m)` holds the profile at the
/// scale where `h/m = theta/(1-theta)`, the ratio every ground state has,
/// and vanishes there.
///
/// The metric is `P = theta S/h + (1-theta) D/m`, the Hessian of the quadratic
/// part of `log W`. Steps use the Barzilai-Borwein length in the `P` metric
/// with Armijo backtracking, a positivity clamp and renormalisation to unit
/// mass. Stops when both the relative change of `W` and the preconditioned
/// gradient norm fall below `tol`, or when `W` stalls at working precision.
pub fn minimize_weinstein(
    params: &ModelParams,
    riesz: &RieszOperator,
    init: &RadialField,
    tol: f64,
    max_iter: usize,
) -> Result<WeinsteinMinimum> {
    params.require_ground_state_range()?;
    riesz.check_grid(init)?;
    if init.is_zero() {
        return Err(Error::ZeroField);
    }
    let q = Quotient::new(params, riesz);
    let mut v: Vec<f64> = init.values.iter().map(|z| z.norm()).collect();
    normalise(&mut v, q.w2);
    let mut cur = q.eval(&v);
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut iterations = 0;
    let mut converged = false;
    let mut grad_norm;
    let mut stalled = 0;
    loop {
        let pc = q.preconditioner(&cur);
        // components held at zero by the clamp cannot move further down
        let mut dir: Vec<f64> = pc
            .solve(&cur.grad)
            .into_iter()
            .zip(&v)
            .map(|(x, vi)| if *vi == 0.0 && x > 0.0 { 0.0 } else { -x })
            .collect();
        // the component along v is undone by normalisation
        let dv: f64 = dir
            .iter()
            .zip(&v)
            .zip(q.w2)
            .map(|((a, b), w)| w * a * b)
            .sum();
        dir.iter_mut().zip(&v).for_each(|(a, b)| *a -= dv * b);
        let slope: f64 = cur.grad.iter().zip(&dir).map(|(a, b)| a * b).sum();
        grad_norm = (-slope).max(0.0).sqrt();
        if iterations >= max_iter {
            break;
        }
        let mut step = match &prev {
            Some((pv, pg)) => {
                let s: Vec<f64> = v.iter().zip(pv).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = cur.grad.iter().zip(pg).map(|(a, b)| a - b).collect();
                let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
                let ps = pc.apply(&s);
                let sps: f64 = s.iter().zip(&ps).map(|(a, b)| a * b).sum();
                if sy > 0.0 && sps > 0.0 {
                    (sps / sy).clamp(1e-4, 1e4)
                } else {
                    1.0
                }
            }
            None => 1.0,
        };
        let mut accepted = None;
        for _ in 0..40 {
            let mut trial: Vec<f64> = v
                .iter()
                .zip(&dir)
                .map(|(a, d)| flush(a + step * d))
                .collect();
            if trial.iter().any(|x| *x > 0.0) {
                normalise(&mut trial, q.w2);
                let e = q.eval(&trial);
                // allowance for rounding in J near the minimum
                let slack = 4.0 * f64::EPSILON * cur.j.abs().max(1.0);
                if e.j.is_finite() && e.j <= cur.j + 1e-4 * step * slope + slack {
                    accepted = Some((trial, e));
                    break;
                }
            }
            step *= 0.5;
        }
        iterations += 1;
        let Some((trial, e)) = accepted else {
            // no descent possible at working precision
            converged = grad_norm < 10.0 * tol;
            break;
        };
        let dw = (e.j - cur.j).exp_m1().abs();
        prev = Some((
            std::mem::replace(&mut v, trial),
            std::mem::replace(&mut cur, e).grad,
        ));
        // J no longer moves beyond rounding
        stalled = if dw < 64.0 * f64::EPSILON {
            stalled + 1
        } else {
            0
        };
        if stalled >= 2 {
            converged = grad_norm < 10.0 * tol;
            break;
        }
        if dw < tol && grad_norm < tol {
            converged = true;
            let pc = q.preconditioner(&cur);
            let d = pc.solve(&cur.grad);
            grad_norm = cur
                .grad
                .iter()
                .zip(&d)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                .max(0.0)
                .sqrt();
            break;
        }
    }
    let field = RadialField::new(
        riesz.grid.clone(),
        v.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
    )?;
    let sharp_c = weinstein_value(&field, params, riesz);
    Ok(WeinsteinMinimum {
        field,
        sharp_c,
        iterations,
        converged,
        grad_norm,
    })
}

/// Gaussian `v = exp(-r^2/sigma^2)` whose Hardy-to-mass ratio already
/// matches the ground-state value `theta/(1-theta)`.
pub fn gaussian_initial_guess(
    params: &ModelParams,
    grid: std::sync::Arc<crate::grid::RadialGrid>,
) -> RadialField {
    let sigma2 = 2.0 * (1.0 - params.theta) / params.theta;
    RadialField::from_real(grid, |r| (-r * r / sigma2).exp())
}
