use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::rescale::el_residual;
use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::functionals::stiffness;
use crate::params::ModelParams;
use crate::riesz::RieszOperator;

#[derive(Debug, Clone)]
pub struct NewtonSolution {
    pub q: RadialField,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Petviashvili iteration for `L v = F(v)` with `L = S + D` and
/// `F(v) = (A v^p) v^{p-1}`, homogeneous of degree `2p-1`:
/// `v <- M^{(2p-1)/(2p-2)} L^{-1} F(v)` with `M = <v, L v>/<v, F(v)>`.
///
/// Returns the iterate and the number of sweeps.
pub(crate) fn petviashvili(
    params: &ModelParams,
    riesz: &RieszOperator,
    mut v: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize)> {
    let grid = riesz.grid.clone();
    let p = params.p;
    let lin = stiffness(&grid).combine(1.0, &grid.w_2);
    let expo = (2.0 * p - 1.0) / (2.0 * p - 2.0);
    let mut iters = 0;
    while iters < max_iter {
        let f: Vec<f64> = riesz
            .force(
                &v.iter()
                    .map(|x| Complex64::new(*x, 0.0))
                    .collect::<Vec<_>>(),
            )
            .into_iter()
            .map(|z| z.re)
            .collect();
        let lv = lin.apply(&v);
        let vlv: f64 = v.iter().zip(&lv).map(|(a, b)| a * b).sum();
        let vf: f64 = v.iter().zip(&f).map(|(a, b)| a * b).sum();
        if !(vf > 0.0) {
            return Err(Error::NonConvergence(
                "Petviashvili iterate lost its nonlinear term".into(),
            ));
        }
        let res: Vec<f64> = lv.iter().zip(&f).map(|(a, b)| a - b).collect();
        let z = lin.solve(&res);
        let rel = (res.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>().max(0.0) / vlv).sqrt();
        if rel < tol {
            break;
        }
        let mfac = (vlv / vf).powf(expo);
        let next = lin.solve(&f);
        v = next
            .into_iter()
            .map(|x| if mfac * x > 1e-100 { mfac * x } else { 0.0 })
            .collect();
        iters += 1;
    }
    Ok((v, iters))
}

/// Solver for `S v + D v = (A v^p) v^{p-1}` that does not use the Weinstein
/// descent: Petviashvili sweeps from `init` (or from a Gaussian projected
/// onto the Nehari set `h + m = n`), finished by damped Newton steps with a
/// dense Jacobian when the sweeps stall.
pub fn solve_euler_lagrange(
    params: &ModelParams,
    riesz: &RieszOperator,
    init: Option<&RadialField>,
    tol: f64,
    max_iter: usize,
) -> Result<NewtonSolution> {
    params.require_ground_state_range()?;
    let grid = riesz.grid.clone();
    let n = grid.len();
    let p = params.p;
    let lin = stiffness(&grid).combine(1.0, &grid.w_2);
    let mut v: Vec<f64> = match init {
        Some(f) => {
            riesz.check_grid(f)?;
            f.values.iter().map(|z| z.norm()).collect()
        }
        None => {
            let sigma2 = 2.0 * (1.0 - params.theta) / params.theta;
            let phi: Vec<f64> = grid.nodes.iter().map(|r| (-r * r / sigma2).exp()).collect();
            let psi: Vec<f64> = phi.iter().map(|x| x.powf(p)).collect();
            let lp = lin.apply(&phi);
            let quad: f64 = phi.iter().zip(&lp).map(|(a, b)| a * b).sum();
            let ap = riesz.apply_matrix(&psi);
            let nl: f64 = psi.iter().zip(&ap).map(|(a, b)| a * b).sum();
            let t = (quad / nl).powf(1.0 / (2.0 * p - 2.0));
            phi.iter().map(|x| t * x).collect()
        }
    };
    if v.iter().all(|x| *x == 0.0) {
        return Err(Error::ZeroField);
    }
    let residual = |v: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let g: Vec<f64> = v.iter().map(|x| x.powf(p)).collect();
        let ag = riesz.apply_matrix(&g);
        let lv = lin.apply(v);
        let r = (0..n).map(|j| lv[j] - ag[j] * v[j].powf(p - 1.0)).collect();
        (r, ag)
    };
    let norm2 = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let to_field = |v: &[f64]| {
        RadialField::new(
            grid.clone(),
            v.iter().map(|x| Complex64::new(*x, 0.0)).collect(),
        )
    };
    let (pv, sweeps) = petviashvili(params, riesz, v, tol, max_iter.saturating_mul(50))?;
    v = pv;
    let (mut r, mut ag) = residual(&v);
    let mut rn = norm2(&r);
    let mut iterations = sweeps;
    let mut converged = false;
    let mut newton_steps = 0;
    while newton_steps < max_iter {
        if el_residual(&to_field(&v)?, riesz) < tol {
            converged = true;
            break;
        }
        let a = riesz.matrix();
        let mut jac = DMatrix::<f64>::zeros(n, n);
        let vp1: Vec<f64> = v.iter().map(|x| x.powf(p - 1.0)).collect();
        for j in 0..n {
            for k in 0..n {
                jac[(j, k)] = -p * vp1[j] * a[j * n + k] * vp1[k];
            }
            jac[(j, j)] += lin.diag[j] - (p - 1.0) * ag[j] * v[j].max(1e-300).powf(p - 2.0);
            if j + 1 < n {
                jac[(j, j + 1)] += lin.off[j];
                jac[(j + 1, j)] += lin.off[j];
            }
        }
        let rhs = DVector::from_iterator(n, r.iter().map(|x| -x));
        let delta = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::NonConvergence("singular Jacobian".into()))?;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = (0..n).map(|j| (v[j] + step * delta[j]).max(0.0)).collect();
            let (tr, tag) = residual(&trial);
            let tn = norm2(&tr);
            if tn < rn || step < 1e-6 {
                v = trial;
                r = tr;
                ag = tag;
                rn = tn;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        newton_steps += 1;
        if !accepted {
            break;
        }
    }
    let q = to_field(&v)?;
    let res = el_residual(&q, riesz);
    Ok(NewtonSolution {
        converged: converged || res < tol,
        q,
        residual: res,
        iterations,
    })
}
