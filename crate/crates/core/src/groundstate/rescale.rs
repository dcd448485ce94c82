use std::sync::Arc;

use num_complex::Complex64;

use super::newton::petviashvili;
use super::weinstein::WeinsteinMinimum;
use super::{direct_norms, pohozaev_check, threshold_quantities, GroundStateResult};
use crate::error::Result;
use crate::field::RadialField;
use crate::functionals::stiffness;
use crate::interp::Pchip;
use crate::params::ModelParams;
use crate::riesz::RieszOperator;

const POLISH_SWEEPS: usize = 5000;

/// Relative residual of the discrete ground-state equation
/// `S Q + D Q = (A Q^p) Q^{p-1}`, measured as
/// `||R||_{(S+D)^{-1}} / ||Q||_{S+D}`.
pub fn el_residual(q: &RadialField, riesz: &RieszOperator) -> f64 {
    let grid = &q.grid;
    let op = stiffness(grid).combine(1.0, &grid.w_2);
    let v: Vec<f64> = q.values.iter().map(|z| z.re).collect();
    let lv = op.apply(&v);
    let force = riesz.force(&q.values);
    let res: Vec<f64> = lv.iter().zip(&force).map(|(a, f)| a - f.re).collect();
    let z = op.solve(&res);
    let num: f64 = res.iter().zip(&z).map(|(a, b)| a * b).sum();
    let den: f64 = v.iter().zip(&lv).map(|(a, b)| a * b).sum();
    (num.max(0.0) / den).sqrt()
}

/// Maps a Weinstein minimiser onto a solution of the ground-state equation
/// on the minimiser's own grid.
///
/// Stationarity of `log W` at `u` reads
/// `S u + omega D u = (h/(theta n)) (A u^p) u^{p-1}` with
/// `omega = (1-theta) h/(theta m)`. Dilating the grid by `b = sqrt(omega)`
/// turns `D` into `omega D` and `A` into `b^{d+alpha-(d-2)p} A` exactly, so
/// `c u` solves the equation on the dilated grid for the constant `c` below.
/// That profile is resampled onto the original nodes (monotone cubic, with
/// the exponential tail beyond the dilated range) and polished there by
/// Petviashvili sweeps until the relative residual is below `tol`.
pub fn rescale_to_ground_state(
    min: &WeinsteinMinimum,
    params: &ModelParams,
    riesz: &RieszOperator,
    tol: f64,
) -> Result<GroundStateResult> {
    riesz.check_grid(&min.field)?;
    let u: Vec<f64> = min.field.values.iter().map(|z| z.re.max(0.0)).collect();
    let grid = &riesz.grid;
    let (p, th) = (params.p, params.theta);
    let su = stiffness(grid).apply(&u);
    let h: f64 = u.iter().zip(&su).map(|(a, b)| a * b).sum();
    let m: f64 = u.iter().zip(&grid.w_2).map(|(a, w)| w * a * a).sum();
    let g: Vec<f64> = u.iter().map(|x| x.powf(p)).collect();
    let ag = riesz.apply_matrix(&g);
    let n: f64 = g.iter().zip(&ag).map(|(a, b)| a * b).sum();

    let omega = (1.0 - th) * h / (th * m);
    let b = omega.sqrt();
    let k = (h / (th * n)).powf(1.0 / (2.0 * p - 2.0));
    let c = k * b.powf(-params.choquard_dilation_degree() / (2.0 * p - 2.0));

    let r_b: Vec<f64> = grid.nodes.iter().map(|r| b * r).collect();
    let mut xs = Vec::with_capacity(r_b.len() + 1);
    let mut ys = Vec::with_capacity(r_b.len() + 1);
    xs.push(0.0);
    ys.push(c * (u[0] - r_b[0] * (u[1] - u[0]) / (r_b[1] - r_b[0])));
    xs.extend_from_slice(&r_b);
    ys.extend(u.iter().map(|x| c * x));
    let rb_max = b * grid.r_max;
    let interp =
        Pchip::new(xs, ys).with_exponential_tail(0.5 * rb_max, 0.75 * rb_max, 0.75 * rb_max);
    let start: Vec<f64> = grid
        .nodes
        .iter()
        .map(|&r| interp.value(r).max(0.0))
        .collect();
    let tail_extended = grid.r_max > 0.75 * rb_max;
    let (v, sweeps) = petviashvili(params, riesz, start, tol, POLISH_SWEEPS)?;
    let q = RadialField::new(
        grid.clone(),
        v.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
    )?;
    let scaled = Arc::new(riesz.clone());
    let (r1, r2) = pohozaev_check(&q, params, &scaled);
    let el = el_residual(&q, &scaled);
    Ok(GroundStateResult {
        el_residual: el,
        polish_sweeps: sweeps,
        tail_extended,
        direct: direct_norms(&q, params, &scaled),
        thresholds: threshold_quantities(min.sharp_c, params),
        sharp_c: min.sharp_c,
        pohozaev_residual_1: r1,
        pohozaev_residual_2: r2,
        iterations: min.iterations,
        converged: min.converged && el < 10.0 * tol,
        dilation: b,
        q,
        riesz: scaled,
    })
}
