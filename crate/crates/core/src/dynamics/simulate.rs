use std::io::Write;

use serde::{Deserialize, Serialize};

use super::scheme::{Propagator, SchemeOptions, SimState};
use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::functionals::hardy_seminorm_sq;
use crate::params::ModelParams;
use crate::riesz::RieszOperator;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimControls {
    /// Blow-up is declared once `||sqrt(L) u(t)|| >= blowup_factor ||sqrt(L) u(0)||`.
    pub blowup_factor: f64,
    /// Time between recorded snapshots; `None` records 100 evenly spaced ones.
    pub snapshot_interval: Option<f64>,
    /// Constant `c` of the rule `dt = min(dt0, c / max(1, ||sqrt(L) u||^2))`;
    /// `None` takes `dt0 max(1, ||sqrt(L) u(0)||^2)`, so stepping starts at `dt0`.
    pub dt_scale: Option<f64>,
    pub dt_floor: f64,
    /// Halvings of a step whose fixed point failed before giving up.
    pub max_retries: usize,
    pub max_steps: usize,
    /// Largest admissible mass fraction in `[0.9 r_max, r_max]`.
    pub boundary_tol: f64,
    pub scheme: SchemeOptions,
}

impl Default for SimControls {
    fn default() -> Self {
        SimControls {
            blowup_factor: 1e3,
            snapshot_interval: None,
            dt_scale: None,
            dt_floor: 1e-12,
            max_retries: 8,
            max_steps: 10_000_000,
            boundary_tol: 1e-8,
            scheme: SchemeOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Status {
    Running,
    Completed,
    /// Blow-up threshold crossed; `t_est` extrapolates `1/||sqrt(L) u||` to zero.
    BlowUpDetected {
        t_est: f64,
    },
    StepFailure {
        t: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    /// `max |M(t) - M(0)| / M(0)` over the snapshots.
    pub mass_drift: f64,
    /// `max |E(t) - E(0)|` relative to `|E(0)|`, or to `||sqrt(L) u(0)||^2 / 2`
    /// when `|E(0)|` is below `1e-6` of it.
    pub energy_drift: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Snapshots in increasing time, starting with `t = 0`.
    pub states: Vec<SimState>,
    pub status: Status,
    pub conservation_drift: ConservationReport,
    /// Largest mass fraction in `[0.9 r_max, r_max]` over the snapshots.
    pub boundary_fraction: f64,
    /// `boundary_fraction` exceeded the tolerance: reflections from `r_max`
    /// may have entered the solution.
    pub boundary_contaminated: bool,
    /// `sup_t ||sqrt(L) u(t)||` over every step, not only the snapshots.
    pub max_hardy_norm: f64,
    pub steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &SimState {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }
}

/// Mass fraction carried by `[0.9 r_max, r_max]`.
pub fn boundary_mass_fraction(f: &RadialField) -> f64 {
    let g = &f.grid;
    let cut = 0.9 * g.r_max;
    let (mut outer, mut total) = (0.0, 0.0);
    for j in 0..g.len() {
        let m = g.w_2[j] * f.values[j].norm_sqr();
        total += m;
        if g.nodes[j] >= cut {
            outer += m;
        }
    }
    if total > 0.0 {
        outer / total
    } else {
        0.0
    }
}

pub fn conservation_report(traj: &Trajectory) -> Result<ConservationReport> {
    conservation_of(&traj.states)
}

fn conservation_of(states: &[SimState]) -> Result<ConservationReport> {
    if states.len() < 2 {
        return Err(Error::TooFewSnapshots(states.len()));
    }
    let d0 = states[0].diagnostics;
    let e_scale = d0.energy.abs().max(1e-6 * 0.5 * d0.hardy_norm_sq);
    let mut rep = ConservationReport {
        mass_drift: 0.0,
        energy_drift: 0.0,
    };
    for s in &states[1..] {
        let d = s.diagnostics;
        rep.mass_drift = rep.mass_drift.max((d.mass - d0.mass).abs() / d0.mass);
        rep.energy_drift = rep.energy_drift.max((d.energy - d0.energy).abs() / e_scale);
    }
    Ok(rep)
}

/// Zero of the least-squares line through the last points of `(t, 1/H)`.
fn extrapolate_blowup(hist: &[(f64, f64)]) -> Option<f64> {
    let n = hist.len() as f64;
    if hist.len() < 2 {
        return None;
    }
    let mt = hist.iter().map(|p| p.0).sum::<f64>() / n;
    let my = hist.iter().map(|p| p.1).sum::<f64>() / n;
    let sty: f64 = hist.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let stt: f64 = hist.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    let slope = sty / stt;
    (slope < 0.0 && slope.is_finite()).then(|| mt - my / slope)
}

const BLOWUP_FIT_POINTS: usize = 8;

/// Adaptive Crank-Nicolson integration of `u0` up to `t_end`.
///
/// The step is `min(dt0, c / max(1, ||sqrt(L) u||^2))`, floored at
/// `dt_floor` and shortened to land exactly on each snapshot time. A step
/// whose fixed point fails is retried with half the length.
pub fn simulate(
    u0: &RadialField,
    params: &ModelParams,
    riesz: &RieszOperator,
    dt0: f64,
    t_end: f64,
    controls: &SimControls,
) -> Result<Trajectory> {
    params.require_dynamics()?;
    riesz.check_grid(u0)?;
    if !(dt0 > 0.0 && dt0.is_finite()) || !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need dt0 > 0 and t_end > 0, got dt0 = {dt0}, t_end = {t_end}"
        )));
    }
    let interval = controls.snapshot_interval.unwrap_or(t_end / 100.0);
    if !(interval > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "snapshot interval must be positive, got {interval}"
        )));
    }
    let prop = Propagator::new(riesz, controls.scheme);
    let first = SimState::new(u0.clone(), 0.0, dt0, params, riesz)?;
    let h0 = first.diagnostics.hardy_norm_sq.sqrt();
    let c = controls
        .dt_scale
        .unwrap_or(dt0 * first.diagnostics.hardy_norm_sq.max(1.0));
    let mut boundary_fraction = boundary_mass_fraction(u0);
    let mut states = vec![first];
    let mut v = u0.values.clone();
    let mut t = 0.0;
    let mut h2 = h0 * h0;
    let mut max_hardy_norm = h0;
    let mut snap_index = 1usize;
    let mut hist: Vec<(f64, f64)> = Vec::with_capacity(BLOWUP_FIT_POINTS + 1);
    let (mut steps, mut rejected) = (0usize, 0usize);
    let mut status = Status::Running;
    let grid = u0.grid.clone();

    while status == Status::Running {
        if steps >= controls.max_steps {
            status = Status::StepFailure { t };
            break;
        }
        let target = (snap_index as f64 * interval).min(t_end);
        let mut dt = dt0.min(c / h2.max(1.0)).max(controls.dt_floor);
        let lands = t + dt >= target;
        if lands {
            dt = target - t;
        }
        let mut attempt = 0;
        let advanced = loop {
            match prop.advance(&v, dt) {
                Ok((next, _)) => break Some(next),
                Err(Error::StepFailure { .. })
                    if attempt < controls.max_retries && 0.5 * dt >= controls.dt_floor =>
                {
                    attempt += 1;
                    rejected += 1;
                    dt *= 0.5;
                }
                Err(Error::StepFailure { .. }) => break None,
                Err(e) => return Err(e),
            }
        };
        let Some(next) = advanced else {
            status = Status::StepFailure { t };
            break;
        };
        let landed = lands && attempt == 0;
        v = next;
        t = if landed { target } else { t + dt };
        steps += 1;
        let field = RadialField::new(grid.clone(), v.clone())?;
        h2 = hardy_seminorm_sq(&field, params);
        let h = h2.sqrt();
        max_hardy_norm = max_hardy_norm.max(h);
        if hist.len() == BLOWUP_FIT_POINTS {
            hist.remove(0);
        }
        hist.push((t, 1.0 / h));
        let blown = h >= controls.blowup_factor * h0 || !h.is_finite();
        if blown || landed {
            boundary_fraction = boundary_fraction.max(boundary_mass_fraction(&field));
            states.push(SimState::new(field, t, dt, params, riesz)?);
        }
        if blown {
            let t_est = extrapolate_blowup(&hist).filter(|x| *x >= t).unwrap_or(t);
            status = Status::BlowUpDetected { t_est };
        } else if landed {
            snap_index += 1;
            if target >= t_end {
                status = Status::Completed;
            }
        }
    }
    let conservation_drift = if states.len() >= 2 {
        conservation_of(&states)?
    } else {
        ConservationReport {
            mass_drift: 0.0,
            energy_drift: 0.0,
        }
    };
    Ok(Trajectory {
        states,
        status,
        conservation_drift,
        boundary_contaminated: boundary_fraction > controls.boundary_tol,
        boundary_fraction,
        max_hardy_norm,
        steps,
        rejected_steps: rejected,
    })
}

/// Diagnostics as CSV with columns
/// `t,mass,energy,hardy_norm,gamma,gamma_prime,gamma_second,dt`.
pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &Trajectory) -> Result<()> {
    writeln!(
        w,
        "t,mass,energy,hardy_norm,gamma,gamma_prime,gamma_second,dt"
    )?;
    for s in &traj.states {
        let d = s.diagnostics;
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.t,
            d.mass,
            d.energy,
            d.hardy_norm_sq.sqrt(),
            d.gamma,
            d.gamma_prime,
            d.gamma_second,
            s.dt
        )?;
    }
    Ok(())
}
