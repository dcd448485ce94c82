use std::f64::consts::PI;
use std::sync::Arc;

use anyhow::Result;
use clap::ValueEnum;
use hardy_choquard::analytic::{phase_modulation_energy, FnProfile, RadialProfile};
use hardy_choquard::dynamics::{simulate, SimControls};
use hardy_choquard::groundstate::{pohozaev_ratios, pohozaev_targets, weinstein_value};
use hardy_choquard::{
    build_riesz, make_grid, make_params, Complex64, Grading, RadialField, RadialGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::commands::Context;
use crate::config::{ConfigError, Datum};
use crate::output::{fmt17, Outputs, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Hgn,
    Pohozaev,
    Virial,
    Blowup,
    Phase,
    Riesz,
}

/// One row of the pass/fail table: `value <= tolerance` (or `>=` when `lower`).
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub lower: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            lower: false,
        }
    }

    fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            lower: true,
        }
    }

    pub fn passed(&self) -> bool {
        if self.lower {
            self.value >= self.tolerance
        } else {
            self.value <= self.tolerance
        }
    }
}

/// Runs `suite`, prints the table and returns exit code 0 when every check passed.
pub fn run(ctx: &mut Context, suite: Suite, out: &mut Outputs) -> Result<u8> {
    let checks = match suite {
        Suite::Riesz => riesz(ctx)?,
        Suite::Hgn => hgn(ctx, out)?,
        Suite::Pohozaev => pohozaev(ctx)?,
        Suite::Virial => virial(ctx, out)?,
        Suite::Blowup => blowup(ctx, out)?,
        Suite::Phase => phase(ctx)?,
    };
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut table = Table::new(vec!["value", "tolerance", "passed"]);
    for c in &checks {
        let rel = if c.lower { ">=" } else { "<=" };
        let mark = if c.passed() { "PASS" } else { "FAIL" };
        println!(
            "{mark}  {:width$}  {} {rel} {}",
            c.name,
            fmt17(c.value),
            fmt17(c.tolerance)
        );
        table.push(vec![
            c.value,
            c.tolerance,
            if c.passed() { 1.0 } else { 0.0 },
        ]);
    }
    out.table(
        &format!("verify_{}", format!("{suite:?}").to_lowercase()),
        &table,
    )?;
    Ok(if checks.iter().all(Check::passed) {
        0
    } else {
        1
    })
}

/// Potential of the unit-ball indicator for `alpha = 2` against the
/// Newtonian closed form, on a uniform grid of `[0, 2]`.
fn riesz(ctx: &mut Context) -> Result<Vec<Check>> {
    let d = ctx.params.d;
    let params = make_params(d, 2.0, ctx.params.p)?;
    let grid = Arc::new(make_grid(ctx.config.grid.n, 2.0, Grading::Uniform)?);
    let op = build_riesz(&params, grid.clone())?;
    let f: Vec<f64> = grid
        .nodes
        .iter()
        .map(|&r| if r < 1.0 { 1.0 } else { 0.0 })
        .collect();
    let phi = op.apply_riesz(&f)?;
    let df = d as f64;
    let split = grid.nodes.partition_point(|&r| r < 1.0);
    let mut worst: f64 = 0.0;
    for (j, &r) in grid.nodes.iter().enumerate() {
        if j + 1 == split || j == split {
            continue;
        }
        let exact = if r < 1.0 {
            1.0 / (2.0 * (df - 2.0)) - r * r / (2.0 * df)
        } else {
            r.powf(2.0 - df) / (df * (df - 2.0))
        };
        worst = worst.max((phi[j] - exact).abs() / exact);
    }
    Ok(vec![Check::at_most(
        "ball potential max relative error",
        worst,
        1e-4,
    )])
}

/// Sum of three Gaussian bumps with random centres, widths and amplitudes.
fn random_trial(rng: &mut ChaCha8Rng, grid: &Arc<RadialGrid>) -> RadialField {
    let comps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(0.1..2.0),
                rng.random_range(0.0..4.0),
                rng.random_range(0.3..3.0),
            )
        })
        .collect();
    RadialField::from_real(grid.clone(), |r| {
        comps
            .iter()
            .map(|(a, c, w)| a * (-((r - c) / w).powi(2)).exp())
            .sum()
    })
}

fn hgn(ctx: &mut Context, out: &mut Outputs) -> Result<Vec<Check>> {
    let params = ctx.params;
    let c = ctx.ground_state()?.sharp_c;
    let (seed, trials, grid) = (ctx.config.seed, ctx.config.verify.trials, ctx.grid.clone());
    let op = ctx.op()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Table::new(vec!["trial", "weinstein_ratio"]);
    let mut min_ratio = f64::INFINITY;
    let mut worst_invariance: f64 = 0.0;
    for k in 0..trials {
        let u = random_trial(&mut rng, &grid);
        let w = weinstein_value(&u, &params, op);
        min_ratio = min_ratio.min(w / c);
        table.push(vec![k as f64, w / c]);
        let s = rng.random_range(0.1..10.0);
        let scaled = weinstein_value(&u.scale_real(s), &params, op);
        worst_invariance = worst_invariance.max((scaled / w - 1.0).abs());
    }
    out.table("hgn_trials", &table)?;
    println!("min W/C over {trials} trials: {}", fmt17(min_ratio));
    Ok(vec![
        Check::at_least("min W(u)/C", min_ratio, 1.0 - 1e-3),
        Check::at_most("scalar invariance of W", worst_invariance, 1e-6),
    ])
}

fn pohozaev(ctx: &mut Context) -> Result<Vec<Check>> {
    let params = ctx.params;
    let q = ctx.ground_state()?.q.clone();
    let (r1, r2) = pohozaev_ratios(&q, &params, ctx.op()?);
    let (t1, t2) = pohozaev_targets(&params);
    Ok(vec![
        Check::at_most("N/M^2 relative residual", (r1 - t1).abs() / t1, 1e-3),
        Check::at_most("H^2/M^2 relative residual", (r2 - t2).abs() / t2, 1e-3),
    ])
}

fn virial(ctx: &mut Context, out: &mut Outputs) -> Result<Vec<Check>> {
    let u0 = if ctx.config.datum.is_some() {
        ctx.datum(None)?
    } else {
        RadialField::from_fn(ctx.grid.clone(), |r| {
            Complex64::from_polar(0.6 * (-r * r / 4.5).exp(), 0.05 * r * r)
        })
    };
    let params = ctx.params;
    let dync = ctx.config.dynamics;
    let h = dync.snapshot_interval.unwrap_or(0.02);
    let t_end = (20.0 * h).min(dync.t_end.max(2.0 * h));
    let ctl = SimControls {
        snapshot_interval: Some(h),
        ..dync.controls()
    };
    let traj = simulate(&u0, &params, ctx.op()?, dync.dt0, t_end, &ctl)?;
    let st = &traj.states;
    let mut table = Table::new(vec!["t", "gamma_second_fd", "gamma_second_identity"]);
    let mut worst: f64 = 0.0;
    for k in 1..st.len().saturating_sub(1) {
        let hh = st[k + 1].t - st[k].t;
        let fd = (st[k + 1].diagnostics.gamma - 2.0 * st[k].diagnostics.gamma
            + st[k - 1].diagnostics.gamma)
            / (hh * hh);
        let id = st[k].diagnostics.gamma_second;
        table.push(vec![st[k].t, fd, id]);
        worst = worst.max((fd - id).abs() / (1e-3 * id.abs()).max(10.0 * hh * hh));
    }
    out.table("virial", &table)?;
    Ok(vec![Check::at_most(
        "max |FD - identity| / max(1e-3 |identity|, 10 h^2)",
        worst,
        1.0,
    )])
}

fn blowup(ctx: &mut Context, out: &mut Outputs) -> Result<Vec<Check>> {
    if !ctx.params.mass_critical {
        return Err(ConfigError(
            "suite blowup needs the mass-critical exponent p = (d+alpha+2)/d".into(),
        )
        .into());
    }
    let (t_b, lambda, gamma) = match ctx.config.datum {
        Some(Datum::Pseudoconformal {
            blowup_time,
            lambda,
            gamma,
        }) => (blowup_time, lambda, gamma),
        _ => (1.0, 1.0, 0.0),
    };
    let sol = ctx.pseudoconformal(t_b, lambda, gamma)?;
    let op = ctx.op()?;
    let mut table = Table::new(vec![
        "t",
        "mass",
        "energy",
        "gamma",
        "gamma_law_residual",
        "hardy_growth",
    ]);
    let mut worst: f64 = 0.0;
    for k in 0..8 {
        let t = k as f64 * t_b / 8.0;
        let rep = sol.minimal_mass_diagnostics(t, op)?;
        table.push(vec![
            t,
            rep.mass,
            rep.energy,
            rep.gamma_t,
            rep.gamma_law_residual,
            rep.hardy_growth,
        ]);
        if k <= 6 {
            worst = worst.max(rep.gamma_law_residual);
        }
    }
    out.table("blowup", &table)?;
    let conc = sol.mass_concentration(t_b * (1.0 - 1e-3), 1.0)? / sol.q_mass;
    Ok(vec![
        Check::at_most("second-moment law residual, t <= 3T/4", worst, 1e-3),
        Check::at_least("mass in B_1 at T(1-1e-3) / M_gs^2", conc, 0.99),
    ])
}

/// `r^2` cut off smoothly well inside the grid.
fn cutoff_phase(width: f64) -> impl RadialProfile {
    FnProfile {
        f: move |r: f64| Complex64::new(r * r * (-(r / width).powi(8)).exp(), 0.0),
        df: move |r: f64| {
            let x = (r / width).powi(8);
            Complex64::new((2.0 * r - 8.0 * r * x) * (-x).exp(), 0.0)
        },
    }
}

fn chirped_gaussians(rng: &mut ChaCha8Rng) -> impl RadialProfile {
    let terms: Vec<(Complex64, f64, f64)> = (0..3)
        .map(|_| {
            let c =
                Complex64::from_polar(rng.random_range(0.2..1.5), rng.random_range(0.0..2.0 * PI));
            (c, rng.random_range(0.5..2.5), rng.random_range(-0.5..0.5))
        })
        .collect();
    let dterms = terms.clone();
    let i = Complex64::new(0.0, 1.0);
    FnProfile {
        f: move |r: f64| {
            terms
                .iter()
                .map(|(c, w, b)| c * (-r * r / (2.0 * w * w) + i * b * r * r).exp())
                .sum()
        },
        df: move |r: f64| {
            dterms
                .iter()
                .map(|(c, w, b)| {
                    c * (-r / (w * w) + 2.0 * i * b * r)
                        * (-r * r / (2.0 * w * w) + i * b * r * r).exp()
                })
                .sum()
        },
    }
}

fn phase(ctx: &mut Context) -> Result<Vec<Check>> {
    let params = ctx.params;
    let width_cap = 0.2 * ctx.grid.r_max;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.config.seed);
    let op = ctx.op()?;
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let v = chirped_gaussians(&mut rng);
        let phi = cutoff_phase(rng.random_range(0.4..1.0) * width_cap);
        let s = [0.1, -0.1, 1.0, -1.0][k % 4];
        let id = phase_modulation_energy(&v, &phi, s, &params, op)?;
        worst = worst.max(id.residual());
    }
    Ok(vec![Check::at_most(
        "max |lhs - rhs| / (|lhs| + |rhs|)",
        worst,
        1e-8,
    )])
}
