use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::sync::Arc;

use anyhow::{Context as _, Result};
use hardy_choquard::analytic::PseudoconformalSolution;
use hardy_choquard::dynamics::{classify, simulate, Status, Trajectory, Verdict, VerdictKind};
use hardy_choquard::groundstate::{
    asymptotics_report, gaussian_initial_guess, minimize_weinstein, pohozaev_ratios,
    pohozaev_targets, rescale_to_ground_state, GroundStateResult, Thresholds,
};
use hardy_choquard::{
    build_riesz, make_grid, make_params, read_field, write_field, Complex64, Error, ModelParams,
    RadialField, RadialGrid, RieszOperator,
};
use serde_json::{json, Value};

use crate::config::{ConfigError, Datum, InitGuess, RunConfig};
use crate::output::{fmt17, num, Outputs, Table};

/// Model, grid and (on demand) operator and ground state of one run.
pub struct Context {
    pub config: RunConfig,
    pub params: ModelParams,
    pub grid: Arc<RadialGrid>,
    op: Option<RieszOperator>,
    gs: Option<GroundStateResult>,
}

impl Context {
    pub fn new(config: RunConfig) -> Result<Self> {
        let m = config.model;
        let params = make_params(m.d, m.alpha, m.p)?;
        let g = config.grid;
        let grid = Arc::new(make_grid(g.n, g.r_max, g.grading)?);
        Ok(Context {
            config,
            params,
            grid,
            op: None,
            gs: None,
        })
    }

    pub fn op(&mut self) -> Result<&RieszOperator> {
        if self.op.is_none() {
            self.op = Some(build_riesz(&self.params, self.grid.clone())?);
        }
        Ok(self.op.as_ref().expect("operator built"))
    }

    pub fn ground_state(&mut self) -> Result<&GroundStateResult> {
        if self.gs.is_none() {
            self.params.require_ground_state_range()?;
            let init = match &self.config.solver.init {
                InitGuess::Gaussian => gaussian_initial_guess(&self.params, self.grid.clone()),
                InitGuess::File { path } => self.read_datum_file(path)?,
            };
            let (tol, max_iter) = (self.config.solver.tol, self.config.solver.max_iter);
            let params = self.params;
            let op = self.op()?;
            let min = minimize_weinstein(&params, op, &init, tol, max_iter)?;
            let gs = rescale_to_ground_state(&min, &params, op, tol)?;
            self.gs = Some(gs);
        }
        Ok(self.gs.as_ref().expect("ground state computed"))
    }

    fn read_datum_file(&self, path: &Path) -> Result<RadialField> {
        let file = fs::File::open(path)
            .map_err(|e| ConfigError(format!("cannot open {}: {e}", path.display())))?;
        let (field, _) = read_field(BufReader::new(file))
            .with_context(|| format!("reading {}", path.display()))?;
        if *field.grid != *self.grid {
            return Err(Error::GridMismatch(format!(
                "{} was written on a different grid",
                path.display()
            ))
            .into());
        }
        Ok(field.with_grid(self.grid.clone())?)
    }

    /// The initial datum: `path` overrides the `datum` section.
    pub fn datum(&mut self, path: Option<&Path>) -> Result<RadialField> {
        if let Some(p) = path {
            return self.read_datum_file(p);
        }
        let datum = self
            .config
            .datum
            .clone()
            .ok_or_else(|| ConfigError("missing key `datum` (or pass --datum FILE)".into()))?;
        match datum {
            Datum::Gaussian {
                amplitude,
                width,
                chirp,
            } => Ok(RadialField::from_fn(self.grid.clone(), |r| {
                Complex64::from_polar(
                    amplitude * (-r * r / (2.0 * width * width)).exp(),
                    chirp * r * r,
                )
            })),
            Datum::GroundState { scale } => Ok(self.ground_state()?.q.scale_real(scale)),
            Datum::Pseudoconformal {
                blowup_time,
                lambda,
                gamma,
            } => {
                let sol = self.pseudoconformal(blowup_time, lambda, gamma)?;
                Ok(sol.evaluate(0.0, self.grid.clone())?)
            }
            Datum::File { path } => self.read_datum_file(&path),
        }
    }

    pub fn pseudoconformal(
        &mut self,
        t: f64,
        lambda: f64,
        gamma: f64,
    ) -> Result<PseudoconformalSolution> {
        let params = self.params;
        let q = self.ground_state()?.q.clone();
        Ok(PseudoconformalSolution::new(q, &params, t, lambda, gamma)?)
    }

    /// Classification with ground-state constants computed only when a
    /// branch needs them.
    pub fn classify(&mut self, u0: &RadialField) -> Result<Verdict> {
        let params = self.params;
        match classify(u0, &params, self.op()?, None) {
            Err(Error::MissingGroundState(_)) => {
                let t: Thresholds = self.ground_state()?.thresholds;
                Ok(classify(u0, &params, self.op()?, Some(&t))?)
            }
            other => Ok(other?),
        }
    }
}

fn thresholds_json(t: &Thresholds) -> Value {
    json!({"m_gs": num(t.m_gs), "h_gs": num(t.h_gs), "n_gs": num(t.n_gs), "e_gs": num(t.e_gs)})
}

fn verdict_json(v: &Verdict) -> Value {
    let w: Vec<Value> = v
        .witnesses
        .iter()
        .map(|w| json!({"name": w.name, "lhs": num(w.lhs), "relation": w.relation, "rhs": num(w.rhs), "holds": w.holds}))
        .collect();
    json!({"verdict": format!("{:?}", v.kind), "witnesses": w, "gamma_outer_fraction": num(v.gamma_outer_fraction)})
}

pub fn print_verdict(v: &Verdict) {
    println!("verdict: {:?}", v.kind);
    for w in &v.witnesses {
        let mark = if w.holds { "holds" } else { "fails" };
        println!(
            "  {}: {} {} {} [{mark}]",
            w.name,
            fmt17(w.lhs),
            w.relation,
            fmt17(w.rhs)
        );
    }
    println!("  gamma_outer_fraction: {}", fmt17(v.gamma_outer_fraction));
}

/// Exit code 1 when the descent did not converge.
pub fn ground_state(ctx: &mut Context, out: &mut Outputs) -> Result<u8> {
    let params = ctx.params;
    let gs = ctx.ground_state()?.clone();
    let op = ctx.op()?;
    let (r1, r2) = pohozaev_ratios(&gs.q, &params, op);
    let (t1, t2) = pohozaev_targets(&params);
    let asym = asymptotics_report(&gs.q, &params);
    let doc = json!({
        "model": {"d": params.d, "alpha": num(params.alpha), "p": num(params.p), "theta": num(params.theta)},
        "sharp_constant": num(gs.sharp_c),
        "thresholds": thresholds_json(&gs.thresholds),
        "direct_norms": thresholds_json(&gs.direct),
        "pohozaev": {
            "ratio_choquard": num(r1), "target_choquard": num(t1), "residual_choquard": num(gs.pohozaev_residual_1),
            "ratio_hardy": num(r2), "target_hardy": num(t2), "residual_hardy": num(gs.pohozaev_residual_2),
        },
        "equation_residual": num(gs.el_residual),
        "asymptotics": {"v0": num(asym.v0), "far_prefactor": num(asym.far_prefactor), "far_rate": num(asym.far_rate)},
        "iterations": gs.iterations,
        "polish_sweeps": gs.polish_sweeps,
        "converged": gs.converged,
    });
    out.json("ground_state.json", &doc)?;
    let path = out.path("profile.txt");
    let file =
        fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    write_field(std::io::BufWriter::new(file), &gs.q, &params)?;

    println!("sharp constant C = {}", fmt17(gs.sharp_c));
    println!("pohozaev  N/M^2 = {} (target {})", fmt17(r1), fmt17(t1));
    println!("pohozaev  H^2/M^2 = {} (target {})", fmt17(r2), fmt17(t2));
    println!(
        "M_gs = {}  H_gs = {}",
        fmt17(gs.thresholds.m_gs),
        fmt17(gs.thresholds.h_gs)
    );
    println!("converged: {}", gs.converged);
    if !gs.converged {
        return Err(Error::NonConvergence(format!(
            "Weinstein descent stopped after {} iterations",
            gs.iterations
        ))
        .into());
    }
    Ok(0)
}

pub fn trajectory_table(traj: &Trajectory) -> Table {
    let mut t = Table::new(vec![
        "t",
        "mass",
        "energy",
        "hardy_norm",
        "gamma",
        "gamma_prime",
        "gamma_second",
        "dt",
    ]);
    for s in &traj.states {
        let d = s.diagnostics;
        t.push(vec![
            s.t,
            d.mass,
            d.energy,
            d.hardy_norm_sq.sqrt(),
            d.gamma,
            d.gamma_prime,
            d.gamma_second,
            s.dt,
        ]);
    }
    t
}

fn status_json(s: Status) -> Value {
    match s {
        Status::Running => json!({"kind": "Running"}),
        Status::Completed => json!({"kind": "Completed"}),
        Status::BlowUpDetected { t_est } => json!({"kind": "BlowUpDetected", "t_est": num(t_est)}),
        Status::StepFailure { t } => json!({"kind": "StepFailure", "t": num(t)}),
    }
}

/// Whether the observed outcome agrees with the verdict.
fn agreement(kind: VerdictKind, status: Status) -> &'static str {
    let predicts_blowup = matches!(
        kind,
        VerdictKind::BlowUpNegativeEnergy | VerdictKind::BlowUpAboveThreshold
    );
    match (kind, status) {
        (VerdictKind::Undetermined, _) => "no prediction",
        (_, Status::BlowUpDetected { .. }) if predicts_blowup => "consistent",
        (_, Status::Completed) if !predicts_blowup => "consistent",
        (_, Status::Completed) => "inconclusive: blow-up not reached before t_end",
        (_, Status::BlowUpDetected { .. }) => "inconsistent: growth detected for a global verdict",
        _ => "inconclusive",
    }
}

/// Exit code 1 on a step failure.
pub fn simulate_cmd(ctx: &mut Context, datum: Option<&Path>, out: &mut Outputs) -> Result<u8> {
    let u0 = ctx.datum(datum)?;
    let verdict = ctx.classify(&u0)?;
    let dync = ctx.config.dynamics;
    let params = ctx.params;
    let traj = simulate(
        &u0,
        &params,
        ctx.op()?,
        dync.dt0,
        dync.t_end,
        &dync.controls(),
    )?;
    out.table("trajectory", &trajectory_table(&traj))?;
    let path = out.path("final_field.txt");
    let file =
        fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    write_field(std::io::BufWriter::new(file), &traj.last().field, &params)?;
    let doc = json!({
        "status": status_json(traj.status),
        "steps": traj.steps,
        "rejected_steps": traj.rejected_steps,
        "mass_drift": num(traj.conservation_drift.mass_drift),
        "energy_drift": num(traj.conservation_drift.energy_drift),
        "boundary_fraction": num(traj.boundary_fraction),
        "boundary_contaminated": traj.boundary_contaminated,
        "max_hardy_norm": num(traj.max_hardy_norm),
        "initial_verdict": verdict_json(&verdict),
        "agreement": agreement(verdict.kind, traj.status),
    });
    out.json("summary.json", &doc)?;
    println!("status: {:?}", traj.status);
    println!("steps: {} (rejected {})", traj.steps, traj.rejected_steps);
    println!("mass drift: {}", fmt17(traj.conservation_drift.mass_drift));
    println!(
        "energy drift: {}",
        fmt17(traj.conservation_drift.energy_drift)
    );
    if traj.boundary_contaminated {
        println!(
            "warning: boundary mass fraction {} exceeds tolerance",
            fmt17(traj.boundary_fraction)
        );
    }
    println!(
        "initial verdict: {:?} ({})",
        verdict.kind,
        agreement(verdict.kind, traj.status)
    );
    match traj.status {
        Status::StepFailure { t } => {
            Err(Error::NonConvergence(format!("step failure at t = {}", fmt17(t))).into())
        }
        _ => Ok(0),
    }
}

pub fn classify_cmd(ctx: &mut Context, datum: Option<&Path>, out: &mut Outputs) -> Result<u8> {
    let u0 = ctx.datum(datum)?;
    let verdict = ctx.classify(&u0)?;
    print_verdict(&verdict);
    out.json("verdict.json", &verdict_json(&verdict))?;
    Ok(0)
}
