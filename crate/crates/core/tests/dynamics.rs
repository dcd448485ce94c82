use std::sync::{Arc, OnceLock};

use hardy_choquard::dynamics::*;
use hardy_choquard::groundstate::{compute_ground_state, GroundStateResult, SolverOptions};
use hardy_choquard::*;
use proptest::prelude::*;

struct Setup {
    params: ModelParams,
    grid: Arc<RadialGrid>,
    op: RieszOperator,
}

fn setup(alpha: f64, p: f64, n: usize, r_max: f64) -> Setup {
    let params = make_params(3, alpha, p).unwrap();
    let grid = Arc::new(make_grid(n, r_max, Grading::Algebraic { power: 2.0 }).unwrap());
    let op = build_riesz(&params, grid.clone()).unwrap();
    Setup { params, grid, op }
}

/// Case (a) parameters: `2 < p < 7/3`.
fn subcritical() -> &'static Setup {
    static S: OnceLock<Setup> = OnceLock::new();
    S.get_or_init(|| setup(2.0, 2.2, 512, 30.0))
}

fn cubic() -> &'static Setup {
    static S: OnceLock<Setup> = OnceLock::new();
    S.get_or_init(|| setup(2.0, 3.0, 1024, 40.0))
}

fn cubic_ground_state() -> &'static GroundStateResult {
    static G: OnceLock<GroundStateResult> = OnceLock::new();
    G.get_or_init(|| {
        let s = cubic();
        compute_ground_state(&s.params, &s.op, SolverOptions::default()).unwrap()
    })
}

fn critical() -> &'static Setup {
    static S: OnceLock<Setup> = OnceLock::new();
    S.get_or_init(|| setup(2.0, 7.0 / 3.0, 512, 30.0))
}

fn critical_ground_state() -> &'static GroundStateResult {
    static G: OnceLock<GroundStateResult> = OnceLock::new();
    G.get_or_init(|| {
        let s = critical();
        compute_ground_state(&s.params, &s.op, SolverOptions::default()).unwrap()
    })
}

fn gaussian(grid: &Arc<RadialGrid>, amp: f64, width: f64, chirp: f64) -> RadialField {
    RadialField::from_fn(grid.clone(), |r| {
        Complex64::from_polar(amp * (-r * r / (2.0 * width * width)).exp(), chirp * r * r)
    })
}

fn l2_dist(a: &RadialField, b: &RadialField) -> f64 {
    let w = &a.grid.w_2;
    let num: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .zip(w)
        .map(|((x, y), w)| w * (x - y).norm_sqr())
        .sum();
    let den: f64 = a.values.iter().zip(w).map(|(x, w)| w * x.norm_sqr()).sum();
    (num / den).sqrt()
}

#[test]
fn zero_field_stays_zero() {
    let s = subcritical();
    let z = RadialField::zeros(s.grid.clone());
    let st = SimState::new(z, 0.0, 1e-3, &s.params, &s.op).unwrap();
    let next = step(&st, 1e-3, &s.op, &s.params).unwrap();
    assert!(next.field.is_zero());
    assert!((next.t - 1e-3).abs() < 1e-18);
}

#[test]
fn rejects_bad_step_sizes() {
    let s = subcritical();
    let st = SimState::new(
        gaussian(&s.grid, 0.5, 1.0, 0.0),
        0.0,
        1e-3,
        &s.params,
        &s.op,
    )
    .unwrap();
    assert!(step(&st, 0.0, &s.op, &s.params).is_err());
    assert!(step(&st, f64::NAN, &s.op, &s.params).is_err());
}

#[test]
fn steps_are_time_reversible() {
    let s = subcritical();
    let u0 = gaussian(&s.grid, 1.0, 1.5, 0.1);
    let st = SimState::new(u0.clone(), 0.0, 1e-2, &s.params, &s.op).unwrap();
    let fwd = step(&st, 1e-2, &s.op, &s.params).unwrap();
    let back = step(&fwd, -1e-2, &s.op, &s.params).unwrap();
    assert!(
        l2_dist(&u0, &back.field) <= 1e-8,
        "{}",
        l2_dist(&u0, &back.field)
    );
    assert!(back.t.abs() < 1e-15);
}

#[test]
fn linear_mode_conserves_mass() {
    let s = subcritical();
    let opts = SchemeOptions {
        nonlinear: false,
        ..SchemeOptions::default()
    };
    let mut st = SimState::new(
        gaussian(&s.grid, 1.0, 1.0, 0.3),
        0.0,
        1e-2,
        &s.params,
        &s.op,
    )
    .unwrap();
    let m0 = st.diagnostics.mass;
    for _ in 0..20 {
        let m = st.diagnostics.mass;
        st = step_with(&st, 1e-2, &s.op, &s.params, opts).unwrap();
        assert!((st.diagnostics.mass - m).abs() / m0 <= 1e-12);
    }
}

#[test]
fn nonlinear_steps_conserve_mass() {
    let s = subcritical();
    let mut st = SimState::new(
        gaussian(&s.grid, 1.2, 1.0, 0.2),
        0.0,
        1e-2,
        &s.params,
        &s.op,
    )
    .unwrap();
    let m0 = st.diagnostics.mass;
    for _ in 0..50 {
        let m = st.diagnostics.mass;
        st = step(&st, 1e-2, &s.op, &s.params).unwrap();
        assert!((st.diagnostics.mass - m).abs() / m0 <= 1e-10);
    }
}

#[test]
fn gauge_invariance() {
    let s = subcritical();
    let u0 = gaussian(&s.grid, 1.0, 1.2, 0.15);
    let g = Complex64::from_polar(1.0, 0.7);
    let a = SimState::new(u0.clone(), 0.0, 1e-2, &s.params, &s.op).unwrap();
    let b = SimState::new(u0.scale(g), 0.0, 1e-2, &s.params, &s.op).unwrap();
    let (mut a, mut b) = (a, b);
    for _ in 0..10 {
        a = step(&a, 1e-2, &s.op, &s.params).unwrap();
        b = step(&b, 1e-2, &s.op, &s.params).unwrap();
    }
    assert!(l2_dist(&a.field.scale(g), &b.field) <= 1e-9);
}

#[test]
fn conservation_over_unit_time_is_second_order() {
    let s = subcritical();
    let u0 = gaussian(&s.grid, 1.0, 1.0, 0.0);
    let ctl = SimControls {
        snapshot_interval: Some(0.05),
        ..SimControls::default()
    };
    let coarse = simulate(&u0, &s.params, &s.op, 1e-3, 1.0, &ctl).unwrap();
    let fine = simulate(&u0, &s.params, &s.op, 5e-4, 1.0, &ctl).unwrap();
    assert_eq!(coarse.status, Status::Completed);
    assert!(
        !coarse.boundary_contaminated,
        "{}",
        coarse.boundary_fraction
    );
    let (c, f) = (coarse.conservation_drift, fine.conservation_drift);
    assert!(c.mass_drift <= 1e-6 && c.energy_drift <= 1e-6, "{c:?}");
    let ratio = c.energy_drift / f.energy_drift;
    assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    assert_eq!(conservation_report(&coarse).unwrap(), c);
}

#[test]
fn single_snapshot_report_is_rejected() {
    let s = subcritical();
    let st = SimState::new(
        gaussian(&s.grid, 0.5, 1.0, 0.0),
        0.0,
        1e-3,
        &s.params,
        &s.op,
    )
    .unwrap();
    let traj = Trajectory {
        states: vec![st],
        status: Status::Running,
        conservation_drift: ConservationReport {
            mass_drift: 0.0,
            energy_drift: 0.0,
        },
        boundary_fraction: 0.0,
        boundary_contaminated: false,
        max_hardy_norm: 0.0,
        steps: 0,
        rejected_steps: 0,
    };
    assert_eq!(conservation_report(&traj), Err(Error::TooFewSnapshots(1)));
}

#[test]
fn virial_second_derivative_matches_identity() {
    let s = cubic();
    let u0 = gaussian(&s.grid, 0.6, 1.5, 0.05);
    let h = 0.02;
    let ctl = SimControls {
        snapshot_interval: Some(h),
        ..SimControls::default()
    };
    let traj = simulate(&u0, &s.params, &s.op, 1e-3, 0.4, &ctl).unwrap();
    let st = &traj.states;
    for k in 1..st.len() - 1 {
        let fd = (st[k + 1].diagnostics.gamma - 2.0 * st[k].diagnostics.gamma
            + st[k - 1].diagnostics.gamma)
            / (h * h);
        let id = st[k].diagnostics.gamma_second;
        assert!(
            (fd - id).abs() <= (1e-3 * id.abs()).max(10.0 * h * h),
            "t {} fd {fd} id {id}",
            st[k].t
        );
        let fd1 = (st[k + 1].diagnostics.gamma - st[k - 1].diagnostics.gamma) / (2.0 * h);
        let g1 = st[k].diagnostics.gamma_prime;
        assert!((fd1 - g1).abs() <= 1e-3 * g1.abs().max(1.0));
    }
    let (g, g1, g2) = virial_diagnostics(&st[0], &s.params, &s.op);
    let d = st[0].diagnostics;
    assert_eq!((g, g1, g2), (d.gamma, d.gamma_prime, d.gamma_second));
}

#[test]
fn virial_special_cases() {
    let s = critical();
    let u = gaussian(&s.grid, 1.0, 1.0, 0.0);
    let d = diagnostics(&u, &s.params, &s.op);
    assert_eq!(d.gamma_prime, 0.0);
    assert!((d.gamma_second - 16.0 * d.energy).abs() <= 1e-12 * d.energy.abs().max(1.0));
}

#[test]
fn classify_mass_critical_below_ground_state() {
    let s = critical();
    let gs = critical_ground_state();
    let u0 = gs.q.scale_real(0.9);
    let v = classify(&u0, &s.params, &s.op, Some(&gs.thresholds)).unwrap();
    assert_eq!(v.kind, VerdictKind::GlobalCaseB);
    let w = v
        .witnesses
        .iter()
        .find(|w| w.name.starts_with("||u0||"))
        .unwrap();
    assert!((w.lhs / w.rhs - 0.9).abs() < 1e-3);
    assert_eq!(
        classify(&u0, &s.params, &s.op, None),
        Err(Error::MissingGroundState("mass-critical"))
    );
}

#[test]
fn classify_negative_energy_and_fallthrough() {
    let s = cubic();
    let gs = &cubic_ground_state().thresholds;
    let big = gaussian(&s.grid, 3.0, 1.0, 0.0);
    assert!(energy(&big, &s.params, &s.op) < 0.0);
    let v = classify(&big, &s.params, &s.op, Some(gs)).unwrap();
    assert_eq!(v.kind, VerdictKind::BlowUpNegativeEnergy);
    assert!(v.witnesses.iter().all(|w| w.lhs.is_finite()));
    assert!(virial_vanishing_time(&big, &s.params, &s.op).unwrap() > 0.0);

    let small = gaussian(&s.grid, 0.2, 1.0, 0.0);
    assert_eq!(
        classify(&small, &s.params, &s.op, Some(gs)).unwrap().kind,
        VerdictKind::GlobalCaseC
    );

    // above the energy threshold with positive energy: no criterion applies
    let wide = gaussian(&s.grid, 0.7, 3.0, 1.0);
    let e = energy(&wide, &s.params, &s.op);
    assert!(e > 0.0);
    let v = classify(&wide, &s.params, &s.op, Some(gs)).unwrap();
    assert_eq!(v.kind, VerdictKind::Undetermined, "{v:?}");
    assert!(v.gamma_outer_fraction < 1e-6);
}

#[test]
fn collapse_under_coarse_steps_ends_with_a_status() {
    let s = cubic();
    let big = gaussian(&s.grid, 3.0, 1.0, 0.0);
    let t_zero = virial_vanishing_time(&big, &s.params, &s.op).unwrap();
    let ctl = SimControls {
        blowup_factor: 10.0,
        ..SimControls::default()
    };
    let traj = simulate(&big, &s.params, &s.op, 1e-3, t_zero, &ctl).unwrap();
    assert_ne!(traj.status, Status::Completed);
    assert!(traj
        .states
        .iter()
        .all(|st| st.field.values.iter().all(|z| z.norm().is_finite())));

    let fine = simulate(&big, &s.params, &s.op, 1e-5, t_zero, &ctl).unwrap();
    assert!(matches!(fine.status, Status::BlowUpDetected { t_est } if t_est < t_zero));
}

#[test]
fn classify_small_power_case_needs_no_ground_state() {
    let s = subcritical();
    let v = classify(&gaussian(&s.grid, 5.0, 1.0, 0.0), &s.params, &s.op, None).unwrap();
    assert_eq!(v.kind, VerdictKind::GlobalCaseA);
}

#[test]
fn threshold_polynomial_maximum() {
    let s = cubic();
    let gs = cubic_ground_state();
    let (c, t) = (gs.sharp_c, gs.thresholds);
    let kappa = s.params.kappa.unwrap();
    let s_star = threshold_maximiser(c, &s.params);
    let target = t.h_gs * t.h_gs * t.m_gs.powf(kappa);
    assert!((s_star / target - 1.0).abs() <= 1e-6);
    let top = threshold_polynomial(s_star, c, &s.params);
    assert!((top / (t.e_gs * t.m_gs.powf(kappa)) - 1.0).abs() <= 1e-6);
    for f in [0.5, 0.9, 0.999, 1.001, 1.1, 2.0] {
        assert!(threshold_polynomial(f * s_star, c, &s.params) < top);
    }
}

#[test]
fn below_threshold_flow_stays_below_threshold() {
    let s = cubic();
    let gs = cubic_ground_state();
    let kappa = s.params.kappa.unwrap();
    let s_star = threshold_maximiser(gs.sharp_c, &s.params);
    let u0 = gaussian(&s.grid, 0.5, 1.0, -0.05);
    let v = classify(&u0, &s.params, &s.op, Some(&gs.thresholds)).unwrap();
    assert_eq!(v.kind, VerdictKind::GlobalCaseC);
    let ctl = SimControls {
        snapshot_interval: Some(0.05),
        ..SimControls::default()
    };
    let traj = simulate(&u0, &s.params, &s.op, 2e-3, 1.0, &ctl).unwrap();
    assert_eq!(traj.status, Status::Completed);
    let mk = traj.states[0].diagnostics.mass.sqrt().powf(kappa);
    for st in &traj.states {
        assert!(st.diagnostics.hardy_norm_sq * mk < s_star);
    }
}

#[test]
fn trajectory_csv_columns() {
    let s = subcritical();
    let ctl = SimControls {
        snapshot_interval: Some(0.01),
        ..SimControls::default()
    };
    let traj = simulate(
        &gaussian(&s.grid, 0.5, 1.0, 0.0),
        &s.params,
        &s.op,
        1e-3,
        0.05,
        &ctl,
    )
    .unwrap();
    assert_eq!(traj.states.len(), 6);
    let mut buf = Vec::new();
    write_trajectory_csv(&mut buf, &traj).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,mass,energy,hardy_norm,gamma,gamma_prime,gamma_second,dt"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.len() == 8));
    assert!((rows[5][0] - 0.05).abs() < 1e-15);
    assert_eq!(rows[3][1], traj.states[3].diagnostics.mass);
}

#[test]
fn simulate_rejects_bad_inputs() {
    let s = subcritical();
    let u0 = gaussian(&s.grid, 0.5, 1.0, 0.0);
    let ctl = SimControls::default();
    assert!(simulate(&u0, &s.params, &s.op, 0.0, 1.0, &ctl).is_err());
    assert!(simulate(&u0, &s.params, &s.op, 1e-3, -1.0, &ctl).is_err());
    let other = Arc::new(make_grid(256, 20.0, Grading::Uniform).unwrap());
    assert!(simulate(
        &gaussian(&other, 0.5, 1.0, 0.0),
        &s.params,
        &s.op,
        1e-3,
        1.0,
        &ctl
    )
    .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn one_step_conserves_mass_for_random_data(
        amp in 0.1f64..1.5,
        width in 0.5f64..3.0,
        chirp in -0.5f64..0.5,
        dt in 1e-3f64..2e-2,
    ) {
        let s = subcritical();
        let st = SimState::new(gaussian(&s.grid, amp, width, chirp), 0.0, dt, &s.params, &s.op).unwrap();
        let next = step(&st, dt, &s.op, &s.params).unwrap();
        let m = st.diagnostics.mass;
        prop_assert!((next.diagnostics.mass - m).abs() / m <= 1e-10);
    }
}
