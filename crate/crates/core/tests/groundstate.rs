use std::sync::{Arc, OnceLock};

use hardy_choquard::groundstate::{
    asymptotics_report, compute_ground_state, direct_norms, existence_classifier,
    gaussian_initial_guess, minimize_weinstein, pohozaev_check, sharp_constant_from_mass,
    solve_euler_lagrange, threshold_quantities, weinstein_value, Existence, GroundStateResult,
    SolverOptions,
};
use hardy_choquard::{
    build_riesz, energy, make_grid, make_params, Error, Grading, ModelParams, RadialField,
    RieszOperator,
};

use proptest::prelude::*;

// Independent boundary-value solve of the ground-state ODE system in log radius.
const ORACLE_C_P3: f64 = 1.837527965439;
const ORACLE_M_P3: f64 = 2.318015052870;
const ORACLE_H_P3: f64 = 3.278168325552;
const ORACLE_N_P3: f64 = 16.119581355982;
const ORACLE_V0_P3: f64 = 1.791951876452;
const ORACLE_C_P73: f64 = 1.923139213856;
const ORACLE_M_P73: f64 = 4.315290731895;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn solve(p: f64, n: usize) -> (ModelParams, Arc<RieszOperator>, GroundStateResult) {
    let params = make_params(3, 2.0, p).unwrap();
    let grid = Arc::new(make_grid(n, 40.0, Grading::Algebraic { power: 2.0 }).unwrap());
    let op = Arc::new(build_riesz(&params, grid).unwrap());
    let gs = compute_ground_state(&params, &op, SolverOptions::default()).unwrap();
    (params, op, gs)
}

fn cubic_1024() -> &'static (ModelParams, Arc<RieszOperator>, GroundStateResult) {
    static GS: OnceLock<(ModelParams, Arc<RieszOperator>, GroundStateResult)> = OnceLock::new();
    GS.get_or_init(|| solve(3.0, 1024))
}

#[test]
fn matches_boundary_value_oracle() {
    let (_, _, gs) = cubic_1024();
    assert!(gs.converged);
    assert!(rel(gs.sharp_c, ORACLE_C_P3) < 1e-5, "C = {}", gs.sharp_c);
    assert!(rel(gs.m_gs(), ORACLE_M_P3) < 2e-5);
    assert!(rel(gs.h_gs(), ORACLE_H_P3) < 2e-5);
    assert!(rel(gs.n_gs(), ORACLE_N_P3) < 4e-5);
    assert!(rel(gs.direct.m_gs, ORACLE_M_P3) < 1e-4);
}

#[test]
fn sharp_constant_chain() {
    let (params, op, gs) = cubic_1024();
    let m = gs.direct.m_gs;
    assert!(rel(sharp_constant_from_mass(m, params), gs.sharp_c) < 1e-3);
    let t = threshold_quantities(gs.sharp_c, params);
    assert!(rel(t.m_gs, gs.direct.m_gs) < 1e-3);
    assert!(rel(t.h_gs, gs.direct.h_gs) < 1e-3);
    assert!(rel(t.n_gs, gs.direct.n_gs) < 1e-3);
    let e = energy(&gs.q, params, op);
    assert!((e - t.e_gs).abs() < 1e-3 * t.e_gs.abs());
    assert!((t.h_gs / t.m_gs - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn equation_residual_and_shape() {
    let (params, _, gs) = cubic_1024();
    assert!(gs.el_residual <= 10.0 * SolverOptions::default().tol);
    let v: Vec<f64> = gs.q.values.iter().map(|z| z.re).collect();
    assert!(v.iter().all(|x| *x >= 0.0));
    assert!(gs.q.values.iter().all(|z| z.im == 0.0));
    let u: Vec<f64> = gs.q.physical(params).iter().map(|z| z.re).collect();
    assert!(u.windows(2).all(|w| w[1] <= w[0] + 1e-6));
    assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-6));
}

#[test]
fn pohozaev_residuals_shrink_with_resolution() {
    let (params, op, coarse) = cubic_1024();
    let (_, _, fine) = solve(3.0, 2048);
    let (c1, c2) = pohozaev_check(&coarse.q, params, op);
    assert_eq!(
        (c1, c2),
        (coarse.pohozaev_residual_1, coarse.pohozaev_residual_2)
    );
    eprintln!(
        "1024: {c1:.3e} {c2:.3e}; 2048: {:.3e} {:.3e}",
        fine.pohozaev_residual_1, fine.pohozaev_residual_2
    );
    assert!(fine.pohozaev_residual_1 <= 1e-3 && fine.pohozaev_residual_2 <= 1e-3);
    assert!(fine.pohozaev_residual_1 < c1 && fine.pohozaev_residual_2 < c2);
    assert!((fine.sharp_c - coarse.sharp_c).abs() < 1e-3 * fine.sharp_c);
}

#[test]
fn independent_solver_agrees() {
    let (params, op, gs) = cubic_1024();
    let el = solve_euler_lagrange(params, op, None, 1e-10, 50).unwrap();
    assert!(el.converged);
    let t = direct_norms(&el.q, params, op);
    assert!(rel(t.m_gs, gs.direct.m_gs) < 1e-3);
    assert!(rel(t.h_gs, gs.direct.h_gs) < 1e-3);
    assert!(rel(t.n_gs, gs.direct.n_gs) < 1e-3);
    assert!(rel(weinstein_value(&el.q, params, op), gs.sharp_c) < 1e-5);
}

#[test]
fn minimiser_is_stationary() {
    let (params, op, _) = cubic_1024();
    let init = gaussian_initial_guess(params, op.grid.clone());
    let tol = SolverOptions::default().tol;
    let first = minimize_weinstein(params, op, &init, tol, 20_000).unwrap();
    let again = minimize_weinstein(params, op, &first.field, tol, 20_000).unwrap();
    eprintln!(
        "restart: {} iterations, grad {:e}",
        again.iterations, again.grad_norm
    );
    assert!(again.converged && again.iterations <= 2);
    assert!(rel(again.sharp_c, first.sharp_c) < 1e-12);
    let doubled =
        minimize_weinstein(params, op, &first.field.scale_real(2.0), tol, 20_000).unwrap();
    assert!(rel(doubled.sharp_c, first.sharp_c) < 1e-12);
}

#[test]
fn asymptotic_profile() {
    let (params, _, gs) = cubic_1024();
    let a = asymptotics_report(&gs.q, params);
    assert!(a.acceptable);
    assert!(rel(a.v0, ORACLE_V0_P3) < 1e-4, "v0 = {}", a.v0);
    assert!(a.far_rate.abs() <= 0.01);
    assert!(a.far_prefactor > 0.0 && a.far_prefactor.is_finite());
    let twice = asymptotics_report(&gs.q.scale_real(2.0), params);
    assert!(rel(twice.v0, 2.0 * a.v0) < 1e-14);
}

#[test]
fn far_prefactor_stable_in_domain_size() {
    let params = make_params(3, 2.0, 3.0).unwrap();
    let mut pref = Vec::new();
    for (n, r_max) in [(1024, 40.0), (1536, 60.0)] {
        let grid = Arc::new(make_grid(n, r_max, Grading::Algebraic { power: 2.0 }).unwrap());
        let op = build_riesz(&params, grid).unwrap();
        let gs = compute_ground_state(&params, &op, SolverOptions::default()).unwrap();
        pref.push(asymptotics_report(&gs.q, &params).far_prefactor);
    }
    assert!(rel(pref[1], pref[0]) < 0.05, "{pref:?}");
}

#[test]
fn mass_critical_ground_state() {
    let (params, op, gs) = solve(7.0 / 3.0, 1024);
    assert!(params.mass_critical);
    assert!(gs.converged);
    assert!(rel(gs.sharp_c, ORACLE_C_P73) < 1e-5);
    assert!(rel(gs.m_gs(), ORACLE_M_P73) < 2e-5);
    // C = (d/(d+2+alpha))^{d/(2(d+2+alpha))} M_gs^{(2+alpha)/(d+2+alpha)}
    let c = (3.0f64 / 7.0).powf(3.0 / 14.0) * gs.direct.m_gs.powf(4.0 / 7.0);
    assert!(rel(c, gs.sharp_c) < 1e-3);
    assert!(gs.e_gs().abs() <= 1e-6 * gs.h_gs() * gs.h_gs());
    assert!(energy(&gs.q, &params, &op).abs() <= 1e-4 * gs.direct.h_gs.powi(2));
}

#[test]
fn excluded_exponents_are_rejected() {
    let low = make_params(3, 2.0, 5.0 / 3.0).unwrap();
    let high = make_params(3, 2.0, 5.0).unwrap();
    assert_eq!(existence_classifier(&low), Existence::ExcludedLow);
    assert_eq!(existence_classifier(&high), Existence::ExcludedHigh);
    let grid = Arc::new(make_grid(64, 10.0, Grading::Uniform).unwrap());
    let op = build_riesz(&high, grid.clone()).unwrap();
    assert!(matches!(
        compute_ground_state(&high, &op, SolverOptions::default()),
        Err(Error::Excluded { .. })
    ));
    let ok = make_params(3, 2.0, 3.0).unwrap();
    let op = build_riesz(&ok, grid.clone()).unwrap();
    let zero = RadialField::zeros(grid);
    assert!(matches!(
        minimize_weinstein(&ok, &op, &zero, 1e-7, 10),
        Err(Error::ZeroField)
    ));
}

fn mixture(grid: Arc<hardy_choquard::RadialGrid>, comps: &[(f64, f64, f64)]) -> RadialField {
    RadialField::from_real(grid, |r| {
        comps
            .iter()
            .map(|(a, c, w)| a * (-((r - c) / w).powi(2)).exp())
            .sum::<f64>()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hgn_inequality_holds(
        comps in prop::collection::vec((0.05f64..1.0, 0.0f64..4.0, 0.4f64..3.0), 1..4),
    ) {
        let (params, op, gs) = cubic_1024();
        let f = mixture(op.grid.clone(), &comps);
        prop_assert!(weinstein_value(&f, params, op) >= gs.sharp_c * (1.0 - 1e-3));
    }

    #[test]
    fn weinstein_scalar_invariance(
        comps in prop::collection::vec((0.05f64..1.0, 0.0f64..4.0, 0.4f64..3.0), 1..4),
        a in 0.01f64..100.0,
    ) {
        let (params, op, _) = cubic_1024();
        let f = mixture(op.grid.clone(), &comps);
        let w = weinstein_value(&f, params, op);
        prop_assert!(rel(weinstein_value(&f.scale_real(a), params, op), w) < 1e-12);
    }
}
