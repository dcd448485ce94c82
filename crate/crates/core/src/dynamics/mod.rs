//! Radial time evolution: Crank-Nicolson stepping, conservation and virial
//! monitoring, blow-up detection and the global-existence/blow-up verdict.

mod classify;
mod scheme;
mod simulate;

pub use classify::{
    classify, threshold_maximiser, threshold_polynomial, virial_vanishing_time, Verdict,
    VerdictKind, Witness,
};
pub use scheme::{
    diagnostics, step, step_with, virial_diagnostics, Diagnostics, Propagator, SchemeOptions,
    SimState,
};
pub use simulate::{
    boundary_mass_fraction, conservation_report, simulate, write_trajectory_csv,
    ConservationReport, SimControls, Status, Trajectory,
};
