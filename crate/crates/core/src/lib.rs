//! Ground states, sharp constants and radial dynamics for the nonlinear
//! Schrodinger equation with a critical inverse-square (Hardy) potential and
//! a Choquard nonlinearity,
//!
//! `i u_t = (-Delta - (d-2)^2/(4|x|^2)) u - (I_alpha * |u|^p)|u|^{p-2} u`.
//!
//! Every computation runs on the transformed unknown `v = r^{(d-2)/2} u`, for
//! which the critical Hardy operator is the two-dimensional radial Laplacian.

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod functionals;
pub mod grid;
pub mod groundstate;
pub mod interp;
pub mod linalg;
pub mod params;
pub mod quadrature;
pub mod riesz;

pub use error::{Error, Result};
pub use field::{read_field, write_field, FieldHeader, RadialField};
pub use functionals::{energy, gamma_prime, hardy_seminorm_sq, mass, weighted_moment};
pub use grid::{make_grid, Grading, RadialGrid};
pub use num_complex::Complex64;
pub use params::{make_params, ModelParams, Regime};
pub use riesz::{build_riesz, RieszOperator};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
