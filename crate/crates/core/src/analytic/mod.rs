//! Closed-form solutions and identity checks: the explicit minimal-mass
//! blow-up solution, mass concentration, the phase-modulation expansion of
//! the energy and the characterization round trip.
//!
//! The second-moment law is implemented as `Gamma(t) = 8 E(u0) (T-t)^2`, so
//! `Gamma(0) = 8 E(u0) T^2`; this is the form consistent with the explicit
//! solution and with `Gamma'(0) = -16 E(u0) T`.

mod phase;
mod pseudoconformal;
mod roundtrip;

pub use phase::{phase_modulation_energy, FnProfile, InterpProfile, PhaseIdentity, RadialProfile};
pub use pseudoconformal::{profile_interpolant, MinimalMassReport, PseudoconformalSolution};
pub use roundtrip::{characterization_roundtrip, RoundtripReport};
