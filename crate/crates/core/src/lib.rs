//! Floquet analysis of a periodically driven spin-1/2.
//!
//! * [`spin`]: drive parameters, states, propagator algebra, instantaneous spectrum.
//! * [`floquet`]: one-period propagators, quasi-energies, Floquet modes,
//!   resonance location and the Shirley-matrix cross-check.
//! * [`dynamics`]: unitary trajectories, beat analysis, classical LLG precession.
//! * [`ladder`]: the two-band Floquet–Stark ladder in the extended space.
//! * [`dissipation`]: Ohmic bath kernel and Floquet steady states.

pub mod dissipation;
pub mod dynamics;
pub mod error;
pub mod floquet;
pub mod ladder;
mod par;
pub mod spin;

pub use error::{FloqError, Result};
pub use floquet::{FloquetOptions, FloquetSolution};
pub use spin::{DriveForm, DriveParams, SpinState, Unitary2};
