//! Spectral simulation of the semilinear damped wave equation
//!
//! ```text
//! u_tt - L u + u_t = |u|^p   on G = T^n or SU(2)
//! ```
//!
//! together with the analysis machinery around it: exact propagation of the
//! linear part mode by mode, decay diagnostics, an exponential integrator for
//! the nonlinear problem with blow-up detection, and the iteration sequences
//! that bound the lifespan from above.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blowup;
pub mod csv;
pub mod data;
mod error;
pub mod harmonics;
pub mod ode;
pub mod propagator;
pub mod solver;
pub mod sum;

pub use error::{Error, Result};
pub use harmonics::{
    enumerate_irreps, plancherel_norm_sq, sobolev_norm_sq, wigner_d, GridField, GroupHarmonics, GroupKind,
    GroupSpec, Irrep, QuadratureGrid, SpectralField,
};
pub use propagator::{decay_report, propagate_field, propagate_mode, DecayReport, FieldState, ModeState};
pub use solver::{solve, SolveConfig, Trajectory};
pub use blowup::{BlowupSequences, LifespanRecord};
pub use data::{DataPreset, InitialData};
