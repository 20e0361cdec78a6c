//! Statistical (Cesàro) convergence of bounded field sequences.
//!
//! The crate decides and quantifies whether a sequence `U_n: Q -> R^D` of
//! fields on a space-time grid has convergent (weighted) ergodic averages of
//! its observables, and estimates the limit as a parametrized measure made of
//! per-cell weighted atoms. It also ships a Lax–Friedrichs generator of
//! consistent approximations of the isentropic Euler system together with
//! residual, energy, and Reynolds-defect diagnostics.
//!
//! Everything here is pure computation on in-memory data; persistence,
//! configuration, and the command line live in the `cesaro` crate.

#![no_std]

extern crate alloc;

mod error;
mod math;

pub mod ergodic;
pub mod euler;
pub mod field;
pub mod fixtures;
pub mod measures;
pub mod observables;

pub use error::{Error, Result};
pub use field::{FieldSequence, Grid};
pub use measures::{EmpiricalMeasure, MomentSummary, ParametrizedMeasure};
pub use observables::{CompactObservable, ObservableDictionary, Profile, Weight, WeightKind};
