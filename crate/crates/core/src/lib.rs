//! Simulation kernels for the radial part `R` of planar Brownian motion
//! conditioned to stay outside the unit disk.
//!
//! `R` solves `dR = (1/(R ln R) + 1/(2R)) dt + dB` on `(1, ∞)`. The crate
//! provides Euler–Maruyama integrators in natural time and in the geometric
//! clock `X(s) = e^{-s/2} R(e^s - 1)`, exact samplers for the laws of one
//! regeneration cycle, a log-domain assembler for the renewal sequence
//! `(T_n, A_n)`, and the statistical estimators used to check the closed-form
//! identities satisfied by the process.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the CLI and the
//! parallel drivers live in the `moustache` crate.

#![no_std]

extern crate alloc;

mod error;
pub mod estimators;
pub mod laws;
pub mod numerics;
pub mod regeneration;
pub mod rng;
pub mod sde;

pub use error::{Error, Result};
pub use estimators::{KsReport, TailEstimate};
pub use laws::{CycleLawParams, EnvelopeParams, RayleighLaw};
pub use regeneration::{CyclePool, CycleRecord, RenewalSequence};
pub use sde::{CoupledTriple, IntegratorConfig, PathKind, TrajectoryGrid};
