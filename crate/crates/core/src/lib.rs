//! Particle-number statistics from stochastic samples of Gaussian-class
//! Wigner functions.
//!
//! The crate compares three routes to the number distribution of a single
//! bosonic mode:
//!
//! * the exact overlap with Fock-state Wigner functions, either by
//!   quadrature ([`fock::pn_quadrature`]) or by averaging over samples
//!   ([`fock::pn_wigner_average`]),
//! * closed forms for thermal and squeezed coherent states ([`analytic`]),
//! * direct binning of sampled `|α|²` into unit annuli ([`binning`]).
//!
//! [`diagnostics`] quantifies when the binned estimate can be trusted, and
//! [`bose_hubbard`] applies the whole pipeline to truncated-Wigner
//! trajectories of a two-site Bose-Hubbard model.

pub mod analytic;
pub mod binning;
pub mod bose_hubbard;
pub mod commands;
pub mod diagnostics;
pub mod distribution;
mod error;
pub mod fock;
pub mod io;
pub mod phase_space;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod sum;

pub use distribution::{Method, NumberDistribution};
pub use error::{Error, Result};
pub use phase_space::{GaussianWignerState, PhaseAmplitude, StateKind, TrajectoryEnsemble};
