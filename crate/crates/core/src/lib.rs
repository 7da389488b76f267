//! Networks of coupled bosonic oscillators in contact with thermal reservoirs.
//!
//! The crate builds the normal modes of a quadratic oscillator network,
//! derives dissipation and diffusion matrices from reservoir spectral
//! profiles, propagates Gaussian and Fock-superposition states in closed
//! form, and evaluates decoherence metrics on the results.

pub mod error;
pub mod linalg;
pub mod metrics;
pub mod network;
pub mod phase_space;
pub mod propagation;
pub mod reservoirs;
pub mod stationary;
pub mod timescale;

pub use error::{Error, Result};
pub use timescale::Timescale;
