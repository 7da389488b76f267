//! Brute-force reference for bosonet: the master equation integrated on a
//! truncated Fock space, plus the observables needed to compare against the
//! phase-space results.

mod error;
mod integrate;
mod liouvillian;
mod observables;
mod space;
mod states;

pub use error::{OracleError, Result};
pub use integrate::{evolve_master, evolve_master_with, Trajectory, DEFAULT_TOLERANCE};
pub use liouvillian::{liouvillian_apply, Generator};
pub use observables::{
    annihilation_moment, char_tail_estimate, number_moment, oracle_char, oracle_partial_trace, oracle_purity,
};
pub use space::FockSpace;
pub use states::{coherent_ket, fock_ket, ket_density, product_coherent_ket, superposition, TruncatedDensityMatrix};

pub use nalgebra::DMatrix;
pub use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = nalgebra::DVector<Complex64>;
pub type RMat = DMatrix<f64>;

/// n_max ≥ ⌈|α|² + 6|α| + 6 + 10 n̄⌉.
pub fn recommended_cutoff(alpha_abs: f64, nbar: f64) -> usize {
    (alpha_abs * alpha_abs + 6.0 * alpha_abs + 6.0 + 10.0 * nbar).ceil() as usize
}
