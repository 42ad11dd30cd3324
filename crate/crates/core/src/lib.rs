//! Simulation of a large angular momentum `J` represented as `2J`
//! exchange-symmetric qubits.
//!
//! The crate is organised bottom-up:
//!
//! * [`angular`]: spin matrices, rotations, Clebsch-Gordan coefficients and
//!   the [`SpinState`] density-matrix type.
//! * [`states`]: Dicke, coherent, cat and W states and one-axis twisting.
//! * [`partition`]: extraction of a qubit pair, the pair Husimi function,
//!   projection probabilities and a brute-force qubit-space oracle.
//! * [`nonclassical`]: classicality witnesses, concurrence, min-entropies,
//!   squeezing, parity/sign observables and Fourier extraction.
//! * [`tomography`]: multipole reconstruction of the spin-1 pair state.
//! * [`dynamics`]: optical coupling between manifolds, spontaneous emission
//!   and Lindblad evolution.

pub mod angular;
pub mod dynamics;
mod error;
pub mod linalg;
pub mod nonclassical;
pub mod partition;
pub mod random;
pub mod states;
pub mod tomography;

pub use angular::{AngularMomentum, Direction, Operator, SpinState};
pub use error::{Error, Result};
pub use partition::PairState;

pub use num_complex::Complex64;
