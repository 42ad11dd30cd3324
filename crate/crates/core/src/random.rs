//! Seeded random states and directions for property tests and scans.
//!
//! Pure states are Haar-distributed (normalized complex Gaussian vectors);
//! mixed states are Ginibre-induced, `G G^dagger / Tr(G G^dagger)`.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::angular::{coherent_amplitudes, AngularMomentum, Direction, SpinState};
use crate::linalg::{c, CMatrix, CVector};
use crate::partition::PairState;

/// The generator used everywhere a seed is accepted.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random normalized amplitude vector.
pub fn haar_amplitudes<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn haar_pure_state<R: Rng + ?Sized>(j: AngularMomentum, rng: &mut R) -> SpinState {
    SpinState::pure(j, &haar_amplitudes(j.dim(), rng)).expect("gaussian vector is non-zero")
}

/// Ginibre-induced mixed density matrix of the given rank.
pub fn ginibre_matrix<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, rank.max(1), |_, _| gaussian_complex(rng));
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho / c(tr)
}

pub fn ginibre_state<R: Rng + ?Sized>(j: AngularMomentum, rng: &mut R) -> SpinState {
    SpinState::from_trusted(j, ginibre_matrix(j.dim(), j.dim(), rng))
}

/// Random spin-1 pair state: either pure or full-rank Ginibre, chosen with
/// equal odds, so both boundary and interior of state space are sampled.
pub fn random_pair_state<R: Rng + ?Sized>(rng: &mut R) -> PairState {
    let rank = if rng.random_bool(0.5) { 1 } else { rng.random_range(2..=3) };
    PairState::from_trusted(ginibre_matrix(3, rank, rng))
}

/// Uniformly distributed direction.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> Direction {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    Direction::from_angles(z.acos(), phi)
}

/// Convex mixture of `terms` coherent states with random weights.
pub fn coherent_mixture<R: Rng + ?Sized>(j: AngularMomentum, terms: usize, rng: &mut R) -> SpinState {
    let d = j.dim();
    let mut rho = CMatrix::zeros(d, d);
    for _ in 0..terms.max(1) {
        let w: f64 = rng.random_range(0.0..1.0);
        let v: CVector = coherent_amplitudes(j, random_direction(rng));
        rho += (&v * v.adjoint()) * c(w);
    }
    SpinState::from_trusted(j, rho)
}
