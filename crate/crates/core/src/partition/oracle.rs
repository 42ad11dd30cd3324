//! Brute-force reference for pair extraction.
//!
//! A Dicke-basis state is embedded into the full `2^N` qubit space by
//! spreading each amplitude uniformly over the bit strings with the right
//! number of up spins; partial traces are then taken explicitly. These
//! routines share no code with [`super::pair_annihilation_ops`] and exist to
//! check it. Qubit 1 is the most significant bit and bit value 1 is up.

use num_complex::Complex64;

use crate::angular::{AngularMomentum, SpinState};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};
use crate::partition::PairState;

/// Largest ensemble the oracle accepts (`2^8 = 256` amplitudes).
pub const MAX_QUBITS: usize = 8;

fn n_choose_k(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn embed(amplitudes: &[Complex64]) -> Result<(usize, Vec<Complex64>)> {
    if amplitudes.len() < 3 {
        return Err(Error::domain("the oracle needs at least two qubits"));
    }
    let n = amplitudes.len() - 1;
    if n > MAX_QUBITS {
        return Err(Error::domain(format!(
            "oracle refuses {n} qubits (limit {MAX_QUBITS})"
        )));
    }
    let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::domain("zero amplitude vector"));
    }
    let full = (0..1usize << n)
        .map(|b| {
            let ups = b.count_ones() as usize;
            amplitudes[ups] / (norm * n_choose_k(n, ups).sqrt())
        })
        .collect();
    Ok((n, full))
}

/// Two-qubit marginal of a pure symmetric state given by its Dicke
/// amplitudes (`m = -J..J`), obtained by tracing out qubits `3..N`.
pub fn brute_force_pair_oracle(amplitudes: &[Complex64]) -> Result<PairState> {
    let (n, psi) = embed(amplitudes)?;
    let rest = 1usize << (n - 2);
    // rho12 over bit patterns a = (q1 q2): 0 = dd, 1 = du, 2 = ud, 3 = uu
    let mut rho12 = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (a, row) in rho12.iter_mut().enumerate() {
        for (b, entry) in row.iter_mut().enumerate() {
            *entry = (0..rest)
                .map(|r| psi[a * rest + r] * psi[b * rest + r].conj())
                .sum();
        }
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // columns: |+1> = uu, |0> = (ud + du)/sqrt2, |-1> = dd
    let basis: [[f64; 4]; 3] = [[0.0, 0.0, 0.0, 1.0], [0.0, s, s, 0.0], [1.0, 0.0, 0.0, 0.0]];
    let mut pair = CMatrix::zeros(3, 3);
    for (i, bi) in basis.iter().enumerate() {
        for (k, bk) in basis.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..4 {
                for b in 0..4 {
                    acc += rho12[a][b] * (bi[a] * bk[b]);
                }
            }
            pair[(i, k)] = acc;
        }
    }
    PairState::new(pair)
}

/// State of the remaining `N - 2` qubits after tracing out qubits 1 and 2,
/// expressed in the Dicke basis of spin `J - 1`.
pub fn brute_force_remainder_oracle(amplitudes: &[Complex64]) -> Result<SpinState> {
    let (n, psi) = embed(amplitudes)?;
    let rest_qubits = n - 2;
    let rest = 1usize << rest_qubits;
    let mut reduced = CMatrix::zeros(rest, rest);
    for a in 0..4 {
        for r in 0..rest {
            for s in 0..rest {
                reduced[(r, s)] += psi[a * rest + r] * psi[a * rest + s].conj();
            }
        }
    }
    // Dicke vectors of the remainder
    let dicke = CMatrix::from_fn(rest, rest_qubits + 1, |b, k| {
        if (b.count_ones() as usize) == k {
            c(1.0 / n_choose_k(rest_qubits, k).sqrt())
        } else {
            c(0.0)
        }
    });
    let in_dicke = dicke.adjoint() * reduced * dicke;
    SpinState::new(AngularMomentum::new(rest_qubits as u32), in_dicke)
}
