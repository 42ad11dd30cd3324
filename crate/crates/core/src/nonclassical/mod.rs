//! Entanglement and non-classicality of qubit pairs and of the whole spin.
//!
//! A pair state is classical (a mixture of spin-1 coherent states) exactly
//! when it has no pairwise entanglement. The direction-resolved quantity
//!
//! ```text
//! C_n = 1 - (sqrt(Q(-n)) + sqrt(Q(n)))^2
//! ```
//!
//! built from two antipodal pair-Husimi values has a positive maximum equal
//! to the pair concurrence; [`concurrence_lower_bound`] finds that maximum
//! on the sphere and [`wootters_concurrence`] gives the closed form.

mod entropy;
mod observables;
mod sphere;
mod squeezing;

pub use entropy::{
    conditional_min_entropy_from_eigenvalues, min_entropy, pair_conditional_min_entropy,
    DensityMatrix,
};
pub use observables::{
    cat_overlap_bound, fourier_components, parity_expectation, sign_expectation, FourierSeries,
    SignMode,
};
pub use sphere::{maximize_on_sphere, SphereMaximum, SphereSearch};
pub use squeezing::{
    concurrence_from_squeezing, min_equatorial_uncertainty, optimal_squeezing, spin_uncertainty,
    squeezing_scan, EquatorialSqueezing, SqueezingPoint,
};

use crate::angular::{Direction, SpinState};
use crate::error::Result;
use crate::linalg::{self, c, CMatrix};
use crate::partition::{pair_coherent_vector, reduced_pair_state, PairState};

/// Spin-1 matrices `(Lx, Ly, Lz)` in pair order `(+1, 0, -1)`.
pub(crate) fn pair_spin_matrices() -> [CMatrix; 3] {
    let s = std::f64::consts::SQRT_2;
    // L+ raises: <+1|L+|0> = <0|L+|-1> = sqrt2
    let mut lp = CMatrix::zeros(3, 3);
    lp[(0, 1)] = c(s);
    lp[(1, 2)] = c(s);
    let lm = lp.adjoint();
    let lx = (&lp + &lm) * c(0.5);
    let ly = (&lp - &lm) * num_complex::Complex64::new(0.0, -0.5);
    let lz = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(0.0), c(-1.0)]));
    [lx, ly, lz]
}

fn pair_projection_operator(n: Direction) -> CMatrix {
    let [lx, ly, lz] = pair_spin_matrices();
    let [x, y, z] = n.unit_vector();
    lx * c(x) + ly * c(y) + lz * c(z)
}

/// `Z(n) = 2<L_n^2> - <L_n>^2 - 1`; zero for pure coherent pairs, negative
/// values certify non-classicality.
pub fn z_value(pair: &PairState, n: Direction) -> f64 {
    let ln = pair_projection_operator(n);
    let mean = (pair.matrix() * &ln).trace().re;
    let sq = (pair.matrix() * &ln * &ln).trace().re;
    2.0 * sq - mean * mean - 1.0
}

/// Evaluates `C_n` through a factor `rho = W W^dagger`, so that
/// `sqrt(Q(n)) = |W^dagger |n>|` keeps full absolute precision even where
/// `Q(n)` itself is at rounding level.
struct CEvaluator {
    factor_adjoint: CMatrix,
}

impl CEvaluator {
    fn new(pair: &PairState) -> Self {
        let (values, vectors) = linalg::hermitian_eigen(pair.matrix());
        let kept: Vec<usize> = (0..3).filter(|&k| values[k] > 1e-13).collect();
        let total: f64 = kept.iter().map(|&k| values[k]).sum();
        let mut w = CMatrix::zeros(3, kept.len());
        for (col, &k) in kept.iter().enumerate() {
            let s = (values[k] / total).sqrt();
            for row in 0..3 {
                w[(row, col)] = vectors[(row, k)] * s;
            }
        }
        Self {
            factor_adjoint: w.adjoint(),
        }
    }

    fn root_q(&self, n: Direction) -> f64 {
        (&self.factor_adjoint * pair_coherent_vector(n)).norm()
    }

    fn at(&self, n: Direction) -> f64 {
        1.0 - (self.root_q(n.antipode()) + self.root_q(n)).powi(2)
    }
}

/// `C_n` from the pair Husimi function at `n` and `-n`.
pub fn pair_c_distribution(pair: &PairState, n: Direction) -> f64 {
    CEvaluator::new(pair).at(n)
}

/// `C_n` of a spin state, through its reduced pair state.
pub fn c_distribution(state: &SpinState, n: Direction) -> Result<f64> {
    Ok(pair_c_distribution(&reduced_pair_state(state)?, n))
}

/// The triple `(Z, alpha, C_n)` with `alpha = (sqrt(Q(-n)) - sqrt(Q(n)))^2 - 1`,
/// related by `Z = alpha C_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalityTriple {
    pub z: f64,
    pub alpha: f64,
    pub c_n: f64,
}

pub fn alpha_c_identity_check(state: &SpinState, n: Direction) -> Result<ClassicalityTriple> {
    let pair = reduced_pair_state(state)?;
    let eval = CEvaluator::new(&pair);
    let (root_plus, root_minus) = (eval.root_q(n), eval.root_q(n.antipode()));
    Ok(ClassicalityTriple {
        z: z_value(&pair, n),
        alpha: (root_minus - root_plus).powi(2) - 1.0,
        c_n: 1.0 - (root_minus + root_plus).powi(2),
    })
}

/// Concurrence estimate `max(0, max_n C_n)` and the maximizing direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceBound {
    pub value: f64,
    /// Best direction, folded into the northern hemisphere (`C_n` is even
    /// under `n -> -n`).
    pub direction: Direction,
    /// Unclamped `max_n C_n`.
    pub raw_maximum: f64,
}

pub fn concurrence_lower_bound(state: &SpinState) -> Result<ConcurrenceBound> {
    Ok(pair_concurrence_lower_bound(&reduced_pair_state(state)?))
}

pub fn pair_concurrence_lower_bound(pair: &PairState) -> ConcurrenceBound {
    pair_concurrence_lower_bound_with(pair, &SphereSearch::default())
}

pub fn pair_concurrence_lower_bound_with(pair: &PairState, search: &SphereSearch) -> ConcurrenceBound {
    let eval = CEvaluator::new(pair);
    let best = maximize_on_sphere(|n| eval.at(n), search);
    let mut direction = best.direction;
    if direction.theta() > std::f64::consts::FRAC_PI_2 {
        direction = direction.antipode();
    }
    ConcurrenceBound {
        value: best.value.max(0.0),
        direction,
        raw_maximum: best.value,
    }
}

/// Hill-Wootters concurrence of the pair, embedded in the two-qubit space
/// with the singlet row and column set to zero.
pub fn wootters_concurrence(pair: &PairState) -> f64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // rows: |uu>, |ud>, |du>, |dd>; columns: |+1>, |0>, |-1>
    let embed = CMatrix::from_row_slice(
        4,
        3,
        &[
            c(1.0),
            c(0.0),
            c(0.0),
            c(0.0),
            c(s),
            c(0.0),
            c(0.0),
            c(s),
            c(0.0),
            c(0.0),
            c(0.0),
            c(1.0),
        ],
    );
    let rho = &embed * pair.matrix() * embed.adjoint();
    // sigma_y (x) sigma_y is real: antidiagonal (-1, 1, 1, -1)
    let mut flip = CMatrix::zeros(4, 4);
    for (i, v) in [-1.0, 1.0, 1.0, -1.0].into_iter().enumerate() {
        flip[(i, 3 - i)] = c(v);
    }
    // rounding-level eigenvalues would enter as their square roots
    let sqrt_rho = linalg::hermitian_map(&rho, |v| c(if v > 1e-13 { v.sqrt() } else { 0.0 }));
    let sqrt_tilde = &flip * sqrt_rho.conjugate() * &flip;
    // singular values of sqrt(rho) sqrt(rho~) are the lambdas; taking them
    // directly avoids square roots of rounding-level eigenvalues
    let mut lambdas: Vec<f64> = (&sqrt_rho * sqrt_tilde).singular_values().iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}
