//! Extraction of a qubit pair from the symmetric `2J`-qubit ensemble.
//!
//! Removing two qubits maps spin `J` onto spin `J - 1`. The three pair
//! annihilators `P_mu` (`mu = +1, 0, -1` for `|up up>`, the symmetric
//! triplet and `|down down>`) have elements fixed by the overlap of Dicke
//! states,
//!
//! ```text
//! <J-1, m-mu| P_mu |J, m> = sqrt( C(2, mu+1) C(2J-2, J+m-mu-1) / C(2J, J+m) )
//! ```
//!
//! and satisfy `sum_mu P_mu^dagger P_mu = 1`.
//!
//! [`PairState`] is ordered `(+1, 0, -1)`. A pair state displayed in the
//! order `(down down, sym, up up)` is the same matrix with both axes
//! reversed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::angular::{
    check_density_matrix, coherent_amplitudes, rotation_unitary, AngularMomentum, Direction,
    SpinState,
};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::random;

pub mod oracle;

pub use oracle::{brute_force_pair_oracle, brute_force_remainder_oracle};

const PAIR: AngularMomentum = AngularMomentum::integer(1);

/// Reduced density matrix of two qubits of a symmetric ensemble, a spin-1
/// state in the basis `(|up up>, |sym>, |down down>)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairState {
    matrix: CMatrix,
}

impl PairState {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_density_matrix(&matrix, 3)?;
        Ok(Self { matrix })
    }

    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        let mut m = (&matrix + matrix.adjoint()) * c(0.5);
        let tr = m.trace().re;
        if tr > 0.0 {
            m /= c(tr);
        }
        Self { matrix: m }
    }

    /// Diagonal pair state with populations of `(up up, sym, down down)`.
    pub fn diagonal(p_up: f64, p_sym: f64, p_down: f64) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(p_up), c(p_sym), c(p_down)]));
        Self::new(m)
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: CMatrix::identity(3, 3) / c(3.0),
        }
    }

    /// Pure spin-1 coherent state, both qubits polarized along `n`.
    pub fn coherent(n: Direction) -> Self {
        let v = pair_coherent_vector(n);
        Self {
            matrix: &v * v.adjoint(),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Same state as a spin-1 [`SpinState`] (basis `m = -1, 0, +1`).
    pub fn to_spin_state(&self) -> SpinState {
        SpinState::from_trusted(PAIR, reverse_axes(&self.matrix))
    }

    pub fn from_spin_state(state: &SpinState) -> Result<Self> {
        if state.j() != PAIR {
            return Err(Error::domain("pair states are spin 1"));
        }
        Ok(Self {
            matrix: reverse_axes(state.matrix()),
        })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues()[2]
    }

    /// `<up up_n| rho |up up_n>`: probability that both qubits point along `n`.
    pub fn husimi(&self, n: Direction) -> f64 {
        let v = pair_coherent_vector(n);
        (v.adjoint() * &self.matrix * &v)[(0, 0)].re
    }
}

/// Coherent spin-1 amplitudes along `n` in pair order `(+1, 0, -1)`.
pub(crate) fn pair_coherent_vector(n: Direction) -> CVector {
    let asc = coherent_amplitudes(PAIR, n);
    CVector::from_vec(vec![asc[2], asc[1], asc[0]])
}

fn reverse_axes(m: &CMatrix) -> CMatrix {
    let d = m.nrows();
    CMatrix::from_fn(d, d, |r, col| m[(d - 1 - r, d - 1 - col)])
}

fn binomial(n: i64, k: i64) -> f64 {
    if k < 0 || n < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Probability `Q_m = (J+m)(J+m-1) / (2J(2J-1))` that a pair drawn from the
/// Dicke state `|m>` is `|up up>`; `two_m` is doubled.
pub fn q_dicke(j: AngularMomentum, two_m: i32) -> Result<f64> {
    if j.two_j() < 2 {
        return Err(Error::domain("pair probabilities need J >= 1"));
    }
    if j.index(two_m).is_none() {
        return Err(Error::domain(format!("m = {two_m}/2 outside the multiplet")));
    }
    let n = f64::from(j.two_j());
    let up = f64::from(j.two_j() as i32 + two_m) / 2.0;
    Ok(up * (up - 1.0) / (n * (n - 1.0)))
}

/// Pair polarization index `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairComponent {
    UpUp,
    Symmetric,
    DownDown,
}

impl PairComponent {
    pub const ALL: [PairComponent; 3] = [Self::UpUp, Self::Symmetric, Self::DownDown];

    pub fn mu(self) -> i32 {
        match self {
            Self::UpUp => 1,
            Self::Symmetric => 0,
            Self::DownDown => -1,
        }
    }

    fn index(self) -> usize {
        (1 - self.mu()) as usize
    }
}

/// The three maps `P_mu` from spin `J` to spin `J - 1`.
#[derive(Debug, Clone)]
pub struct PairAnnihilators {
    j: AngularMomentum,
    ops: [DMatrix<f64>; 3],
}

impl PairAnnihilators {
    pub fn j(&self) -> AngularMomentum {
        self.j
    }

    /// `P_mu` as a `(2J-1) x (2J+1)` real matrix.
    pub fn op(&self, component: PairComponent) -> &DMatrix<f64> {
        &self.ops[component.index()]
    }

    pub(crate) fn complex_op(&self, component: PairComponent) -> CMatrix {
        self.op(component).map(c)
    }
}

pub fn pair_annihilation_ops(j: AngularMomentum) -> Result<PairAnnihilators> {
    let lower = match j.lowered() {
        Some(l) if j.two_j() >= 2 => l,
        _ => return Err(Error::domain("removing a pair needs J >= 1")),
    };
    let n = i64::from(j.two_j());
    let ops = PairComponent::ALL.map(|comp| {
        let mu = comp.mu();
        let mut p = DMatrix::zeros(lower.dim(), j.dim());
        for col in 0..j.dim() {
            let ups = col as i64;
            if let Some(row) = lower.index(j.two_m(col) - 2 * mu) {
                let w = binomial(2, i64::from(mu) + 1) * binomial(n - 2, ups - i64::from(mu) - 1)
                    / binomial(n, ups);
                p[(row, col)] = w.sqrt();
            }
        }
        p
    });
    Ok(PairAnnihilators { j, ops })
}

/// Two-qubit marginal, `(rho_pair)_{mu nu} = Tr(P_mu rho P_nu^dagger)`.
pub fn reduced_pair_state(state: &SpinState) -> Result<PairState> {
    let ann = pair_annihilation_ops(state.j())?;
    Ok(reduce_with(&ann, state.matrix()))
}

pub(crate) fn reduce_with(ann: &PairAnnihilators, rho: &CMatrix) -> PairState {
    let ops: Vec<CMatrix> = PairComponent::ALL.iter().map(|&k| ann.complex_op(k)).collect();
    let left: Vec<CMatrix> = ops.iter().map(|p| p * rho).collect();
    let mut pair = CMatrix::zeros(3, 3);
    for a in 0..3 {
        for b in 0..3 {
            // Tr(P_a rho P_b^dagger) = sum_ij (P_a rho)_ij conj(P_b)_ij
            pair[(a, b)] = left[a]
                .iter()
                .zip(ops[b].iter())
                .map(|(x, y)| x * y.conj())
                .sum();
        }
    }
    PairState::from_trusted(pair)
}

/// `Pi_m(n) = <m| R^dagger(n) rho R(n) |m>`, ordered `m = -J..J`.
pub fn projection_probabilities(state: &SpinState, n: Direction) -> Vec<f64> {
    let r = rotation_unitary(state.j(), n);
    let rm = r.matrix();
    (0..state.dim())
        .map(|k| {
            let col = rm.column(k);
            let v = state.matrix() * col;
            col.iter()
                .zip(v.iter())
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
                .re
                .max(0.0)
        })
        .collect()
}

/// Pair Husimi function `Q_pair(n)` evaluated on the reduced pair state.
pub fn pair_husimi(state: &SpinState, n: Direction) -> Result<f64> {
    Ok(reduced_pair_state(state)?.husimi(n))
}

/// Pair Husimi function from projection probabilities, `sum_m Q_m Pi_m(n)`.
pub fn pair_husimi_from_projections(state: &SpinState, n: Direction) -> Result<f64> {
    let weights = q_table(state.j())?;
    Ok(projection_probabilities(state, n)
        .iter()
        .zip(weights)
        .map(|(p, q)| p * q)
        .sum())
}

/// `Q_m` for every `m = -J..J`.
pub fn q_table(j: AngularMomentum) -> Result<Vec<f64>> {
    j.two_ms().map(|tm| q_dicke(j, tm)).collect()
}

/// Light polarization selecting which pair is removed on absorption.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LightPolarization {
    /// Removes `|up up>`.
    SigmaMinus,
    /// Removes the symmetric triplet.
    Pi,
    /// Removes `|down down>`.
    SigmaPlus,
}

impl LightPolarization {
    pub fn pair_component(self) -> PairComponent {
        match self {
            Self::SigmaMinus => PairComponent::UpUp,
            Self::Pi => PairComponent::Symmetric,
            Self::SigmaPlus => PairComponent::DownDown,
        }
    }
}

/// Unnormalized state left behind after absorbing one photon.
#[derive(Debug, Clone)]
pub struct ProjectedState {
    /// `P_mu rho P_mu^dagger` on spin `J - 1`.
    pub matrix: CMatrix,
    /// Light shift relative to a fully bright state, `V / V0`.
    pub lightshift_ratio: f64,
}

pub fn projected_excited_state(
    state: &SpinState,
    polarization: LightPolarization,
) -> Result<ProjectedState> {
    let ann = pair_annihilation_ops(state.j())?;
    let p = ann.complex_op(polarization.pair_component());
    let matrix = &p * state.matrix() * p.adjoint();
    let lightshift_ratio = matrix.trace().re;
    Ok(ProjectedState {
        matrix,
        lightshift_ratio,
    })
}

/// Seeded multinomial draw of Stern-Gerlach outcomes along `n`; counts are
/// ordered `m = -J..J`.
///
/// The stream is a ChaCha8 generator seeded with `seed`, consuming one
/// weighted-index draw per shot.
pub fn sample_projections(
    state: &SpinState,
    n: Direction,
    shots: u64,
    seed: u64,
) -> Result<Vec<u64>> {
    let mut rng = random::seeded(seed);
    sample_projections_with(state, n, shots, &mut rng)
}

pub fn sample_projections_with<R: Rng + ?Sized>(
    state: &SpinState,
    n: Direction,
    shots: u64,
    rng: &mut R,
) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::domain("at least one shot is required"));
    }
    let probs = projection_probabilities(state, n);
    let dist = WeightedIndex::new(&probs)
        .map_err(|e| Error::Numerical(format!("invalid projection distribution: {e}")))?;
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        counts[dist.sample(rng)] += 1;
    }
    Ok(counts)
}

/// Spin-1 rotation for `n`, in pair order.
pub fn pair_rotation(n: Direction) -> CMatrix {
    reverse_axes(rotation_unitary(PAIR, n).matrix())
}

/// Sum rule `sum_m Q_m = (2J + 1) / 3`.
pub fn q_sum_rule(j: AngularMomentum) -> f64 {
    (j.dim() as f64) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{ginibre_state, haar_pure_state, random_direction, seeded};
    use crate::states::{cat_state, coherent, dicke, w_state};
    use crate::linalg::max_abs_diff;
    use std::f64::consts::PI;

    const J8: AngularMomentum = AngularMomentum::integer(8);

    #[test]
    fn q_dicke_values() {
        assert_eq!(q_dicke(J8, -16).unwrap(), 0.0);
        assert_eq!(q_dicke(J8, -14).unwrap(), 0.0);
        assert_eq!(q_dicke(J8, 16).unwrap(), 1.0);
        assert!((q_dicke(J8, 0).unwrap() - 7.0 / 30.0).abs() < 1e-16);
        assert!(q_dicke(AngularMomentum::new(1), 1).is_err());
        assert!(q_dicke(J8, 20).is_err());
    }

    #[test]
    fn q_sum_rule_holds() {
        for two_j in 2..=30 {
            let j = AngularMomentum::new(two_j);
            let s: f64 = q_table(j).unwrap().iter().sum();
            assert!((s - q_sum_rule(j)).abs() < 1e-12, "{two_j}");
        }
    }

    #[test]
    fn annihilators_are_complete() {
        for two_j in 2..=20 {
            let ann = pair_annihilation_ops(AngularMomentum::new(two_j)).unwrap();
            let d = two_j as usize + 1;
            let mut sum = DMatrix::<f64>::zeros(d, d);
            for k in PairComponent::ALL {
                sum += ann.op(k).transpose() * ann.op(k);
            }
            assert!((sum - DMatrix::identity(d, d)).amax() < 1e-12, "{two_j}");
        }
        assert!(pair_annihilation_ops(AngularMomentum::new(1)).is_err());
    }

    #[test]
    fn up_up_projection_matches_q_dicke() {
        let ann = pair_annihilation_ops(J8).unwrap();
        for tm in J8.two_ms() {
            let s = dicke(J8, tm).unwrap();
            let p = ann.complex_op(PairComponent::UpUp);
            let v = (&p * s.matrix() * p.adjoint()).trace().re;
            assert!((v - q_dicke(J8, tm).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn two_qubits_reduce_to_themselves() {
        let j1 = AngularMomentum::integer(1);
        let s = ginibre_state(j1, &mut seeded(11));
        let pair = reduced_pair_state(&s).unwrap();
        assert!(max_abs_diff(pair.to_spin_state().matrix(), s.matrix()) < 1e-14);
    }

    #[test]
    fn w_and_cat_pairs() {
        let w = reduced_pair_state(&w_state(J8).unwrap()).unwrap();
        let expect = PairState::diagonal(0.0, 1.0 / 8.0, 7.0 / 8.0).unwrap();
        assert!(max_abs_diff(w.matrix(), expect.matrix()) < 1e-12);
        let cat = reduced_pair_state(&cat_state(J8, 0.3)).unwrap();
        let expect = PairState::diagonal(0.5, 0.0, 0.5).unwrap();
        assert!(max_abs_diff(cat.matrix(), expect.matrix()) < 1e-12);
    }

    #[test]
    fn coherent_state_pair_is_coherent() {
        for &(t, p) in &[(0.0, 0.0), (0.7, 1.2), (2.5, 4.0)] {
            let n = Direction::new(t, p).unwrap();
            let pair = reduced_pair_state(&coherent(J8, n)).unwrap();
            assert!(max_abs_diff(pair.matrix(), PairState::coherent(n).matrix()) < 1e-12);
        }
    }

    #[test]
    fn projections_are_normalized() {
        let mut rng = seeded(5);
        let s = ginibre_state(J8, &mut rng);
        let p = projection_probabilities(&s, random_direction(&mut rng));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let low = projection_probabilities(&dicke(J8, -16).unwrap(), Direction::north());
        assert!((low[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn w_state_nodes() {
        // with R = exp(-i phi Jz) exp(-i theta Jy) the interference node of
        // projection m sits at cos(theta) = -m/J
        let w = w_state(J8).unwrap();
        for k in 1..16 {
            let m = k as f64 - 8.0;
            let theta = (-m / 8.0).acos();
            let p = projection_probabilities(&w, Direction::new(theta, 0.3).unwrap());
            assert!(p[k] < 1e-12, "m={m}: {}", p[k]);
        }
    }

    #[test]
    fn cat_equatorial_alternation() {
        let cat = cat_state(J8, 0.0);
        let period = 2.0 * PI / 16.0;
        let even_weight = |phi: f64| -> f64 {
            let p = projection_probabilities(&cat, Direction::equatorial(phi));
            p.iter().step_by(2).sum()
        };
        // even/odd alternate each half period and recur each period
        let a = even_weight(0.0);
        let b = even_weight(period / 2.0);
        let c2 = even_weight(period);
        assert!((a - 1.0).abs() < 1e-12 && b.abs() < 1e-12 && (c2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn husimi_examples() {
        let low = coherent(J8, Direction::south());
        for &theta in &[0.0, 0.5, 1.4, 2.2, PI] {
            let q = pair_husimi(&low, Direction::new(theta, 0.8).unwrap()).unwrap();
            assert!((q - (theta / 2.0).sin().powi(4)).abs() < 1e-12);
        }
        let w = w_state(J8).unwrap();
        assert!(pair_husimi(&w, Direction::north()).unwrap().abs() < 1e-14);
        let mixed = SpinState::maximally_mixed(J8);
        let q = pair_husimi(&mixed, Direction::new(1.0, 2.0).unwrap()).unwrap();
        assert!((q - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn husimi_routes_agree() {
        let mut rng = seeded(21);
        for i in 0..100 {
            let j = AngularMomentum::new(2 + (i % 15));
            let s = if i % 2 == 0 { ginibre_state(j, &mut rng) } else { haar_pure_state(j, &mut rng) };
            let n = random_direction(&mut rng);
            let a = pair_husimi(&s, n).unwrap();
            let b = pair_husimi_from_projections(&s, n).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn rotation_covariance() {
        let mut rng = seeded(9);
        for _ in 0..20 {
            let s = ginibre_state(AngularMomentum::new(7), &mut rng);
            let n = random_direction(&mut rng);
            let r = rotation_unitary(s.j(), n);
            let rotated = reduced_pair_state(&s.transform(&r)).unwrap();
            let rp = pair_rotation(n);
            let expect = &rp * reduced_pair_state(&s).unwrap().matrix() * rp.adjoint();
            assert!(max_abs_diff(rotated.matrix(), &expect) < 1e-12);
        }
    }

    #[test]
    fn lightshift_examples() {
        let low = dicke(J8, -16).unwrap();
        let r = projected_excited_state(&low, LightPolarization::SigmaMinus).unwrap();
        assert_eq!(r.lightshift_ratio, 0.0);
        assert!(r.matrix.iter().all(|z| z.norm() == 0.0));
        let high = dicke(J8, 16).unwrap();
        let r = projected_excited_state(&high, LightPolarization::SigmaMinus).unwrap();
        assert!((r.lightshift_ratio - 1.0).abs() < 1e-15);
        let w = w_state(J8).unwrap();
        let r = projected_excited_state(&w, LightPolarization::SigmaPlus).unwrap();
        assert!((r.lightshift_ratio - 7.0 / 8.0).abs() < 1e-14);
    }

    #[test]
    fn lightshift_equals_polar_husimi() {
        let mut rng = seeded(13);
        let s = ginibre_state(J8, &mut rng);
        let pair = reduced_pair_state(&s).unwrap();
        let sm = projected_excited_state(&s, LightPolarization::SigmaMinus).unwrap();
        let sp = projected_excited_state(&s, LightPolarization::SigmaPlus).unwrap();
        let pi = projected_excited_state(&s, LightPolarization::Pi).unwrap();
        assert!((sm.lightshift_ratio - pair.husimi(Direction::north())).abs() < 1e-12);
        assert!((sp.lightshift_ratio - pair.husimi(Direction::south())).abs() < 1e-12);
        assert!((pi.lightshift_ratio - pair.matrix()[(1, 1)].re).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_deterministic() {
        let low = dicke(J8, -16).unwrap();
        let counts = sample_projections(&low, Direction::north(), 100, 1).unwrap();
        assert_eq!(counts[0], 100);
        let cat = cat_state(J8, 0.0);
        let a = sample_projections(&cat, Direction::north(), 1000, 42).unwrap();
        let b = sample_projections(&cat, Direction::north(), 1000, 42).unwrap();
        assert_eq!(a, b);
        assert!(sample_projections(&cat, Direction::north(), 0, 1).is_err());
    }

    #[test]
    fn cat_sampling_concentrates() {
        let cat = cat_state(J8, 0.0);
        let shots = 100_000u64;
        let counts = sample_projections(&cat, Direction::north(), shots, 2024).unwrap();
        let sigma = (shots as f64 * 0.25).sqrt();
        for &k in &[0usize, 16] {
            assert!((counts[k] as f64 - shots as f64 / 2.0).abs() < 5.0 * sigma);
        }
        assert_eq!(counts[0] + counts[16], shots);
    }
}
