//! Optical coupling of a ground spin `J` to an excited manifold `J'`, and
//! the open-system dynamics of the joint state.
//!
//! Couplings follow angular-momentum addition,
//! `<J', m+q| D_q |J, m> = <J m; 1 q | J' m+q>`, and each photon
//! polarization `q` is a separate decay channel with jump operator
//! `sqrt(gamma) D_q^dagger`. For `J' = J + 1` the emission map coincides
//! with discarding two of the `2J'` qubits.
//!
//! Joint states are ordered ground block first, then excited, each in
//! ascending `m`.

use num_complex::Complex64;

use crate::angular::{clebsch_gordan, AngularMomentum, SpinState};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, I};

/// Dipole couplings between a ground and an excited manifold.
#[derive(Debug, Clone)]
pub struct TransitionSystem {
    ground: AngularMomentum,
    excited: AngularMomentum,
    gamma: f64,
    /// `D_q` for `q = -1, 0, +1`, shape `excited x ground`.
    couplings: [CMatrix; 3],
}

impl TransitionSystem {
    /// `gamma` is the excited-state decay rate `1 / tau` in 1/s.
    pub fn new(ground: AngularMomentum, excited: AngularMomentum, gamma: f64) -> Result<Self> {
        let (tg, te) = (ground.two_j() as i32, excited.two_j() as i32);
        if (tg - te).abs() > 2 || (tg - te) % 2 != 0 || tg + te < 2 {
            return Err(Error::domain(format!(
                "spins {tg}/2 and {te}/2 are not dipole coupled"
            )));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::domain(format!("decay rate {gamma} must be finite and >= 0")));
        }
        let couplings = [-1, 0, 1].map(|q| {
            let mut d = CMatrix::zeros(excited.dim(), ground.dim());
            for (col, tm) in ground.two_ms().enumerate() {
                let tmp = tm + 2 * q;
                if let Some(row) = excited.index(tmp) {
                    let cg = clebsch_gordan(ground.two_j(), tm, 2, 2 * q, excited.two_j(), tmp)
                        .expect("quantum numbers are in range");
                    d[(row, col)] = c(cg);
                }
            }
            d
        });
        Ok(Self {
            ground,
            excited,
            gamma,
            couplings,
        })
    }

    pub fn ground(&self) -> AngularMomentum {
        self.ground
    }

    pub fn excited(&self) -> AngularMomentum {
        self.excited
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.ground, self.excited, gamma)
    }

    /// `D_q`, ground to excited; `q` in `{-1, 0, 1}`.
    pub fn coupling(&self, q: i32) -> Result<&CMatrix> {
        match q {
            -1..=1 => Ok(&self.couplings[(q + 1) as usize]),
            _ => Err(Error::domain(format!("no dipole component q = {q}"))),
        }
    }

    /// `<J' m'| D_q |J m>` by doubled quantum numbers; zero off-selection.
    pub fn coupling_element(&self, q: i32, two_m_excited: i32, two_m_ground: i32) -> f64 {
        match (self.coupling(q), self.excited.index(two_m_excited), self.ground.index(two_m_ground)) {
            (Ok(d), Some(r), Some(col)) => d[(r, col)].re,
            _ => 0.0,
        }
    }

    /// Largest deviation of `sum_q D_q D_q^dagger` from the identity on
    /// the excited manifold.
    pub fn completeness_error(&self) -> f64 {
        let sum = self
            .couplings
            .iter()
            .fold(CMatrix::zeros(self.excited.dim(), self.excited.dim()), |acc, d| acc + d * d.adjoint());
        linalg::max_abs_diff(&sum, &CMatrix::identity(self.excited.dim(), self.excited.dim()))
    }

    /// Drive operator `sum_q eps_q D_q`.
    pub fn drive_operator(&self, pol: &DrivePolarization) -> CMatrix {
        self.couplings
            .iter()
            .zip(pol.components())
            .fold(CMatrix::zeros(self.excited.dim(), self.ground.dim()), |acc, (d, e)| acc + d * e)
    }

    fn joint_dim(&self) -> usize {
        self.ground.dim() + self.excited.dim()
    }
}

/// Complex drive components `(eps_-1, eps_0, eps_+1)`, unit norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivePolarization {
    components: [Complex64; 3],
}

impl DrivePolarization {
    pub fn new(components: [Complex64; 3]) -> Result<Self> {
        let norm: f64 = components.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() < 1e-9) {
            return Err(Error::domain(format!("polarization norm {norm} is not 1")));
        }
        Ok(Self { components })
    }

    pub fn sigma_minus() -> Self {
        Self {
            components: [c(1.0), c(0.0), c(0.0)],
        }
    }

    pub fn pi() -> Self {
        Self {
            components: [c(0.0), c(1.0), c(0.0)],
        }
    }

    pub fn sigma_plus() -> Self {
        Self {
            components: [c(0.0), c(0.0), c(1.0)],
        }
    }

    /// `(e_+ + e_-) / sqrt 2`.
    pub fn x_linear() -> Self {
        let r = c(std::f64::consts::FRAC_1_SQRT_2);
        Self {
            components: [r, c(0.0), r],
        }
    }

    pub fn components(&self) -> [Complex64; 3] {
        self.components
    }
}

/// Density matrix on ground (+) excited.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    ground: AngularMomentum,
    excited: AngularMomentum,
    matrix: CMatrix,
}

impl JointState {
    pub fn new(sys: &TransitionSystem, matrix: CMatrix) -> Result<Self> {
        crate::angular::check_density_matrix(&matrix, sys.joint_dim())?;
        Ok(Self {
            ground: sys.ground,
            excited: sys.excited,
            matrix,
        })
    }

    pub fn from_ground(sys: &TransitionSystem, state: &SpinState) -> Result<Self> {
        Self::embed(sys, state, 0, sys.ground)
    }

    pub fn from_excited(sys: &TransitionSystem, state: &SpinState) -> Result<Self> {
        Self::embed(sys, state, sys.ground.dim(), sys.excited)
    }

    fn embed(sys: &TransitionSystem, state: &SpinState, offset: usize, j: AngularMomentum) -> Result<Self> {
        if state.j() != j {
            return Err(Error::DimensionMismatch {
                expected: j.dim(),
                found: state.dim(),
            });
        }
        let mut m = CMatrix::zeros(sys.joint_dim(), sys.joint_dim());
        m.view_mut((offset, offset), (j.dim(), j.dim())).copy_from(state.matrix());
        Ok(Self {
            ground: sys.ground,
            excited: sys.excited,
            matrix: m,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn ground_block(&self) -> CMatrix {
        let g = self.ground.dim();
        self.matrix.view((0, 0), (g, g)).into_owned()
    }

    pub fn excited_block(&self) -> CMatrix {
        let (g, e) = (self.ground.dim(), self.excited.dim());
        self.matrix.view((g, g), (e, e)).into_owned()
    }

    pub fn ground_population(&self) -> f64 {
        linalg::trace(&self.ground_block()).re
    }

    pub fn excited_population(&self) -> f64 {
        linalg::trace(&self.excited_block()).re
    }

    /// Population of excited level `m'` in the joint state (not
    /// renormalized).
    pub fn excited_level(&self, two_m: i32) -> f64 {
        self.excited
            .index(two_m)
            .map_or(0.0, |k| self.matrix[(self.ground.dim() + k, self.ground.dim() + k)].re)
    }

    pub fn ground_level(&self, two_m: i32) -> f64 {
        self.ground.index(two_m).map_or(0.0, |k| self.matrix[(k, k)].re)
    }

    /// Excited block renormalized to a state.
    pub fn excited_state(&self) -> Result<SpinState> {
        renormalized(self.excited, self.excited_block())
    }

    pub fn ground_state(&self) -> Result<SpinState> {
        renormalized(self.ground, self.ground_block())
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.matrix)[0]
    }
}

fn renormalized(j: AngularMomentum, block: CMatrix) -> Result<SpinState> {
    let p = linalg::trace(&block).re;
    if p < 1e-14 {
        return Err(Error::domain("manifold is unpopulated"));
    }
    SpinState::new(j, block / c(p))
}

/// `sum_q D_q^dagger rho' D_q`: the ground state after one photon has been
/// emitted from `rho'`.
fn emission(sys: &TransitionSystem, excited: &CMatrix) -> CMatrix {
    sys.couplings
        .iter()
        .fold(CMatrix::zeros(sys.ground.dim(), sys.ground.dim()), |acc, d| {
            acc + d.adjoint() * excited * d
        })
}

/// Ground state after spontaneous emission from the excited manifold,
/// summed over photon polarizations. Requires `J' = J + 1`, where the map
/// is the loss of one qubit pair.
pub fn spontaneous_emission_map(sys: &TransitionSystem, excited: &SpinState) -> Result<SpinState> {
    if sys.excited.two_j() != sys.ground.two_j() + 2 {
        return Err(Error::domain("emission map needs J' = J + 1"));
    }
    if excited.j() != sys.excited {
        return Err(Error::DimensionMismatch {
            expected: sys.excited.dim(),
            found: excited.dim(),
        });
    }
    Ok(SpinState::from_trusted(sys.ground, emission(sys, excited.matrix())))
}

/// Ground state left once all excited population has decayed with the
/// drive off: ground block plus emitted population.
pub fn relax_to_ground(sys: &TransitionSystem, joint: &JointState) -> SpinState {
    SpinState::from_trusted(sys.ground, joint.ground_block() + emission(sys, &joint.excited_block()))
}

/// Largest `|<e| V |g>|` over ground levels populated above `1e-12`; the
/// coupling that pulse areas refer to.
pub fn dominant_coupling(sys: &TransitionSystem, ground: &SpinState, pol: &DrivePolarization) -> Result<f64> {
    if ground.j() != sys.ground {
        return Err(Error::DimensionMismatch {
            expected: sys.ground.dim(),
            found: ground.dim(),
        });
    }
    let v = sys.drive_operator(pol);
    let pops = ground.populations();
    let mut best: f64 = 0.0;
    for (col, p) in pops.iter().enumerate() {
        if *p > 1e-12 {
            for row in 0..v.nrows() {
                best = best.max(v[(row, col)].norm());
            }
        }
    }
    if best < 1e-14 {
        return Err(Error::domain("drive does not couple the initial state"));
    }
    Ok(best)
}

/// Bare Rabi frequency that gives `area` on the dominant transition of
/// `ground` in time `duration`.
pub fn rabi_frequency_for_area(
    sys: &TransitionSystem,
    ground: &SpinState,
    pol: &DrivePolarization,
    area: f64,
    duration: f64,
) -> Result<f64> {
    if !(duration > 0.0) {
        return Err(Error::domain("pulse duration must be positive"));
    }
    Ok(area / (dominant_coupling(sys, ground, pol)? * duration))
}

/// Rotating-frame Hamiltonian `(rabi/2)(V + V^dagger) + detuning P_e`.
pub fn drive_hamiltonian(sys: &TransitionSystem, pol: &DrivePolarization, rabi: f64, detuning: f64) -> CMatrix {
    let (g, e) = (sys.ground.dim(), sys.excited.dim());
    let v = sys.drive_operator(pol) * c(rabi / 2.0);
    let mut h = CMatrix::zeros(g + e, g + e);
    h.view_mut((g, 0), (e, g)).copy_from(&v);
    h.view_mut((0, g), (g, e)).copy_from(&v.adjoint());
    for k in g..g + e {
        h[(k, k)] = c(detuning);
    }
    h
}

#[derive(Debug, Clone)]
pub struct RabiPulse {
    pub joint: JointState,
    /// Excited block, renormalized.
    pub excited: SpinState,
    /// Population left in the ground manifold.
    pub leakage: f64,
    pub dominant_coupling: f64,
}

/// Closed-system pulse of the given area on the dominant transition.
pub fn rabi_pulse_ideal(
    sys: &TransitionSystem,
    ground: &SpinState,
    pol: &DrivePolarization,
    area: f64,
) -> Result<RabiPulse> {
    let g = dominant_coupling(sys, ground, pol)?;
    // unit duration, Rabi frequency area / g
    let h = drive_hamiltonian(sys, pol, area / g, 0.0);
    let u = linalg::unitary_propagator(&h, 1.0);
    let start = JointState::from_ground(sys, ground)?;
    let rho = &u * start.matrix() * u.adjoint();
    let joint = JointState {
        ground: sys.ground,
        excited: sys.excited,
        matrix: (&rho + rho.adjoint()) * c(0.5),
    };
    let leakage = joint.ground_population();
    let excited = joint.excited_state()?;
    Ok(RabiPulse {
        joint,
        excited,
        leakage,
        dominant_coupling: g,
    })
}

/// Drive settings for [`lindblad_evolve`]; angular frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drive {
    pub polarization: DrivePolarization,
    pub rabi: f64,
    pub detuning: f64,
}

impl Drive {
    pub fn off() -> Self {
        Self {
            polarization: DrivePolarization::pi(),
            rabi: 0.0,
            detuning: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    /// Largest step as a fraction of the fastest time scale.
    pub step_fraction: f64,
    /// Trace-norm gap allowed between `n` and `2n` steps.
    pub tolerance: f64,
    pub max_refinements: u32,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            step_fraction: 1.0 / 50.0,
            tolerance: 1e-8,
            max_refinements: 10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LindbladOutcome {
    pub state: JointState,
    pub steps: usize,
    pub step_size: f64,
    /// Trace norm of the difference between the last two refinements.
    pub refinement_error: f64,
}

type Triplets = Vec<(usize, usize, Complex64)>;

fn nonzeros(m: &CMatrix) -> Triplets {
    let mut out = Vec::new();
    for col in 0..m.ncols() {
        for row in 0..m.nrows() {
            let v = m[(row, col)];
            if v != Complex64::new(0.0, 0.0) {
                out.push((row, col, v));
            }
        }
    }
    out
}

/// Right-hand side of the master equation, stored sparse: the drive and
/// the couplings have few nonzero elements.
struct Generator {
    /// `H - (i/2) sum_q L_q^dagger L_q`
    h_eff: Triplets,
    /// `sqrt(gamma) D_q`; the jumps `L_q` are their adjoints, acting from
    /// the excited block into the ground block.
    channels: Vec<Triplets>,
    ground_dim: usize,
}

impl Generator {
    fn new(sys: &TransitionSystem, drive: &Drive) -> Self {
        let g = sys.ground.dim();
        let mut h = drive_hamiltonian(sys, &drive.polarization, drive.rabi, drive.detuning);
        let mut channels = Vec::new();
        if sys.gamma > 0.0 {
            // completeness: sum_q L_q^dagger L_q = gamma P_e
            for k in g..h.nrows() {
                h[(k, k)] -= I * (0.5 * sys.gamma);
            }
            channels = sys
                .couplings
                .iter()
                .map(|d| nonzeros(&(d * c(sys.gamma.sqrt()))))
                .collect();
        }
        Self {
            h_eff: nonzeros(&h),
            channels,
            ground_dim: g,
        }
    }

    fn apply(&self, rho: &CMatrix) -> CMatrix {
        let n = rho.nrows();
        let mut a = CMatrix::zeros(n, n);
        for &(i, j, h) in &self.h_eff {
            for k in 0..n {
                a[(i, k)] += h * rho[(j, k)];
            }
        }
        // rho is Hermitian, so rho H_eff^dagger = (H_eff rho)^dagger
        let mut out = (&a - a.adjoint()) * (-I);
        let g = self.ground_dim;
        for d in &self.channels {
            for &(r1, a1, v1) in d {
                for &(r2, b2, v2) in d {
                    out[(a1, b2)] += v1.conj() * rho[(g + r1, g + r2)] * v2;
                }
            }
        }
        out
    }

    fn rk4(&self, rho: &CMatrix, dt: f64, steps: usize) -> CMatrix {
        let mut r = rho.clone();
        let h = c(dt);
        for _ in 0..steps {
            let k1 = self.apply(&r);
            let k2 = self.apply(&(&r + &k1 * (h * 0.5)));
            let k3 = self.apply(&(&r + &k2 * (h * 0.5)));
            let k4 = self.apply(&(&r + &k3 * h));
            r += (k1 + (k2 + k3) * c(2.0) + k4) * (h / 6.0);
        }
        (&r + r.adjoint()) * c(0.5)
    }
}

/// Master-equation evolution of the joint state under drive and decay.
///
/// Fixed-step RK4; the step count doubles until two successive
/// refinements agree to the tolerance in trace norm.
pub fn lindblad_evolve(
    sys: &TransitionSystem,
    joint: &JointState,
    drive: &Drive,
    duration: f64,
) -> Result<LindbladOutcome> {
    lindblad_evolve_with(sys, joint, drive, duration, &IntegratorSettings::default())
}

pub fn lindblad_evolve_with(
    sys: &TransitionSystem,
    joint: &JointState,
    drive: &Drive,
    duration: f64,
    settings: &IntegratorSettings,
) -> Result<LindbladOutcome> {
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::domain(format!("duration {duration} must be finite and >= 0")));
    }
    if joint.ground != sys.ground || joint.excited != sys.excited {
        return Err(Error::DimensionMismatch {
            expected: sys.joint_dim(),
            found: joint.matrix.nrows(),
        });
    }
    let fastest = [drive.rabi.abs(), sys.gamma, drive.detuning.abs()]
        .into_iter()
        .fold(0.0, f64::max);
    if duration == 0.0 || fastest == 0.0 {
        return Ok(LindbladOutcome {
            state: joint.clone(),
            steps: 0,
            step_size: 0.0,
            refinement_error: 0.0,
        });
    }
    let gen = Generator::new(sys, drive);
    let max_step = settings.step_fraction / fastest;
    let mut steps = (duration / max_step).ceil().max(1.0) as usize;
    let mut coarse = gen.rk4(&joint.matrix, duration / steps as f64, steps);
    let mut last_error = f64::INFINITY;
    for _ in 0..=settings.max_refinements {
        let fine_steps = 2 * steps;
        let fine = gen.rk4(&joint.matrix, duration / fine_steps as f64, fine_steps);
        last_error = linalg::trace_norm_hermitian(&(&fine - &coarse));
        steps = fine_steps;
        coarse = fine;
        if last_error < settings.tolerance {
            let state = JointState {
                ground: sys.ground,
                excited: sys.excited,
                matrix: coarse,
            };
            return Ok(LindbladOutcome {
                state,
                steps,
                step_size: duration / steps as f64,
                refinement_error: last_error,
            });
        }
    }
    Err(Error::Numerical(format!(
        "RK4 refinement did not reach {:.1e} after {steps} steps (last gap {last_error:.3e})",
        settings.tolerance
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::partition::oracle::brute_force_remainder_oracle;
    use crate::partition::reduced_pair_state;
    use crate::random::{haar_amplitudes, seeded};
    use crate::states::{cat_state, dicke};
    use std::f64::consts::PI;

    const J8: AngularMomentum = AngularMomentum::integer(8);
    const J9: AngularMomentum = AngularMomentum::integer(9);

    fn decay_system(gamma: f64) -> TransitionSystem {
        TransitionSystem::new(J8, J9, gamma).unwrap()
    }

    #[test]
    fn couplings_and_selection() {
        let sys = decay_system(1.0);
        assert!((sys.coupling_element(1, 18, 16) - 1.0).abs() < 1e-14);
        assert!((sys.coupling_element(-1, -16, -14).powi(2) - 8.0 / 9.0).abs() < 1e-13);
        assert!((sys.coupling_element(0, -16, -16).powi(2) - 1.0 / 9.0).abs() < 1e-13);
        assert_eq!(sys.coupling_element(1, 18, 14), 0.0);
        assert!(sys.coupling(2).is_err());
    }

    #[test]
    fn completeness_for_all_configurations() {
        for tg in 0..=10u32 {
            for te in [tg.saturating_sub(2), tg, tg + 2] {
                let Ok(sys) = TransitionSystem::new(AngularMomentum::new(tg), AngularMomentum::new(te), 1.0) else {
                    continue;
                };
                assert!(sys.completeness_error() < 1e-12, "{tg} {te}");
            }
        }
        assert!(TransitionSystem::new(J8, AngularMomentum::integer(10), 1.0).is_err());
        assert!(TransitionSystem::new(J8, AngularMomentum::new(17), 1.0).is_err());
        assert!(TransitionSystem::new(AngularMomentum::new(0), AngularMomentum::new(0), 1.0).is_err());
    }

    #[test]
    fn x_polarized_coupling_ratio() {
        let sys = decay_system(1.0);
        let v = sys.drive_operator(&DrivePolarization::x_linear());
        let to_9 = v[(J9.index(18).unwrap(), J8.index(16).unwrap())].norm();
        let to_7 = v[(J9.index(14).unwrap(), J8.index(16).unwrap())].norm();
        assert!((to_7 / to_9 - 1.0 / 153f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn polarization_validation() {
        assert!(DrivePolarization::new([c(1.0), c(1.0), c(0.0)]).is_err());
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(
            DrivePolarization::new([c(r), c(0.0), c(r)]).unwrap().components(),
            DrivePolarization::x_linear().components()
        );
    }

    #[test]
    fn decayed_w_branching() {
        let sys = decay_system(1.0);
        let out = spontaneous_emission_map(&sys, &dicke(J9, -16).unwrap()).unwrap();
        assert!((out.population(-16) - 1.0 / 9.0).abs() < 1e-12);
        assert!((out.population(-14) - 8.0 / 9.0).abs() < 1e-12);
        let pair = reduced_pair_state(&out).unwrap();
        assert!((crate::nonclassical::wootters_concurrence(&pair) - 1.0 / 9.0).abs() < 1e-9);
    }

    #[test]
    fn which_path_dichotomy() {
        let sys = decay_system(1.0);
        let psi1 = cat_state(J9, 0.0);
        let out = spontaneous_emission_map(&sys, &psi1).unwrap();
        assert_eq!(out.extremal_coherence(), 0.0);
        assert!((out.population(-16) - 0.5).abs() < 1e-12);
        assert!((out.population(16) - 0.5).abs() < 1e-12);

        let mut amps = vec![c(0.0); 19];
        amps[1] = c(1.0);
        amps[17] = c(1.0);
        let psi2 = SpinState::pure(J9, &amps).unwrap();
        let out = spontaneous_emission_map(&sys, &psi2).unwrap();
        assert!((out.extremal_coherence() - 1.0 / 18.0).abs() < 1e-12);
        assert!((out.population(-14) - 8.0 / 18.0).abs() < 1e-12);
        assert!((out.population(14) - 8.0 / 18.0).abs() < 1e-12);
        assert!((out.population(16) - 1.0 / 18.0).abs() < 1e-12);
        assert!((out.extremal_coherence() / 0.5 - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn emission_equals_pair_loss() {
        let mut rng = seeded(31);
        for two_jp in 2..=8u32 {
            let jp = AngularMomentum::new(two_jp);
            let sys = TransitionSystem::new(AngularMomentum::new(two_jp - 2), jp, 1.0).unwrap();
            for _ in 0..5 {
                let amps = haar_amplitudes(jp.dim(), &mut rng);
                let state = SpinState::pure(jp, &amps).unwrap();
                let map = spontaneous_emission_map(&sys, &state).unwrap();
                let oracle = brute_force_remainder_oracle(&amps).unwrap();
                assert!(max_abs_diff(map.matrix(), oracle.matrix()) < 1e-12, "2J' = {two_jp}");
            }
        }
    }

    #[test]
    fn emission_map_checks_manifolds() {
        let same = TransitionSystem::new(J8, J8, 1.0).unwrap();
        assert!(spontaneous_emission_map(&same, &dicke(J8, 0).unwrap()).is_err());
        assert!(spontaneous_emission_map(&decay_system(1.0), &dicke(J8, 0).unwrap()).is_err());
    }

    #[test]
    fn ideal_pi_pulse_on_isolated_pair() {
        let sys = decay_system(0.0);
        let p = rabi_pulse_ideal(&sys, &dicke(J8, -16).unwrap(), &DrivePolarization::pi(), PI).unwrap();
        assert!((p.dominant_coupling - 1.0 / 3.0).abs() < 1e-14);
        assert!((p.excited.population(-16) - 1.0).abs() < 1e-12);
        assert!(p.leakage < 1e-12);
        let none = rabi_pulse_ideal(&sys, &dicke(J8, 16).unwrap(), &DrivePolarization::sigma_minus(), PI);
        assert!(none.is_ok());
        let uncoupled = TransitionSystem::new(J8, AngularMomentum::integer(7), 0.0).unwrap();
        assert!(rabi_pulse_ideal(&uncoupled, &dicke(J8, 16).unwrap(), &DrivePolarization::sigma_plus(), PI).is_err());
    }

    #[test]
    fn z_polarized_pulse_on_cat_gives_psi2() {
        let sys = decay_system(0.0);
        let p = rabi_pulse_ideal(&sys, &cat_state(J8, 0.0), &DrivePolarization::pi(), PI).unwrap();
        // both |+-8> couple with the same strength 1/3
        assert!(p.leakage < 1e-12);
        assert!((p.excited.population(-16) - 0.5).abs() < 1e-12);
        assert!((p.excited.population(16) - 0.5).abs() < 1e-12);
        assert!((p.excited.extremal_coherence() - 0.0).abs() < 1e-12);
        assert!((p.excited.element(-16, 16).norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn closed_lindblad_matches_ideal_pulse() {
        let sys = decay_system(0.0);
        let cat = cat_state(J8, 0.0);
        let pol = DrivePolarization::x_linear();
        let ideal = rabi_pulse_ideal(&sys, &cat, &pol, PI).unwrap();
        let t = 50e-9;
        let rabi = rabi_frequency_for_area(&sys, &cat, &pol, PI, t).unwrap();
        let drive = Drive {
            polarization: pol,
            rabi,
            detuning: 0.0,
        };
        let out = lindblad_evolve(&sys, &JointState::from_ground(&sys, &cat).unwrap(), &drive, t).unwrap();
        assert!(max_abs_diff(out.state.matrix(), ideal.joint.matrix()) < 1e-8);
    }

    #[test]
    fn free_decay_reaches_emission_map() {
        let gamma = 1.0 / 1.2e-6;
        let sys = decay_system(gamma);
        let mut amps = vec![c(0.0); 19];
        amps[1] = c(1.0);
        amps[17] = Complex64::new(0.0, 1.0);
        let psi2 = SpinState::pure(J9, &amps).unwrap();
        let joint = JointState::from_excited(&sys, &psi2).unwrap();
        let out = lindblad_evolve(&sys, &joint, &Drive::off(), 30.0 / gamma).unwrap();
        let ground = out.state.ground_state().unwrap();
        let expect = spontaneous_emission_map(&sys, &psi2).unwrap();
        assert!(max_abs_diff(ground.matrix(), expect.matrix()) < 1e-6);
        assert!(max_abs_diff(relax_to_ground(&sys, &joint).matrix(), expect.matrix()) < 1e-12);
        assert!((out.state.trace() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn driven_decay_stays_physical() {
        let sys = decay_system(1.0 / 1.2e-6);
        let cat = cat_state(J8, 0.3);
        let pol = DrivePolarization::x_linear();
        let t = 120e-9;
        let drive = Drive {
            polarization: pol,
            rabi: rabi_frequency_for_area(&sys, &cat, &pol, 2.0 * PI, t).unwrap(),
            detuning: 2.0 * PI * 1e6,
        };
        let out = lindblad_evolve(&sys, &JointState::from_ground(&sys, &cat).unwrap(), &drive, t).unwrap();
        assert!((out.state.trace() - 1.0).abs() < 1e-9);
        assert!(out.state.min_eigenvalue() > -1e-7);
        assert!(out.refinement_error < 1e-8);
    }

    #[test]
    fn integrator_reports_failure() {
        let sys = decay_system(1.0);
        let joint = JointState::from_ground(&sys, &dicke(J8, -16).unwrap()).unwrap();
        let drive = Drive {
            polarization: DrivePolarization::pi(),
            rabi: 1.0,
            detuning: 0.0,
        };
        let strict = IntegratorSettings {
            step_fraction: 10.0,
            tolerance: 1e-30,
            max_refinements: 1,
        };
        assert!(matches!(
            lindblad_evolve_with(&sys, &joint, &drive, 5.0, &strict),
            Err(Error::Numerical(_))
        ));
        assert!(lindblad_evolve(&sys, &joint, &drive, -1.0).is_err());
    }
}
