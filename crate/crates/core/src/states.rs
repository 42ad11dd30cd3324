//! State preparation: Dicke, coherent, W, cat and arbitrary superpositions,
//! plus one-axis-twisting evolution.

use num_complex::Complex64;

use crate::angular::{self, evolve, spin_operators, AngularMomentum, Direction, Operator, SpinState};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};

/// Parameters of the twisting Hamiltonian `H/hbar = chi Jx^2 + larmor Jz`.
///
/// `chi` and `larmor` are angular frequencies (rad/s), `duration` is in
/// seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OatParams {
    chi: f64,
    larmor: f64,
    duration: f64,
}

impl OatParams {
    pub fn new(chi: f64, larmor: f64, duration: f64) -> Result<Self> {
        if !(chi.is_finite() && larmor.is_finite() && duration.is_finite()) {
            return Err(Error::domain("non-finite twisting parameters"));
        }
        // chi = 0 is the pure Larmor limit
        if chi < 0.0 {
            return Err(Error::domain(format!("twisting strength {chi} is negative")));
        }
        if duration < 0.0 {
            return Err(Error::domain(format!("negative duration {duration}")));
        }
        Ok(Self {
            chi,
            larmor,
            duration,
        })
    }

    /// Revival time `pi / (2 chi)` at which a stretched state becomes a cat.
    pub fn cat_revival(chi: f64) -> Result<Self> {
        if chi <= 0.0 {
            return Err(Error::domain("cat revival needs chi > 0"));
        }
        Self::new(chi, 0.0, std::f64::consts::PI / (2.0 * chi))
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn larmor(&self) -> f64 {
        self.larmor
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn with_duration(self, duration: f64) -> Result<Self> {
        Self::new(self.chi, self.larmor, duration)
    }

    /// The Hermitian generator `chi Jx^2 + larmor Jz`.
    pub fn generator(&self, j: AngularMomentum) -> Operator {
        let ops = spin_operators(j);
        let jx2 = ops.jx.compose(&ops.jx);
        jx2.scale(self.chi).add(&ops.jz.scale(self.larmor))
    }
}

/// Dicke state `|m>`; `two_m` is twice the magnetic quantum number.
pub fn dicke(j: AngularMomentum, two_m: i32) -> Result<SpinState> {
    let idx = j.index(two_m).ok_or_else(|| {
        Error::domain(format!("m = {two_m}/2 is not in the spin-{}/2 multiplet", j.two_j()))
    })?;
    let d = j.dim();
    let mut m = CMatrix::zeros(d, d);
    m[(idx, idx)] = c(1.0);
    Ok(SpinState::from_trusted(j, m))
}

/// W state: a single qubit up, `|m = -J + 1>`.
pub fn w_state(j: AngularMomentum) -> Result<SpinState> {
    if j.two_j() < 1 {
        return Err(Error::domain("W state needs at least one qubit"));
    }
    dicke(j, -(j.two_j() as i32) + 2)
}

/// Coherent state `R(n)|m = J>`, polarized along `n`.
pub fn coherent(j: AngularMomentum, n: Direction) -> SpinState {
    let v = angular::coherent_amplitudes(j, n);
    SpinState::from_trusted(j, &v * v.adjoint())
}

/// `(|m=-J> + e^{i alpha}|m=J>)/sqrt(2)`.
pub fn cat_state(j: AngularMomentum, alpha: f64) -> SpinState {
    let d = j.dim();
    let mut amps = vec![c(0.0); d];
    amps[0] += c(1.0);
    amps[d - 1] += Complex64::from_polar(1.0, alpha);
    if d == 1 {
        // spin 0: both stretched states coincide
        amps[0] = c(1.0);
    }
    SpinState::pure(j, &amps).expect("cat amplitudes are non-zero")
}

/// Normalized pure state from amplitudes over `m = -J..J`.
pub fn superposition(j: AngularMomentum, amplitudes: &[Complex64]) -> Result<SpinState> {
    SpinState::pure(j, amplitudes)
}

/// Evolution under `chi Jx^2 + larmor Jz` for `p.duration()`.
pub fn one_axis_twisting(state: &SpinState, p: &OatParams) -> SpinState {
    if p.duration == 0.0 {
        return state.clone();
    }
    evolve(state, &p.generator(state.j()), p.duration).expect("twisting generator is Hermitian")
}

/// Twisting propagator with a cached eigendecomposition, for evaluating
/// the same Hamiltonian at many durations.
#[derive(Debug, Clone)]
pub struct TwistingEvolution {
    j: AngularMomentum,
    energies: Vec<f64>,
    eigenvectors: CMatrix,
}

impl TwistingEvolution {
    /// Ignores `params.duration()`; durations are supplied per call.
    pub fn new(j: AngularMomentum, params: &OatParams) -> Self {
        let (energies, eigenvectors) = linalg::hermitian_eigen(params.generator(j).matrix());
        Self {
            j,
            energies,
            eigenvectors,
        }
    }

    pub fn evolve(&self, state: &SpinState, duration: f64) -> Result<SpinState> {
        if state.j() != self.j {
            return Err(Error::DimensionMismatch {
                expected: self.j.dim(),
                found: state.dim(),
            });
        }
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (col, &e) in self.energies.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -e * duration);
            for row in 0..scaled.nrows() {
                scaled[(row, col)] *= phase;
            }
        }
        let u = scaled * v.adjoint();
        Ok(SpinState::from_trusted(self.j, &u * state.matrix() * u.adjoint()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::expectation;
    use crate::linalg::max_abs_diff;
    use std::f64::consts::PI;

    const J8: AngularMomentum = AngularMomentum::integer(8);

    fn binomial(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn dicke_lowest_is_first_projector() {
        let s = dicke(J8, -16).unwrap();
        assert_eq!(s.matrix()[(0, 0)], c(1.0));
        assert!((s.matrix().trace() - c(1.0)).norm() < 1e-15);
        assert!(dicke(J8, 18).is_err());
        assert!(dicke(J8, 3).is_err());
    }

    #[test]
    fn w_state_is_single_excitation() {
        let w = w_state(J8).unwrap();
        assert_eq!(w.population(-14), 1.0);
    }

    #[test]
    fn dicke_zero_has_zero_jz() {
        let s = dicke(J8, 0).unwrap();
        let jz = spin_operators(J8).jz;
        assert!(expectation(&s, &jz).unwrap().norm() < 1e-15);
    }

    #[test]
    fn coherent_poles() {
        let up = coherent(J8, Direction::north());
        assert!(max_abs_diff(up.matrix(), dicke(J8, 16).unwrap().matrix()) < 1e-14);
        let down = coherent(J8, Direction::south());
        assert!(max_abs_diff(down.matrix(), dicke(J8, -16).unwrap().matrix()) < 1e-14);
    }

    #[test]
    fn coherent_populations_follow_binomial_law() {
        for &(theta, phi) in &[(0.4, 0.0), (1.3, 2.0), (2.9, 5.5)] {
            let s = coherent(J8, Direction::new(theta, phi).unwrap());
            let (sh, ch) = ((theta / 2.0).sin(), (theta / 2.0).cos());
            for (i, p) in s.populations().iter().enumerate() {
                let k = i as i32; // 8 + m
                let expect = binomial(16, k as u64) * ch.powi(2 * k) * sh.powi(2 * (16 - k));
                assert!((p - expect).abs() < 1e-13, "{theta} {i}: {p} vs {expect}");
            }
        }
    }

    #[test]
    fn coherent_mean_projection_equals_j() {
        let n = Direction::new(1.2, 0.7).unwrap();
        let s = coherent(J8, n);
        let jn = spin_operators(J8).along(n);
        assert!((expectation(&s, &jn).unwrap().re - 8.0).abs() < 1e-12);
        // tilted polar: <Jz> = J cos(theta)
        let s = coherent(J8, Direction::new(0.9, 0.0).unwrap());
        let jz = spin_operators(J8).jz;
        assert!((expectation(&s, &jz).unwrap().re - 8.0 * 0.9f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn cat_state_structure() {
        let cat = cat_state(J8, 0.0);
        assert!((cat.population(-16) - 0.5).abs() < 1e-15);
        assert!((cat.population(16) - 0.5).abs() < 1e-15);
        assert!((cat.extremal_coherence() - 0.5).abs() < 1e-15);
        let shifted = cat_state(J8, 0.7 + 2.0 * PI);
        assert!(max_abs_diff(cat_state(J8, 0.7).matrix(), shifted.matrix()) < 1e-15);
    }

    #[test]
    fn superposition_normalizes() {
        let mut a = vec![c(0.0); 17];
        a[0] = c(2.0);
        let s = superposition(J8, &a).unwrap();
        assert!(max_abs_diff(s.matrix(), dicke(J8, -16).unwrap().matrix()) < 1e-15);
        assert!(superposition(J8, &[c(0.0); 17]).is_err());
        assert!(superposition(J8, &[c(1.0); 3]).is_err());
    }

    #[test]
    fn twisting_zero_duration_is_identity() {
        let s = coherent(J8, Direction::new(1.0, 1.0).unwrap());
        let p = OatParams::new(1.0, 0.3, 0.0).unwrap();
        assert_eq!(one_axis_twisting(&s, &p), s);
    }

    #[test]
    fn twisting_revival_produces_cat() {
        let chi = 2.0 * PI * 1.25e6;
        let p = OatParams::cat_revival(chi).unwrap();
        assert!((p.duration() - 200e-9).abs() < 1e-18);
        let s = one_axis_twisting(&coherent(J8, Direction::south()), &p);
        assert!((s.population(-16) - 0.5).abs() < 1e-9);
        assert!((s.population(16) - 0.5).abs() < 1e-9);
        assert!((s.extremal_coherence() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn twisting_preserves_purity() {
        let s = coherent(J8, Direction::new(2.0, 0.4).unwrap());
        let p = OatParams::new(3.0, 1.5, 0.37).unwrap();
        let out = one_axis_twisting(&s, &p);
        assert!((out.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_larmor_keeps_populations() {
        let s = coherent(J8, Direction::new(1.0, 0.2).unwrap());
        let p = OatParams::new(0.0, 7.0, 0.9).unwrap();
        let out = one_axis_twisting(&s, &p);
        for (a, b) in s.populations().iter().zip(out.populations()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cached_propagator_matches_direct_evolution() {
        let s = coherent(J8, Direction::new(2.0, 0.4).unwrap());
        let p = OatParams::new(3.0, 1.5, 0.37).unwrap();
        let cached = TwistingEvolution::new(J8, &p).evolve(&s, 0.37).unwrap();
        assert!(max_abs_diff(cached.matrix(), one_axis_twisting(&s, &p).matrix()) < 1e-12);
    }

    #[test]
    fn oat_params_validation() {
        assert!(OatParams::new(-1.0, 0.0, 1.0).is_err());
        assert!(OatParams::new(1.0, 0.0, -1.0).is_err());
        assert!(OatParams::cat_revival(0.0).is_err());
    }
}
