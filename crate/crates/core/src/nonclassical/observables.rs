//! Collective observables of cat-like states: equatorial parity, the signed
//! even-m sum after an echo, and the Fourier analysis of their fringes.

use nalgebra::{DMatrix, DVector};

use crate::angular::{z_rotation, Direction, SpinState};
use crate::error::{Error, Result};
use crate::partition::projection_probabilities;
use crate::states::{one_axis_twisting, OatParams};

/// `<P>` along `(pi/2, phi)` with `P = sum_m (-1)^(J-m) |m><m|`.
pub fn parity_expectation(state: &SpinState, phi: f64) -> f64 {
    let j = state.j();
    projection_probabilities(state, Direction::equatorial(phi))
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let steps = (j.two_j() as i32 - j.two_m(k)) / 2;
            if steps % 2 == 0 {
                *p
            } else {
                -*p
            }
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignMode {
    /// Read out directly along `(pi/2, phi)`.
    Equatorial,
    /// `Rz(phi)`, then twisting, then readout along z.
    Echo(OatParams),
}

/// `<Sigma> = sum over even m of sgn(m) Pi_m`, with `sgn(0) = 0`.
pub fn sign_expectation(state: &SpinState, phi: f64, mode: SignMode) -> Result<f64> {
    let j = state.j();
    if !j.is_integer() {
        return Err(Error::domain("sign observable needs integer J"));
    }
    let probs = match mode {
        SignMode::Equatorial => projection_probabilities(state, Direction::equatorial(phi)),
        SignMode::Echo(params) => {
            let rotated = state.transform(&z_rotation(j, phi));
            one_axis_twisting(&rotated, &params).populations()
        }
    };
    Ok(probs
        .iter()
        .enumerate()
        .filter_map(|(k, p)| {
            let m = j.two_m(k) / 2;
            (m % 2 == 0).then(|| m.signum() as f64 * p)
        })
        .sum())
}

/// Truncated series `a_0/2 + sum_k (a_k cos k phi + b_k sin k phi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    /// `a_0 ..= a_K`.
    pub cos: Vec<f64>,
    /// `b_0 ..= b_K`; `b_0` is always zero.
    pub sin: Vec<f64>,
}

impl FourierSeries {
    pub fn max_order(&self) -> usize {
        self.cos.len() - 1
    }

    /// `|c_k| = sqrt(a_k^2 + b_k^2) / 2`; zero beyond the fitted order.
    pub fn amplitude(&self, k: usize) -> f64 {
        if k > self.max_order() {
            return 0.0;
        }
        self.cos[k].hypot(self.sin[k]) / 2.0
    }

    pub fn evaluate(&self, phi: f64) -> f64 {
        let mut v = self.cos[0] / 2.0;
        for k in 1..=self.max_order() {
            let x = k as f64 * phi;
            v += self.cos[k] * x.cos() + self.sin[k] * x.sin();
        }
        v
    }
}

/// Least-squares fit of the series up to `max_order` to `(phi, value)`
/// samples.
pub fn fourier_components(samples: &[(f64, f64)], max_order: usize) -> Result<FourierSeries> {
    let cols = 2 * max_order + 1;
    if samples.len() < cols {
        return Err(Error::domain(format!(
            "{} samples cannot fix {cols} Fourier coefficients",
            samples.len()
        )));
    }
    if samples.iter().any(|(p, v)| !p.is_finite() || !v.is_finite()) {
        return Err(Error::domain("non-finite Fourier sample"));
    }
    let design = DMatrix::from_fn(samples.len(), cols, |r, col| {
        let phi = samples[r].0;
        match col {
            0 => 0.5,
            c if c % 2 == 1 => (c.div_ceil(2) as f64 * phi).cos(),
            c => ((c / 2) as f64 * phi).sin(),
        }
    });
    let rhs = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > 1e10 {
        return Err(Error::RankDeficient {
            condition_number: condition,
        });
    }
    let x = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let mut cos = vec![x[0]];
    let mut sin = vec![0.0];
    for k in 1..=max_order {
        cos.push(x[2 * k - 1]);
        sin.push(x[2 * k]);
    }
    Ok(FourierSeries { cos, sin })
}

/// Lower bound on the overlap with the ideal cat,
/// `(Pi_-J + Pi_J + 2 |rho_-J,J|) / 2`.
pub fn cat_overlap_bound(pi_minus: f64, pi_plus: f64, coherence: f64) -> f64 {
    (pi_minus + pi_plus + 2.0 * coherence) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::AngularMomentum;
    use crate::random::{ginibre_state, seeded};
    use crate::states::{cat_state, dicke};
    use std::f64::consts::PI;

    const J8: AngularMomentum = AngularMomentum::integer(8);

    fn grid(n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| 2.0 * PI * i as f64 / n as f64)
    }

    fn sampled(f: impl Fn(f64) -> f64, n: usize) -> Vec<(f64, f64)> {
        grid(n).map(|p| (p, f(p))).collect()
    }

    #[test]
    fn synthetic_fourier_signals() {
        let s = fourier_components(&sampled(|p| 0.5 * (16.0 * p).cos(), 64), 16).unwrap();
        assert!((s.cos[16] - 0.5).abs() < 1e-12);
        assert!((s.amplitude(16) - 0.25).abs() < 1e-12);
        let s = fourier_components(&sampled(|_| 0.3, 64), 16).unwrap();
        assert!((s.cos[0] - 0.6).abs() < 1e-12);
        for k in 1..=16 {
            assert!(s.amplitude(k) < 1e-12);
        }
        assert!((s.evaluate(1.234) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn underdetermined_fit_is_rejected() {
        assert!(fourier_components(&sampled(|p| p.cos(), 10), 16).is_err());
        let repeated = vec![(0.1, 1.0); 40];
        assert!(matches!(
            fourier_components(&repeated, 3),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn parity_of_cat_and_mixed_states() {
        let cat = cat_state(J8, 0.0);
        let s = fourier_components(&sampled(|p| parity_expectation(&cat, p), 64), 16).unwrap();
        assert!((s.amplitude(16) - 0.5).abs() < 1e-10);

        let mixed = SpinState::maximally_mixed(J8);
        for p in grid(7) {
            assert!((parity_expectation(&mixed, p) - 1.0 / 17.0).abs() < 1e-12);
        }
        let d = dicke(J8, -16).unwrap();
        let p0 = parity_expectation(&d, 0.0);
        for p in grid(9) {
            assert!((parity_expectation(&d, p) - p0).abs() < 1e-12);
        }
    }

    #[test]
    fn echo_sign_of_cat_is_cosine() {
        let params = OatParams::cat_revival(2.0 * PI * 1.25e6).unwrap();
        let echo = SignMode::Echo(params);
        // the cat made by the same twisting pulse returns as cos(J phi)|J> + ...
        let cat = one_axis_twisting(&crate::states::coherent(J8, Direction::south()), &params);
        let samples = sampled(|p| sign_expectation(&cat, p, echo).unwrap(), 64);
        for &(p, v) in &samples {
            assert!((v - (16.0 * p).cos()).abs() < 1e-9, "{p}: {v}");
        }
        let s = fourier_components(&samples, 16).unwrap();
        assert!((s.amplitude(16) - 0.5).abs() < 1e-8);
        // any other cat phase only shifts the fringe
        let shifted = sampled(|p| sign_expectation(&cat_state(J8, 0.0), p, echo).unwrap(), 64);
        let s = fourier_components(&shifted, 16).unwrap();
        assert!((s.amplitude(16) - 0.5).abs() < 1e-8);
    }

    #[test]
    fn incoherent_mixture_has_no_fringe() {
        let m = (dicke(J8, -16).unwrap().into_matrix() + dicke(J8, 16).unwrap().into_matrix()) * crate::linalg::c(0.5);
        let s = SpinState::new(J8, m).unwrap();
        let echo = SignMode::Echo(OatParams::cat_revival(1.0).unwrap());
        let fit = fourier_components(&sampled(|p| sign_expectation(&s, p, echo).unwrap(), 64), 16).unwrap();
        assert!(fit.amplitude(16) < 1e-10);
        let fit = fourier_components(&sampled(|p| parity_expectation(&s, p), 64), 16).unwrap();
        assert!(fit.amplitude(16) < 1e-10);
    }

    #[test]
    fn half_integer_sign_is_rejected() {
        let s = SpinState::maximally_mixed(AngularMomentum::new(3));
        assert!(sign_expectation(&s, 0.0, SignMode::Equatorial).is_err());
    }

    #[test]
    fn fringes_bound_extremal_coherence() {
        let mut rng = seeded(21);
        let echo = SignMode::Echo(OatParams::cat_revival(1.0).unwrap());
        for _ in 0..10 {
            let s = ginibre_state(J8, &mut rng);
            let coh = s.extremal_coherence();
            let par = fourier_components(&sampled(|p| parity_expectation(&s, p), 64), 16).unwrap();
            assert!(par.amplitude(16) <= coh + 1e-10);
            let sig = fourier_components(&sampled(|p| sign_expectation(&s, p, echo).unwrap(), 64), 16).unwrap();
            assert!(sig.amplitude(16) <= coh + 1e-10);
            let eq = fourier_components(
                &sampled(|p| sign_expectation(&s, p, SignMode::Equatorial).unwrap(), 64),
                16,
            )
            .unwrap();
            assert!(eq.amplitude(16) <= coh + 1e-10);
        }
    }

    #[test]
    fn overlap_examples() {
        assert!((cat_overlap_bound(0.5, 0.5, 0.5) - 1.0).abs() < 1e-15);
        assert!((cat_overlap_bound(0.38, 0.42, 0.26) - 0.66).abs() < 1e-12);
        assert!((cat_overlap_bound(0.5, 0.5, 0.0) - 0.5).abs() < 1e-15);
    }
}
