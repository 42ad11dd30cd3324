use crate::angular::SpinState;
use crate::error::Result;
use crate::partition::{reduced_pair_state, PairState};

/// Anything with a density-matrix spectrum.
pub trait DensityMatrix {
    fn max_eigenvalue(&self) -> f64;
}

impl DensityMatrix for SpinState {
    fn max_eigenvalue(&self) -> f64 {
        SpinState::max_eigenvalue(self)
    }
}

impl DensityMatrix for PairState {
    fn max_eigenvalue(&self) -> f64 {
        PairState::max_eigenvalue(self)
    }
}

/// `S_min = -ln(lambda_max)` (natural log).
pub fn min_entropy<D: DensityMatrix + ?Sized>(rho: &D) -> f64 {
    -rho.max_eigenvalue().ln()
}

/// `S_min(rho) - S_min(rho_pair)`: negative values certify that the split
/// of `2J - 2` qubits against the remaining pair is not separable.
pub fn pair_conditional_min_entropy(state: &SpinState) -> Result<f64> {
    let pair = reduced_pair_state(state)?;
    Ok(min_entropy(state) - min_entropy(&pair))
}

/// Conditional min-entropy from largest eigenvalues alone, e.g. measured
/// bounds.
pub fn conditional_min_entropy_from_eigenvalues(lambda_max_global: f64, lambda_max_pair: f64) -> f64 {
    -lambda_max_global.ln() + lambda_max_pair.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::{AngularMomentum, Direction};
    use crate::states::{cat_state, coherent, dicke};

    const J8: AngularMomentum = AngularMomentum::integer(8);

    #[test]
    fn pure_and_mixed_extremes() {
        assert!(min_entropy(&dicke(J8, 4).unwrap()).abs() < 1e-12);
        assert!((min_entropy(&PairState::maximally_mixed()) - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn cat_values() {
        let cat = cat_state(J8, 0.0);
        let pair = reduced_pair_state(&cat).unwrap();
        assert!((min_entropy(&pair) - 2f64.ln()).abs() < 1e-12);
        assert!((pair_conditional_min_entropy(&cat).unwrap() + 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn mixed_global_state_is_not_detected() {
        let s = SpinState::maximally_mixed(J8);
        let v = pair_conditional_min_entropy(&s).unwrap();
        assert!(v > 0.0);
        let pair = reduced_pair_state(&s).unwrap();
        assert!((v - (17f64.ln() - (1.0 / pair.max_eigenvalue()).ln())).abs() < 1e-12);
    }

    #[test]
    fn coherent_states_are_never_flagged() {
        for &(t, p) in &[(0.0, 0.0), (1.0, 2.0), (2.5, 0.3)] {
            let s = coherent(J8, Direction::new(t, p).unwrap());
            assert!(pair_conditional_min_entropy(&s).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn quoted_bounds_from_eigenvalues() {
        let v = conditional_min_entropy_from_eigenvalues(0.66, 0.53);
        assert!((v + 0.2194).abs() < 1e-3);
    }
}
