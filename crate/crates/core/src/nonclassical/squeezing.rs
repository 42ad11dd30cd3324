//! Spin-projection noise and its link to pair concurrence.

use crate::angular::{expectation, spin_operators, AngularMomentum, Direction, SpinState};
use crate::error::{Error, Result};
use crate::partition::reduced_pair_state;
use crate::states::{OatParams, TwistingEvolution};

use super::wootters_concurrence;

/// `Delta J_n = sqrt(<(J.n)^2> - <J.n>^2)`.
pub fn spin_uncertainty(state: &SpinState, n: Direction) -> f64 {
    let jn = spin_operators(state.j()).along(n);
    let mean = expectation(state, &jn).expect("matching dimensions").re;
    let sq = expectation(state, &jn.compose(&jn)).expect("matching dimensions").re;
    (sq - mean * mean).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquatorialSqueezing {
    /// Smallest projection uncertainty in the xy plane.
    pub delta_j_min: f64,
    /// Azimuth of the squeezed quadrature, in `[0, pi)`.
    pub phi_min: f64,
}

/// Minimum of `Delta J_n` over equatorial `n`.
///
/// The equatorial variance is the quadratic form of the symmetrized
/// `(Jx, Jy)` covariance matrix, so its minimum is that matrix's smallest
/// eigenvalue and the minimizer its eigenvector.
pub fn min_equatorial_uncertainty(state: &SpinState) -> EquatorialSqueezing {
    let ops = spin_operators(state.j());
    let ev = |op: &crate::angular::Operator| expectation(state, op).expect("matching dimensions").re;
    let mx = ev(&ops.jx);
    let my = ev(&ops.jy);
    let vxx = ev(&ops.jx.compose(&ops.jx)) - mx * mx;
    let vyy = ev(&ops.jy.compose(&ops.jy)) - my * my;
    let sym = ops.jx.compose(&ops.jy).add(&ops.jy.compose(&ops.jx)).scale(0.5);
    let vxy = ev(&sym) - mx * my;

    let mean = 0.5 * (vxx + vyy);
    let radius = (0.25 * (vxx - vyy).powi(2) + vxy * vxy).sqrt();
    let lowest = (mean - radius).max(0.0);
    // eigenvector of the smaller eigenvalue sits at angle atan2(2vxy, vxx-vyy)/2 + pi/2
    let mut phi = 0.5 * (2.0 * vxy).atan2(vxx - vyy) + std::f64::consts::FRAC_PI_2;
    phi = phi.rem_euclid(std::f64::consts::PI);
    EquatorialSqueezing {
        delta_j_min: lowest.sqrt(),
        phi_min: phi,
    }
}

/// Pair concurrence implied by the minimal transverse noise,
/// `(1 - 2 dJ^2 / J) / (2J - 1)`; negative values mean no squeezing.
pub fn concurrence_from_squeezing(delta_j_min: f64, j: AngularMomentum) -> Result<f64> {
    if !(delta_j_min >= 0.0) {
        return Err(Error::domain(format!("negative uncertainty {delta_j_min}")));
    }
    if j.two_j() < 2 {
        return Err(Error::domain("pair concurrence needs J >= 1"));
    }
    let jj = j.j();
    Ok((1.0 - 2.0 * delta_j_min * delta_j_min / jj) / (2.0 * jj - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingPoint {
    pub time: f64,
    pub squeezing: EquatorialSqueezing,
    /// Wootters concurrence of the reduced pair state.
    pub pair_concurrence: f64,
}

/// Equatorial squeezing along a twisting trajectory at the given times.
pub fn squeezing_scan(initial: &SpinState, params: &OatParams, times: &[f64]) -> Result<Vec<SqueezingPoint>> {
    let evo = TwistingEvolution::new(initial.j(), params);
    times
        .iter()
        .map(|&t| {
            let s = evo.evolve(initial, t)?;
            Ok(SqueezingPoint {
                time: t,
                squeezing: min_equatorial_uncertainty(&s),
                pair_concurrence: wootters_concurrence(&reduced_pair_state(&s)?),
            })
        })
        .collect()
}

/// Time in `[0, t_max]` minimizing `Delta J_min`: a uniform scan of `steps`
/// intervals followed by golden-section refinement to `1e-8` relative
/// width.
pub fn optimal_squeezing(
    initial: &SpinState,
    params: &OatParams,
    t_max: f64,
    steps: usize,
) -> Result<SqueezingPoint> {
    if !(t_max > 0.0) || steps < 2 {
        return Err(Error::domain("scan needs t_max > 0 and at least two steps"));
    }
    let evo = TwistingEvolution::new(initial.j(), params);
    let cost = |t: f64| -> Result<f64> { Ok(min_equatorial_uncertainty(&evo.evolve(initial, t)?).delta_j_min) };
    let dt = t_max / steps as f64;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..=steps {
        let v = cost(i as f64 * dt)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let mut lo = (best.0 as f64 - 1.0).max(0.0) * dt;
    let mut hi = ((best.0 + 1) as f64 * dt).min(t_max);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (cost(a)?, cost(b)?);
    while hi - lo > 1e-8 * t_max {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = cost(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = cost(b)?;
        }
    }
    let t = 0.5 * (lo + hi);
    let s = evo.evolve(initial, t)?;
    Ok(SqueezingPoint {
        time: t,
        squeezing: min_equatorial_uncertainty(&s),
        pair_concurrence: wootters_concurrence(&reduced_pair_state(&s)?),
    })
}
