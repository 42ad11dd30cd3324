//! Spin-1 pair tomography from Husimi samples.
//!
//! A pair state expands on the identity, three dipole operators `L_m` and
//! five quadrupole operators `Q_m`:
//!
//! ```text
//! rho = 1/3 + sum_m lambda_1m L_m + sum_m lambda_2m Q_m
//! Q(n) = 1/3 + sqrt(4 pi / 3) sum_lm lambda_lm Y_lm(n)
//! ```
//!
//! so a linear fit of sampled Husimi values to the harmonics recovers the
//! full density matrix. Matrices use pair order `(+1, 0, -1)`.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::{fibonacci_lattice, Direction, SpinState};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, I};
use crate::nonclassical::pair_spin_matrices;
use crate::partition::{q_table, sample_projections_with, PairState};
use crate::random;

/// Eigenvalues below this are reported as unphysical.
pub const NEGATIVITY_FLAG: f64 = -1e-6;
/// Design matrices worse than this are refused.
pub const MAX_CONDITION: f64 = 1e10;
pub const DEFAULT_NODE_COUNT: usize = 50;

/// `lambda_lm` for `l = 1, 2`, each array indexed by `m + l`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MultipoleCoefficients {
    pub dipole: [Complex64; 3],
    pub quadrupole: [Complex64; 5],
}

impl MultipoleCoefficients {
    pub fn get(&self, l: u32, m: i32) -> Option<Complex64> {
        let idx = usize::try_from(m + l as i32).ok()?;
        match l {
            1 => self.dipole.get(idx).copied(),
            2 => self.quadrupole.get(idx).copied(),
            _ => None,
        }
    }

    /// Largest violation of `lambda_l,-m = (-1)^m conj(lambda_lm)`.
    pub fn conjugation_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (l, coeffs) in [(1i32, &self.dipole[..]), (2, &self.quadrupole[..])] {
            for m in 0..=l {
                let plus = coeffs[(l + m) as usize];
                let minus = coeffs[(l - m) as usize];
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                worst = worst.max((minus - plus.conj() * sign).norm());
            }
        }
        worst
    }
}

/// The multipole operators, each array indexed by `m + l`.
#[derive(Debug, Clone)]
pub struct MultipoleBasis {
    pub dipole: [CMatrix; 3],
    pub quadrupole: [CMatrix; 5],
}

impl MultipoleBasis {
    fn operators(&self) -> impl Iterator<Item = &CMatrix> {
        self.dipole.iter().chain(self.quadrupole.iter())
    }
}

pub fn multipole_operators() -> MultipoleBasis {
    let [lx, ly, lz] = pair_spin_matrices();
    let lp = &lx + &ly * I;
    let lm = &lx - &ly * I;
    let id = CMatrix::identity(3, 3);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let q1 = (2.5f64).sqrt();

    let l_plus = &lp * c(-r);
    let l_minus = &lm * c(r);
    let q0 = (&lz * &lz * c(3.0) - id * c(2.0)) * c((5.0f64 / 3.0).sqrt());
    let q_plus1 = (&lp * &lz + &lz * &lp) * c(-q1);
    let q_minus1 = (&lm * &lz + &lz * &lm) * c(q1);
    let q_plus2 = &lp * &lp * c(q1);
    let q_minus2 = &lm * &lm * c(q1);
    MultipoleBasis {
        dipole: [l_minus, lz, l_plus],
        quadrupole: [q_minus2, q_minus1, q0, q_plus1, q_plus2],
    }
}

/// Orthonormal `Y_lm` with the Condon-Shortley phase, for `l <= 2`.
pub fn spherical_harmonic(l: u32, m: i32, n: Direction) -> Result<Complex64> {
    use std::f64::consts::PI;
    if l > 2 || m.unsigned_abs() > l {
        return Err(Error::domain(format!("no harmonic Y_{l},{m} in this basis")));
    }
    let (st, ct) = n.theta().sin_cos();
    let ma = m.abs();
    let radial = match (l, ma) {
        (0, 0) => (1.0 / (4.0 * PI)).sqrt(),
        (1, 0) => (3.0 / (4.0 * PI)).sqrt() * ct,
        (1, 1) => -(3.0 / (8.0 * PI)).sqrt() * st,
        (2, 0) => (5.0 / (16.0 * PI)).sqrt() * (3.0 * ct * ct - 1.0),
        (2, 1) => -(15.0 / (8.0 * PI)).sqrt() * st * ct,
        (2, 2) => (15.0 / (32.0 * PI)).sqrt() * st * st,
        _ => unreachable!(),
    };
    let positive = Complex64::from_polar(radial, ma as f64 * n.phi());
    Ok(if m >= 0 {
        positive
    } else if ma % 2 == 0 {
        positive.conj()
    } else {
        -positive.conj()
    })
}

/// Hilbert-Schmidt projection of the pair onto the multipole basis.
pub fn coefficients_of(pair: &PairState) -> MultipoleCoefficients {
    let basis = multipole_operators();
    let project = |op: &CMatrix| {
        let norm = (op.adjoint() * op).trace().re;
        (op.adjoint() * pair.matrix()).trace() / norm
    };
    let mut out = MultipoleCoefficients::default();
    for (slot, op) in out.dipole.iter_mut().zip(&basis.dipole) {
        *slot = project(op);
    }
    for (slot, op) in out.quadrupole.iter_mut().zip(&basis.quadrupole) {
        *slot = project(op);
    }
    out
}

/// `Q(n)` from the harmonic expansion.
pub fn husimi_from_coefficients(coeffs: &MultipoleCoefficients, n: Direction) -> f64 {
    let scale = (4.0 * std::f64::consts::PI / 3.0).sqrt();
    let mut q = Complex64::new(1.0 / 3.0, 0.0);
    for (l, values) in [(1u32, &coeffs.dipole[..]), (2, &coeffs.quadrupole[..])] {
        for (k, lam) in values.iter().enumerate() {
            let m = k as i32 - l as i32;
            q += lam * spherical_harmonic(l, m, n).expect("l <= 2") * scale;
        }
    }
    q.re
}

pub fn husimi_forward(pair: &PairState, n: Direction) -> f64 {
    husimi_from_coefficients(&coefficients_of(pair), n)
}

/// One Husimi measurement; `weight` multiplies the squared residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HusimiSample {
    pub direction: Direction,
    pub value: f64,
    pub weight: f64,
}

impl HusimiSample {
    pub fn new(direction: Direction, value: f64) -> Self {
        Self {
            direction,
            value,
            weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HusimiFit {
    pub coefficients: MultipoleCoefficients,
    /// Weighted 2-norm of the fit residual.
    pub residual_norm: f64,
    pub condition_number: f64,
}

/// Real parametrization: `lambda_10`, `Re/Im lambda_11`, `lambda_20`,
/// `Re/Im lambda_21`, `Re/Im lambda_22`.
fn design_row(n: Direction) -> [f64; 8] {
    let scale = (4.0 * std::f64::consts::PI / 3.0).sqrt();
    let y = |l, m| spherical_harmonic(l, m, n).expect("l <= 2") * scale;
    let (y10, y11, y20, y21, y22) = (y(1, 0), y(1, 1), y(2, 0), y(2, 1), y(2, 2));
    [
        y10.re,
        2.0 * y11.re,
        -2.0 * y11.im,
        y20.re,
        2.0 * y21.re,
        -2.0 * y21.im,
        2.0 * y22.re,
        -2.0 * y22.im,
    ]
}

fn coefficients_from_real(x: &[f64]) -> MultipoleCoefficients {
    let l11 = Complex64::new(x[1], x[2]);
    let l21 = Complex64::new(x[4], x[5]);
    let l22 = Complex64::new(x[6], x[7]);
    MultipoleCoefficients {
        dipole: [-l11.conj(), c(x[0]), l11],
        quadrupole: [l22.conj(), -l21.conj(), c(x[3]), l21, l22],
    }
}

/// Weighted linear least squares of the samples on the harmonic expansion.
/// The constant term is fixed at `1/3`, which pins the trace.
pub fn fit_husimi(samples: &[HusimiSample]) -> Result<HusimiFit> {
    if samples.len() < 8 {
        return Err(Error::domain(format!(
            "{} samples cannot determine 8 multipole parameters",
            samples.len()
        )));
    }
    for s in samples {
        if !s.value.is_finite() || !(s.weight.is_finite() && s.weight > 0.0) {
            return Err(Error::domain("samples need finite values and positive weights"));
        }
    }
    let rows = samples.len();
    let mut a = DMatrix::<f64>::zeros(rows, 8);
    let mut b = DVector::<f64>::zeros(rows);
    for (r, s) in samples.iter().enumerate() {
        let w = s.weight.sqrt();
        for (col, v) in design_row(s.direction).iter().enumerate() {
            a[(r, col)] = w * v;
        }
        b[r] = w * (s.value - 1.0 / 3.0);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition_number = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition_number > MAX_CONDITION {
        return Err(Error::RankDeficient { condition_number });
    }
    let x = svd.solve(&b, 0.0).map_err(|e| Error::Numerical(e.to_string()))?;
    let residual_norm = (&a * &x - &b).norm();
    Ok(HusimiFit {
        coefficients: coefficients_from_real(x.as_slice()),
        residual_norm,
        condition_number,
    })
}

/// Density matrix assembled from multipole coefficients, not necessarily
/// positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub matrix: CMatrix,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Some eigenvalue lies below [`NEGATIVITY_FLAG`].
    pub unphysical: bool,
}

impl Reconstruction {
    /// The matrix as a validated pair state; fails when unphysical.
    pub fn to_pair_state(&self) -> Result<PairState> {
        PairState::new(self.matrix.clone())
    }

    /// Negative eigenvalues set to zero, then renormalized.
    pub fn clipped(&self) -> PairState {
        let clipped = linalg::hermitian_map(&self.matrix, |v| c(v.max(0.0)));
        let tr = linalg::trace(&clipped).re;
        PairState::from_trusted(clipped / c(tr))
    }
}

pub fn reconstruct_pair_state(coeffs: &MultipoleCoefficients) -> Reconstruction {
    let basis = multipole_operators();
    let mut rho = CMatrix::identity(3, 3) / c(3.0);
    let lams = coeffs.dipole.iter().chain(coeffs.quadrupole.iter());
    for (lam, op) in lams.zip(basis.operators()) {
        rho += op * *lam;
    }
    // exact for symmetric coefficients; removes rounding otherwise
    let rho = (&rho + rho.adjoint()) * c(0.5);
    let eigenvalues = linalg::hermitian_eigenvalues(&rho);
    let unphysical = eigenvalues.iter().any(|&v| v < NEGATIVITY_FLAG);
    Reconstruction {
        matrix: rho,
        eigenvalues,
        unphysical,
    }
}

/// Quasi-uniform node set used when none is given.
pub fn default_nodes() -> Vec<Direction> {
    fibonacci_lattice(DEFAULT_NODE_COUNT)
}

/// Exact pair-Husimi values of `state` at the given nodes.
pub fn exact_samples(state: &SpinState, nodes: &[Direction]) -> Result<Vec<HusimiSample>> {
    let pair = crate::partition::reduced_pair_state(state)?;
    Ok(nodes.iter().map(|&n| HusimiSample::new(n, pair.husimi(n))).collect())
}

/// Husimi estimates `sum_m Q_m N_m / shots` from simulated projective
/// measurements of the whole spin, one seeded stream for all nodes.
pub fn shot_sampled(state: &SpinState, nodes: &[Direction], shots: u64, seed: u64) -> Result<Vec<HusimiSample>> {
    let q = q_table(state.j())?;
    let mut rng = random::seeded(seed);
    nodes
        .iter()
        .map(|&n| {
            let counts = sample_projections_with(state, n, shots, &mut rng)?;
            let est: f64 = counts.iter().zip(&q).map(|(&k, qm)| k as f64 * qm).sum::<f64>() / shots as f64;
            Ok(HusimiSample::new(n, est))
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct SampleRecord {
    theta_rad: f64,
    phi_rad: f64,
    q_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<f64>,
}

/// Reads `theta_rad,phi_rad,q_value[,weight]` with a header row; lines
/// starting with `#` are skipped.
pub fn read_samples_csv<R: Read>(reader: R) -> Result<Vec<HusimiSample>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.deserialize::<SampleRecord>() {
        let rec = rec?;
        let direction = Direction::new(rec.theta_rad, rec.phi_rad)?;
        let weight = rec.weight.unwrap_or(1.0);
        out.push(HusimiSample {
            direction,
            value: rec.q_value,
            weight,
        });
    }
    Ok(out)
}

pub fn read_samples_file(path: &Path) -> Result<Vec<HusimiSample>> {
    read_samples_csv(std::fs::File::open(path)?)
}

/// Writes samples in the format read by [`read_samples_csv`]; weights are
/// written only when some differ from one.
pub fn write_samples_csv<W: Write>(writer: W, samples: &[HusimiSample]) -> Result<()> {
    let weighted = samples.iter().any(|s| s.weight != 1.0);
    let mut wtr = csv::Writer::from_writer(writer);
    if weighted {
        wtr.write_record(["theta_rad", "phi_rad", "q_value", "weight"])?;
    } else {
        wtr.write_record(["theta_rad", "phi_rad", "q_value"])?;
    }
    for s in samples {
        let mut row = vec![
            format!("{:.15e}", s.direction.theta()),
            format!("{:.15e}", s.direction.phi()),
            format!("{:.15e}", s.value),
        ];
        if weighted {
            row.push(format!("{:.15e}", s.weight));
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub eigenvalues: Vec<f64>,
    pub residual_norm: f64,
    pub condition_number: f64,
    pub unphysical: bool,
    /// The matrix was eigenvalue-clipped and renormalized.
    pub clipped: bool,
}

/// JSON form of a reconstruction: rows of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub basis: Vec<String>,
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub diagnostics: Diagnostics,
}

impl ReconstructionReport {
    pub fn new(fit: &HusimiFit, recon: &Reconstruction, clip: bool) -> Self {
        let matrix = if clip {
            recon.clipped().matrix().clone()
        } else {
            recon.matrix.clone()
        };
        let rows = (0..3)
            .map(|r| (0..3).map(|col| [matrix[(r, col)].re, matrix[(r, col)].im]).collect())
            .collect();
        Self {
            basis: vec!["up_up".into(), "symmetric".into(), "down_down".into()],
            matrix: rows,
            diagnostics: Diagnostics {
                eigenvalues: recon.eigenvalues.clone(),
                residual_norm: fit.residual_norm,
                condition_number: fit.condition_number,
                unphysical: recon.unphysical,
                clipped: clip,
            },
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
