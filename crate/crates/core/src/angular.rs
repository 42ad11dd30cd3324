//! Angular-momentum algebra in the Dicke basis.
//!
//! Every matrix in this crate that lives on a spin-`J` space is indexed by
//! the magnetic quantum number in ascending order, `m = -J, -J+1, ..., J`.
//! Quantum numbers are carried as twice their value (`two_j`, `two_m`) so
//! half-integer spins stay exact.
//!
//! Rotations use the single convention `R(n) = exp(-i phi Jz) exp(-i theta Jy)`,
//! so that `R(n)|m>` is the eigenvector of `J.n` with eigenvalue `m`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, I};

/// Tolerances of the density-matrix contract.
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-9;

/// A spin quantum number, stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AngularMomentum {
    two_j: u32,
}

impl AngularMomentum {
    pub const fn new(two_j: u32) -> Self {
        Self { two_j }
    }

    /// Integer spin `j`.
    pub const fn integer(j: u32) -> Self {
        Self { two_j: 2 * j }
    }

    pub const fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn j(self) -> f64 {
        f64::from(self.two_j) / 2.0
    }

    pub const fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    pub const fn is_integer(self) -> bool {
        self.two_j.is_multiple_of(2)
    }

    /// Doubled magnetic quantum number stored at basis `index`.
    pub fn two_m(self, index: usize) -> i32 {
        2 * index as i32 - self.two_j as i32
    }

    pub fn m(self, index: usize) -> f64 {
        f64::from(self.two_m(index)) / 2.0
    }

    /// Basis index of `two_m`, if it belongs to this multiplet.
    pub fn index(self, two_m: i32) -> Option<usize> {
        let tj = self.two_j as i32;
        if two_m.abs() > tj || (two_m + tj) % 2 != 0 {
            None
        } else {
            Some(((two_m + tj) / 2) as usize)
        }
    }

    /// Iterator over `two_m` values, ascending.
    pub fn two_ms(self) -> impl Iterator<Item = i32> {
        let tj = self.two_j as i32;
        (-tj..=tj).step_by(2)
    }

    /// Spin one unit lower (the remainder after removing a qubit pair).
    pub fn lowered(self) -> Option<Self> {
        self.two_j.checked_sub(2).map(Self::new)
    }
}

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    /// Validated constructor: `theta` must lie in `[0, pi]`; `phi` is wrapped
    /// into `[0, 2 pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::domain(format!(
                "polar angle {theta} outside [0, pi] or non-finite azimuth {phi}"
            )));
        }
        Ok(Self {
            theta,
            phi: wrap_angle(phi),
        })
    }

    /// Maps arbitrary real angles onto the sphere (polar angles outside
    /// `[0, pi]` continue over the pole). Used by the sphere optimiser.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let mut t = theta.rem_euclid(2.0 * PI);
        let mut p = phi;
        if t > PI {
            t = 2.0 * PI - t;
            p += PI;
        }
        Self {
            theta: t,
            phi: wrap_angle(p),
        }
    }

    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r == 0.0 || !r.is_finite() {
            return Err(Error::domain("direction from a zero vector"));
        }
        let theta = (v[2] / r).clamp(-1.0, 1.0).acos();
        let phi = v[1].atan2(v[0]);
        Ok(Self {
            theta,
            phi: wrap_angle(phi),
        })
    }

    pub fn north() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn south() -> Self {
        Self { theta: PI, phi: 0.0 }
    }

    /// Direction in the xy plane at azimuth `phi`.
    pub fn equatorial(phi: f64) -> Self {
        Self {
            theta: PI / 2.0,
            phi: wrap_angle(phi),
        }
    }

    pub fn theta(self) -> f64 {
        self.theta
    }

    pub fn phi(self) -> f64 {
        self.phi
    }

    pub fn antipode(self) -> Self {
        Self {
            theta: PI - self.theta,
            phi: wrap_angle(self.phi + PI),
        }
    }

    pub fn unit_vector(self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

fn wrap_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(2.0 * PI);
    // rem_euclid can round up to exactly 2 pi for tiny negative inputs
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// A linear operator on a spin-`J` space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    j: AngularMomentum,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(j: AngularMomentum, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != j.dim() || matrix.ncols() != j.dim() {
            return Err(Error::DimensionMismatch {
                expected: j.dim(),
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { j, matrix })
    }

    pub fn identity(j: AngularMomentum) -> Self {
        Self {
            j,
            matrix: CMatrix::identity(j.dim(), j.dim()),
        }
    }

    pub fn j(&self) -> AngularMomentum {
        self.j
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            j: self.j,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::hermiticity_error(&self.matrix) <= tol
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            j: self.j,
            matrix: &self.matrix * c(s),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.j, other.j, "composing operators of different spins");
        Self {
            j: self.j,
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.j, other.j, "adding operators of different spins");
        Self {
            j: self.j,
            matrix: &self.matrix + &other.matrix,
        }
    }
}

/// Density matrix of a spin `J` in the Dicke basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    j: AngularMomentum,
    matrix: CMatrix,
}

impl SpinState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(j: AngularMomentum, matrix: CMatrix) -> Result<Self> {
        check_density_matrix(&matrix, j.dim())?;
        Ok(Self { j, matrix })
    }

    /// Constructor for matrices that are valid by construction: removes
    /// round-off anti-Hermitian parts and renormalizes the trace.
    pub(crate) fn from_trusted(j: AngularMomentum, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), j.dim());
        let mut m = (&matrix + matrix.adjoint()) * c(0.5);
        let tr = linalg::trace(&m).re;
        if tr > 0.0 {
            m /= c(tr);
        }
        Self { j, matrix: m }
    }

    /// Normalized pure state from an amplitude vector over `m = -J..J`.
    pub fn pure(j: AngularMomentum, amplitudes: &[Complex64]) -> Result<Self> {
        if amplitudes.len() != j.dim() {
            return Err(Error::DimensionMismatch {
                expected: j.dim(),
                found: amplitudes.len(),
            });
        }
        let v = CVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::domain("zero or non-finite amplitude vector"));
        }
        let v = v / c(norm);
        Ok(Self {
            j,
            matrix: linalg::projector(&v),
        })
    }

    pub fn maximally_mixed(j: AngularMomentum) -> Self {
        let d = j.dim();
        Self {
            j,
            matrix: CMatrix::identity(d, d) / c(d as f64),
        }
    }

    pub fn j(&self) -> AngularMomentum {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Diagonal element `rho_{m,m}`; zero when `two_m` is not in the multiplet.
    pub fn population(&self, two_m: i32) -> f64 {
        self.j
            .index(two_m)
            .map_or(0.0, |i| self.matrix[(i, i)].re)
    }

    /// Diagonal of the density matrix, ordered `m = -J..J`.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// Matrix element `rho_{m1,m2}`.
    pub fn element(&self, two_m1: i32, two_m2: i32) -> Complex64 {
        match (self.j.index(two_m1), self.j.index(two_m2)) {
            (Some(a), Some(b)) => self.matrix[(a, b)],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Coherence between the two stretched states, `|rho_{-J,J}|`.
    pub fn extremal_coherence(&self) -> f64 {
        let tj = self.j.two_j as i32;
        self.element(-tj, tj).norm()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    /// `U rho U^dagger` for a unitary `U` on the same space.
    pub fn transform(&self, unitary: &Operator) -> Self {
        let m = unitary.matrix() * &self.matrix * unitary.matrix().adjoint();
        Self::from_trusted(self.j, m)
    }
}

/// Checks the density-matrix contract on a raw matrix.
pub(crate) fn check_density_matrix(matrix: &CMatrix, dim: usize) -> Result<()> {
    if matrix.nrows() != dim || matrix.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: matrix.nrows().max(matrix.ncols()),
        });
    }
    let herm = linalg::hermiticity_error(matrix);
    if herm > HERMITIAN_TOL {
        return Err(Error::domain(format!(
            "matrix is not Hermitian (deviation {herm:.3e})"
        )));
    }
    let tr = linalg::trace(matrix);
    if (tr - c(1.0)).norm() > TRACE_TOL {
        return Err(Error::domain(format!("trace {tr} differs from 1")));
    }
    let min = linalg::hermitian_eigenvalues(matrix)[0];
    if min < -POSITIVITY_TOL {
        return Err(Error::domain(format!(
            "matrix has negative eigenvalue {min:.3e}"
        )));
    }
    Ok(())
}

/// Cartesian and ladder spin matrices.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub jx: Operator,
    pub jy: Operator,
    pub jz: Operator,
    pub jplus: Operator,
    pub jminus: Operator,
}

impl SpinOperators {
    /// `J.n` for a direction `n`.
    pub fn along(&self, n: Direction) -> Operator {
        let [x, y, z] = n.unit_vector();
        let m = self.jx.matrix() * c(x) + self.jy.matrix() * c(y) + self.jz.matrix() * c(z);
        Operator {
            j: self.jz.j,
            matrix: m,
        }
    }
}

pub fn spin_operators(j: AngularMomentum) -> SpinOperators {
    let d = j.dim();
    let jj = j.j();
    let mut jz = CMatrix::zeros(d, d);
    let mut jp = CMatrix::zeros(d, d);
    for i in 0..d {
        let m = j.m(i);
        jz[(i, i)] = c(m);
        if i + 1 < d {
            jp[(i + 1, i)] = c((jj * (jj + 1.0) - m * (m + 1.0)).sqrt());
        }
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * c(0.5);
    let jy = (&jp - &jm) * Complex64::new(0.0, -0.5);
    let wrap = |matrix| Operator { j, matrix };
    SpinOperators {
        jx: wrap(jx),
        jy: wrap(jy),
        jz: wrap(jz),
        jplus: wrap(jp),
        jminus: wrap(jm),
    }
}

/// Factorials as doubles; exact up to 22! and correctly rounded beyond.
fn factorial(n: i64) -> f64 {
    debug_assert!((0..=170).contains(&n));
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Wigner small-d element `<j m'| exp(-i beta Jy) |j m>` from the explicit
/// finite sum.
pub fn wigner_small_d(j: AngularMomentum, two_mp: i32, two_m: i32, beta: f64) -> f64 {
    let tj = j.two_j as i64;
    let (mp, m) = (two_mp as i64, two_m as i64);
    // all factorial arguments below are (sums of) integers once halved
    let jpm = (tj + m) / 2;
    let jmm = (tj - m) / 2;
    let jpmp = (tj + mp) / 2;
    let jmmp = (tj - mp) / 2;
    let dm = (mp - m) / 2;
    let pref = (factorial(jpmp) * factorial(jmmp) * factorial(jpm) * factorial(jmm)).sqrt();
    let (s_half, c_half) = (beta / 2.0).sin_cos();
    let s_min = 0.max(-dm);
    let s_max = jpm.min(jmmp);
    let mut sum = 0.0;
    for s in s_min..=s_max {
        let denom = factorial(jpm - s) * factorial(s) * factorial(dm + s) * factorial(jmmp - s);
        let sign = if (dm + s) % 2 == 0 { 1.0 } else { -1.0 };
        let cos_pow = (tj - dm - 2 * s) as i32;
        let sin_pow = (dm + 2 * s) as i32;
        sum += sign * c_half.powi(cos_pow) * s_half.powi(sin_pow) / denom;
    }
    pref * sum
}

/// `R(n) = exp(-i phi Jz) exp(-i theta Jy)`.
pub fn rotation_unitary(j: AngularMomentum, n: Direction) -> Operator {
    let d = j.dim();
    let mut r = CMatrix::zeros(d, d);
    for row in 0..d {
        let two_mp = j.two_m(row);
        let phase = Complex64::from_polar(1.0, -n.phi * j.m(row));
        for col in 0..d {
            let dval = wigner_small_d(j, two_mp, j.two_m(col), n.theta);
            r[(row, col)] = phase * dval;
        }
    }
    Operator { j, matrix: r }
}

/// Amplitudes of the coherent state `R(n)|m = J>` (last column of `R(n)`).
pub fn coherent_amplitudes(j: AngularMomentum, n: Direction) -> CVector {
    let tj = j.two_j as i32;
    CVector::from_iterator(
        j.dim(),
        (0..j.dim()).map(|row| {
            Complex64::from_polar(1.0, -n.phi * j.m(row)) * wigner_small_d(j, j.two_m(row), tj, n.theta)
        }),
    )
}

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | J M>` (Condon-Shortley
/// phases), all arguments doubled.
pub fn clebsch_gordan(
    two_j1: u32,
    two_m1: i32,
    two_j2: u32,
    two_m2: i32,
    two_j: u32,
    two_m: i32,
) -> Result<f64> {
    let valid = |tj: u32, tm: i32| tm.abs() <= tj as i32 && (tj as i32 + tm) % 2 == 0;
    if !valid(two_j1, two_m1) || !valid(two_j2, two_m2) || !valid(two_j, two_m) {
        return Err(Error::domain(format!(
            "invalid magnetic quantum numbers in <{two_j1}/2 {two_m1}/2; {two_j2}/2 {two_m2}/2 | {two_j}/2 {two_m}/2>"
        )));
    }
    let (j1, j2, jt) = (two_j1 as i64, two_j2 as i64, two_j as i64);
    if jt < (j1 - j2).abs() || jt > j1 + j2 || (j1 + j2 + jt) % 2 != 0 {
        return Err(Error::domain(format!(
            "triangle rule violated for j1={two_j1}/2, j2={two_j2}/2, J={two_j}/2"
        )));
    }
    if jt + j1 + j2 > 2 * 160 {
        return Err(Error::domain("quantum numbers too large for factorial table"));
    }
    if two_m != two_m1 + two_m2 {
        return Ok(0.0);
    }
    let (m1, m2, m) = (two_m1 as i64, two_m2 as i64, two_m as i64);
    let h = |x: i64| x / 2;
    let a = h(j1 + j2 - jt);
    let b = h(j1 - m1);
    let cc = h(j2 + m2);
    let d = h(jt - j2 + m1);
    let e = h(jt - j1 - m2);
    let triangle = factorial(a) * factorial(h(j1 - j2 + jt)) * factorial(h(-j1 + j2 + jt))
        / factorial(h(j1 + j2 + jt) + 1);
    let norm = ((jt + 1) as f64 * triangle).sqrt()
        * (factorial(h(j1 + m1))
            * factorial(b)
            * factorial(cc)
            * factorial(h(j2 - m2))
            * factorial(h(jt + m))
            * factorial(h(jt - m)))
        .sqrt();
    let k_min = 0.max(-d).max(-e);
    let k_max = a.min(b).min(cc);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let denom = factorial(k)
            * factorial(a - k)
            * factorial(b - k)
            * factorial(cc - k)
            * factorial(d + k)
            * factorial(e + k);
        sum += if k % 2 == 0 { 1.0 } else { -1.0 } / denom;
    }
    Ok(norm * sum)
}

/// Unitary evolution `exp(-i G t) rho exp(i G t)` for a Hermitian generator.
pub fn evolve(state: &SpinState, generator: &Operator, t: f64) -> Result<SpinState> {
    if generator.j != state.j {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: generator.j.dim(),
        });
    }
    let herm = linalg::hermiticity_error(&generator.matrix);
    if herm > 1e-10 {
        return Err(Error::domain(format!(
            "generator is not Hermitian (deviation {herm:.3e})"
        )));
    }
    if t == 0.0 {
        return Ok(state.clone());
    }
    let u = linalg::unitary_propagator(&generator.matrix, t);
    Ok(SpinState::from_trusted(
        state.j,
        &u * &state.matrix * u.adjoint(),
    ))
}

/// `Tr(rho A)`.
pub fn expectation(state: &SpinState, op: &Operator) -> Result<Complex64> {
    if op.matrix.nrows() != state.dim() || op.matrix.ncols() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: op.matrix.nrows(),
        });
    }
    // Tr(rho A) without forming the product
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..state.dim() {
        for k in 0..state.dim() {
            acc += state.matrix[(i, k)] * op.matrix[(k, i)];
        }
    }
    Ok(acc)
}

/// Quasi-uniform spiral lattice of `n` directions on the sphere.
pub fn fibonacci_lattice(n: usize) -> Vec<Direction> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            Direction::from_angles(z.clamp(-1.0, 1.0).acos(), golden * i as f64)
        })
        .collect()
}

/// Real diagonal operator from a function of `m`.
pub fn diagonal_operator(j: AngularMomentum, f: impl Fn(f64) -> f64) -> Operator {
    let d = j.dim();
    let m = DMatrix::from_fn(d, d, |r, col| if r == col { c(f(j.m(r))) } else { c(0.0) });
    Operator { j, matrix: m }
}

/// `exp(-i angle Jz)`: rotation about the quantization axis.
pub fn z_rotation(j: AngularMomentum, angle: f64) -> Operator {
    let d = j.dim();
    let m = DMatrix::from_fn(d, d, |r, col| {
        if r == col {
            (-I * angle * j.m(r)).exp()
        } else {
            c(0.0)
        }
    });
    Operator { j, matrix: m }
}
