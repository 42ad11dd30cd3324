//! Small dense complex linear-algebra helpers shared by all modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest elementwise deviation from Hermiticity.
pub fn hermiticity_error(a: &CMatrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// the unitary whose columns are the matching eigenvectors.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    // symmetrize so that round-off asymmetry never reaches the solver
    let sym = (a + a.adjoint()) * c(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    hermitian_eigen(a).0
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_map(a: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(a);
    let n = values.len();
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        let fv = f(v);
        for i in 0..n {
            scaled[(i, j)] *= fv;
        }
    }
    scaled * vectors.adjoint()
}

/// `exp(-i t H)` for Hermitian `H`.
pub fn unitary_propagator(generator: &CMatrix, t: f64) -> CMatrix {
    hermitian_map(generator, |v| Complex64::from_polar(1.0, -v * t))
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn trace_norm_hermitian(a: &CMatrix) -> f64 {
    hermitian_eigenvalues(a).iter().map(|v| v.abs()).sum()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}
