//! Small complex linear-algebra helpers shared by the operator modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RMat = DMatrix<f64>;

pub fn dagger(a: &CMat) -> CMat {
    a.adjoint()
}

/// Largest entry magnitude.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_real(a: &RMat) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Hermiticity defect max|A - A†|.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    max_abs(&(a - a.adjoint()))
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Eigendecomposition of a Hermitian matrix. Returns (eigenvalues ascending,
/// unitary with eigenvectors as columns).
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    // Symmetrize first so roundoff in the input cannot leak imaginary parts
    // into the eigenvalues.
    let h = (a + a.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = a.nrows();
    let mut vecs = CMat::zeros(n, n);
    for (col, &i) in idx.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// exp(i s H) for Hermitian H, via eigendecomposition.
pub fn expi_hermitian(h: &CMat, s: f64) -> CMat {
    let (vals, u) = hermitian_eigen(h);
    let phases = CVec::from_iterator(vals.len(), vals.iter().map(|&l| (Complex64::i() * (s * l)).exp()));
    let d = CMat::from_diagonal(&phases);
    &u * d * u.adjoint()
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Matrix exponential of a real square matrix (Padé 6 with scaling and squaring).
pub fn expm_real(a: &RMat) -> RMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let norm = a.iter().map(|x| x.abs()).fold(0.0, f64::max) * n as f64;
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let a_scaled = a.scale(0.5f64.powi(s));

    // Padé(6,6) coefficients.
    let c = [1.0, 0.5, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0];
    let id = RMat::identity(n, n);
    let a2 = &a_scaled * &a_scaled;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let u_even = id.scale(c[0]) + a2.scale(c[2]) + a4.scale(c[4]) + a6.scale(c[6]);
    let u_odd = &a_scaled * (RMat::identity(n, n).scale(c[1]) + a2.scale(c[3]) + a4.scale(c[5]));
    let p = &u_even + &u_odd;
    let q = &u_even - &u_odd;
    let mut r = q.lu().solve(&p).expect("Pade denominator must be invertible");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Solve A X = B for complex A via LU.
pub fn solve_complex(a: &CMat, b: &CMat) -> Option<CMat> {
    a.clone().lu().solve(b)
}

pub fn trace(a: &CMat) -> Complex64 {
    a.diagonal().iter().sum()
}
