//! Truncated-Fock-space workbench for the doubled commuting variables.
//!
//! Adjoins an auxiliary copy B of the system A and builds
//! X = x + y, Q = (x - y)/2, K = (p + k)/2, P = p - k on the tensor-product
//! space, so that [X, P] = 0 away from the truncation edge. Also provides the
//! complex-variable variant X = x + iy, P = p + ik with its positive
//! Hamiltonian.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Finite ladder-basis truncation for one factor.
#[derive(Debug, Clone, Copy)]
pub struct FockTruncation {
    /// Levels kept per factor.
    pub levels: usize,
    pub mass: f64,
    /// Reference frequency fixing the length scale sigma^2 = hbar/(2 m w).
    pub omega_ref: f64,
    pub hbar: f64,
}

impl FockTruncation {
    pub fn new(levels: usize, mass: f64, omega_ref: f64, hbar: f64) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidParameter("need at least 2 Fock levels".into()));
        }
        if mass <= 0.0 || omega_ref <= 0.0 || hbar <= 0.0 {
            return Err(Error::InvalidParameter("mass, omega_ref, hbar must be positive".into()));
        }
        Ok(Self { levels, mass, omega_ref, hbar })
    }
}

/// The doubled operator set on the N^2-dimensional tensor-product space.
///
/// Lowercase operators are the single-factor ones embedded in the product
/// space (x = x_A (x) 1, y = 1 (x) x_B, and likewise for momenta).
#[derive(Debug, Clone)]
pub struct DoubledOperators {
    pub trunc: FockTruncation,
    pub x_big: CMat,
    pub q_big: CMat,
    pub k_big: CMat,
    pub p_big: CMat,
    pub x: CMat,
    pub p: CMat,
    pub y: CMat,
    pub k: CMat,
    /// Projects off the top Fock level of each factor; commutator identities
    /// hold exactly only on its range.
    pub safe_projector: CMat,
}

/// Truncated lowering operator: a |n> = sqrt(n) |n-1>.
pub fn lowering(levels: usize) -> CMat {
    let mut a = CMat::zeros(levels, levels);
    for n in 1..levels {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Position and momentum matrices on the truncated ladder basis.
pub fn build_canonical_pair(trunc: &FockTruncation) -> (CMat, CMat) {
    let a = lowering(trunc.levels);
    let ad = a.adjoint();
    let xs = (trunc.hbar / (2.0 * trunc.mass * trunc.omega_ref)).sqrt();
    let ps = (trunc.mass * trunc.omega_ref * trunc.hbar / 2.0).sqrt();
    let x = (&a + &ad).scale(xs);
    let p = (&ad - &a).scale(ps) * Complex64::i();
    (x, p)
}

pub fn build_doubled_operators(trunc: &FockTruncation) -> DoubledOperators {
    let n = trunc.levels;
    let (x1, p1) = build_canonical_pair(trunc);
    let id = linalg::identity(n);
    let x = linalg::kron(&x1, &id);
    let p = linalg::kron(&p1, &id);
    let y = linalg::kron(&id, &x1);
    let k = linalg::kron(&id, &p1);

    let x_big = &x + &y;
    let q_big = (&x - &y).scale(0.5);
    let k_big = (&p + &k).scale(0.5);
    let p_big = &p - &k;

    let mut below_top = linalg::identity(n);
    below_top[(n - 1, n - 1)] = Complex64::new(0.0, 0.0);
    let safe_projector = linalg::kron(&below_top, &below_top);

    DoubledOperators { trunc: *trunc, x_big, q_big, k_big, p_big, x, p, y, k, safe_projector }
}

impl DoubledOperators {
    /// Projector keeping the lowest `keep` levels of each factor.
    pub fn subspace_projector(&self, keep: usize) -> CMat {
        let n = self.trunc.levels;
        let mut low = CMat::zeros(n, n);
        for i in 0..keep.min(n) {
            low[(i, i)] = Complex64::new(1.0, 0.0);
        }
        linalg::kron(&low, &low)
    }
}

/// Fock vacuum density matrix.
pub fn vacuum(levels: usize) -> CMat {
    let mut rho = CMat::zeros(levels, levels);
    rho[(0, 0)] = Complex64::new(1.0, 0.0);
    rho
}

/// Squeezed vacuum exp(r/2 (a^2 - a^dag^2)) |0>.
pub fn squeezed_vacuum(levels: usize, r: f64) -> CMat {
    let a = lowering(levels);
    let gen = (&a * &a - (a.adjoint() * a.adjoint())).scale(0.5 * r);
    // exp(G) with G anti-Hermitian, via the Hermitian generator -iG.
    let h = &gen * Complex64::new(0.0, -1.0);
    let s = linalg::expi_hermitian(&h, 1.0);
    let psi = s.column(0).clone_owned();
    let norm = psi.norm();
    let psi = psi.unscale(norm);
    &psi * psi.adjoint()
}

/// Truncated thermal state with mean occupation nbar.
pub fn thermal(levels: usize, nbar: f64) -> CMat {
    let q = nbar / (nbar + 1.0);
    let mut rho = CMat::zeros(levels, levels);
    let mut z = 0.0;
    for i in 0..levels {
        let w = q.powi(i as i32);
        rho[(i, i)] = Complex64::new(w, 0.0);
        z += w;
    }
    rho.unscale(z)
}

fn expectation(op: &CMat, rho: &CMat) -> f64 {
    // Tr(op rho) without forming the product.
    let n = op.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += op[(i, j)] * rho[(j, i)];
        }
    }
    acc.re
}

/// The closeness product <(X - x)^2><(P - p)^2> for a given B-factor state.
pub fn closeness_product(ops: &DoubledOperators, rho_b: &CMat) -> Result<f64> {
    let n = ops.trunc.levels;
    let top = rho_b[(n - 1, n - 1)].re;
    if top > 1e-8 {
        return Err(Error::TruncationUnreliable(format!(
            "B-state top-level occupation {top:.3e} exceeds 1e-8"
        )));
    }
    // Full-space evaluation with the A factor in vacuum; the result is
    // A-independent because X - x and P - p act on the B factor only.
    let rho = linalg::kron(&vacuum(n), rho_b);
    let dx = &ops.x_big - &ops.x;
    let dp = &ops.p_big - &ops.p;
    Ok(expectation(&(&dx * &dx), &rho) * expectation(&(&dp * &dp), &rho))
}

/// The complex commuting pair X = x + iy, P = p + ik and the positive
/// Hamiltonian P^dag P / 2m + m w^2 X^dag X / 2.
pub fn build_complex_pair(trunc: &FockTruncation) -> (CMat, CMat, CMat) {
    let ops = build_doubled_operators(trunc);
    let xc = &ops.x + &ops.y * Complex64::i();
    let pc = &ops.p + &ops.k * Complex64::i();
    let hc = (xc.adjoint() * &xc).scale(0.5 * trunc.mass * trunc.omega_ref * trunc.omega_ref)
        + (pc.adjoint() * &pc).unscale(2.0 * trunc.mass);
    (xc, pc, hc)
}
