//! Finite-dimensional decoherence-functional engine.
//!
//! Builds Heisenberg-picture projector strings for a Hermitian Hamiltonian
//! matrix and evaluates the interference structure of coarse-grained
//! histories: D(a, a') = Tr(P_an(tn)...P_a1(t1) rho P_a'1(t1)...P_a'n(tn)).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PROJECTOR_TOL: f64 = 1e-8;
pub const FAMILY_TOL: f64 = 1e-10;

/// Diagonal entries below this carry no probability and are excluded from
/// the normalized off-diagonal ratio.
pub const ZERO_DIAGONAL_CUTOFF: f64 = 1e-14;

/// A complete, mutually orthogonal set of Hermitian projectors.
#[derive(Debug, Clone)]
pub struct ProjectorFamily {
    pub members: Vec<CMat>,
    pub labels: Vec<String>,
}

impl ProjectorFamily {
    /// Validates hermiticity, idempotency, orthogonality and completeness.
    pub fn new(members: Vec<CMat>, labels: Vec<String>) -> Result<Self> {
        if members.is_empty() || members.len() != labels.len() {
            return Err(Error::BadProjectorFamily(
                "need a nonempty member list with one label per member".into(),
            ));
        }
        let dim = members[0].nrows();
        let mut sum = CMat::zeros(dim, dim);
        for (i, p) in members.iter().enumerate() {
            check_projector(p)?;
            sum += p;
            for q in members.iter().skip(i + 1) {
                let cross = linalg::max_abs(&(p * q));
                if cross > FAMILY_TOL {
                    return Err(Error::BadProjectorFamily(format!(
                        "members are not orthogonal (|PQ| = {cross:.3e})"
                    )));
                }
            }
        }
        let defect = linalg::max_abs(&(sum - linalg::identity(dim)));
        if defect > FAMILY_TOL {
            return Err(Error::BadProjectorFamily(format!(
                "members do not sum to the identity (defect {defect:.3e})"
            )));
        }
        Ok(Self { members, labels })
    }

    pub fn dim(&self) -> usize {
        self.members[0].nrows()
    }

    /// Spectral-projector family of a Hermitian operator, grouping
    /// eigenvalues closer than `degeneracy_tol`.
    pub fn from_eigenspaces(h: &CMat, degeneracy_tol: f64) -> Result<Self> {
        check_hermitian(h)?;
        let (vals, u) = linalg::hermitian_eigen(h);
        let mut members = Vec::new();
        let mut labels = Vec::new();
        let mut start = 0;
        while start < vals.len() {
            let mut end = start + 1;
            while end < vals.len() && (vals[end] - vals[end - 1]).abs() <= degeneracy_tol {
                end += 1;
            }
            let dim = h.nrows();
            let mut p = CMat::zeros(dim, dim);
            for k in start..end {
                let v = u.column(k);
                p += &v * v.adjoint();
            }
            members.push(p);
            labels.push(format!("E{}", labels.len()));
            start = end;
        }
        Self::new(members, labels)
    }
}

/// The decoherence functional evaluated over all pairs of history strings.
#[derive(Debug, Clone)]
pub struct DecoherenceMatrix {
    /// One label per history, each the `|`-joined projector labels in time order.
    pub history_index: Vec<String>,
    pub entries: CMat,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub normalization: f64,
    /// Largest |D(a,a')| / sqrt(D(a,a) D(a',a')) over distinct pairs with
    /// nonzero diagonals.
    pub epsilon_max: f64,
    /// Largest probability-sum defect |p(a or b) - p(a) - p(b)| over binary
    /// coarse-grainings.
    pub additivity_defect: f64,
    pub probabilities: Vec<(String, f64)>,
    pub decoherent: bool,
}

fn check_hermitian(a: &CMat) -> Result<()> {
    let scale = linalg::max_abs(a).max(1.0);
    let defect = linalg::hermiticity_defect(a);
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { defect, tol: HERMITIAN_TOL * scale });
    }
    Ok(())
}

fn check_projector(p: &CMat) -> Result<()> {
    check_hermitian(p)?;
    let defect = linalg::max_abs(&(p * p - p));
    if defect > PROJECTOR_TOL {
        return Err(Error::NotProjector { defect });
    }
    Ok(())
}

fn check_density_matrix(rho: &CMat) -> Result<()> {
    check_hermitian(rho).map_err(|_| {
        Error::InvalidDensityMatrix("density matrix is not Hermitian".into())
    })?;
    let tr = linalg::trace(rho);
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(Error::InvalidDensityMatrix(format!("trace is {tr}, expected 1")));
    }
    let (vals, _) = linalg::hermitian_eigen(rho);
    if vals.iter().any(|&l| l < -1e-10) {
        return Err(Error::InvalidDensityMatrix(format!(
            "negative eigenvalue {:.3e}",
            vals.iter().cloned().fold(f64::INFINITY, f64::min)
        )));
    }
    Ok(())
}

/// e^{iHt/hbar} P e^{-iHt/hbar}.
pub fn heisenberg_projector(p: &CMat, h: &CMat, t: f64, hbar: f64) -> Result<CMat> {
    check_projector(p)?;
    check_hermitian(h)?;
    if t == 0.0 {
        return Ok(p.clone());
    }
    let u = linalg::expi_hermitian(h, t / hbar);
    Ok(&u * p * u.adjoint())
}

/// Full decoherence functional for one projector family per time.
pub fn decoherence_functional(
    h: &CMat,
    rho: &CMat,
    times: &[f64],
    families: &[ProjectorFamily],
    hbar: f64,
) -> Result<DecoherenceMatrix> {
    check_hermitian(h)?;
    check_density_matrix(rho)?;
    if times.len() != families.len() {
        return Err(Error::InvalidParameter("need one projector family per time".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("times must be strictly increasing".into()));
    }

    // Heisenberg-evolve every projector once.
    let evolved: Vec<Vec<CMat>> = times
        .iter()
        .zip(families)
        .map(|(&t, fam)| {
            fam.members
                .iter()
                .map(|p| heisenberg_projector(p, h, t, hbar))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    // Enumerate history strings and their class operators
    // C_a = P_an(tn) ... P_a1(t1).
    let sizes: Vec<usize> = families.iter().map(|f| f.members.len()).collect();
    let count: usize = sizes.iter().product();
    let mut labels = Vec::with_capacity(count);
    let mut chains = Vec::with_capacity(count);
    for flat in 0..count {
        let idx = unflatten(flat, &sizes);
        let label: Vec<&str> = idx
            .iter()
            .enumerate()
            .map(|(k, &i)| families[k].labels[i].as_str())
            .collect();
        labels.push(label.join("|"));
        let mut chain = evolved[0][idx[0]].clone();
        for (k, &i) in idx.iter().enumerate().skip(1) {
            chain = &evolved[k][i] * chain;
        }
        chains.push(chain);
    }

    let mut entries = CMat::zeros(count, count);
    for a in 0..count {
        let ca_rho = &chains[a] * rho;
        for b in 0..count {
            entries[(a, b)] = linalg::trace(&(&ca_rho * chains[b].adjoint()));
        }
    }

    Ok(DecoherenceMatrix { history_index: labels, entries, times: times.to_vec() })
}

fn unflatten(mut flat: usize, sizes: &[usize]) -> Vec<usize> {
    // First time index varies fastest.
    let mut idx = Vec::with_capacity(sizes.len());
    for &s in sizes {
        idx.push(flat % s);
        flat /= s;
    }
    idx
}

/// Consistency diagnostics for a decoherence matrix.
pub fn analyze_decoherence(d: &DecoherenceMatrix, tol: f64) -> ConsistencyReport {
    let n = d.entries.nrows();
    let mut epsilon_max = 0.0f64;
    let mut additivity_defect = 0.0f64;
    let mut probabilities = Vec::with_capacity(n);
    let mut normalization = 0.0;
    for a in 0..n {
        let pa = d.entries[(a, a)].re;
        normalization += pa;
        probabilities.push((d.history_index[a].clone(), pa));
    }
    for a in 0..n {
        let da = d.entries[(a, a)].re;
        for b in (a + 1)..n {
            let db = d.entries[(b, b)].re;
            let off = d.entries[(a, b)];
            // p(a or b) - p(a) - p(b) = 2 Re D(a,b)
            additivity_defect = additivity_defect.max(2.0 * off.re.abs());
            if da > ZERO_DIAGONAL_CUTOFF && db > ZERO_DIAGONAL_CUTOFF {
                epsilon_max = epsilon_max.max(off.norm() / (da * db).sqrt());
            }
        }
    }
    ConsistencyReport {
        normalization,
        epsilon_max,
        additivity_defect,
        probabilities,
        decoherent: epsilon_max <= tol,
    }
}

/// epsilon_max of a general complex square matrix, interpreting it as a
/// decoherence matrix; convenience for the path-integral and grid modules.
pub fn epsilon_max_of(entries: &CMat) -> f64 {
    let n = entries.nrows();
    let mut eps = 0.0f64;
    for a in 0..n {
        let da = entries[(a, a)].re;
        for b in (a + 1)..n {
            let db = entries[(b, b)].re;
            if da > ZERO_DIAGONAL_CUTOFF && db > ZERO_DIAGONAL_CUTOFF {
                eps = eps.max(entries[(a, b)].norm() / (da * db).sqrt());
            }
        }
    }
    eps
}

/// Sum D over the last-time index (all projectors of the final family),
/// producing the (n-1)-time decoherence matrix.
pub fn coarse_grain_last_time(d: &DecoherenceMatrix, sizes: &[usize]) -> DecoherenceMatrix {
    let inner: usize = sizes[..sizes.len() - 1].iter().product();
    let last = sizes[sizes.len() - 1];
    let mut entries = CMat::zeros(inner, inner);
    for a in 0..inner {
        for b in 0..inner {
            let mut z = Complex64::new(0.0, 0.0);
            for k in 0..last {
                z += d.entries[(a + k * inner, b + k * inner)];
            }
            entries[(a, b)] = z;
        }
    }
    let strip = |s: &String| -> String {
        let mut parts: Vec<&str> = s.split('|').collect();
        parts.pop();
        parts.join("|")
    };
    DecoherenceMatrix {
        history_index: d.history_index[..inner].iter().map(strip).collect(),
        entries,
        times: d.times[..d.times.len() - 1].to_vec(),
    }
}
