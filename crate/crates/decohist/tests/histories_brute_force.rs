//! Brute-force cross-check of the decoherence-functional engine against a
//! naively coded oracle that shares no code path with the implementation:
//! scaled Taylor-series exponentials and direct five-matrix products.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use decohist::histories::{analyze_decoherence, decoherence_functional, ProjectorFamily};
use decohist::linalg::CMat;

fn taylor_expm(a: &CMat) -> CMat {
    // Scale so the series converges quickly, square back up.
    let n = a.nrows();
    let norm: f64 = a.iter().map(|z| z.norm()).sum();
    let s = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let b = a.scale(0.5f64.powi(s) as f64);
    let mut term = CMat::identity(n, n);
    let mut sum = CMat::identity(n, n);
    for k in 1..40 {
        term = (&term * &b).unscale(k as f64);
        sum += &term;
    }
    let mut r = sum;
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Forward/backward propagators at each projection time, computed with the
/// Taylor-series exponential only.
fn oracle_propagators(h: &CMat, times: &[f64], hbar: f64) -> Vec<(CMat, CMat)> {
    times
        .iter()
        .map(|&t| {
            let u = taylor_expm(&(h * Complex64::new(0.0, t / hbar)));
            let udag = taylor_expm(&(h * Complex64::new(0.0, -t / hbar)));
            (u, udag)
        })
        .collect()
}

fn oracle_entry(
    props: &[(CMat, CMat)],
    rho: &CMat,
    projs: &[&CMat],
    projs_other: &[&CMat],
) -> Complex64 {
    // Tr( P_an(tn)...P_a1(t1) rho P_b1(t1)...P_bn(tn) ), everything written
    // out as plain matrix products.
    let dim = rho.nrows();
    let mut left = CMat::identity(dim, dim);
    for (k, p) in projs.iter().enumerate() {
        let (u, udag) = &props[k];
        left = u * *p * udag * left;
    }
    let mut right = CMat::identity(dim, dim);
    for (k, p) in projs_other.iter().enumerate() {
        let (u, udag) = &props[k];
        right = &right * u * *p * udag;
    }
    let m = left * rho * right;
    m.diagonal().iter().sum()
}

fn random_hermitian(rng: &mut StdRng, dim: usize) -> CMat {
    let a = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    (&a + a.adjoint()).scale(0.5)
}

fn random_density(rng: &mut StdRng, dim: usize) -> CMat {
    let a = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let m = &a * a.adjoint();
    let tr: Complex64 = m.diagonal().iter().sum();
    m.unscale(tr.re)
}

/// Random projector family with at most three members, built by grouping
/// eigenprojectors of a random Hermitian matrix.
fn random_family(rng: &mut StdRng, dim: usize) -> ProjectorFamily {
    let h = random_hermitian(rng, dim);
    let fine = ProjectorFamily::from_eigenspaces(&h, 1e-6).unwrap();
    let groups = 3.min(fine.members.len());
    let mut members = vec![CMat::zeros(dim, dim); groups];
    for (i, p) in fine.members.iter().enumerate() {
        members[i % groups] += p;
    }
    let labels = (0..groups).map(|g| format!("g{g}")).collect();
    ProjectorFamily::new(members, labels).unwrap()
}

#[test]
fn qubit_two_time_fixed_values() {
    // sigma_z families at t1 = 0+, t2 = pi/4 with H = sigma_x, rho = |0><0|.
    let sx = CMat::from_row_slice(2, 2, &[
        Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0),
    ]);
    let mut rho = CMat::zeros(2, 2);
    rho[(0, 0)] = Complex64::new(1.0, 0.0);
    let mut p0 = CMat::zeros(2, 2);
    p0[(0, 0)] = Complex64::new(1.0, 0.0);
    let mut p1 = CMat::zeros(2, 2);
    p1[(1, 1)] = Complex64::new(1.0, 0.0);
    let fam = ProjectorFamily::new(vec![p0.clone(), p1.clone()], vec!["0".into(), "1".into()]).unwrap();
    let times = [1e-12, std::f64::consts::FRAC_PI_4];
    let d = decoherence_functional(&sx, &rho, &times, &[fam.clone(), fam], 1.0).unwrap();

    assert_eq!(d.entries.nrows(), 4);
    // Hermitian tensor summing to 1.
    let total: Complex64 = d.entries.iter().sum();
    assert!((total.re - 1.0).abs() < 1e-10 && total.im.abs() < 1e-10);

    let members = [&p0, &p1];
    let props = oracle_propagators(&sx, &times, 1.0);
    for a in 0..4 {
        for b in 0..4 {
            let (a1, a2) = (a % 2, a / 2);
            let (b1, b2) = (b % 2, b / 2);
            let want = oracle_entry(
                &props,
                &rho,
                &[members[a1], members[a2]],
                &[members[b1], members[b2]],
            );
            let got = d.entries[(a, b)];
            assert!((got - want).norm() < 1e-12, "entry ({a},{b}): got {got}, want {want}");
        }
    }
}

#[test]
fn random_systems_match_oracle() {
    let mut rng = StdRng::seed_from_u64(20260824);
    for dim in [2usize, 4, 8] {
        for n_times in [1usize, 2, 3] {
            let h = random_hermitian(&mut rng, dim);
            let rho = random_density(&mut rng, dim);
            let fams: Vec<ProjectorFamily> =
                (0..n_times).map(|_| random_family(&mut rng, dim)).collect();
            let mut times = vec![];
            let mut t = 0.1;
            for _ in 0..n_times {
                times.push(t);
                t += 0.3 + rng.gen::<f64>();
            }
            let hbar = 0.7;
            let d = decoherence_functional(&h, &rho, &times, &fams, hbar).unwrap();

            // Hermiticity and total-trace invariants.
            let total: Complex64 = d.entries.iter().sum();
            assert!((total.re - 1.0).abs() < 1e-10, "sum = {total}");
            for a in 0..d.entries.nrows() {
                for b in 0..d.entries.ncols() {
                    let diff = (d.entries[(a, b)] - d.entries[(b, a)].conj()).norm();
                    assert!(diff < 1e-11);
                }
            }

            // Entrywise oracle match.
            let props = oracle_propagators(&h, &times, hbar);
            let sizes: Vec<usize> = fams.iter().map(|f| f.members.len()).collect();
            let count: usize = sizes.iter().product();
            let unflatten = |mut f: usize| -> Vec<usize> {
                sizes.iter().map(|&s| { let i = f % s; f /= s; i }).collect()
            };
            for a in 0..count {
                for b in 0..count {
                    let ia = unflatten(a);
                    let ib = unflatten(b);
                    let pa: Vec<&CMat> =
                        ia.iter().enumerate().map(|(k, &i)| &fams[k].members[i]).collect();
                    let pb: Vec<&CMat> =
                        ib.iter().enumerate().map(|(k, &i)| &fams[k].members[i]).collect();
                    let want = oracle_entry(&props, &rho, &pa, &pb);
                    let got = d.entries[(a, b)];
                    assert!(
                        (got - want).norm() < 1e-12,
                        "dim {dim}, n {n_times}, entry ({a},{b}): got {got}, want {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn refinement_reproduces_coarser_functional() {
    let mut rng = StdRng::seed_from_u64(7);
    let dim = 4;
    let h = random_hermitian(&mut rng, dim);
    let rho = random_density(&mut rng, dim);
    let f1 = random_family(&mut rng, dim);
    let f2 = random_family(&mut rng, dim);
    let f3 = random_family(&mut rng, dim);
    let times = [0.2, 0.9, 1.7];
    let d3 = decoherence_functional(&h, &rho, &times, &[f1.clone(), f2.clone(), f3.clone()], 1.0).unwrap();
    let d2 = decoherence_functional(&h, &rho, &times[..2], &[f1.clone(), f2.clone()], 1.0).unwrap();
    let sizes = [f1.members.len(), f2.members.len(), f3.members.len()];
    let coarse = decohist::histories::coarse_grain_last_time(&d3, &sizes);
    let diff = (&coarse.entries - &d2.entries).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(diff < 1e-10, "refinement defect {diff}");
    assert_eq!(coarse.history_index, d2.history_index);
}

#[test]
fn conserved_families_three_times() {
    let mut rng = StdRng::seed_from_u64(99);
    let dim = 16;
    let h = random_hermitian(&mut rng, dim);
    let rho = random_density(&mut rng, dim);
    // Coarse-grain the spectrum into four energy bands; the members still
    // commute with H, so the histories must decohere exactly.
    let fine = ProjectorFamily::from_eigenspaces(&h, 1e-8).unwrap();
    let mut members = vec![CMat::zeros(dim, dim); 4];
    for (i, p) in fine.members.iter().enumerate() {
        members[i % 4] += p;
    }
    let labels = (0..4).map(|g| format!("band{g}")).collect();
    let fam = ProjectorFamily::new(members, labels).unwrap();
    let d = decoherence_functional(
        &h, &rho, &[0.4, 1.3, 2.9], &[fam.clone(), fam.clone(), fam], 1.0,
    ).unwrap();
    let rep = analyze_decoherence(&d, 1e-2);
    assert!(rep.epsilon_max <= 1e-12, "epsilon_max = {}", rep.epsilon_max);
    assert!(rep.additivity_defect <= 1e-10);
}
