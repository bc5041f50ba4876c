//! Shared fixtures and independent reference computations for the
//! integration tests. Nothing here calls the decomposition routines under
//! test.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use trajlind::lindblad::LindbladModel;
use trajlind::matcore::{CMat, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMat {
    let g = ginibre(rng, n, n);
    (&g + &g.dagger()).scale_real(0.5)
}

pub fn random_state(rng: &mut impl Rng, d: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Random density matrix `GG†/Tr(GG†)`.
pub fn random_density(rng: &mut impl Rng, d: usize) -> CMat {
    let g = ginibre(rng, d, d);
    let p = &g * &g.dagger();
    let tr = p.trace().re;
    p.scale_real(1.0 / tr)
}

/// Modified Gram–Schmidt on the columns of a tall matrix.
pub fn orthonormalize_columns(a: &CMat) -> CMat {
    let (rows, cols) = (a.rows(), a.cols());
    let mut q = a.clone();
    for j in 0..cols {
        for k in 0..j {
            let dot: C64 = (0..rows).map(|i| q[(i, k)].conj() * q[(i, j)]).sum();
            for i in 0..rows {
                let v = q[(i, k)];
                q[(i, j)] -= dot * v;
            }
        }
        let n = (0..rows).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..rows {
            q[(i, j)] /= n;
        }
    }
    q
}

pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMat {
    orthonormalize_columns(&ginibre(rng, n, n))
}

/// `m` Kraus operators `K_μ` with `Σ K_μ†K_μ = I`, cut from a random isometry.
pub fn random_kraus(rng: &mut impl Rng, d: usize, m: usize) -> Vec<CMat> {
    let v = orthonormalize_columns(&ginibre(rng, d * m, d));
    (0..m).map(|mu| v.block(mu * d, 0, d, d)).collect()
}

/// Random model with `Σ L†L = Γ I`.
pub fn random_admissible(rng: &mut impl Rng, d: usize, m: usize, gamma: f64) -> LindbladModel {
    let h = random_hermitian(rng, d).scale_real(0.5);
    let jumps = random_kraus(rng, d, m).into_iter().map(|k| k.scale_real(gamma.sqrt())).collect();
    LindbladModel::new(h, jumps).unwrap()
}

pub fn basis_matrices(d: usize) -> impl Iterator<Item = CMat> {
    (0..d * d).map(move |k| CMat::unit(d, k / d, k % d))
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues_real(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Eigenvalues of a Hermitian matrix via its real embedding
/// `[[Re, −Im], [Im, Re]]`, whose spectrum is each eigenvalue twice.
pub fn jacobi_eigenvalues(h: &CMat) -> Vec<f64> {
    let n = h.rows();
    let mut a = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    jacobi_eigenvalues_real(a).into_iter().step_by(2).collect()
}

/// Singular values from the eigenvalues of `A†A`, descending.
pub fn reference_singular_values(a: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = jacobi_eigenvalues(&(&a.dagger() * a)).into_iter().map(|e| e.max(0.0).sqrt()).collect();
    s.reverse();
    s
}

/// `Σ_k A^k/k!` until the terms stop changing the sum.
pub fn taylor_expm(a: &CMat) -> CMat {
    let n = a.rows();
    let mut sum = CMat::identity(n);
    let mut term = CMat::identity(n);
    for k in 1..200 {
        term = (&term * a).scale_real(1.0 / k as f64);
        sum = &sum + &term;
        if term.max_abs() < 1e-18 * sum.max_abs() {
            break;
        }
    }
    sum
}

/// Direct `Σ_μ K ρ K†`.
pub fn apply_kraus(kraus: &[CMat], rho: &CMat) -> CMat {
    let mut out = CMat::zeros(rho.rows(), rho.cols());
    for k in kraus {
        out = &out + &(&(k * rho) * &k.dagger());
    }
    out
}

/// `𝓛(ρ) = −i[H, ρ] + Σ LρL† − ½{L†L, ρ}` written out directly.
pub fn apply_lindbladian(model: &LindbladModel, rho: &CMat) -> CMat {
    let h = model.hamiltonian();
    let comm = &(h * rho) - &(rho * h);
    let mut out = comm.scale(C64::new(0.0, -1.0));
    for l in model.jumps() {
        let ld = l.dagger();
        let ldl = &ld * l;
        out = &out + &(&(l * rho) * &ld);
        out = &out - &(&(&ldl * rho) + &(rho * &ldl)).scale_real(0.5);
    }
    out
}

pub fn trace_distance_ref(a: &CMat, b: &CMat) -> f64 {
    0.5 * jacobi_eigenvalues(&(a - b)).iter().map(|e| e.abs()).sum::<f64>()
}
