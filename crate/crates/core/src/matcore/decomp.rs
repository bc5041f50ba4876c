//! Norms, Hermitian eigendecomposition, and the matrix exponential.

use nalgebra::linalg::{SymmetricEigen, SVD};

use super::cmat::{CMat, C64, ONE, ZERO};
use crate::error::{invalid, shape, Error, Result};

fn check_finite(a: &CMat) -> Result<()> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(invalid("empty matrix"));
    }
    if !a.is_finite() {
        return Err(invalid("matrix has non-finite entries"));
    }
    Ok(())
}

fn check_square(a: &CMat) -> Result<()> {
    if !a.is_square() {
        return Err(shape(format!("expected square matrix, got {}x{}", a.rows(), a.cols())));
    }
    Ok(())
}

/// Singular values in descending order.
pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    check_finite(a)?;
    let svd = SVD::new(a.to_nalgebra(), false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Full SVD `A = U diag(s) V†` of a square matrix; returns `(U, s, V)`.
pub fn svd(a: &CMat) -> Result<(CMat, Vec<f64>, CMat)> {
    check_finite(a)?;
    check_square(a)?;
    let svd = SVD::new(a.to_nalgebra(), true, true);
    let u = svd.u.as_ref().ok_or_else(|| Error::Numerical("SVD did not return U".into()))?;
    let vt = svd.v_t.as_ref().ok_or_else(|| Error::Numerical("SVD did not return V".into()))?;
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    Ok((CMat::from_nalgebra(u), s, CMat::from_nalgebra(vt).dagger()))
}

/// Operator norm: the largest singular value.
pub fn op_norm(a: &CMat) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Trace norm `Tr√(A†A)`: the sum of singular values.
pub fn trace_norm(a: &CMat) -> Result<f64> {
    check_square(a)?;
    Ok(singular_values(a)?.iter().sum())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back ascending; column `k` of the returned matrix is the
/// eigenvector for eigenvalue `k`. Only the Hermitian part of `a` is used.
pub fn eigh(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    check_square(a)?;
    check_finite(a)?;
    let herm = (a + &a.dagger()).scale_real(0.5);
    let eig = SymmetricEigen::new(herm.to_nalgebra());
    let mut order: Vec<usize> = (0..a.rows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(a.rows(), a.rows(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_eigenvalue(a: &CMat) -> Result<f64> {
    Ok(eigh(a)?.0[0])
}

/// Rebuilds `V f(Λ) V†` from an eigendecomposition.
pub fn spectral_apply(values: &[f64], vectors: &CMat, f: impl Fn(f64) -> C64) -> CMat {
    let n = values.len();
    let fv: Vec<C64> = values.iter().map(|&x| f(x)).collect();
    CMat::from_fn(n, n, |r, c| (0..n).map(|k| vectors[(r, k)] * fv[k] * vectors[(c, k)].conj()).sum())
}

/// Principal square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues in `[-clip, 0)` are treated as zero; anything more negative is
/// an error.
pub fn psd_sqrt(a: &CMat, clip: f64) -> Result<CMat> {
    let (values, vectors) = eigh(a)?;
    if let Some(&v) = values.iter().find(|&&v| v < -clip) {
        return Err(invalid(format!("matrix is not positive semidefinite (eigenvalue {v:e})")));
    }
    Ok(spectral_apply(&values, &vectors, |x| C64::new(x.max(0.0).sqrt(), 0.0)))
}

/// Numerical rank: number of singular values above `tol`.
pub fn rank(a: &CMat, tol: f64) -> Result<usize> {
    Ok(singular_values(a)?.iter().filter(|&&s| s > tol).count())
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    check_square(a)?;
    if a.rows() != b.rows() {
        return Err(shape("right-hand side row count does not match system"));
    }
    let n = a.rows();
    let m = b.cols();
    let mut lu = a.clone();
    let mut x = b.clone();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm()))
            .unwrap_or(k);
        if lu[(piv, k)].norm() == 0.0 {
            return Err(Error::Numerical("singular matrix in linear solve".into()));
        }
        if piv != k {
            for c in 0..n {
                let t = lu[(k, c)];
                lu[(k, c)] = lu[(piv, c)];
                lu[(piv, c)] = t;
            }
            for c in 0..m {
                let t = x[(k, c)];
                x[(k, c)] = x[(piv, c)];
                x[(piv, c)] = t;
            }
        }
        let inv = ONE / lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] * inv;
            if f == ZERO {
                continue;
            }
            for c in k..n {
                let v = lu[(k, c)];
                lu[(i, c)] -= f * v;
            }
            for c in 0..m {
                let v = x[(k, c)];
                x[(i, c)] -= f * v;
            }
        }
    }
    for k in (0..n).rev() {
        let inv = ONE / lu[(k, k)];
        for c in 0..m {
            let mut s = x[(k, c)];
            for j in k + 1..n {
                s -= lu[(k, j)] * x[(j, c)];
            }
            x[(k, c)] = s * inv;
        }
    }
    Ok(x)
}

// Degree-13 Padé coefficients and the matching 1-norm threshold.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(a: &CMat) -> Result<CMat> {
    check_square(a)?;
    check_finite(a)?;
    let n = a.rows();
    let norm = a.norm_1();
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.scale_real(0.5f64.powi(s));

    let id = CMat::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| C64::new(PADE13[k], 0.0);

    let mut inner_u = a6.scale(b(13));
    inner_u.add_scaled(&a4, b(11));
    inner_u.add_scaled(&a2, b(9));
    let mut u = &a6 * &inner_u;
    u.add_scaled(&a6, b(7));
    u.add_scaled(&a4, b(5));
    u.add_scaled(&a2, b(3));
    u.add_scaled(&id, b(1));
    let u = &a * &u;

    let mut inner_v = a6.scale(b(12));
    inner_v.add_scaled(&a4, b(10));
    inner_v.add_scaled(&a2, b(8));
    let mut v = &a6 * &inner_v;
    v.add_scaled(&a6, b(6));
    v.add_scaled(&a4, b(4));
    v.add_scaled(&a2, b(2));
    v.add_scaled(&id, b(0));

    let mut r = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..s {
        r = &r * &r;
    }
    if !r.is_finite() {
        return Err(Error::Numerical("matrix exponential overflowed".into()));
    }
    Ok(r)
}
