//! Superoperators, Choi matrices, and channel distances.
//!
//! Vectorization is column-stacking throughout: `vec(ρ)[i + d·j] = ρ[i][j]`,
//! so that `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`. A Kraus set `{K}` therefore has the
//! superoperator `Σ conj(K) ⊗ K`.
//!
//! Choi matrices are unnormalized with the output factor first:
//! `J(Φ) = Σ_ij Φ(|i⟩⟨j|) ⊗ |i⟩⟨j|`. Complete positivity is equivalent to
//! `J ⪰ 0`, and trace preservation to `Tr_out J = I`.

use super::cmat::{CMat, C64, ONE, ZERO};
use super::decomp::{min_eigenvalue, trace_norm};
use crate::error::{invalid, shape, Result};

/// Column-stacking vectorization of a square matrix.
pub fn vec_col(rho: &CMat) -> Vec<C64> {
    let d = rho.rows();
    (0..d * d).map(|k| rho[(k % d, k / d)]).collect()
}

/// Inverse of [`vec_col`].
pub fn unvec_col(v: &[C64], d: usize) -> CMat {
    assert_eq!(v.len(), d * d, "vector length is not d²");
    CMat::from_fn(d, d, |i, j| v[i + d * j])
}

/// Matrix representation of a linear map on `d×d` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOp {
    dim: usize,
    matrix: CMat,
}

impl SuperOp {
    pub fn new(dim: usize, matrix: CMat) -> Result<Self> {
        let n = dim * dim;
        if dim == 0 || matrix.rows() != n || matrix.cols() != n {
            return Err(shape(format!(
                "superoperator on dim {dim} must be {n}x{n}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, matrix: CMat::identity(dim * dim) }
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, matrix: CMat::zeros(dim * dim, dim * dim) }
    }

    /// The channel `ρ ↦ UρU†`.
    pub fn unitary(u: &CMat) -> Result<Self> {
        if !u.is_square() {
            return Err(shape("unitary must be square"));
        }
        Ok(Self { dim: u.rows(), matrix: u.conj().kron(u) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn apply(&self, rho: &CMat) -> Result<CMat> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return Err(shape(format!("state must be {0}x{0}", self.dim)));
        }
        Ok(unvec_col(&self.matrix.matvec(&vec_col(rho)), self.dim))
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &SuperOp) -> Result<SuperOp> {
        if self.dim != first.dim {
            return Err(shape("composing superoperators of different dimension"));
        }
        Ok(SuperOp { dim: self.dim, matrix: &self.matrix * &first.matrix })
    }

    pub fn sub(&self, other: &SuperOp) -> Result<SuperOp> {
        if self.dim != other.dim {
            return Err(shape("subtracting superoperators of different dimension"));
        }
        Ok(SuperOp { dim: self.dim, matrix: &self.matrix - &other.matrix })
    }

    pub fn add(&self, other: &SuperOp) -> Result<SuperOp> {
        if self.dim != other.dim {
            return Err(shape("adding superoperators of different dimension"));
        }
        Ok(SuperOp { dim: self.dim, matrix: &self.matrix + &other.matrix })
    }

    pub fn scale(&self, s: f64) -> SuperOp {
        SuperOp { dim: self.dim, matrix: self.matrix.scale_real(s) }
    }

    /// Largest `|Tr Φ(|i⟩⟨j|) − δ_ij|` over matrix units.
    pub fn trace_preservation_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for j in 0..d {
            for i in 0..d {
                let col = i + d * j;
                let tr: C64 = (0..d).map(|k| self.matrix[(k + d * k, col)]).sum();
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((tr - target).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &SuperOp) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    pub fn to_choi(&self) -> ChoiMat {
        superop_to_choi(self)
    }
}

/// Unnormalized Choi matrix with output factor first.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMat {
    dim: usize,
    matrix: CMat,
}

impl ChoiMat {
    pub fn new(dim: usize, matrix: CMat) -> Result<Self> {
        let n = dim * dim;
        if dim == 0 || matrix.rows() != n || matrix.cols() != n {
            return Err(shape(format!("Choi matrix on dim {dim} must be {n}x{n}")));
        }
        Ok(Self { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// Smallest eigenvalue of the Hermitian part; `≥ 0` certifies complete positivity.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        min_eigenvalue(&self.matrix)
    }

    /// Partial trace over the output factor; the identity for trace-preserving maps.
    pub fn output_marginal(&self) -> CMat {
        partial_trace(&self.matrix, (self.dim, self.dim), Keep::Second)
            .expect("Choi matrix has square factor dims")
    }
}

/// Returns `Σ_μ conj(K_μ) ⊗ K_μ`.
pub fn kraus_to_superop(kraus: &[CMat]) -> Result<SuperOp> {
    let first = kraus.first().ok_or_else(|| invalid("empty Kraus set"))?;
    let d = first.rows();
    if kraus.iter().any(|k| k.rows() != d || k.cols() != d) {
        return Err(shape("Kraus operators must be square with a common dimension"));
    }
    let mut m = CMat::zeros(d * d, d * d);
    for k in kraus {
        m.add_scaled(&k.conj().kron(k), ONE);
    }
    SuperOp::new(d, m)
}

pub fn superop_to_choi(s: &SuperOp) -> ChoiMat {
    let d = s.dim;
    // J[(k·d + i), (l·d + j)] = Φ(|i⟩⟨j|)[k][l] = S[k + d·l, i + d·j]
    let matrix = CMat::from_fn(d * d, d * d, |r, c| {
        let (k, i) = (r / d, r % d);
        let (l, j) = (c / d, c % d);
        s.matrix[(k + d * l, i + d * j)]
    });
    ChoiMat { dim: d, matrix }
}

pub fn choi_to_superop(j: &ChoiMat) -> SuperOp {
    let d = j.dim;
    let matrix = CMat::from_fn(d * d, d * d, |r, c| {
        let (k, l) = (r % d, r / d);
        let (i, jj) = (c % d, c / d);
        j.matrix[(k * d + i, l * d + jj)]
    });
    SuperOp { dim: d, matrix }
}

/// Interval certified to contain the diamond distance `½‖S1 − S2‖⋄`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct DiamondBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Bounds the diamond distance via the trace norm of the Choi difference:
/// `‖ΔJ‖₁/d ≤ ‖Δ‖⋄ ≤ ‖ΔJ‖₁`.
pub fn diamond_distance_bounds(s1: &SuperOp, s2: &SuperOp) -> Result<DiamondBounds> {
    let diff = s1.sub(s2)?;
    let tn = trace_norm(&superop_to_choi(&diff).matrix)?;
    Ok(DiamondBounds { lower: 0.5 * tn / s1.dim as f64, upper: 0.5 * tn })
}

/// Trace distance between the normalized Choi states of two maps.
pub fn choi_distance(s1: &SuperOp, s2: &SuperOp) -> Result<f64> {
    Ok(diamond_distance_bounds(s1, s2)?.lower)
}

/// Which tensor factor a partial trace keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Partial trace of an operator on a `dA ⊗ dB` space.
pub fn partial_trace(a: &CMat, dims: (usize, usize), keep: Keep) -> Result<CMat> {
    let (da, db) = dims;
    if !a.is_square() || a.rows() != da * db {
        return Err(shape(format!(
            "partial trace over {da}x{db} factors needs a square {0}x{0} matrix",
            da * db
        )));
    }
    Ok(match keep {
        Keep::First => CMat::from_fn(da, da, |i, j| (0..db).map(|k| a[(i * db + k, j * db + k)]).sum()),
        Keep::Second => CMat::from_fn(db, db, |i, j| (0..da).map(|k| a[(k * db + i, k * db + j)]).sum()),
    })
}

/// Checks complete positivity and trace preservation; returns
/// `(min Choi eigenvalue, trace-preservation residual)`.
pub fn cptp_residuals(s: &SuperOp) -> Result<(f64, f64)> {
    Ok((s.to_choi().min_eigenvalue()?, s.trace_preservation_residual()))
}
