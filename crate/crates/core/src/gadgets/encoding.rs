//! Block encodings, the preparation oracle, and the select circuit `W`.

use crate::error::{domain, shape, Result};
use crate::matcore::{op_norm, svd, CMat, C64, ONE};

/// Register layout `index ⊗ ancilla ⊗ system`, most significant first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    pub index_dim: usize,
    pub ancilla_dim: usize,
    pub system_dim: usize,
}

impl RegisterLayout {
    pub fn total(&self) -> usize {
        self.index_dim * self.ancilla_dim * self.system_dim
    }

    /// Flat basis index of `|k⟩_idx |a⟩_anc |s⟩_sys`.
    pub fn flat(&self, k: usize, a: usize, s: usize) -> usize {
        (k * self.ancilla_dim + a) * self.system_dim + s
    }

    /// Whether a flat basis index has the ancilla in `|0⟩`.
    pub fn flag_clear(&self, flat: usize) -> bool {
        (flat / self.system_dim).is_multiple_of(self.ancilla_dim)
    }

    /// Whether a flat basis index has both index and ancilla in `|0⟩`.
    pub fn is_input(&self, flat: usize) -> bool {
        flat < self.system_dim
    }
}

/// A unitary whose `⟨0|_anc · |0⟩_anc` block equals `A/α`.
#[derive(Clone, Debug)]
pub struct BlockEncoding {
    unitary: CMat,
    alpha: f64,
    ancilla_qubits: u32,
    encoded_dim: usize,
}

impl BlockEncoding {
    pub fn unitary(&self) -> &CMat {
        &self.unitary
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ancilla_qubits(&self) -> u32 {
        self.ancilla_qubits
    }

    pub fn ancilla_dim(&self) -> usize {
        1 << self.ancilla_qubits
    }

    pub fn encoded_dim(&self) -> usize {
        self.encoded_dim
    }

    /// `α (⟨0| ⊗ I) U (|0⟩ ⊗ I)`.
    pub fn encoded(&self) -> CMat {
        let d = self.encoded_dim;
        self.unitary.block(0, 0, d, d).scale_real(self.alpha)
    }

    /// A one-ancilla unitary that flips the flag and encodes the zero
    /// operator; used for the padding branch of the preparation oracle.
    pub fn flag_flip(dim: usize) -> Self {
        let mut u = CMat::zeros(2 * dim, 2 * dim);
        u.set_block(0, dim, &CMat::identity(dim));
        u.set_block(dim, 0, &CMat::identity(dim));
        Self { unitary: u, alpha: 1.0, ancilla_qubits: 1, encoded_dim: dim }
    }
}

/// One-ancilla unitary dilation
/// `[[A', √(I − A'A'†)], [√(I − A'†A'), −A'†]]` with `A' = A/α`.
pub fn build_block_encoding(a: &CMat, alpha: f64) -> Result<BlockEncoding> {
    if !a.is_square() {
        return Err(shape("block-encoded operator must be square"));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(domain(format!("scale must be positive and finite, got {alpha}")));
    }
    let norm = op_norm(a)?;
    if alpha < norm - 1e-12 {
        return Err(domain(format!("scale {alpha} is below ‖A‖ = {norm}; no unitary dilation exists")));
    }
    // One SVD A/α = U Σ V† serves all four blocks, so the completion is
    // exactly unitary even when some singular values sit at 1:
    // √(I − A'A'†) = U√(1 − Σ²)U†, √(I − A'†A') = V√(1 − Σ²)V†.
    let d = a.rows();
    let scaled = a.scale_real(1.0 / alpha);
    let sd = scaled.dagger();
    let (u_l, s, v_r) = svd(&scaled)?;
    let comp: Vec<C64> = s.iter().map(|&x| C64::new((1.0 - (x * x).min(1.0)).sqrt(), 0.0)).collect();
    let c = CMat::from_diag(&comp);
    let top_right = &(&u_l * &c) * &u_l.dagger();
    let bottom_left = &(&v_r * &c) * &v_r.dagger();
    let mut u = CMat::zeros(2 * d, 2 * d);
    u.set_block(0, 0, &scaled);
    u.set_block(0, d, &top_right);
    u.set_block(d, 0, &bottom_left);
    u.set_block(d, d, &(-&sd));
    Ok(BlockEncoding { unitary: u, alpha, ancilla_qubits: 1, encoded_dim: d })
}

/// Unitary on the index register whose first column is the normalized
/// vector `(α_1, …, α_m, √w, 0, …)`; the padding entry is present only for
/// `w > 0`. Built as a Householder reflection, padded to a power of two.
pub fn build_prep_oracle(alphas: &[f64], padded_weight: f64) -> Result<CMat> {
    if alphas.iter().any(|&a| !(a >= 0.0) || !a.is_finite()) {
        return Err(domain("block-encoding scales must be finite and nonnegative"));
    }
    if !(padded_weight >= 0.0) || !padded_weight.is_finite() {
        return Err(domain("padding weight must be finite and nonnegative"));
    }
    let mut amps: Vec<f64> = alphas.to_vec();
    if padded_weight > 0.0 {
        amps.push(padded_weight.sqrt());
    }
    let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(domain("all preparation weights are zero"));
    }
    let n = amps.len().next_power_of_two();
    amps.resize(n, 0.0);
    let target: Vec<f64> = amps.iter().map(|a| a / norm).collect();

    let mut v: Vec<f64> = target.clone();
    v[0] -= 1.0;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    if vv < 1e-30 {
        return Ok(CMat::identity(n));
    }
    Ok(CMat::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        C64::new(delta - 2.0 * v[i] * v[j] / vv, 0.0)
    }))
}

/// `Σ_μ |μ⟩⟨μ| ⊗ U_μ` over an index register of `index_dim` states.
///
/// Index states beyond the supplied encodings get a flag-flipping branch,
/// so any weight the oracle places there always fails post-selection.
pub fn build_select(encodings: &[BlockEncoding], index_dim: usize) -> Result<(CMat, RegisterLayout)> {
    let first = encodings.first().ok_or_else(|| shape("no block encodings supplied"))?;
    let (anc, sys) = (first.ancilla_dim(), first.encoded_dim());
    if encodings.iter().any(|e| e.ancilla_dim() != anc || e.encoded_dim() != sys) {
        return Err(shape("block encodings must share ancilla count and system dimension"));
    }
    if index_dim < encodings.len() {
        return Err(shape("index register is smaller than the number of block encodings"));
    }
    let layout = RegisterLayout { index_dim, ancilla_dim: anc, system_dim: sys };
    let block = anc * sys;
    let flip = flag_flip_wide(anc, sys);
    let mut select = CMat::zeros(layout.total(), layout.total());
    for k in 0..index_dim {
        let u = encodings.get(k).map_or(&flip, BlockEncoding::unitary);
        select.set_block(k * block, k * block, u);
    }
    Ok((select, layout))
}

/// `W = (Σ_μ |μ⟩⟨μ| ⊗ U_μ)(B ⊗ I ⊗ I)` on `index ⊗ ancilla ⊗ system`.
pub fn build_w(encodings: &[BlockEncoding], prep: &CMat) -> Result<(CMat, RegisterLayout)> {
    if !prep.is_square() {
        return Err(shape("preparation oracle must be square"));
    }
    let (select, layout) = build_select(encodings, prep.rows())?;
    let prep_full = prep.kron(&CMat::identity(layout.ancilla_dim * layout.system_dim));
    Ok((&select * &prep_full, layout))
}

fn flag_flip_wide(anc: usize, sys: usize) -> CMat {
    // Cyclic shift on the ancilla register: |0⟩ ↦ |1⟩, so the branch never
    // lands in the flag-clear subspace.
    let mut shift = CMat::zeros(anc, anc);
    for a in 0..anc {
        shift[((a + 1) % anc, a)] = ONE;
    }
    shift.kron(&CMat::identity(sys))
}

/// Single-shot probability of finding the ancilla in `|0⟩` after `W` acts
/// on `|0⟩_idx |0⟩_anc ⊗ ρ`.
pub fn success_probability(w: &CMat, layout: &RegisterLayout, rho: &CMat) -> Result<f64> {
    let d = layout.system_dim;
    if w.rows() != layout.total() || w.cols() != layout.total() {
        return Err(shape("W does not match the register layout"));
    }
    if rho.rows() != d || rho.cols() != d {
        return Err(shape(format!("state must be {d}x{d}")));
    }
    // Columns 0..d of W are its action on |0⟩|0⟩|s⟩.
    let v = w.block(0, 0, w.rows(), d);
    let vr = &v * rho;
    let mut p = 0.0;
    for row in (0..w.rows()).filter(|&r| layout.flag_clear(r)) {
        let z: C64 = (0..d).map(|c| vr[(row, c)] * v[(row, c)].conj()).sum();
        p += z.re;
    }
    Ok(p)
}
