//! Unitary-level jump gadget: block encodings of the jump operators, an
//! index-register preparation oracle, the select circuit `W`, and oblivious
//! amplitude amplification up to success probability one. Also the
//! big-O resource ledger.

mod encoding;
mod ledger;

pub use encoding::{
    build_block_encoding, build_prep_oracle, build_select, build_w, success_probability, BlockEncoding, RegisterLayout,
};
pub use ledger::{resource_ledger, ResourceLedger};

use std::f64::consts::FRAC_PI_2;

use crate::error::{domain, shape, Error, Result};
use crate::lindblad::{require_admissible, LindbladModel};
use crate::matcore::{kraus_to_superop, CMat, SuperOp, C64};

/// Default unitarity tolerance for gadget constituents.
pub const UNITARY_TOL: f64 = 1e-10;

/// The jump gadget `[−W(I − 2P₁)W†(I − 2P₀)]^t W` and its ingredients.
#[derive(Clone, Debug)]
pub struct JumpGadget {
    pub prep_oracle: CMat,
    pub select_unitary: CMat,
    pub w_circuit: CMat,
    /// Amplification iterate `−W(I − 2P₁)W†(I − 2P₀)`.
    pub iterate: CMat,
    /// Full circuit `iterate^t · W`.
    pub circuit: CMat,
    pub layout: RegisterLayout,
    pub alphas: Vec<f64>,
    pub gamma: f64,
    /// `Γ/Σα²` before padding.
    pub p0_raw: f64,
    /// Single-shot success probability after padding, `sin²θ`.
    pub p0: f64,
    pub theta: f64,
    pub iterations: usize,
    pub padded_weight: f64,
}

/// Smallest `t` with `(2t+1)θ ≥ π/2`, with a little slack so that exactly
/// commensurate angles are not pushed to the next integer by round-off.
fn iterations_for(theta: f64) -> usize {
    let mut t = 0usize;
    while (2 * t + 1) as f64 * theta < FRAC_PI_2 - 1e-12 {
        t += 1;
    }
    t
}

/// `I − 2P` for a projector diagonal in the computational basis.
fn reflect_columns(m: &CMat, in_p: impl Fn(usize) -> bool) -> CMat {
    let mut out = m.clone();
    for c in (0..m.cols()).filter(|&c| in_p(c)) {
        for r in 0..m.rows() {
            out[(r, c)] = -out[(r, c)];
        }
    }
    out
}

/// `−W(I − 2P₁)W†(I − 2P₀)` with `P₁` the input subspace `|0⟩_idx|0⟩_anc ⊗ I`
/// and `P₀ = I ⊗ |0⟩⟨0|_anc ⊗ I`.
///
/// `W` here already contains `B`, so reflecting about the input subspace
/// and conjugating by `W` equals reflecting about `B|0⟩` inside the select
/// circuit.
pub fn amplification_iterate(w: &CMat, layout: &RegisterLayout) -> CMat {
    let w_r1 = reflect_columns(w, |c| layout.is_input(c));
    let wd_r0 = reflect_columns(&w.dagger(), |c| layout.flag_clear(c));
    -&(&w_r1 * &wd_r0)
}

fn check_unitary(name: &str, m: &CMat, tol: f64) -> Result<()> {
    let res = m.unitarity_residual();
    if res > tol {
        return Err(Error::Numerical(format!("{name} unitarity residual {res:.3e} exceeds {tol:.1e}")));
    }
    Ok(())
}

/// Builds the amplified jump gadget for an admissible model.
///
/// `alphas[μ]` must be at least `‖L_μ‖`. The preparation oracle receives a
/// dummy branch of weight `w` so that `Γ/(Σα² + w) = sin²(π/(2(2t+1)))`,
/// which makes `t` rounds of amplification exact.
pub fn build_jump_gadget(model: &LindbladModel, alphas: &[f64], tolerance: f64) -> Result<JumpGadget> {
    let gamma = require_admissible(model)?;
    if model.jump_count() == 0 || gamma <= 0.0 {
        return Err(domain("jump gadget needs at least one jump operator and Γ > 0"));
    }
    if alphas.len() != model.jump_count() {
        return Err(shape(format!("{} scales given for {} jumps", alphas.len(), model.jump_count())));
    }
    let encodings = model
        .jumps()
        .iter()
        .zip(alphas)
        .map(|(l, &a)| build_block_encoding(l, a))
        .collect::<Result<Vec<_>>>()?;

    let sum_sq: f64 = alphas.iter().map(|a| a * a).sum();
    let p0_raw = (gamma / sum_sq).min(1.0);
    let iterations = iterations_for(p0_raw.sqrt().asin());
    let theta = FRAC_PI_2 / (2 * iterations + 1) as f64;
    let p0 = theta.sin().powi(2);
    let mut padded_weight = gamma / p0 - sum_sq;
    if padded_weight.abs() <= 1e-12 * sum_sq {
        padded_weight = 0.0;
    }
    if padded_weight < 0.0 {
        return Err(Error::Numerical(format!("negative padding weight {padded_weight:.3e}")));
    }

    let prep = build_prep_oracle(alphas, padded_weight)?;
    let (select, layout) = build_select(&encodings, prep.rows())?;
    let w = &select * &prep.kron(&CMat::identity(layout.ancilla_dim * layout.system_dim));
    let iterate = amplification_iterate(&w, &layout);
    let mut circuit = w.clone();
    for _ in 0..iterations {
        circuit = &iterate * &circuit;
    }

    for (name, m) in [("B", &prep), ("SELECT", &select), ("W", &w), ("iterate", &iterate), ("circuit", &circuit)] {
        check_unitary(name, m, tolerance)?;
    }
    Ok(JumpGadget {
        prep_oracle: prep,
        select_unitary: select,
        w_circuit: w,
        iterate,
        circuit,
        layout,
        alphas: alphas.to_vec(),
        gamma,
        p0_raw,
        p0,
        theta,
        iterations,
        padded_weight,
    })
}

impl JumpGadget {
    /// Kraus blocks `⟨k|_idx ⟨0|_anc · circuit · |0⟩_idx |0⟩_anc` on the system.
    pub fn kraus(&self) -> Vec<CMat> {
        kraus_blocks(&self.circuit, &self.layout)
    }

    /// System channel conditioned on the flag-clear outcome (not
    /// renormalized; trace preserving exactly when amplification succeeds).
    pub fn channel(&self) -> SuperOp {
        kraus_to_superop(&self.kraus()).expect("index register is nonempty")
    }

    /// Signed success amplitude after `j = 0..=t` iterates on input `ψ`,
    /// measured along the flag-clear direction reached by `W`.
    pub fn amplitudes(&self, psi: &[C64]) -> Result<Vec<f64>> {
        amplification_amplitudes(&self.w_circuit, &self.iterate, &self.layout, self.iterations, psi)
    }

    /// Largest unitarity residual among B, SELECT, W, the iterate, and the
    /// full circuit.
    pub fn max_unitarity_residual(&self) -> f64 {
        [&self.prep_oracle, &self.select_unitary, &self.w_circuit, &self.iterate, &self.circuit]
            .iter()
            .map(|m| m.unitarity_residual())
            .fold(0.0, f64::max)
    }
}

/// Kraus blocks of any circuit on the given layout, post-selected on the
/// flag-clear outcome and summed over the index register.
pub fn kraus_blocks(circuit: &CMat, layout: &RegisterLayout) -> Vec<CMat> {
    let d = layout.system_dim;
    (0..layout.index_dim).map(|k| circuit.block(layout.flat(k, 0, 0), 0, d, d)).collect()
}

/// Signed amplitudes `⟨good|G^j W|in⟩` for `j = 0..=t`, where `good` is the
/// normalized flag-clear component of `W|in⟩`.
pub fn amplification_amplitudes(
    w: &CMat,
    iterate: &CMat,
    layout: &RegisterLayout,
    t: usize,
    psi: &[C64],
) -> Result<Vec<f64>> {
    let d = layout.system_dim;
    if psi.len() != d {
        return Err(shape(format!("input state must have length {d}")));
    }
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(crate::error::invalid("input state is not normalized"));
    }
    let mut input = vec![C64::new(0.0, 0.0); layout.total()];
    input[..d].copy_from_slice(psi);
    let mut state = w.matvec(&input);
    let mut good: Vec<C64> =
        state.iter().enumerate().map(|(i, &z)| if layout.flag_clear(i) { z } else { C64::new(0.0, 0.0) }).collect();
    let gn: f64 = good.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if gn == 0.0 {
        return Err(domain("W has no flag-clear component on this input"));
    }
    good.iter_mut().for_each(|z| *z /= gn);

    let mut out = Vec::with_capacity(t + 1);
    for j in 0..=t {
        if j > 0 {
            state = iterate.matvec(&state);
        }
        let overlap: C64 = good.iter().zip(&state).map(|(g, s)| g.conj() * s).sum();
        out.push(overlap.re);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{choi_distance, paulis::*};

    fn jump_channel(model: &LindbladModel, gamma: f64) -> SuperOp {
        let k: Vec<CMat> = model.jumps().iter().map(|l| l.scale_real(1.0 / gamma.sqrt())).collect();
        kraus_to_superop(&k).unwrap()
    }

    #[test]
    fn unit_probability_needs_no_amplification() {
        let g: f64 = 0.7;
        let m = LindbladModel::new(CMat::zeros(2, 2), vec![z().scale_real(g.sqrt())]).unwrap();
        let gadget = build_jump_gadget(&m, &[g.sqrt()], UNITARY_TOL).unwrap();
        assert_eq!(gadget.iterations, 0);
        assert!((gadget.p0 - 1.0).abs() < 1e-12);
        assert_eq!(gadget.padded_weight, 0.0);
        assert!(choi_distance(&gadget.channel(), &SuperOp::unitary(&z()).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn dephasing_pair_snaps_to_one_iteration() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = LindbladModel::new(CMat::zeros(2, 2), vec![CMat::identity(2).scale_real(h), z().scale_real(h)])
            .unwrap();
        let gadget = build_jump_gadget(&m, &[1.0, 1.0], UNITARY_TOL).unwrap();
        assert!((gadget.p0_raw - 0.5).abs() < 1e-15);
        assert!((gadget.p0 - 0.25).abs() < 1e-12);
        assert_eq!(gadget.iterations, 1);
        assert!((gadget.padded_weight - 2.0).abs() < 1e-12);
        assert!(choi_distance(&gadget.channel(), &jump_channel(&m, 1.0)).unwrap() < 1e-9);
        assert!(gadget.channel().trace_preservation_residual() < 1e-9);
    }

    #[test]
    fn iteration_count_boundaries() {
        assert_eq!(iterations_for(FRAC_PI_2), 0);
        assert_eq!(iterations_for(std::f64::consts::FRAC_PI_6), 1);
        assert_eq!(iterations_for(std::f64::consts::FRAC_PI_6 - 1e-6), 2);
        assert_eq!(iterations_for(FRAC_PI_2 / 7.0), 3);
    }

    #[test]
    fn amplitudes_follow_rotation_law() {
        let m = LindbladModel::new(CMat::zeros(2, 2), vec![x(), y(), z()]).unwrap();
        let gadget = build_jump_gadget(&m, &[1.0, 1.0, 1.0], UNITARY_TOL).unwrap();
        let psi = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let amps = gadget.amplitudes(&psi).unwrap();
        assert_eq!(amps.len(), gadget.iterations + 1);
        for (j, a) in amps.iter().enumerate() {
            assert!((a - ((2 * j + 1) as f64 * gadget.theta).sin()).abs() < 1e-10, "j={j}: {a}");
        }
        assert!((amps.last().unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mismatched_scale_count_is_a_shape_error() {
        let m = LindbladModel::new(CMat::zeros(2, 2), vec![z()]).unwrap();
        assert!(matches!(build_jump_gadget(&m, &[1.0, 1.0], UNITARY_TOL), Err(Error::Shape(_))));
        assert!(matches!(build_jump_gadget(&m, &[0.5], UNITARY_TOL), Err(Error::Domain(_))));
    }

    #[test]
    fn non_admissible_model_is_refused() {
        let m = LindbladModel::new(CMat::zeros(2, 2), vec![lowering()]).unwrap();
        assert!(matches!(build_jump_gadget(&m, &[1.0], UNITARY_TOL), Err(Error::ConstraintViolation(_))));
    }
}
