//! Executable forms of the structural facts about the admissible class:
//! the `−i ad_H + Γ(R − 𝓘)` decomposition, closure under tracing out an
//! ancilla prepared in a fixed state, the `Φ_t` decomposition of the
//! dissipative propagator, and extremality of channels.

use super::{hamiltonian_generator, liouvillian, require_admissible, LindbladModel};
use crate::error::{domain, invalid, shape, Result};
use crate::matcore::{
    expm, kraus_to_superop, min_eigenvalue, partial_trace, psd_sqrt, rank, vec_col, CMat, Keep, SuperOp, C64,
};

/// `𝓛 = −i ad_H + Γ(R − 𝓘)` with `R` given by its Kraus operators.
#[derive(Clone, Debug)]
pub struct ChannelForm {
    pub gamma: f64,
    pub kraus: Vec<CMat>,
}

impl ChannelForm {
    /// The channel `R`; `None` when there are no jumps.
    pub fn channel(&self) -> Option<SuperOp> {
        kraus_to_superop(&self.kraus).ok()
    }

    /// Rebuilds the generator from `H` and this form.
    pub fn generator(&self, hamiltonian: &CMat) -> SuperOp {
        let d = hamiltonian.rows();
        let ham = hamiltonian_generator(hamiltonian);
        match self.channel() {
            Some(r) => {
                let dissipator = r.sub(&SuperOp::identity(d)).expect("same dim").scale(self.gamma);
                ham.add(&dissipator).expect("same dim")
            }
            None => ham,
        }
    }
}

/// Splits an admissible model into Γ and the jump channel `R` with Kraus
/// operators `L_μ/√Γ`.
pub fn decompose_channel_form(model: &LindbladModel) -> Result<ChannelForm> {
    let gamma = require_admissible(model)?;
    if model.jumps().is_empty() || gamma == 0.0 {
        return Ok(ChannelForm { gamma: 0.0, kraus: Vec::new() });
    }
    let s = 1.0 / gamma.sqrt();
    Ok(ChannelForm { gamma, kraus: model.jumps().iter().map(|l| l.scale_real(s)).collect() })
}

fn check_density(omega: &CMat) -> Result<()> {
    if !omega.is_square() {
        return Err(invalid("ancilla state must be square"));
    }
    if !omega.is_hermitian(1e-10) {
        return Err(invalid("ancilla state is not Hermitian"));
    }
    let tr = omega.trace();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(invalid(format!("ancilla state has trace {tr}, expected 1")));
    }
    if min_eigenvalue(omega)? < -1e-10 {
        return Err(invalid("ancilla state is not positive semidefinite"));
    }
    Ok(())
}

/// Generator on `S` obtained from an admissible `𝓚` on `A ⊗ S` via
/// `ρ ↦ Tr_A[𝓚(ω_A ⊗ ρ)]`.
///
/// The Hamiltonian is `Tr_A[(ω_A ⊗ I) H]` and the jumps are
/// `(⟨j| ⊗ I) L_μ (√ω_A|k⟩ ⊗ I)`, so the jump sum is again `Γ I` with the
/// same Γ.
pub fn induced_subsystem_generator(model: &LindbladModel, omega: &CMat) -> Result<LindbladModel> {
    require_admissible(model)?;
    check_density(omega)?;
    let da = omega.rows();
    if !model.dim().is_multiple_of(da) {
        return Err(shape(format!("ancilla dim {da} does not divide model dim {}", model.dim())));
    }
    let ds = model.dim() / da;

    let lifted = omega.kron(&CMat::identity(ds));
    let h_s = partial_trace(&(&lifted * model.hamiltonian()), (da, ds), Keep::Second)?;

    let root = psd_sqrt(omega, 1e-10)?;
    let mut jumps = Vec::new();
    for l in model.jumps() {
        for j in 0..da {
            for k in 0..da {
                let mut op = CMat::zeros(ds, ds);
                for i in 0..da {
                    if root[(i, k)] != C64::new(0.0, 0.0) {
                        op.add_scaled(&l.block(j * ds, i * ds, ds, ds), root[(i, k)]);
                    }
                }
                if op.frobenius_norm() > 1e-14 {
                    jumps.push(op);
                }
            }
        }
    }
    LindbladModel::new(h_s, jumps)
}

/// `Φ_t = (e^{t𝓓} − e^{−tΓ} 𝓘)/(1 − e^{−tΓ})` for a purely dissipative
/// admissible generator `𝓓`.
pub fn extract_phi(model: &LindbladModel, t: f64) -> Result<SuperOp> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain(format!("time must be positive, got {t}")));
    }
    let gamma = require_admissible(model)?;
    if gamma <= 0.0 {
        return Err(domain("Γ = 0 leaves Φ_t undefined"));
    }
    if model.hamiltonian().max_abs() > 1e-12 {
        return Err(invalid("extract_phi expects a purely dissipative generator (H = 0)"));
    }
    let d = model.dim();
    let prop = expm(&liouvillian(model).matrix().scale_real(t))?;
    let decay = (-t * gamma).exp();
    let mut num = prop;
    num.add_scaled(&CMat::identity(d * d), C64::new(-decay, 0.0));
    let denom = -(-t * gamma).exp_m1();
    SuperOp::new(d, num.scale_real(1.0 / denom))
}

/// Whether the channel with these Kraus operators is an extreme point of
/// the convex set of channels, i.e. `{K_μ† K_ν}` is linearly independent.
pub fn is_extreme_channel(kraus: &[CMat]) -> Result<bool> {
    let first = kraus.first().ok_or_else(|| invalid("empty Kraus set"))?;
    let d = first.rows();
    if kraus.iter().any(|k| k.rows() != d || k.cols() != d) {
        return Err(shape("Kraus operators must be square with a common dimension"));
    }
    let mut completeness = CMat::zeros(d, d);
    for k in kraus {
        completeness.add_scaled(&(&k.dagger() * k), C64::new(1.0, 0.0));
    }
    if completeness.max_abs_diff(&CMat::identity(d)) > 1e-8 {
        return Err(invalid("Kraus set is not trace preserving"));
    }
    let m = kraus.len();
    if m * m > d * d {
        return Ok(false);
    }
    let mut gram = CMat::zeros(d * d, m * m);
    for (a, ka) in kraus.iter().enumerate() {
        let kad = ka.dagger();
        for (b, kb) in kraus.iter().enumerate() {
            for (r, v) in vec_col(&(&kad * kb)).into_iter().enumerate() {
                gram[(r, a * m + b)] = v;
            }
        }
    }
    Ok(rank(&gram, 1e-8)? == m * m)
}
