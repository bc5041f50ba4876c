//! Lindbladian models, the `Σ L†L = Γ I` admissibility constraint, and the
//! representation freedoms that leave the generator unchanged.

mod characterize;
mod io;

pub use characterize::{
    decompose_channel_form, extract_phi, induced_subsystem_generator, is_extreme_channel, ChannelForm,
};
pub use io::{model_from_json, model_to_json, ModelFile};

use crate::error::{domain, invalid, shape, Error, Result};
use crate::matcore::{expm, op_norm, CMat, SuperOp, C64, I, ONE};

/// Tolerance on `‖H − H†‖` accepted when constructing a model.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Default operator-norm tolerance for `‖Σ L†L − Γ I‖`.
pub const ADMISSIBILITY_TOL: f64 = 1e-8;

/// A time-independent Lindbladian: Hamiltonian plus jump operators.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladModel {
    dim: usize,
    hamiltonian: CMat,
    jumps: Vec<CMat>,
}

impl LindbladModel {
    /// Validates shapes and Hermiticity. The stored Hamiltonian is the exact
    /// Hermitian part of the input.
    pub fn new(hamiltonian: CMat, jumps: Vec<CMat>) -> Result<Self> {
        if !hamiltonian.is_square() || hamiltonian.rows() == 0 {
            return Err(shape("Hamiltonian must be a non-empty square matrix"));
        }
        if !hamiltonian.is_finite() || jumps.iter().any(|l| !l.is_finite()) {
            return Err(invalid("model has non-finite entries"));
        }
        let dim = hamiltonian.rows();
        let residual = hamiltonian.hermiticity_residual();
        if residual > HERMITIAN_TOL {
            return Err(invalid(format!("Hamiltonian is not Hermitian (‖H − H†‖max = {residual:e})")));
        }
        for (mu, l) in jumps.iter().enumerate() {
            if l.rows() != dim || l.cols() != dim {
                return Err(shape(format!(
                    "jump {mu} is {}x{}, expected {dim}x{dim}",
                    l.rows(),
                    l.cols()
                )));
            }
        }
        let hamiltonian = (&hamiltonian + &hamiltonian.dagger()).scale_real(0.5);
        Ok(Self { dim, hamiltonian, jumps })
    }

    /// Pure Hamiltonian dynamics.
    pub fn hamiltonian_only(hamiltonian: CMat) -> Result<Self> {
        Self::new(hamiltonian, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[CMat] {
        &self.jumps
    }

    pub fn jump_count(&self) -> usize {
        self.jumps.len()
    }

    /// Number of qubits when the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<u32> {
        self.dim.is_power_of_two().then(|| self.dim.trailing_zeros())
    }

    /// `Σ_μ L_μ† L_μ`.
    pub fn jump_sum(&self) -> CMat {
        let mut acc = CMat::zeros(self.dim, self.dim);
        for l in &self.jumps {
            acc.add_scaled(&(&l.dagger() * l), ONE);
        }
        acc
    }

    /// Operator norms of the jumps, the natural block-encoding scales.
    pub fn jump_norms(&self) -> Result<Vec<f64>> {
        self.jumps.iter().map(op_norm).collect()
    }
}

/// Result of testing `Σ L†L = Γ I`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ConstraintReport {
    /// Least-squares multiple of the identity, `Tr(Σ L†L)/dim`.
    pub gamma: f64,
    /// `‖Σ L†L − Γ I‖` in operator norm.
    pub residual: f64,
    pub admissible: bool,
}

pub fn check_constraint(model: &LindbladModel, tol: f64) -> ConstraintReport {
    if model.jumps.is_empty() {
        return ConstraintReport { gamma: 0.0, residual: 0.0, admissible: true };
    }
    let sum = model.jump_sum();
    let gamma = sum.trace().re / model.dim as f64;
    let diff = &sum - &CMat::identity(model.dim).scale_real(gamma);
    let residual = op_norm(&diff).expect("finite model yields finite jump sum");
    ConstraintReport { gamma, residual, admissible: residual <= tol }
}

/// Checks admissibility at [`ADMISSIBILITY_TOL`] and returns Γ.
pub fn require_admissible(model: &LindbladModel) -> Result<f64> {
    let report = check_constraint(model, ADMISSIBILITY_TOL);
    if !report.admissible {
        return Err(Error::ConstraintViolation(format!(
            "Σ L†L is not a multiple of the identity (residual {:e}, Γ = {})",
            report.residual, report.gamma
        )));
    }
    Ok(report.gamma)
}

/// Superoperator of `ρ ↦ −i[H, ρ]`.
pub fn hamiltonian_generator(h: &CMat) -> SuperOp {
    let d = h.rows();
    let id = CMat::identity(d);
    let comm = &id.kron(h) - &h.transpose().kron(&id);
    SuperOp::new(d, comm.scale(-I)).expect("kron of d×d factors is d²×d²")
}

/// Superoperator of `ρ ↦ −i[H, ρ] + Σ (LρL† − ½{L†L, ρ})`.
pub fn liouvillian(model: &LindbladModel) -> SuperOp {
    let d = model.dim;
    let id = CMat::identity(d);
    let mut m = hamiltonian_generator(&model.hamiltonian).into_matrix();
    for l in &model.jumps {
        let ldl = &l.dagger() * l;
        m.add_scaled(&l.conj().kron(l), ONE);
        m.add_scaled(&id.kron(&ldl), C64::new(-0.5, 0.0));
        m.add_scaled(&ldl.transpose().kron(&id), C64::new(-0.5, 0.0));
    }
    SuperOp::new(d, m).expect("Liouvillian has d²×d² shape")
}

/// Non-Hermitian effective Hamiltonian `H − (i/2) Σ L†L`.
pub fn effective_hamiltonian(model: &LindbladModel) -> CMat {
    let mut h = model.hamiltonian.clone();
    h.add_scaled(&model.jump_sum(), C64::new(0.0, -0.5));
    h
}

/// No-jump propagator `e^{−iτĤ}`.
pub fn no_jump_propagator(model: &LindbladModel, tau: f64) -> Result<CMat> {
    expm(&effective_hamiltonian(model).scale(C64::new(0.0, -tau)))
}

/// Mixes the jumps by a unitary: `L'_μ = Σ_α u_{μα} L_α`.
pub fn unitary_mix(model: &LindbladModel, u: &CMat) -> Result<LindbladModel> {
    let m = model.jumps.len();
    if u.rows() != m || u.cols() != m {
        return Err(shape(format!("mixing matrix must be {m}x{m}")));
    }
    if u.unitarity_residual() > 1e-10 {
        return Err(invalid("mixing matrix is not unitary"));
    }
    let jumps = (0..m)
        .map(|mu| {
            let mut acc = CMat::zeros(model.dim, model.dim);
            for (alpha, l) in model.jumps.iter().enumerate() {
                acc.add_scaled(l, u[(mu, alpha)]);
            }
            acc
        })
        .collect();
    Ok(LindbladModel { dim: model.dim, hamiltonian: model.hamiltonian.clone(), jumps })
}

/// Shifts `L_μ → L_μ + a_μ I` and compensates in the Hamiltonian:
/// `H' = H + (1/2i) Σ (a_μ* L_μ − a_μ L_μ†) + b I`.
pub fn inhomogeneous_transform(model: &LindbladModel, a: &[C64], b: f64) -> Result<LindbladModel> {
    if a.len() != model.jumps.len() {
        return Err(shape(format!("expected {} shifts, got {}", model.jumps.len(), a.len())));
    }
    if !b.is_finite() || a.iter().any(|z| !z.is_finite()) {
        return Err(domain("transform parameters must be finite"));
    }
    let d = model.dim;
    let id = CMat::identity(d);
    let half_over_i = C64::new(0.0, -0.5);
    let mut h = model.hamiltonian.clone();
    h.add_scaled(&id, C64::new(b, 0.0));
    let mut jumps = Vec::with_capacity(a.len());
    for (l, &shift) in model.jumps.iter().zip(a) {
        h.add_scaled(l, half_over_i * shift.conj());
        h.add_scaled(&l.dagger(), -half_over_i * shift);
        let mut shifted = l.clone();
        shifted.add_scaled(&id, shift);
        jumps.push(shifted);
    }
    // The correction is Hermitian by construction; symmetrize away round-off.
    let h = (&h + &h.dagger()).scale_real(0.5);
    Ok(LindbladModel { dim: d, hamiltonian: h, jumps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::paulis::*;
    use crate::matcore::{vec_col, ZERO};

    fn dephasing(gamma: f64) -> LindbladModel {
        LindbladModel::new(CMat::zeros(2, 2), vec![z().scale_real(gamma.sqrt())]).unwrap()
    }

    #[test]
    fn constraint_dephasing() {
        let r = check_constraint(&dephasing(0.7), 1e-8);
        assert!((r.gamma - 0.7).abs() < 1e-15);
        assert!(r.residual < 1e-15);
        assert!(r.admissible);
    }

    #[test]
    fn constraint_amplitude_damping_rejected() {
        let m = LindbladModel::new(CMat::zeros(2, 2), vec![lowering()]).unwrap();
        let r = check_constraint(&m, 1e-8);
        assert!((r.gamma - 0.5).abs() < 1e-15);
        assert!((r.residual - 0.5).abs() < 1e-14);
        assert!(!r.admissible);
        assert!(matches!(require_admissible(&m), Err(Error::ConstraintViolation(_))));
    }

    #[test]
    fn constraint_depolarizing_triple() {
        let g: f64 = 0.4;
        let s = (g / 2.0).sqrt();
        let m = LindbladModel::new(CMat::zeros(2, 2), vec![x().scale_real(s), y().scale_real(s), z().scale_real(s)])
            .unwrap();
        let r = check_constraint(&m, 1e-8);
        assert!((r.gamma - 0.6).abs() < 1e-14);
        assert!(r.residual < 1e-14);
    }

    #[test]
    fn constraint_without_jumps() {
        let r = check_constraint(&LindbladModel::hamiltonian_only(x()).unwrap(), 1e-8);
        assert_eq!(r, ConstraintReport { gamma: 0.0, residual: 0.0, admissible: true });
    }

    #[test]
    fn model_rejects_bad_inputs() {
        let non_herm = CMat::unit(2, 0, 1);
        assert!(matches!(LindbladModel::new(non_herm, vec![]), Err(Error::InvalidInput(_))));
        assert!(matches!(LindbladModel::new(CMat::zeros(2, 2), vec![CMat::identity(3)]), Err(Error::Shape(_))));
    }

    #[test]
    fn zero_model_has_zero_liouvillian() {
        let m = LindbladModel::hamiltonian_only(CMat::zeros(2, 2)).unwrap();
        assert!(liouvillian(&m).matrix().max_abs() == 0.0);
    }

    #[test]
    fn dephasing_coherence_eigenvalue() {
        let l = liouvillian(&dephasing(0.5));
        let v = vec_col(&CMat::unit(2, 0, 1));
        let out = l.matrix().matvec(&v);
        for (o, i) in out.iter().zip(&v) {
            assert!((o - i * -1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn effective_hamiltonian_of_dephasing() {
        let h = effective_hamiltonian(&dephasing(0.3));
        assert!(h.max_abs_diff(&CMat::identity(2).scale(C64::new(0.0, -0.15))) < 1e-15);
    }

    #[test]
    fn amplitude_damping_ground_state_does_not_decay() {
        let m = LindbladModel::new(CMat::zeros(2, 2), vec![lowering()]).unwrap();
        for tau in [0.1, 1.0, 7.0] {
            let psi = no_jump_propagator(&m, tau).unwrap().matvec(&[ONE, ZERO]);
            let norm: f64 = psi.iter().map(C64::norm_sqr).sum();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn unitary_mix_identity_is_noop() {
        let m = LindbladModel::new(x(), vec![z(), x().scale_real(0.5)]).unwrap();
        assert_eq!(unitary_mix(&m, &CMat::identity(2)).unwrap(), m);
        assert!(unitary_mix(&m, &CMat::identity(2).scale_real(2.0)).is_err());
        assert!(unitary_mix(&m, &CMat::identity(3)).is_err());
    }

    #[test]
    fn inhomogeneous_transform_identity_and_shape() {
        let m = dephasing(0.5);
        let t = inhomogeneous_transform(&m, &[ZERO], 0.0).unwrap();
        assert!(t.hamiltonian().max_abs_diff(m.hamiltonian()) < 1e-15);
        assert!(t.jumps()[0].max_abs_diff(&m.jumps()[0]) < 1e-15);
        assert!(matches!(inhomogeneous_transform(&m, &[], 0.0), Err(Error::Shape(_))));
    }

    #[test]
    fn dephasing_shift_preserves_liouvillian() {
        let m = dephasing(0.5);
        let t = inhomogeneous_transform(&m, &[C64::new(0.0, 0.5)], 0.0).unwrap();
        assert!(liouvillian(&t).max_abs_diff(&liouvillian(&m)) < 1e-12);
    }
}
