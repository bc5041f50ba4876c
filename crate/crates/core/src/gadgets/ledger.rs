//! Query and gate counts with every hidden constant set to one. These are
//! the arguments of the asymptotic cost expressions, not calibrated counts.

use serde::Serialize;

use crate::error::{domain, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResourceLedger {
    pub jump_queries: f64,
    pub hamiltonian_queries: f64,
    pub gate_count: f64,
    pub ancilla_count: u32,
}

/// `x + L/ln(e + L/x)`, the shape shared by both query counts.
fn additive_log_term(l: f64, x: f64) -> f64 {
    l / (std::f64::consts::E + l / x).ln()
}

/// Resource ledger for simulating time `T` to accuracy `ε`.
///
/// * jump queries `√(Σα²/Γ)·(ΓT + ln(1/ε)/ln(e + ln(1/ε)/(ΓT)))`
/// * Hamiltonian queries `x·[ln(x/ε)/ln(e + ln(x/ε)/x)]²` with `x = (α_H + Γ)T`
/// * gates `(log₂m + a)·√(Σα²/Γ)·(Hamiltonian queries)`
/// * ancillas `⌈log₂m⌉ + a`
///
/// With no jumps the jump count is zero and the `√(Σα²/Γ)` gate factor is 1.
pub fn resource_ledger(
    gamma: f64,
    total_time: f64,
    epsilon: f64,
    alpha_h: f64,
    alphas: &[f64],
    ancilla_qubits: u32,
) -> Result<ResourceLedger> {
    if !(total_time > 0.0) || !total_time.is_finite() {
        return Err(domain(format!("T must be positive, got {total_time}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(domain(format!("ε must lie in (0, 1), got {epsilon}")));
    }
    if !(alpha_h >= 0.0) || !alpha_h.is_finite() || !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(domain("Γ and α_H must be finite and nonnegative"));
    }
    if alphas.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
        return Err(domain("block-encoding scales must be positive"));
    }
    let m = alphas.len();
    if m > 0 && gamma <= 0.0 {
        return Err(domain("jumps present but Γ = 0"));
    }

    let (jump_queries, amp_factor) = if m == 0 {
        (0.0, 1.0)
    } else {
        let s = (alphas.iter().map(|a| a * a).sum::<f64>() / gamma).sqrt();
        let x = gamma * total_time;
        (s * (x + additive_log_term((1.0 / epsilon).ln(), x)), s)
    };

    let x = (alpha_h + gamma) * total_time;
    let hamiltonian_queries = if x > 0.0 {
        let l = (x / epsilon).ln();
        x * additive_log_term(l, x).powi(2)
    } else {
        0.0
    };

    let log_m = if m > 1 { (m as f64).log2() } else { 0.0 };
    let index_qubits = if m > 1 { (m as f64).log2().ceil() as u32 } else { 0 };
    Ok(ResourceLedger {
        jump_queries,
        hamiltonian_queries,
        gate_count: (log_m + ancilla_qubits as f64) * amp_factor * hamiltonian_queries,
        ancilla_count: index_qubits + ancilla_qubits,
    })
}
