//! Dense complex linear algebra and channel representations.

mod channel;
mod cmat;
mod decomp;

pub use channel::{
    choi_distance, choi_to_superop, cptp_residuals, diamond_distance_bounds, kraus_to_superop, partial_trace,
    superop_to_choi, unvec_col, vec_col, ChoiMat, DiamondBounds, Keep, SuperOp,
};
pub use cmat::{paulis, CMat, C64, I, ONE, ZERO};
pub use decomp::{eigh, expm, min_eigenvalue, op_norm, psd_sqrt, rank, singular_values, solve, spectral_apply, svd, trace_norm};

/// Default absolute tolerance for numerical comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;
