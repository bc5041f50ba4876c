//! Classical simulation and verification of trajectory-based Lindbladian
//! simulation for the class of generators whose jump operators satisfy
//! `Σ L†L = Γ I`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gadgets;
pub mod lindblad;
pub mod matcore;
pub mod oracle;
pub mod trajectory;

pub use error::{Error, Result};
