//! Finite-alphabet probability calculus: pmfs, kernels, divergences and
//! mutual informations, all in nats with 0·log 0 = 0.

mod info;
mod pmf;
mod source;
pub mod tensor;

pub use info::{binary_divergence, conditional_mutual_information, entropy, kl_divergence, mutual_information};
pub use pmf::{default_labels, Axis, FinitePmf, JointPmf, Kernel, SUM_TOL};
pub use source::{source_constants, tau, SourceConstants, SourceSpec, TwoHopSource};
