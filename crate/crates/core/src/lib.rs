//! Two-hop hypothesis testing against independence.
//!
//! A transmitter observing `X^n` sends an index to a relay observing `Y^n`,
//! which decides and forwards an index to a receiver observing `Z^n`. The
//! crate computes the single-letter rate-exponent trade-offs, evaluates
//! concrete codes exactly or by simulation, builds achievability codes, and
//! checks each explicit inequality of the strong-converse argument on small
//! instances.

pub mod code_model;
pub mod converse_lab;
pub mod error;
pub mod ledger;
pub mod oracle;
pub mod par;
pub mod prob;
pub mod sample;
pub mod schemes;
pub mod single_letter;

pub use error::{Error, Result};
