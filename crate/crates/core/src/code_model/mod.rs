//! Deterministic two-hop codes given by lookup tables, their exact induced
//! laws and error probabilities, and Monte Carlo estimates.

mod code;
mod exact;
mod mc;
mod profile;
pub mod seq;

pub use code::{TwoHopCode, H0, H1};
pub use exact::{
    errors_from_laws, exact_errors, h0_m1y, induced_laws, m1_marginal, route_m2y, sizes, InducedLaw, Table, EXACT_BUDGET,
};
pub use mc::mc_errors;
pub use profile::{profiles_csv, weighted_lhs, wilson, CsvRow, ErrorProfile, Mode, Z95};
