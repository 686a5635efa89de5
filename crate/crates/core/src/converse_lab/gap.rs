//! Comparison of R^(n) with n times the numeric single-letter minimum.

use crate::error::Result;
use crate::prob::{source_constants, TwoHopSource};
use crate::single_letter::{solve_r_gamma, CardBounds, SolverConfig, TradeoffWeights};
use serde::Serialize;

/// Negative gaps above this are solver noise, not counterexamples.
pub const GAP_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapStatus {
    Pass,
    Inconclusive,
    Fail,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapReport {
    pub r_n: f64,
    /// Best numeric value of the band-constrained single-letter objective.
    pub r_hat: f64,
    pub n: usize,
    pub gap: f64,
    pub status: GapStatus,
}

pub fn judge_gap(r_n: f64, r_hat: f64, n: usize) -> GapReport {
    let gap = r_n - n as f64 * r_hat;
    let status = if gap >= 0.0 {
        GapStatus::Pass
    } else if gap >= -GAP_TOL {
        GapStatus::Inconclusive
    } else {
        GapStatus::Fail
    };
    GapReport { r_n, r_hat, n, gap, status }
}

/// Numeric R_{b,c,d,γ} at the band width θ_n.
pub fn r_gamma_hat(s: &TwoHopSource, n: usize, eps1: f64, eps2: f64, w: &TradeoffWeights, gamma: f64, cfg: &SolverConfig) -> Result<f64> {
    let k = source_constants(s, n, eps1, eps2)?;
    Ok(solve_r_gamma(s, w, gamma, k.theta_n, CardBounds::for_gamma(s), cfg)?.value)
}
