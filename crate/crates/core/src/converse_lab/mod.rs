//! Executes each explicit step of the strong-converse argument on a concrete
//! code and records every inequality in a margin ledger.
//!
//! Entries whose constants rely on the typicality mass premise carry
//! status `premise-failed` when that premise fails at the given n; each has
//! a `_free` twin with 1/P(C_n) in place of 2/(1−ε1−ε2), checked always.

mod gap;
mod laws;
mod multiletter;
mod receiver;
mod relay;
mod semigroup;
mod sets;
mod truncation;

pub use gap::{judge_gap, r_gamma_hat, GapReport, GapStatus, GAP_TOL};
pub use laws::{chain_laws, ChainLaws};
pub use multiletter::{MultiLetter, MultiLetterTerms};
pub use receiver::ReceiverTerms;
pub use semigroup::{choose_t, rhc_instance, semigroup_apply, Semigroup};
pub use sets::{acceptance_sets, AcceptanceSets, SourcePowers};
pub use truncation::{build_truncation, build_truncation_with, type1_errors, typical_set, TruncationArtifacts, TYPE1_TOL};

use crate::code_model::{ErrorProfile, TwoHopCode};
use crate::error::Result;
use crate::ledger::Ledger;
use crate::prob::TwoHopSource;
use crate::single_letter::{SolverConfig, TradeoffWeights};
use serde::Serialize;

fn truncated_dy_mass(art: &TruncationArtifacts, sets: &AcceptanceSets) -> f64 {
    art.trunc_xy.iter().zip(&sets.d_y).filter(|(_, d)| **d).map(|(p, _)| p).sum()
}

fn context(code: &TwoHopCode, s: &TwoHopSource, art: &TruncationArtifacts) -> Result<(SourcePowers, AcceptanceSets, ChainLaws)> {
    let pw = SourcePowers::new(s, art.n)?;
    let sets = acceptance_sets(code, &pw)?;
    let laws = chain_laws(code, &pw, &sets, art);
    Ok((pw, sets, laws))
}

pub fn relay_chain(code: &TwoHopCode, s: &TwoHopSource, art: &TruncationArtifacts) -> Result<Ledger> {
    let (pw, sets, laws) = context(code, s, art)?;
    Ok(relay::relay_entries(&laws, art, truncated_dy_mass(art, &sets), &pw.py))
}

pub fn receiver_chain(code: &TwoHopCode, s: &TwoHopSource, art: &TruncationArtifacts) -> Result<(Ledger, ReceiverTerms)> {
    let (pw, sets, laws) = context(code, s, art)?;
    receiver::receiver_entries(s, &pw, &sets, &laws, art)
}

pub fn multiletter_r(code: &TwoHopCode, s: &TwoHopSource, art: &TruncationArtifacts, w: &TradeoffWeights, gamma: f64) -> Result<MultiLetter> {
    let (pw, sets, laws) = context(code, s, art)?;
    let (_, rt) = receiver::receiver_entries(s, &pw, &sets, &laws, art)?;
    Ok(multiletter::multiletter_entries(code, &pw, &laws, art, &rt, w, gamma))
}

/// R^(n) − n·R̂ with R̂ from the band-constrained solver at θ_n.
pub fn single_letter_gap(
    code: &TwoHopCode,
    s: &TwoHopSource,
    art: &TruncationArtifacts,
    w: &TradeoffWeights,
    gamma: f64,
    cfg: &SolverConfig,
) -> Result<GapReport> {
    let r_n = multiletter_r(code, s, art, w, gamma)?.value;
    let r_hat = r_gamma_hat(s, art.n, art.eps1, art.eps2, w, gamma, cfg)?;
    Ok(judge_gap(r_n, r_hat, art.n))
}

/// Everything the chain computes for one code at one γ.
#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub n: usize,
    pub gamma: f64,
    pub profile: ErrorProfile,
    pub truncation: TruncationArtifacts,
    pub t: f64,
    pub psi: f64,
    pub alpha_one: bool,
    pub r_n: f64,
    pub terms: MultiLetterTerms,
    pub ledger: Ledger,
}

pub fn verify_code(code: &TwoHopCode, s: &TwoHopSource, eps1: f64, eps2: f64, w: &TradeoffWeights, gamma: f64) -> Result<Verification> {
    let pw = SourcePowers::new(s, code.n)?;
    verify_with(code, s, &pw, eps1, eps2, w, gamma)
}

/// As [`verify_code`] with precomputed source powers.
pub fn verify_with(
    code: &TwoHopCode,
    s: &TwoHopSource,
    pw: &SourcePowers,
    eps1: f64,
    eps2: f64,
    w: &TradeoffWeights,
    gamma: f64,
) -> Result<Verification> {
    let sets = acceptance_sets(code, pw)?;
    let art = build_truncation_with(code, s, pw, &sets, eps1, eps2)?;
    let laws = chain_laws(code, pw, &sets, &art);
    let mut ledger = art.ledger.clone();
    ledger.extend(relay::relay_entries(&laws, &art, truncated_dy_mass(&art, &sets), &pw.py));
    let (rl, rt) = receiver::receiver_entries(s, pw, &sets, &laws, &art)?;
    ledger.extend(rl);
    let ml = multiletter::multiletter_entries(code, pw, &laws, &art, &rt, w, gamma);
    ledger.extend(ml.ledger);
    let profile = ErrorProfile::exact(art.beta1, laws.beta2, art.eta1, laws.eta2);
    Ok(Verification {
        n: code.n,
        gamma,
        profile,
        truncation: art,
        t: rt.t,
        psi: rt.psi,
        alpha_one: rt.alpha_one,
        r_n: ml.value,
        terms: ml.terms,
        ledger,
    })
}
