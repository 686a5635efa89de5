//! Exhaustive search over encoders with NP-optimal decoders, and the
//! converse audit of every feasible code found on the way.

use super::enumerate::{canonical_encoders, sample_encoders, EncoderPair};
use super::frontier::{best_under, cell_laws, lrt_candidates, lrt_frontier, test_errors, CellLaws, OracleSource};
use crate::code_model::{weighted_lhs, ErrorProfile, TwoHopCode, H0, H1};
use crate::converse_lab::{judge_gap, r_gamma_hat, verify_with, GapStatus, SourcePowers, TYPE1_TOL};
use crate::error::{Error, Result};
use crate::ledger::Status;
use crate::par;
use crate::prob::TwoHopSource;
use crate::single_letter::{SolverConfig, TradeoffWeights};
use rand::Rng;
use serde::Serialize;

/// Largest decoder table (in support cells) enumerated in full.
pub const FULL_DECODER_CELLS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditScope {
    /// No converse audit, only the best weighted objective.
    None,
    /// Every feasible decoder pair of every encoder pair.
    AllDecoders,
    /// Feasible threshold tests (all tie variants) plus `sample` random
    /// feasible decoders per side.
    Frontier { sample: usize },
}

#[derive(Debug, Clone)]
pub enum EncoderMode {
    Exhaustive,
    Sample { count: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub gammas: Vec<f64>,
    pub scope: AuditScope,
    pub encoders: EncoderMode,
    pub seed: u64,
    /// Solver settings for the single-letter gap; `None` skips it.
    pub gap_solver: Option<SolverConfig>,
}

impl SearchOptions {
    pub fn new(n: usize) -> Self {
        let mut gammas = vec![1.0];
        if n > 1 {
            gammas.push((n as f64).sqrt());
        }
        SearchOptions { gammas, scope: AuditScope::AllDecoders, encoders: EncoderMode::Exhaustive, seed: 0, gap_solver: None }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AuditSummary {
    /// codes examined, feasible or not
    pub codes_checked: u64,
    pub feasible: u64,
    /// feasible codes (per γ) with no failing entry
    pub passes: u64,
    pub failing_codes: u64,
    /// feasible codes the truncation refused (P(C_n) = 0)
    pub refused: u64,
    pub vacuous: u64,
    pub premise_failed: u64,
    pub fail_entries: u64,
    pub worst_margin: f64,
    pub worst_entry: Option<String>,
    pub gap_pass: u64,
    pub gap_inconclusive: u64,
    pub gap_fail: u64,
    pub min_gap: f64,
}

impl AuditSummary {
    fn merge(&mut self, o: AuditSummary) {
        self.codes_checked += o.codes_checked;
        self.feasible += o.feasible;
        self.passes += o.passes;
        self.failing_codes += o.failing_codes;
        self.refused += o.refused;
        self.vacuous += o.vacuous;
        self.premise_failed += o.premise_failed;
        self.fail_entries += o.fail_entries;
        if o.worst_margin < self.worst_margin {
            self.worst_margin = o.worst_margin;
            self.worst_entry = o.worst_entry;
        }
        self.gap_pass += o.gap_pass;
        self.gap_inconclusive += o.gap_inconclusive;
        self.gap_fail += o.gap_fail;
        self.min_gap = self.min_gap.min(o.min_gap);
    }

    fn empty() -> Self {
        AuditSummary { worst_margin: f64::INFINITY, min_gap: f64::INFINITY, ..Default::default() }
    }

    /// The JSON shape of the ledger summary.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "codes_checked": self.codes_checked,
            "feasible": self.feasible,
            "passes": self.passes,
            "vacuous": self.vacuous,
            "premise_failed": self.premise_failed,
            "failing_codes": self.failing_codes,
            "fail_entries": self.fail_entries,
            "refused": self.refused,
            "worst_margin": if self.worst_margin.is_finite() { Some(self.worst_margin) } else { None },
            "worst_entry": self.worst_entry,
            "gap_pass": self.gap_pass,
            "gap_inconclusive": self.gap_inconclusive,
            "gap_fail": self.gap_fail,
            "min_gap": if self.min_gap.is_finite() { Some(self.min_gap) } else { None },
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureRecord {
    pub code: TwoHopCode,
    pub gamma: f64,
    pub entries: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub n: usize,
    pub n1: usize,
    pub n2: usize,
    pub encoder_pairs: usize,
    /// min over encoders of log β2 + b log N1 + c log η2 + d log N2 with
    /// frontier decoders meeting the type-I budgets; +∞ if none is feasible
    pub best_weighted_lhs: f64,
    pub best_code: Option<TwoHopCode>,
    pub best_profile: Option<ErrorProfile>,
    pub summary: AuditSummary,
    pub failures: Vec<FailureRecord>,
    pub warnings: Vec<String>,
}

fn support(h0: &[f64], h1: &[f64]) -> Vec<usize> {
    (0..h0.len()).filter(|&i| h0[i] > 0.0 || h1[i] > 0.0).collect()
}

/// Feasible acceptance masks for one side.
fn side_tests(h0: &[f64], h1: &[f64], eps: f64, scope: AuditScope, rng: &mut impl Rng, warnings: &mut Vec<String>) -> (Vec<Vec<bool>>, u64) {
    let sup = support(h0, h1);
    match scope {
        AuditScope::None => (Vec::new(), 0),
        AuditScope::AllDecoders if sup.len() <= FULL_DECODER_CELLS => {
            let mut out = Vec::new();
            for mask in 0u32..(1u32 << sup.len()) {
                let mut a = vec![false; h0.len()];
                for (k, &c) in sup.iter().enumerate() {
                    a[c] = mask >> k & 1 == 1;
                }
                if test_errors(&a, h0, h1).0 <= eps + TYPE1_TOL {
                    out.push(a);
                }
            }
            (out, 1u64 << sup.len())
        }
        AuditScope::AllDecoders | AuditScope::Frontier { .. } => {
            let sample = match scope {
                AuditScope::Frontier { sample } => sample,
                _ => {
                    warnings.push(format!("{} decoder cells: auditing threshold tests and a sample", sup.len()));
                    64
                }
            };
            let mut out: Vec<Vec<bool>> = Vec::new();
            for p in lrt_candidates(h0, h1, warnings) {
                if p.type1 <= eps + TYPE1_TOL && !out.contains(&p.accept) {
                    out.push(p.accept);
                }
            }
            let mut tries = 0;
            let mut got = 0;
            while got < sample && tries < 200 * sample.max(1) {
                tries += 1;
                let mut a = vec![false; h0.len()];
                for &c in &sup {
                    a[c] = rng.gen::<bool>();
                }
                if test_errors(&a, h0, h1).0 <= eps + TYPE1_TOL && !out.contains(&a) {
                    out.push(a);
                    got += 1;
                }
            }
            let n = out.len() as u64;
            (out, n)
        }
    }
}

fn mask_table(a: &[bool], rows: usize, cols: usize) -> Vec<Vec<u8>> {
    (0..rows).map(|r| (0..cols).map(|c| if a[r * cols + c] { H0 } else { H1 }).collect()).collect()
}

struct EncoderOutcome {
    best: Option<(f64, TwoHopCode, ErrorProfile)>,
    summary: AuditSummary,
    failures: Vec<FailureRecord>,
    warnings: Vec<String>,
}

#[allow(clippy::too_many_arguments)]
fn run_encoder(
    idx: usize,
    enc: &EncoderPair,
    s: &TwoHopSource,
    os: &OracleSource,
    pw: &SourcePowers,
    n1: usize,
    n2: usize,
    eps: (f64, f64),
    w: &TradeoffWeights,
    opts: &SearchOptions,
    r_hats: &[f64],
) -> EncoderOutcome {
    let n = os.n;
    let cl: CellLaws = cell_laws(os, &enc.f1, n1, &enc.f2, n2);
    let mut warnings = Vec::new();
    let fr = lrt_frontier(&cl.h0_relay, &cl.h1_relay, &mut warnings);
    let fv = lrt_frontier(&cl.h0_recv, &cl.h1_recv, &mut warnings);
    let mk = |g1: &[bool], g2: &[bool]| TwoHopCode {
        n,
        n1,
        n2,
        f1: enc.f1.clone(),
        f2: enc.f2.clone(),
        g1: mask_table(g1, n1, cl.cols1),
        g2: mask_table(g2, n2, cl.cols2),
    };
    let best = match (best_under(&fr, eps.0, TYPE1_TOL), best_under(&fv, eps.1, TYPE1_TOL)) {
        (Some(a), Some(b)) => {
            let p = ErrorProfile::exact(a.type1, a.type2, b.type1, b.type2);
            Some((weighted_lhs(&p, n1 as f64, n2 as f64, w), mk(&a.accept, &b.accept), p))
        }
        _ => None,
    };
    let mut summary = AuditSummary::empty();
    let mut failures = Vec::new();
    if opts.scope != AuditScope::None {
        let mut rng = par::stream_rng(par::derive_seed(opts.seed, idx as u64), 1);
        let (t1, c1) = side_tests(&cl.h0_relay, &cl.h1_relay, eps.0, opts.scope, &mut rng, &mut warnings);
        let (t2, c2) = side_tests(&cl.h0_recv, &cl.h1_recv, eps.1, opts.scope, &mut rng, &mut warnings);
        summary.codes_checked = c1 * c2;
        for g1 in &t1 {
            for g2 in &t2 {
                let code = mk(g1, g2);
                summary.feasible += 1;
                for (gi, &gamma) in opts.gammas.iter().enumerate() {
                    let v = match verify_with(&code, s, pw, eps.0, eps.1, w, gamma) {
                        Ok(v) => v,
                        Err(Error::Premise(_)) => {
                            summary.refused += 1;
                            break;
                        }
                        Err(e) => {
                            warnings.push(format!("verification error: {e}"));
                            summary.failing_codes += 1;
                            continue;
                        }
                    };
                    let mut bad = Vec::new();
                    for e in &v.ledger.entries {
                        match e.status {
                            Status::Pass => {}
                            Status::Vacuous => summary.vacuous += 1,
                            Status::PremiseFailed => summary.premise_failed += 1,
                            Status::Fail => {
                                summary.fail_entries += 1;
                                bad.push(e.name.clone());
                            }
                        }
                        if e.status != Status::Vacuous && e.status != Status::PremiseFailed && e.margin < summary.worst_margin {
                            summary.worst_margin = e.margin;
                            summary.worst_entry = Some(e.name.clone());
                        }
                    }
                    if bad.is_empty() {
                        summary.passes += 1;
                    } else {
                        summary.failing_codes += 1;
                        if failures.len() < 8 {
                            failures.push(FailureRecord { code: code.clone(), gamma, entries: bad });
                        }
                    }
                    if let Some(&rh) = r_hats.get(gi) {
                        let g = judge_gap(v.r_n, rh, n);
                        summary.min_gap = summary.min_gap.min(g.gap);
                        match g.status {
                            GapStatus::Pass => summary.gap_pass += 1,
                            GapStatus::Inconclusive => summary.gap_inconclusive += 1,
                            GapStatus::Fail => summary.gap_fail += 1,
                        }
                    }
                }
            }
        }
    }
    EncoderOutcome { best, summary, failures, warnings }
}

/// Search every canonical encoder pair (or a random sample), attach the best
/// frontier decoders and audit feasible codes per `opts.scope`.
#[allow(clippy::too_many_arguments)]
pub fn exhaustive_search(
    s: &TwoHopSource,
    n: usize,
    n1: usize,
    n2: usize,
    eps1: f64,
    eps2: f64,
    w: &TradeoffWeights,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::Domain("message set sizes must be positive".into()));
    }
    crate::prob::source_constants(s, n, eps1, eps2)?;
    let os = OracleSource::new(s, n)?;
    let pw = SourcePowers::new(s, n)?;
    let encs = match opts.encoders {
        EncoderMode::Exhaustive => canonical_encoders(os.xs, os.ys, n1, n2)?,
        EncoderMode::Sample { count, seed } => sample_encoders(os.xs, os.ys, n1, n2, count, seed),
    };
    let r_hats: Vec<f64> = match &opts.gap_solver {
        Some(cfg) => opts.gammas.iter().map(|&g| r_gamma_hat(s, n, eps1, eps2, w, g, cfg)).collect::<Result<_>>()?,
        None => Vec::new(),
    };
    let outs = par::ordered_map(encs.len(), |i| run_encoder(i, &encs[i], s, &os, &pw, n1, n2, (eps1, eps2), w, opts, &r_hats));
    let mut summary = AuditSummary::empty();
    let mut failures = Vec::new();
    let mut warnings = Vec::new();
    let mut best: Option<(f64, TwoHopCode, ErrorProfile)> = None;
    for o in outs {
        if let Some(b) = o.best {
            if best.as_ref().map_or(true, |c| b.0 < c.0) {
                best = Some(b);
            }
        }
        summary.merge(o.summary);
        for f in o.failures {
            if failures.len() < 8 {
                failures.push(f);
            }
        }
        for wn in o.warnings {
            if !warnings.contains(&wn) {
                warnings.push(wn);
            }
        }
    }
    let (best_weighted_lhs, best_code, best_profile) = match best {
        Some((v, c, p)) => (v, Some(c), Some(p)),
        None => (f64::INFINITY, None, None),
    };
    Ok(SearchResult { n, n1, n2, encoder_pairs: encs.len(), best_weighted_lhs, best_code, best_profile, summary, failures, warnings })
}
