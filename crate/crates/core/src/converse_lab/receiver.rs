//! Receiver side: the type-II exponent bound through the semigroup
//! comparison and reverse hypercontractivity.

use super::laws::{kl_product, ChainLaws};
use super::semigroup::{choose_t, semigroup_apply, Semigroup};
use super::sets::{AcceptanceSets, SourcePowers};
use super::truncation::{max_ratio, TruncationArtifacts, TYPICAL_NOTE};
use crate::code_model::seq;
use crate::error::Result;
use crate::ledger::{Entry, Ledger};
use crate::prob::TwoHopSource;

/// Divergences of the receiver chain, reused by the multi-letter objective.
#[derive(Debug, Clone, Copy)]
pub struct ReceiverTerms {
    pub t: f64,
    pub psi: f64,
    pub alpha_one: bool,
    /// D(P_{Z̃M̃2}‖P_Z^n P̄_{M2})
    pub d_ref: f64,
    /// D(P_{Z̃M̃2}‖P_Z̃ P̄_{M̃2})
    pub d_trunc: f64,
}

pub(crate) fn receiver_entries(
    s: &TwoHopSource,
    pw: &SourcePowers,
    sets: &AcceptanceSets,
    laws: &ChainLaws,
    art: &TruncationArtifacts,
) -> Result<(Ledger, ReceiverTerms)> {
    let (ys, zs, n) = (pw.ys, pw.zs, pw.n);
    let n2 = laws.t_m2.len();
    let alpha = s.alpha();
    let (t, psi, alpha_one) = choose_t(alpha, n, art.tau);
    let prem = art.typical_premise;
    let half = art.half_slack();
    let mut l = Ledger::new();

    // m2 ⊗ z layouts: t_m2z is m2-major, so the reference is P̄ ⊗ P_Z
    let d_ref = kl_product(&laws.t_m2z, &laws.pbar_m2, &pw.pz);
    let d_trunc = kl_product(&laws.t_m2z, &laws.tbar_m2, &laws.tz);
    let terms = ReceiverTerms { t, psi, alpha_one, d_ref, d_trunc };
    if alpha_one {
        l.push(Entry::eq("receiver_alpha_one_branch", t, 1.0 / (n as f64).sqrt(), 0.0).note("α = 1: t = 1/√n and Ψ = √n·log(1/τ)"));
    }

    // Λh per message, and E_{P_Z^n}[Λh(m2)] = (e^{-t}+α(1−e^{-t}))^n P_Z^n(G(m2))
    let growth = ((-t).exp() + alpha * (1.0 - (-t).exp())).powi(n as i32);
    let mut lam = vec![Vec::new(); n2];
    let mut ref_mean = 0.0;
    let mut ref_mean_closed = 0.0;
    for m2 in 0..n2 {
        if laws.pbar_m2[m2] <= 0.0 && laws.t_m2[m2] <= 0.0 {
            continue;
        }
        let h: Vec<f64> = sets.g[m2].iter().map(|&g| if g { 1.0 } else { 0.0 }).collect();
        let lh = semigroup_apply(Semigroup::Lambda { alpha }, s, t, n, &h)?;
        let mean: f64 = lh.iter().zip(&pw.pz).map(|(a, b)| a * b).sum();
        let pg: f64 = h.iter().zip(&pw.pz).map(|(a, b)| a * b).sum();
        ref_mean += laws.pbar_m2[m2] * mean;
        ref_mean_closed += laws.pbar_m2[m2] * growth * pg;
        lam[m2] = lh;
    }
    l.push(Entry::eq("receiver_lambda_mean_identity", ref_mean, ref_mean_closed, 1e-12));
    l.push(Entry::le("receiver_growth_factor", growth, ((alpha - 1.0) * n as f64 * t).exp()));

    // per (y, m2) terms under the truncated law
    let mut e_log_lambda = 0.0;
    let mut e_log_t = 0.0;
    let mut e_log_g = 0.0;
    let mut worst_rhc = (f64::INFINITY, 0.0, 0.0);
    let mut worst_sharp = f64::INFINITY;
    let mut worst_order = f64::INFINITY;
    let coef = 1.0 + 1.0 / t;
    let sharp = 1.0 / (1.0 - (-t).exp());
    for m2 in 0..n2 {
        if laws.t_m2[m2] <= 0.0 {
            continue;
        }
        let h: Vec<f64> = sets.g[m2].iter().map(|&g| if g { 1.0 } else { 0.0 }).collect();
        for y in 0..ys {
            let p = laws.t_m2y[m2 * ys + y];
            if p <= 0.0 {
                continue;
            }
            let yd = seq::digits(y, s.ny(), n);
            let th = semigroup_apply(Semigroup::T { y: &yd }, s, t, n, &h)?;
            let row = &pw.pz_given_y[y * zs..(y + 1) * zs];
            let (mut a, mut b) = (0.0, 0.0);
            for z in 0..zs {
                if row[z] > 0.0 {
                    a += row[z] * lam[m2][z].ln();
                    b += row[z] * th[z].ln();
                }
                worst_order = worst_order.min(lam[m2][z] - th[z]);
            }
            let lg = sets.g_given_y[m2 * ys + y].ln();
            e_log_lambda += p * a;
            e_log_t += p * b;
            e_log_g += p * lg;
            let m = b - coef * lg;
            if m < worst_rhc.0 {
                worst_rhc = (m, b, coef * lg);
            }
            worst_sharp = worst_sharp.min(b - sharp * lg);
        }
    }
    l.push(Entry::ge("receiver_lambda_dominates_t", worst_order, 0.0));
    l.push(Entry::ge("receiver_log_lambda_vs_t", e_log_lambda, e_log_t));
    l.push(Entry::ge("receiver_rhc_pointwise", worst_rhc.1, worst_rhc.2));
    l.push(Entry::ge("receiver_rhc_sharp_pointwise", worst_sharp, 0.0));
    l.push(Entry::ge("receiver_rhc_average", e_log_t, coef * e_log_g));
    l.push(Entry::ge("receiver_b_threshold", coef * e_log_g, coef * art.tau.ln()));
    l.push(Entry::ge("receiver_variational", d_ref, e_log_lambda - ref_mean.ln()));

    let rb = max_ratio(&laws.tbar_m2, &laws.pbar_m2);
    l.push(Entry::le("receiver_m2bar_dominance_free", rb, 1.0 / (art.mass_c * art.mass_c)));
    l.push(Entry::le("receiver_m2bar_dominance", rb, 1.0 / (half * half)).premise(prem, TYPICAL_NOTE));
    l.push(Entry::le("receiver_divergence_change_free", d_ref, d_trunc + 3.0 * (1.0 / art.mass_c).ln()));
    l.push(Entry::le("receiver_divergence_change", d_ref, d_trunc + 3.0 * (1.0 / half).ln()).premise(prem, TYPICAL_NOTE));

    let names = ["receiver_eta2_lambda", "receiver_eta2_bound", "receiver_eta2_final_free", "receiver_eta2_final"];
    if laws.eta2 <= 0.0 {
        for name in names {
            l.push(Entry::vacuous(name, "η2 = 0"));
        }
        return Ok((l, terms));
    }
    let le = -laws.eta2.ln();
    l.push(Entry::le(names[0], ref_mean, ((alpha - 1.0) * n as f64 * t).exp() * laws.eta2));
    l.push(Entry::le(names[1], le, d_ref + psi - art.tau.ln()));
    l.push(Entry::le(names[2], le, d_trunc + psi - art.tau.ln() + 3.0 * (1.0 / art.mass_c).ln()));
    l.push(Entry::le(names[3], le, d_trunc + psi - art.tau.ln() - 3.0 * half.ln()).premise(prem, TYPICAL_NOTE));
    Ok((l, terms))
}
