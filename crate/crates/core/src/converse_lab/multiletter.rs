//! The multi-letter objective R^(n) and the assembled precursor inequality.

use super::laws::{kl_product, ChainLaws};
use super::receiver::ReceiverTerms;
use super::sets::SourcePowers;
use super::truncation::{TruncationArtifacts, TYPICAL_NOTE};
use crate::code_model::TwoHopCode;
use crate::ledger::{Entry, Ledger};
use crate::prob::tensor;
use crate::single_letter::TradeoffWeights;
use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MultiLetterTerms {
    pub h_m1: f64,
    pub h_m2: f64,
    /// I(M̃1; X̃^n Ỹ^n)
    pub i_m1_xy: f64,
    pub i_m1_y: f64,
    pub i_m2_y: f64,
    pub i_m2_z: f64,
    pub i_m1_y_given_x: f64,
    /// D(P_{M̃2}‖P̄_{M̃2})
    pub d_m2: f64,
    /// D(P_{Z̃M̃2}‖P_Z̃ P̄_{M̃2})
    pub d_z: f64,
    /// D(P_{X̃Ỹ}‖P_XY^n)
    pub d_xy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiLetter {
    pub value: f64,
    pub terms: MultiLetterTerms,
    pub ledger: Ledger,
}

pub(crate) fn multiletter_entries(
    code: &TwoHopCode,
    pw: &SourcePowers,
    laws: &ChainLaws,
    art: &TruncationArtifacts,
    rt: &ReceiverTerms,
    w: &TradeoffWeights,
    gamma: f64,
) -> MultiLetter {
    let (xs, ys, zs) = (pw.xs, pw.ys, pw.zs);
    let (n1, n2) = (code.n1, code.n2);
    // (m1, y, x) table for the conditional term
    let mut m1yx = vec![0.0; n1 * ys * xs];
    let mut m1xy = vec![0.0; n1 * xs * ys];
    for x in 0..xs {
        let m1 = code.f1[x];
        for y in 0..ys {
            let p = art.trunc_xy[x * ys + y];
            m1yx[(m1 * ys + y) * xs + x] = p;
            m1xy[m1 * xs * ys + x * ys + y] = p;
        }
    }
    let terms = MultiLetterTerms {
        h_m1: tensor::entropy(&laws.t_m1),
        h_m2: tensor::entropy(&laws.t_m2),
        i_m1_xy: tensor::mi_2d(&m1xy, n1, xs * ys),
        i_m1_y: tensor::mi_2d(&laws.t_m1y, n1, ys),
        i_m2_y: tensor::mi_2d(&laws.t_m2y, n2, ys),
        i_m2_z: tensor::mi_2d(&laws.t_m2z, n2, zs),
        i_m1_y_given_x: tensor::cmi_3d(&m1yx, n1, ys, xs),
        d_m2: tensor::kl(&laws.t_m2, &laws.tbar_m2),
        d_z: rt.d_trunc,
        d_xy: tensor::kl(&art.trunc_xy, &pw.pxy),
    };
    let t = &terms;
    let value = -t.i_m1_y + w.b * t.i_m1_xy - w.c * t.d_z + w.d * t.i_m2_y + gamma * t.i_m1_y_given_x + (w.b + w.d + gamma) * t.d_xy;

    let mut l = Ledger::new();
    let (ln1, ln2) = ((code.n1 as f64).ln(), (code.n2 as f64).ln());
    l.push(Entry::ge("rate_log_n1_entropy", ln1, t.h_m1));
    l.push(Entry::ge("rate_entropy_m1_mi", t.h_m1, t.i_m1_xy));
    l.push(Entry::ge("rate_log_n2_entropy", ln2, t.h_m2));
    l.push(Entry::ge("rate_entropy_m2_mi", t.h_m2, t.i_m2_y));
    l.push(Entry::eq("markov_zero", t.i_m1_y_given_x, 0.0, 1e-12));
    l.push(Entry::ge("dpi_pair_bound", t.i_m1_y, t.d_m2));
    l.push(Entry::eq("dpi_pair_split", t.d_z, t.i_m2_z + t.d_m2, 1e-10));
    l.push(Entry::le("dpi_pair_reverse", t.d_z, t.i_m2_z + t.i_m1_y));
    l.push(Entry::eq("trunc_kl_in_objective", t.d_xy, -art.mass_c.ln(), 1e-12));
    // reference divergence as recomputed from the product form
    let d_ref = kl_product(&laws.t_m2z, &laws.pbar_m2, &pw.pz);
    l.push(Entry::eq("receiver_reference_divergence", d_ref, rt.d_ref, 1e-12));

    let names = ["precursor_free", "precursor"];
    if laws.beta2 <= 0.0 || (w.c > 0.0 && laws.eta2 <= 0.0) {
        for name in names {
            l.push(Entry::vacuous(name, "zero type-II error"));
        }
        return MultiLetter { value, terms, ledger: l };
    }
    let ceta = if w.c > 0.0 { w.c * laws.eta2.ln() } else { 0.0 };
    let lhs = laws.beta2.ln() + w.b * ln1 + ceta + w.d * ln2 + w.c * rt.psi;
    let k = w.b + w.d + gamma + 2.0 + 3.0 * w.c;
    let base = value + w.c * art.tau.ln();
    l.push(Entry::ge(names[0], lhs, base + k * art.mass_c.ln()));
    l.push(Entry::ge(names[1], lhs, base + k * art.half_slack().ln()).premise(art.typical_premise, TYPICAL_NOTE));
    MultiLetter { value, terms, ledger: l }
}
