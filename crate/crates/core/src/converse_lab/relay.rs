//! Relay side: the type-II exponent bound through the truncated law.

use super::laws::{kl_product, ChainLaws};
use super::truncation::{max_ratio, TruncationArtifacts, TYPICAL_NOTE};
use crate::ledger::{Entry, Ledger};
use crate::prob::tensor;

pub(crate) fn relay_entries(laws: &ChainLaws, art: &TruncationArtifacts, d_y_mass_trunc: f64, py: &[f64]) -> Ledger {
    let mut l = Ledger::new();
    let prem = art.typical_premise;
    let half = art.half_slack();
    l.push(Entry::eq("relay_truncated_accept_mass", d_y_mass_trunc, 1.0, 1e-12));
    let r = max_ratio(&laws.t_m1, &laws.p_m1);
    l.push(Entry::le("relay_m1_dominance_free", r, 1.0 / art.mass_c));
    l.push(Entry::le("relay_m1_dominance", r, 1.0 / half).premise(prem, TYPICAL_NOTE));
    let ys = py.len();
    let n1 = laws.t_m1.len();
    let i_m1y = tensor::mi_2d(&laws.t_m1y, n1, ys);
    let d = kl_product(&laws.t_m1y, &laws.p_m1, py);
    // D(P_{M̃Ỹ}‖P_M P_Y) = I(M̃;Ỹ) + E log(P_M̃ P_Ỹ / P_M P_Y)
    let mut corr = 0.0;
    for m in 0..n1 {
        for y in 0..ys {
            let p = laws.t_m1y[m * ys + y];
            if p > 0.0 {
                corr += p * (laws.t_m1[m] * laws.ty[y] / (laws.p_m1[m] * py[y])).ln();
            }
        }
    }
    l.push(Entry::eq("relay_divergence_split", d, i_m1y + corr, 1e-10));
    if laws.beta2 <= 0.0 {
        for name in ["relay_beta2_divergence", "relay_beta2_mi_free", "relay_beta2_mi"] {
            l.push(Entry::vacuous(name, "β2 = 0"));
        }
        return l;
    }
    let lb = -laws.beta2.ln();
    l.push(Entry::le("relay_beta2_divergence", lb, d));
    l.push(Entry::le("relay_beta2_mi_free", lb, i_m1y + 2.0 * (1.0 / art.mass_c).ln()));
    l.push(Entry::le("relay_beta2_mi", lb, i_m1y + 2.0 * (1.0 / half).ln()).premise(prem, TYPICAL_NOTE));
    l
}
