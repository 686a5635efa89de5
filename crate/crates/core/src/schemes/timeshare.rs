//! Time-sharing between a relay-only code and a receiver-only code over a
//! partition of X^n, for ε1 + ε2 > 1.

use crate::code_model::{exact_errors, seq, ErrorProfile, TwoHopCode, H1};
use crate::error::{Error, Result};
use crate::ledger::{Entry, Ledger};
use crate::prob::TwoHopSource;
use serde::{Deserialize, Serialize};

/// Split of X^n; `in_first[x]` marks X1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XPartition {
    pub n: usize,
    pub in_first: Vec<bool>,
    pub mass_first: f64,
    pub mass_second: f64,
}

impl XPartition {
    /// Check P(X1) > 1 − ε1 and P(X2) > 1 − ε2.
    pub fn check(&self, eps1: f64, eps2: f64) -> Result<()> {
        if !(eps1 + eps2 > 1.0) {
            return Err(Error::Domain(format!("time sharing needs ε1 + ε2 > 1, got {}", eps1 + eps2)));
        }
        if !(self.mass_first > 1.0 - eps1 && self.mass_second > 1.0 - eps2) {
            return Err(Error::Domain(format!(
                "partition masses P(X1) = {:.6}, P(X2) = {:.6} need to exceed {:.6} and {:.6}",
                self.mass_first,
                self.mass_second,
                1.0 - eps1,
                1.0 - eps2
            )));
        }
        Ok(())
    }
}

/// Greedy partition: sequences in decreasing P_X^n order (ties by index) go
/// to X1 until its mass reaches (1 − ε1 + ε2)/2.
pub fn x_partition(s: &TwoHopSource, n: usize, eps1: f64, eps2: f64) -> Result<XPartition> {
    if !(eps1 + eps2 > 1.0) {
        return Err(Error::Domain(format!("time sharing needs ε1 + ε2 > 1, got {}", eps1 + eps2)));
    }
    seq::count(s.nx(), n, crate::code_model::EXACT_BUDGET)?;
    let px = seq::power_pmf(s.px(), n);
    let mut order: Vec<usize> = (0..px.len()).collect();
    order.sort_by(|&a, &b| px[b].total_cmp(&px[a]).then(a.cmp(&b)));
    let target = (1.0 - eps1 + eps2) / 2.0;
    let mut in_first = vec![false; px.len()];
    let mut acc = 0.0;
    for &x in &order {
        if acc >= target {
            break;
        }
        in_first[x] = true;
        acc += px[x];
    }
    let mass_first: f64 = px.iter().zip(&in_first).filter(|(_, f)| **f).map(|(p, _)| p).sum();
    let mass_second: f64 = px.iter().zip(&in_first).filter(|(_, f)| !**f).map(|(p, _)| p).sum();
    let part = XPartition { n, in_first, mass_first, mass_second };
    part.check(eps1, eps2)?;
    Ok(part)
}

/// Composite code. M1 = bit·K + index with K = max(N1′, N1″) and bit 1 on
/// X2; M2 = bit·N2″ + index. On X1 the receiver declares H1, on X2 the relay does.
pub fn build_timeshare(relay: &TwoHopCode, receiver: &TwoHopCode, part: &XPartition, n: usize) -> Result<TwoHopCode> {
    if relay.n != n || receiver.n != n || part.n != n {
        return Err(Error::Shape(format!(
            "blocklengths differ: relay {}, receiver {}, partition {}, requested {n}",
            relay.n, receiver.n, part.n
        )));
    }
    if relay.f1.len() != part.in_first.len() || receiver.f1.len() != part.in_first.len() {
        return Err(Error::Shape("partition does not cover the encoder domain".into()));
    }
    let ys = relay.g1.first().map_or(0, |r| r.len());
    let zs = receiver.g2.first().map_or(0, |r| r.len());
    let k = relay.n1.max(receiver.n1);
    let n2r = receiver.n2;
    let f1 = part
        .in_first
        .iter()
        .enumerate()
        .map(|(x, &first)| if first { relay.f1[x] } else { k + receiver.f1[x] })
        .collect();
    let mut g1 = Vec::with_capacity(2 * k);
    let mut f2 = Vec::with_capacity(2 * k);
    for m in 0..k {
        g1.push(if m < relay.n1 { relay.g1[m].clone() } else { vec![H1; ys] });
        f2.push(vec![0; ys]);
    }
    for m in 0..k {
        g1.push(vec![H1; ys]);
        let mr = if m < receiver.n1 { m } else { 0 };
        f2.push(receiver.f2[mr].iter().map(|&j| n2r + j).collect());
    }
    let mut g2 = vec![vec![H1; zs]; n2r];
    g2.extend(receiver.g2.iter().cloned());
    let code = TwoHopCode { n, n1: 2 * k, n2: 2 * n2r, f1, f2, g1, g2 };
    Ok(code)
}

/// Exact errors of a composite and its parts plus the chain inequalities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimeshareCheck {
    pub composite: ErrorProfile,
    pub relay: ErrorProfile,
    pub receiver: ErrorProfile,
    pub ledger: Ledger,
}

/// P(A ∩ (S × ·)) for the relay acceptance region restricted to X1, and the
/// receiver acceptance region restricted to X2, under H0.
fn restricted_accept(code: &TwoHopCode, s: &TwoHopSource, keep: &[bool], relay_side: bool) -> Result<f64> {
    let mut c = code.clone();
    // send excluded x to a rejecting message
    c.n1 += 1;
    let ys = c.g1[0].len();
    c.g1.push(vec![H1; ys]);
    c.f2.push(vec![0; ys]);
    for (x, k) in keep.iter().enumerate() {
        if !k {
            c.f1[x] = c.n1 - 1;
        }
    }
    if !relay_side {
        // the rejecting message must also fail at the receiver
        let zs = c.g2[0].len();
        c.n2 += 1;
        c.g2.push(vec![H1; zs]);
        let last = c.n2 - 1;
        c.f2[c.n1 - 1] = vec![last; ys];
    }
    let e = exact_errors(&c, s)?;
    Ok(if relay_side { 1.0 - e.beta1 } else { 1.0 - e.eta1 })
}

pub fn timeshare_check(
    s: &TwoHopSource,
    composite: &TwoHopCode,
    relay: &TwoHopCode,
    receiver: &TwoHopCode,
    part: &XPartition,
    eps1: f64,
    eps2: f64,
) -> Result<TimeshareCheck> {
    let pc = exact_errors(composite, s)?;
    let pr = exact_errors(relay, s)?;
    let pv = exact_errors(receiver, s)?;
    let not_first: Vec<bool> = part.in_first.iter().map(|f| !f).collect();
    let a1 = restricted_accept(relay, s, &part.in_first, true)?;
    let a2 = restricted_accept(receiver, s, &not_first, false)?;
    let mut l = Ledger::new();
    l.push(Entry::eq("timeshare_relay_accept_is_restricted", 1.0 - pc.beta1, a1, 1e-12));
    l.push(Entry::ge("timeshare_relay_accept_lower", a1, part.mass_first - pr.beta1));
    l.push(Entry::le("timeshare_beta1_eps1", pc.beta1, eps1));
    l.push(Entry::le("timeshare_beta2_component", pc.beta2, pr.beta2));
    l.push(Entry::eq("timeshare_receiver_accept_is_restricted", 1.0 - pc.eta1, a2, 1e-12));
    l.push(Entry::le("timeshare_eta1_upper", pc.eta1, 1.0 - part.mass_second + pv.eta1));
    l.push(Entry::le("timeshare_eta1_eps2", pc.eta1, eps2));
    l.push(Entry::le("timeshare_eta2_component", pc.eta2, pv.eta2));
    let k = relay.n1.max(receiver.n1) as f64;
    l.push(Entry::le("timeshare_log_n1", (composite.n1 as f64).ln(), (2.0 * k).ln()));
    l.push(Entry::le("timeshare_log_n2", (composite.n2 as f64).ln(), (2.0 * receiver.n2 as f64).ln()));
    Ok(TimeshareCheck { composite: pc, relay: pr, receiver: pv, ledger: l })
}
