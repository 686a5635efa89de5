use super::aux::{u_problem, v_problem, AuxCoupling, CardBounds};
use super::bottleneck::{self, SolverConfig, SubProblem};
use super::solve::solve_r_grid;
use super::weights::{RegionPoint, TradeoffWeights};
use crate::error::Result;
use crate::par;
use crate::prob::{Kernel, TwoHopSource};
use serde::{Deserialize, Serialize};

/// Slack allowed when comparing a witness against the target point.
pub const CERTIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub weights: TradeoffWeights,
    pub lhs: f64,
    pub r_value: f64,
}

/// Largest relevance I(U;T) reachable with I(U;S) ≤ rate, by bisection on the
/// Lagrange weight followed by time-sharing between the two bracketing kernels.
fn frontier(make: impl Fn(f64) -> SubProblem, rate: f64, cfg: &SolverConfig, tag: u64) -> Result<(Vec<f64>, usize, f64)> {
    let seed = par::derive_seed(cfg.seed, tag);
    let probe = make(1.0);
    if let Some(id) = probe.identity_kernel() {
        let (is, it) = probe.informations(&id);
        if is <= rate + CERTIFY_TOL {
            return Ok((id, probe.card, it));
        }
    }
    let run = |lam: f64| -> Result<(Vec<f64>, f64, f64)> {
        let p = make(lam);
        let k = bottleneck::solve(&p, cfg, seed)?.kernel;
        let (is, it) = p.informations(&k);
        Ok((k, is, it))
    };
    // λ = 1 is always rate-feasible (constant kernel is optimal there)
    let mut hi = (1.0, (probe.constant_kernel(), 0.0, 0.0));
    let mut lo_lam = 0.0;
    let mut lo = None;
    for _ in 0..40 {
        let mid = 0.5 * (lo_lam + hi.0);
        let r = run(mid)?;
        if r.1 <= rate {
            hi = (mid, r);
        } else {
            lo_lam = mid;
            lo = Some(r);
        }
    }
    let (khi, ihi, thi) = hi.1;
    let card = probe.card;
    let Some((klo, ilo, _)) = lo else {
        return Ok((khi, card, thi));
    };
    if ilo - ihi < 1e-12 {
        return Ok((khi, card, thi));
    }
    let t = ((rate - ihi) / (ilo - ihi)).clamp(0.0, 1.0);
    let ns = probe.ns();
    let mut mixed = Vec::with_capacity(ns * 2 * card);
    for s in 0..ns {
        mixed.extend(klo[s * card..(s + 1) * card].iter().map(|v| t * v));
        mixed.extend(khi[s * card..(s + 1) * card].iter().map(|v| (1.0 - t) * v));
    }
    let (mixed, mcard) = compress(&mixed, ns, 2 * card);
    let mut p = probe.clone();
    p.card = mcard;
    let (is, it) = p.informations(&mixed);
    if is <= rate + CERTIFY_TOL && it > thi {
        Ok((mixed, mcard, it))
    } else {
        Ok((khi, card, thi))
    }
}

/// Drop empty outputs and merge outputs whose columns are proportional;
/// neither changes any information quantity.
fn compress(k: &[f64], ns: usize, card: usize) -> (Vec<f64>, usize) {
    let col = |u: usize| (0..ns).map(|s| k[s * card + u]).collect::<Vec<f64>>();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for u in 0..card {
        let c = col(u);
        let m: f64 = c.iter().sum();
        if m <= 0.0 {
            continue;
        }
        let shape: Vec<f64> = c.iter().map(|v| v / m).collect();
        if let Some(existing) = cols.iter_mut().find(|e| {
            let em: f64 = e.iter().sum();
            e.iter().zip(&shape).all(|(a, b)| (a / em - b).abs() < 1e-12)
        }) {
            for (e, v) in existing.iter_mut().zip(&c) {
                *e += v;
            }
        } else {
            cols.push(c);
        }
    }
    let nc = cols.len().max(1);
    let mut out = vec![0.0; ns * nc];
    for (u, c) in cols.iter().enumerate() {
        for s in 0..ns {
            out[s * nc + u] = c[s];
        }
    }
    (out, nc)
}

/// Looks for an auxiliary pair placing `pt` in the region. `None` means no
/// witness was found, not that the point is excluded.
pub fn certify_in(s: &TwoHopSource, pt: &RegionPoint, bounds: CardBounds, cfg: &SolverConfig) -> Result<Option<AuxCoupling>> {
    let (ku, cu, i_uy) = frontier(|l| u_problem(s, l, 1.0, bounds.u), pt.r1, cfg, 11)?;
    let (kv, cv, i_vz) = frontier(|l| v_problem(s, l, 1.0, bounds.v), pt.r2, cfg, 12)?;
    if pt.e1 > i_uy + CERTIFY_TOL || pt.e2 > i_uy + i_vz + CERTIFY_TOL {
        return Ok(None);
    }
    let aux = AuxCoupling::new(Kernel::from_flat_unchecked(s.nx(), cu, ku), Kernel::from_flat_unchecked(s.ny(), cv, kv));
    let inf = aux.informations(s);
    let ok = inf.i_ux <= pt.r1 + CERTIFY_TOL
        && inf.i_vy <= pt.r2 + CERTIFY_TOL
        && pt.e1 <= inf.i_uy + CERTIFY_TOL
        && pt.e2 <= inf.i_uy + inf.i_vz + CERTIFY_TOL;
    Ok(ok.then_some(aux))
}

/// Scans the weight grid for a half-space the point violates by more than `tol`.
/// Returns the first violation in grid order.
pub fn certify_out(
    s: &TwoHopSource,
    pt: &RegionPoint,
    grid: &[TradeoffWeights],
    bounds: CardBounds,
    cfg: &SolverConfig,
    tol: f64,
) -> Result<Option<Violation>> {
    let rs = solve_r_grid(s, grid, bounds, cfg)?;
    Ok(grid.iter().zip(&rs).find_map(|(w, r)| {
        let lhs = pt.weighted(w);
        (lhs < r.value - tol).then(|| Violation { weights: *w, lhs, r_value: r.value })
    }))
}
