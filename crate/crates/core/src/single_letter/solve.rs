use super::aux::{u_problem, v_problem, AuxCoupling, CardBounds};
use super::bottleneck::{self, SolverConfig, SubProblem, SubSolution};
use super::weights::{TildeWeights, TradeoffWeights};
use crate::error::Result;
use crate::par;
use crate::prob::{tensor, Kernel, TwoHopSource};
use crate::sample;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RSolution {
    pub value: f64,
    pub u_value: f64,
    pub v_value: f64,
    pub aux: AuxCoupling,
    pub converged: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TildeSolution {
    pub value: f64,
    /// Sub-minima for U₁, U₂ and V.
    pub parts: [f64; 3],
    pub u1_given_x: Kernel,
    pub u2_given_x: Kernel,
    pub v_given_y: Kernel,
    pub converged: bool,
}

const U_TAG: u64 = 1;
const V_TAG: u64 = 2;
const U1_TAG: u64 = 3;
const U2_TAG: u64 = 4;
const JOINT_TAG: u64 = 5;

fn kernel_of(sol: &SubSolution, inputs: usize, card: usize) -> Kernel {
    Kernel::from_flat_unchecked(inputs, card, sol.kernel.clone())
}

fn warn(sol: &SubSolution, part: &str, out: &mut Vec<String>) {
    if !sol.converged {
        out.push(format!("{part}: iteration limit reached, best value kept"));
    }
}

fn assemble(s: &TwoHopSource, bounds: CardBounds, u: SubSolution, v: SubSolution) -> RSolution {
    let mut warnings = Vec::new();
    warn(&u, "U-part", &mut warnings);
    warn(&v, "V-part", &mut warnings);
    RSolution {
        value: u.value + v.value,
        u_value: u.value,
        v_value: v.value,
        converged: u.converged && v.converged,
        aux: AuxCoupling::new(kernel_of(&u, s.nx(), bounds.u), kernel_of(&v, s.ny(), bounds.v)),
        warnings,
    }
}

/// Minimum of the trade-off objective, solved as two independent sub-problems.
pub fn solve_r(s: &TwoHopSource, w: &TradeoffWeights, bounds: CardBounds, cfg: &SolverConfig) -> Result<RSolution> {
    let u = bottleneck::solve(&u_problem(s, w.b, 1.0 + w.c, bounds.u), cfg, par::derive_seed(cfg.seed, U_TAG))?;
    let v = bottleneck::solve(&v_problem(s, w.d, w.c, bounds.v), cfg, par::derive_seed(cfg.seed, V_TAG))?;
    Ok(assemble(s, bounds, u, v))
}

/// solve_r over a weight grid, sharing sub-minima between grid points.
pub fn solve_r_grid(
    s: &TwoHopSource,
    grid: &[TradeoffWeights],
    bounds: CardBounds,
    cfg: &SolverConfig,
) -> Result<Vec<RSolution>> {
    let key = |a: f64, b: f64| (a.to_bits(), b.to_bits());
    let mut uk: Vec<(f64, f64)> = Vec::new();
    let mut vk: Vec<(f64, f64)> = Vec::new();
    for w in grid {
        if !uk.iter().any(|&(b, c)| key(b, c) == key(w.b, w.c)) {
            uk.push((w.b, w.c));
        }
        if !vk.iter().any(|&(d, c)| key(d, c) == key(w.d, w.c)) {
            vk.push((w.d, w.c));
        }
    }
    let us = par::ordered_map(uk.len(), |i| {
        bottleneck::solve(&u_problem(s, uk[i].0, 1.0 + uk[i].1, bounds.u), cfg, par::derive_seed(cfg.seed, U_TAG))
    });
    let vs = par::ordered_map(vk.len(), |i| {
        bottleneck::solve(&v_problem(s, vk[i].0, vk[i].1, bounds.v), cfg, par::derive_seed(cfg.seed, V_TAG))
    });
    let mut umap = HashMap::new();
    for (k, r) in uk.iter().zip(us) {
        umap.insert(key(k.0, k.1), r?);
    }
    let mut vmap = HashMap::new();
    for (k, r) in vk.iter().zip(vs) {
        vmap.insert(key(k.0, k.1), r?);
    }
    Ok(grid
        .iter()
        .map(|w| assemble(s, bounds, umap[&key(w.b, w.c)].clone(), vmap[&key(w.d, w.c)].clone()))
        .collect())
}

/// Minimum of the three-part objective b₁I(U₁;X) − I(U₁;Y) + b₂I(U₂;X) − cI(U₂;Y) + dI(V;Y) − cI(V;Z).
pub fn solve_r_tilde(s: &TwoHopSource, w: &TildeWeights, bounds: CardBounds, cfg: &SolverConfig) -> Result<TildeSolution> {
    let u1 = bottleneck::solve(&u_problem(s, w.b1, 1.0, bounds.u), cfg, par::derive_seed(cfg.seed, U1_TAG))?;
    let u2 = bottleneck::solve(&u_problem(s, w.b2, w.c, bounds.u), cfg, par::derive_seed(cfg.seed, U2_TAG))?;
    let v = bottleneck::solve(&v_problem(s, w.d, w.c, bounds.v), cfg, par::derive_seed(cfg.seed, V_TAG))?;
    Ok(TildeSolution {
        value: u1.value + u2.value + v.value,
        parts: [u1.value, u2.value, v.value],
        u1_given_x: kernel_of(&u1, s.nx(), bounds.u),
        u2_given_x: kernel_of(&u2, s.nx(), bounds.u),
        v_given_y: kernel_of(&v, s.ny(), bounds.v),
        converged: u1.converged && u2.converged && v.converged,
    })
}

/// The trade-off objective evaluated on the full joint Q_XYZUV.
fn joint_objective(s: &TwoHopSource, ku: &[f64], kv: &[f64], cu: usize, cv: usize, w: &TradeoffWeights) -> f64 {
    let (nx, ny, nz) = (s.nx(), s.ny(), s.nz());
    let shape = [nx, ny, nz, cu, cv];
    let mut m = vec![0.0; nx * ny * nz * cu * cv];
    let pzy = s.p_z_given_y();
    let mut i = 0;
    for x in 0..nx {
        for y in 0..ny {
            let pxy = s.pxy()[x * ny + y];
            for z in 0..nz {
                let p = pxy * pzy.row(y)[z];
                for u in 0..cu {
                    for v in 0..cv {
                        m[i] = p * ku[x * cu + u] * kv[y * cv + v];
                        i += 1;
                    }
                }
            }
        }
    }
    let mi = |a: usize, b: usize| {
        let (t, _) = tensor::marginal(&m, &shape, &[a, b]);
        tensor::mi_2d(&t, shape[a], shape[b])
    };
    let (iux, iuy, ivy, ivz) = (mi(3, 0), mi(3, 1), mi(4, 1), mi(4, 2));
    -iuy + w.b * iux - w.c * (iuy + ivz) + w.d * ivy
}

/// Joint-parameterized search: both kernels updated together from shared
/// restarts, scored on the full five-variable joint.
pub fn solve_r_joint(s: &TwoHopSource, w: &TradeoffWeights, bounds: CardBounds, cfg: &SolverConfig) -> Result<RSolution> {
    let up: SubProblem = u_problem(s, w.b, 1.0 + w.c, bounds.u);
    let vp: SubProblem = v_problem(s, w.d, w.c, bounds.v);
    let (cu, cv) = (bounds.u, bounds.v);
    let seed = par::derive_seed(cfg.seed, JOINT_TAG);
    let runs = par::ordered_map(cfg.restarts.max(1), |r| {
        let mut rng = par::stream_rng(seed, r as u64);
        let mut ku: Vec<f64> = (0..s.nx()).flat_map(|_| sample::dirichlet(&mut rng, cu)).collect();
        let mut kv: Vec<f64> = (0..s.ny()).flat_map(|_| sample::dirichlet(&mut rng, cv)).collect();
        let mut val = joint_objective(s, &ku, &kv, cu, cv, w);
        let mut best = (ku.clone(), kv.clone(), val);
        let mut converged = false;
        for _ in 0..cfg.max_iter {
            ku = super::alternating::step(&up, &ku, cfg.damping);
            kv = super::alternating::step(&vp, &kv, cfg.damping);
            let nv = joint_objective(s, &ku, &kv, cu, cv, w);
            if nv < best.2 {
                best = (ku.clone(), kv.clone(), nv);
            }
            let done = (nv - val).abs() < cfg.tol;
            val = nv;
            if done {
                converged = true;
                break;
            }
        }
        (best, converged)
    });
    let i = par::argmin_first(&runs, |r| r.0 .2).expect("at least one restart");
    let ((ku, kv, value), converged) = runs[i].clone();
    let mut cands = vec![(value, ku, kv)];
    // constant aux is feasible with value 0
    cands.push((0.0, up.constant_kernel(), vp.constant_kernel()));
    let j = par::argmin_first(&cands, |c| c.0).expect("nonempty");
    let (value, ku, kv) = cands.swap_remove(j);
    let u_value = up.objective(&ku);
    let v_value = vp.objective(&kv);
    Ok(RSolution {
        value,
        u_value,
        v_value,
        aux: AuxCoupling::new(Kernel::from_flat_unchecked(s.nx(), cu, ku), Kernel::from_flat_unchecked(s.ny(), cv, kv)),
        converged,
        warnings: if converged { vec![] } else { vec!["joint search: iteration limit reached".into()] },
    })
}
