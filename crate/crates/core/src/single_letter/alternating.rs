//! Self-consistent (bottleneck-style) fixed-point iteration with damping
//! and Dirichlet restarts.

use super::bottleneck::{KernelSolver, SolverConfig, SubProblem, SubSolution};
use crate::par;
use crate::sample;

pub struct Alternating;

fn kl_row(p: &[f64], q: &[f64]) -> f64 {
    let mut d = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            d += a * (a / b).ln();
        }
    }
    d
}

/// One damped update of the kernel.
pub(crate) fn step(p: &SubProblem, k: &[f64], damping: f64) -> Vec<f64> {
    let nu = p.card;
    let nt = p.nt;
    let (pu, put) = p.laws(k);
    let cond: Vec<Vec<f64>> = (0..nu)
        .map(|u| {
            if pu[u] > 0.0 {
                put[u * nt..(u + 1) * nt].iter().map(|m| m / pu[u]).collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    let mut out = vec![0.0; k.len()];
    for s in 0..p.ns() {
        let row = &p.channel[s * nt..(s + 1) * nt];
        let dist: Vec<f64> = (0..nu).map(|u| if pu[u] > 0.0 { kl_row(row, &cond[u]) } else { f64::INFINITY }).collect();
        let new = &mut out[s * nu..(s + 1) * nu];
        if p.w_s == 0.0 {
            // hard assignment; ties to the lowest symbol
            let mut best = None;
            for u in 0..nu {
                if pu[u] > 0.0 && best.map_or(true, |b: usize| dist[u] < dist[b]) {
                    best = Some(u);
                }
            }
            match best {
                Some(b) => new[b] = 1.0,
                None => new.copy_from_slice(&k[s * nu..(s + 1) * nu]),
            }
        } else {
            let beta = p.w_t / p.w_s;
            let logits: Vec<f64> = (0..nu)
                .map(|u| if pu[u] > 0.0 && dist[u].is_finite() { pu[u].ln() - beta * dist[u] } else { f64::NEG_INFINITY })
                .collect();
            let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if m == f64::NEG_INFINITY {
                new.copy_from_slice(&k[s * nu..(s + 1) * nu]);
            } else {
                let mut z = 0.0;
                for u in 0..nu {
                    new[u] = (logits[u] - m).exp();
                    z += new[u];
                }
                new.iter_mut().for_each(|v| *v /= z);
            }
        }
    }
    if damping > 0.0 {
        for (o, &old) in out.iter_mut().zip(k) {
            *o = (1.0 - damping) * *o + damping * old;
        }
    }
    out
}

/// Iterate from `k0`; returns (best kernel, best value, converged).
pub(crate) fn iterate(p: &SubProblem, k0: Vec<f64>, cfg: &SolverConfig) -> (Vec<f64>, f64, bool) {
    let mut k = k0;
    let mut v = p.objective(&k);
    let mut best = (k.clone(), v);
    for _ in 0..cfg.max_iter {
        let nk = step(p, &k, cfg.damping);
        let nv = p.objective(&nk);
        if nv < best.1 {
            best = (nk.clone(), nv);
        }
        let done = (nv - v).abs() < cfg.tol;
        k = nk;
        v = nv;
        if done {
            return (best.0, best.1, true);
        }
    }
    (best.0, best.1, false)
}

impl KernelSolver for Alternating {
    fn name(&self) -> &'static str {
        "alternating"
    }

    fn solve(&self, p: &SubProblem, cfg: &SolverConfig, seed: u64) -> Option<SubSolution> {
        let runs = par::ordered_map(cfg.restarts.max(1), |r| {
            let mut rng = par::stream_rng(seed, r as u64);
            let k0: Vec<f64> = (0..p.ns()).flat_map(|_| sample::dirichlet(&mut rng, p.card)).collect();
            iterate(p, k0, cfg)
        });
        let i = par::argmin_first(&runs, |r| r.1)?;
        let (kernel, value, converged) = runs.into_iter().nth(i)?;
        Some(SubSolution { value, kernel, converged, strategy: self.name().into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::single_letter::bottleneck::tests::bsc;

    #[test]
    fn trivial_when_compression_dominates() {
        // w_s ≥ w_t: data processing makes the constant kernel optimal
        let p = bsc([0.5, 0.5], 0.1, 2.0, 1.0, 3);
        let s = Alternating.solve(&p, &SolverConfig::default(), 1).unwrap();
        assert!(s.value.abs() < 1e-9, "{}", s.value);
    }

    #[test]
    fn copy_when_relevance_is_free() {
        // w_s = 0: U = S is optimal, value −w_t I(S;T)
        let p = bsc([0.3, 0.7], 0.2, 0.0, 1.5, 3);
        let (_, ist) = p.informations(&p.identity_kernel().unwrap());
        let s = Alternating.solve(&p, &SolverConfig::default(), 2).unwrap();
        assert!((s.value + 1.5 * ist).abs() < 1e-9, "{} vs {}", s.value, -1.5 * ist);
    }

    #[test]
    fn step_keeps_rows_stochastic() {
        let p = bsc([0.4, 0.6], 0.15, 1.0, 2.0, 3);
        let k = vec![0.2, 0.3, 0.5, 0.6, 0.1, 0.3];
        let n = step(&p, &k, 0.5);
        for r in n.chunks(3) {
            assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
