//! The scalar sub-problem behind every single-letter objective:
//! minimize `w_s·I(U;S) − w_t·I(U;T)` over kernels S→U, where T is
//! drawn from S through a fixed channel.

use crate::error::{Error, Result};
use crate::par;
use serde::{Deserialize, Serialize};

use super::alternating::Alternating;
use super::envelope::Envelope;

#[derive(Debug, Clone)]
pub struct SubProblem {
    pub ps: Vec<f64>,
    /// Channel p(t|s), row-major `|S| × |T|`.
    pub channel: Vec<f64>,
    pub nt: usize,
    pub w_s: f64,
    pub w_t: f64,
    pub card: usize,
}

impl SubProblem {
    pub fn ns(&self) -> usize {
        self.ps.len()
    }

    /// Marginal of U and joint of (U,T) under a kernel `|S| × card`.
    pub(crate) fn laws(&self, k: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let nu = self.card;
        let nt = self.nt;
        let mut pu = vec![0.0; nu];
        let mut put = vec![0.0; nu * nt];
        for s in 0..self.ns() {
            let p = self.ps[s];
            if p <= 0.0 {
                continue;
            }
            let row = &self.channel[s * nt..(s + 1) * nt];
            for u in 0..nu {
                let m = p * k[s * nu + u];
                if m <= 0.0 {
                    continue;
                }
                pu[u] += m;
                for t in 0..nt {
                    put[u * nt + t] += m * row[t];
                }
            }
        }
        (pu, put)
    }

    /// (I(U;S), I(U;T)) under kernel `k`.
    pub fn informations(&self, k: &[f64]) -> (f64, f64) {
        let nu = self.card;
        let (pu, put) = self.laws(k);
        let mut ius = 0.0;
        for s in 0..self.ns() {
            let p = self.ps[s];
            if p <= 0.0 {
                continue;
            }
            for u in 0..nu {
                let q = k[s * nu + u];
                if q > 0.0 {
                    ius += p * q * (q / pu[u]).ln();
                }
            }
        }
        let mut pt = vec![0.0; self.nt];
        for u in 0..nu {
            for t in 0..self.nt {
                pt[t] += put[u * self.nt + t];
            }
        }
        let mut iut = 0.0;
        for u in 0..nu {
            for t in 0..self.nt {
                let m = put[u * self.nt + t];
                if m > 0.0 {
                    iut += m * (m / (pu[u] * pt[t])).ln();
                }
            }
        }
        (ius.max(0.0), iut.max(0.0))
    }

    pub fn objective(&self, k: &[f64]) -> f64 {
        let (a, b) = self.informations(k);
        self.w_s * a - self.w_t * b
    }

    /// Kernel sending every input to symbol 0.
    pub fn constant_kernel(&self) -> Vec<f64> {
        let mut k = vec![0.0; self.ns() * self.card];
        for s in 0..self.ns() {
            k[s * self.card] = 1.0;
        }
        k
    }

    /// Kernel copying S into U (needs card ≥ |S|).
    pub fn identity_kernel(&self) -> Option<Vec<f64>> {
        if self.card < self.ns() {
            return None;
        }
        let mut k = vec![0.0; self.ns() * self.card];
        for s in 0..self.ns() {
            k[s * self.card + s] = 1.0;
        }
        Some(k)
    }
}

fn default_restarts() -> usize {
    64
}
fn default_damping() -> f64 {
    0.5
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    10_000
}
fn default_grid_step() -> f64 {
    0.02
}
fn default_refine_step() -> f64 {
    0.002
}
fn default_grid_max_inputs() -> usize {
    3
}
fn default_gamma_restarts() -> usize {
    8
}
fn default_strategies() -> Vec<String> {
    vec!["alternating".into(), "grid".into()]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_damping")]
    pub damping: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    #[serde(default = "default_refine_step")]
    pub refine_step: f64,
    /// The grid strategy runs only when |S| is at most this.
    #[serde(default = "default_grid_max_inputs")]
    pub grid_max_inputs: usize,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<String>,
    /// Descent starts for the band-constrained objective.
    #[serde(default = "default_gamma_restarts")]
    pub gamma_restarts: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubSolution {
    pub value: f64,
    /// Kernel `|S| × card`, row-major.
    pub kernel: Vec<f64>,
    pub converged: bool,
    pub strategy: String,
}

pub trait KernelSolver: Send + Sync {
    fn name(&self) -> &'static str;
    /// None when the strategy does not apply to this instance.
    fn solve(&self, p: &SubProblem, cfg: &SolverConfig, seed: u64) -> Option<SubSolution>;
}

pub fn registry() -> Vec<Box<dyn KernelSolver>> {
    vec![Box::new(Alternating), Box::new(Envelope)]
}

pub fn lookup(name: &str) -> Result<Box<dyn KernelSolver>> {
    registry()
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| Error::UnknownStrategy(name.to_string()))
}

/// Run every configured strategy and keep the smallest value (first on ties).
pub fn solve(p: &SubProblem, cfg: &SolverConfig, seed: u64) -> Result<SubSolution> {
    if p.w_s < 0.0 || p.w_t < 0.0 {
        return Err(Error::Domain("weights must be nonnegative".into()));
    }
    if p.card == 0 {
        return Err(Error::Domain("auxiliary cardinality must be positive".into()));
    }
    let mut cands = Vec::new();
    // constant kernel is always feasible and has value 0
    cands.push(SubSolution { value: 0.0, kernel: p.constant_kernel(), converged: true, strategy: "constant".into() });
    for (i, name) in cfg.strategies.iter().enumerate() {
        let s = lookup(name)?;
        if let Some(sol) = s.solve(p, cfg, par::derive_seed(seed, i as u64)) {
            cands.push(sol);
        }
    }
    let best = par::argmin_first(&cands, |c| c.value).expect("constant candidate");
    let mut out = cands.swap_remove(best);
    out.converged = cands.iter().all(|c| c.converged) && out.converged;
    Ok(out)
}
