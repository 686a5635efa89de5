//! The truncated source law supported on C_n = B_n ∩ D_Y ∩ (X^n × T_n).

use super::sets::{acceptance_sets, AcceptanceSets, SourcePowers};
use crate::code_model::{seq, TwoHopCode};
use crate::error::{Error, Result};
use crate::ledger::{Entry, Ledger};
use crate::prob::{source_constants, tau, tensor, TwoHopSource};
use serde::Serialize;

/// Slack when comparing measured type-I errors with their budgets.
pub const TYPE1_TOL: f64 = 1e-12;

pub(crate) const TYPICAL_NOTE: &str = "needs P_Y^n(T_n) ≥ 1 − (1−ε1−ε2)/4, which fails at this n";

#[derive(Debug, Clone, Serialize)]
pub struct TruncationArtifacts {
    pub n: usize,
    pub eps1: f64,
    pub eps2: f64,
    pub tau: f64,
    pub theta_n: f64,
    #[serde(skip)]
    pub b: Vec<bool>,
    #[serde(skip)]
    pub c: Vec<bool>,
    #[serde(skip)]
    pub typical: Vec<bool>,
    pub mass_b: f64,
    pub mass_dy: f64,
    pub mass_typical: f64,
    pub mass_c: f64,
    /// Truncated (X^n, Y^n) law, flat x·|Y^n| + y; Z^n follows P_{Z|Y}^n.
    #[serde(skip)]
    pub trunc_xy: Vec<f64>,
    /// P_Y^n(T_n) ≥ 1 − (1−ε1−ε2)/4.
    pub typical_premise: bool,
    /// Measured β1 and η1.
    pub beta1: f64,
    pub eta1: f64,
    pub ledger: Ledger,
}

impl TruncationArtifacts {
    /// (1 − ε1 − ε2)/2, the premise-level lower bound on P(C_n).
    pub fn half_slack(&self) -> f64 {
        (1.0 - self.eps1 - self.eps2) / 2.0
    }

    /// Full truncated law over (x, y, z), flat (x·|Y^n| + y)·|Z^n| + z.
    pub fn truncated_xyz(&self, pw: &SourcePowers) -> Vec<f64> {
        let zs = pw.zs;
        let mut out = vec![0.0; self.trunc_xy.len() * zs];
        for (xy, &p) in self.trunc_xy.iter().enumerate() {
            if p > 0.0 {
                let y = xy % pw.ys;
                for z in 0..zs {
                    out[xy * zs + z] = p * pw.pz_given_y[y * zs + z];
                }
            }
        }
        out
    }
}

/// T_n(P_Y): sequences whose type is within θ_n·P_Y(y) of P_Y(y) for every y.
pub fn typical_set(s: &TwoHopSource, n: usize, theta_n: f64) -> Result<Vec<bool>> {
    let ys = seq::count(s.ny(), n, crate::code_model::EXACT_BUDGET)?;
    Ok((0..ys)
        .map(|y| {
            let mut cnt = vec![0usize; s.ny()];
            for d in seq::digits(y, s.ny(), n) {
                cnt[d] += 1;
            }
            cnt.iter().zip(s.py()).all(|(&k, &p)| (k as f64 / n as f64 - p).abs() <= theta_n * p)
        })
        .collect())
}

/// Measured (β1, η1) from the acceptance sets.
pub fn type1_errors(code: &TwoHopCode, pw: &SourcePowers, sets: &AcceptanceSets) -> (f64, f64) {
    let ys = pw.ys;
    let mut acc_y = Vec::new();
    let mut acc_z = Vec::new();
    for x in 0..pw.xs {
        for y in 0..ys {
            let p = pw.pxy[x * ys + y];
            if p > 0.0 {
                if sets.d_y[x * ys + y] {
                    acc_y.push(p);
                }
                acc_z.push(p * sets.g_given_y[AcceptanceSets::m2_of(code, x, y) * ys + y]);
            }
        }
    }
    let sum = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v.iter().sum::<f64>()
    };
    ((1.0 - sum(acc_y)).max(0.0), (1.0 - sum(acc_z)).max(0.0))
}

pub fn build_truncation(code: &TwoHopCode, s: &TwoHopSource, n: usize, eps1: f64, eps2: f64) -> Result<TruncationArtifacts> {
    let pw = SourcePowers::new(s, n)?;
    let sets = acceptance_sets(code, &pw)?;
    build_truncation_with(code, s, &pw, &sets, eps1, eps2)
}

/// As [`build_truncation`] with precomputed powers and sets.
pub fn build_truncation_with(
    code: &TwoHopCode,
    s: &TwoHopSource,
    pw: &SourcePowers,
    sets: &AcceptanceSets,
    eps1: f64,
    eps2: f64,
) -> Result<TruncationArtifacts> {
    let n = pw.n;
    let k = source_constants(s, n, eps1, eps2)?;
    let t = tau(eps1, eps2);
    let (beta1, eta1) = type1_errors(code, pw, sets);
    if beta1 > eps1 + TYPE1_TOL {
        return Err(Error::Premise(format!("relay type-I error {beta1:.6} exceeds ε1 = {eps1}")));
    }
    if eta1 > eps2 + TYPE1_TOL {
        return Err(Error::Premise(format!("receiver type-I error {eta1:.6} exceeds ε2 = {eps2}")));
    }
    let (xs, ys) = (pw.xs, pw.ys);
    let typical = typical_set(s, n, k.theta_n)?;
    let mut b = vec![false; xs * ys];
    let mut c = vec![false; xs * ys];
    let (mut mass_b, mut mass_dy, mut mass_c) = (0.0, 0.0, 0.0);
    for x in 0..xs {
        for y in 0..ys {
            let i = x * ys + y;
            let p = pw.pxy[i];
            b[i] = sets.g_given_y[AcceptanceSets::m2_of(code, x, y) * ys + y] >= t;
            c[i] = b[i] && sets.d_y[i] && typical[y];
            if b[i] {
                mass_b += p;
            }
            if sets.d_y[i] {
                mass_dy += p;
            }
            if c[i] {
                mass_c += p;
            }
        }
    }
    let mass_typical: f64 = pw.py.iter().zip(&typical).filter(|(_, t)| **t).map(|(p, _)| p).sum();
    if mass_c <= 0.0 {
        return Err(Error::Premise("P(C_n) = 0; the truncated law is undefined".into()));
    }
    let trunc_xy: Vec<f64> = pw.pxy.iter().zip(&c).map(|(&p, &ci)| if ci { p / mass_c } else { 0.0 }).collect();
    let typical_premise = mass_typical >= 1.0 - (1.0 - eps1 - eps2) / 4.0;

    let mut l = Ledger::new();
    let mismatch = (0..xs * ys).filter(|&i| c[i] != (b[i] && sets.d_y[i] && typical[i % ys])).count();
    l.push(Entry::eq("trunc_c_is_intersection", mismatch as f64, 0.0, 0.0));
    l.push(Entry::ge("trunc_b_mass", mass_b, (3.0 - 3.0 * eps2 + eps1) / 4.0));
    l.push(Entry::ge("trunc_dy_mass", mass_dy, 1.0 - eps1));
    l.push(Entry::ge("trunc_typical_mass", mass_typical, 1.0 - (1.0 - eps1 - eps2) / 4.0).premise(typical_premise, "typicality mass premise fails at this n"));
    l.push(Entry::ge("trunc_c_mass_union", mass_c, 1.0 - (1.0 - mass_b) - (1.0 - mass_dy) - (1.0 - mass_typical)));
    let half = (1.0 - eps1 - eps2) / 2.0;
    l.push(Entry::ge("trunc_c_mass_half", mass_c, half).premise(typical_premise, TYPICAL_NOTE));
    let outside: f64 = trunc_xy.iter().zip(&c).filter(|(_, ci)| !**ci).map(|(p, _)| p).sum();
    l.push(Entry::eq("trunc_support_in_c", outside, 0.0, 0.0));
    let kl_xy = tensor::kl(&trunc_xy, &pw.pxy);
    l.push(Entry::eq("trunc_kl_identity", kl_xy, -mass_c.ln(), 1e-12));
    let art = TruncationArtifacts {
        n,
        eps1,
        eps2,
        tau: t,
        theta_n: k.theta_n,
        b,
        c,
        typical,
        mass_b,
        mass_dy,
        mass_typical,
        mass_c,
        trunc_xy,
        typical_premise,
        beta1,
        eta1,
        ledger: l,
    };
    let xyz = art.truncated_xyz(pw);
    let mut true_xyz = vec![0.0; xyz.len()];
    for (xy, &p) in pw.pxy.iter().enumerate() {
        let y = xy % ys;
        for z in 0..pw.zs {
            true_xyz[xy * pw.zs + z] = p * pw.pz_given_y[y * pw.zs + z];
        }
    }
    let kl_xyz = tensor::kl(&xyz, &true_xyz);
    let markov = markov_gap(&xyz, pw);
    let mut art = art;
    art.ledger.push(Entry::eq("trunc_kl_xyz_equals_xy", kl_xyz, kl_xy, 1e-12));
    art.ledger.push(Entry::le("trunc_kl_bound", kl_xy, (1.0 / half).ln()).premise(typical_premise, TYPICAL_NOTE));
    art.ledger.push(Entry::eq("trunc_markov_preserved", markov, 0.0, 1e-12));
    let (tx, ty, tz) = marginals(&art, pw);
    for (name, tm, pm) in [("x", &tx, &pw.px), ("y", &ty, &pw.py), ("z", &tz, &pw.pz)] {
        let r = max_ratio(tm, pm);
        art.ledger.push(Entry::le(&format!("trunc_dominance_{name}_free"), r, 1.0 / mass_c));
        art.ledger.push(Entry::le(&format!("trunc_dominance_{name}"), r, 1.0 / half).premise(typical_premise, TYPICAL_NOTE));
    }
    Ok(art)
}

/// Truncated marginals of X^n, Y^n, Z^n.
pub fn marginals(art: &TruncationArtifacts, pw: &SourcePowers) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (xs, ys, zs) = (pw.xs, pw.ys, pw.zs);
    let mut tx = vec![0.0; xs];
    let mut ty = vec![0.0; ys];
    for x in 0..xs {
        for y in 0..ys {
            let p = art.trunc_xy[x * ys + y];
            tx[x] += p;
            ty[y] += p;
        }
    }
    let mut tz = vec![0.0; zs];
    for y in 0..ys {
        if ty[y] > 0.0 {
            for z in 0..zs {
                tz[z] += ty[y] * pw.pz_given_y[y * zs + z];
            }
        }
    }
    (tx, ty, tz)
}

/// max p/q over the support of p; +∞ if q vanishes there.
pub(crate) fn max_ratio(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(a, _)| **a > 0.0).map(|(a, b)| if *b > 0.0 { a / b } else { f64::INFINITY }).fold(0.0, f64::max)
}

/// Largest |P(z|y) − P^n_{Z|Y}(z|y)| over y in the support of the truncated law.
fn markov_gap(xyz: &[f64], pw: &SourcePowers) -> f64 {
    let (xs, ys, zs) = (pw.xs, pw.ys, pw.zs);
    let mut yz = vec![0.0; ys * zs];
    for x in 0..xs {
        for y in 0..ys {
            for z in 0..zs {
                yz[y * zs + z] += xyz[(x * ys + y) * zs + z];
            }
        }
    }
    let mut worst: f64 = 0.0;
    for y in 0..ys {
        let row = &yz[y * zs..(y + 1) * zs];
        let m: f64 = row.iter().sum();
        if m > 0.0 {
            for z in 0..zs {
                worst = worst.max((row[z] / m - pw.pz_given_y[y * zs + z]).abs());
            }
        }
    }
    worst
}
