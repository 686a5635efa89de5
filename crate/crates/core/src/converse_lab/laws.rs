//! Message laws under the true source, the independence reference and the
//! truncated source.

use super::sets::{AcceptanceSets, SourcePowers};
use super::truncation::{marginals, TruncationArtifacts};
use crate::code_model::{TwoHopCode, H0};

#[derive(Debug, Clone)]
pub struct ChainLaws {
    /// P_{M1} under the true source
    pub p_m1: Vec<f64>,
    /// P̄_{M2}: push of P_{M1}·P_Y^n through f2
    pub pbar_m2: Vec<f64>,
    pub beta2: f64,
    pub eta2: f64,
    pub tx: Vec<f64>,
    pub ty: Vec<f64>,
    pub tz: Vec<f64>,
    /// P_{M̃1 Ỹ}, flat m1·|Y^n| + y
    pub t_m1y: Vec<f64>,
    pub t_m1: Vec<f64>,
    /// P_{M̃2 Ỹ}, flat m2·|Y^n| + y
    pub t_m2y: Vec<f64>,
    pub t_m2: Vec<f64>,
    /// P_{M̃2 Z̃}, flat m2·|Z^n| + z
    pub t_m2z: Vec<f64>,
    /// P̄_{M̃2}: push of P_{M̃1}·P_Ỹ through f2
    pub tbar_m2: Vec<f64>,
}

fn push_m2(code: &TwoHopCode, pm1: &[f64], py: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; code.n2];
    for (m1, &a) in pm1.iter().enumerate() {
        if a > 0.0 {
            for (y, &b) in py.iter().enumerate() {
                out[code.f2[m1][y]] += a * b;
            }
        }
    }
    out
}

pub fn chain_laws(code: &TwoHopCode, pw: &SourcePowers, sets: &AcceptanceSets, art: &TruncationArtifacts) -> ChainLaws {
    let (xs, ys, zs) = (pw.xs, pw.ys, pw.zs);
    let mut p_m1 = vec![0.0; code.n1];
    for x in 0..xs {
        p_m1[code.f1[x]] += pw.px[x];
    }
    let pbar_m2 = push_m2(code, &p_m1, &pw.py);
    let mut beta2 = 0.0;
    for (m1, &a) in p_m1.iter().enumerate() {
        for y in 0..ys {
            if code.g1[m1][y] == H0 {
                beta2 += a * pw.py[y];
            }
        }
    }
    let mut eta2 = 0.0;
    for (m2, &a) in pbar_m2.iter().enumerate() {
        if a > 0.0 {
            let pg: f64 = sets.g[m2].iter().zip(&pw.pz).filter(|(g, _)| **g).map(|(_, p)| p).sum();
            eta2 += a * pg;
        }
    }
    let (tx, ty, tz) = marginals(art, pw);
    let mut t_m1y = vec![0.0; code.n1 * ys];
    let mut t_m2y = vec![0.0; code.n2 * ys];
    for x in 0..xs {
        let m1 = code.f1[x];
        for y in 0..ys {
            let p = art.trunc_xy[x * ys + y];
            if p > 0.0 {
                t_m1y[m1 * ys + y] += p;
                t_m2y[code.f2[m1][y] * ys + y] += p;
            }
        }
    }
    let row_sums = |t: &[f64]| t.chunks(ys).map(|r| r.iter().sum()).collect::<Vec<f64>>();
    let t_m1 = row_sums(&t_m1y);
    let t_m2 = row_sums(&t_m2y);
    let mut t_m2z = vec![0.0; code.n2 * zs];
    for m2 in 0..code.n2 {
        for y in 0..ys {
            let p = t_m2y[m2 * ys + y];
            if p > 0.0 {
                for z in 0..zs {
                    t_m2z[m2 * zs + z] += p * pw.pz_given_y[y * zs + z];
                }
            }
        }
    }
    let tbar_m2 = push_m2(code, &t_m1, &ty);
    ChainLaws { p_m1, pbar_m2, beta2, eta2, tx, ty, tz, t_m1y, t_m1, t_m2y, t_m2, t_m2z, tbar_m2 }
}

/// D(p‖a⊗b) for p flat a-major.
pub(crate) fn kl_product(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let nb = b.len();
    let mut d = 0.0;
    for (i, &v) in p.iter().enumerate() {
        if v > 0.0 {
            let q = a[i / nb] * b[i % nb];
            if q <= 0.0 {
                return f64::INFINITY;
            }
            d += v * (v / q).ln();
        }
    }
    d.max(0.0)
}
