//! Neyman-Pearson frontiers over deterministic tests on (message, sequence)
//! cells.

use crate::code_model::{seq, TwoHopCode, EXACT_BUDGET};
use crate::error::{Error, Result};
use crate::prob::TwoHopSource;
use serde::Serialize;

/// Largest tied group whose subsets are all enumerated.
pub const MAX_TIE_GROUP: usize = 12;

/// One deterministic test: `accept[cell]` with cell = m·cols + seq.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestPoint {
    /// type-I error (reject mass under H0)
    pub type1: f64,
    /// type-II error (accept mass under H1)
    pub type2: f64,
    #[serde(skip)]
    pub accept: Vec<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Frontier {
    pub relay: Vec<TestPoint>,
    pub receiver: Vec<TestPoint>,
    pub warnings: Vec<String>,
}

/// Cell masses under H0 and H1 for both decoders of an encoder pair.
#[derive(Debug, Clone)]
pub struct CellLaws {
    pub rows1: usize,
    pub cols1: usize,
    pub h0_relay: Vec<f64>,
    pub h1_relay: Vec<f64>,
    pub rows2: usize,
    pub cols2: usize,
    pub h0_recv: Vec<f64>,
    pub h1_recv: Vec<f64>,
}

/// Precomputed product laws for the oracle.
#[derive(Debug, Clone)]
pub struct OracleSource {
    pub n: usize,
    pub xs: usize,
    pub ys: usize,
    pub zs: usize,
    pub px: Vec<f64>,
    pub py: Vec<f64>,
    pub pz: Vec<f64>,
    pub pxy: Vec<f64>,
    pub pz_given_y: Vec<f64>,
}

impl OracleSource {
    pub fn new(s: &TwoHopSource, n: usize) -> Result<Self> {
        let pw = crate::converse_lab::SourcePowers::new(s, n)?;
        Ok(OracleSource { n, xs: pw.xs, ys: pw.ys, zs: pw.zs, px: pw.px, py: pw.py, pz: pw.pz, pxy: pw.pxy, pz_given_y: pw.pz_given_y })
    }
}

pub fn cell_laws(os: &OracleSource, f1: &[usize], n1: usize, f2: &[Vec<usize>], n2: usize) -> CellLaws {
    let (xs, ys, zs) = (os.xs, os.ys, os.zs);
    let mut h0_relay = vec![0.0; n1 * ys];
    let mut pm1 = vec![0.0; n1];
    let mut m2y = vec![0.0; n2 * ys];
    for x in 0..xs {
        let m1 = f1[x];
        pm1[m1] += os.px[x];
        for y in 0..ys {
            let p = os.pxy[x * ys + y];
            h0_relay[m1 * ys + y] += p;
            m2y[f2[m1][y] * ys + y] += p;
        }
    }
    let mut h1_relay = vec![0.0; n1 * ys];
    let mut pbar = vec![0.0; n2];
    for m1 in 0..n1 {
        for y in 0..ys {
            h1_relay[m1 * ys + y] = pm1[m1] * os.py[y];
            pbar[f2[m1][y]] += pm1[m1] * os.py[y];
        }
    }
    let mut h0_recv = vec![0.0; n2 * zs];
    for m2 in 0..n2 {
        for y in 0..ys {
            let p = m2y[m2 * ys + y];
            if p > 0.0 {
                for z in 0..zs {
                    h0_recv[m2 * zs + z] += p * os.pz_given_y[y * zs + z];
                }
            }
        }
    }
    let mut h1_recv = vec![0.0; n2 * zs];
    for m2 in 0..n2 {
        for z in 0..zs {
            h1_recv[m2 * zs + z] = pbar[m2] * os.pz[z];
        }
    }
    CellLaws { rows1: n1, cols1: ys, h0_relay, h1_relay, rows2: n2, cols2: zs, h0_recv, h1_recv }
}

fn errors_of(accept: &[bool], h0: &[f64], h1: &[f64]) -> (f64, f64) {
    let mut a0: Vec<f64> = Vec::new();
    let mut a1: Vec<f64> = Vec::new();
    for (i, &a) in accept.iter().enumerate() {
        if a {
            a0.push(h0[i]);
            a1.push(h1[i]);
        }
    }
    a0.sort_by(f64::total_cmp);
    a1.sort_by(f64::total_cmp);
    ((1.0 - a0.iter().sum::<f64>()).max(0.0), a1.iter().sum())
}

/// (type-I, type-II) of an arbitrary acceptance mask.
pub fn test_errors(accept: &[bool], h0: &[f64], h1: &[f64]) -> (f64, f64) {
    errors_of(accept, h0, h1)
}

fn same_lr(a: (f64, f64), b: (f64, f64)) -> bool {
    // p0/p1 equality without dividing
    let l = a.0 * b.1;
    let r = b.0 * a.1;
    (l - r).abs() <= 1e-12 * l.abs().max(r.abs())
}

/// All threshold tests, with every subset of the tied group at each
/// threshold (prefix subsets only for groups above [`MAX_TIE_GROUP`]).
pub fn lrt_candidates(h0: &[f64], h1: &[f64], warnings: &mut Vec<String>) -> Vec<TestPoint> {
    let cells: Vec<usize> = (0..h0.len()).filter(|&i| h0[i] > 0.0 || h1[i] > 0.0).collect();
    let mut order = cells.clone();
    // descending p0/p1, ∞ first; ties by index
    order.sort_by(|&a, &b| (h0[b] * h1[a]).total_cmp(&(h0[a] * h1[b])).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &c in &order {
        match groups.last_mut() {
            Some(g) if same_lr((h0[g[0]], h1[g[0]]), (h0[c], h1[c])) => g.push(c),
            _ => groups.push(vec![c]),
        }
    }
    let mut cand: Vec<Vec<bool>> = Vec::new();
    let mut base = vec![false; h0.len()];
    cand.push(base.clone());
    for g in &groups {
        if g.len() <= MAX_TIE_GROUP {
            for mask in 1u32..(1u32 << g.len()) {
                let mut a = base.clone();
                for (k, &c) in g.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        a[c] = true;
                    }
                }
                cand.push(a);
            }
        } else {
            warnings.push(format!("tied group of {} cells: only prefix subsets enumerated", g.len()));
            let mut a = base.clone();
            for &c in g {
                a[c] = true;
                cand.push(a.clone());
            }
        }
        for &c in g {
            base[c] = true;
        }
    }
    cand.into_iter()
        .map(|a| {
            let (t1, t2) = errors_of(&a, h0, h1);
            TestPoint { type1: t1, type2: t2, accept: a }
        })
        .collect()
}

/// Pareto set of [`lrt_candidates`], one test per point.
pub fn lrt_frontier(h0: &[f64], h1: &[f64], warnings: &mut Vec<String>) -> Vec<TestPoint> {
    let mut pts = lrt_candidates(h0, h1, warnings);
    pts.sort_by(|a, b| a.type1.total_cmp(&b.type1).then(a.type2.total_cmp(&b.type2)));
    let mut out: Vec<TestPoint> = Vec::new();
    for p in pts {
        if out.last().map_or(true, |q: &TestPoint| p.type2 < q.type2) {
            out.push(p);
        }
    }
    out
}

/// Best type-II error among frontier tests with type-I ≤ `eps`; first such
/// point on ties.
pub fn best_under(front: &[TestPoint], eps: f64, tol: f64) -> Option<&TestPoint> {
    front.iter().filter(|p| p.type1 <= eps + tol).min_by(|a, b| a.type2.total_cmp(&b.type2))
}

/// Frontiers of the relay and receiver tests for the encoders of `code`.
pub fn np_frontier(code: &TwoHopCode, s: &TwoHopSource, n: usize) -> Result<Frontier> {
    if code.n != n {
        return Err(Error::Shape(format!("code has n = {}, requested {n}", code.n)));
    }
    let xs = seq::count(s.nx(), n, EXACT_BUDGET)? as u128;
    let ys = seq::count(s.ny(), n, EXACT_BUDGET)? as u128;
    if xs * ys > EXACT_BUDGET {
        return Err(Error::Budget { what: format!("X^n×Y^n at n = {n}"), needed: xs * ys, limit: EXACT_BUDGET });
    }
    let os = OracleSource::new(s, n)?;
    let cl = cell_laws(&os, &code.f1, code.n1, &code.f2, code.n2);
    let mut warnings = Vec::new();
    let relay = lrt_frontier(&cl.h0_relay, &cl.h1_relay, &mut warnings);
    let receiver = lrt_frontier(&cl.h0_recv, &cl.h1_recv, &mut warnings);
    Ok(Frontier { relay, receiver, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn independent_source_is_diagonal() {
        let s = TwoHopSource::independent(&[0.5, 0.5], &[0.5, 0.5], &[0.5, 0.5]).unwrap();
        let mut code = TwoHopCode::accept_all(&s, 1).unwrap();
        code.n1 = 2;
        code.f1 = vec![0, 1];
        code.g1 = vec![vec![0, 0]; 2];
        code.f2 = vec![vec![0, 0]; 2];
        let f = np_frontier(&code, &s, 1).unwrap();
        for p in &f.relay {
            assert!((p.type1 + p.type2 - 1.0).abs() < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn copy_source_match_test() {
        let s = TwoHopSource::from_arrays(vec![vec![0.5, 0.0], vec![0.0, 0.5]], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let mut code = TwoHopCode::accept_all(&s, 1).unwrap();
        code.n1 = 2;
        code.f1 = vec![0, 1];
        code.g1 = vec![vec![0, 0]; 2];
        code.f2 = vec![vec![0, 0]; 2];
        let f = np_frontier(&code, &s, 1).unwrap();
        assert!(f.relay.iter().any(|p| p.type1.abs() < 1e-15 && (p.type2 - 0.5).abs() < 1e-15));
    }

    #[test]
    fn random_tests_never_beat_the_frontier() {
        let s = TwoHopSource::dsbs(0.1, 0.2);
        let os = OracleSource::new(&s, 2).unwrap();
        let f1 = vec![0, 1, 1, 0];
        let f2 = vec![vec![0, 1, 0, 1], vec![1, 1, 0, 0]];
        let cl = cell_laws(&os, &f1, 2, &f2, 2);
        let mut w = Vec::new();
        let front = lrt_frontier(&cl.h0_relay, &cl.h1_relay, &mut w);
        let mut rng = crate::par::stream_rng(11, 0);
        for _ in 0..1000 {
            let a: Vec<bool> = (0..8).map(|_| rng.gen()).collect();
            let (t1, t2) = test_errors(&a, &cl.h0_relay, &cl.h1_relay);
            for p in &front {
                assert!(!(t1 < p.type1 - 1e-12 && t2 < p.type2 - 1e-12), "({t1},{t2}) beats {p:?}");
            }
        }
    }
}
