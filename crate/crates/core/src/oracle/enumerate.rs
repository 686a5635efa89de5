//! Encoder enumeration up to message relabeling.

use crate::error::{Error, Result};
use rand::Rng;

/// Largest raw encoder space N1^{|X^n|}·N2^{N1·|Y^n|} searched exhaustively.
pub const ENCODER_LIMIT: u128 = 100_000_000;

/// Restricted growth strings of length `len` with at most `k` blocks, in
/// lexicographic order.
pub fn rgs(len: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if len == 0 || k == 0 {
        if len == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0usize; len];
    fn rec(i: usize, max: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=(max + 1).min(k - 1) {
            cur[i] = v;
            rec(i + 1, max.max(v), k, cur, out);
        }
    }
    rec(1, 0, k, &mut cur, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncoderPair {
    pub f1: Vec<usize>,
    /// f2[m1][y]
    pub f2: Vec<Vec<usize>>,
}

pub fn raw_encoder_count(xs: usize, ys: usize, n1: usize, n2: usize) -> u128 {
    let p = |b: usize, e: usize| -> u128 {
        let mut r: u128 = 1;
        for _ in 0..e {
            r = r.saturating_mul(b as u128);
        }
        r
    };
    p(n1, xs).saturating_mul(p(n2, n1 * ys))
}

/// One representative per relabeling class of (f1, f2). Rows of f2 for
/// messages f1 never uses are fixed to 0.
pub fn canonical_encoders(xs: usize, ys: usize, n1: usize, n2: usize) -> Result<Vec<EncoderPair>> {
    let raw = raw_encoder_count(xs, ys, n1, n2);
    if raw > ENCODER_LIMIT {
        return Err(Error::Budget {
            what: format!("encoder space N1^|X^n|·N2^(N1·|Y^n|) (use sampling mode)"),
            needed: raw,
            limit: ENCODER_LIMIT,
        });
    }
    let mut out = Vec::new();
    for f1 in rgs(xs, n1) {
        let used = f1.iter().max().map_or(0, |m| m + 1);
        for flat in rgs(used * ys, n2) {
            let mut f2: Vec<Vec<usize>> = flat.chunks(ys).map(|r| r.to_vec()).collect();
            f2.resize(n1, vec![0; ys]);
            out.push(EncoderPair { f1: f1.clone(), f2 });
        }
    }
    Ok(out)
}

/// Uniform random encoder pairs (not canonicalized).
pub fn sample_encoders(xs: usize, ys: usize, n1: usize, n2: usize, count: usize, seed: u64) -> Vec<EncoderPair> {
    let mut rng = crate::par::stream_rng(seed, 0);
    (0..count)
        .map(|_| EncoderPair {
            f1: (0..xs).map(|_| rng.gen_range(0..n1)).collect(),
            f2: (0..n1).map(|_| (0..ys).map(|_| rng.gen_range(0..n2)).collect()).collect(),
        })
        .collect()
}
