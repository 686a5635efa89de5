//! Random-codebook quantize-and-test codes with likelihood-ratio-sum
//! typicality tests.

use crate::code_model::{seq, TwoHopCode, H0, H1};
use crate::error::{Error, Result};
use crate::par;
use crate::prob::{Kernel, TwoHopSource};
use crate::single_letter::AuxCoupling;
use rand::distributions::{Distribution, WeightedIndex};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Most codewords drawn for one codebook.
pub const CODEBOOK_LIMIT: u128 = 1 << 22;
/// Floor for log-probabilities in the fallback encoder.
const LOG_FLOOR: f64 = -50.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantizeBin {
    pub code: TwoHopCode,
    /// Distinct codewords in each codebook.
    pub codebook_sizes: (usize, usize),
    /// Whether the relay decision bit is carried in M2.
    pub forwards_bit: bool,
    pub warnings: Vec<String>,
}

struct Side {
    /// pmf of the auxiliary symbol
    pa: Vec<f64>,
    /// log(P_{A,S}/(P_A P_S)) per (a, s) for the encoding side
    lr_enc: Vec<f64>,
    /// same for the testing side
    lr_test: Vec<f64>,
    /// floored log P_{A|S}(a|s)
    log_k: Vec<f64>,
    i_enc: f64,
    i_test: f64,
    ns: usize,
    nt: usize,
}

fn lg(v: f64) -> f64 {
    if v > 0.0 { v.ln() } else { f64::NEG_INFINITY }
}

/// Build the statistics for an auxiliary A drawn from S through `k`, tested
/// against T with P_{T|S} given by `t_given_s`.
fn side(ps: &[f64], k: &Kernel, t_given_s: &[f64], nt: usize) -> Side {
    let (ns, na) = (ps.len(), k.outputs());
    let mut pa = vec![0.0; na];
    let mut pat = vec![0.0; na * nt];
    let mut pt = vec![0.0; nt];
    for s in 0..ns {
        for a in 0..na {
            let m = ps[s] * k.row(s)[a];
            pa[a] += m;
            for t in 0..nt {
                pat[a * nt + t] += m * t_given_s[s * nt + t];
            }
        }
        for t in 0..nt {
            pt[t] += ps[s] * t_given_s[s * nt + t];
        }
    }
    let mut lr_enc = vec![f64::NEG_INFINITY; na * ns];
    let mut log_k = vec![LOG_FLOOR; na * ns];
    let mut i_enc = 0.0;
    for a in 0..na {
        for s in 0..ns {
            let kv = k.row(s)[a];
            if kv > 0.0 && pa[a] > 0.0 {
                lr_enc[a * ns + s] = (kv / pa[a]).ln();
                log_k[a * ns + s] = kv.ln().max(LOG_FLOOR);
                i_enc += ps[s] * kv * lr_enc[a * ns + s];
            }
        }
    }
    let mut lr_test = vec![f64::NEG_INFINITY; na * nt];
    let mut i_test = 0.0;
    for a in 0..na {
        for t in 0..nt {
            let m = pat[a * nt + t];
            if m > 0.0 {
                lr_test[a * nt + t] = lg(m / (pa[a] * pt[t]));
                i_test += m * lr_test[a * nt + t];
            }
        }
    }
    Side { pa, lr_enc, lr_test, log_k, i_enc: i_enc.max(0.0), i_test: i_test.max(0.0), ns, nt }
}

fn draw_codebook(pa: &[f64], n: usize, size: usize, seed: u64, stream: u64) -> Result<Vec<Vec<usize>>> {
    let mut rng = par::stream_rng(seed, stream);
    let wi = WeightedIndex::new(pa.iter().copied()).map_err(|e| Error::InvalidPmf(e.to_string()))?;
    let mut seen = HashSet::new();
    let mut book = Vec::new();
    for _ in 0..size {
        let w: Vec<usize> = (0..n).map(|_| wi.sample(&mut rng)).collect();
        if seen.insert(w.clone()) {
            book.push(w);
        }
    }
    Ok(book)
}

fn codebook_size(n: usize, rate: f64) -> Result<usize> {
    let size = (n as f64 * rate).exp().ceil();
    if !(size <= CODEBOOK_LIMIT as f64) {
        return Err(Error::Budget { what: format!("codebook at rate {rate:.3}, n = {n}"), needed: size as u128, limit: CODEBOOK_LIMIT });
    }
    Ok((size as usize).max(1))
}

/// Index of the first codeword passing the encoding test, else the codeword
/// with the largest floored log-likelihood (first on ties).
fn encode(sd: &Side, book: &[Vec<usize>], s: &[usize], delta: f64) -> usize {
    let n = s.len() as f64;
    let thr = sd.i_enc - delta;
    for (m, w) in book.iter().enumerate() {
        let v: f64 = w.iter().zip(s).map(|(a, x)| sd.lr_enc[a * sd.ns + x]).sum();
        if v / n > thr {
            return m;
        }
    }
    let mut best = (0, f64::NEG_INFINITY);
    for (m, w) in book.iter().enumerate() {
        let v: f64 = w.iter().zip(s).map(|(a, x)| sd.log_k[a * sd.ns + x]).sum();
        if v > best.1 {
            best = (m, v);
        }
    }
    best.0
}

fn passes(sd: &Side, w: &[usize], t: &[usize], delta: f64) -> bool {
    let v: f64 = w.iter().zip(t).map(|(a, y)| sd.lr_test[a * sd.nt + y]).sum();
    v / t.len() as f64 > sd.i_test - delta
}

/// Quantize-and-test code at rates I(U;X)+margins.0 and I(V;Y)+margins.1;
/// typicality slack δ is half the margin.
pub fn build_quantize_bin(s: &TwoHopSource, aux: &AuxCoupling, n: usize, margins: (f64, f64), seed: u64) -> Result<QuantizeBin> {
    if n == 0 {
        return Err(Error::Domain("blocklength must be positive".into()));
    }
    if aux.u_given_x.inputs() != s.nx() || aux.v_given_y.inputs() != s.ny() {
        return Err(Error::Shape("auxiliary kernels do not match the source".into()));
    }
    let mut warnings = Vec::new();
    for (name, m) in [("R1", margins.0), ("R2", margins.1)] {
        if m <= 0.0 {
            warnings.push(format!("{name} margin {m} ≤ 0: encoding failure probability not controlled"));
        }
    }
    let (nx, ny, nz) = (s.nx(), s.ny(), s.nz());
    let mut y_given_x = vec![0.0; nx * ny];
    for x in 0..nx {
        for y in 0..ny {
            if s.px()[x] > 0.0 {
                y_given_x[x * ny + y] = s.pxy()[x * ny + y] / s.px()[x];
            }
        }
    }
    let su = side(s.px(), &aux.u_given_x, &y_given_x, ny);
    let sv = side(s.py(), &aux.v_given_y, s.p_z_given_y().flat(), nz);
    let (d1, d2) = (margins.0 / 2.0, margins.1 / 2.0);
    let book_u = draw_codebook(&su.pa, n, codebook_size(n, su.i_enc + margins.0)?, seed, 1)?;
    let book_v = draw_codebook(&sv.pa, n, codebook_size(n, sv.i_enc + margins.1)?, seed, 2)?;
    let (k1, k2) = (book_u.len(), book_v.len());
    let forwards_bit = su.pa.iter().filter(|p| **p > 0.0).count() > 1;

    let lim = crate::code_model::EXACT_BUDGET;
    let xs = seq::count(nx, n, lim)?;
    let ys = seq::count(ny, n, lim)?;
    let zs = seq::count(nz, n, lim)?;
    let f1: Vec<usize> = par::ordered_map(xs, |x| encode(&su, &book_u, &seq::digits(x, nx, n), d1));
    let g1: Vec<Vec<u8>> = par::ordered_map(k1, |m| {
        (0..ys).map(|y| if passes(&su, &book_u[m], &seq::digits(y, ny, n), d1) { H0 } else { H1 }).collect()
    });
    let vidx: Vec<usize> = par::ordered_map(ys, |y| encode(&sv, &book_v, &seq::digits(y, ny, n), d2));
    let n2 = if forwards_bit { 2 * k2 } else { k2 };
    let f2: Vec<Vec<usize>> = (0..k1)
        .map(|m| {
            (0..ys)
                .map(|y| if forwards_bit { usize::from(g1[m][y] == H0) * k2 + vidx[y] } else { vidx[y] })
                .collect()
        })
        .collect();
    let g2: Vec<Vec<u8>> = par::ordered_map(n2, |m2| {
        let (bit, j) = if forwards_bit { (m2 / k2 == 1, m2 % k2) } else { (true, m2) };
        (0..zs)
            .map(|z| if bit && passes(&sv, &book_v[j], &seq::digits(z, nz, n), d2) { H0 } else { H1 })
            .collect()
    });
    let code = TwoHopCode { n, n1: k1, n2, f1, f2, g1, g2 };
    code.validate(s)?;
    Ok(QuantizeBin { code, codebook_sizes: (k1, k2), forwards_bit, warnings })
}
