//! Row-major enumeration of length-n sequences: the first coordinate is the
//! most significant digit.

use crate::error::{Error, Result};

/// k^n, refusing anything above `limit`.
pub fn count(k: usize, n: usize, limit: u128) -> Result<usize> {
    let mut c: u128 = 1;
    for _ in 0..n {
        c = c.saturating_mul(k as u128);
    }
    if c > limit {
        return Err(Error::Budget { what: format!("{k}^{n} sequences"), needed: c, limit });
    }
    Ok(c as usize)
}

pub fn digits(mut idx: usize, k: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for i in (0..n).rev() {
        d[i] = idx % k;
        idx /= k;
    }
    d
}

pub fn index(d: &[usize], k: usize) -> usize {
    d.iter().fold(0, |acc, &v| acc * k + v)
}

/// i.i.d. product law over k^n sequences.
pub fn power_pmf(p: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * p.len());
        for &a in &out {
            for &b in p {
                next.push(a * b);
            }
        }
        out = next;
    }
    out
}

/// i.i.d. law of (x^n, y^n), flat index x·|Y|^n + y.
pub fn power_joint(pxy: &[f64], nx: usize, ny: usize, n: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    let (mut sx, mut sy) = (1usize, 1usize);
    for _ in 0..n {
        let (tx, ty) = (sx * nx, sy * ny);
        let mut next = vec![0.0; tx * ty];
        for xi in 0..sx {
            for yi in 0..sy {
                let o = out[xi * sy + yi];
                if o == 0.0 {
                    continue;
                }
                for x in 0..nx {
                    for y in 0..ny {
                        next[(xi * nx + x) * ty + yi * ny + y] = o * pxy[x * ny + y];
                    }
                }
            }
        }
        out = next;
        sx = tx;
        sy = ty;
    }
    out
}

/// For each of `rows` functions on Y^n, push through the memoryless channel
/// `w` (|Y|×|Z|, row-major): g(r, z^n) = Σ_{y^n} f(r, y^n) Π W(z_i|y_i).
pub fn apply_channel(f: &[f64], rows: usize, ny: usize, nz: usize, w: &[f64], n: usize) -> Vec<f64> {
    let mut cur = f.to_vec();
    // dims: rows, z_1..z_i, y_{i+1}..y_n
    for i in 0..n {
        let outer = rows * nz.pow(i as u32);
        let inner = ny.pow((n - i - 1) as u32);
        let mut next = vec![0.0; outer * nz * inner];
        for o in 0..outer {
            for y in 0..ny {
                let src = &cur[(o * ny + y) * inner..(o * ny + y + 1) * inner];
                if src.iter().all(|v| *v == 0.0) {
                    continue;
                }
                for z in 0..nz {
                    let wz = w[y * nz + z];
                    if wz == 0.0 {
                        continue;
                    }
                    let dst = &mut next[(o * nz + z) * inner..(o * nz + z + 1) * inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += wz * s;
                    }
                }
            }
        }
        cur = next;
    }
    cur
}
