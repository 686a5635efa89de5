//! Dense helpers over row-major probability tables.
//!
//! A table is a flat mass slice plus a shape; axis 0 is the most significant.

pub fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

/// Marginal onto `keep` (in the given order).
pub fn marginal(mass: &[f64], shape: &[usize], keep: &[usize]) -> (Vec<f64>, Vec<usize>) {
    let st = strides(shape);
    let out_shape: Vec<usize> = keep.iter().map(|&a| shape[a]).collect();
    let out_st = strides(&out_shape);
    let mut out = vec![0.0; out_shape.iter().product()];
    for (flat, &p) in mass.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let mut o = 0;
        for (k, &a) in keep.iter().enumerate() {
            o += ((flat / st[a]) % shape[a]) * out_st[k];
        }
        out[o] += p;
    }
    (out, out_shape)
}

pub fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum()
}

/// D(p‖q) in nats; +∞ when p has mass where q has none.
pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    let mut d = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            d += a * (a / b).ln();
        }
    }
    d.max(0.0)
}

/// I(A;B) for a two-axis table `rows × cols`.
pub fn mi_2d(mass: &[f64], rows: usize, cols: usize) -> f64 {
    let mut pr = vec![0.0; rows];
    let mut pc = vec![0.0; cols];
    for r in 0..rows {
        for c in 0..cols {
            let v = mass[r * cols + c];
            pr[r] += v;
            pc[c] += v;
        }
    }
    let mut s = 0.0;
    for r in 0..rows {
        for c in 0..cols {
            let v = mass[r * cols + c];
            if v > 0.0 {
                s += v * (v / (pr[r] * pc[c])).ln();
            }
        }
    }
    s.max(0.0)
}

/// I(A;B|C) for a three-axis table `a × b × c`.
pub fn cmi_3d(mass: &[f64], a: usize, b: usize, c: usize) -> f64 {
    let mut pac = vec![0.0; a * c];
    let mut pbc = vec![0.0; b * c];
    let mut pc = vec![0.0; c];
    for i in 0..a {
        for j in 0..b {
            for k in 0..c {
                let v = mass[(i * b + j) * c + k];
                pac[i * c + k] += v;
                pbc[j * c + k] += v;
                pc[k] += v;
            }
        }
    }
    let mut s = 0.0;
    for i in 0..a {
        for j in 0..b {
            for k in 0..c {
                let v = mass[(i * b + j) * c + k];
                if v > 0.0 {
                    s += v * (v * pc[k] / (pac[i * c + k] * pbc[j * c + k])).ln();
                }
            }
        }
    }
    s.max(0.0)
}

/// Regroup a table into (A, B, C) blocks given disjoint axis lists; C may be empty.
pub fn group3(
    mass: &[f64],
    shape: &[usize],
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> (Vec<f64>, usize, usize, usize) {
    let keep: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
    let (m, _) = marginal(mass, shape, &keep);
    let sz = |ax: &[usize]| ax.iter().map(|&i| shape[i]).product::<usize>();
    (m, sz(a), sz(b), sz(c))
}
