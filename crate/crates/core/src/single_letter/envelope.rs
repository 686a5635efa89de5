//! Grid cross-check through the concave envelope.
//!
//! With ψ(q) = w_s·H(q) − w_t·H(qW) the sub-minimum equals
//! w_s·H(S) − w_t·H(T) − env ψ(P_S). The envelope is taken over a simplex
//! lattice by a small linear program, refined locally, and the resulting
//! kernel is polished by the fixed-point iteration.

use super::alternating;
use super::bottleneck::{KernelSolver, SolverConfig, SubProblem, SubSolution};

pub struct Envelope;

fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum()
}

/// All compositions of `total` into `m` parts with part i in `lo[i]..=hi[i]`.
fn compositions(total: i64, lo: &[i64], hi: &[i64], out: &mut Vec<Vec<i64>>) {
    fn rec(i: usize, left: i64, lo: &[i64], hi: &[i64], cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let m = lo.len();
        if i + 1 == m {
            if left >= lo[i] && left <= hi[i] {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        let rest_lo: i64 = lo[i + 1..].iter().sum();
        let rest_hi: i64 = hi[i + 1..].iter().sum();
        let a = lo[i].max(left - rest_hi);
        let b = hi[i].min(left - rest_lo);
        for v in a..=b {
            cur.push(v);
            rec(i + 1, left - v, lo, hi, cur, out);
            cur.pop();
        }
    }
    if lo.is_empty() {
        return;
    }
    rec(0, total, lo, hi, &mut Vec::new(), out);
}

fn solve_dense(a: &mut [f64], b: &mut [f64], m: usize) -> bool {
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i * m + col].abs().total_cmp(&a[j * m + col].abs())).unwrap();
        if a[piv * m + col].abs() < 1e-14 {
            return false;
        }
        if piv != col {
            for k in 0..m {
                a.swap(piv * m + k, col * m + k);
            }
            b.swap(piv, col);
        }
        for r in col + 1..m {
            let f = a[r * m + col] / a[col * m + col];
            if f != 0.0 {
                for k in col..m {
                    a[r * m + k] -= f * a[col * m + k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for col in (0..m).rev() {
        let mut s = b[col];
        for k in col + 1..m {
            s -= a[col * m + k] * b[k];
        }
        b[col] = s / a[col * m + col];
    }
    true
}

/// Maximize Σλ_j vals_j subject to Σλ_j pts_j = p, λ ≥ 0. `basis` starts
/// at the simplex vertices. Returns the positive (index, λ) pairs.
fn envelope_lp(pts: &[Vec<f64>], vals: &[f64], p: &[f64], mut basis: Vec<usize>) -> Vec<(usize, f64)> {
    let m = p.len();
    let mut x = p.to_vec();
    let mut degenerate = 0usize;
    for _ in 0..100_000 {
        // y solves Bᵀy = c_B
        let mut bt = vec![0.0; m * m];
        for (k, &j) in basis.iter().enumerate() {
            for i in 0..m {
                bt[k * m + i] = pts[j][i];
            }
        }
        let mut y: Vec<f64> = basis.iter().map(|&j| vals[j]).collect();
        if !solve_dense(&mut bt, &mut y, m) {
            break;
        }
        let bland = degenerate > 50;
        let mut enter = None;
        let mut best_r = 1e-12;
        for (j, pt) in pts.iter().enumerate() {
            if basis.contains(&j) {
                continue;
            }
            let r = vals[j] - pt.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
            if r > best_r {
                enter = Some(j);
                best_r = r;
                if bland {
                    break;
                }
            }
        }
        let Some(e) = enter else { break };
        // d solves B d = a_e
        let mut bm = vec![0.0; m * m];
        for (k, &j) in basis.iter().enumerate() {
            for i in 0..m {
                bm[i * m + k] = pts[j][i];
            }
        }
        let mut d = pts[e].clone();
        if !solve_dense(&mut bm, &mut d, m) {
            break;
        }
        let mut leave = None;
        let mut theta = f64::INFINITY;
        for k in 0..m {
            if d[k] > 1e-12 {
                let t = x[k].max(0.0) / d[k];
                if t < theta - 1e-15 || (bland && (t - theta).abs() <= 1e-15 && leave.map_or(true, |l: usize| basis[k] < basis[l])) {
                    theta = t;
                    leave = Some(k);
                }
            }
        }
        let Some(l) = leave else { break };
        degenerate = if theta <= 1e-15 { degenerate + 1 } else { 0 };
        for k in 0..m {
            x[k] -= theta * d[k];
        }
        x[l] = theta;
        basis[l] = e;
    }
    basis.into_iter().zip(x).filter(|(_, v)| *v > 1e-15).collect()
}

impl Envelope {
    fn restricted(p: &SubProblem) -> (Vec<usize>, Vec<f64>) {
        let supp: Vec<usize> = (0..p.ns()).filter(|&s| p.ps[s] > 0.0).collect();
        let ps = supp.iter().map(|&s| p.ps[s]).collect();
        (supp, ps)
    }

    fn psi(p: &SubProblem, supp: &[usize], q: &[f64]) -> f64 {
        let mut qt = vec![0.0; p.nt];
        for (i, &s) in supp.iter().enumerate() {
            for t in 0..p.nt {
                qt[t] += q[i] * p.channel[s * p.nt + t];
            }
        }
        p.w_s * entropy(q) - p.w_t * entropy(&qt)
    }

    /// Envelope support points and weights over lattice refinements.
    fn support(p: &SubProblem, cfg: &SolverConfig, supp: &[usize], ps: &[f64]) -> Vec<(Vec<f64>, f64)> {
        let m = supp.len();
        let k = (1.0 / cfg.grid_step).round().max(1.0) as i64;
        let kf = (1.0 / cfg.refine_step).round().max(k as f64) as i64;
        let ratio = (kf / k).max(1);
        let mut cells = Vec::new();
        compositions(k, &vec![0; m], &vec![k; m], &mut cells);
        let mut pts: Vec<Vec<f64>> = cells.iter().map(|c| c.iter().map(|&v| v as f64 / k as f64).collect()).collect();
        let solve_on = |pts: &[Vec<f64>]| {
            let vals: Vec<f64> = pts.iter().map(|q| Self::psi(p, supp, q)).collect();
            let basis: Vec<usize> = (0..m)
                .map(|i| pts.iter().position(|q| q[i] == 1.0).expect("vertices are lattice points"))
                .collect();
            envelope_lp(pts, &vals, ps, basis).into_iter().map(|(j, l)| (pts[j].clone(), l)).collect::<Vec<_>>()
        };
        let mut sol = solve_on(&pts);
        for _ in 0..3 {
            let mut fine: Vec<Vec<i64>> = Vec::new();
            for v in 0..m {
                let mut c = vec![0; m];
                c[v] = kf;
                fine.push(c);
            }
            for (q, _) in &sol {
                let centre: Vec<i64> = q.iter().map(|&x| (x * kf as f64).round() as i64).collect();
                let lo: Vec<i64> = centre.iter().map(|&c| (c - ratio).max(0)).collect();
                let hi: Vec<i64> = centre.iter().map(|&c| (c + ratio).min(kf)).collect();
                compositions(kf, &lo, &hi, &mut fine);
            }
            fine.sort();
            fine.dedup();
            pts = fine.iter().map(|c| c.iter().map(|&v| v as f64 / kf as f64).collect()).collect();
            let next = solve_on(&pts);
            let same = next.len() == sol.len() && next.iter().zip(&sol).all(|(a, b)| a.0 == b.0);
            sol = next;
            if same {
                break;
            }
        }
        sol
    }
}

impl KernelSolver for Envelope {
    fn name(&self) -> &'static str {
        "grid"
    }

    fn solve(&self, p: &SubProblem, cfg: &SolverConfig, _seed: u64) -> Option<SubSolution> {
        let (supp, ps) = Self::restricted(p);
        if supp.len() > cfg.grid_max_inputs || supp.is_empty() {
            return None;
        }
        let sol = Self::support(p, cfg, &supp, &ps);
        if sol.len() > p.card {
            return None;
        }
        let nu = p.card;
        let mut kernel = vec![0.0; p.ns() * nu];
        for s in 0..p.ns() {
            if p.ps[s] <= 0.0 {
                kernel[s * nu] = 1.0;
            }
        }
        for (i, &s) in supp.iter().enumerate() {
            let mut z = 0.0;
            for (j, (q, lam)) in sol.iter().enumerate() {
                let v = lam * q[i];
                kernel[s * nu + j] = v;
                z += v;
            }
            if z <= 0.0 {
                kernel[s * nu] = 1.0;
            } else {
                kernel[s * nu..(s + 1) * nu].iter_mut().for_each(|v| *v /= z);
            }
        }
        let value = p.objective(&kernel);
        let (pk, pv, conv) = alternating::iterate(p, kernel.clone(), cfg);
        let (kernel, value) = if pv < value { (pk, pv) } else { (kernel, value) };
        Some(SubSolution { value, kernel, converged: conv, strategy: self.name().into() })
    }
}
