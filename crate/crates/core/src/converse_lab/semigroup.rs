//! The product operators Λ_{α,t} and T_{y^n,t} acting on functions of Z^n.

use crate::code_model::seq;
use crate::error::{Error, Result};
use crate::prob::TwoHopSource;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Semigroup<'a> {
    /// (e^{-t} + α(1−e^{-t})P_Z)^{⊗n}
    Lambda { alpha: f64 },
    /// Π_i (e^{-t} + (1−e^{-t})P_{Z|y_i})
    T { y: &'a [usize] },
}

/// f ← e^{-t}f + scale·(1−e^{-t})·E_{q}[f along coordinate i].
fn step(f: &mut [f64], nz: usize, n: usize, i: usize, q: &[f64], scale: f64, et: f64) {
    let stride = nz.pow((n - 1 - i) as u32);
    let block = stride * nz;
    let mut avg = vec![0.0; stride];
    for chunk in f.chunks_mut(block) {
        avg.iter_mut().for_each(|a| *a = 0.0);
        for (z, &qz) in q.iter().enumerate() {
            if qz != 0.0 {
                for (a, v) in avg.iter_mut().zip(&chunk[z * stride..(z + 1) * stride]) {
                    *a += qz * v;
                }
            }
        }
        for z in 0..nz {
            for (v, a) in chunk[z * stride..(z + 1) * stride].iter_mut().zip(&avg) {
                *v = et * *v + scale * (1.0 - et) * a;
            }
        }
    }
}

/// Apply the operator to `h` (a function on Z^n, row-major) exactly.
pub fn semigroup_apply(kind: Semigroup, s: &TwoHopSource, t: f64, n: usize, h: &[f64]) -> Result<Vec<f64>> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("semigroup time t = {t} must be positive")));
    }
    let nz = s.nz();
    let zs = seq::count(nz, n, crate::code_model::EXACT_BUDGET)?;
    if h.len() != zs {
        return Err(Error::Shape(format!("function has {} values, Z^n has {zs}", h.len())));
    }
    let et = (-t).exp();
    let mut f = h.to_vec();
    match kind {
        Semigroup::Lambda { alpha } => {
            for i in 0..n {
                step(&mut f, nz, n, i, s.pz(), alpha, et);
            }
        }
        Semigroup::T { y } => {
            if y.len() != n || y.iter().any(|&v| v >= s.ny()) {
                return Err(Error::Shape(format!("y^n must have {n} symbols below {}", s.ny())));
            }
            for (i, &yi) in y.iter().enumerate() {
                step(&mut f, nz, n, i, s.p_z_given_y().row(yi), 1.0, et);
            }
        }
    }
    Ok(f)
}

/// t and Ψ of the receiver chain. For α > 1, t = sqrt(log(1/τ)/(n(α−1)))
/// and Ψ = 2·sqrt(n(α−1)·log(1/τ)); for α = 1, t = 1/√n and Ψ = √n·log(1/τ).
/// In both cases Ψ = (α−1)nt + log(1/τ)/t.
pub fn choose_t(alpha: f64, n: usize, tau: f64) -> (f64, f64, bool) {
    let nf = n as f64;
    let l = (1.0 / tau).ln();
    if alpha <= 1.0 + 1e-12 || l <= 0.0 {
        let t = 1.0 / nf.sqrt();
        (t, (alpha - 1.0).max(0.0) * nf * t + l / t, true)
    } else {
        let t = (l / (nf * (alpha - 1.0))).sqrt();
        (t, 2.0 * (nf * (alpha - 1.0) * l).sqrt(), false)
    }
}

/// One reverse-hypercontractivity instance: returns
/// (E_{P_{Z|y}^n}[log T_{y,t}1_G], log P_{Z|y}^n(G), Λ_{α,t}1_G − T_{y,t}1_G minimum).
pub fn rhc_instance(s: &TwoHopSource, n: usize, t: f64, y: &[usize], g: &[bool]) -> Result<(f64, f64, f64)> {
    let h: Vec<f64> = g.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let th = semigroup_apply(Semigroup::T { y }, s, t, n, &h)?;
    let lh = semigroup_apply(Semigroup::Lambda { alpha: s.alpha() }, s, t, n, &h)?;
    let w = s.p_z_given_y().flat();
    let mut e_log = 0.0;
    let mut pg = 0.0;
    for z in 0..h.len() {
        let zd = seq::digits(z, s.nz(), n);
        let p: f64 = y.iter().zip(&zd).map(|(a, b)| w[a * s.nz() + b]).product();
        if p > 0.0 {
            e_log += p * th[z].ln();
            if g[z] {
                pg += p;
            }
        }
    }
    let gap = lh.iter().zip(&th).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min);
    Ok((if e_log.is_nan() { f64::NEG_INFINITY } else { e_log }, pg.ln(), gap))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_preserves_constants() {
        let s = TwoHopSource::dsbs(0.1, 0.2);
        let out = semigroup_apply(Semigroup::T { y: &[0, 1, 1] }, &s, 0.7, 3, &[1.0; 8]).unwrap();
        assert!(out.iter().all(|v| *v == 1.0));
    }

    #[test]
    fn lambda_single_letter_unrolled() {
        let s = TwoHopSource::from_arrays(vec![vec![0.2, 0.3], vec![0.1, 0.4]], vec![vec![0.6, 0.4], vec![0.1, 0.9]]).unwrap();
        let t = 0.4;
        let a = s.alpha();
        let out = semigroup_apply(Semigroup::Lambda { alpha: a }, &s, t, 1, &[0.0, 1.0]).unwrap();
        let et = (-t as f64).exp();
        for z in 0..2 {
            let want = et * if z == 1 { 1.0 } else { 0.0 } + a * (1.0 - et) * s.pz()[1];
            assert!((out[z] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn lambda_dominates_t_and_rhc_holds() {
        let s = TwoHopSource::dsbs(0.15, 0.2);
        let (t, _, _) = choose_t(s.alpha(), 4, crate::prob::tau(0.2, 0.2));
        let g: Vec<bool> = (0..16).map(|z| z % 3 == 0).collect();
        let (lhs, lp, gap) = rhc_instance(&s, 4, t, &[0, 1, 0, 0], &g).unwrap();
        assert!(gap >= -1e-12);
        assert!(lhs >= (1.0 + 1.0 / t) * lp - 1e-12);
        assert!(lhs >= lp / (1.0 - (-t as f64).exp()) - 1e-12);
    }

    #[test]
    fn nonpositive_t_refused() {
        let s = TwoHopSource::dsbs(0.1, 0.1);
        assert!(matches!(semigroup_apply(Semigroup::T { y: &[0] }, &s, 0.0, 1, &[1.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn psi_matches_its_defining_sum() {
        for (alpha, n) in [(1.8, 4), (1.0, 9)] {
            let tau = crate::prob::tau(0.2, 0.2);
            let (t, psi, one) = choose_t(alpha, n, tau);
            assert_eq!(one, alpha == 1.0);
            let sum = (alpha - 1.0) * n as f64 * t + (1.0 / tau).ln() / t;
            assert!((psi - sum).abs() < 1e-12);
        }
    }
}
