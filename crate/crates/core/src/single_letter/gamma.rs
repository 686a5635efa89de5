//! Band-constrained objective: the trade-off objective plus divergence and
//! conditional-information penalties, minimized over couplings whose
//! Y-marginal stays within a relative band around P_Y.

use super::aux::CardBounds;
use super::bottleneck::{self, SolverConfig, SubProblem};
use super::solve::solve_r;
use super::weights::TradeoffWeights;
use crate::error::{Error, Result};
use crate::par;
use crate::prob::{tensor, JointPmf, Kernel, TwoHopSource};
use crate::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

const BAND_TOL: f64 = 1e-12;
const SMOOTH: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Q1Coupling {
    pub q_xy: JointPmf,
    /// Rows indexed by x·|Y| + y.
    pub u_given_xy: Kernel,
    pub v_given_y: Kernel,
    pub theta: f64,
}

/// Every term of the band-constrained objective at one coupling.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GammaTerms {
    pub i_ux: f64,
    pub i_uy: f64,
    pub i_vy: f64,
    pub i_vz: f64,
    pub i_uy_given_x: f64,
    pub d_xy: f64,
    pub d_y: f64,
    /// R_{b,c,d}(Q) alone.
    pub r_value: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaSolution {
    pub value: f64,
    pub coupling: Q1Coupling,
    pub terms: GammaTerms,
    pub converged: bool,
}

impl CardBounds {
    /// Defaults for the band-constrained problem, where U may depend on (X,Y).
    pub fn for_gamma(s: &TwoHopSource) -> Self {
        CardBounds { u: s.nx() * s.ny() + 2, v: s.ny() + 1 }
    }
}

/// Euclidean projection of `q` onto {lo ≤ q ≤ hi, Σq = 1}.
pub(crate) fn project_band(q: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    let at = |lam: f64| -> f64 { q.iter().zip(lo.iter().zip(hi)).map(|(v, (l, h))| (v + lam).clamp(*l, *h)).sum() };
    let (mut a, mut b) = (-2.0, 2.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if at(m) < 1.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let lam = 0.5 * (a + b);
    q.iter().zip(lo.iter().zip(hi)).map(|(v, (l, h))| (v + lam).clamp(*l, *h)).collect()
}

fn band(py: &[f64], theta: f64) -> (Vec<f64>, Vec<f64>) {
    (py.iter().map(|p| ((1.0 - theta) * p).max(0.0)).collect(), py.iter().map(|p| (1.0 + theta) * p).collect())
}

impl Q1Coupling {
    pub fn new(s: &TwoHopSource, q_xy: JointPmf, u_given_xy: Kernel, v_given_y: Kernel, theta: f64) -> Result<Self> {
        if !(theta >= 0.0) {
            return Err(Error::Domain(format!("band parameter must be nonnegative, got {theta}")));
        }
        if q_xy.shape() != vec![s.nx(), s.ny()] {
            return Err(Error::Shape(format!("q_xy shape {:?}, source has ({}, {})", q_xy.shape(), s.nx(), s.ny())));
        }
        if u_given_xy.inputs() != s.nx() * s.ny() || v_given_y.inputs() != s.ny() {
            return Err(Error::Shape("kernel inputs do not match the source alphabets".into()));
        }
        let q = Q1Coupling { q_xy, u_given_xy, v_given_y, theta };
        if let Some((y, dev)) = q.band_violation(s) {
            return Err(Error::Domain(format!(
                "Q_Y outside the band at y = {}: |Q_Y − P_Y| = {dev:.3e} > θ·P_Y = {:.3e}",
                s.p_xy().axes()[1].labels[y],
                theta * s.py()[y]
            )));
        }
        Ok(q)
    }

    fn from_r(s: &TwoHopSource, r: &[f64], nu: usize, v: Vec<f64>, nv: usize, theta: f64) -> Self {
        let (nx, ny) = (s.nx(), s.ny());
        let mut q = vec![0.0; nx * ny];
        let mut k = vec![0.0; nx * ny * nu];
        for xy in 0..nx * ny {
            let row = &r[xy * nu..(xy + 1) * nu];
            let m: f64 = row.iter().sum();
            q[xy] = m;
            for u in 0..nu {
                k[xy * nu + u] = if m > 0.0 { row[u] / m } else { 1.0 / nu as f64 };
            }
        }
        let axes = s.p_xy().axes().to_vec();
        Q1Coupling {
            q_xy: JointPmf::new(axes, q).expect("descent keeps a valid pmf"),
            u_given_xy: Kernel::from_flat_unchecked(nx * ny, nu, k),
            v_given_y: Kernel::from_flat_unchecked(ny, nv, v),
            theta,
        }
    }

    /// First y where the band fails, with the deviation.
    pub fn band_violation(&self, s: &TwoHopSource) -> Option<(usize, f64)> {
        let qy = self.q_y();
        qy.iter().zip(s.py()).enumerate().find_map(|(y, (q, p))| {
            let dev = (q - p).abs();
            (dev > self.theta * p + BAND_TOL).then_some((y, dev))
        })
    }

    pub fn q_y(&self) -> Vec<f64> {
        let sh = self.q_xy.shape();
        tensor::marginal(self.q_xy.mass(), &sh, &[1]).0
    }

    /// Joint mass over (X, Y, U).
    pub fn r(&self) -> Vec<f64> {
        let nu = self.u_given_xy.outputs();
        let mut r = vec![0.0; self.q_xy.mass().len() * nu];
        for (xy, q) in self.q_xy.mass().iter().enumerate() {
            for (u, k) in self.u_given_xy.row(xy).iter().enumerate() {
                r[xy * nu + u] = q * k;
            }
        }
        r
    }

    /// Q_{U|X} obtained by marginalizing Y out of Q_XY·Q_{U|XY}.
    pub fn q_u_given_x(&self) -> Kernel {
        let sh = self.q_xy.shape();
        let (nx, ny, nu) = (sh[0], sh[1], self.u_given_xy.outputs());
        let r = self.r();
        let (rux, _) = tensor::marginal(&r, &[nx, ny, nu], &[0, 2]);
        let mut k = vec![0.0; nx * nu];
        for x in 0..nx {
            let m: f64 = rux[x * nu..(x + 1) * nu].iter().sum();
            for u in 0..nu {
                k[x * nu + u] = if m > 0.0 { rux[x * nu + u] / m } else { 1.0 / nu as f64 };
            }
        }
        Kernel::from_flat_unchecked(nx, nu, k)
    }

    /// Random coupling inside the band.
    pub fn random<R: Rng + ?Sized>(s: &TwoHopSource, rng: &mut R, theta: f64, bounds: CardBounds) -> Result<Self> {
        let (nx, ny) = (s.nx(), s.ny());
        let (lo, hi) = band(s.py(), theta);
        let raw: Vec<f64> = s.py().iter().map(|p| p * (1.0 + theta * rng.gen_range(-1.0..=1.0))).collect();
        let qy = project_band(&raw, &lo, &hi);
        let mut q = vec![0.0; nx * ny];
        for y in 0..ny {
            let col = sample::dirichlet(rng, nx);
            for x in 0..nx {
                q[x * ny + y] = qy[y] * col[x];
            }
        }
        let q_xy = JointPmf::new(s.p_xy().axes().to_vec(), q)?;
        let k = sample::kernel(rng, nx * ny, bounds.u);
        let v = sample::kernel(rng, ny, bounds.v);
        Q1Coupling::new(s, q_xy, k, v, theta)
    }
}

/// Exact evaluation of the band-constrained objective at `q1`.
pub fn objective_gamma(s: &TwoHopSource, q1: &Q1Coupling, w: &TradeoffWeights, gamma: f64) -> Result<GammaTerms> {
    if q1.q_xy.shape() != vec![s.nx(), s.ny()] || q1.v_given_y.inputs() != s.ny() {
        return Err(Error::Shape("coupling does not match the source".into()));
    }
    let nu = q1.u_given_xy.outputs();
    Ok(Eval::new(s, nu, q1.v_given_y.outputs(), *w, gamma).terms(&q1.r(), q1.v_given_y.flat()))
}

struct Eval<'a> {
    s: &'a TwoHopSource,
    nu: usize,
    nv: usize,
    w: TradeoffWeights,
    gamma: f64,
}

impl<'a> Eval<'a> {
    fn new(s: &'a TwoHopSource, nu: usize, nv: usize, w: TradeoffWeights, gamma: f64) -> Self {
        Eval { s, nu, nv, w, gamma }
    }

    fn qy(&self, r: &[f64]) -> Vec<f64> {
        tensor::marginal(r, &[self.s.nx(), self.s.ny(), self.nu], &[1]).0
    }

    fn v_problem(&self, qy: &[f64]) -> SubProblem {
        SubProblem {
            ps: qy.to_vec(),
            channel: self.s.p_z_given_y().flat().to_vec(),
            nt: self.s.nz(),
            w_s: self.w.d,
            w_t: self.w.c,
            card: self.nv,
        }
    }

    fn terms(&self, r: &[f64], v: &[f64]) -> GammaTerms {
        let (nx, ny, nu) = (self.s.nx(), self.s.ny(), self.nu);
        let sh = [nx, ny, nu];
        let (rux, _) = tensor::marginal(r, &sh, &[0, 2]);
        let (ruy, _) = tensor::marginal(r, &sh, &[1, 2]);
        let (rxy, _) = tensor::marginal(r, &sh, &[0, 1]);
        let qy = self.qy(r);
        let i_ux = tensor::mi_2d(&rux, nx, nu);
        let i_uy = tensor::mi_2d(&ruy, ny, nu);
        let (ryx, _) = tensor::marginal(r, &sh, &[2, 1, 0]);
        let i_uy_given_x = tensor::cmi_3d(&ryx, nu, ny, nx);
        let d_xy = tensor::kl(&rxy, self.s.pxy());
        let d_y = tensor::kl(&qy, self.s.py());
        let (i_vy, i_vz) = self.v_problem(&qy).informations(v);
        let TradeoffWeights { b, c, d } = self.w;
        let r_value = -i_uy + b * i_ux - c * (i_uy + i_vz) + d * i_vy;
        let value = r_value + (b + self.gamma) * d_xy + d * d_y + self.gamma * i_uy_given_x;
        GammaTerms { i_ux, i_uy, i_vy, i_vz, i_uy_given_x, d_xy, d_y, r_value, value }
    }

    fn value(&self, r: &[f64], v: &[f64]) -> f64 {
        self.terms(r, v).value
    }

    /// Gradient in r, up to an additive constant.
    fn grad(&self, r: &[f64], v: &[f64]) -> Vec<f64> {
        let (nx, ny, nu, nv, nz) = (self.s.nx(), self.s.ny(), self.nu, self.nv, self.s.nz());
        let sh = [nx, ny, nu];
        let lg = |m: f64| if m > 0.0 { m.ln() } else { -700.0 };
        let (ru, _) = tensor::marginal(r, &sh, &[2]);
        let (rx, _) = tensor::marginal(r, &sh, &[0]);
        let (ry, _) = tensor::marginal(r, &sh, &[1]);
        let (rux, _) = tensor::marginal(r, &sh, &[0, 2]);
        let (ruy, _) = tensor::marginal(r, &sh, &[1, 2]);
        let (rxy, _) = tensor::marginal(r, &sh, &[0, 1]);
        let TradeoffWeights { b, c, d } = self.w;
        let a = 1.0 + c;
        let g_ = self.gamma;
        // V-part derivative in Q_Y(y)
        let w_zy = self.s.p_z_given_y().flat();
        let mut pv = vec![0.0; nv];
        let mut pz = vec![0.0; nz];
        let mut pvz = vec![0.0; nv * nz];
        for y in 0..ny {
            for vv in 0..nv {
                pv[vv] += ry[y] * v[y * nv + vv];
                for z in 0..nz {
                    pvz[vv * nz + z] += ry[y] * v[y * nv + vv] * w_zy[y * nz + z];
                }
            }
            for z in 0..nz {
                pz[z] += ry[y] * w_zy[y * nz + z];
            }
        }
        let gy: Vec<f64> = (0..ny)
            .map(|y| {
                let vr = &v[y * nv..(y + 1) * nv];
                let wr = &w_zy[y * nz..(y + 1) * nz];
                let s_v: f64 = vr.iter().zip(&pv).map(|(k, p)| if *k > 0.0 { k * lg(*p) } else { 0.0 }).sum();
                let s_z: f64 = wr.iter().zip(&pz).map(|(k, p)| if *k > 0.0 { k * lg(*p) } else { 0.0 }).sum();
                let mut s_vz = 0.0;
                for vv in 0..nv {
                    for z in 0..nz {
                        let m = vr[vv] * wr[z];
                        if m > 0.0 {
                            s_vz += m * lg(pvz[vv * nz + z]);
                        }
                    }
                }
                let h_v = tensor::entropy(vr);
                d * (-s_v - h_v) - c * (-s_v - s_z + s_vz) + d * (lg(ry[y]) - lg(self.s.py()[y]))
            })
            .collect();
        let mut g = vec![0.0; r.len()];
        for x in 0..nx {
            for y in 0..ny {
                let lxy = lg(rxy[x * ny + y]);
                let lp = lg(self.s.pxy()[x * ny + y]);
                for u in 0..nu {
                    let i = (x * ny + y) * nu + u;
                    let (lu, lx, ly) = (lg(ru[u]), lg(rx[x]), lg(ry[y]));
                    let (lux, luy, luxy) = (lg(rux[x * nu + u]), lg(ruy[y * nu + u]), lg(r[i]));
                    g[i] = -b * (lu + lx - lux) + a * (lu + ly - luy) - g_ * (lux + lxy - luxy - lx)
                        + (b + g_) * (lxy - lp)
                        + gy[y];
                }
            }
        }
        g
    }
}

fn smooth(k: &mut [f64], card: usize) {
    for x in k.iter_mut() {
        *x = (1.0 - SMOOTH) * *x + SMOOTH / card as f64;
    }
}

/// Rescale each y-slice of r so that Q_Y lands on the band projection.
fn rebalance(r: &mut [f64], nx: usize, ny: usize, nu: usize, lo: &[f64], hi: &[f64]) {
    let qy = tensor::marginal(r, &[nx, ny, nu], &[1]).0;
    let target = project_band(&qy, lo, hi);
    for x in 0..nx {
        for y in 0..ny {
            let f = if qy[y] > 0.0 { target[y] / qy[y] } else { 0.0 };
            for u in 0..nu {
                r[(x * ny + y) * nu + u] *= f;
            }
        }
    }
}

struct Run {
    value: f64,
    r: Vec<f64>,
    v: Vec<f64>,
    converged: bool,
}

fn descend(ev: &Eval, mut r: Vec<f64>, mut v: Vec<f64>, lo: &[f64], hi: &[f64], cfg: &SolverConfig) -> Run {
    let (nx, ny, nu) = (ev.s.nx(), ev.s.ny(), ev.nu);
    rebalance(&mut r, nx, ny, nu, lo, hi);
    let mut f = ev.value(&r, &v);
    let mut eta = 1.0;
    let mut quiet = 0;
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        let f0 = f;
        // r block: exponentiated gradient with Armijo backtracking
        let g = ev.grad(&r, &v);
        loop {
            let gmin = g.iter().copied().fold(f64::INFINITY, f64::min);
            let mut cand: Vec<f64> = r.iter().zip(&g).map(|(m, gi)| m * (-eta * (gi - gmin)).exp()).collect();
            let tot: f64 = cand.iter().sum();
            cand.iter_mut().for_each(|m| *m /= tot);
            rebalance(&mut cand, nx, ny, nu, lo, hi);
            let dir: f64 = g.iter().zip(cand.iter().zip(&r)).map(|(gi, (n, o))| gi * (n - o)).sum();
            let fc = ev.value(&cand, &v);
            if fc <= f + 1e-4 * dir.min(0.0) && fc <= f {
                r = cand;
                f = fc;
                eta = (eta * 2.0).min(1e6);
                break;
            }
            eta *= 0.5;
            if eta < 1e-14 {
                eta = 1e-3;
                break;
            }
        }
        // V block: damped self-consistent step at the current Q_Y
        let vp = ev.v_problem(&ev.qy(&r));
        let vn = super::alternating::step(&vp, &v, cfg.damping);
        let fv = ev.value(&r, &vn);
        if fv < f {
            v = vn;
            f = fv;
        }
        if (f0 - f).abs() < cfg.tol {
            quiet += 1;
            if quiet >= 5 {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Run { value: f, r, v, converged }
}

/// Minimizes R_{b,c,d}(Q) + (b+γ)D(Q_XY‖P_XY) + d·D(Q_Y‖P_Y) + γ·I_Q(U;Y|X)
/// over band couplings.
pub fn solve_r_gamma(
    s: &TwoHopSource,
    w: &TradeoffWeights,
    gamma: f64,
    theta: f64,
    bounds: CardBounds,
    cfg: &SolverConfig,
) -> Result<GammaSolution> {
    if !(gamma >= 0.0) {
        return Err(Error::Domain(format!("γ must be nonnegative, got {gamma}")));
    }
    if !(theta >= 0.0) {
        return Err(Error::Domain(format!("band parameter must be nonnegative, got {theta}")));
    }
    let (nx, ny) = (s.nx(), s.ny());
    let (nu, nv) = (bounds.u, bounds.v);
    if nu < s.nx() + 1 || nv < 1 {
        return Err(Error::Cardinality { var: "U", got: nu, bound: s.nx() + 1 });
    }
    let ev = Eval::new(s, nu, nv, *w, gamma);
    let (lo, hi) = band(s.py(), theta);

    // exact feasible candidate: Q = P with the solve_r minimizer lifted
    let base = solve_r(s, w, CardBounds::for_source(s), cfg)?;
    let bu = base.aux.u_given_x.outputs();
    let mut r0 = vec![0.0; nx * ny * nu];
    for x in 0..nx {
        for y in 0..ny {
            for u in 0..bu {
                r0[(x * ny + y) * nu + u] = s.pxy()[x * ny + y] * base.aux.u_given_x.row(x)[u];
            }
        }
    }
    let bv = base.aux.v_given_y.outputs();
    let mut v0 = vec![0.0; ny * nv];
    for y in 0..ny {
        v0[y * nv..y * nv + bv.min(nv)].copy_from_slice(&base.aux.v_given_y.row(y)[..bv.min(nv)]);
    }
    let exact = Run { value: ev.value(&r0, &v0), r: r0.clone(), v: v0.clone(), converged: true };

    let mut starts: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    let with_kernel = |f: &dyn Fn(usize, usize) -> usize| {
        let mut r = vec![0.0; nx * ny * nu];
        for x in 0..nx {
            for y in 0..ny {
                r[(x * ny + y) * nu + f(x, y)] = s.pxy()[x * ny + y];
            }
        }
        r
    };
    starts.push((r0, v0.clone()));
    starts.push((with_kernel(&|_, y| y), v0.clone()));
    starts.push((with_kernel(&|x, y| (x * ny + y) % nu), v0.clone()));
    let seed = par::derive_seed(cfg.seed, 21);
    for i in 0..cfg.gamma_restarts {
        let mut rng = par::stream_rng(seed, i as u64);
        let qy = project_band(
            &s.py().iter().map(|p| p * (1.0 + theta * rng.gen_range(-1.0..=1.0))).collect::<Vec<_>>(),
            &lo,
            &hi,
        );
        let mut r = vec![0.0; nx * ny * nu];
        for y in 0..ny {
            let col = sample::dirichlet(&mut rng, nx);
            for x in 0..nx {
                let pxgy = if s.py()[y] > 0.0 { s.pxy()[x * ny + y] / s.py()[y] } else { 0.0 };
                let k = sample::dirichlet(&mut rng, nu);
                for u in 0..nu {
                    r[(x * ny + y) * nu + u] = qy[y] * (0.5 * pxgy + 0.5 * col[x]) * k[u];
                }
            }
        }
        let v: Vec<f64> = (0..ny).flat_map(|_| sample::dirichlet(&mut rng, nv)).collect();
        starts.push((r, v));
    }
    let mut runs = par::ordered_map(starts.len(), |i| {
        let (mut r, mut v) = starts[i].clone();
        smooth(&mut r, 1);
        let tot: f64 = r.iter().sum();
        r.iter_mut().for_each(|m| *m /= tot);
        smooth(&mut v, nv);
        let mut run = descend(&ev, r, v, &lo, &hi, cfg);
        // re-solve V at the final Q_Y and polish once more
        let qy = ev.qy(&run.r);
        if let Ok(sol) = bottleneck::solve(&ev.v_problem(&qy), cfg, par::derive_seed(seed, 1000 + i as u64)) {
            if ev.value(&run.r, &sol.kernel) < run.value {
                let mut vk = sol.kernel;
                smooth(&mut vk, nv);
                let again = descend(&ev, run.r.clone(), vk, &lo, &hi, cfg);
                if again.value < run.value {
                    run = again;
                }
            }
        }
        run
    });
    runs.insert(0, exact);
    let best = par::argmin_first(&runs, |r| r.value).expect("nonempty");
    let converged = runs.iter().skip(1).any(|r| r.converged);
    let run = runs.swap_remove(best);
    let coupling = Q1Coupling::from_r(s, &run.r, nu, run.v, nv, theta);
    let terms = objective_gamma(s, &coupling, w, gamma)?;
    Ok(GammaSolution { value: terms.value, coupling, terms, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::single_letter::solve_r;

    fn cfg() -> SolverConfig {
        SolverConfig { restarts: 8, gamma_restarts: 4, max_iter: 3000, ..SolverConfig::default() }
    }

    #[test]
    fn projection_respects_band() {
        let py = [0.2, 0.3, 0.5];
        let (lo, hi) = band(&py, 0.1);
        let p = project_band(&[0.5, 0.1, 0.1], &lo, &hi);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for i in 0..3 {
            assert!(p[i] >= lo[i] - 1e-15 && p[i] <= hi[i] + 1e-15);
        }
        assert_eq!(project_band(&py, &lo, &hi).iter().zip(&py).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) < 1e-12, true);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let s = TwoHopSource::dsbs(0.2, 0.15);
        let w = TradeoffWeights::new(0.7, 1.3, 0.4).unwrap();
        let ev = Eval::new(&s, 3, 3, w, 2.0);
        let mut rng = par::stream_rng(5, 0);
        let r: Vec<f64> = sample::dirichlet(&mut rng, 12);
        let v: Vec<f64> = (0..2).flat_map(|_| sample::dirichlet(&mut rng, 3)).collect();
        let g = ev.grad(&r, &v);
        // directional derivative along a zero-sum direction
        let mut dir: Vec<f64> = (0..12).map(|i| ((i * 7 % 5) as f64 - 2.0) * 1e-3).collect();
        let mean = dir.iter().sum::<f64>() / 12.0;
        dir.iter_mut().for_each(|x| *x -= mean);
        let h = 1e-6;
        let plus: Vec<f64> = r.iter().zip(&dir).map(|(a, b)| a + h * b).collect();
        let minus: Vec<f64> = r.iter().zip(&dir).map(|(a, b)| a - h * b).collect();
        let fd = (ev.value(&plus, &v) - ev.value(&minus, &v)) / (2.0 * h);
        let an: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
        assert!((fd - an).abs() < 1e-7, "{fd} vs {an}");
    }

    #[test]
    fn independent_source_is_zero_for_large_gamma() {
        let s = TwoHopSource::independent(&[0.3, 0.7], &[0.6, 0.4], &[0.5, 0.5]).unwrap();
        let w = TradeoffWeights::new(0.5, 1.0, 0.5).unwrap();
        let sol = solve_r_gamma(&s, &w, 2.5, 0.1, CardBounds::for_gamma(&s), &cfg()).unwrap();
        assert!(sol.value.abs() < 1e-6, "{:?}", sol.terms);
        // below 1+c, U = Y pays off
        let small = solve_r_gamma(&s, &w, 0.5, 0.1, CardBounds::for_gamma(&s), &cfg()).unwrap();
        assert!(small.value < -0.1, "{}", small.value);
    }

    #[test]
    fn never_above_unconstrained_value_and_trend() {
        let s = TwoHopSource::dsbs(0.1, 0.1);
        let w = TradeoffWeights::new(0.5, 1.0, 0.5).unwrap();
        let r = solve_r(&s, &w, CardBounds::for_source(&s), &cfg()).unwrap().value;
        let mut last = f64::NEG_INFINITY;
        for g in [1.0, 10.0, 100.0] {
            let v = solve_r_gamma(&s, &w, g, 0.0, CardBounds::for_gamma(&s), &cfg()).unwrap().value;
            assert!(v <= r + 1e-12);
            assert!(v >= last - 1e-6, "γ={g}: {v} < {last}");
            last = v;
        }
        assert!((last - r).abs() < 0.05, "{last} vs {r}");
    }

    #[test]
    fn random_couplings_respect_band_and_bad_band_is_reported() {
        let s = TwoHopSource::dsbs(0.1, 0.1);
        let mut rng = par::stream_rng(1, 0);
        for _ in 0..50 {
            let q = Q1Coupling::random(&s, &mut rng, 0.05, CardBounds::for_gamma(&s)).unwrap();
            assert!(q.band_violation(&s).is_none());
        }
        let q_xy = JointPmf::new(vec![crate::prob::Axis::sized("X", 2), crate::prob::Axis::sized("Y", 2)], vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let err = Q1Coupling::new(&s, q_xy, Kernel::identity(4), Kernel::identity(2), 0.05).unwrap_err();
        assert!(err.to_string().contains("y = "), "{err}");
        assert!(solve_r_gamma(&s, &TradeoffWeights::new(0.0, 0.0, 0.0).unwrap(), 1.0, -0.1, CardBounds::for_gamma(&s), &cfg()).is_err());
    }
}
