//! Perturbed coupling built from a band coupling: an extra V-symbol absorbs
//! the gap between Q_Y and P_Y so that the result lies back in the
//! unconstrained set, plus the inequalities that relate the two.

use super::gamma::Q1Coupling;
use super::weights::TradeoffWeights;
use crate::error::{Error, Result};
use crate::ledger::{Entry, Ledger};
use crate::prob::{tensor, Axis, JointPmf, Kernel, TwoHopSource};
use serde::{Deserialize, Serialize};

/// Name of the added V-symbol.
pub const V_STAR: &str = "v*";

const EXACT: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub gamma: f64,
    pub theta: f64,
    /// a′ = b·log|X| + d·log|Y|.
    pub a_prime: f64,
    /// a = a′ + (c+1)·log|Y| + c·log|Z|.
    pub a: f64,
    /// Joint over (X, Y, Z, U, Ṽ).
    pub perturbed: JointPmf,
    pub v_tilde_given_y: Kernel,
    pub p_v_tilde: Vec<f64>,
    pub y_given_v_tilde: Kernel,
    pub z_given_v_tilde: Kernel,
    pub ledger: Ledger,
}

impl PerturbationReport {
    pub fn all_pass(&self) -> bool {
        !self.ledger.has_fail()
    }
}

fn cond_rows(joint: &[f64], rows: usize, cols: usize) -> (Vec<f64>, Vec<f64>) {
    let mut marg = vec![0.0; rows];
    let mut k = vec![0.0; rows * cols];
    for r in 0..rows {
        marg[r] = joint[r * cols..(r + 1) * cols].iter().sum();
        for c in 0..cols {
            k[r * cols + c] = if marg[r] > 0.0 { joint[r * cols + c] / marg[r] } else { 1.0 / cols as f64 };
        }
    }
    (marg, k)
}

pub fn perturb_gamma(s: &TwoHopSource, q1: &Q1Coupling, w: &TradeoffWeights, gamma: f64) -> Result<PerturbationReport> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("γ must be positive, got {gamma}")));
    }
    let theta = q1.theta;
    if let Some((y, dev)) = q1.band_violation(s) {
        return Err(Error::Domain(format!(
            "coupling violates the band at y = {}: |Q_Y − P_Y| = {dev:.3e} > θ·P_Y = {:.3e}",
            s.p_xy().axes()[1].labels[y],
            theta * s.py()[y]
        )));
    }
    let (nx, ny, nz) = (s.nx(), s.ny(), s.nz());
    let nu = q1.u_given_xy.outputs();
    let nv = q1.v_given_y.outputs();
    let nvt = nv + 1;
    let py = s.py();
    let pz = s.pz();
    let wz = s.p_z_given_y().flat();
    let qy = q1.q_y();
    let vk = q1.v_given_y.flat();

    // Q_{YV}, Q_V, Q_{Y|V}
    let mut qvy = vec![0.0; nv * ny];
    for y in 0..ny {
        for v in 0..nv {
            qvy[v * ny + y] = qy[y] * vk[y * nv + v];
        }
    }
    let (qv, qy_given_v) = cond_rows(&qvy, nv, ny);

    // P_Ṽ and P_{Y|Ṽ}
    let mut pvt = vec![0.0; nvt];
    let mut y_given_vt = vec![0.0; nvt * ny];
    for v in 0..nv {
        pvt[v] = qv[v] / (1.0 + theta);
        y_given_vt[v * ny..(v + 1) * ny].copy_from_slice(&qy_given_v[v * ny..(v + 1) * ny]);
    }
    pvt[nv] = theta / (1.0 + theta);
    for y in 0..ny {
        y_given_vt[nv * ny + y] = if theta > 0.0 { (1.0 + theta) / theta * py[y] - qy[y] / theta } else { py[y] };
    }
    let star_row = y_given_vt[nv * ny..].to_vec();
    // a coupling on the band edge leaves rounding residue of either sign; the
    // ledger sees the raw row, the joint gets the clamped one
    for p in &mut y_given_vt[nv * ny..] {
        if *p < 0.0 && *p > -EXACT {
            *p = 0.0;
        }
    }

    // joint (Ṽ, Y) and its Y-marginal
    let mut pvty = vec![0.0; nvt * ny];
    for v in 0..nvt {
        for y in 0..ny {
            pvty[v * ny + y] = pvt[v] * y_given_vt[v * ny + y];
        }
    }
    let pty: Vec<f64> = (0..ny).map(|y| (0..nvt).map(|v| pvty[v * ny + y]).sum()).collect();
    let mut vt_given_y = vec![0.0; ny * nvt];
    for y in 0..ny {
        for v in 0..nvt {
            vt_given_y[y * nvt + v] = if pty[y] > 0.0 { pvty[v * ny + y] / pty[y] } else { 1.0 / nvt as f64 };
        }
    }
    // Z given Ṽ through the true channel
    let mut z_given_vt = vec![0.0; nvt * nz];
    for v in 0..nvt {
        for y in 0..ny {
            for z in 0..nz {
                z_given_vt[v * nz + z] += y_given_vt[v * ny + y] * wz[y * nz + z];
            }
        }
    }

    // perturbed joint P_XYZ Q_{U|X} P_{Ṽ|Y}
    let qux = q1.q_u_given_x();
    let shape = [nx, ny, nz, nu, nvt];
    let mut m = vec![0.0; shape.iter().product()];
    let mut i = 0;
    for x in 0..nx {
        for y in 0..ny {
            let pxy = s.pxy()[x * ny + y];
            for z in 0..nz {
                let p = pxy * wz[y * nz + z];
                for u in 0..nu {
                    let pu = p * qux.row(x)[u];
                    for v in 0..nvt {
                        m[i] = pu * vt_given_y[y * nvt + v];
                        i += 1;
                    }
                }
            }
        }
    }
    let mi = |a: usize, b: usize| {
        let (t, _) = tensor::marginal(&m, &shape, &[a, b]);
        tensor::mi_2d(&t, shape[a], shape[b])
    };
    let p_ivy = mi(4, 1);
    let p_ivz = mi(4, 2);
    let p_iux = mi(3, 0);

    // the band coupling's own quantities
    let r = q1.r();
    let rsh = [nx, ny, nu];
    let q_iuy_given_x = {
        let (t, _) = tensor::marginal(&r, &rsh, &[2, 1, 0]);
        tensor::cmi_3d(&t, nu, ny, nx)
    };
    let q_ivy = tensor::mi_2d(&qvy, nv, ny);
    let mut qvz = vec![0.0; nv * nz];
    for v in 0..nv {
        for y in 0..ny {
            for z in 0..nz {
                qvz[v * nz + z] += qvy[v * ny + y] * wz[y * nz + z];
            }
        }
    }
    let q_ivz = tensor::mi_2d(&qvz, nv, nz);
    let d_y = tensor::kl(&qy, py);
    let d_xy = tensor::kl(q1.q_xy.mass(), s.pxy());
    // P^(γ)_XYU = P_XY Q_{U|X}
    let mut pxyu = vec![0.0; nx * ny * nu];
    for x in 0..nx {
        for y in 0..ny {
            for u in 0..nu {
                pxyu[(x * ny + y) * nu + u] = s.pxy()[x * ny + y] * qux.row(x)[u];
            }
        }
    }
    let d_xyu = tensor::kl(&r, &pxyu);
    let (q_ux, _) = tensor::marginal(&r, &rsh, &[0, 2]);
    let (p_ux, _) = tensor::marginal(&pxyu, &rsh, &[0, 2]);
    let d_ux = tensor::kl(&q_ux, &p_ux);
    let l1_ux: f64 = q_ux.iter().zip(&p_ux).map(|(a, b)| (a - b).abs()).sum();

    let ln = |k: usize| (k as f64).ln();
    let a_prime = w.b * ln(nx) + w.d * ln(ny);
    let a = a_prime + (w.c + 1.0) * ln(ny) + w.c * ln(nz);
    let mu = s.mu();
    let premise_ok = d_xyu <= a / gamma;

    let mut l = Ledger::new();
    let ydev = pty.iter().zip(py).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    l.push(Entry::eq("y_marginal_preserved", ydev, 0.0, EXACT));
    l.push(Entry::eq("v_star_mass", pvt[nv], theta / (1.0 + theta), EXACT));
    let star_min = star_row.iter().copied().fold(f64::INFINITY, f64::min);
    l.push(Entry::ge("v_star_row_nonnegative", star_min, -EXACT));
    l.push(Entry::eq("v_star_row_sums_to_one", star_row.iter().sum::<f64>(), 1.0, EXACT));
    let mut zdev: f64 = 0.0;
    let mut qz_given_v = vec![0.0; nv * nz];
    for v in 0..nv {
        for z in 0..nz {
            if qv[v] > 0.0 {
                qz_given_v[v * nz + z] = qvz[v * nz + z] / qv[v];
                zdev = zdev.max((z_given_vt[v * nz + z] - qz_given_v[v * nz + z]).abs());
            }
        }
    }
    l.push(Entry::eq("z_given_v_matches", zdev, 0.0, EXACT));
    if theta > 0.0 {
        let qz: Vec<f64> = (0..nz).map(|z| (0..ny).map(|y| qy[y] * wz[y * nz + z]).sum()).collect();
        let sdev = (0..nz)
            .map(|z| (z_given_vt[nv * nz + z] - ((1.0 + theta) / theta * pz[z] - qz[z] / theta)).abs())
            .fold(0.0, f64::max);
        l.push(Entry::eq("z_given_v_star", sdev, 0.0, 1e-10));
    }
    let (mux, _) = tensor::marginal(&m, &shape, &[3, 1, 0]);
    l.push(Entry::eq("markov_u_x_y", tensor::cmi_3d(&mux, nu, ny, nx), 0.0, EXACT));
    let (mvzy, _) = tensor::marginal(&m, &shape, &[4, 2, 1]);
    l.push(Entry::eq("markov_v_y_z", tensor::cmi_3d(&mvzy, nvt, nz, ny), 0.0, EXACT));

    let bound = (q_ivy + d_y) / (1.0 + theta) + theta / (1.0 + theta) * mu.ln();
    l.push(Entry::le("i_vy_perturbed_upper", p_ivy, bound));
    l.push(Entry::ge("i_vy_lower", q_ivy, p_ivy - d_y - theta * mu.ln()));
    l.push(
        Entry::ge("i_vy_lower_a_over_gamma", q_ivy, p_ivy - a / gamma - theta * mu.ln())
            .premise(premise_ok, "D(Q_XYU‖P_XYU) > a/γ"),
    );
    l.push(Entry::ge("i_vz_perturbed_lower", p_ivz, q_ivz / (1.0 + theta)));
    l.push(Entry::le("i_vz_upper", q_ivz, (1.0 + theta) * p_ivz));
    l.push(Entry::le("i_vz_upper_log_z", q_ivz, p_ivz + theta * ln(nz)));
    l.push(Entry::eq("divergence_split", d_xyu, d_xy + q_iuy_given_x, 1e-10));
    l.push(Entry::le("d_y_below_d_xyu", d_y, d_xyu));
    l.push(Entry::le("d_xyu_below_a_over_gamma", d_xyu, a / gamma).premise(premise_ok, "only guaranteed at the minimizer"));
    l.push(Entry::le("pinsker_ux", l1_ux, (2.0 * d_ux).sqrt()));
    l.push(Entry::le("pinsker_ux_xyu", l1_ux, (2.0 * d_xyu).sqrt()));
    l.push(Entry::le("pinsker_ux_a_over_gamma", l1_ux, (2.0 * a / gamma).sqrt()).premise(premise_ok, "D(Q_XYU‖P_XYU) > a/γ"));
    if l1_ux <= 0.5 {
        let h_q = tensor::entropy(&q_ux);
        let h_p = tensor::entropy(&p_ux);
        let rhs = if l1_ux > 0.0 { -l1_ux * (l1_ux / (nu * nx) as f64).ln() } else { 0.0 };
        l.push(Entry::le("entropy_continuity_ux", (h_q - h_p).abs(), rhs));
    } else {
        l.push(Entry::vacuous("entropy_continuity_ux", "l1 distance above 1/2"));
    }
    l.push(Entry::eq("i_ux_perturbed_is_marginal_law", p_iux, {
        let (t, _) = tensor::marginal(&pxyu, &rsh, &[0, 2]);
        tensor::mi_2d(&t, nx, nu)
    }, 1e-12));

    let mut vt_labels: Vec<String> = q1.v_given_y.to_alphabet().to_vec();
    vt_labels.push(V_STAR.into());
    let xyz = s.p_xyz();
    let axes = vec![
        xyz.axes()[0].clone(),
        xyz.axes()[1].clone(),
        xyz.axes()[2].clone(),
        Axis::new("U", q1.u_given_xy.to_alphabet().to_vec()),
        Axis::new("V", vt_labels.clone()),
    ];
    let perturbed = JointPmf::new(axes, m)?;
    let ylabels = s.p_xy().axes()[1].labels.clone();
    let zlabels = xyz.axes()[2].labels.clone();
    let mk = |from: Vec<String>, to: Vec<String>, flat: &[f64], cols: usize| {
        Kernel::new(from, to, flat.chunks(cols).map(|c| c.to_vec()).collect())
    };
    Ok(PerturbationReport {
        gamma,
        theta,
        a_prime,
        a,
        perturbed,
        v_tilde_given_y: mk(ylabels.clone(), vt_labels.clone(), &vt_given_y, nvt)?,
        p_v_tilde: pvt,
        y_given_v_tilde: mk(vt_labels.clone(), ylabels, &y_given_vt, ny)?,
        z_given_v_tilde: mk(vt_labels, zlabels, &z_given_vt, nz)?,
        ledger: l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par;
    use crate::single_letter::{CardBounds, Q1Coupling};

    #[test]
    fn exact_band_constant_v() {
        let s = TwoHopSource::dsbs(0.1, 0.1);
        let q_xy = s.p_xy().clone();
        let u = Kernel::constant(4, &[1.0]);
        let v = Kernel::constant(2, &[1.0]);
        let q1 = Q1Coupling::new(&s, q_xy, u, v, 0.05).unwrap();
        let w = TradeoffWeights::new(1.0, 1.0, 1.0).unwrap();
        let rep = perturb_gamma(&s, &q1, &w, 4.0).unwrap();
        assert!(rep.all_pass(), "{}", rep.ledger.to_table());
        assert!((rep.p_v_tilde[1] - 0.05 / 1.05).abs() < 1e-15);
        let y = rep.perturbed.marginal(&["Y"]).unwrap();
        for (a, b) in y.mass().iter().zip(s.py()) {
            assert!((a - b).abs() < 1e-12);
        }
        let vt = rep.perturbed.marginal(&["V"]).unwrap();
        let h = tensor::mi_2d(rep.perturbed.marginal(&["V", "Y"]).unwrap().mass(), 2, 2);
        assert!(h.abs() < 1e-12);
        assert_eq!(vt.mass().len(), 2);
        assert!((rep.a_prime - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((rep.a - 5.0 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn random_band_couplings_pass() {
        let s = TwoHopSource::dsbs(0.1, 0.1);
        let w = TradeoffWeights::new(1.0, 1.0, 1.0).unwrap();
        for seed in 0..200 {
            let mut rng = par::stream_rng(seed, 0);
            let q1 = Q1Coupling::random(&s, &mut rng, 0.05, CardBounds::for_gamma(&s)).unwrap();
            let rep = perturb_gamma(&s, &q1, &w, 4.0).unwrap();
            assert!(rep.all_pass(), "seed {seed}\n{}", rep.ledger.to_table());
        }
    }

    #[test]
    fn band_violation_is_refused() {
        let s = TwoHopSource::dsbs(0.1, 0.1);
        let q_xy = JointPmf::new(vec![Axis::sized("X", 2), Axis::sized("Y", 2)], vec![0.5, 0.3, 0.1, 0.1]).unwrap();
        let q1 = Q1Coupling { q_xy, u_given_xy: Kernel::identity(4), v_given_y: Kernel::identity(2), theta: 0.05 };
        let w = TradeoffWeights::new(1.0, 1.0, 1.0).unwrap();
        assert!(perturb_gamma(&s, &q1, &w, 4.0).is_err());
    }
}
