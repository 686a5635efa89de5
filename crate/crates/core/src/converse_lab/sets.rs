//! Product laws of a source at blocklength n and the acceptance regions of a
//! code, as flat tables over enumerated sequences.

use crate::code_model::{seq, TwoHopCode, EXACT_BUDGET, H0};
use crate::error::{Error, Result};
use crate::prob::TwoHopSource;

/// P_X^n, P_Y^n, P_Z^n, P_XY^n and P_{Z|Y}^n for one n.
#[derive(Debug, Clone)]
pub struct SourcePowers {
    pub n: usize,
    pub xs: usize,
    pub ys: usize,
    pub zs: usize,
    pub px: Vec<f64>,
    pub py: Vec<f64>,
    pub pz: Vec<f64>,
    /// flat x·ys + y
    pub pxy: Vec<f64>,
    /// flat y·zs + z
    pub pz_given_y: Vec<f64>,
    pub nz: usize,
}

impl SourcePowers {
    pub fn new(s: &TwoHopSource, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("blocklength must be at least 1".into()));
        }
        let xs = seq::count(s.nx(), n, EXACT_BUDGET)?;
        let ys = seq::count(s.ny(), n, EXACT_BUDGET)?;
        let zs = seq::count(s.nz(), n, EXACT_BUDGET)?;
        for (what, cells) in [("X^n×Y^n", xs as u128 * ys as u128), ("Y^n×Z^n", ys as u128 * zs as u128)] {
            if cells > EXACT_BUDGET {
                return Err(Error::Budget { what: format!("{what} at n = {n}"), needed: cells, limit: EXACT_BUDGET });
            }
        }
        let w = s.p_z_given_y().flat();
        let mut pz_given_y = vec![0.0; ys * zs];
        for y in 0..ys {
            let yd = seq::digits(y, s.ny(), n);
            for z in 0..zs {
                let zd = seq::digits(z, s.nz(), n);
                pz_given_y[y * zs + z] = yd.iter().zip(&zd).map(|(a, b)| w[a * s.nz() + b]).product();
            }
        }
        Ok(SourcePowers {
            n,
            xs,
            ys,
            zs,
            px: seq::power_pmf(s.px(), n),
            py: seq::power_pmf(s.py(), n),
            pz: seq::power_pmf(s.pz(), n),
            pxy: seq::power_joint(s.pxy(), s.nx(), s.ny(), n),
            pz_given_y,
            nz: s.nz(),
        })
    }
}

/// D_Y over (x, y), D_Z over (x, y, z), G(m2) over z.
#[derive(Debug, Clone)]
pub struct AcceptanceSets {
    pub d_y: Vec<bool>,
    pub d_z: Vec<bool>,
    pub g: Vec<Vec<bool>>,
    /// P_{Z|Y}^n(G(m2)|y), flat m2·ys + y
    pub g_given_y: Vec<f64>,
}

impl AcceptanceSets {
    pub fn m2_of(code: &TwoHopCode, x: usize, y: usize) -> usize {
        code.f2[code.f1[x]][y]
    }
}

pub fn acceptance_sets(code: &TwoHopCode, pw: &SourcePowers) -> Result<AcceptanceSets> {
    let (xs, ys, zs) = (pw.xs, pw.ys, pw.zs);
    if code.n != pw.n || code.f1.len() != xs || code.g1.first().map_or(true, |r| r.len() != ys) {
        return Err(Error::Shape("code does not match the enumerated alphabets".into()));
    }
    if code.g2.first().map_or(true, |r| r.len() != zs) {
        return Err(Error::Shape("g2 rows do not match Z^n".into()));
    }
    let cells = xs as u128 * ys as u128 * zs as u128;
    if cells > EXACT_BUDGET {
        return Err(Error::Budget { what: format!("X^n×Y^n×Z^n at n = {}", pw.n), needed: cells, limit: EXACT_BUDGET });
    }
    let g: Vec<Vec<bool>> = code.g2.iter().map(|r| r.iter().map(|&v| v == H0).collect()).collect();
    let mut g_given_y = vec![0.0; code.n2 * ys];
    for (m2, gm) in g.iter().enumerate() {
        for y in 0..ys {
            let row = &pw.pz_given_y[y * zs..(y + 1) * zs];
            g_given_y[m2 * ys + y] = row.iter().zip(gm).filter(|(_, a)| **a).map(|(p, _)| p).sum();
        }
    }
    let mut d_y = vec![false; xs * ys];
    let mut d_z = vec![false; xs * ys * zs];
    for x in 0..xs {
        let m1 = code.f1[x];
        for y in 0..ys {
            d_y[x * ys + y] = code.g1[m1][y] == H0;
            let gm = &g[code.f2[m1][y]];
            d_z[(x * ys + y) * zs..(x * ys + y + 1) * zs].copy_from_slice(gm);
        }
    }
    Ok(AcceptanceSets { d_y, d_z, g, g_given_y })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_model::H1;

    #[test]
    fn trivial_decoders() {
        let s = TwoHopSource::dsbs(0.1, 0.1);
        let pw = SourcePowers::new(&s, 2).unwrap();
        let a = acceptance_sets(&TwoHopCode::accept_all(&s, 2).unwrap(), &pw).unwrap();
        assert!(a.d_y.iter().all(|v| *v) && a.d_z.iter().all(|v| *v));
        let r = acceptance_sets(&TwoHopCode::constant(&s, 2, H0, H1).unwrap(), &pw).unwrap();
        assert!(r.g.iter().all(|g| g.iter().all(|v| !v)));
        assert!(r.g_given_y.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn powers_are_normalized() {
        let s = TwoHopSource::dsbs(0.2, 0.3);
        let pw = SourcePowers::new(&s, 3).unwrap();
        assert!((pw.pxy.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for y in 0..pw.ys {
            let r: f64 = pw.pz_given_y[y * pw.zs..(y + 1) * pw.zs].iter().sum();
            assert!((r - 1.0).abs() < 1e-12);
        }
    }
}
