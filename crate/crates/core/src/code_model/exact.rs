use super::code::{TwoHopCode, H0, H1};
use super::profile::ErrorProfile;
use super::seq;
use crate::error::{Error, Result};
use crate::prob::{Axis, JointPmf, TwoHopSource};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest |X|^n·|Y|^n enumeration allowed in exact mode.
pub const EXACT_BUDGET: u128 = 1 << 26;

/// A law over (message, sequence), flat index m·cols + seq.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub rows: usize,
    pub cols: usize,
    pub mass: Vec<f64>,
}

impl Table {
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.mass[r * self.cols + c]
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        self.mass.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for r in self.mass.chunks(self.cols) {
            for (o, v) in out.iter_mut().zip(r) {
                *o += v;
            }
        }
        out
    }

    /// As a JointPmf with axes (`row_name`, `col_name`).
    pub fn to_joint(&self, row_name: &str, col_name: &str) -> Result<JointPmf> {
        JointPmf::new(vec![Axis::sized(row_name, self.rows), Axis::sized(col_name, self.cols)], self.mass.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InducedLaw {
    pub h0_m1y: Table,
    pub h1_m1y: Table,
    pub h0_m2z: Table,
    pub h1_m2z: Table,
}

/// Sizes of X^n, Y^n, Z^n after the budget guard.
pub fn sizes(s: &TwoHopSource, n: usize) -> Result<(usize, usize, usize)> {
    let xs = seq::count(s.nx(), n, EXACT_BUDGET)?;
    let ys = seq::count(s.ny(), n, EXACT_BUDGET)?;
    let zs = seq::count(s.nz(), n, EXACT_BUDGET)?;
    let cells = xs as u128 * ys as u128;
    if cells > EXACT_BUDGET {
        return Err(Error::Budget { what: format!("X^n×Y^n at n = {n}"), needed: cells, limit: EXACT_BUDGET });
    }
    Ok((xs, ys, zs))
}

/// H0 law of (M1, Y^n): Σ_x P^n(x, y)·1{f1(x) = m1}.
pub fn h0_m1y(code: &TwoHopCode, s: &TwoHopSource) -> Result<Table> {
    let (xs, ys, _) = sizes(s, code.n)?;
    let pxy = seq::power_joint(s.pxy(), s.nx(), s.ny(), code.n);
    // shard over m1 values so the summation order is fixed
    let mass: Vec<f64> = (0..code.n1)
        .into_par_iter()
        .flat_map_iter(|m| {
            let mut row = vec![0.0; ys];
            for x in 0..xs {
                if code.f1[x] == m {
                    for (r, p) in row.iter_mut().zip(&pxy[x * ys..(x + 1) * ys]) {
                        *r += p;
                    }
                }
            }
            row
        })
        .collect();
    Ok(Table { rows: code.n1, cols: ys, mass })
}

/// Law of M1 = f1(X^n).
pub fn m1_marginal(code: &TwoHopCode, s: &TwoHopSource) -> Vec<f64> {
    let px = seq::power_pmf(s.px(), code.n);
    let mut out = vec![0.0; code.n1];
    for (x, p) in px.iter().enumerate() {
        out[code.f1[x]] += p;
    }
    out
}

/// (M2, Y^n) table obtained by routing a (M1, Y^n) table through f2.
pub fn route_m2y(code: &TwoHopCode, m1y: &Table) -> Table {
    let ys = m1y.cols;
    let mut mass = vec![0.0; code.n2 * ys];
    for m1 in 0..code.n1 {
        for y in 0..ys {
            mass[code.f2[m1][y] * ys + y] += m1y.at(m1, y);
        }
    }
    Table { rows: code.n2, cols: ys, mass }
}

pub fn induced_laws(code: &TwoHopCode, s: &TwoHopSource) -> Result<InducedLaw> {
    code.validate(s)?;
    let n = code.n;
    let (xs, ys, zs) = sizes(s, n)?;
    let h0_m1y = h0_m1y(code, s)?;
    let pm1 = m1_marginal(code, s);
    let px = seq::power_pmf(s.px(), n);
    let py = seq::power_pmf(s.py(), n);
    let pz = seq::power_pmf(s.pz(), n);
    let mut h1 = Vec::with_capacity(code.n1 * ys);
    for m in &pm1 {
        h1.extend(py.iter().map(|p| m * p));
    }
    let h1_m1y = Table { rows: code.n1, cols: ys, mass: h1 };
    // M2 laws are accumulated in x^n order so they do not depend on M1 labels
    let pxy = seq::power_joint(s.pxy(), s.nx(), s.ny(), n);
    let mut h0_m2y = vec![0.0; code.n2 * ys];
    let mut pm2 = vec![0.0; code.n2];
    for x in 0..xs {
        let m1 = code.f1[x];
        let row = &code.f2[m1];
        for y in 0..ys {
            h0_m2y[row[y] * ys + y] += pxy[x * ys + y];
            pm2[row[y]] += px[x] * py[y];
        }
    }
    let h0_m2z = Table {
        rows: code.n2,
        cols: zs,
        mass: seq::apply_channel(&h0_m2y, code.n2, s.ny(), s.nz(), s.p_z_given_y().flat(), n),
    };
    let mut h1z = Vec::with_capacity(code.n2 * zs);
    for m in &pm2 {
        h1z.extend(pz.iter().map(|p| m * p));
    }
    Ok(InducedLaw { h0_m1y, h1_m1y, h0_m2z, h1_m2z: Table { rows: code.n2, cols: zs, mass: h1z } })
}

/// Sum in ascending order, so the result does not depend on cell order.
pub(crate) fn sorted_sum(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    v.iter().sum()
}

fn mass_where(t: &Table, g: &[Vec<u8>], want: u8) -> f64 {
    let mut v = Vec::new();
    for r in 0..t.rows {
        for c in 0..t.cols {
            if g[r][c] == want {
                v.push(t.at(r, c));
            }
        }
    }
    sorted_sum(v)
}

pub fn errors_from_laws(code: &TwoHopCode, laws: &InducedLaw) -> ErrorProfile {
    let clamp = |v: f64| v.clamp(0.0, 1.0);
    ErrorProfile::exact(
        clamp(mass_where(&laws.h0_m1y, &code.g1, H1)),
        clamp(mass_where(&laws.h1_m1y, &code.g1, H0)),
        clamp(mass_where(&laws.h0_m2z, &code.g2, H1)),
        clamp(mass_where(&laws.h1_m2z, &code.g2, H0)),
    )
}

pub fn exact_errors(code: &TwoHopCode, s: &TwoHopSource) -> Result<ErrorProfile> {
    Ok(errors_from_laws(code, &induced_laws(code, s)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::mutual_information;

    fn copy_source() -> TwoHopSource {
        TwoHopSource::from_arrays(vec![vec![0.5, 0.0], vec![0.0, 0.5]], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn identity_code(g1_match: bool) -> TwoHopCode {
        TwoHopCode {
            n: 1,
            n1: 2,
            n2: 1,
            f1: vec![0, 1],
            f2: vec![vec![0, 0], vec![0, 0]],
            g1: if g1_match { vec![vec![H0, H1], vec![H1, H0]] } else { vec![vec![H0; 2]; 2] },
            g2: vec![vec![H0, H0]],
        }
    }

    #[test]
    fn identity_on_independent_source() {
        let s = TwoHopSource::independent(&[0.3, 0.7], &[0.6, 0.4], &[0.5, 0.5]).unwrap();
        let l = induced_laws(&identity_code(false), &s).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert!((l.h0_m1y.at(x, y) - s.px()[x] * s.py()[y]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn copy_source_match_test() {
        let s = copy_source();
        let l = induced_laws(&identity_code(true), &s).unwrap();
        assert_eq!(l.h0_m1y.mass, vec![0.5, 0.0, 0.0, 0.5]);
        let e = errors_from_laws(&identity_code(true), &l);
        assert_eq!((e.beta1, e.beta2), (0.0, 0.5));
    }

    #[test]
    fn trivial_decoders() {
        let s = TwoHopSource::dsbs(0.1, 0.1);
        let e = exact_errors(&TwoHopCode::accept_all(&s, 2).unwrap(), &s).unwrap();
        assert!(e.beta1.abs() < 1e-12 && (e.beta2 - 1.0).abs() < 1e-12);
        let e = exact_errors(&TwoHopCode::constant(&s, 2, H0, H1).unwrap(), &s).unwrap();
        assert!((e.eta1 - 1.0).abs() < 1e-12 && e.eta2 == 0.0);
    }

    #[test]
    fn h1_laws_factor_and_h0_marginals() {
        let s = TwoHopSource::dsbs(0.1, 0.2);
        let mut c = TwoHopCode::accept_all(&s, 2).unwrap();
        c.n1 = 2;
        c.n2 = 2;
        c.f1 = vec![0, 0, 1, 1];
        c.f2 = vec![vec![0, 1, 1, 0], vec![1, 1, 0, 0]];
        c.g1 = vec![vec![H0; 4]; 2];
        c.g2 = vec![vec![H0; 4]; 2];
        let l = induced_laws(&c, &s).unwrap();
        for t in [&l.h1_m1y, &l.h1_m2z] {
            let j = t.to_joint("M", "S").unwrap();
            assert!(mutual_information(&j, &["M"], &["S"]).unwrap() < 1e-10);
        }
        // Y^n marginal of the H0 table is P_Y^n, Z^n marginal is P_Z^n
        let py = seq::power_pmf(s.py(), 2);
        let pz = seq::power_pmf(s.pz(), 2);
        for (a, b) in l.h0_m1y.col_marginal().iter().zip(&py) {
            assert!((a - b).abs() < 1e-15);
        }
        for (a, b) in l.h0_m2z.col_marginal().iter().zip(&pz) {
            assert!((a - b).abs() < 1e-15);
        }
        // brute force H0 (M2, Z^n)
        let p3 = s.p_xyz().power(2).unwrap();
        let mut direct = vec![0.0; 2 * 4];
        for (i, m) in p3.mass().iter().enumerate() {
            // axes X1 Y1 Z1 X2 Y2 Z2 in power order
            let d = seq::digits(i, 2, 6);
            let (x, y, z) = (d[0] * 2 + d[3], d[1] * 2 + d[4], d[2] * 2 + d[5]);
            direct[c.f2[c.f1[x]][y] * 4 + z] += m;
        }
        for (a, b) in direct.iter().zip(&l.h0_m2z.mass) {
            assert!((a - b).abs() < 1e-14, "{a} {b}");
        }
    }

    #[test]
    fn relabel_invariance() {
        let s = TwoHopSource::dsbs(0.1, 0.2);
        let mut c = TwoHopCode::accept_all(&s, 2).unwrap();
        c.n1 = 3;
        c.f1 = vec![0, 2, 1, 2];
        c.f2 = vec![vec![0; 4]; 3];
        c.g1 = vec![vec![H0, H1, H1, H0], vec![H1, H1, H0, H0], vec![H0, H0, H0, H1]];
        let e = exact_errors(&c, &s).unwrap();
        let r = exact_errors(&c.relabel_m1(&[2, 0, 1]), &s).unwrap();
        assert_eq!(e, r);
    }

    #[test]
    fn budget_guard() {
        let s = TwoHopSource::dsbs(0.1, 0.1);
        assert!(matches!(sizes(&s, 14), Err(Error::Budget { .. })));
        assert!(sizes(&s, 13).is_ok());
    }
}
