use super::seq;
use crate::error::{Error, Result};
use crate::prob::TwoHopSource;
use serde::{Deserialize, Serialize};

/// Decision value for "accept H0".
pub const H0: u8 = 0;
/// Decision value for "declare H1".
pub const H1: u8 = 1;

/// Deterministic (n, N1, N2) code: encoder tables and decision tables, with
/// sequences in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoHopCode {
    pub n: usize,
    #[serde(rename = "N1")]
    pub n1: usize,
    #[serde(rename = "N2")]
    pub n2: usize,
    /// x^n → m1.
    pub f1: Vec<usize>,
    /// [m1][y^n] → m2.
    pub f2: Vec<Vec<usize>>,
    /// [m1][y^n] → 0 (H0) or 1 (H1).
    pub g1: Vec<Vec<u8>>,
    /// [m2][z^n] → 0 (H0) or 1 (H1).
    pub g2: Vec<Vec<u8>>,
}

impl TwoHopCode {
    /// Size of X^n, Y^n, Z^n implied by the tables.
    pub fn table_sizes(&self) -> (usize, usize, usize) {
        (self.f1.len(), self.f2.first().map_or(0, |r| r.len()), self.g2.first().map_or(0, |r| r.len()))
    }

    /// Checks totality, index ranges and table shapes against the source.
    pub fn validate(&self, s: &TwoHopSource) -> Result<()> {
        if self.n == 0 || self.n1 == 0 || self.n2 == 0 {
            return Err(Error::Shape("n, N1 and N2 must be positive".into()));
        }
        let lim = u128::MAX;
        let (xs, ys, zs) = (seq::count(s.nx(), self.n, lim)?, seq::count(s.ny(), self.n, lim)?, seq::count(s.nz(), self.n, lim)?);
        let shape_err = |what: &str, got: usize, want: usize| Error::Shape(format!("{what}: {got} entries, expected {want}"));
        if self.f1.len() != xs {
            return Err(shape_err("f1", self.f1.len(), xs));
        }
        if let Some((i, m)) = self.f1.iter().enumerate().find(|(_, m)| **m >= self.n1) {
            return Err(Error::Shape(format!("f1[{i}] = {m} out of range for N1 = {}", self.n1)));
        }
        for (name, t, rows, cols) in [("f2", &self.f2, self.n1, ys)] {
            if t.len() != rows {
                return Err(shape_err(name, t.len(), rows));
            }
            for (r, row) in t.iter().enumerate() {
                if row.len() != cols {
                    return Err(shape_err(&format!("{name}[{r}]"), row.len(), cols));
                }
                if let Some(m) = row.iter().find(|m| **m >= self.n2) {
                    return Err(Error::Shape(format!("{name}[{r}] holds {m}, out of range for N2 = {}", self.n2)));
                }
            }
        }
        for (name, t, rows, cols) in [("g1", &self.g1, self.n1, ys), ("g2", &self.g2, self.n2, zs)] {
            if t.len() != rows {
                return Err(shape_err(name, t.len(), rows));
            }
            for (r, row) in t.iter().enumerate() {
                if row.len() != cols {
                    return Err(shape_err(&format!("{name}[{r}]"), row.len(), cols));
                }
                if row.iter().any(|g| *g > 1) {
                    return Err(Error::Shape(format!("{name}[{r}] has a decision other than 0/1")));
                }
            }
        }
        Ok(())
    }

    /// N1 = N2 = 1 with constant decisions.
    pub fn constant(s: &TwoHopSource, n: usize, g1: u8, g2: u8) -> Result<Self> {
        let lim = u128::MAX;
        let (xs, ys, zs) = (seq::count(s.nx(), n, lim)?, seq::count(s.ny(), n, lim)?, seq::count(s.nz(), n, lim)?);
        Ok(TwoHopCode {
            n,
            n1: 1,
            n2: 1,
            f1: vec![0; xs],
            f2: vec![vec![0; ys]],
            g1: vec![vec![g1; ys]],
            g2: vec![vec![g2; zs]],
        })
    }

    pub fn accept_all(s: &TwoHopSource, n: usize) -> Result<Self> {
        TwoHopCode::constant(s, n, H0, H0)
    }

    /// Apply a permutation to the M1 labels in f1, f2 and g1.
    pub fn relabel_m1(&self, perm: &[usize]) -> Self {
        let mut c = self.clone();
        c.f1 = self.f1.iter().map(|m| perm[*m]).collect();
        for (m, p) in perm.iter().enumerate() {
            c.f2[*p] = self.f2[m].clone();
            c.g1[*p] = self.g1[m].clone();
        }
        c
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("code serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        TwoHopCode::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_and_validation() {
        let s = TwoHopSource::dsbs(0.1, 0.1);
        let c = TwoHopCode::accept_all(&s, 2).unwrap();
        let j = c.to_json();
        assert!(j.contains("\"N1\":1"));
        let back = TwoHopCode::from_json(&j).unwrap();
        assert_eq!(back, c);
        back.validate(&s).unwrap();
        let mut bad = c.clone();
        bad.f1[0] = 3;
        assert!(bad.validate(&s).is_err());
        let mut bad = c;
        bad.g2[0].pop();
        assert!(bad.validate(&s).is_err());
    }
}
