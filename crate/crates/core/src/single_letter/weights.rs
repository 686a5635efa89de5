use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

fn check(name: &str, v: f64) -> Result<f64> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::Domain(format!("weight {name} = {v} must be finite and nonnegative")));
    }
    Ok(v)
}

fn parse_list(s: &str, k: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Domain(format!("bad weight `{t}`: {e}"))))
        .collect::<Result<_>>()?;
    if v.len() != k {
        return Err(Error::Domain(format!("expected {k} comma-separated weights, got {}", v.len())));
    }
    Ok(v)
}

/// Weights (b, c, d) of the trade-off objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffWeights {
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl TradeoffWeights {
    pub fn new(b: f64, c: f64, d: f64) -> Result<Self> {
        Ok(Self { b: check("b", b)?, c: check("c", c)?, d: check("d", d)? })
    }

    /// Parse "b,c,d".
    pub fn parse(s: &str) -> Result<Self> {
        let v = parse_list(s, 3)?;
        Self::new(v[0], v[1], v[2])
    }

    /// Cartesian grid b × c × d in lexicographic order.
    pub fn grid(bs: &[f64], cs: &[f64], ds: &[f64]) -> Result<Vec<Self>> {
        let mut out = Vec::with_capacity(bs.len() * cs.len() * ds.len());
        for &b in bs {
            for &c in cs {
                for &d in ds {
                    out.push(Self::new(b, c, d)?);
                }
            }
        }
        Ok(out)
    }

    /// {0} ∪ {2^k : k = −3..6} on every axis.
    pub fn default_certify_grid() -> Vec<Self> {
        let mut axis = vec![0.0];
        axis.extend((-3..=6).map(|k| 2f64.powi(k)));
        Self::grid(&axis, &axis, &axis).expect("nonnegative grid")
    }
}

/// Weights (b₁, b₂, c, d) of the three-part objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TildeWeights {
    pub b1: f64,
    pub b2: f64,
    pub c: f64,
    pub d: f64,
}

impl TildeWeights {
    pub fn new(b1: f64, b2: f64, c: f64, d: f64) -> Result<Self> {
        Ok(Self { b1: check("b1", b1)?, b2: check("b2", b2)?, c: check("c", c)?, d: check("d", d)? })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let v = parse_list(s, 4)?;
        Self::new(v[0], v[1], v[2], v[3])
    }
}

/// A rate-exponent tuple, nats per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R2")]
    pub r2: f64,
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E2")]
    pub e2: f64,
}

impl RegionPoint {
    pub fn new(r1: f64, r2: f64, e1: f64, e2: f64) -> Result<Self> {
        for (n, v) in [("R1", r1), ("R2", r2), ("E1", e1), ("E2", e2)] {
            if !(v >= 0.0) {
                return Err(Error::Domain(format!("{n} = {v} must be nonnegative")));
            }
        }
        Ok(Self { r1, r2, e1, e2 })
    }

    /// −E1 + b·R1 − c·E2 + d·R2.
    pub fn weighted(&self, w: &TradeoffWeights) -> f64 {
        -self.e1 + w.b * self.r1 - w.c * self.e2 + w.d * self.r2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_validate() {
        let w = TradeoffWeights::parse("0.5, 1,2").unwrap();
        assert_eq!((w.b, w.c, w.d), (0.5, 1.0, 2.0));
        assert!(TradeoffWeights::parse("1,2").is_err());
        assert!(TradeoffWeights::new(-1.0, 0.0, 0.0).is_err());
        assert!(TildeWeights::parse("0.3,0.3,1,0.5").is_ok());
        assert_eq!(TradeoffWeights::default_certify_grid().len(), 11 * 11 * 11);
        assert!(RegionPoint::new(0.0, 0.0, -0.1, 0.0).is_err());
    }
}
