use crate::error::Result;
use crate::single_letter::TradeoffWeights;
use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    MonteCarlo,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorProfile {
    pub beta1: f64,
    pub beta2: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub mode: Mode,
    /// Half-widths of the Wilson intervals, in (β1, β2, η1, η2) order.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ci: Option<[f64; 4]>,
    /// The Wilson intervals themselves.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub intervals: Option<[[f64; 2]; 4]>,
    /// Samples per hypothesis.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

impl ErrorProfile {
    pub fn exact(beta1: f64, beta2: f64, eta1: f64, eta2: f64) -> Self {
        ErrorProfile { beta1, beta2, eta1, eta2, mode: Mode::Exact, ci: None, intervals: None, samples: None, seed: None }
    }

    pub fn values(&self) -> [f64; 4] {
        [self.beta1, self.beta2, self.eta1, self.eta2]
    }
}

/// Wilson score interval for k successes in n trials.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let den = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / den;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / den;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// log β2 + b·log N1 + c·log η2 + d·log N2 in nats; −∞ when β2 or η2 is zero.
pub fn weighted_lhs(p: &ErrorProfile, n1: f64, n2: f64, w: &TradeoffWeights) -> f64 {
    if p.beta2 <= 0.0 || (p.eta2 <= 0.0 && w.c > 0.0) {
        return f64::NEG_INFINITY;
    }
    let ceta = if w.c > 0.0 { w.c * p.eta2.ln() } else { 0.0 };
    p.beta2.ln() + w.b * n1.ln() + ceta + w.d * n2.ln()
}

#[derive(Debug, Clone, Serialize)]
pub struct CsvRow {
    pub n: usize,
    #[serde(rename = "N1")]
    pub n1: usize,
    #[serde(rename = "N2")]
    pub n2: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub mode: &'static str,
    pub ci1: Option<f64>,
    pub ci2: Option<f64>,
    pub ci3: Option<f64>,
    pub ci4: Option<f64>,
    pub seed: Option<u64>,
}

impl CsvRow {
    pub fn new(n: usize, n1: usize, n2: usize, p: &ErrorProfile) -> Self {
        let ci = |i: usize| p.ci.map(|c| c[i]);
        CsvRow {
            n,
            n1,
            n2,
            beta1: p.beta1,
            beta2: p.beta2,
            eta1: p.eta1,
            eta2: p.eta2,
            mode: p.mode.as_str(),
            ci1: ci(0),
            ci2: ci(1),
            ci3: ci(2),
            ci4: ci(3),
            seed: p.seed,
        }
    }
}

/// CSV with header n,N1,N2,beta1,beta2,eta1,eta2,mode,ci1..ci4,seed.
pub fn profiles_csv(rows: &[CsvRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| crate::Error::Io(std::io::Error::other(e)))?;
    }
    let bytes = w.into_inner().map_err(|e| crate::Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}
