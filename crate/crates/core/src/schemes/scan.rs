//! Empirical exponent scans over blocklengths.

use super::SchemeBuilder;
use crate::code_model::{exact_errors, ErrorProfile};
use crate::error::Result;
use crate::par;
use crate::prob::TwoHopSource;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    pub exp_beta2: f64,
    pub exp_eta2: f64,
    pub beta1: f64,
    pub eta1: f64,
    pub n1: usize,
    pub n2: usize,
    /// Set when β2 or η2 is exactly zero.
    pub zero_flag: bool,
    #[serde(skip)]
    pub profile: Option<ErrorProfile>,
}

fn exponent(p: f64, n: usize) -> f64 {
    if p > 0.0 { -p.ln() / n as f64 } else { f64::INFINITY }
}

/// Build and evaluate exactly at each n; rows in the order of `n_list`.
pub fn exponent_scan(builder: &dyn SchemeBuilder, s: &TwoHopSource, n_list: &[usize]) -> Result<Vec<ScanRow>> {
    let rows: Vec<Result<ScanRow>> = par::ordered_map(n_list.len(), |i| {
        let n = n_list[i];
        let code = builder.build(s, n)?;
        let p = exact_errors(&code, s)?;
        Ok(ScanRow {
            n,
            exp_beta2: exponent(p.beta2, n),
            exp_eta2: exponent(p.eta2, n),
            beta1: p.beta1,
            eta1: p.eta1,
            n1: code.n1,
            n2: code.n2,
            zero_flag: p.beta2 == 0.0 || p.eta2 == 0.0,
            profile: Some(p),
        })
    });
    rows.into_iter().collect()
}

pub fn scan_csv(rows: &[ScanRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| crate::error::Error::Io(std::io::Error::other(e));
    w.write_record(["n", "exp_beta2", "exp_eta2", "beta1", "eta1", "N1", "N2", "zero_flag"]).map_err(io)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.exp_beta2.to_string(),
            r.exp_eta2.to_string(),
            r.beta1.to_string(),
            r.eta1.to_string(),
            r.n1.to_string(),
            r.n2.to_string(),
            r.zero_flag.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::error::Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::QuantizeBuilder;
    use crate::single_letter::AuxCoupling;

    #[test]
    fn independent_source_scan_is_flat() {
        let s = TwoHopSource::independent(&[0.5, 0.5], &[0.4, 0.6], &[0.5, 0.5]).unwrap();
        let b = QuantizeBuilder { aux: AuxCoupling::identity(&s), margins: (0.1, 0.1), seed: 0 };
        let rows = exponent_scan(&b, &s, &[2, 3, 4]).unwrap();
        for r in &rows {
            assert!(r.exp_beta2.abs() < 1e-12 && r.exp_eta2.abs() < 1e-12);
            assert!(!r.zero_flag);
        }
        let csv = scan_csv(&rows).unwrap();
        assert!(csv.starts_with("n,exp_beta2"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn copy_source_exponent_at_most_log2() {
        let s = TwoHopSource::from_arrays(vec![vec![0.5, 0.0], vec![0.0, 0.5]], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let b = QuantizeBuilder { aux: AuxCoupling::identity(&s), margins: (0.1, 0.1), seed: 0 };
        for r in exponent_scan(&b, &s, &[2, 4, 6]).unwrap() {
            assert!(r.exp_beta2 <= 2f64.ln() + 1e-12, "{r:?}");
        }
    }
}
