//! Achievable codes: quantize-and-test and time sharing.

mod quantize;
mod scan;
mod timeshare;

pub use quantize::{build_quantize_bin, QuantizeBin, CODEBOOK_LIMIT};
pub use scan::{exponent_scan, scan_csv, ScanRow};
pub use timeshare::{build_timeshare, timeshare_check, x_partition, TimeshareCheck, XPartition};

use crate::code_model::TwoHopCode;
use crate::error::{Error, Result};
use crate::prob::TwoHopSource;
use crate::single_letter::AuxCoupling;

/// A rule producing one code per blocklength.
pub trait SchemeBuilder: Send + Sync {
    fn name(&self) -> &'static str;
    fn build(&self, s: &TwoHopSource, n: usize) -> Result<TwoHopCode>;
}

#[derive(Debug, Clone)]
pub struct QuantizeBuilder {
    pub aux: AuxCoupling,
    pub margins: (f64, f64),
    pub seed: u64,
}

impl SchemeBuilder for QuantizeBuilder {
    fn name(&self) -> &'static str {
        "quantize"
    }
    fn build(&self, s: &TwoHopSource, n: usize) -> Result<TwoHopCode> {
        Ok(build_quantize_bin(s, &self.aux, n, self.margins, self.seed)?.code)
    }
}

/// Time sharing between two quantize-and-test codes. The relay-only part
/// keeps only the U kernel of `relay_aux` (V constant), the receiver-only
/// part only the V kernel of `receiver_aux` (U constant).
#[derive(Debug, Clone)]
pub struct TimeshareBuilder {
    pub relay_aux: AuxCoupling,
    pub receiver_aux: AuxCoupling,
    pub margins: (f64, f64),
    pub eps: (f64, f64),
    pub seed: u64,
}

impl TimeshareBuilder {
    pub fn components(&self, s: &TwoHopSource, n: usize) -> Result<(TwoHopCode, TwoHopCode, XPartition)> {
        let part = x_partition(s, n, self.eps.0, self.eps.1)?;
        let c = AuxCoupling::constant(s);
        let relay_aux = AuxCoupling::new(self.relay_aux.u_given_x.clone(), c.v_given_y.clone());
        let recv_aux = AuxCoupling::new(c.u_given_x, self.receiver_aux.v_given_y.clone());
        let relay = build_quantize_bin(s, &relay_aux, n, self.margins, self.seed)?.code;
        let recv = build_quantize_bin(s, &recv_aux, n, self.margins, crate::par::derive_seed(self.seed, 1))?.code;
        Ok((relay, recv, part))
    }

    pub fn build_checked(&self, s: &TwoHopSource, n: usize) -> Result<(TwoHopCode, TimeshareCheck)> {
        let (relay, recv, part) = self.components(s, n)?;
        let code = build_timeshare(&relay, &recv, &part, n)?;
        let chk = timeshare_check(s, &code, &relay, &recv, &part, self.eps.0, self.eps.1)?;
        Ok((code, chk))
    }
}

impl SchemeBuilder for TimeshareBuilder {
    fn name(&self) -> &'static str {
        "timeshare"
    }
    fn build(&self, s: &TwoHopSource, n: usize) -> Result<TwoHopCode> {
        let (relay, recv, part) = self.components(s, n)?;
        build_timeshare(&relay, &recv, &part, n)
    }
}

/// Settings shared by the named schemes.
#[derive(Debug, Clone)]
pub struct SchemeParams {
    pub aux: AuxCoupling,
    pub relay_aux: Option<AuxCoupling>,
    pub margins: (f64, f64),
    pub eps: (f64, f64),
    pub seed: u64,
}

pub const SCHEMES: &[&str] = &["quantize", "timeshare"];

pub fn scheme_by_name(name: &str, p: &SchemeParams) -> Result<Box<dyn SchemeBuilder>> {
    match name {
        "quantize" => Ok(Box::new(QuantizeBuilder { aux: p.aux.clone(), margins: p.margins, seed: p.seed })),
        "timeshare" => {
            if !(p.eps.0 + p.eps.1 > 1.0) {
                return Err(Error::Domain(format!("time sharing needs ε1 + ε2 > 1, got {}", p.eps.0 + p.eps.1)));
            }
            Ok(Box::new(TimeshareBuilder {
                relay_aux: p.relay_aux.clone().unwrap_or_else(|| p.aux.clone()),
                receiver_aux: p.aux.clone(),
                margins: p.margins,
                eps: p.eps,
                seed: p.seed,
            }))
        }
        other => Err(Error::UnknownStrategy(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_model::exact_errors;

    fn params(s: &TwoHopSource, aux: AuxCoupling) -> SchemeParams {
        let _ = s;
        SchemeParams { aux, relay_aux: None, margins: (0.2, 0.2), eps: (0.7, 0.7), seed: 5 }
    }

    #[test]
    fn registry_names() {
        let s = TwoHopSource::dsbs(0.1, 0.1);
        let p = params(&s, AuxCoupling::identity(&s));
        for n in SCHEMES {
            assert_eq!(scheme_by_name(n, &p).unwrap().name(), *n);
        }
        assert!(matches!(scheme_by_name("binning", &p), Err(Error::UnknownStrategy(_))));
        let mut q = p.clone();
        q.eps = (0.5, 0.5);
        assert!(matches!(scheme_by_name("timeshare", &q), Err(Error::Domain(_))));
    }

    #[test]
    fn constant_aux_is_trivial_for_quantize() {
        let s = TwoHopSource::dsbs(0.2, 0.1);
        let p = params(&s, AuxCoupling::constant(&s));
        let c = scheme_by_name("quantize", &p).unwrap().build(&s, 3).unwrap();
        assert_eq!((c.n1, c.n2), (1, 1));
    }

    #[test]
    fn timeshare_builder_is_deterministic() {
        let s = TwoHopSource::dsbs(0.1, 0.1);
        let p = params(&s, AuxCoupling::identity(&s));
        let b = scheme_by_name("timeshare", &p).unwrap();
        let c1 = b.build(&s, 4).unwrap();
        assert_eq!(c1, b.build(&s, 4).unwrap());
        let e = exact_errors(&c1, &s).unwrap();
        assert!(e.beta1 <= 1.0 && e.eta1 <= 1.0);
    }
}
