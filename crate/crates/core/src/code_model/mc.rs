use super::code::{TwoHopCode, H0};
use super::profile::{wilson, ErrorProfile, Mode, Z95};
use crate::error::{Error, Result};
use crate::par;
use crate::prob::TwoHopSource;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

/// Work is split into this many fixed streams regardless of thread count.
const STREAMS: u64 = 64;

struct Samplers {
    xy: WeightedIndex<f64>,
    z_given_y: Vec<WeightedIndex<f64>>,
    x: WeightedIndex<f64>,
    y: WeightedIndex<f64>,
    z: WeightedIndex<f64>,
}

impl Samplers {
    fn new(s: &TwoHopSource) -> Result<Self> {
        let wi = |w: &[f64]| WeightedIndex::new(w.iter().copied()).map_err(|e| Error::InvalidPmf(e.to_string()));
        let z_given_y = (0..s.ny())
            .map(|y| {
                let r = s.p_z_given_y().row(y);
                // rows of zero-probability y are never used; keep them well-formed
                if r.iter().sum::<f64>() > 0.0 { wi(r) } else { wi(&vec![1.0; r.len()]) }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Samplers { xy: wi(s.pxy())?, z_given_y, x: wi(s.px())?, y: wi(s.py())?, z: wi(s.pz())? })
    }
}

#[derive(Default, Clone, Copy)]
struct Counts {
    reject1_h0: u64,
    accept1_h1: u64,
    reject2_h0: u64,
    accept2_h1: u64,
}

fn decide(code: &TwoHopCode, x: usize, y: usize, z: usize) -> (bool, bool) {
    let m1 = code.f1[x];
    let m2 = code.f2[m1][y];
    (code.g1[m1][y] == H0, code.g2[m2][z] == H0)
}

fn run_stream<R: Rng>(code: &TwoHopCode, s: &TwoHopSource, sm: &Samplers, rng: &mut R, count: u64) -> Counts {
    let (nx, ny, nz) = (s.nx(), s.ny(), s.nz());
    let mut c = Counts::default();
    for _ in 0..count {
        let (mut x, mut y, mut z) = (0, 0, 0);
        for _ in 0..code.n {
            let j = sm.xy.sample(rng);
            let (xi, yi) = (j / ny, j % ny);
            let zi = sm.z_given_y[yi].sample(rng);
            x = x * nx + xi;
            y = y * ny + yi;
            z = z * nz + zi;
        }
        let (a1, a2) = decide(code, x, y, z);
        c.reject1_h0 += u64::from(!a1);
        c.reject2_h0 += u64::from(!a2);
        let (mut x, mut y, mut z) = (0, 0, 0);
        for _ in 0..code.n {
            x = x * nx + sm.x.sample(rng);
            y = y * ny + sm.y.sample(rng);
            z = z * nz + sm.z.sample(rng);
        }
        let (a1, a2) = decide(code, x, y, z);
        c.accept1_h1 += u64::from(a1);
        c.accept2_h1 += u64::from(a2);
    }
    c
}

/// Frequency estimates of the four error probabilities from `n_samples`
/// draws under each hypothesis, with Wilson 95% intervals.
pub fn mc_errors(code: &TwoHopCode, s: &TwoHopSource, n_samples: u64, seed: u64) -> Result<ErrorProfile> {
    if n_samples == 0 {
        return Err(Error::Domain("n_samples must be at least 1".into()));
    }
    code.validate(s)?;
    let sm = Samplers::new(s)?;
    let parts = par::ordered_map(STREAMS as usize, |i| {
        let i = i as u64;
        let lo = n_samples * i / STREAMS;
        let hi = n_samples * (i + 1) / STREAMS;
        let mut rng = par::stream_rng(seed, i);
        run_stream(code, s, &sm, &mut rng, hi - lo)
    });
    let mut c = Counts::default();
    for p in parts {
        c.reject1_h0 += p.reject1_h0;
        c.accept1_h1 += p.accept1_h1;
        c.reject2_h0 += p.reject2_h0;
        c.accept2_h1 += p.accept2_h1;
    }
    let ks = [c.reject1_h0, c.accept1_h1, c.reject2_h0, c.accept2_h1];
    let est = ks.map(|k| k as f64 / n_samples as f64);
    let iv = ks.map(|k| {
        let (lo, hi) = wilson(k, n_samples, Z95);
        [lo, hi]
    });
    Ok(ErrorProfile {
        beta1: est[0],
        beta2: est[1],
        eta1: est[2],
        eta2: est[3],
        mode: Mode::MonteCarlo,
        ci: Some(iv.map(|[lo, hi]| 0.5 * (hi - lo))),
        intervals: Some(iv),
        samples: Some(n_samples),
        seed: Some(seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_model::{exact_errors, H1};

    #[test]
    fn trivial_decoders_are_exact() {
        let s = TwoHopSource::dsbs(0.1, 0.1);
        let e = mc_errors(&TwoHopCode::accept_all(&s, 3).unwrap(), &s, 1000, 0).unwrap();
        assert_eq!(e.beta1, 0.0);
        let e = mc_errors(&TwoHopCode::constant(&s, 3, H0, H1).unwrap(), &s, 1000, 0).unwrap();
        assert_eq!(e.eta2, 0.0);
    }

    #[test]
    fn deterministic_and_close_to_exact() {
        let s = TwoHopSource::dsbs(0.1, 0.1);
        let mut c = TwoHopCode::accept_all(&s, 2).unwrap();
        c.n1 = 2;
        c.f1 = vec![0, 0, 1, 1];
        c.f2 = vec![vec![0; 4]; 2];
        c.g1 = vec![vec![H0, H0, H1, H1], vec![H1, H1, H0, H0]];
        let a = mc_errors(&c, &s, 20000, 7).unwrap();
        assert_eq!(a, mc_errors(&c, &s, 20000, 7).unwrap());
        let ex = exact_errors(&c, &s).unwrap();
        let ci = a.ci.unwrap();
        for i in 0..4 {
            assert!((a.values()[i] - ex.values()[i]).abs() <= 2.0 * ci[i] + 1e-12, "{i}: {:?} {:?}", a, ex);
        }
    }
}
