//! Random pmfs, kernels and sources for tests and experiments.

use crate::prob::{Kernel, TwoHopSource};
use rand::Rng;
use rand_distr::Exp1;

/// Dirichlet(1,...,1) draw.
pub fn dirichlet<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Dirichlet draw with every entry at least `floor` (then renormalized).
pub fn dirichlet_floor<R: Rng + ?Sized>(rng: &mut R, k: usize, floor: f64) -> Vec<f64> {
    let mut v = dirichlet(rng, k);
    v.iter_mut().for_each(|x| *x = x.max(floor));
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

pub fn kernel_rows<R: Rng + ?Sized>(rng: &mut R, inputs: usize, outputs: usize) -> Vec<Vec<f64>> {
    (0..inputs).map(|_| dirichlet(rng, outputs)).collect()
}

pub fn kernel<R: Rng + ?Sized>(rng: &mut R, inputs: usize, outputs: usize) -> Kernel {
    Kernel::from_rows(kernel_rows(rng, inputs, outputs)).expect("dirichlet rows are pmfs")
}

/// Source with full-support random P_XY and P_{Z|Y}.
pub fn source<R: Rng + ?Sized>(rng: &mut R, nx: usize, ny: usize, nz: usize) -> TwoHopSource {
    let flat = dirichlet_floor(rng, nx * ny, 1e-3);
    let pxy = flat.chunks(ny).map(<[f64]>::to_vec).collect();
    let pzy = (0..ny).map(|_| dirichlet_floor(rng, nz, 1e-3)).collect();
    TwoHopSource::from_arrays(pxy, pzy).expect("valid random source")
}

/// Fully independent source P_X·P_Y·P_Z with random marginals.
pub fn independent_source<R: Rng + ?Sized>(rng: &mut R, nx: usize, ny: usize, nz: usize) -> TwoHopSource {
    let px = dirichlet_floor(rng, nx, 1e-3);
    let py = dirichlet_floor(rng, ny, 1e-3);
    let pz = dirichlet_floor(rng, nz, 1e-3);
    TwoHopSource::independent(&px, &py, &pz).expect("valid independent source")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn draws_are_pmfs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 1..6 {
            let v = dirichlet(&mut rng, k);
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(v.iter().all(|&x| x >= 0.0));
        }
        let s = independent_source(&mut rng, 2, 3, 2);
        assert!(s.i_xy() < 1e-12 && s.i_yz() < 1e-12);
        let s = source(&mut rng, 3, 2, 3);
        assert!(s.i_xz_given_y() < 1e-12);
    }
}
