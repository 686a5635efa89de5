use super::pmf::JointPmf;
use super::tensor;
use crate::error::{Error, Result};

/// D(p‖q) in nats over identical axes.
pub fn kl_divergence(p: &JointPmf, q: &JointPmf) -> Result<f64> {
    if p.axes() != q.axes() {
        return Err(Error::Shape("kl_divergence needs identical axes".into()));
    }
    Ok(tensor::kl(p.mass(), q.mass()))
}

/// Binary divergence D_b(p‖q); +∞ when q ∈ {0,1} and p disagrees.
pub fn binary_divergence(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("binary divergence arguments ({p}, {q}) outside [0,1]")));
    }
    Ok(tensor::kl(&[p, 1.0 - p], &[q, 1.0 - q]))
}

/// Entropy of the marginal on `axes`.
pub fn entropy(j: &JointPmf, axes: &[&str]) -> Result<f64> {
    Ok(tensor::entropy(j.marginal(axes)?.mass()))
}

fn disjoint(j: &JointPmf, groups: &[&[&str]]) -> Result<Vec<Vec<usize>>> {
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for g in groups {
        let idx = j.indices(g)?;
        for &i in &idx {
            if seen.contains(&i) {
                return Err(Error::Contract(format!("axis `{}` appears in two groups", j.axes()[i].name)));
            }
            seen.push(i);
        }
        out.push(idx);
    }
    Ok(out)
}

/// I(A;B) between two disjoint axis groups.
pub fn mutual_information(j: &JointPmf, a: &[&str], b: &[&str]) -> Result<f64> {
    let g = disjoint(j, &[a, b])?;
    let (m, na, nb, _) = tensor::group3(j.mass(), &j.shape(), &g[0], &g[1], &[]);
    Ok(tensor::mi_2d(&m, na, nb))
}

/// I(A;B|C) between disjoint axis groups.
pub fn conditional_mutual_information(j: &JointPmf, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
    let g = disjoint(j, &[a, b, c])?;
    let (m, na, nb, nc) = tensor::group3(j.mass(), &j.shape(), &g[0], &g[1], &g[2]);
    Ok(tensor::cmi_3d(&m, na, nb, nc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{Axis, FinitePmf, Kernel};
    use proptest::prelude::*;

    fn hb(p: f64) -> f64 {
        -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
    }

    #[test]
    fn divergence_examples() {
        let p = JointPmf::from_pmf("A", &FinitePmf::from_mass(vec![0.3, 0.7]).unwrap());
        let q = JointPmf::from_pmf("A", &FinitePmf::from_mass(vec![0.7, 0.3]).unwrap());
        // reference value from scipy.stats.entropy
        assert!((kl_divergence(&p, &q).unwrap() - 0.338_919_144_154_881).abs() < 1e-12);
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let e = JointPmf::from_pmf("A", &FinitePmf::from_mass(vec![1.0, 0.0]).unwrap());
        let u = JointPmf::from_pmf("A", &FinitePmf::uniform(2));
        assert!((kl_divergence(&e, &u).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(kl_divergence(&u, &e).unwrap(), f64::INFINITY);
        let other = JointPmf::from_pmf("B", &FinitePmf::uniform(2));
        assert!(matches!(kl_divergence(&u, &other), Err(Error::Shape(_))));
    }

    #[test]
    fn binary_divergence_examples() {
        assert_eq!(binary_divergence(0.5, 0.5).unwrap(), 0.0);
        assert!((binary_divergence(1.0, 0.25).unwrap() - 4f64.ln()).abs() < 1e-15);
        assert!((binary_divergence(0.2, 0.6).unwrap() - 0.334_795_286_714_334).abs() < 1e-12);
        assert_eq!(binary_divergence(0.5, 0.0).unwrap(), f64::INFINITY);
        assert!(binary_divergence(1.5, 0.5).is_err());
    }

    #[test]
    fn mi_examples() {
        let p = 0.11;
        let j = JointPmf::new(
            vec![Axis::sized("X", 2), Axis::sized("Y", 2)],
            vec![(1.0 - p) / 2.0, p / 2.0, p / 2.0, (1.0 - p) / 2.0],
        )
        .unwrap();
        let i = mutual_information(&j, &["X"], &["Y"]).unwrap();
        assert!((i - (2f64.ln() - hb(p))).abs() < 1e-14);
        assert!((i - 0.346).abs() < 1e-3);
        assert_eq!(mutual_information(&j, &["Y"], &["X"]).unwrap(), i);
        assert!(matches!(mutual_information(&j, &["X"], &["X"]), Err(Error::Contract(_))));
        let copy = JointPmf::new(vec![Axis::sized("X", 2), Axis::sized("Y", 2)], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((mutual_information(&copy, &["X"], &["Y"]).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn markov_source_has_zero_cmi() {
        let pxy = JointPmf::new(vec![Axis::sized("X", 2), Axis::sized("Y", 3)], vec![0.1, 0.2, 0.15, 0.25, 0.05, 0.25]).unwrap();
        let k = Kernel::from_rows(vec![vec![0.6, 0.4], vec![0.1, 0.9], vec![0.5, 0.5]]).unwrap();
        let j = pxy.attach("Y", &k, "Z").unwrap();
        assert!(conditional_mutual_information(&j, &["X"], &["Z"], &["Y"]).unwrap() < 1e-15);
        let iid = JointPmf::from_pmf("A", &FinitePmf::uniform(2)).power(3).unwrap();
        assert!(conditional_mutual_information(&iid, &["A1"], &["A2"], &["A3"]).unwrap() < 1e-15);
    }

    fn joint3() -> impl Strategy<Value = JointPmf> {
        proptest::collection::vec(0.0f64..1.0, 12).prop_filter_map("nonzero", |v| {
            let s: f64 = v.iter().sum();
            if s < 1e-3 {
                return None;
            }
            let m = v.iter().map(|x| x / s).collect();
            JointPmf::new(vec![Axis::sized("A", 2), Axis::sized("B", 3), Axis::sized("C", 2)], m).ok()
        })
    }

    proptest! {
        #[test]
        fn mi_is_kl_to_product(j in joint3()) {
            let ab = j.marginal(&["A", "B"]).unwrap();
            let prod = ab.marginal(&["A"]).unwrap().product(&ab.marginal(&["B"]).unwrap()).unwrap();
            let i = mutual_information(&j, &["A"], &["B"]).unwrap();
            prop_assert!((i - kl_divergence(&ab, &prod).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn chain_rule(j in joint3()) {
            let lhs = mutual_information(&j, &["A"], &["B", "C"]).unwrap();
            let rhs = mutual_information(&j, &["A"], &["C"]).unwrap()
                + conditional_mutual_information(&j, &["A"], &["B"], &["C"]).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }

        #[test]
        fn data_processing(j in joint3(), w in proptest::collection::vec(0.01f64..1.0, 6)) {
            // A - B - D with D drawn through a kernel from B
            let rows: Vec<Vec<f64>> = w.chunks(2).map(|r| { let s = r[0] + r[1]; vec![r[0] / s, r[1] / s] }).collect();
            let k = Kernel::from_rows(rows).unwrap();
            let ab = j.marginal(&["A", "B"]).unwrap();
            let abd = ab.attach("B", &k, "D").unwrap();
            let iad = mutual_information(&abd, &["A"], &["D"]).unwrap();
            let iab = mutual_information(&abd, &["A"], &["B"]).unwrap();
            prop_assert!(iad <= iab + 1e-10);
        }

        #[test]
        fn kl_tensorizes(a in 0.01f64..0.99, b in 0.01f64..0.99, n in 1usize..5) {
            let p = JointPmf::from_pmf("A", &FinitePmf::from_mass(vec![a, 1.0 - a]).unwrap());
            let q = JointPmf::from_pmf("A", &FinitePmf::from_mass(vec![b, 1.0 - b]).unwrap());
            let d1 = kl_divergence(&p, &q).unwrap();
            let dn = kl_divergence(&p.power(n).unwrap(), &q.power(n).unwrap()).unwrap();
            prop_assert!((dn - n as f64 * d1).abs() < 1e-9);
        }
    }
}
