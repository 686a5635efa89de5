use super::info;
use super::pmf::{check_mass, default_labels, Axis, JointPmf, Kernel};
use super::tensor;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The H0 law P_XY·P_{Z|Y}; H1 is P_X·P_Y·P_Z.
#[derive(Debug, Clone)]
pub struct TwoHopSource {
    p_xy: JointPmf,
    p_z_given_y: Kernel,
    px: Vec<f64>,
    py: Vec<f64>,
    pz: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Label {
    Text(String),
    Number(serde_json::Number),
}

impl Label {
    fn into_string(self) -> String {
        match self {
            Label::Text(s) => s,
            Label::Number(n) => n.to_string(),
        }
    }
}

/// On-disk source format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceSpec {
    #[serde(rename = "X")]
    x: Vec<Label>,
    #[serde(rename = "Y")]
    y: Vec<Label>,
    #[serde(rename = "Z")]
    z: Vec<Label>,
    #[serde(rename = "P_XY")]
    p_xy: Vec<Vec<f64>>,
    #[serde(rename = "P_Z_given_Y")]
    p_z_given_y: Vec<Vec<f64>>,
}

impl TwoHopSource {
    pub fn new(p_xy: JointPmf, p_z_given_y: Kernel) -> Result<Self> {
        if p_xy.axes().len() != 2 {
            return Err(Error::Shape("P_XY must have exactly two axes".into()));
        }
        if p_xy.axes()[1].labels != p_z_given_y.from_alphabet() {
            return Err(Error::Shape("P_Z|Y input alphabet must equal the Y alphabet".into()));
        }
        let (nx, ny) = (p_xy.axes()[0].len(), p_xy.axes()[1].len());
        let (px, _) = tensor::marginal(p_xy.mass(), &[nx, ny], &[0]);
        let (py, _) = tensor::marginal(p_xy.mass(), &[nx, ny], &[1]);
        let pz = p_z_given_y.push(&py);
        Ok(Self { p_xy, p_z_given_y, px, py, pz })
    }

    pub fn from_arrays(p_xy: Vec<Vec<f64>>, p_z_given_y: Vec<Vec<f64>>) -> Result<Self> {
        let nx = p_xy.len();
        let ny = p_xy.first().map_or(0, Vec::len);
        let nz = p_z_given_y.first().map_or(0, Vec::len);
        Self::labeled(default_labels(nx), default_labels(ny), default_labels(nz), p_xy, p_z_given_y)
    }

    fn labeled(
        x: Vec<String>,
        y: Vec<String>,
        z: Vec<String>,
        p_xy: Vec<Vec<f64>>,
        p_z_given_y: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if p_xy.len() != x.len() || p_xy.iter().any(|r| r.len() != y.len()) {
            return Err(Error::Shape(format!("P_XY must be {}x{}", x.len(), y.len())));
        }
        let flat: Vec<f64> = p_xy.into_iter().flatten().collect();
        check_mass(&flat, "P_XY")?;
        let joint = JointPmf::new(vec![Axis::new("X", x), Axis::new("Y", y.clone())], flat)?;
        let kernel = Kernel::new(y, z, p_z_given_y)?;
        Self::new(joint, kernel)
    }

    /// Doubly symmetric binary source: X uniform, Y = X ⊕ Bern(p), Z = Y ⊕ Bern(q).
    pub fn dsbs(p: f64, q: f64) -> Self {
        Self::from_arrays(
            vec![vec![(1.0 - p) / 2.0, p / 2.0], vec![p / 2.0, (1.0 - p) / 2.0]],
            vec![vec![1.0 - q, q], vec![q, 1.0 - q]],
        )
        .expect("valid dsbs parameters")
    }

    /// Fully independent source P_X·P_Y·P_Z.
    pub fn independent(px: &[f64], py: &[f64], pz: &[f64]) -> Result<Self> {
        let pxy = px.iter().map(|a| py.iter().map(|b| a * b).collect()).collect();
        let pzy = vec![pz.to_vec(); py.len()];
        Self::from_arrays(pxy, pzy)
    }

    pub fn from_spec(spec: SourceSpec) -> Result<Self> {
        let lab = |v: Vec<Label>| v.into_iter().map(Label::into_string).collect::<Vec<_>>();
        Self::labeled(lab(spec.x), lab(spec.y), lab(spec.z), spec.p_xy, spec.p_z_given_y)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_spec(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_spec(&self) -> SourceSpec {
        let lab = |v: &[String]| v.iter().cloned().map(Label::Text).collect();
        SourceSpec {
            x: lab(&self.p_xy.axes()[0].labels),
            y: lab(&self.p_xy.axes()[1].labels),
            z: lab(self.p_z_given_y.to_alphabet()),
            p_xy: self.p_xy.mass().chunks(self.ny()).map(<[f64]>::to_vec).collect(),
            p_z_given_y: self.p_z_given_y.rows(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("serializable")
    }

    pub fn nx(&self) -> usize {
        self.px.len()
    }

    pub fn ny(&self) -> usize {
        self.py.len()
    }

    pub fn nz(&self) -> usize {
        self.pz.len()
    }

    pub fn p_xy(&self) -> &JointPmf {
        &self.p_xy
    }

    /// Flat row-major P_XY.
    pub fn pxy(&self) -> &[f64] {
        self.p_xy.mass()
    }

    pub fn p_z_given_y(&self) -> &Kernel {
        &self.p_z_given_y
    }

    pub fn px(&self) -> &[f64] {
        &self.px
    }

    pub fn py(&self) -> &[f64] {
        &self.py
    }

    pub fn pz(&self) -> &[f64] {
        &self.pz
    }

    /// P_XYZ as a joint over axes X, Y, Z.
    pub fn p_xyz(&self) -> JointPmf {
        self.p_xy.attach("Y", &self.p_z_given_y, "Z").expect("consistent source")
    }

    /// Joint law of (Y, Z).
    pub fn pyz(&self) -> Vec<f64> {
        let nz = self.nz();
        let mut out = vec![0.0; self.ny() * nz];
        for y in 0..self.ny() {
            for (z, w) in self.p_z_given_y.row(y).iter().enumerate() {
                out[y * nz + z] = self.py[y] * w;
            }
        }
        out
    }

    pub fn i_xy(&self) -> f64 {
        tensor::mi_2d(self.pxy(), self.nx(), self.ny())
    }

    pub fn i_yz(&self) -> f64 {
        tensor::mi_2d(&self.pyz(), self.ny(), self.nz())
    }

    pub fn i_xz_given_y(&self) -> f64 {
        info::conditional_mutual_information(&self.p_xyz(), &["X"], &["Z"], &["Y"]).expect("axes exist")
    }

    /// max P_{Z|Y}(z|y)/P_Z(z) over y with P_Y(y) > 0 and z with P_Z(z) > 0.
    pub fn alpha(&self) -> f64 {
        let mut a: f64 = 1.0;
        for y in 0..self.ny() {
            if self.py[y] <= 0.0 {
                continue;
            }
            for (z, &w) in self.p_z_given_y.row(y).iter().enumerate() {
                if self.pz[z] > 0.0 {
                    a = a.max(w / self.pz[z]);
                }
            }
        }
        a
    }

    pub fn mu(&self) -> f64 {
        1.0 / self.py.iter().copied().filter(|&p| p > 0.0).fold(f64::INFINITY, f64::min)
    }
}

/// Constants of the converse chain for a given blocklength and type-I budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceConstants {
    pub alpha: f64,
    pub mu: f64,
    pub theta_n: f64,
    pub psi: f64,
    /// Set when α = 1; Ψ is then 0 and the receiver chain uses t = 1/√n.
    pub alpha_is_one: bool,
}

fn check_eps(eps1: f64, eps2: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eps1) || !(0.0..1.0).contains(&eps2) {
        return Err(Error::Domain(format!("type-I budgets ({eps1}, {eps2}) must lie in [0,1)")));
    }
    if eps1 + eps2 >= 1.0 {
        return Err(Error::Domain(format!("eps1 + eps2 = {} must be below 1", eps1 + eps2)));
    }
    Ok(())
}

/// τ = (1−ε₁−ε₂)/(1+3ε₂−ε₁), the B_n threshold.
pub fn tau(eps1: f64, eps2: f64) -> f64 {
    (1.0 - eps1 - eps2) / (1.0 + 3.0 * eps2 - eps1)
}

pub fn source_constants(s: &TwoHopSource, n: usize, eps1: f64, eps2: f64) -> Result<SourceConstants> {
    if n == 0 {
        return Err(Error::Domain("blocklength must be at least 1".into()));
    }
    check_eps(eps1, eps2)?;
    let alpha = s.alpha();
    let mu = s.mu();
    let nf = n as f64;
    let theta_n = (3.0 * mu / nf * (8.0 * s.ny() as f64 / (1.0 - eps1 - eps2)).ln()).sqrt();
    let alpha_is_one = alpha <= 1.0 + 1e-12;
    let psi = if alpha_is_one { 0.0 } else { 2.0 * (nf * (alpha - 1.0) * (1.0 / tau(eps1, eps2)).ln()).sqrt() };
    Ok(SourceConstants { alpha, mu, theta_n, psi, alpha_is_one })
}
