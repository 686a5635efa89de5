use super::tensor;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerance used when validating that masses sum to one.
pub const SUM_TOL: f64 = 1e-9;

pub(crate) fn check_mass(mass: &[f64], what: &str) -> Result<()> {
    if mass.is_empty() {
        return Err(Error::InvalidPmf(format!("{what}: empty")));
    }
    if let Some(v) = mass.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidPmf(format!("{what}: entry {v} is negative or not finite")));
    }
    let s: f64 = mass.iter().sum();
    if (s - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidPmf(format!("{what}: sums to {s}")));
    }
    Ok(())
}

fn normalized(mut mass: Vec<f64>) -> Vec<f64> {
    let s: f64 = mass.iter().sum();
    if s != 1.0 {
        mass.iter_mut().for_each(|v| *v /= s);
    }
    mass
}

pub fn default_labels(k: usize) -> Vec<String> {
    (0..k).map(|i| i.to_string()).collect()
}

fn check_labels(labels: &[String]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::InvalidPmf(format!("duplicate label `{l}`")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinitePmf {
    alphabet: Vec<String>,
    mass: Vec<f64>,
}

impl FinitePmf {
    pub fn new(alphabet: Vec<String>, mass: Vec<f64>) -> Result<Self> {
        if alphabet.len() != mass.len() {
            return Err(Error::Shape(format!(
                "{} labels for {} masses",
                alphabet.len(),
                mass.len()
            )));
        }
        check_labels(&alphabet)?;
        check_mass(&mass, "pmf")?;
        Ok(Self { alphabet, mass: normalized(mass) })
    }

    pub fn from_mass(mass: Vec<f64>) -> Result<Self> {
        Self::new(default_labels(mass.len()), mass)
    }

    pub fn uniform(k: usize) -> Self {
        Self { alphabet: default_labels(k), mass: vec![1.0 / k as f64; k] }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        tensor::entropy(&self.mass)
    }
}

/// One named axis of a joint pmf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub labels: Vec<String>,
}

impl Axis {
    pub fn new(name: impl Into<String>, labels: Vec<String>) -> Self {
        Self { name: name.into(), labels }
    }

    pub fn sized(name: impl Into<String>, k: usize) -> Self {
        Self::new(name, default_labels(k))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Joint pmf over named axes, stored row-major (first axis most significant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPmf {
    axes: Vec<Axis>,
    mass: Vec<f64>,
}

impl JointPmf {
    pub fn new(axes: Vec<Axis>, mass: Vec<f64>) -> Result<Self> {
        let cells: usize = axes.iter().map(Axis::len).product();
        if cells != mass.len() {
            return Err(Error::Shape(format!("axes give {cells} cells, mass has {}", mass.len())));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::Shape(format!("duplicate axis `{}`", a.name)));
            }
            check_labels(&a.labels)?;
        }
        check_mass(&mass, "joint pmf")?;
        Ok(Self { axes, mass: normalized(mass) })
    }

    pub fn from_pmf(name: impl Into<String>, p: &FinitePmf) -> Self {
        Self { axes: vec![Axis::new(name, p.alphabet.clone())], mass: p.mass.clone() }
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::Shape(format!("no axis `{name}`")))
    }

    pub(crate) fn indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.axis_index(n)).collect()
    }

    /// Marginal onto the named axes, in the order given.
    pub fn marginal(&self, names: &[&str]) -> Result<JointPmf> {
        let keep = self.indices(names)?;
        let (mass, _) = tensor::marginal(&self.mass, &self.shape(), &keep);
        let axes = keep.iter().map(|&i| self.axes[i].clone()).collect();
        Ok(JointPmf { axes, mass })
    }

    pub fn to_pmf(&self) -> Result<FinitePmf> {
        if self.axes.len() != 1 {
            return Err(Error::Shape(format!("{} axes, expected 1", self.axes.len())));
        }
        Ok(FinitePmf { alphabet: self.axes[0].labels.clone(), mass: self.mass.clone() })
    }

    /// Conditional law of the remaining axes given `axis = label index`.
    pub fn conditional(&self, axis: &str, value: usize) -> Result<JointPmf> {
        let a = self.axis_index(axis)?;
        let shape = self.shape();
        if value >= shape[a] {
            return Err(Error::Shape(format!("value {value} out of range for `{axis}`")));
        }
        let st = tensor::strides(&shape);
        let mut mass = Vec::with_capacity(self.mass.len() / shape[a]);
        for (flat, &p) in self.mass.iter().enumerate() {
            if (flat / st[a]) % shape[a] == value {
                mass.push(p);
            }
        }
        let s: f64 = mass.iter().sum();
        if s <= 0.0 {
            return Err(Error::Domain(format!("conditioning on a zero-mass value of `{axis}`")));
        }
        mass.iter_mut().for_each(|v| *v /= s);
        let axes = self.axes.iter().enumerate().filter(|(i, _)| *i != a).map(|(_, x)| x.clone()).collect();
        Ok(JointPmf { axes, mass })
    }

    /// Independent product; axis names must be disjoint.
    pub fn product(&self, other: &JointPmf) -> Result<JointPmf> {
        for a in &other.axes {
            if self.axes.iter().any(|b| b.name == a.name) {
                return Err(Error::Shape(format!("axis `{}` on both sides of a product", a.name)));
            }
        }
        let mut mass = Vec::with_capacity(self.mass.len() * other.mass.len());
        for &p in &self.mass {
            for &q in &other.mass {
                mass.push(p * q);
            }
        }
        let axes = self.axes.iter().chain(&other.axes).cloned().collect();
        Ok(JointPmf { axes, mass })
    }

    /// n-fold i.i.d. product; axis `A` becomes `A1`, ..., `An`.
    pub fn power(&self, n: usize) -> Result<JointPmf> {
        if n == 0 {
            return Err(Error::Domain("n-fold product needs n >= 1".into()));
        }
        let rename = |k: usize| JointPmf {
            axes: self.axes.iter().map(|a| Axis::new(format!("{}{k}", a.name), a.labels.clone())).collect(),
            mass: self.mass.clone(),
        };
        let mut out = rename(1);
        for k in 2..=n {
            out = out.product(&rename(k))?;
        }
        Ok(out)
    }

    /// Attach a new axis through a kernel from an existing axis.
    pub fn attach(&self, from: &str, kernel: &Kernel, new_axis: &str) -> Result<JointPmf> {
        let a = self.axis_index(from)?;
        if self.axes[a].labels != kernel.from {
            return Err(Error::Shape(format!("kernel input alphabet does not match axis `{from}`")));
        }
        if self.axes.iter().any(|x| x.name == new_axis) {
            return Err(Error::Shape(format!("axis `{new_axis}` already present")));
        }
        let shape = self.shape();
        let st = tensor::strides(&shape);
        let k = kernel.to.len();
        let mut mass = Vec::with_capacity(self.mass.len() * k);
        for (flat, &p) in self.mass.iter().enumerate() {
            let s = (flat / st[a]) % shape[a];
            mass.extend(kernel.row(s).iter().map(|w| p * w));
        }
        let mut axes = self.axes.clone();
        axes.push(Axis::new(new_axis, kernel.to.clone()));
        Ok(JointPmf { axes, mass })
    }
}

/// Conditional law from one alphabet to another, one row per input symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    from: Vec<String>,
    to: Vec<String>,
    rows: Vec<f64>,
}

impl Kernel {
    pub fn new(from: Vec<String>, to: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != from.len() {
            return Err(Error::Shape(format!("{} rows for {} inputs", rows.len(), from.len())));
        }
        check_labels(&from)?;
        check_labels(&to)?;
        let mut flat = Vec::with_capacity(from.len() * to.len());
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != to.len() {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {}", r.len(), to.len())));
            }
            check_mass(&r, &format!("kernel row {i}"))?;
            flat.extend(normalized(r));
        }
        Ok(Self { from, to, rows: flat })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        Self::new(default_labels(rows.len()), default_labels(k), rows)
    }

    /// Kernel whose every row is `p`.
    pub fn constant(inputs: usize, p: &[f64]) -> Self {
        let mut rows = Vec::with_capacity(inputs * p.len());
        for _ in 0..inputs {
            rows.extend_from_slice(p);
        }
        Self { from: default_labels(inputs), to: default_labels(p.len()), rows }
    }

    pub fn identity(k: usize) -> Self {
        let mut rows = vec![0.0; k * k];
        for i in 0..k {
            rows[i * k + i] = 1.0;
        }
        Self { from: default_labels(k), to: default_labels(k), rows }
    }

    /// Build from a flat row-major buffer without revalidation of sums.
    pub(crate) fn from_flat_unchecked(inputs: usize, outputs: usize, rows: Vec<f64>) -> Self {
        debug_assert_eq!(rows.len(), inputs * outputs);
        Self { from: default_labels(inputs), to: default_labels(outputs), rows }
    }

    pub fn inputs(&self) -> usize {
        self.from.len()
    }

    pub fn outputs(&self) -> usize {
        self.to.len()
    }

    pub fn from_alphabet(&self) -> &[String] {
        &self.from
    }

    pub fn to_alphabet(&self) -> &[String] {
        &self.to
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.to.len();
        &self.rows[i * k..(i + 1) * k]
    }

    pub fn flat(&self) -> &[f64] {
        &self.rows
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.inputs()).map(|i| self.row(i).to_vec()).collect()
    }

    /// Output law when the input has law `p`.
    pub fn push(&self, p: &[f64]) -> Vec<f64> {
        let k = self.to.len();
        let mut out = vec![0.0; k];
        for (i, &pi) in p.iter().enumerate() {
            if pi > 0.0 {
                for (o, w) in out.iter_mut().zip(self.row(i)) {
                    *o += pi * w;
                }
            }
        }
        out
    }

    /// Kernel composition self then `next`.
    pub fn then(&self, next: &Kernel) -> Result<Kernel> {
        if self.to.len() != next.from.len() {
            return Err(Error::Shape("kernel composition with mismatched alphabets".into()));
        }
        let mut rows = Vec::with_capacity(self.inputs() * next.outputs());
        for i in 0..self.inputs() {
            rows.extend(next.push(self.row(i)));
        }
        Ok(Kernel { from: self.from.clone(), to: next.to.clone(), rows })
    }

    /// Same kernel with output labels permuted: new output `j` is old output `perm[j]`.
    pub fn relabel_outputs(&self, perm: &[usize]) -> Kernel {
        let k = self.outputs();
        let mut rows = vec![0.0; self.rows.len()];
        for i in 0..self.inputs() {
            for j in 0..k {
                rows[i * k + j] = self.rows[i * k + perm[j]];
            }
        }
        Kernel { from: self.from.clone(), to: self.to.clone(), rows }
    }
}
