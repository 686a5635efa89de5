use super::bottleneck::SubProblem;
use super::weights::TradeoffWeights;
use crate::error::{Error, Result};
use crate::prob::{JointPmf, Kernel, TwoHopSource};
use serde::{Deserialize, Serialize};

/// Cardinality bounds for U and V.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardBounds {
    pub u: usize,
    pub v: usize,
}

impl CardBounds {
    /// |U| ≤ |X|+1, |V| ≤ |Y|+1.
    pub fn for_source(s: &TwoHopSource) -> Self {
        Self { u: s.nx() + 1, v: s.ny() + 1 }
    }
}

/// Test channels P_{U|X} and P_{V|Y}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxCoupling {
    pub u_given_x: Kernel,
    pub v_given_y: Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxInformations {
    pub i_ux: f64,
    pub i_uy: f64,
    pub i_vy: f64,
    pub i_vz: f64,
}

/// P_{Y|X} as a flat `|X| × |Y|` channel; rows of zero-mass inputs are uniform.
pub(crate) fn y_given_x(s: &TwoHopSource) -> Vec<f64> {
    let (nx, ny) = (s.nx(), s.ny());
    let mut w = vec![0.0; nx * ny];
    for x in 0..nx {
        for y in 0..ny {
            w[x * ny + y] = if s.px()[x] > 0.0 { s.pxy()[x * ny + y] / s.px()[x] } else { 1.0 / ny as f64 };
        }
    }
    w
}

/// Sub-problem in U: min w_s·I(U;X) − w_t·I(U;Y).
pub(crate) fn u_problem(s: &TwoHopSource, w_s: f64, w_t: f64, card: usize) -> SubProblem {
    SubProblem { ps: s.px().to_vec(), channel: y_given_x(s), nt: s.ny(), w_s, w_t, card }
}

/// Sub-problem in V: min w_s·I(V;Y) − w_t·I(V;Z).
pub(crate) fn v_problem(s: &TwoHopSource, w_s: f64, w_t: f64, card: usize) -> SubProblem {
    SubProblem { ps: s.py().to_vec(), channel: s.p_z_given_y().flat().to_vec(), nt: s.nz(), w_s, w_t, card }
}

impl AuxCoupling {
    pub fn new(u_given_x: Kernel, v_given_y: Kernel) -> Self {
        Self { u_given_x, v_given_y }
    }

    pub fn constant(s: &TwoHopSource) -> Self {
        Self::new(Kernel::constant(s.nx(), &[1.0]), Kernel::constant(s.ny(), &[1.0]))
    }

    /// U = X, V = Y.
    pub fn identity(s: &TwoHopSource) -> Self {
        Self::new(Kernel::identity(s.nx()), Kernel::identity(s.ny()))
    }

    pub fn validate(&self, s: &TwoHopSource, bounds: CardBounds) -> Result<()> {
        if self.u_given_x.inputs() != s.nx() || self.v_given_y.inputs() != s.ny() {
            return Err(Error::Shape("aux kernels must read X and Y respectively".into()));
        }
        if self.u_given_x.outputs() > bounds.u {
            return Err(Error::Cardinality { var: "U", got: self.u_given_x.outputs(), bound: bounds.u });
        }
        if self.v_given_y.outputs() > bounds.v {
            return Err(Error::Cardinality { var: "V", got: self.v_given_y.outputs(), bound: bounds.v });
        }
        Ok(())
    }

    pub fn informations(&self, s: &TwoHopSource) -> AuxInformations {
        let up = u_problem(s, 0.0, 0.0, self.u_given_x.outputs());
        let vp = v_problem(s, 0.0, 0.0, self.v_given_y.outputs());
        let (i_ux, i_uy) = up.informations(self.u_given_x.flat());
        let (i_vy, i_vz) = vp.informations(self.v_given_y.flat());
        AuxInformations { i_ux, i_uy, i_vy, i_vz }
    }

    /// Q_XYZUV with axes X, Y, Z, U, V.
    pub fn joint(&self, s: &TwoHopSource) -> Result<JointPmf> {
        let xu = Kernel::new(s.p_xy().axes()[0].labels.clone(), self.u_given_x.to_alphabet().to_vec(), self.u_given_x.rows())?;
        let yv = Kernel::new(s.p_xy().axes()[1].labels.clone(), self.v_given_y.to_alphabet().to_vec(), self.v_given_y.rows())?;
        s.p_xyz().attach("X", &xu, "U")?.attach("Y", &yv, "V")
    }
}

/// −I(U;Y) + b·I(U;X) − c·(I(U;Y) + I(V;Z)) + d·I(V;Y) under the induced joint.
pub fn objective_r(s: &TwoHopSource, aux: &AuxCoupling, w: &TradeoffWeights) -> Result<f64> {
    objective_r_with(s, aux, w, CardBounds::for_source(s))
}

pub fn objective_r_with(s: &TwoHopSource, aux: &AuxCoupling, w: &TradeoffWeights, bounds: CardBounds) -> Result<f64> {
    aux.validate(s, bounds)?;
    let i = aux.informations(s);
    Ok(-i.i_uy + w.b * i.i_ux - w.c * (i.i_uy + i.i_vz) + w.d * i.i_vy)
}
