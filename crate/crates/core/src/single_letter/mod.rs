//! Single-letter trade-off objectives, their minimization, region
//! certificates, the band-constrained variant and the perturbation check.

mod alternating;
mod aux;
mod certify;
pub mod bottleneck;
mod envelope;
mod gamma;
mod perturb;
mod solve;
mod weights;

pub use aux::{objective_r, objective_r_with, AuxCoupling, AuxInformations, CardBounds};
pub use certify::{certify_in, certify_out, Violation, CERTIFY_TOL};
pub use bottleneck::{KernelSolver, SolverConfig, SubProblem, SubSolution};
pub use solve::{solve_r, solve_r_grid, solve_r_joint, solve_r_tilde, RSolution, TildeSolution};
pub use gamma::{objective_gamma, solve_r_gamma, GammaSolution, GammaTerms, Q1Coupling};
pub use perturb::{perturb_gamma, PerturbationReport, V_STAR};
pub use weights::{RegionPoint, TildeWeights, TradeoffWeights};
