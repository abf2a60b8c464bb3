//! Equation of state, kinematics and the ideal stress tensor.

pub mod eos;
pub mod state;
pub mod stress;

pub use eos::{parse_rational, BarotropicEos, PowerTerm};
pub use state::{lower, metric, theta_of_psi, FluidState};
pub use stress::{
    check_strict_causality, default_directions, flux, ideal_hessians, ideal_stress, CausalityReport, DirectionCheck,
    IdealHessians, SpacetimeTensor2,
};
