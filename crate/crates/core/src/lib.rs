//! Rankine–Hugoniot states and dissipative shock profiles for a relativistic
//! barotropic fluid in one space dimension.
//!
//! Everything is generic over the scalar type (`f32` or `f64`); the aliases
//! below fix it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dissipation;
pub mod error;
pub mod fluid;
pub mod linalg;
pub mod profile;
pub mod rankine_hugoniot;
pub mod real;
pub mod roots;

pub use dissipation::{
    bdn_causality_class, bdn_signal_speeds, BdnCausality, BdnCoefficients, CausalityClass, DissipationModel,
    FtCoefficients, ModelKind,
};
pub use error::{Error, Result};
pub use fluid::{BarotropicEos, FluidState};
pub use profile::{compute_profile, shoot_heteroclinic, Classification, ProfileResult, ShootingOptions};
pub use rankine_hugoniot::{end_states, q_max, shock_from_strength, FluxConstants, ShockData};
pub use real::Real;

pub type Eos = fluid::BarotropicEos<f64>;
pub type State = fluid::FluidState<f64>;
pub type Flux = rankine_hugoniot::FluxConstants<f64>;
pub type Shock = rankine_hugoniot::ShockData<f64>;
pub type Model = dissipation::DissipationModel<f64>;
pub type Profile = profile::ProfileResult<f64>;
pub type Options = profile::ShootingOptions<f64>;
