//! Profile ODEs: integration, end-state spectra and classification of orbits.

pub mod integrator;
pub mod planar;
pub mod result;
pub mod scalar;
pub mod shooting;

pub use planar::{
    classify_eigenvalues, is_singular, lyapunov_eval, lyapunov_gradient, oscillation_detect, planar_rhs, profile_flux,
    rest_point_classify, End, RestPointReport, RestPointType,
};
pub use result::{Classification, Diagnostics, EndSummary, Method, ProfileResult, ProfileSample, ProfileSummary};
pub use scalar::{r_function, scalar_profile_ft, scalar_rhs, sigma_viscous, u_prime};
pub use shooting::{compute_profile, shoot_heteroclinic, ShootingOptions};
