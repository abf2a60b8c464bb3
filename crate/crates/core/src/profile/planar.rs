//! The planar profile system M(ψ) ψ′ = F(ψ), its Lyapunov function and the
//! linearization at the end states.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dissipation::DissipationModel;
use crate::error::{Error, Result};
use crate::fluid::{flux, ideal_hessians, BarotropicEos, FluidState};
use crate::linalg::{Mat2, Vec2};
use crate::rankine_hugoniot::{FluxConstants, ShockData};
use crate::real::Real;

/// F = T^{·1}(ψ) − q.
pub fn profile_flux<T: Real>(state: &FluidState<T>, q: &FluxConstants<T>, eos: &BarotropicEos<T>) -> Result<Vec2<T>> {
    let t = flux(state, eos)?;
    Ok(Vec2::new(t[0] - q.q0, t[1] - q.q1))
}

/// True when |det M| is below `tol_det · ‖M‖²`.
pub fn is_singular<T: Real>(m: &Mat2<T>, tol_det: T) -> bool {
    let n = m.norm();
    !(m.det().abs() > tol_det * n * n) || !m.is_finite()
}

/// ψ′ = M(ψ)⁻¹ F(ψ) for the covariant state.
pub fn planar_rhs<T: Real>(
    model: &DissipationModel<T>,
    state: &FluidState<T>,
    q: &FluxConstants<T>,
    eos: &BarotropicEos<T>,
    tol_det: T,
) -> Result<Vec2<T>> {
    let m = model.profile_matrix(state, eos)?.matrix;
    let singular =
        || Error::SingularMatrix { psi0: state.psi0.as_f64(), psi1: state.psi1.as_f64(), det: m.det().as_f64() };
    if is_singular(&m, tol_det) {
        return Err(singular());
    }
    let f = profile_flux(state, q, eos)?;
    m.solve(&f).ok_or_else(singular)
}

/// L(ψ) = p̃(θ) ψ¹ − q^γ ψ_γ.
pub fn lyapunov_eval<T: Real>(state: &FluidState<T>, q: &FluxConstants<T>, eos: &BarotropicEos<T>) -> Result<T> {
    let theta = crate::fluid::theta_of_psi(state)?;
    eos.check_theta(theta)?;
    Ok(eos.p(theta) * state.psi1 - Vec2::new(q.q0, q.q1).dot(&state.covariant()))
}

/// ∇L with respect to (ψ_0, ψ_1); equals F.
pub fn lyapunov_gradient<T: Real>(
    state: &FluidState<T>,
    q: &FluxConstants<T>,
    eos: &BarotropicEos<T>,
) -> Result<Vec2<T>> {
    profile_flux(state, q, eos)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RestPointType {
    Source,
    Sink,
    Saddle,
    SpiralSource,
    SpiralSink,
    Degenerate,
}

impl RestPointType {
    pub fn is_spiral(&self) -> bool {
        matches!(self, Self::SpiralSource | Self::SpiralSink)
    }

    /// Number of eigenvalues with positive real part.
    pub fn unstable_dimension(&self) -> Option<usize> {
        match self {
            Self::Source | Self::SpiralSource => Some(2),
            Self::Saddle => Some(1),
            Self::Sink | Self::SpiralSink => Some(0),
            Self::Degenerate => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestPointReport<T> {
    pub state: FluidState<T>,
    /// Eigenvalues of the linearization, larger real part first.
    pub eigenvalues: [Complex<T>; 2],
    #[serde(rename = "type")]
    pub kind: RestPointType,
    /// Linearization M⁻¹H (zero when M is singular).
    pub jacobian: Mat2<T>,
}

impl<T: Real> RestPointReport<T> {
    /// Unit eigenvector for a real eigenvalue (index 0 or 1).
    pub fn eigenvector(&self, which: usize) -> Vec2<T> {
        self.jacobian.eigenvector(self.eigenvalues[which].re)
    }
}

/// Classifies eigenvalues: spiral when |Im λ| > tol_osc·|λ|, degenerate when an
/// eigenvalue is negligible against the other.
pub fn classify_eigenvalues<T: Real>(ev: &[Complex<T>; 2], tol_osc: T) -> RestPointType {
    let scale = ev[0].norm().max(ev[1].norm());
    let tiny = T::rel_tol(1e-12) * scale;
    if !(scale > T::zero()) || ev[0].norm() <= tiny || ev[1].norm() <= tiny {
        return RestPointType::Degenerate;
    }
    let spiral = ev.iter().any(|l| l.im.abs() > tol_osc * l.norm());
    let (a, b) = (ev[0].re, ev[1].re);
    if spiral {
        if a > T::zero() {
            RestPointType::SpiralSource
        } else if a < T::zero() {
            RestPointType::SpiralSink
        } else {
            RestPointType::Degenerate
        }
    } else if a > T::zero() && b > T::zero() {
        RestPointType::Source
    } else if a < T::zero() && b < T::zero() {
        RestPointType::Sink
    } else {
        RestPointType::Saddle
    }
}

/// Which end state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    Minus,
    Plus,
}

/// Spectral type of an end state under the flow ψ′ = M⁻¹F.
pub fn rest_point_classify<T: Real>(
    model: &DissipationModel<T>,
    shock: &ShockData<T>,
    which: End,
    eos: &BarotropicEos<T>,
    tol_det: T,
    tol_osc: T,
) -> Result<RestPointReport<T>> {
    let state = match which {
        End::Minus => shock.state_minus,
        End::Plus => shock.state_plus,
    };
    let m = model.profile_matrix(&state, eos)?.matrix;
    let h = ideal_hessians(&state, eos)?.l1;
    if is_singular(&m, tol_det) {
        return Ok(RestPointReport {
            state,
            eigenvalues: [Complex::new(T::zero(), T::zero()); 2],
            kind: RestPointType::Degenerate,
            jacobian: Mat2::zero(),
        });
    }
    let jacobian = m.inverse().expect("non-singular") * h;
    let eigenvalues = jacobian.eigenvalues();
    Ok(RestPointReport { state, eigenvalues, kind: classify_eigenvalues(&eigenvalues, tol_osc), jacobian })
}

/// True iff the end state has a complex pair with |Im λ| > tol_osc·|λ|.
pub fn oscillation_detect<T: Real>(report: &RestPointReport<T>, tol_osc: T) -> bool {
    report.eigenvalues.iter().any(|l| l.im.abs() > tol_osc * l.norm())
}
