//! Ideal energy-momentum tensor and the generating-function Hessians.
//!
//! The ideal tensor is generated by L^γ(ψ) = p̃(θ) ψ^γ:
//!
//! ```text
//! T^{αγ} = ∂L^γ/∂ψ_α = A ψ^α ψ^γ + p̃ g^{αγ},          A = θ³ p̃′(θ)
//! ∂²L^γ/∂ψ_α∂ψ_β = A′θ³ ψ^α ψ^β ψ^γ + A (g^{αβ} ψ^γ + g^{βγ} ψ^α + g^{αγ} ψ^β)
//! ```
//!
//! with A′ = dA/dθ and dθ/dψ_β = θ³ ψ^β.

use serde::{Deserialize, Serialize};

use super::eos::BarotropicEos;
use super::state::{metric, FluidState};
use crate::error::Result;
use crate::linalg::{Mat2, Vec2};
use crate::real::{lit, Real};

/// Symmetric contravariant 2-tensor on the t–x block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeTensor2<T>(Mat2<T>);

impl<T: Real> SpacetimeTensor2<T> {
    /// Symmetrizes the input.
    pub fn from_matrix(m: Mat2<T>) -> Self {
        Self(m.symmetric_part())
    }

    pub fn component(&self, alpha: usize, beta: usize) -> T {
        self.0[(alpha, beta)]
    }

    pub fn matrix(&self) -> Mat2<T> {
        self.0
    }

    /// Column T^{·β}.
    pub fn column(&self, beta: usize) -> Vec2<T> {
        Vec2::new(self.0[(0, beta)], self.0[(1, beta)])
    }

    /// T^α_α over the t–x block.
    pub fn mixed_trace(&self) -> T {
        -self.0[(0, 0)] + self.0[(1, 1)]
    }
}

fn coefficient_a<T: Real>(eos: &BarotropicEos<T>, theta: T) -> (T, T) {
    let t2 = theta * theta;
    let dp = eos.dp(theta);
    let a = t2 * theta * dp;
    let da = lit::<T>(3.0) * t2 * dp + t2 * theta * eos.d2p(theta);
    (a, da)
}

/// Ideal stress T^{αβ} = θ³ p̃′ ψ^α ψ^β + p̃ g^{αβ}.
pub fn ideal_stress<T: Real>(state: &FluidState<T>, eos: &BarotropicEos<T>) -> Result<SpacetimeTensor2<T>> {
    let theta = super::state::theta_of_psi(state)?;
    eos.check_theta(theta)?;
    let (a, _) = coefficient_a(eos, theta);
    let psi = state.contravariant();
    Ok(SpacetimeTensor2(psi.outer(&psi).scale(a) + metric::<T>().scale(eos.p(theta))))
}

/// Flux T^{α1}, the quantity matched by the jump conditions.
pub fn flux<T: Real>(state: &FluidState<T>, eos: &BarotropicEos<T>) -> Result<Vec2<T>> {
    Ok(ideal_stress(state, eos)?.column(1))
}

/// Hessians of L⁰ and L¹ with respect to the covariant components (ψ_0, ψ_1).
///
/// The first is the symmetrizer of the ideal system; the second is the
/// Jacobian ∂F/∂ψ of the profile flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealHessians<T> {
    pub l0: Mat2<T>,
    pub l1: Mat2<T>,
}

impl<T: Real> IdealHessians<T> {
    /// Contraction Σ_γ t_γ ∂²L^γ with a covariant vector t.
    pub fn contract(&self, t_cov: Vec2<T>) -> Mat2<T> {
        self.l0.scale(t_cov[0]) + self.l1.scale(t_cov[1])
    }
}

pub fn ideal_hessians<T: Real>(state: &FluidState<T>, eos: &BarotropicEos<T>) -> Result<IdealHessians<T>> {
    let theta = super::state::theta_of_psi(state)?;
    eos.check_theta(theta)?;
    let (a, da) = coefficient_a(eos, theta);
    let c = da * theta * theta * theta;
    let g = metric::<T>();
    let psi = state.contravariant();
    let hess = |gamma: usize| {
        let mut h = Mat2::zero();
        for al in 0..2 {
            for be in 0..2 {
                h[(al, be)] = c * psi[al] * psi[be] * psi[gamma]
                    + a * (g[(al, be)] * psi[gamma] + g[(be, gamma)] * psi[al] + g[(al, gamma)] * psi[be]);
            }
        }
        h
    };
    Ok(IdealHessians { l0: hess(0), l1: hess(1) })
}

/// Outcome of the strict causality test for one direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionCheck<T> {
    /// Contravariant future-directed vector T^β.
    pub direction: Vec2<T>,
    pub eigenvalues: [T; 2],
    pub negative_definite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalityReport<T> {
    pub checks: Vec<DirectionCheck<T>>,
    pub pass: bool,
}

/// Default sample: the rest direction and both null directions.
pub fn default_directions<T: Real>() -> Vec<Vec2<T>> {
    vec![Vec2::new(T::one(), T::zero()), Vec2::new(T::one(), T::one()), Vec2::new(T::one(), -T::one())]
}

/// Checks that ∂²(p̃ ψ^β T_β)/∂ψ∂ψ is negative definite for each sampled
/// future non-spacelike direction. Directions are given contravariantly and
/// lowered with the metric before contraction.
pub fn check_strict_causality<T: Real>(
    state: &FluidState<T>,
    eos: &BarotropicEos<T>,
    directions: &[Vec2<T>],
) -> Result<CausalityReport<T>> {
    let h = ideal_hessians(state, eos)?;
    let checks: Vec<_> = directions
        .iter()
        .map(|&d| {
            let m = h.contract(super::state::lower(d));
            let ev = m.sym_eigenvalues();
            let scale = ev[0].abs().max(ev[1].abs()).max(T::min_positive_value());
            DirectionCheck { direction: d, eigenvalues: ev, negative_definite: ev[1] < -T::rel_tol(1e-13) * scale }
        })
        .collect();
    let pass = checks.iter().all(|c| c.negative_definite);
    Ok(CausalityReport { checks, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rest_state_is_diagonal() {
        let rad = BarotropicEos::<f64>::radiation();
        let rest = FluidState::new(1.0, 0.0).unwrap();
        let t = ideal_stress(&rest, &rad).unwrap();
        assert_relative_eq!(t.component(0, 0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(t.component(1, 1), 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(t.component(0, 1), 0.0);

        let pl = BarotropicEos::<f64>::power_law(5.0).unwrap();
        let t = ideal_stress(&rest, &pl).unwrap();
        assert_relative_eq!(t.component(0, 0), 4.0, epsilon = 1e-14);
        assert_relative_eq!(t.component(1, 1), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn radiation_is_traceless() {
        let rad = BarotropicEos::<f64>::radiation();
        for (a, b) in [(1.0, 0.0), (3.0, 2.5), (0.7, -0.3), (10.0, 9.9)] {
            let s = FluidState::new(a, b).unwrap();
            let t = ideal_stress(&s, &rad).unwrap();
            // two transverse directions each carry the isotropic pressure
            let p = rad.p(s.theta());
            let tr = t.mixed_trace() + 2.0 * p;
            assert!(tr.abs() < 1e-12 * t.matrix().norm(), "trace {tr}");
        }
    }

    #[test]
    fn rest_hessians() {
        let rad = BarotropicEos::<f64>::radiation();
        let h = ideal_hessians(&FluidState::new(1.0, 0.0).unwrap(), &rad).unwrap();
        assert_relative_eq!(h.l0[(0, 0)], 4.0, epsilon = 1e-14);
        assert_relative_eq!(h.l0[(1, 1)], 4.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(h.l1[(0, 1)], 4.0 / 3.0, epsilon = 1e-14);
        assert_eq!(h.l1[(0, 0)], 0.0);
    }

    #[test]
    fn causality_examples() {
        let rest = FluidState::new(1.0, 0.0).unwrap();
        let rad = BarotropicEos::<f64>::radiation();
        let r = check_strict_causality(&rest, &rad, &default_directions()).unwrap();
        assert!(r.pass);
        assert!(r.checks.iter().all(|c| c.negative_definite));

        let k2 = BarotropicEos::<f64>::power_law(2.0).unwrap();
        let r = check_strict_causality(&rest, &k2, &default_directions()).unwrap();
        assert!(!r.pass);
        assert!(r.checks[0].negative_definite);
        assert!(!r.checks[1].negative_definite);
    }
}
