use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};
use crate::real::Real;

/// Minkowski metric on the t–x block, signature (−, +). It is its own inverse,
/// so the same matrix raises and lowers indices.
pub fn metric<T: Real>() -> Mat2<T> {
    Mat2::diag(-T::one(), T::one())
}

/// Lowers (or raises) the index of a t–x vector.
#[inline]
pub fn lower<T: Real>(v: Vec2<T>) -> Vec2<T> {
    Vec2::new(-v[0], v[1])
}

/// Inverse-temperature four-vector ψ^α = U^α/θ restricted to the t–x plane.
///
/// Stores contravariant components; `covariant()` gives (ψ_0, ψ_1), which are
/// the independent variables of the profile equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidState<T> {
    pub psi0: T,
    pub psi1: T,
}

impl<T: Real> FluidState<T> {
    /// Builds a state, rejecting anything outside ψ⁰ > |ψ¹|.
    pub fn new(psi0: T, psi1: T) -> Result<Self> {
        let s = Self { psi0, psi1 };
        if s.in_domain() {
            Ok(s)
        } else {
            Err(Error::OutsideDomain { psi0: psi0.as_f64(), psi1: psi1.as_f64() })
        }
    }

    pub fn from_covariant(y: Vec2<T>) -> Result<Self> {
        Self::new(-y[0], y[1])
    }

    /// State with spatial four-velocity `u1` (u¹, with u⁰ = √(1+u1²)) at temperature `theta`.
    pub fn from_velocity(u1: T, theta: T) -> Result<Self> {
        let u0 = (T::one() + u1 * u1).sqrt();
        Self::new(u0 / theta, u1 / theta)
    }

    pub fn in_domain(&self) -> bool {
        self.psi0.is_finite() && self.psi1.is_finite() && self.psi0 > self.psi1.abs()
    }

    pub fn contravariant(&self) -> Vec2<T> {
        Vec2::new(self.psi0, self.psi1)
    }

    pub fn covariant(&self) -> Vec2<T> {
        Vec2::new(-self.psi0, self.psi1)
    }

    /// −ψ_α ψ^α = (ψ⁰)² − (ψ¹)², factored to limit cancellation near the light cone.
    fn norm_sq(&self) -> T {
        (self.psi0 - self.psi1) * (self.psi0 + self.psi1)
    }

    /// Temperature θ = (−ψ_α ψ^α)^{−1/2}.
    pub fn theta(&self) -> T {
        T::one() / self.norm_sq().sqrt()
    }

    /// Contravariant four-velocity U^α = θ ψ^α.
    pub fn velocity(&self) -> Vec2<T> {
        self.contravariant().scale(self.theta())
    }

    /// Three-velocity v = u¹/u⁰.
    pub fn three_velocity(&self) -> T {
        self.psi1 / self.psi0
    }

    /// Projector Π^{αβ} = g^{αβ} + U^α U^β.
    pub fn projector(&self) -> Mat2<T> {
        let u = self.velocity();
        metric::<T>() + u.outer(&u)
    }

    /// Euclidean distance in (ψ⁰, ψ¹).
    pub fn distance(&self, other: &Self) -> T {
        (self.contravariant() - other.contravariant()).norm()
    }
}

/// θ(ψ), rejecting states outside the domain.
pub fn theta_of_psi<T: Real>(state: &FluidState<T>) -> Result<T> {
    if !state.in_domain() {
        return Err(Error::OutsideDomain { psi0: state.psi0.as_f64(), psi1: state.psi1.as_f64() });
    }
    Ok(state.theta())
}
