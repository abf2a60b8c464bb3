//! Dissipation tensors contracted to the planar profile matrix.
//!
//! For a profile depending on x = x¹ only, the dissipative flux −ΔT^{α1} is
//! linear in the derivative ψ′ of the covariant state, −ΔT^{α1} = M^{αγ} ψ′_γ.
//! The matrix M is assembled by evaluating the tensor formulas on the two
//! basis derivatives, so every model goes through the same contraction path.
//!
//! Gradients of θ and U follow from θ = (−ψ·ψ)^{−1/2} and U = θψ:
//!
//! ```text
//! dθ   = θ³ ψ^μ dψ_μ
//! dU_γ = θ dψ_γ + θ³ ψ_γ ψ^μ dψ_μ
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fluid::{lower, metric, theta_of_psi, BarotropicEos, FluidState};
use crate::linalg::{Mat2, Vec2};
use crate::real::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FtCoefficients<T> {
    pub eta: T,
    pub zeta: T,
    pub chi: T,
}

impl<T: Real> FtCoefficients<T> {
    pub fn new(eta: T, zeta: T, chi: T) -> Result<Self> {
        let all = [eta, zeta, chi];
        if all.iter().any(|c| !(*c >= T::zero()) || !c.is_finite()) {
            return Err(Error::InvalidCoefficients(format!(
                "eta, zeta, chi must be finite and non-negative, got ({eta}, {zeta}, {chi})"
            )));
        }
        if all.iter().all(|c| *c == T::zero()) {
            return Err(Error::InvalidCoefficients("at least one coefficient must be positive".into()));
        }
        Ok(Self { eta, zeta, chi })
    }

    pub fn scaled(&self, t: T) -> Self {
        Self { eta: self.eta * t, zeta: self.zeta * t, chi: self.chi * t }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BdnCoefficients<T> {
    pub eta: T,
    pub mu: T,
    pub nu: T,
}

impl<T: Real> BdnCoefficients<T> {
    pub fn new(eta: T, mu: T, nu: T) -> Result<Self> {
        if [eta, mu, nu].iter().any(|c| !(*c > T::zero()) || !c.is_finite()) {
            return Err(Error::InvalidCoefficients(format!(
                "eta, mu, nu must be finite and positive, got ({eta}, {mu}, {nu})"
            )));
        }
        Ok(Self { eta, mu, nu })
    }

    /// (1/(3η) − 1/(9μ))^{−1}
    pub fn nu_bound(&self) -> T {
        T::one() / (T::one() / (lit::<T>(3.0) * self.eta) - T::one() / (lit::<T>(9.0) * self.mu))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalityClass {
    Acausal,
    StrictlyCausal,
    SharplyCausal,
}

impl fmt::Display for CausalityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Acausal => "acausal",
            Self::StrictlyCausal => "strictly_causal",
            Self::SharplyCausal => "sharply_causal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BdnCausality<T> {
    pub class: CausalityClass,
    /// ν-bound (1/(3η) − 1/(9μ))^{−1}.
    pub bound: T,
}

/// Relative tolerance for the equality ν = bound.
pub const CAUSALITY_REL_TOL: f64 = 1e-12;

/// Classifies BDN coefficients as published: causal iff μ ≥ 4η/3 and ν ≤ bound,
/// sharply causal on ν = bound.
///
/// Note that the characteristic speeds of the tensors as written
/// ([`bdn_signal_speeds`]) stay below light speed on the opposite side of the
/// ν-bound; the classifier reproduces the stated inequalities regardless.
pub fn bdn_causality_class<T: Real>(c: &BdnCoefficients<T>) -> BdnCausality<T> {
    let tol = lit::<T>(CAUSALITY_REL_TOL);
    let mu_min = lit::<T>(4.0 / 3.0) * c.eta;
    if c.mu < mu_min * (T::one() - tol) {
        return BdnCausality { class: CausalityClass::Acausal, bound: c.nu_bound() };
    }
    let bound = c.nu_bound();
    let class = if (c.nu - bound).abs() <= tol * bound {
        CausalityClass::SharplyCausal
    } else if c.nu < bound {
        CausalityClass::StrictlyCausal
    } else {
        CausalityClass::Acausal
    };
    BdnCausality { class, bound }
}

/// Squared rest-frame signal speeds of the BDN principal part,
/// (transverse, longitudinal pair), from det(B^{αβγδ} ξ_β ξ_δ) = 0 with ξ = (−λ, 1, 0, 0).
///
/// Longitudinal: 9μν X² − (12μη + 6μν) X + ν(μ − 4η/3) = 0. Transverse: X = η/ν.
pub fn bdn_signal_speeds<T: Real>(c: &BdnCoefficients<T>) -> (T, [T; 2]) {
    let a = lit::<T>(9.0) * c.mu * c.nu;
    let b = -(lit::<T>(12.0) * c.mu * c.eta + lit::<T>(6.0) * c.mu * c.nu);
    let cc = c.nu * (c.mu - lit::<T>(4.0 / 3.0) * c.eta);
    let disc = (b * b - lit::<T>(4.0) * a * cc).max(T::zero()).sqrt();
    // both roots real: disc ≥ 0 for positive coefficients
    let big = (-b + disc) / (lit::<T>(2.0) * a);
    let small = if big != T::zero() { cc / (a * big) } else { T::zero() };
    (c.eta / c.nu, [small, big])
}

/// Which tensor produced a profile matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    FtViscous,
    FtHeat,
    Bdn,
    Eckart,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::FtViscous => "ft-viscous",
            Self::FtHeat => "ft-heat",
            Self::Bdn => "bdn",
            Self::Eckart => "eckart",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// M^{αγ}: multiplies (ψ_0′, ψ_1′) in the profile equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileMatrix<T> {
    pub matrix: Mat2<T>,
    pub model: ModelKind,
}

/// Gradients of θ and of the covariant velocity induced by a covariant ψ-gradient.
pub fn psi_gradient_chain<T: Real>(state: &FluidState<T>, dpsi: Vec2<T>) -> Result<(T, Vec2<T>)> {
    let theta = theta_of_psi(state)?;
    let t3 = theta * theta * theta;
    let contraction = state.contravariant().dot(&dpsi);
    let d_theta = t3 * contraction;
    let du = dpsi.scale(theta) + state.covariant().scale(t3 * contraction);
    Ok((d_theta, du))
}

/// σ and ζ̌ at the local sound speed and temperature.
pub fn ft_coefficients_at<T: Real>(
    coeffs: &FtCoefficients<T>,
    state: &FluidState<T>,
    eos: &BarotropicEos<T>,
) -> Result<(T, T)> {
    let theta = theta_of_psi(state)?;
    eos.check_theta(theta)?;
    let c2 = eos.sound_speed_sq(theta);
    if !(c2 > T::zero() && c2 < T::one()) {
        return Err(Error::Superluminal { cs2: c2.as_f64(), theta: theta.as_f64() });
    }
    let one = T::one();
    let heat = c2 * coeffs.chi * theta;
    let sigma = (lit::<T>(4.0 / 3.0) * coeffs.eta + coeffs.zeta) / (one - c2) - heat;
    let zeta_check = coeffs.zeta + c2 * sigma - (one - c2) * heat;
    Ok((sigma, zeta_check))
}

/// Kinematic quantities shared by the planar contractions.
struct Planar<T> {
    u: Vec2<T>,
    pi: Mat2<T>,
    g: Mat2<T>,
}

impl<T: Real> Planar<T> {
    fn new(state: &FluidState<T>) -> Self {
        Self { u: state.velocity(), pi: state.projector(), g: metric() }
    }

    /// η Π^{αγ} Π^{1δ} [∂_δ U_γ + ∂_γ U_δ − (2/3) g_{γδ} ∂_ε U^ε] with only ∂_1 nonzero.
    fn shear(&self, eta: T, du: &Vec2<T>) -> Vec2<T> {
        let div = du[1]; // ∂_ε U^ε = ∂_1 U^1 = ∂_1 U_1
        let two_thirds = lit::<T>(2.0 / 3.0);
        let mut out = Vec2::zero();
        for a in 0..2 {
            let mut acc = T::zero();
            for c in 0..2 {
                for d in 0..2 {
                    let grad = if d == 1 { du[c] } else { T::zero() } + if c == 1 { du[d] } else { T::zero() };
                    acc = acc + self.pi[(a, c)] * self.pi[(1, d)] * (grad - two_thirds * self.g[(c, d)] * div);
                }
            }
            out[a] = eta * acc;
        }
        out
    }

    /// coefficient · Π^{α1} ∂_γ U^γ
    fn bulk(&self, coef: T, du: &Vec2<T>) -> Vec2<T> {
        Vec2::new(self.pi[(0, 1)], self.pi[(1, 1)]).scale(coef * du[1])
    }

    /// σ [U^α U^1 ∂_γU^γ − (Π^{αγ} U^1 + Π^{1γ} U^α) U^δ ∂_δ U_γ]
    fn sigma_term(&self, sigma: T, du: &Vec2<T>) -> Vec2<T> {
        let u = &self.u;
        let mut out = Vec2::zero();
        for a in 0..2 {
            let mut acc = u[a] * u[1] * du[1];
            for c in 0..2 {
                acc = acc - (self.pi[(a, c)] * u[1] + self.pi[(1, c)] * u[a]) * u[1] * du[c];
            }
            out[a] = sigma * acc;
        }
        out
    }

    /// χ [(U^α ∂θ/∂x_1 + U^1 ∂θ/∂x_α) − g^{α1} U^γ ∂_γ θ]
    fn heat_ft(&self, chi: T, d_theta: T) -> Vec2<T> {
        let u = &self.u;
        let mut out = Vec2::zero();
        for a in 0..2 {
            // ∂θ/∂x_α = g^{αδ} ∂_δ θ
            let raised = self.g[(a, 1)] * d_theta;
            out[a] = chi * (u[a] * d_theta + u[1] * raised - self.g[(a, 1)] * u[1] * d_theta);
        }
        out
    }

    /// χ (Π^{αγ} U^1 + Π^{1γ} U^α) ∂_γ θ
    fn heat_eckart(&self, chi: T, d_theta: T) -> Vec2<T> {
        let u = &self.u;
        let mut out = Vec2::zero();
        for a in 0..2 {
            out[a] = chi * (self.pi[(a, 1)] * u[1] + self.pi[(1, 1)] * u[a]) * d_theta;
        }
        out
    }
}

/// Builds the matrix column by column from a linear map of ψ′.
fn assemble<T: Real>(f: impl Fn(Vec2<T>) -> Result<Vec2<T>>) -> Result<Mat2<T>> {
    let c0 = f(Vec2::new(T::one(), T::zero()))?;
    let c1 = f(Vec2::new(T::zero(), T::one()))?;
    Ok(Mat2::new(c0[0], c1[0], c0[1], c1[1]))
}

/// −ΔT^{α1} of the hyperbolic viscous/heat-conducting tensor for a given ψ′.
pub fn ft_dissipative_flux<T: Real>(
    state: &FluidState<T>,
    coeffs: &FtCoefficients<T>,
    eos: &BarotropicEos<T>,
    dpsi: Vec2<T>,
) -> Result<Vec2<T>> {
    let (sigma, zeta_check) = ft_coefficients_at(coeffs, state, eos)?;
    let (d_theta, du) = psi_gradient_chain(state, dpsi)?;
    let p = Planar::new(state);
    Ok(p.shear(coeffs.eta, &du) + p.bulk(zeta_check, &du) + p.sigma_term(sigma, &du) + p.heat_ft(coeffs.chi, d_theta))
}

pub fn profile_matrix_ft<T: Real>(
    state: &FluidState<T>,
    coeffs: &FtCoefficients<T>,
    eos: &BarotropicEos<T>,
) -> Result<ProfileMatrix<T>> {
    let matrix = assemble(|d| ft_dissipative_flux(state, coeffs, eos, d))?;
    let model = if coeffs.chi > T::zero() { ModelKind::FtHeat } else { ModelKind::FtViscous };
    Ok(ProfileMatrix { matrix, model })
}

/// Eckart (first-order, acausal) tensor; kept for comparison.
pub fn profile_matrix_eckart<T: Real>(state: &FluidState<T>, coeffs: &FtCoefficients<T>) -> Result<ProfileMatrix<T>> {
    let p = Planar::new(state);
    let matrix = assemble(|d| {
        let (d_theta, du) = psi_gradient_chain(state, d)?;
        Ok(p.shear(coeffs.eta, &du) + p.bulk(coeffs.zeta, &du) + p.heat_eckart(coeffs.chi, d_theta))
    })?;
    Ok(ProfileMatrix { matrix, model: ModelKind::Eckart })
}

/// η B_E^{α1γ1} − μ B_1^{α1γ1} − ν B_2^{α1γ1}, contracted directly with ψ-gradients.
pub fn profile_matrix_bdn<T: Real>(state: &FluidState<T>, coeffs: &BdnCoefficients<T>) -> Result<ProfileMatrix<T>> {
    theta_of_psi(state)?;
    let u = state.velocity();
    let pi = state.projector();
    let g = metric::<T>();
    let three = lit::<T>(3.0);
    let two_thirds = lit::<T>(2.0 / 3.0);
    // Π^α_ε = Π^{αζ} g_{ζε}
    let pi_mixed = pi * g;
    let mut m = Mat2::zero();
    for a in 0..2 {
        for c in 0..2 {
            let be = pi[(a, c)] * pi[(1, 1)] + pi[(a, 1)] * pi[(1, c)] - two_thirds * pi[(a, 1)] * pi[(c, 1)];
            let b1 = (three * u[a] * u[1] + pi[(a, 1)]) * (three * u[c] * u[1] + pi[(c, 1)]);
            let mut b2 = T::zero();
            for e in 0..2 {
                b2 = b2 + (u[a] * pi_mixed[(1, e)] + u[1] * pi_mixed[(a, e)]) * (u[c] * pi[(1, e)] + u[1] * pi[(c, e)]);
            }
            m[(a, c)] = coeffs.eta * be - coeffs.mu * b1 - coeffs.nu * b2;
        }
    }
    Ok(ProfileMatrix { matrix: m, model: ModelKind::Bdn })
}

/// A dissipation model with its coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum DissipationModel<T> {
    FtViscous { eta: T, zeta: T },
    FtHeat { eta: T, zeta: T, chi: T },
    Bdn { eta: T, mu: T, nu: T },
    Eckart { eta: T, zeta: T, chi: T },
}

impl<T: Real> DissipationModel<T> {
    pub fn ft(coeffs: FtCoefficients<T>) -> Self {
        if coeffs.chi > T::zero() {
            Self::FtHeat { eta: coeffs.eta, zeta: coeffs.zeta, chi: coeffs.chi }
        } else {
            Self::FtViscous { eta: coeffs.eta, zeta: coeffs.zeta }
        }
    }

    pub fn bdn(coeffs: BdnCoefficients<T>) -> Self {
        Self::Bdn { eta: coeffs.eta, mu: coeffs.mu, nu: coeffs.nu }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Self::FtViscous { .. } => ModelKind::FtViscous,
            Self::FtHeat { .. } => ModelKind::FtHeat,
            Self::Bdn { .. } => ModelKind::Bdn,
            Self::Eckart { .. } => ModelKind::Eckart,
        }
    }

    pub fn ft_coefficients(&self) -> Option<FtCoefficients<T>> {
        match *self {
            Self::FtViscous { eta, zeta } => Some(FtCoefficients { eta, zeta, chi: T::zero() }),
            Self::FtHeat { eta, zeta, chi } | Self::Eckart { eta, zeta, chi } => {
                Some(FtCoefficients { eta, zeta, chi })
            }
            Self::Bdn { .. } => None,
        }
    }

    pub fn bdn_coefficients(&self) -> Option<BdnCoefficients<T>> {
        match *self {
            Self::Bdn { eta, mu, nu } => Some(BdnCoefficients { eta, mu, nu }),
            _ => None,
        }
    }

    /// Checks the coefficients and that the model accepts the EOS.
    pub fn validate(&self, eos: &BarotropicEos<T>) -> Result<()> {
        match self {
            Self::FtViscous { eta, zeta } => {
                FtCoefficients::new(*eta, *zeta, T::zero())?;
            }
            Self::FtHeat { eta, zeta, chi } => {
                FtCoefficients::new(*eta, *zeta, *chi)?;
                if !(*chi > T::zero()) {
                    return Err(Error::InvalidCoefficients("ft-heat needs chi > 0".into()));
                }
            }
            Self::Eckart { eta, zeta, chi } => {
                FtCoefficients::new(*eta, *zeta, *chi)?;
            }
            Self::Bdn { eta, mu, nu } => {
                BdnCoefficients::new(*eta, *mu, *nu)?;
                if !eos.is_radiation() {
                    return Err(Error::IncompatibleModel { model: "bdn".into(), eos: eos.name().into() });
                }
            }
        }
        Ok(())
    }

    pub fn profile_matrix(&self, state: &FluidState<T>, eos: &BarotropicEos<T>) -> Result<ProfileMatrix<T>> {
        match self {
            Self::FtViscous { .. } | Self::FtHeat { .. } => {
                profile_matrix_ft(state, &self.ft_coefficients().expect("ft model"), eos)
            }
            Self::Eckart { .. } => profile_matrix_eckart(state, &self.ft_coefficients().expect("eckart model")),
            Self::Bdn { .. } => profile_matrix_bdn(state, &self.bdn_coefficients().expect("bdn model")),
        }
    }
}

/// Closed form of the FT planar matrix, σθΠ + χθ²UUᵀ, for cross-checking.
pub fn profile_matrix_ft_closed_form<T: Real>(
    state: &FluidState<T>,
    coeffs: &FtCoefficients<T>,
    eos: &BarotropicEos<T>,
) -> Result<Mat2<T>> {
    let (sigma, _) = ft_coefficients_at(coeffs, state, eos)?;
    let theta = state.theta();
    let u = state.velocity();
    Ok(state.projector().scale(sigma * theta) + u.outer(&u).scale(coeffs.chi * theta * theta))
}

/// Contravariant velocity gradient dU^α for a covariant ψ′.
pub fn velocity_gradient<T: Real>(state: &FluidState<T>, dpsi: Vec2<T>) -> Result<Vec2<T>> {
    Ok(lower(psi_gradient_chain(state, dpsi)?.1))
}
