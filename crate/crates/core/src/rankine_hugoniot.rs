//! End states of a standing shock from the jump conditions T^{α1}(ψ±) = q^α.
//!
//! Eliminating the velocity reduces the two jump conditions to the scalar
//! equation g(ρ) = q0² − q1² with
//!
//! ```text
//! g(ρ) = −ρ p̂(ρ) + q1 (ρ − p̂(ρ)),   0 ≤ ρ ≤ ρ̄,   p̂(ρ̄) = q1.
//! ```
//!
//! For a genuinely nonlinear EOS g rises from g(0) = 0 to a single maximum
//! Q(q1) at ρ* and falls to −q1², so two end states exist exactly when
//! q1² < q0² < q1² + Q(q1). The roots are bracketed on either side of ρ*.
//!
//! For EOS with a linear p̂ the roots and the maximizer are in closed form.
//! Otherwise all refinement is done in θ, where ρ(θ) is explicit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fluid::{ideal_hessians, BarotropicEos, FluidState};
use crate::linalg::generalized_sym_eigenvalues;
use crate::real::{lit, Real};
use crate::roots::safeguarded_newton;

/// Fluxes of energy and momentum through the standing shock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxConstants<T> {
    pub q0: T,
    pub q1: T,
}

impl<T: Real> FluxConstants<T> {
    pub fn new(q0: T, q1: T) -> Result<Self> {
        if !(q0 > T::zero()) || !(q1 > T::zero()) || !q0.is_finite() || !q1.is_finite() {
            return Err(Error::OutOfInterval {
                what: "flux constants (q0, q1 must be positive)",
                value: if q0 > T::zero() { q1.as_f64() } else { q0.as_f64() },
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        Ok(Self { q0, q1 })
    }

    /// Covariant flux vector q_γ = (−q0, q1).
    pub fn covariant(&self) -> crate::linalg::Vec2<T> {
        crate::linalg::Vec2::new(-self.q0, self.q1)
    }
}

/// Location and value of the maximum of g.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QMax<T> {
    pub rho_star: T,
    pub q_max: T,
    pub rho_bar: T,
    /// Genuine-nonlinearity indicator at ρ*.
    pub gnl_at_star: T,
    /// Set when the indicator is not positive at ρ*; the maximizer may then not be unique.
    pub gnl_warning: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockData<T> {
    pub q: FluxConstants<T>,
    pub q_max: T,
    pub rho_star: T,
    pub rho_minus: T,
    pub rho_plus: T,
    pub state_minus: FluidState<T>,
    pub state_plus: FluidState<T>,
    pub speeds_minus: (T, T),
    pub speeds_plus: (T, T),
    pub lax_ok: bool,
}

/// Flat, serialization-friendly view of [`ShockData`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockRecord {
    pub q0: f64,
    pub q1: f64,
    pub q_max: f64,
    pub rho_star: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub u1_minus: f64,
    pub u1_plus: f64,
    pub theta_minus: f64,
    pub theta_plus: f64,
    pub psi0_minus: f64,
    pub psi1_minus: f64,
    pub psi0_plus: f64,
    pub psi1_plus: f64,
    pub lambda1_minus: f64,
    pub lambda2_minus: f64,
    pub lambda1_plus: f64,
    pub lambda2_plus: f64,
    pub lax: bool,
}

impl<T: Real> ShockData<T> {
    /// Amplitude ‖ψ⁺ − ψ⁻‖.
    pub fn amplitude(&self) -> T {
        self.state_plus.distance(&self.state_minus)
    }

    /// The same pair with the roles of upstream and downstream exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            rho_minus: self.rho_plus,
            rho_plus: self.rho_minus,
            state_minus: self.state_plus,
            state_plus: self.state_minus,
            speeds_minus: self.speeds_plus,
            speeds_plus: self.speeds_minus,
            lax_ok: lax_pattern(self.speeds_plus, self.speeds_minus),
            ..*self
        }
    }

    pub fn record(&self) -> ShockRecord {
        let f = |x: T| x.as_f64();
        let (sm, sp) = (&self.state_minus, &self.state_plus);
        ShockRecord {
            q0: f(self.q.q0),
            q1: f(self.q.q1),
            q_max: f(self.q_max),
            rho_star: f(self.rho_star),
            rho_minus: f(self.rho_minus),
            rho_plus: f(self.rho_plus),
            u1_minus: f(sm.velocity()[1]),
            u1_plus: f(sp.velocity()[1]),
            theta_minus: f(sm.theta()),
            theta_plus: f(sp.theta()),
            psi0_minus: f(sm.psi0),
            psi1_minus: f(sm.psi1),
            psi0_plus: f(sp.psi0),
            psi1_plus: f(sp.psi1),
            lambda1_minus: f(self.speeds_minus.0),
            lambda2_minus: f(self.speeds_minus.1),
            lambda1_plus: f(self.speeds_plus.0),
            lambda2_plus: f(self.speeds_plus.1),
            lax: self.lax_ok,
        }
    }
}

/// g restricted to a fixed q1, parametrized either by ρ (linear p̂) or by θ.
struct Hugoniot<'a, T> {
    eos: &'a BarotropicEos<T>,
    q1: T,
    slope: Option<T>,
    theta_lo: T,
    theta_bar: T,
    rho_bar: T,
}

impl<'a, T: Real> Hugoniot<'a, T> {
    fn new(eos: &'a BarotropicEos<T>, q1: T) -> Result<Self> {
        if !(q1 > T::zero()) || !q1.is_finite() {
            return Err(Error::OutOfInterval { what: "q1", value: q1.as_f64(), min: 0.0, max: f64::INFINITY });
        }
        let (tmin, tmax) = eos.theta_interval();
        if let Some(k) = eos.linear_slope() {
            let rho_bar = q1 / k;
            let theta_bar = eos.theta_of_energy(rho_bar)?;
            return Ok(Self { eos, q1, slope: Some(k), theta_lo: tmin, theta_bar, rho_bar });
        }
        // p̃ is increasing, so p̃(θ̄) = q1 has a unique root
        let out = || Error::OutOfInterval {
            what: "q1 (pressure range of the EOS)",
            value: q1.as_f64(),
            min: eos.p(tmin).as_f64(),
            max: eos.p(tmax).as_f64(),
        };
        if tmin > T::zero() && eos.p(tmin) >= q1 {
            return Err(out());
        }
        let two = lit::<T>(2.0);
        let mut hi = T::one().max(tmin);
        while eos.p(hi) < q1 {
            if hi >= tmax {
                return Err(out());
            }
            hi = (hi * two).min(tmax);
        }
        let mut lo = hi;
        while lo > tmin && eos.p(lo) > q1 {
            lo = (lo / two).max(tmin);
            if lo < T::min_positive_value().sqrt() {
                lo = tmin;
                break;
            }
        }
        let theta_bar = safeguarded_newton(|t| (eos.p(t) - q1, eos.dp(t)), lo, hi, T::rel_tol(1e-15), T::zero())?;
        Ok(Self { eos, q1, slope: None, theta_lo: tmin, theta_bar, rho_bar: eos.energy(theta_bar) })
    }

    fn g_of_rho_linear(&self, k: T, rho: T) -> T {
        let p = k * rho;
        -rho * p + self.q1 * (rho - p)
    }

    /// (g, dg/dθ, g′(ρ)) at θ.
    fn at_theta(&self, theta: T) -> (T, T, T) {
        let rho = self.eos.energy(theta);
        let (p, dp, _) = self.eos.pressure_derivatives_at_theta(theta);
        let g = -rho * p + self.q1 * (rho - p);
        let gp = -p - rho * dp + self.q1 * (T::one() - dp);
        (g, gp * theta * self.eos.d2p(theta), gp)
    }

    /// g″(ρ) expressed at θ.
    fn gpp_at_theta(&self, theta: T) -> T {
        let rho = self.eos.energy(theta);
        let (_, dp, d2p) = self.eos.pressure_derivatives_at_theta(theta);
        -lit::<T>(2.0) * dp - (rho + self.q1) * d2p
    }

    /// Lower end of the θ range used for refinement; θ = 0 itself is avoided
    /// because p̂′ is a 0/0 limit there.
    fn theta_floor(&self) -> T {
        if self.theta_lo > T::zero() {
            self.theta_lo
        } else {
            self.theta_bar * T::epsilon()
        }
    }

    fn maximum(&self) -> Result<QMax<T>> {
        let (rho_star, theta_star) = match self.slope {
            Some(k) => {
                let r = self.q1 * (T::one() - k) / (lit::<T>(2.0) * k);
                (r, self.eos.theta_of_energy(r)?)
            }
            None => {
                let th = safeguarded_newton(
                    |t| {
                        let (_, _, gp) = self.at_theta(t);
                        (gp, self.gpp_at_theta(t) * t * self.eos.d2p(t))
                    },
                    self.theta_floor(),
                    self.theta_bar,
                    T::rel_tol(1e-15),
                    T::zero(),
                )?;
                (self.eos.energy(th), th)
            }
        };
        let q_max = self.g(rho_star, theta_star);
        let gnl = self.eos.gnl_indicator(rho_star)?;
        Ok(QMax { rho_star, q_max, rho_bar: self.rho_bar, gnl_at_star: gnl, gnl_warning: !(gnl > T::zero()) })
    }

    fn g(&self, rho: T, theta: T) -> T {
        match self.slope {
            Some(k) => self.g_of_rho_linear(k, rho),
            None => self.at_theta(theta).0,
        }
    }

    /// Roots ρ⁻ < ρ* < ρ⁺ of g = d.
    fn roots(&self, d: T, m: &QMax<T>) -> Result<(T, T)> {
        if let Some(k) = self.slope {
            // k ρ² − q1 (1 − k) ρ + d = 0; small root from the product to avoid cancellation
            let rs = m.rho_star;
            let disc = rs * rs - d / k;
            let big = rs + disc.max(T::zero()).sqrt();
            return Ok((d / (k * big), big));
        }
        let theta_star = self.eos.theta_of_energy(m.rho_star)?;
        let f = |t: T| {
            let (g, dg, _) = self.at_theta(t);
            (g - d, dg)
        };
        let lo = self.theta_floor();
        let tol = T::rel_tol(1e-15);
        let t_minus = safeguarded_newton(f, lo, theta_star, tol, T::zero())?;
        let t_plus = safeguarded_newton(f, theta_star, self.theta_bar, tol, T::zero())?;
        Ok((self.eos.energy(t_minus), self.eos.energy(t_plus)))
    }
}

/// ρ̄ with p̂(ρ̄) = q1.
pub fn rho_bar<T: Real>(q1: T, eos: &BarotropicEos<T>) -> Result<T> {
    Ok(Hugoniot::new(eos, q1)?.rho_bar)
}

/// g(ρ) = −ρ p̂(ρ) + q1 (ρ − p̂(ρ)) on [0, ρ̄].
pub fn g_eval<T: Real>(rho: T, q1: T, eos: &BarotropicEos<T>) -> Result<T> {
    let h = Hugoniot::new(eos, q1)?;
    let slack = h.rho_bar * T::rel_tol(1e-14);
    if !(rho >= T::zero() && rho <= h.rho_bar + slack) {
        return Err(Error::OutOfInterval { what: "rho in g", value: rho.as_f64(), min: 0.0, max: h.rho_bar.as_f64() });
    }
    if let Some(k) = h.slope {
        return Ok(h.g_of_rho_linear(k, rho));
    }
    let p = if rho == T::zero() { T::zero() } else { eos.pressure_of_energy(rho)? };
    Ok(-rho * p + q1 * (rho - p))
}

/// g′(ρ) and g″(ρ).
pub fn g_derivatives<T: Real>(rho: T, q1: T, eos: &BarotropicEos<T>) -> Result<(T, T)> {
    let (p, dp, d2p) = eos.pressure_derivatives(rho)?;
    let gp = -p - rho * dp + q1 * (T::one() - dp);
    let gpp = -lit::<T>(2.0) * dp - (rho + q1) * d2p;
    Ok((gp, gpp))
}

/// Interior maximizer ρ* of g and the maximum Q(q1).
pub fn q_max<T: Real>(q1: T, eos: &BarotropicEos<T>) -> Result<QMax<T>> {
    Hugoniot::new(eos, q1)?.maximum()
}

/// u¹ on the Hugoniot locus: ((ρ + q1)²/q0² − 1)^{−1/2}.
pub fn velocity_on_locus<T: Real>(rho: T, q: &FluxConstants<T>) -> T {
    let r = (rho + q.q1) / q.q0;
    T::one() / ((r - T::one()) * (r + T::one())).sqrt()
}

/// Characteristic speeds: roots of det(∂²L¹ − λ ∂²L⁰) = 0, ascending.
pub fn char_speeds<T: Real>(state: &FluidState<T>, eos: &BarotropicEos<T>) -> Result<(T, T)> {
    let h = ideal_hessians(state, eos)?;
    let [a, b] = generalized_sym_eigenvalues(&h.l1, &h.l0)
        .ok_or(Error::NotHyperbolic { psi0: state.psi0.as_f64(), psi1: state.psi1.as_f64() })?;
    Ok((a, b))
}

fn lax_pattern<T: Real>(minus: (T, T), plus: (T, T)) -> bool {
    minus.0 > T::zero() && plus.0 < T::zero() && plus.1 > T::zero()
}

/// Both speeds positive upstream, opposite signs downstream.
pub fn lax_classify<T: Real>(shock: &ShockData<T>) -> bool {
    lax_pattern(shock.speeds_minus, shock.speeds_plus)
}

/// The two end states for given fluxes.
pub fn end_states<T: Real>(q: FluxConstants<T>, eos: &BarotropicEos<T>) -> Result<ShockData<T>> {
    let h = Hugoniot::new(eos, q.q1)?;
    let m = h.maximum()?;
    let d = (q.q0 - q.q1) * (q.q0 + q.q1);
    if !(d > T::zero() && d < m.q_max) {
        return Err(Error::NoShock { q0: q.q0.as_f64(), q1: q.q1.as_f64(), q_max: m.q_max.as_f64() });
    }
    let (rho_minus, rho_plus) = h.roots(d, &m)?;
    let state_at = |rho: T| -> Result<FluidState<T>> {
        let u1 = velocity_on_locus(rho, &q);
        FluidState::from_velocity(u1, eos.theta_of_energy(rho)?)
    };
    let state_minus = state_at(rho_minus)?;
    let state_plus = state_at(rho_plus)?;
    let speeds_minus = char_speeds(&state_minus, eos)?;
    let speeds_plus = char_speeds(&state_plus, eos)?;
    Ok(ShockData {
        q,
        q_max: m.q_max,
        rho_star: m.rho_star,
        rho_minus,
        rho_plus,
        state_minus,
        state_plus,
        speeds_minus,
        speeds_plus,
        lax_ok: lax_pattern(speeds_minus, speeds_plus),
    })
}

/// Residual q0 u⁰ − (ρ + q1) u¹ of the algebraic constraint.
pub fn constraint_residual<T: Real>(state: &FluidState<T>, rho: T, q: &FluxConstants<T>) -> T {
    let u = state.velocity();
    q.q0 * u[0] - (rho + q.q1) * u[1]
}

/// Fluxes for a shock of strength s ∈ (0, 1): q0² = q1² + (1 − s) Q(q1).
///
/// s → 0 is the sonic limit where both end states merge; s → 1 sends the
/// upstream energy density to zero.
pub fn shock_from_strength<T: Real>(q1: T, s: T, eos: &BarotropicEos<T>) -> Result<FluxConstants<T>> {
    if !(s > T::zero() && s < T::one()) {
        return Err(Error::InvalidStrength(s.as_f64()));
    }
    let m = q_max(q1, eos)?;
    let q0 = (q1 * q1 + (T::one() - s) * m.q_max).sqrt();
    Ok(FluxConstants { q0, q1 })
}
