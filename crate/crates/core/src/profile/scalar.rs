//! Scalar reduction of the viscous-only profile problem.
//!
//! Without heat conduction the dissipative flux is σ U′ along the profile, and
//! the algebraic constraint ties the velocity to the energy density on the
//! Hugoniot locus, u¹ = U(ρ). The remaining equation is
//!
//! ```text
//! σ U′(ρ) ρ′ = R(ρ),    R(ρ) = (ρ + p̂) U(ρ)² + p̂ − q1.
//! ```
//!
//! R vanishes exactly at ρ∓ and is negative between them, while U′ < 0, so ρ
//! increases monotonically from ρ⁻ to ρ⁺.

use num_complex::Complex;

use super::integrator::{integrate, Control};
use super::planar::{lyapunov_eval, RestPointReport, RestPointType};
use super::result::{Classification, Diagnostics, Method, ProfileResult, ProfileSample};
use super::shooting::{build_result, ShootingOptions};
use crate::dissipation::{DissipationModel, FtCoefficients};
use crate::error::{Error, Result};
use crate::fluid::{BarotropicEos, FluidState};
use crate::linalg::Mat2;
use crate::rankine_hugoniot::{end_states, velocity_on_locus, FluxConstants, ShockData};
use crate::real::{lit, Real};

/// R(ρ) = (ρ + p̂) U(ρ)² + p̂ − q1.
pub fn r_function<T: Real>(rho: T, q: &FluxConstants<T>, eos: &BarotropicEos<T>) -> Result<T> {
    let p = eos.pressure_of_energy(rho)?;
    let u = velocity_on_locus(rho, q);
    Ok((rho + p) * u * u + p - q.q1)
}

/// dU/dρ = −(ρ + q1)/q0² · (r − 1)^{−3/2},  r = ((ρ + q1)/q0)².
pub fn u_prime<T: Real>(rho: T, q: &FluxConstants<T>) -> T {
    let s = (rho + q.q1) / q.q0;
    let r1 = (s - T::one()) * (s + T::one());
    -(rho + q.q1) / (q.q0 * q.q0) / (r1 * r1.sqrt())
}

/// σ = (4η/3 + ζ)/(1 − c_s²) at energy density ρ.
pub fn sigma_viscous<T: Real>(rho: T, coeffs: &FtCoefficients<T>, eos: &BarotropicEos<T>) -> Result<T> {
    let theta = eos.theta_of_energy(rho)?;
    let c2 = eos.sound_speed_sq(theta);
    if !(c2 > T::zero() && c2 < T::one()) {
        return Err(Error::Superluminal { cs2: c2.as_f64(), theta: theta.as_f64() });
    }
    Ok((lit::<T>(4.0 / 3.0) * coeffs.eta + coeffs.zeta) / (T::one() - c2))
}

/// ρ′ = R(ρ) / (σ U′(ρ)).
pub fn scalar_rhs<T: Real>(
    rho: T,
    q: &FluxConstants<T>,
    coeffs: &FtCoefficients<T>,
    eos: &BarotropicEos<T>,
) -> Result<T> {
    let denom = sigma_viscous(rho, coeffs, eos)? * u_prime(rho, q);
    if denom == T::zero() || !denom.is_finite() {
        return Err(Error::SingularMatrix { psi0: f64::NAN, psi1: f64::NAN, det: denom.as_f64() });
    }
    Ok(r_function(rho, q, eos)? / denom)
}

fn state_at<T: Real>(rho: T, q: &FluxConstants<T>, eos: &BarotropicEos<T>) -> Result<FluidState<T>> {
    FluidState::from_velocity(velocity_on_locus(rho, q), eos.theta_of_energy(rho)?)
}

/// Linearization rate dρ′/dρ at an end state, by a symmetric difference of the exact right-hand side.
fn end_rate<T: Real>(
    rho: T,
    span: T,
    q: &FluxConstants<T>,
    c: &FtCoefficients<T>,
    eos: &BarotropicEos<T>,
) -> Result<T> {
    let h = span * lit(1e-6);
    Ok((scalar_rhs(rho + h, q, c, eos)? - scalar_rhs(rho - h, q, c, eos)?) / (h + h))
}

/// Viscous profile from the scalar equation, integrated from the midpoint
/// ρ(0) = (ρ⁻ + ρ⁺)/2 in both directions until within 1e−10·|ρ⁺ − ρ⁻| of the end states.
pub fn scalar_profile_ft<T: Real>(
    q: FluxConstants<T>,
    eos: &BarotropicEos<T>,
    coeffs: &FtCoefficients<T>,
    opts: &ShootingOptions<T>,
) -> Result<ProfileResult<T>> {
    if coeffs.chi != T::zero() {
        return Err(Error::InvalidCoefficients("the scalar reduction requires chi = 0".into()));
    }
    let shock = end_states(q, eos)?;
    if !shock.lax_ok {
        return Err(Error::NotLax { q0: q.q0.as_f64(), q1: q.q1.as_f64() });
    }
    scalar_profile_for(&shock, eos, coeffs, opts)
}

pub(crate) fn scalar_profile_for<T: Real>(
    shock: &ShockData<T>,
    eos: &BarotropicEos<T>,
    coeffs: &FtCoefficients<T>,
    opts: &ShootingOptions<T>,
) -> Result<ProfileResult<T>> {
    let q = shock.q;
    let model = DissipationModel::FtViscous { eta: coeffs.eta, zeta: coeffs.zeta };
    let (rm, rp) = (shock.rho_minus, shock.rho_plus);
    let span = rp - rm;
    let eps_end = span * lit(1e-10);
    let mid = (rm + rp) * lit(0.5);

    let rest = |state: FluidState<T>, rate: T| RestPointReport {
        state,
        eigenvalues: [Complex::new(rate, T::zero()), Complex::new(T::zero(), T::zero())],
        kind: if rate > T::zero() { RestPointType::Source } else { RestPointType::Sink },
        jacobian: Mat2::diag(rate, T::zero()),
    };
    let rest_points = [
        rest(shock.state_minus, end_rate(rm, span, &q, coeffs, eos)?),
        rest(shock.state_plus, end_rate(rp, span, &q, coeffs, eos)?),
    ];

    let sample = |x: T, rho: T| -> Result<ProfileSample<T>> {
        let state = state_at(rho, &q, eos)?;
        Ok(ProfileSample { x, state, rho, u1: state.velocity()[1], lyapunov: lyapunov_eval(&state, &q, eos)? })
    };
    let fail = |classification, note: String| {
        build_result(
            &model,
            shock,
            rest_points,
            classification,
            Vec::new(),
            Diagnostics {
                method: Method::Scalar,
                steps: 0,
                arclength: T::zero(),
                max_residual: T::zero(),
                max_defect: T::zero(),
                note,
            },
            opts,
        )
    };

    let r_mid = r_function(mid, &q, eos)?;
    if !(r_mid < T::zero()) {
        return Ok(fail(
            Classification::NoConnection,
            format!("R does not keep its sign between the end states (R(mid) = {r_mid})"),
        ));
    }

    let mut halves: Vec<Vec<ProfileSample<T>>> = Vec::new();
    let mut steps = 0;
    let mut max_res = T::zero();
    let mut max_f = T::zero();
    let mut max_defect = T::zero();
    for (target, dir) in [(rm, -T::one()), (rp, T::one())] {
        let mut out = vec![sample(T::zero(), mid)?];
        let mut reached = false;
        let mut escaped: Option<String> = None;
        let x_end = if dir > T::zero() { T::infinity() } else { T::neg_infinity() };
        let res = integrate(
            |_, y: &[T; 1]| scalar_rhs(y[0], &q, coeffs, eos).map(|v| [v]),
            T::zero(),
            [mid],
            x_end,
            &opts.dopri(),
            |step| {
                let rho = step.y1[0];
                if !(rho > rm.min(rp) - span && rho < rm.max(rp) + span) {
                    escaped = Some(format!("rho = {rho} left the shock interval"));
                    return Control::Stop;
                }
                let xm = (step.x0 + step.x1) * lit(0.5);
                let ym = step.dense(xm)[0];
                if let Ok(f) = scalar_rhs(ym, &q, coeffs, eos) {
                    let r = (step.dense_derivative(xm)[0] - f).abs();
                    max_res = max_res.max(r);
                    max_f = max_f.max(f.abs());
                    max_defect = max_defect.max(step.h().abs() * r / (opts.atol + opts.rtol * ym.abs()));
                }
                match sample(step.x1, rho) {
                    Ok(s) => out.push(s),
                    Err(e) => {
                        escaped = Some(e.to_string());
                        return Control::Stop;
                    }
                }
                if (rho - target).abs() < eps_end || (rho - target) * dir > T::zero() {
                    reached = true;
                    return Control::Stop;
                }
                Control::Continue
            },
        );
        match res {
            Ok(o) => steps += o.accepted,
            Err(e) => {
                let class = match e {
                    Error::SingularMatrix { .. } => Classification::SingularMatrix,
                    _ => Classification::EscapedDomain,
                };
                return Ok(fail(class, e.to_string()));
            }
        }
        if let Some(note) = escaped {
            return Ok(fail(Classification::EscapedDomain, note));
        }
        if !reached {
            return Ok(fail(Classification::NoConnection, "integration stalled before reaching the end state".into()));
        }
        halves.push(out);
    }
    let forward = halves.pop().expect("two halves");
    let mut samples = halves.pop().expect("two halves");
    samples.reverse();
    samples.extend(forward.into_iter().skip(1));
    let arclength = samples.windows(2).fold(T::zero(), |acc, w| acc + w[1].state.distance(&w[0].state));

    let mut result = build_result(
        &model,
        shock,
        rest_points,
        Classification::ConnectedMonotone,
        samples,
        Diagnostics {
            method: Method::Scalar,
            steps,
            arclength,
            max_residual: if max_f > T::zero() { max_res / max_f } else { T::zero() },
            max_defect,
            note: String::new(),
        },
        opts,
    );
    if !result.rho_is_monotone(opts.monotone_tol()) {
        result.classification = Classification::ConnectedOscillatory;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rankine_hugoniot::shock_from_strength;

    #[test]
    fn r_vanishes_at_end_states_and_is_negative_between() {
        let rad = BarotropicEos::radiation();
        let q = FluxConstants::new(10.5f64.sqrt(), 3.0).unwrap();
        let s = end_states(q, &rad).unwrap();
        assert!(r_function(s.rho_minus, &q, &rad).unwrap().abs() < 1e-12);
        assert!(r_function(s.rho_plus, &q, &rad).unwrap().abs() < 1e-12);
        let mid = 0.5 * (s.rho_minus + s.rho_plus);
        assert!(r_function(mid, &q, &rad).unwrap() < 0.0);
        let c = FtCoefficients::new(1.0, 0.0, 0.0).unwrap();
        assert!(scalar_rhs(mid, &q, &c, &rad).unwrap() > 0.0);
    }

    #[test]
    fn u_prime_matches_difference_quotient() {
        let q = FluxConstants::new(10.5f64.sqrt(), 3.0).unwrap();
        for rho in [0.9, 2.0, 5.0] {
            let h = 1e-6;
            let fd = (velocity_on_locus(rho + h, &q) - velocity_on_locus(rho - h, &q)) / (2.0 * h);
            assert!((u_prime(rho, &q) - fd).abs() < 1e-8 * fd.abs());
        }
    }

    #[test]
    fn radiation_profile_connects() {
        let rad = BarotropicEos::radiation();
        let q = shock_from_strength(3.0, 0.5, &rad).unwrap();
        let c = FtCoefficients::new(1.0, 0.0, 0.0).unwrap();
        let p = scalar_profile_ft(q, &rad, &c, &ShootingOptions::default()).unwrap();
        assert_eq!(p.classification, Classification::ConnectedMonotone);
        assert!(p.endpoint_errors[0] < 1e-8 && p.endpoint_errors[1] < 1e-8, "{:?}", p.endpoint_errors);
        assert!((p.samples[0].rho - (3.0 - 4.5f64.sqrt())).abs() < 1e-8);
        assert!(p.samples.windows(2).all(|w| w[1].x > w[0].x));
        assert!(p.samples.windows(2).all(|w| w[1].u1 < w[0].u1));
    }
}
