//! Heteroclinic connections of the planar profile system by saddle shooting.

use serde::{Deserialize, Serialize};

use super::integrator::{integrate, Control, DopriOptions, Step};
use super::planar::{
    is_singular, lyapunov_eval, oscillation_detect, planar_rhs, profile_flux, rest_point_classify, End,
    RestPointReport, RestPointType,
};
use super::result::{Classification, Diagnostics, Method, ProfileResult, ProfileSample};
use super::scalar::scalar_profile_ft;
use crate::dissipation::DissipationModel;
use crate::error::{Error, Result};
use crate::fluid::{BarotropicEos, FluidState};
use crate::linalg::Vec2;
use crate::rankine_hugoniot::{end_states, rho_bar, FluxConstants, ShockData};
use crate::real::{lit, Real};

/// Solver tolerances. Entries marked "× amplitude" are multiplied by ‖ψ⁺ − ψ⁻‖.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShootingOptions<T> {
    pub rtol: T,
    pub atol: T,
    /// Connection radius around the target end state (× amplitude).
    pub tol_conn: T,
    /// M is singular when |det M| < tol_det · ‖M‖².
    pub tol_det: T,
    /// Eigenvalues count as complex when |Im λ| > tol_osc · |λ|.
    pub tol_osc: T,
    /// Ball for accepting a spiral approach (× amplitude).
    pub tol_spiral: T,
    /// Decreasing windings inside the spiral ball needed for acceptance.
    pub windings: usize,
    /// Arclength budget (× amplitude).
    pub arclength_budget: T,
    /// Initial offset from the saddle, × (‖ψ⁺‖ + amplitude).
    pub offset: T,
    pub max_steps: usize,
}

impl<T: Real> Default for ShootingOptions<T> {
    fn default() -> Self {
        Self {
            rtol: lit(1e-10),
            atol: lit(1e-12),
            tol_conn: lit(1e-6),
            tol_det: lit(1e-10),
            tol_osc: lit(1e-6),
            tol_spiral: lit(1e-3),
            windings: 3,
            arclength_budget: lit(1e4),
            offset: lit(1e-8),
            max_steps: 200_000,
        }
    }
}

impl<T: Real> ShootingOptions<T> {
    /// Relative tolerance on ρ decrements below which a profile still counts as monotone.
    pub fn monotone_tol(&self) -> T {
        (self.rtol * lit(10.0)).max(T::rel_tol(1e-9))
    }

    pub(crate) fn dopri(&self) -> DopriOptions<T> {
        DopriOptions { rtol: self.rtol, atol: self.atol, h_init: None, h_max: T::infinity(), max_steps: self.max_steps }
    }
}

/// Computes the profile for any model: the scalar reduction for the viscous-only
/// tensor (whose planar matrix has rank one), saddle shooting otherwise.
pub fn compute_profile<T: Real>(
    model: &DissipationModel<T>,
    q: FluxConstants<T>,
    eos: &BarotropicEos<T>,
    opts: &ShootingOptions<T>,
) -> Result<ProfileResult<T>> {
    model.validate(eos)?;
    match model {
        DissipationModel::FtViscous { .. } => {
            scalar_profile_ft(q, eos, &model.ft_coefficients().expect("ft model"), opts)
        }
        _ => {
            let shock = end_states(q, eos)?;
            shoot_heteroclinic(model, &shock, eos, opts)
        }
    }
}

/// Outcome of one integration attempt.
struct Attempt<T> {
    classification: Classification,
    /// Ordered along the integration.
    samples: Vec<ProfileSample<T>>,
    steps: usize,
    arclength: T,
    max_residual: T,
    max_defect: T,
    note: String,
}

/// Tracks the winding of the orbit around a spiral end state.
struct SpiralTracker<T> {
    center: Vec2<T>,
    radius: T,
    needed: usize,
    angle: Option<T>,
    turned: T,
    last_radius: Option<T>,
    count: usize,
}

impl<T: Real> SpiralTracker<T> {
    fn update(&mut self, p: Vec2<T>) -> bool {
        let d = p - self.center;
        let r = d.norm();
        if r > self.radius {
            self.angle = None;
            self.turned = T::zero();
            self.last_radius = None;
            self.count = 0;
            return false;
        }
        let a = d[1].atan2(d[0]);
        if let Some(prev) = self.angle {
            let mut da = a - prev;
            let pi = T::PI();
            if da > pi {
                da = da - pi - pi;
            } else if da < -pi {
                da = da + pi + pi;
            }
            self.turned = self.turned + da;
        }
        self.angle = Some(a);
        if self.turned.abs() >= T::PI() + T::PI() {
            self.turned = T::zero();
            match self.last_radius {
                Some(prev) if r < prev => self.count += 1,
                Some(_) => self.count = 0,
                None => {}
            }
            self.last_radius = Some(r);
        }
        self.count >= self.needed
    }
}

struct Shooter<'a, T> {
    model: &'a DissipationModel<T>,
    shock: &'a ShockData<T>,
    eos: &'a BarotropicEos<T>,
    opts: &'a ShootingOptions<T>,
    rho_bar: T,
    amplitude: T,
}

fn classify_error(e: &Error) -> Classification {
    match e {
        Error::SingularMatrix { .. } => Classification::SingularMatrix,
        _ => Classification::EscapedDomain,
    }
}

impl<'a, T: Real> Shooter<'a, T> {
    fn sample(&self, x: T, y: Vec2<T>) -> Result<ProfileSample<T>> {
        let state = FluidState::from_covariant(y)?;
        let theta = state.theta();
        self.eos.check_theta(theta)?;
        Ok(ProfileSample {
            x,
            state,
            rho: self.eos.energy(theta),
            u1: state.velocity()[1],
            lyapunov: lyapunov_eval(&state, &self.shock.q, self.eos)?,
        })
    }

    fn rhs(&self, y: &[T; 2]) -> Result<[T; 2]> {
        let state = FluidState::from_covariant(Vec2(*y))?;
        Ok(planar_rhs(self.model, &state, &self.shock.q, self.eos, self.opts.tol_det)?.0)
    }

    /// (‖Mψ′ − F‖, ‖F‖, step defect) at the step midpoint, where the step defect is
    /// |h|·‖ψ′ − M⁻¹F‖ in units of the integrator tolerance atol + rtol·‖ψ‖.
    fn residual(&self, step: &Step<T, 2>) -> Result<(T, T, T)> {
        let xm = (step.x0 + step.x1) * lit(0.5);
        let y = Vec2(step.dense(xm));
        let dy = Vec2(step.dense_derivative(xm));
        let state = FluidState::from_covariant(y)?;
        let m = self.model.profile_matrix(&state, self.eos)?.matrix;
        let f = profile_flux(&state, &self.shock.q, self.eos)?;
        let v = planar_rhs(self.model, &state, &self.shock.q, self.eos, self.opts.tol_det)?;
        let scale = self.opts.atol + self.opts.rtol * y.norm();
        Ok(((m.mul_vec(&dy) - f).norm(), f.norm(), step.h().abs() * (dy - v).norm() / scale))
    }

    /// Integrates from `start` in direction `dir` (±1) until one of the stopping events.
    fn run(&self, start: Vec2<T>, dir: T, target: &RestPointReport<T>) -> Attempt<T> {
        let tol_conn = self.opts.tol_conn * self.amplitude;
        let budget = self.opts.arclength_budget * self.amplitude;
        let target_y = target.state.covariant();
        let mut spiral = target.kind.is_spiral().then(|| SpiralTracker {
            center: target_y,
            radius: self.opts.tol_spiral * self.amplitude,
            needed: self.opts.windings,
            angle: None,
            turned: T::zero(),
            last_radius: None,
            count: 0,
        });
        let mut samples = Vec::new();
        match self.sample(T::zero(), start) {
            Ok(s) => samples.push(s),
            Err(e) => {
                return Attempt {
                    classification: classify_error(&e),
                    samples,
                    steps: 0,
                    arclength: T::zero(),
                    max_residual: T::zero(),
                    max_defect: T::zero(),
                    note: e.to_string(),
                }
            }
        }
        let mut verdict: Option<(Classification, String)> = None;
        let mut arclength = T::zero();
        let mut max_res = T::zero();
        let mut max_f = T::zero();
        let mut max_defect = T::zero();
        let mut det_sign: Option<bool> = None;
        let x_end = if dir > T::zero() { T::infinity() } else { T::neg_infinity() };

        let outcome = integrate(
            |_, y: &[T; 2]| self.rhs(y),
            T::zero(),
            start.0,
            x_end,
            &self.opts.dopri(),
            |step| {
                let y = Vec2(step.y1);
                let sample = match self.sample(step.x1, y) {
                    Ok(s) => s,
                    Err(e) => {
                        verdict = Some((classify_error(&e), e.to_string()));
                        return Control::Stop;
                    }
                };
                if !(sample.rho > T::zero() && sample.rho < self.rho_bar) {
                    verdict = Some((
                        Classification::EscapedDomain,
                        format!("energy density {} left (0, {})", sample.rho, self.rho_bar),
                    ));
                    return Control::Stop;
                }
                if let Ok((r, f, d)) = self.residual(step) {
                    max_res = max_res.max(r);
                    max_f = max_f.max(f);
                    max_defect = max_defect.max(d);
                }
                // a sign change of det M between steps means the orbit crossed the singular set
                if let Ok(pm) = self.model.profile_matrix(&sample.state, self.eos) {
                    let d = pm.matrix.det();
                    let pos = d > T::zero();
                    if det_sign.is_some_and(|prev| prev != pos) || is_singular(&pm.matrix, self.opts.tol_det) {
                        verdict =
                            Some((Classification::SingularMatrix, format!("det M changed sign near x={}", step.x1)));
                        return Control::Stop;
                    }
                    det_sign = Some(pos);
                }
                arclength = arclength + (Vec2(step.y1) - Vec2(step.y0)).norm();
                samples.push(sample);
                let dist = (y - target_y).norm();
                if dist < tol_conn {
                    verdict = Some((Classification::ConnectedMonotone, String::new()));
                    return Control::Stop;
                }
                if let Some(tr) = spiral.as_mut() {
                    // subsample the step so that no angle increment exceeds π
                    let n = 8;
                    for i in 1..=n {
                        let x = step.x0 + step.h() * lit(i as f64 / n as f64);
                        if tr.update(Vec2(step.dense(x))) {
                            verdict = Some((
                                Classification::ConnectedOscillatory,
                                format!("accepted after {} decreasing windings inside the spiral ball", tr.needed),
                            ));
                            return Control::Stop;
                        }
                    }
                }
                if arclength > budget {
                    verdict = Some((Classification::NoConnection, "arclength budget exhausted".into()));
                    return Control::Stop;
                }
                Control::Continue
            },
        );
        let steps;
        match outcome {
            Ok(out) => {
                steps = out.accepted;
                if verdict.is_none() {
                    verdict = Some((Classification::NoConnection, format!("integration ended: {:?}", out.termination)));
                }
            }
            Err(e) => {
                steps = samples.len().saturating_sub(1);
                verdict = Some((classify_error(&e), e.to_string()));
            }
        }
        let (classification, note) = verdict.expect("verdict set");
        let max_residual = if max_f > T::zero() { max_res / max_f } else { T::zero() };
        Attempt { classification, samples, steps, arclength, max_residual, max_defect, note }
    }
}

/// Finds the heteroclinic orbit from ψ⁻ to ψ⁺.
///
/// When ψ⁺ is a saddle the orbit is its one-dimensional stable manifold,
/// traced backward in x; when ψ⁻ is a saddle the unstable manifold of ψ⁻ is
/// traced forward. Both signs of the initial offset are tried. If neither end
/// is a saddle the spectra decide: an upstream state without unstable
/// directions, or a downstream state without stable ones, admits no orbit.
pub fn shoot_heteroclinic<T: Real>(
    model: &DissipationModel<T>,
    shock: &ShockData<T>,
    eos: &BarotropicEos<T>,
    opts: &ShootingOptions<T>,
) -> Result<ProfileResult<T>> {
    model.validate(eos)?;
    if !shock.lax_ok {
        return Err(Error::NotLax { q0: shock.q.q0.as_f64(), q1: shock.q.q1.as_f64() });
    }
    let minus = rest_point_classify(model, shock, End::Minus, eos, opts.tol_det, opts.tol_osc)?;
    let plus = rest_point_classify(model, shock, End::Plus, eos, opts.tol_det, opts.tol_osc)?;
    let shooter = Shooter { model, shock, eos, opts, rho_bar: rho_bar(shock.q.q1, eos)?, amplitude: shock.amplitude() };

    let finish = |classification: Classification, samples: Vec<ProfileSample<T>>, diagnostics: Diagnostics<T>| {
        build_result(model, shock, [minus, plus], classification, samples, diagnostics, opts)
    };
    let not_integrated = |classification, note: &str| {
        finish(
            classification,
            Vec::new(),
            Diagnostics {
                method: Method::NotIntegrated,
                steps: 0,
                arclength: T::zero(),
                max_residual: T::zero(),
                max_defect: T::zero(),
                note: note.into(),
            },
        )
    };

    let singular_end =
        |r: &RestPointReport<T>| r.kind == RestPointType::Degenerate && r.jacobian == crate::linalg::Mat2::zero();
    if singular_end(&minus) || singular_end(&plus) {
        return Ok(not_integrated(Classification::SingularMatrix, "profile matrix singular at an end state"));
    }
    if minus.kind == RestPointType::Degenerate || plus.kind == RestPointType::Degenerate {
        return Ok(not_integrated(Classification::NoConnection, "non-hyperbolic end state"));
    }

    // (origin, eigenvalue index, integration direction, target, method)
    let plan = if plus.kind == RestPointType::Saddle && minus.kind.unstable_dimension() != Some(0) {
        Some((plus, 1, -T::one(), minus, Method::BackwardFromPlus))
    } else if minus.kind == RestPointType::Saddle && plus.kind.unstable_dimension() != Some(2) {
        Some((minus, 0, T::one(), plus, Method::ForwardFromMinus))
    } else if minus.kind.unstable_dimension() == Some(2)
        && plus.kind.unstable_dimension() == Some(0)
        && !minus.kind.is_spiral()
    {
        // node to sink: leave ψ⁻ along its slow direction
        Some((minus, 1, T::one(), plus, Method::ForwardFromMinus))
    } else {
        None
    };
    let Some((origin, idx, dir, target, method)) = plan else {
        let note = format!(
            "no orbit can leave the upstream state ({:?}) and reach the downstream state ({:?})",
            minus.kind, plus.kind
        );
        return Ok(not_integrated(Classification::NoConnection, &note));
    };

    let v = origin.eigenvector(idx);
    let towards = target.state.covariant() - origin.state.covariant();
    let v = if v.dot(&towards) >= T::zero() { v } else { -v };
    let eps = opts.offset * (origin.state.contravariant().norm() + shooter.amplitude);
    let y0 = origin.state.covariant();

    let first = shooter.run(y0 + v.scale(eps), dir, &target);
    let chosen = if first.classification.is_connected() {
        first
    } else {
        let second = shooter.run(y0 - v.scale(eps), dir, &target);
        if second.classification.is_connected() {
            second
        } else {
            Attempt {
                note: format!("{}; opposite branch: {} ({})", first.note, second.classification, second.note),
                ..first
            }
        }
    };

    let mut samples = chosen.samples;
    let mut classification = chosen.classification;
    if dir < T::zero() {
        samples.reverse();
    }
    if classification.is_connected() {
        let converged_end = if method == Method::BackwardFromPlus { &minus } else { &plus };
        let spiral = oscillation_detect(converged_end, opts.tol_osc);
        let mut tmp = ProfileResult {
            model: model.kind(),
            classification,
            samples,
            endpoint_errors: [T::zero(); 2],
            rest_points: [minus, plus],
            shock: *shock,
            diagnostics: Diagnostics {
                method,
                steps: 0,
                arclength: T::zero(),
                max_residual: T::zero(),
                max_defect: T::zero(),
                note: String::new(),
            },
        };
        let monotone = tmp.rho_is_monotone(opts.monotone_tol());
        classification =
            if spiral || !monotone { Classification::ConnectedOscillatory } else { Classification::ConnectedMonotone };
        samples = std::mem::take(&mut tmp.samples);
    }
    Ok(finish(
        classification,
        samples,
        Diagnostics {
            method,
            steps: chosen.steps,
            arclength: chosen.arclength,
            max_residual: chosen.max_residual,
            max_defect: chosen.max_defect,
            note: chosen.note,
        },
    ))
}

/// Orders, centers and packages the samples.
pub(crate) fn build_result<T: Real>(
    model: &DissipationModel<T>,
    shock: &ShockData<T>,
    rest_points: [RestPointReport<T>; 2],
    classification: Classification,
    mut samples: Vec<ProfileSample<T>>,
    diagnostics: Diagnostics<T>,
    _opts: &ShootingOptions<T>,
) -> ProfileResult<T> {
    // x must increase along the samples
    if samples.len() >= 2 && samples[0].x > samples[samples.len() - 1].x {
        for s in samples.iter_mut() {
            s.x = -s.x;
        }
    }
    let endpoint_errors = match (samples.first(), samples.last()) {
        (Some(a), Some(b)) => [a.state.distance(&shock.state_minus), b.state.distance(&shock.state_plus)],
        _ => [T::infinity(); 2],
    };
    let mut result = ProfileResult {
        model: model.kind(),
        classification,
        samples,
        endpoint_errors,
        rest_points,
        shock: *shock,
        diagnostics,
    };
    let mid = (shock.rho_minus + shock.rho_plus) * lit(0.5);
    if let Some(x0) = result.crossing(mid) {
        for s in result.samples.iter_mut() {
            s.x = s.x - x0;
        }
    }
    result
}
