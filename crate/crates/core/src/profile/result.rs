use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::planar::{RestPointReport, RestPointType};
use crate::dissipation::ModelKind;
use crate::fluid::FluidState;
use crate::rankine_hugoniot::{ShockData, ShockRecord};
use crate::real::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    ConnectedMonotone,
    ConnectedOscillatory,
    EscapedDomain,
    SingularMatrix,
    NoConnection,
}

impl Classification {
    pub const ALL: [Self; 5] = [
        Self::ConnectedMonotone,
        Self::ConnectedOscillatory,
        Self::EscapedDomain,
        Self::SingularMatrix,
        Self::NoConnection,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::ConnectedMonotone => "connected_monotone",
            Self::ConnectedOscillatory => "connected_oscillatory",
            Self::EscapedDomain => "escaped_domain",
            Self::SingularMatrix => "singular_matrix",
            Self::NoConnection => "no_connection",
        }
    }

    pub fn is_connected(&self) -> bool {
        matches!(self, Self::ConnectedMonotone | Self::ConnectedOscillatory)
    }

    pub fn is_failure(&self) -> bool {
        !self.is_connected()
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the orbit was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Scalar reduction ρ′ = R(ρ)/(σ U′(ρ)).
    Scalar,
    /// Backward from ψ⁺ along its stable direction.
    BackwardFromPlus,
    /// Forward from ψ⁻ along an unstable direction.
    ForwardFromMinus,
    /// Classified from the end-state spectra alone.
    NotIntegrated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample<T> {
    pub x: T,
    pub state: FluidState<T>,
    pub rho: T,
    pub u1: T,
    pub lyapunov: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics<T> {
    pub method: Method,
    pub steps: usize,
    /// Length of the computed orbit in (ψ_0, ψ_1).
    pub arclength: T,
    /// max ‖M ψ′ − F‖ at step midpoints, dense output, relative to max ‖F‖ on the orbit.
    pub max_residual: T,
    /// max |h|·‖ψ′ − M⁻¹F‖ at step midpoints in units of atol + rtol·‖ψ‖.
    pub max_defect: T,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileResult<T> {
    pub model: ModelKind,
    pub classification: Classification,
    /// Ordered by increasing x, from the ψ⁻ side to the ψ⁺ side.
    pub samples: Vec<ProfileSample<T>>,
    /// Distances of the first sample to ψ⁻ and of the last sample to ψ⁺.
    pub endpoint_errors: [T; 2],
    pub rest_points: [RestPointReport<T>; 2],
    pub shock: ShockData<T>,
    pub diagnostics: Diagnostics<T>,
}

impl<T: Real> ProfileResult<T> {
    pub fn is_connected(&self) -> bool {
        self.classification.is_connected()
    }

    /// Endpoint errors divided by the shock amplitude.
    pub fn relative_endpoint_errors(&self) -> [T; 2] {
        let a = self.shock.amplitude();
        [self.endpoint_errors[0] / a, self.endpoint_errors[1] / a]
    }

    /// True when no sample-to-sample decrease of ρ exceeds `rel_tol · |ρ⁺ − ρ⁻|`.
    pub fn rho_is_monotone(&self, rel_tol: T) -> bool {
        let tol = rel_tol * (self.shock.rho_plus - self.shock.rho_minus).abs();
        let up = self.shock.rho_plus >= self.shock.rho_minus;
        self.samples.windows(2).all(|w| {
            let d = w[1].rho - w[0].rho;
            if up {
                d >= -tol
            } else {
                d <= tol
            }
        })
    }

    /// True when every increment of L exceeds `−rel_tol · (L range)`.
    pub fn lyapunov_is_increasing(&self, rel_tol: T) -> bool {
        let (lo, hi) = self
            .samples
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), s| (lo.min(s.lyapunov), hi.max(s.lyapunov)));
        let tol = rel_tol * (hi - lo).abs();
        self.samples.windows(2).all(|w| w[1].lyapunov - w[0].lyapunov > -tol)
    }

    /// x at which ρ first crosses `level`, by linear interpolation.
    pub fn crossing(&self, level: T) -> Option<T> {
        self.samples.windows(2).find_map(|w| {
            let (a, b) = (w[0].rho - level, w[1].rho - level);
            if a == T::zero() {
                Some(w[0].x)
            } else if a * b < T::zero() {
                Some(w[0].x + (w[1].x - w[0].x) * a / (a - b))
            } else {
                None
            }
        })
    }

    /// x-extent over which ρ covers the middle 90% of its jump.
    pub fn width(&self) -> Option<T> {
        let (rm, rp) = (self.shock.rho_minus, self.shock.rho_plus);
        let lo = self.crossing(rm + (rp - rm) * lit(0.05))?;
        let hi = self.crossing(rm + (rp - rm) * lit(0.95))?;
        Some((hi - lo).abs())
    }

    /// ρ(x) by linear interpolation, clamped to the end values outside the sampled range.
    pub fn rho_at(&self, x: T) -> Option<T> {
        let first = self.samples.first()?;
        let last = self.samples.last()?;
        if x <= first.x {
            return Some(first.rho);
        }
        if x >= last.x {
            return Some(last.rho);
        }
        let i = self.samples.partition_point(|s| s.x <= x);
        let (a, b) = (&self.samples[i - 1], &self.samples[i]);
        Some(a.rho + (b.rho - a.rho) * (x - a.x) / (b.x - a.x))
    }

    /// CSV with header `x,psi0,psi1,rho,u1,L`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,psi0,psi1,rho,u1,L")?;
        for s in &self.samples {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.x.as_f64(),
                s.state.psi0.as_f64(),
                s.state.psi1.as_f64(),
                s.rho.as_f64(),
                s.u1.as_f64(),
                s.lyapunov.as_f64()
            )?;
        }
        Ok(())
    }

    pub fn summary(&self) -> ProfileSummary {
        let end = |r: &RestPointReport<T>| EndSummary {
            psi0: r.state.psi0.as_f64(),
            psi1: r.state.psi1.as_f64(),
            kind: r.kind,
            eigenvalues: r.eigenvalues.map(|l| [l.re.as_f64(), l.im.as_f64()]),
        };
        let rel = self.relative_endpoint_errors();
        ProfileSummary {
            model: self.model,
            classification: self.classification,
            method: self.diagnostics.method,
            endpoint_errors: self.endpoint_errors.map(|e| e.as_f64()),
            relative_endpoint_errors: rel.map(|e| e.as_f64()),
            minus: end(&self.rest_points[0]),
            plus: end(&self.rest_points[1]),
            samples: self.samples.len(),
            steps: self.diagnostics.steps,
            arclength: self.diagnostics.arclength.as_f64(),
            max_residual: self.diagnostics.max_residual.as_f64(),
            max_defect: self.diagnostics.max_defect.as_f64(),
            width: self.width().map(|w| w.as_f64()),
            note: self.diagnostics.note.clone(),
            shock: self.shock.record(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndSummary {
    pub psi0: f64,
    pub psi1: f64,
    #[serde(rename = "type")]
    pub kind: RestPointType,
    /// (re, im) pairs.
    pub eigenvalues: [[f64; 2]; 2],
}

/// JSON-friendly digest of a [`ProfileResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub model: ModelKind,
    pub classification: Classification,
    pub method: Method,
    pub endpoint_errors: [f64; 2],
    pub relative_endpoint_errors: [f64; 2],
    pub minus: EndSummary,
    pub plus: EndSummary,
    pub samples: usize,
    pub steps: usize,
    pub arclength: f64,
    pub max_residual: f64,
    pub max_defect: f64,
    pub width: Option<f64>,
    pub note: String,
    pub shock: ShockRecord,
}
