//! Barotropic equations of state p = p̃(θ).
//!
//! An EOS is a finite sum of power terms `c·θ^k`. Radiation (θ⁴/3) and the
//! power-law family (θ^k) are single-term instances and get closed-form
//! inverses; general polynomials invert ρ(θ) numerically.
//!
//! Energy-side derivatives of p̂(ρ) are taken through θ with the chain rule:
//!
//! ```text
//! ρ   = θ p̃′ − p̃          dρ/dθ = θ p̃″
//! p̂′  = p̃′ / (θ p̃″)
//! p̂″  = (θ p̃″² − p̃′ p̃″ − θ p̃′ p̃‴) / (θ p̃″)³
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{lit, Real};
use crate::roots::safeguarded_newton;

/// One term `coef · θ^power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm<T> {
    pub coef: T,
    pub power: T,
}

impl<T: Real> PowerTerm<T> {
    fn derivative(&self, order: i32, theta: T) -> T {
        let mut c = self.coef;
        let mut k = self.power;
        for _ in 0..order {
            c = c * k;
            k = k - T::one();
        }
        if c == T::zero() {
            T::zero()
        } else {
            c * theta.powf(k)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarotropicEos<T> {
    terms: Vec<PowerTerm<T>>,
    theta_min: T,
    theta_max: T,
    label: String,
}

/// Sampling window used to validate EOS invariants on unbounded intervals.
const CHECK_WINDOW: (f64, f64) = (1e-3, 1e3);
const CHECK_POINTS: usize = 240;

impl<T: Real> BarotropicEos<T> {
    /// Pure radiation, p̃ = θ⁴/3.
    pub fn radiation() -> Self {
        Self {
            terms: vec![PowerTerm { coef: T::one() / lit(3.0), power: lit(4.0) }],
            theta_min: T::zero(),
            theta_max: T::infinity(),
            label: "radiation".into(),
        }
    }

    /// p̃ = θ^k. Requires k > 1 so that ρ(θ) = (k−1)θ^k is invertible; the sound
    /// speed 1/(k−1) is subluminal only for k > 2, which is checked where it matters.
    pub fn power_law(k: T) -> Result<Self> {
        if !(k > T::one()) || !k.is_finite() {
            return Err(Error::InvalidEos(format!("power-law exponent must exceed 1, got {k}")));
        }
        Ok(Self {
            terms: vec![PowerTerm { coef: T::one(), power: k }],
            theta_min: T::zero(),
            theta_max: T::infinity(),
            label: format!("power-law:{k}"),
        })
    }

    /// General sum of power terms on `[theta_min, theta_max]`, validated on a sample grid.
    pub fn polynomial(terms: Vec<PowerTerm<T>>, theta_min: T, theta_max: T) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidEos("no terms".into()));
        }
        if !(theta_min >= T::zero()) || !(theta_max > theta_min) {
            return Err(Error::InvalidEos(format!("invalid temperature interval [{theta_min}, {theta_max}]")));
        }
        let label = terms.iter().map(|t| format!("{}*theta^{}", t.coef, t.power)).collect::<Vec<_>>().join(" + ");
        let eos = Self { terms, theta_min, theta_max, label };
        eos.validate()?;
        Ok(eos)
    }

    /// Looks up `radiation` or `power-law:k`.
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim();
        if name.eq_ignore_ascii_case("radiation") {
            return Ok(Self::radiation());
        }
        if let Some(k) = name.strip_prefix("power-law:") {
            let k: f64 =
                parse_rational(k.trim()).ok_or_else(|| Error::InvalidEos(format!("bad exponent in {name:?}")))?;
            return Self::power_law(lit(k));
        }
        Err(Error::InvalidEos(format!("unknown EOS name {name:?}")))
    }

    /// Parses the expression-file format, e.g.
    ///
    /// ```text
    /// # mixture
    /// p = 1/3*theta^4 + 1/5*theta^3
    /// theta_min = 0.01
    /// theta_max = 100
    /// ```
    ///
    /// Coefficients are rationals (`a`, `a/b`, decimals allowed), exponents
    /// non-negative integers. `θ` may be written instead of `theta`.
    pub fn from_expression(text: &str) -> Result<Self> {
        let mut poly = None;
        let mut theta_min = 0.0;
        let mut theta_max = f64::INFINITY;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidEos(format!("line {}: expected `key = value`", lineno + 1)))?;
            let value = value.trim();
            match key.trim() {
                "p" | "p(theta)" | "p(θ)" => poly = Some(parse_polynomial(value)?),
                "theta_min" => {
                    theta_min = parse_rational(value)
                        .ok_or_else(|| Error::InvalidEos(format!("line {}: bad number {value:?}", lineno + 1)))?
                }
                "theta_max" => {
                    theta_max = parse_rational(value)
                        .ok_or_else(|| Error::InvalidEos(format!("line {}: bad number {value:?}", lineno + 1)))?
                }
                other => return Err(Error::InvalidEos(format!("line {}: unknown key {other:?}", lineno + 1))),
            }
        }
        let terms = poly.ok_or_else(|| Error::InvalidEos("missing `p = ...` line".into()))?;
        let terms = terms.into_iter().map(|(c, k)| PowerTerm { coef: lit(c), power: lit(k as f64) }).collect();
        Self::polynomial(terms, lit(theta_min), lit(theta_max))
    }

    fn validate(&self) -> Result<()> {
        let lo = if self.theta_min > T::zero() { self.theta_min } else { lit(CHECK_WINDOW.0) };
        let hi = if self.theta_max.is_finite() { self.theta_max } else { lit(CHECK_WINDOW.1) };
        let (llo, lhi) = (lo.ln(), hi.ln());
        for i in 0..=CHECK_POINTS {
            let t = lit::<T>(i as f64 / CHECK_POINTS as f64);
            let theta = (llo + (lhi - llo) * t).exp();
            let (p, dp, d2p) = (self.p(theta), self.dp(theta), self.d2p(theta));
            if !(p > T::zero()) || !(dp > T::zero()) {
                return Err(Error::InvalidEos(format!("need p > 0 and p' > 0, got p={p}, p'={dp} at theta={theta}")));
            }
            if !(theta * d2p > T::zero()) {
                return Err(Error::InvalidEos(format!(
                    "energy not increasing in temperature at theta={theta} (rho'={})",
                    theta * d2p
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.label
    }

    pub fn terms(&self) -> &[PowerTerm<T>] {
        &self.terms
    }

    pub fn theta_interval(&self) -> (T, T) {
        (self.theta_min, self.theta_max)
    }

    pub fn is_radiation(&self) -> bool {
        self.terms.len() == 1
            && (self.terms[0].power - lit(4.0)).abs() <= T::epsilon() * lit(4.0)
            && (self.terms[0].coef - T::one() / lit(3.0)).abs() <= T::epsilon()
    }

    /// For single-term EOS p̂(ρ) = ρ/(k−1); returns the slope 1/(k−1).
    pub fn linear_slope(&self) -> Option<T> {
        match self.terms.as_slice() {
            [t] => Some(T::one() / (t.power - T::one())),
            _ => None,
        }
    }

    fn sum(&self, order: i32, theta: T) -> T {
        self.terms.iter().fold(T::zero(), |acc, t| acc + t.derivative(order, theta))
    }

    /// p̃(θ)
    pub fn p(&self, theta: T) -> T {
        self.sum(0, theta)
    }

    /// p̃′(θ)
    pub fn dp(&self, theta: T) -> T {
        self.sum(1, theta)
    }

    /// p̃″(θ)
    pub fn d2p(&self, theta: T) -> T {
        self.sum(2, theta)
    }

    /// p̃‴(θ)
    pub fn d3p(&self, theta: T) -> T {
        self.sum(3, theta)
    }

    pub fn check_theta(&self, theta: T) -> Result<()> {
        if theta > self.theta_min.max(T::zero()) && theta <= self.theta_max && theta.is_finite()
            || theta == self.theta_min && theta > T::zero()
        {
            Ok(())
        } else {
            Err(Error::TemperatureOutOfRange {
                theta: theta.as_f64(),
                min: self.theta_min.as_f64(),
                max: self.theta_max.as_f64(),
            })
        }
    }

    /// ρ(θ) = θ p̃′ − p̃, unchecked.
    pub fn energy(&self, theta: T) -> T {
        match self.terms.as_slice() {
            [t] => t.coef * (t.power - T::one()) * theta.powf(t.power),
            _ => theta * self.dp(theta) - self.p(theta),
        }
    }

    /// c_s² = p̃′ / (θ p̃″), unchecked.
    pub fn sound_speed_sq(&self, theta: T) -> T {
        match self.linear_slope() {
            Some(k) => k,
            None => self.dp(theta) / (theta * self.d2p(theta)),
        }
    }

    /// (ρ, p, c_s²) at temperature θ.
    pub fn energy_pressure(&self, theta: T) -> Result<(T, T, T)> {
        self.check_theta(theta)?;
        Ok((self.energy(theta), self.p(theta), self.sound_speed_sq(theta)))
    }

    /// Range of energy densities covered by the validity interval.
    pub fn energy_range(&self) -> (T, T) {
        let lo = if self.theta_min > T::zero() { self.energy(self.theta_min) } else { T::zero() };
        let hi = if self.theta_max.is_finite() { self.energy(self.theta_max) } else { T::infinity() };
        (lo, hi)
    }

    /// Inverse of ρ(θ).
    pub fn theta_of_energy(&self, rho: T) -> Result<T> {
        let (rmin, rmax) = self.energy_range();
        if !(rho > rmin || (rho == rmin && rmin > T::zero())) || !(rho <= rmax) {
            return Err(Error::EnergyOutOfRange { rho: rho.as_f64(), min: rmin.as_f64(), max: rmax.as_f64() });
        }
        if let [t] = self.terms.as_slice() {
            return Ok((rho / (t.coef * (t.power - T::one()))).powf(T::one() / t.power));
        }
        // grow a bracket geometrically from θ = 1, clipped to the validity interval
        let two = lit::<T>(2.0);
        let start = T::one().max(self.theta_min).min(self.theta_max);
        let (mut lo, mut hi) = (start, start);
        while self.energy(lo) > rho {
            lo = (lo / two).max(self.theta_min);
            if lo == self.theta_min {
                break;
            }
        }
        while self.energy(hi) < rho {
            hi = (hi * two).min(self.theta_max);
            if hi == self.theta_max {
                break;
            }
        }
        let lo = if lo > T::zero() { lo } else { T::min_positive_value() };
        safeguarded_newton(|th| (self.energy(th) - rho, th * self.d2p(th)), lo, hi, T::rel_tol(1e-14), T::zero())
    }

    /// p̂(ρ)
    pub fn pressure_of_energy(&self, rho: T) -> Result<T> {
        if let Some(k) = self.linear_slope() {
            return Ok(rho * k);
        }
        Ok(self.p(self.theta_of_energy(rho)?))
    }

    /// (p̂, p̂′, p̂″) at energy density ρ.
    pub fn pressure_derivatives(&self, rho: T) -> Result<(T, T, T)> {
        if let Some(k) = self.linear_slope() {
            return Ok((rho * k, k, T::zero()));
        }
        let theta = self.theta_of_energy(rho)?;
        Ok(self.pressure_derivatives_at_theta(theta))
    }

    /// (p̂, p̂′, p̂″) expressed through the temperature.
    pub fn pressure_derivatives_at_theta(&self, theta: T) -> (T, T, T) {
        let (p, d1, d2, d3) = (self.p(theta), self.dp(theta), self.d2p(theta), self.d3p(theta));
        let rho_theta = theta * d2;
        let second = (theta * d2 * d2 - d1 * d2 - theta * d1 * d3) / rho_theta.powi(3);
        (p, d1 / rho_theta, second)
    }

    /// (ρ + p̂) p̂″ + 2 (1 − p̂′) p̂′; positive where the acoustic mode is genuinely nonlinear.
    pub fn gnl_indicator(&self, rho: T) -> Result<T> {
        let (p, dp, d2p) = self.pressure_derivatives(rho)?;
        Ok((rho + p) * d2p + lit::<T>(2.0) * (T::one() - dp) * dp)
    }

    /// True when 0 < c_s² < 1 at θ.
    pub fn is_subluminal(&self, theta: T) -> bool {
        let c2 = self.sound_speed_sq(theta);
        c2 > T::zero() && c2 < T::one()
    }
}

impl<T: Real> fmt::Display for BarotropicEos<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// `a`, `a/b`, or a decimal.
pub fn parse_rational(s: &str) -> Option<f64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().ok()?;
            let d: f64 = d.trim().parse().ok()?;
            if d == 0.0 {
                None
            } else {
                Some(n / d)
            }
        }
        None => s.parse().ok(),
    }
}

/// Parses `c1*theta^k1 + c2*theta^k2 - ...` into (coefficient, exponent) pairs.
fn parse_polynomial(expr: &str) -> Result<Vec<(f64, u32)>> {
    let bad = |msg: String| Error::InvalidEos(format!("{msg} in {expr:?}"));
    let normalized = expr.replace('θ', "theta").replace(' ', "");
    if normalized.is_empty() {
        return Err(bad("empty polynomial".into()));
    }
    // split into signed terms
    let mut terms = Vec::new();
    let mut current = String::new();
    for (i, ch) in normalized.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !current.ends_with(['e', 'E']) {
            terms.push(std::mem::take(&mut current));
        }
        current.push(ch);
    }
    terms.push(current);

    let mut out = Vec::new();
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-1.0, rest),
            None => (1.0, term.strip_prefix('+').unwrap_or(&term)),
        };
        if body.is_empty() {
            return Err(bad("dangling sign".into()));
        }
        let (coef, power) = match body.find("theta") {
            None => (parse_rational(body).ok_or_else(|| bad(format!("bad term {body:?}")))?, 0),
            Some(pos) => {
                let coef_part = body[..pos].trim_end_matches('*');
                let coef = if coef_part.is_empty() {
                    1.0
                } else {
                    parse_rational(coef_part).ok_or_else(|| bad(format!("bad coefficient {coef_part:?}")))?
                };
                let rest = &body[pos + "theta".len()..];
                let power = if rest.is_empty() {
                    1
                } else {
                    let digits =
                        rest.strip_prefix('^').ok_or_else(|| bad(format!("expected ^ after theta in {body:?}")))?;
                    digits.parse::<u32>().map_err(|_| bad(format!("bad exponent {digits:?}")))?
                };
                (coef, power)
            }
        };
        out.push((sign * coef, power));
    }
    Ok(out)
}
