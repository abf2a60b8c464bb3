use thiserror::Error;

/// Errors raised by the numerical layer. Numeric payloads are carried as `f64`
/// regardless of the scalar type used for the computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state (psi0={psi0}, psi1={psi1}) is outside the domain psi0 > |psi1|")]
    OutsideDomain { psi0: f64, psi1: f64 },

    #[error("temperature {theta} outside the EOS validity interval [{min}, {max}]")]
    TemperatureOutOfRange { theta: f64, min: f64, max: f64 },

    #[error("energy density {rho} outside the EOS range [{min}, {max}]")]
    EnergyOutOfRange { rho: f64, min: f64, max: f64 },

    #[error("invalid equation of state: {0}")]
    InvalidEos(String),

    #[error("argument {value} outside [{min}, {max}] for {what}")]
    OutOfInterval { what: &'static str, value: f64, min: f64, max: f64 },

    #[error("no shock for q0={q0}, q1={q1}: need q1^2 < q0^2 < q1^2 + Q with Q={q_max}")]
    NoShock { q0: f64, q1: f64, q_max: f64 },

    #[error("root refinement failed on bracket [{lo}, {hi}] after {iterations} iterations")]
    RootNotConverged { lo: f64, hi: f64, iterations: usize },

    #[error("root not bracketed: f({lo})={f_lo}, f({hi})={f_hi}")]
    NotBracketed { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("superluminal sound speed c_s^2={cs2} at theta={theta}")]
    Superluminal { cs2: f64, theta: f64 },

    #[error("mass matrix not positive definite at state (psi0={psi0}, psi1={psi1})")]
    NotHyperbolic { psi0: f64, psi1: f64 },

    #[error("profile matrix singular at state (psi0={psi0}, psi1={psi1}), |det|={det}")]
    SingularMatrix { psi0: f64, psi1: f64, det: f64 },

    #[error("invalid dissipation coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("model {model} cannot be used with EOS {eos}")]
    IncompatibleModel { model: String, eos: String },

    #[error("end states for q0={q0}, q1={q1} do not form a Lax shock")]
    NotLax { q0: f64, q1: f64 },

    #[error("invalid strength {0}: must lie strictly inside (0, 1)")]
    InvalidStrength(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
