//! Run configuration: a TOML file with `[eos]`, `[model]`, `[shock]`,
//! `[solver]`, `[scan]` and `[output]` sections. Command-line flags are
//! merged on top, key by key.
//!
//! ```toml
//! [eos]
//! name = "radiation"          # or "power-law:5"; `file = "mix.eos"` for an expression file
//!
//! [model]
//! name = "bdn"                # ft | ft-viscous | ft-heat | bdn | eckart
//! eta = 1
//! mu = "4/3"                  # rationals may be quoted
//! nu = 4
//!
//! [shock]
//! q1 = 3
//! strength = 0.5              # or q0 = ..., not both
//!
//! [solver]
//! rtol = 1e-10
//!
//! [scan]
//! s = { from = 0.01, to = 0.99, points = 50 }
//! nu = [2, 4, 8]
//!
//! [output]
//! dir = "out"
//! gnuplot = true
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use relshock::fluid::parse_rational;
use relshock::{BdnCoefficients, DissipationModel, Eos, FtCoefficients, Options};
use serde::{Deserialize, Serialize};

use crate::AppError;

/// A number written either as a TOML number or as a string such as `"4/3"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Float(f64),
    Text(String),
}

impl Number {
    pub fn value(&self) -> Result<f64, AppError> {
        match self {
            Number::Float(x) => Ok(*x),
            Number::Text(s) => parse_number(s).map_err(AppError::Config),
        }
    }
}

impl From<f64> for Number {
    fn from(x: f64) -> Self {
        Number::Float(x)
    }
}

pub fn parse_number(s: &str) -> Result<f64, String> {
    parse_rational(s).filter(|x| x.is_finite()).ok_or_else(|| format!("not a number: {s:?}"))
}

/// One scan axis: a list, an evenly spaced range, or a single value.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Range { from: Number, to: Number, points: usize },
    List(Vec<Number>),
    Single(Number),
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>, AppError> {
        match self {
            GridSpec::Single(x) => Ok(vec![x.value()?]),
            GridSpec::List(xs) => xs.iter().map(Number::value).collect(),
            GridSpec::Range { from, to, points } => {
                let (a, b) = (from.value()?, to.value()?);
                Ok(match points {
                    0 => vec![],
                    1 => vec![a],
                    n => (0..*n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
                })
            }
        }
    }
}

impl FromStr for GridSpec {
    type Err = String;

    /// `from:to:points` or a comma-separated list.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() == 3 {
            let points = parts[2].trim().parse().map_err(|_| format!("bad point count in {s:?}"))?;
            return Ok(GridSpec::Range {
                from: Number::Float(parse_number(parts[0])?),
                to: Number::Float(parse_number(parts[1])?),
                points,
            });
        }
        if s.trim().is_empty() {
            return Ok(GridSpec::List(vec![]));
        }
        s.split(',').map(|x| parse_number(x).map(Number::Float)).collect::<Result<_, _>>().map(GridSpec::List)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EosSection {
    pub name: Option<String>,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub name: Option<String>,
    pub eta: Option<Number>,
    pub zeta: Option<Number>,
    pub chi: Option<Number>,
    pub mu: Option<Number>,
    pub nu: Option<Number>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShockSection {
    pub q1: Option<Number>,
    pub strength: Option<Number>,
    pub q0: Option<Number>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub tol_conn: Option<f64>,
    pub tol_det: Option<f64>,
    pub tol_osc: Option<f64>,
    pub tol_spiral: Option<f64>,
    pub windings: Option<usize>,
    pub arclength_budget: Option<f64>,
    pub offset: Option<f64>,
    pub max_steps: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub s: Option<GridSpec>,
    pub q1: Option<GridSpec>,
    pub eta: Option<GridSpec>,
    pub zeta: Option<GridSpec>,
    pub chi: Option<GridSpec>,
    pub mu: Option<GridSpec>,
    pub nu: Option<GridSpec>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub gnuplot: Option<bool>,
}

/// The file as written, every key optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub eos: EosSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub shock: ShockSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub output: OutputSection,
}

macro_rules! overlay {
    ($dst:expr, $src:expr; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f; } )*
    };
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, AppError> {
        toml::from_str(text).map_err(|e| AppError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        if let (Some(file), Some(dir)) = (&cfg.eos.file, path.parent()) {
            cfg.eos.file = Some(dir.join(file));
        }
        Ok(cfg)
    }

    /// Keys set in `top` replace those in `self`.
    pub fn merge(mut self, top: ConfigFile) -> Self {
        if top.eos.name.is_some() || top.eos.file.is_some() {
            self.eos = top.eos;
        }
        overlay!(self.model, top.model; name, eta, zeta, chi, mu, nu);
        if top.shock.strength.is_some() {
            self.shock.q0 = None;
        }
        if top.shock.q0.is_some() {
            self.shock.strength = None;
        }
        overlay!(self.shock, top.shock; q1, strength, q0);
        overlay!(self.solver, top.solver;
            rtol, atol, tol_conn, tol_det, tol_osc, tol_spiral, windings, arclength_budget, offset, max_steps);
        overlay!(self.scan, top.scan; s, q1, eta, zeta, chi, mu, nu);
        overlay!(self.output, top.output; dir, gnuplot);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    /// FT, viscous-only when χ = 0 and with heat conduction otherwise.
    Ft,
    FtViscous,
    FtHeat,
    Bdn,
    Eckart,
}

impl FromStr for ModelName {
    type Err = AppError;

    fn from_str(s: &str) -> Result<Self, AppError> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "ft" => Self::Ft,
            "ft-viscous" => Self::FtViscous,
            "ft-heat" => Self::FtHeat,
            "bdn" => Self::Bdn,
            "eckart" => Self::Eckart,
            other => return Err(AppError::Config(format!("unknown model {other:?}"))),
        })
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ft => "ft",
            Self::FtViscous => "ft-viscous",
            Self::FtHeat => "ft-heat",
            Self::Bdn => "bdn",
            Self::Eckart => "eckart",
        })
    }
}

/// Coefficient values at one grid point; unused ones are ignored by the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficients {
    pub eta: f64,
    pub zeta: f64,
    pub chi: f64,
    pub mu: f64,
    pub nu: f64,
}

impl ModelName {
    pub fn build(self, c: &Coefficients) -> Result<DissipationModel<f64>, relshock::Error> {
        Ok(match self {
            Self::Ft => DissipationModel::ft(FtCoefficients::new(c.eta, c.zeta, c.chi)?),
            Self::FtViscous => DissipationModel::FtViscous { eta: c.eta, zeta: c.zeta },
            Self::FtHeat => DissipationModel::FtHeat { eta: c.eta, zeta: c.zeta, chi: c.chi },
            Self::Eckart => DissipationModel::Eckart { eta: c.eta, zeta: c.zeta, chi: c.chi },
            Self::Bdn => DissipationModel::bdn(BdnCoefficients::new(c.eta, c.mu, c.nu)?),
        })
    }

    fn default_chi(self) -> f64 {
        match self {
            Self::FtHeat | Self::Eckart => 0.5,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShockForm {
    Strength(f64),
    Q0(f64),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Grids {
    pub q1: Vec<f64>,
    pub eta: Vec<f64>,
    pub zeta: Vec<f64>,
    pub chi: Vec<f64>,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub s: Vec<f64>,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub eos: Eos,
    pub model: ModelName,
    pub coefficients: Coefficients,
    pub q1: f64,
    pub shock: ShockForm,
    pub solver: Options,
    pub grids: Grids,
    pub out: PathBuf,
    pub gnuplot: bool,
}

pub const DEFAULT_S_GRID: (f64, f64, usize) = (0.01, 0.99, 50);

impl RunConfig {
    pub fn resolve(file: ConfigFile) -> Result<Self, AppError> {
        let eos = match (&file.eos.name, &file.eos.file) {
            (Some(_), Some(_)) => return Err(AppError::Config("give either eos name or eos file".into())),
            (_, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| AppError::Config(format!("cannot read {}: {e}", path.display())))?;
                Eos::from_expression(&text).map_err(|e| AppError::Config(e.to_string()))?
            }
            (Some(name), None) => Eos::from_name(name).map_err(|e| AppError::Config(e.to_string()))?,
            (None, None) => Eos::radiation(),
        };

        let m = &file.model;
        let model: ModelName = m.name.as_deref().unwrap_or("ft-viscous").parse()?;
        let num = |x: &Option<Number>, default: f64| x.as_ref().map_or(Ok(default), Number::value);
        let coefficients = Coefficients {
            eta: num(&m.eta, 1.0)?,
            zeta: num(&m.zeta, 0.0)?,
            chi: num(&m.chi, model.default_chi())?,
            mu: num(&m.mu, 4.0 / 3.0)?,
            nu: num(&m.nu, 4.0)?,
        };
        let base = model.build(&coefficients).map_err(|e| AppError::Config(e.to_string()))?;
        base.validate(&eos).map_err(|e| AppError::Config(e.to_string()))?;

        let q1 = num(&file.shock.q1, 3.0)?;
        if !(q1 > 0.0) {
            return Err(AppError::Config(format!("q1 must be positive, got {q1}")));
        }
        let shock = match (&file.shock.strength, &file.shock.q0) {
            (Some(_), Some(_)) => return Err(AppError::Config("give either strength or q0, not both".into())),
            (None, Some(q0)) => ShockForm::Q0(q0.value()?),
            (Some(s), None) => ShockForm::Strength(s.value()?),
            (None, None) => ShockForm::Strength(0.5),
        };

        let solver = solver_options(&file.solver)?;

        let sc = &file.scan;
        let axis = |g: &Option<GridSpec>, name: &str, base: f64| -> Result<Vec<f64>, AppError> {
            let mut v = match g {
                Some(g) => g.values()?,
                None => vec![base],
            };
            if v.is_empty() {
                return Err(AppError::Config(format!("scan grid {name} is empty")));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(AppError::Config(format!("scan grid {name} has non-finite entries")));
            }
            v.sort_by(f64::total_cmp);
            Ok(v)
        };
        let (a, b, n) = DEFAULT_S_GRID;
        let default_s = GridSpec::Range { from: a.into(), to: b.into(), points: n };
        let grids = Grids {
            q1: axis(&sc.q1, "q1", q1)?,
            eta: axis(&sc.eta, "eta", coefficients.eta)?,
            zeta: axis(&sc.zeta, "zeta", coefficients.zeta)?,
            chi: axis(&sc.chi, "chi", coefficients.chi)?,
            mu: axis(&sc.mu, "mu", coefficients.mu)?,
            nu: axis(&sc.nu, "nu", coefficients.nu)?,
            s: axis(&Some(sc.s.clone().unwrap_or(default_s)), "s", 0.0)?,
        };

        Ok(Self {
            eos,
            model,
            coefficients,
            q1,
            shock,
            solver,
            grids,
            out: file.output.dir.clone().unwrap_or_else(|| PathBuf::from(".")),
            gnuplot: file.output.gnuplot.unwrap_or(false),
        })
    }

    pub fn dissipation_model(&self) -> DissipationModel<f64> {
        self.model.build(&self.coefficients).expect("validated in resolve")
    }
}

fn solver_options(s: &SolverSection) -> Result<Options, AppError> {
    let mut o = Options::default();
    macro_rules! take {
        ($($f:ident),*) => { $( if let Some(v) = s.$f { o.$f = v; } )* };
    }
    take!(rtol, atol, tol_conn, tol_det, tol_osc, tol_spiral, windings, arclength_budget, offset, max_steps);
    let positive = [
        ("rtol", o.rtol),
        ("atol", o.atol),
        ("tol_conn", o.tol_conn),
        ("tol_det", o.tol_det),
        ("tol_osc", o.tol_osc),
        ("tol_spiral", o.tol_spiral),
        ("arclength_budget", o.arclength_budget),
        ("offset", o.offset),
    ];
    if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
        return Err(AppError::Config(format!("solver {name} must be positive, got {v}")));
    }
    if o.max_steps == 0 {
        return Err(AppError::Config("solver max_steps must be positive".into()));
    }
    Ok(o)
}
