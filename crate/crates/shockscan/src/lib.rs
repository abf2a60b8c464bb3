//! Library side of the `shockscan` command: configuration, the four
//! subcommands and the parameter scan.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod scan;

use std::fs;
use std::path::Path;

use relshock::fluid::parse_rational;
use relshock::profile::ProfileSummary;
use relshock::rankine_hugoniot::ShockRecord;
use relshock::{
    bdn_causality_class, compute_profile, end_states, shock_from_strength, BdnCausality, BdnCoefficients,
    DissipationModel, Error, Flux,
};
use serde::Serialize;

use config::{RunConfig, ShockForm};
use scan::{ScanRecord, ScanSummary};

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("config error: {0}")]
    Config(String),
    #[error("no shock: {0}")]
    NoShock(String),
    #[error("profile failure: {0}")]
    Profile(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) | AppError::Io(_) => 1,
            AppError::NoShock(_) => 2,
            AppError::Profile(_) => 3,
        }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        AppError::Io(format!("{}: {e}", path.display()))
    }
}

/// Sorts a core error into config / no-shock / profile failure.
fn from_core(e: Error) -> AppError {
    match e {
        Error::InvalidEos(_) | Error::InvalidCoefficients(_) | Error::IncompatibleModel { .. } => {
            AppError::Config(e.to_string())
        }
        Error::NoShock { .. } | Error::NotLax { .. } | Error::InvalidStrength(_) => AppError::NoShock(e.to_string()),
        _ => AppError::Profile(e.to_string()),
    }
}

/// Flux constants for the configured shock.
pub fn flux_constants(cfg: &RunConfig) -> Result<Flux, AppError> {
    let q = match cfg.shock {
        ShockForm::Strength(s) => shock_from_strength(cfg.q1, s, &cfg.eos),
        ShockForm::Q0(q0) => Flux::new(q0, cfg.q1),
    };
    q.map_err(|e| match from_core(e) {
        AppError::Profile(m) => AppError::NoShock(m),
        other => other,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RhReport {
    pub eos: String,
    pub shock_form: ShockForm,
    pub shock: ShockRecord,
}

pub fn cmd_rh(cfg: &RunConfig) -> Result<RhReport, AppError> {
    let q = flux_constants(cfg)?;
    let shock = end_states(q, &cfg.eos).map_err(|e| AppError::NoShock(e.to_string()))?;
    if !shock.lax_ok {
        return Err(AppError::NoShock(format!("end states for q = ({}, {}) violate the Lax pattern", q.q0, q.q1)));
    }
    Ok(RhReport { eos: cfg.eos.name().to_owned(), shock_form: cfg.shock, shock: shock.record() })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileReport {
    pub eos: String,
    pub model: DissipationModel<f64>,
    pub shock_form: ShockForm,
    pub summary: ProfileSummary,
}

/// Computes one profile and writes `profile.csv` and `profile.json` into the
/// output directory. A non-connected classification is returned as `Ok`; the
/// caller decides the exit status.
pub fn cmd_profile(cfg: &RunConfig) -> Result<ProfileReport, AppError> {
    let q = flux_constants(cfg)?;
    let model = cfg.dissipation_model();
    let result = compute_profile(&model, q, &cfg.eos, &cfg.solver).map_err(from_core)?;
    let report =
        ProfileReport { eos: cfg.eos.name().to_owned(), model, shock_form: cfg.shock, summary: result.summary() };

    fs::create_dir_all(&cfg.out).map_err(|e| AppError::io(&cfg.out, e))?;
    let csv_path = cfg.out.join("profile.csv");
    let file = fs::File::create(&csv_path).map_err(|e| AppError::io(&csv_path, e))?;
    result.write_csv(std::io::BufWriter::new(file)).map_err(|e| AppError::io(&csv_path, e))?;
    write_json(&cfg.out.join("profile.json"), &report)?;
    if cfg.gnuplot {
        write_text(&cfg.out.join("profile.gp"), PROFILE_GNUPLOT)?;
    }
    Ok(report)
}

const PROFILE_GNUPLOT: &str = "set datafile separator ','\n\
set key autotitle columnhead\n\
set xlabel 'x'\n\
set ylabel 'rho'\n\
plot 'profile.csv' using 1:4 with lines\n";

#[derive(Debug, Clone)]
pub struct ScanOutput {
    pub records: Vec<ScanRecord>,
    pub summary: ScanSummary,
}

/// Runs the scan and writes `scan.csv` and `scan_summary.json`.
pub fn cmd_scan(cfg: &RunConfig, workers: usize) -> Result<ScanOutput, AppError> {
    let records = scan::run_scan(cfg, workers)?;
    let summary = scan::summarize(&records);
    fs::create_dir_all(&cfg.out).map_err(|e| AppError::io(&cfg.out, e))?;
    let csv_path = cfg.out.join("scan.csv");
    let file = fs::File::create(&csv_path).map_err(|e| AppError::io(&csv_path, e))?;
    scan::write_csv(&records, std::io::BufWriter::new(file)).map_err(|e| AppError::io(&csv_path, e))?;
    write_json(&cfg.out.join("scan_summary.json"), &summary)?;
    if cfg.gnuplot {
        write_text(&cfg.out.join("scan.gp"), &scan::gnuplot_script())?;
    }
    Ok(ScanOutput { records, summary })
}

pub fn parse_positive(name: &str, text: &str) -> Result<f64, AppError> {
    match parse_rational(text) {
        Some(x) if x > 0.0 && x.is_finite() => Ok(x),
        Some(x) => Err(AppError::Config(format!("{name} must be positive, got {x}"))),
        None => Err(AppError::Config(format!("{name}: not a number: {text:?}"))),
    }
}

pub fn cmd_causality(eta: f64, mu: f64, nu: f64) -> Result<BdnCausality<f64>, AppError> {
    let c = BdnCoefficients::new(eta, mu, nu).map_err(|e| AppError::Config(e.to_string()))?;
    Ok(bdn_causality_class(&c))
}

/// `sharply_causal (bound 4)`
pub fn causality_line(c: &BdnCausality<f64>) -> String {
    format!("{} (bound {})", c.class, c.bound)
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<(), AppError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| AppError::io(path, e))?;
    text.push('\n');
    write_text(path, &text)
}

fn write_text(path: &Path, text: &str) -> Result<(), AppError> {
    fs::write(path, text).map_err(|e| AppError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use config::ConfigFile;

    fn cfg(text: &str) -> RunConfig {
        RunConfig::resolve(ConfigFile::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn rh_power_law_example() {
        let r = cmd_rh(&cfg("[eos]\nname = \"power-law:5\"\n[shock]\nq1 = 1\nstrength = 0.5")).unwrap();
        let d = 1.5 / 2f64.sqrt();
        assert!((r.shock.rho_minus - (1.5 - d)).abs() < 1e-10);
        assert!((r.shock.rho_plus - (1.5 + d)).abs() < 1e-10);
        assert!(r.shock.lax);
    }

    #[test]
    fn rh_boundary_strength_is_no_shock() {
        for s in ["0", "1", "1.5"] {
            let e = cmd_rh(&cfg(&format!("[shock]\nstrength = {s}"))).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{s}: {e}");
        }
    }

    #[test]
    fn causality_lines() {
        let line = |e, m, n| causality_line(&cmd_causality(e, m, n).unwrap());
        assert_eq!(line(1.0, 4.0 / 3.0, 4.0), "sharply_causal (bound 4)");
        assert!(line(1.0, 4.0 / 3.0, 2.0).starts_with("strictly_causal"));
        assert!(line(1.0, 1.0, 1.0).starts_with("acausal"));
        assert_eq!(cmd_causality(0.0, 1.0, 1.0).unwrap_err().exit_code(), 1);
        assert_eq!(parse_positive("nu", "-1").unwrap_err().exit_code(), 1);
        assert_eq!(parse_positive("mu", "4/3").unwrap(), 4.0 / 3.0);
    }
}
