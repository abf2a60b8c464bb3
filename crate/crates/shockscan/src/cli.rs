//! Command-line front end; `main` only forwards the process arguments and streams.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_number, ConfigFile, GridSpec, Number, RunConfig};
use crate::{causality_line, cmd_causality, cmd_profile, cmd_rh, cmd_scan, parse_positive, AppError};

/// Rankine-Hugoniot states, dissipation profiles and parameter scans for
/// relativistic barotropic shocks.
#[derive(Parser)]
#[command(name = "shockscan", version, allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// End states of the configured shock, as JSON.
    Rh(Common),
    /// One profile; writes profile.csv and profile.json.
    Profile(Common),
    /// Sweep over the scan grids; writes scan.csv and scan_summary.json.
    Scan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grids: GridArgs,
        /// Worker threads (default: available cores).
        #[arg(long, env = "SHOCKSCAN_WORKERS")]
        workers: Option<usize>,
    },
    /// Causality class of BDN coefficients (η, μ, ν); rationals like 4/3 accepted.
    Causality {
        #[arg(value_name = "ETA")]
        eta_pos: Option<String>,
        #[arg(value_name = "MU")]
        mu_pos: Option<String>,
        #[arg(value_name = "NU")]
        nu_pos: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Default)]
struct Common {
    /// TOML run configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// radiation or power-law:K
    #[arg(long, conflicts_with = "eos_file")]
    eos: Option<String>,
    /// EOS expression file (p = c1*theta^k1 + ...).
    #[arg(long)]
    eos_file: Option<PathBuf>,
    /// ft, ft-viscous, ft-heat, bdn or eckart
    #[arg(long)]
    model: Option<String>,
    #[arg(long, value_parser = parse_number)]
    q1: Option<f64>,
    /// Shock strength s in (0, 1): 0 sonic, 1 vacuum upstream.
    #[arg(long, value_parser = parse_number, conflicts_with = "q0")]
    strength: Option<f64>,
    #[arg(long, value_parser = parse_number)]
    q0: Option<f64>,
    #[arg(long, value_parser = parse_number)]
    eta: Option<f64>,
    #[arg(long, value_parser = parse_number)]
    zeta: Option<f64>,
    #[arg(long, value_parser = parse_number)]
    chi: Option<f64>,
    #[arg(long, value_parser = parse_number)]
    mu: Option<f64>,
    #[arg(long, value_parser = parse_number)]
    nu: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot script next to the data.
    #[arg(long)]
    gnuplot: bool,
    #[arg(long)]
    tol_rtol: Option<f64>,
    #[arg(long)]
    tol_atol: Option<f64>,
    #[arg(long)]
    tol_conn: Option<f64>,
    #[arg(long)]
    tol_det: Option<f64>,
    #[arg(long)]
    tol_osc: Option<f64>,
    #[arg(long)]
    tol_spiral: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
}

/// Grids as `from:to:points` or comma lists.
#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    s_grid: Option<GridSpec>,
    #[arg(long)]
    q1_grid: Option<GridSpec>,
    #[arg(long)]
    eta_grid: Option<GridSpec>,
    #[arg(long)]
    zeta_grid: Option<GridSpec>,
    #[arg(long)]
    chi_grid: Option<GridSpec>,
    #[arg(long)]
    mu_grid: Option<GridSpec>,
    #[arg(long)]
    nu_grid: Option<GridSpec>,
}

impl Common {
    fn overrides(&self) -> ConfigFile {
        let n = |x: Option<f64>| x.map(Number::Float);
        let mut c = ConfigFile::default();
        c.eos.name = self.eos.clone();
        c.eos.file = self.eos_file.clone();
        c.model.name = self.model.clone();
        c.model.eta = n(self.eta);
        c.model.zeta = n(self.zeta);
        c.model.chi = n(self.chi);
        c.model.mu = n(self.mu);
        c.model.nu = n(self.nu);
        c.shock.q1 = n(self.q1);
        c.shock.strength = n(self.strength);
        c.shock.q0 = n(self.q0);
        c.solver.rtol = self.tol_rtol;
        c.solver.atol = self.tol_atol;
        c.solver.tol_conn = self.tol_conn;
        c.solver.tol_det = self.tol_det;
        c.solver.tol_osc = self.tol_osc;
        c.solver.tol_spiral = self.tol_spiral;
        c.solver.max_steps = self.max_steps;
        c.output.dir = self.out.clone();
        c.output.gnuplot = self.gnuplot.then_some(true);
        c
    }

    fn resolve(&self, grids: Option<&GridArgs>) -> Result<RunConfig, AppError> {
        let base = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let mut top = self.overrides();
        if let Some(g) = grids {
            top.scan.s = g.s_grid.clone();
            top.scan.q1 = g.q1_grid.clone();
            top.scan.eta = g.eta_grid.clone();
            top.scan.zeta = g.zeta_grid.clone();
            top.scan.chi = g.chi_grid.clone();
            top.scan.mu = g.mu_grid.clone();
            top.scan.nu = g.nu_grid.clone();
        }
        RunConfig::resolve(base.merge(top))
    }
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), AppError> {
    match cli.command {
        Command::Rh(common) => {
            let report = cmd_rh(&common.resolve(None)?)?;
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable"));
        }
        Command::Profile(common) => {
            let cfg = common.resolve(None)?;
            let report = cmd_profile(&cfg)?;
            let s = &report.summary;
            let _ = writeln!(
                out,
                "{} ({}): endpoint errors {:.3e} {:.3e}, {} samples -> {}",
                s.classification,
                report.model.kind(),
                s.relative_endpoint_errors[0],
                s.relative_endpoint_errors[1],
                s.samples,
                cfg.out.display()
            );
            if !s.classification.is_connected() {
                return Err(AppError::Profile(s.classification.to_string()));
            }
        }
        Command::Scan { common, grids, workers } => {
            let cfg = common.resolve(Some(&grids))?;
            let workers = match workers {
                Some(0) => return Err(AppError::Config("--workers must be positive".into())),
                Some(n) => n,
                None => std::thread::available_parallelism().map_or(1, |n| n.get()),
            };
            let start = Instant::now();
            let result = cmd_scan(&cfg, workers)?;
            for (name, n) in &result.summary.counts {
                let _ = writeln!(out, "{name:<22} {n}");
            }
            for s in result.summary.series.iter().filter(|s| s.anomalous > 0) {
                let _ = writeln!(
                    out,
                    "q1={} eta={} zeta={} chi={} mu={} nu={}: threshold s* = {}{}",
                    s.q1,
                    s.eta,
                    s.zeta,
                    s.chi,
                    s.mu,
                    s.nu,
                    s.threshold_s.map_or("-".into(), |t| format!("{t:.4}")),
                    if s.contiguous_upper { " (contiguous upper range)" } else { " (not contiguous)" }
                );
            }
            let _ = writeln!(out, "note: {}", result.summary.note);
            let _ = writeln!(
                err,
                "{} points in {:.2} s on {workers} workers",
                result.records.len(),
                start.elapsed().as_secs_f64()
            );
        }
        Command::Causality { eta_pos, mu_pos, nu_pos, common } => {
            let (eta, mu, nu) = match (eta_pos, mu_pos, nu_pos) {
                (Some(e), Some(m), Some(n)) => {
                    (parse_positive("eta", &e)?, parse_positive("mu", &m)?, parse_positive("nu", &n)?)
                }
                (None, None, None) => {
                    let c = common.resolve(None)?.coefficients;
                    (c.eta, c.mu, c.nu)
                }
                _ => return Err(AppError::Config("give all three of eta, mu, nu".into())),
            };
            let _ = writeln!(out, "{}", causality_line(&cmd_causality(eta, mu, nu)?));
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the exit code:
/// 0 success, 1 configuration error, 2 no shock, 3 profile failure.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().ansi().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return 1;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    match run(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "shockscan: {e}");
            e.exit_code() as u8
        }
    }
}

#[cfg(test)]
mod tests {
    use std::fs;
    use std::path::Path;

    struct Run {
        code: u8,
        out: String,
        err: String,
    }

    fn shockscan(args: &[&str]) -> Run {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = super::run_from(std::iter::once("shockscan").chain(args.iter().copied()), &mut out, &mut err);
        Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
    }

    fn json(path: &Path) -> serde_json::Value {
        serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
    }

    #[test]
    fn rh_radiation_example() {
        let o = shockscan(&["rh", "--q1", "3", "--strength", "0.5"]);
        assert_eq!(o.code, 0);
        let v: serde_json::Value = serde_json::from_str(&o.out).unwrap();
        let rho_minus = v["shock"]["rho_minus"].as_f64().unwrap();
        let rho_plus = v["shock"]["rho_plus"].as_f64().unwrap();
        assert!((rho_minus - (3.0 - 4.5f64.sqrt())).abs() < 1e-9);
        assert!((rho_plus - (3.0 + 4.5f64.sqrt())).abs() < 1e-9);
        assert_eq!(v["shock"]["lax"], true);
        assert!(v["shock"]["q_max"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn rh_power_law_example() {
        let o = shockscan(&["rh", "--eos", "power-law:5", "--q1", "1", "--strength", "1/2"]);
        assert_eq!(o.code, 0);
        let v: serde_json::Value = serde_json::from_str(&o.out).unwrap();
        let d = 1.5 / 2f64.sqrt();
        assert!((v["shock"]["rho_minus"].as_f64().unwrap() - (1.5 - d)).abs() < 1e-10);
        assert!((v["shock"]["rho_plus"].as_f64().unwrap() - (1.5 + d)).abs() < 1e-10);
    }

    #[test]
    fn rh_zero_strength_exits_2() {
        let o = shockscan(&["rh", "--strength", "0"]);
        assert_eq!(o.code, 2);
        assert!(!o.err.is_empty());
    }

    #[test]
    fn profile_defaults_connect_monotonically() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        let o = shockscan(&["profile", "--out", out, "--gnuplot"]);
        assert_eq!(o.code, 0, "{}", o.err);
        let v = json(&dir.path().join("profile.json"));
        assert_eq!(v["summary"]["classification"], "connected_monotone");
        let csv = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
        assert!(csv.starts_with("x,psi0,psi1,rho,u1,L\n"));
        assert!(csv.lines().count() > 10);
        assert!(dir.path().join("profile.gp").exists());
    }

    #[test]
    fn profile_failure_exits_3_with_classification() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        let o = shockscan(&[
            "profile",
            "--model",
            "bdn",
            "--eta",
            "1",
            "--mu",
            "4/3",
            "--nu",
            "8",
            "--strength",
            "0.9",
            "--out",
            out,
        ]);
        assert_eq!(o.code, 3);
        assert!(o.err.contains("no_connection"));
        assert_eq!(json(&dir.path().join("profile.json"))["summary"]["classification"], "no_connection");
    }

    #[test]
    fn bdn_with_power_law_is_config_error() {
        let o = shockscan(&["profile", "--model", "bdn", "--eos", "power-law:5"]);
        assert_eq!(o.code, 1);
    }

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(shockscan(&["profile", "--q1", "abc"]).code, 1);
        assert_eq!(shockscan(&["frobnicate"]).code, 1);
        assert_eq!(shockscan(&["rh", "--strength", "0.5", "--q0", "4"]).code, 1);
    }

    #[test]
    fn config_file_with_flag_override() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.toml");
        fs::write(&cfg, "[eos]\nfile = \"mix.eos\"\n[shock]\nq1 = 1\nstrength = 0.9\n").unwrap();
        fs::write(dir.path().join("mix.eos"), "p = theta^5\n").unwrap();
        let o = shockscan(&["rh", "--config", cfg.to_str().unwrap(), "--strength", "0.5"]);
        assert_eq!(o.code, 0, "{}", o.err);
        let v: serde_json::Value = serde_json::from_str(&o.out).unwrap();
        let d = 1.5 / 2f64.sqrt();
        assert!((v["shock"]["rho_minus"].as_f64().unwrap() - (1.5 - d)).abs() < 1e-9);
    }

    #[test]
    fn scan_ft_heat_all_monotone_and_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        let args = |out: &Path, w: &str| {
            shockscan(&[
                "scan",
                "--model",
                "ft-heat",
                "--chi",
                "0.5",
                "--s-grid",
                "0.05:0.95:10",
                "--workers",
                w,
                "--out",
                out.to_str().unwrap(),
            ])
        };
        let o = args(&a, "1");
        assert_eq!(o.code, 0, "{}", o.err);
        assert_eq!(args(&b, "4").code, 0);
        let csv_a = fs::read(a.join("scan.csv")).unwrap();
        assert_eq!(csv_a, fs::read(b.join("scan.csv")).unwrap());
        assert_eq!(fs::read(a.join("scan_summary.json")).unwrap(), fs::read(b.join("scan_summary.json")).unwrap());
        let v = json(&a.join("scan_summary.json"));
        assert_eq!(v["counts"]["connected_monotone"], 10);
        assert!(v["note"].as_str().unwrap().contains("not a proof"));
    }

    #[test]
    fn scan_reads_workers_from_env() {
        let dir = tempfile::tempdir().unwrap();
        std::env::set_var("SHOCKSCAN_WORKERS", "2");
        let o = shockscan(&["scan", "--s-grid", "0.2,0.4", "--out", dir.path().to_str().unwrap()]);
        std::env::remove_var("SHOCKSCAN_WORKERS");
        assert_eq!(o.code, 0);
        assert!(o.err.contains("2 workers"));
    }

    #[test]
    fn scan_empty_grid_exits_1() {
        let dir = tempfile::tempdir().unwrap();
        let o = shockscan(&["scan", "--s-grid", "0.1:0.9:0", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.code, 1);
    }

    #[test]
    fn causality_subcommand() {
        let o = shockscan(&["causality", "1", "4/3", "4"]);
        assert_eq!(o.code, 0);
        assert_eq!(o.out.clone().trim(), "sharply_causal (bound 4)");
        assert!((shockscan(&["causality", "1", "4/3", "2"]).out).starts_with("strictly_causal"));
        assert!((shockscan(&["causality", "1", "1", "1"]).out).starts_with("acausal"));
        assert_eq!(shockscan(&["causality", "1", "0", "1"]).code, 1);
        assert_eq!(shockscan(&["causality", "1", "-4/3", "1"]).code, 1);
    }
}
