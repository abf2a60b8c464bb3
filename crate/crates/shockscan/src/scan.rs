//! Parameter sweeps over shock strength and dissipation coefficients.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use relshock::profile::{Method, RestPointType};
use relshock::{compute_profile, shock_from_strength, Classification};
use serde::Serialize;

use crate::config::{Coefficients, RunConfig};
use crate::AppError;

/// Grid coordinates, in the order rows are sorted by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub q1: f64,
    pub eta: f64,
    pub zeta: f64,
    pub chi: f64,
    pub mu: f64,
    pub nu: f64,
    pub s: f64,
}

impl GridPoint {
    fn coefficients(&self) -> Coefficients {
        Coefficients { eta: self.eta, zeta: self.zeta, chi: self.chi, mu: self.mu, nu: self.nu }
    }

    /// Everything except `s`.
    fn series_key(&self) -> [u64; 6] {
        [self.q1, self.eta, self.zeta, self.chi, self.mu, self.nu].map(f64::to_bits)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndInfo {
    #[serde(rename = "type")]
    pub kind: RestPointType,
    /// (re, im) pairs.
    pub eigenvalues: [[f64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRecord {
    pub index: usize,
    pub point: GridPoint,
    pub model: String,
    pub q0: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub lax: bool,
    /// `None` when the point could not be set up (the reason is in `error`).
    pub classification: Option<Classification>,
    pub method: Option<Method>,
    pub minus: Option<EndInfo>,
    pub plus: Option<EndInfo>,
    pub relative_endpoint_errors: [f64; 2],
    pub max_residual: f64,
    pub steps: usize,
    pub note: String,
    pub error: String,
    /// Not written to the CSV.
    pub wall_time_s: f64,
}

impl ScanRecord {
    /// Oscillatory, failed, or not computed.
    pub fn is_anomalous(&self) -> bool {
        self.classification != Some(Classification::ConnectedMonotone)
    }

    /// Failed classification, or not computed.
    pub fn is_failure(&self) -> bool {
        self.classification.is_none_or(|c| c.is_failure())
    }

    pub fn label(&self) -> &'static str {
        self.classification.map_or("error", |c| c.name())
    }
}

/// Lexicographic grid: q1, η, ζ, χ, μ, ν, then s fastest.
pub fn grid_points(cfg: &RunConfig) -> Vec<GridPoint> {
    let g = &cfg.grids;
    let mut pts = Vec::new();
    for &q1 in &g.q1 {
        for &eta in &g.eta {
            for &zeta in &g.zeta {
                for &chi in &g.chi {
                    for &mu in &g.mu {
                        for &nu in &g.nu {
                            for &s in &g.s {
                                pts.push(GridPoint { q1, eta, zeta, chi, mu, nu, s });
                            }
                        }
                    }
                }
            }
        }
    }
    pts
}

pub fn run_point(cfg: &RunConfig, index: usize, p: GridPoint) -> ScanRecord {
    let start = Instant::now();
    let mut rec = ScanRecord {
        index,
        point: p,
        model: cfg.model.to_string(),
        q0: f64::NAN,
        rho_minus: f64::NAN,
        rho_plus: f64::NAN,
        lax: false,
        classification: None,
        method: None,
        minus: None,
        plus: None,
        relative_endpoint_errors: [f64::NAN; 2],
        max_residual: f64::NAN,
        steps: 0,
        note: String::new(),
        error: String::new(),
        wall_time_s: 0.0,
    };
    let outcome = cfg.model.build(&p.coefficients()).and_then(|model| {
        rec.model = model.kind().to_string();
        let q = shock_from_strength(p.q1, p.s, &cfg.eos)?;
        rec.q0 = q.q0;
        compute_profile(&model, q, &cfg.eos, &cfg.solver)
    });
    match outcome {
        Ok(r) => {
            let end = |i: usize| EndInfo {
                kind: r.rest_points[i].kind,
                eigenvalues: r.rest_points[i].eigenvalues.map(|l| [l.re, l.im]),
            };
            rec.rho_minus = r.shock.rho_minus;
            rec.rho_plus = r.shock.rho_plus;
            rec.lax = r.shock.lax_ok;
            rec.classification = Some(r.classification);
            rec.method = Some(r.diagnostics.method);
            rec.minus = Some(end(0));
            rec.plus = Some(end(1));
            rec.relative_endpoint_errors = r.relative_endpoint_errors();
            rec.max_residual = r.diagnostics.max_residual;
            rec.steps = r.diagnostics.steps;
            rec.note = r.diagnostics.note.clone();
        }
        Err(e) => rec.error = e.to_string(),
    }
    rec.wall_time_s = start.elapsed().as_secs_f64();
    rec
}

/// Runs every grid point on `workers` threads; rows come back in grid order.
pub fn run_scan(cfg: &RunConfig, workers: usize) -> Result<Vec<ScanRecord>, AppError> {
    let pts = grid_points(cfg);
    if pts.is_empty() {
        return Err(AppError::Config("empty scan grid".into()));
    }
    if workers <= 1 {
        return Ok(pts.iter().enumerate().map(|(i, p)| run_point(cfg, i, *p)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| AppError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| pts.par_iter().enumerate().map(|(i, p)| run_point(cfg, i, *p)).collect()))
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn kebab<S: Serialize>(x: &S) -> String {
    serde_json::to_value(x).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

pub const CSV_HEADER: [&str; 31] = [
    "index",
    "q1",
    "eta",
    "zeta",
    "chi",
    "mu",
    "nu",
    "s",
    "model",
    "q0",
    "rho_minus",
    "rho_plus",
    "lax",
    "classification",
    "class_code",
    "method",
    "minus_type",
    "minus_re1",
    "minus_im1",
    "minus_re2",
    "minus_im2",
    "plus_type",
    "plus_re1",
    "plus_im1",
    "plus_re2",
    "plus_im2",
    "rel_err_minus",
    "rel_err_plus",
    "max_residual",
    "steps",
    "error",
];

/// Code used by the gnuplot script: 0..4 in classification order, −1 for errors.
pub fn class_code(c: Option<Classification>) -> i32 {
    c.and_then(|c| Classification::ALL.iter().position(|a| *a == c)).map_or(-1, |i| i as i32)
}

/// Writes the regime table. Floats are printed with 17 significant digits and
/// wall times are left out, so equal inputs give byte-identical files.
pub fn write_csv<W: Write>(records: &[ScanRecord], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in records {
        let p = &r.point;
        let mut row = vec![r.index.to_string()];
        row.extend([p.q1, p.eta, p.zeta, p.chi, p.mu, p.nu, p.s].map(sci));
        row.extend([r.model.clone(), sci(r.q0), sci(r.rho_minus), sci(r.rho_plus), r.lax.to_string()]);
        row.push(r.classification.map_or(String::new(), |c| c.name().to_owned()));
        row.push(class_code(r.classification).to_string());
        row.push(r.method.as_ref().map_or(String::new(), kebab));
        for end in [&r.minus, &r.plus] {
            match end {
                Some(e) => {
                    row.push(kebab(&e.kind));
                    row.extend(e.eigenvalues.iter().flatten().map(|x| sci(*x)));
                }
                None => {
                    row.push(String::new());
                    row.extend(std::iter::repeat_n(sci(f64::NAN), 4));
                }
            }
        }
        row.extend(r.relative_endpoint_errors.map(sci));
        row.push(sci(r.max_residual));
        row.push(r.steps.to_string());
        row.push(r.error.clone());
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Anomalous (non-monotone) rows along one s-series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSummary {
    pub q1: f64,
    pub eta: f64,
    pub zeta: f64,
    pub chi: f64,
    pub mu: f64,
    pub nu: f64,
    pub points: usize,
    /// Rows classified oscillatory, failed, or errored.
    pub anomalous: usize,
    pub failures: usize,
    /// Smallest s among anomalous rows.
    pub threshold_s: Option<f64>,
    /// The anomalous rows are exactly the rows with s ≥ threshold_s.
    pub contiguous_upper: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub points: usize,
    /// Counts per classification name, plus `error`.
    pub counts: BTreeMap<String, usize>,
    pub series: Vec<SeriesSummary>,
    pub note: String,
}

pub const EVIDENCE_NOTE: &str =
    "numerical evidence consistent with the existence/non-existence statements, not a proof";

pub fn summarize(records: &[ScanRecord]) -> ScanSummary {
    let mut counts: BTreeMap<String, usize> = Classification::ALL.iter().map(|c| (c.name().to_owned(), 0)).collect();
    counts.insert("error".into(), 0);
    for r in records {
        *counts.entry(r.label().to_owned()).or_default() += 1;
    }

    let mut series = Vec::new();
    for chunk in records.chunk_by(|a, b| a.point.series_key() == b.point.series_key()) {
        let p = chunk[0].point;
        let first = chunk.iter().position(ScanRecord::is_anomalous);
        let contiguous = first.is_some_and(|i| chunk[i..].iter().all(ScanRecord::is_anomalous));
        series.push(SeriesSummary {
            q1: p.q1,
            eta: p.eta,
            zeta: p.zeta,
            chi: p.chi,
            mu: p.mu,
            nu: p.nu,
            points: chunk.len(),
            anomalous: chunk.iter().filter(|r| r.is_anomalous()).count(),
            failures: chunk.iter().filter(|r| r.is_failure()).count(),
            threshold_s: first.map(|i| chunk[i].point.s),
            contiguous_upper: contiguous,
        });
    }
    ScanSummary { points: records.len(), counts, series, note: EVIDENCE_NOTE.into() }
}

/// gnuplot script plotting the class code against s from `scan.csv`.
pub fn gnuplot_script() -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str("set xlabel 's'\n");
    s.push_str("set ylabel 'classification'\n");
    s.push_str("set ytics (");
    let labels: Vec<String> = std::iter::once("'error' -1".to_owned())
        .chain(Classification::ALL.iter().enumerate().map(|(i, c)| format!("'{}' {i}", c.name())))
        .collect();
    s.push_str(&labels.join(", "));
    s.push_str(")\n");
    s.push_str("set yrange [-1.5:4.5]\n");
    s.push_str("plot 'scan.csv' using 8:15 with points pt 7\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ConfigFile, RunConfig};

    fn record(s: f64, c: Option<Classification>) -> ScanRecord {
        let cfg = RunConfig::resolve(ConfigFile::default()).unwrap();
        let mut r = run_point(&cfg, 0, GridPoint { q1: 3.0, eta: 1.0, zeta: 0.0, chi: 0.0, mu: 1.0, nu: 1.0, s });
        r.classification = c;
        r
    }

    #[test]
    fn summary_threshold_and_contiguity() {
        use Classification::*;
        let rows: Vec<_> = [
            (0.1, Some(ConnectedMonotone)),
            (0.2, Some(ConnectedMonotone)),
            (0.3, Some(ConnectedOscillatory)),
            (0.4, Some(NoConnection)),
        ]
        .into_iter()
        .map(|(s, c)| record(s, c))
        .collect();
        let sum = summarize(&rows);
        assert_eq!(sum.series.len(), 1);
        assert_eq!(sum.series[0].threshold_s, Some(0.3));
        assert!(sum.series[0].contiguous_upper);
        assert_eq!(sum.series[0].failures, 1);
        assert_eq!(sum.counts["connected_monotone"], 2);

        let mut gap = rows.clone();
        gap[3].classification = Some(ConnectedMonotone);
        let sum = summarize(&gap);
        assert_eq!(sum.series[0].threshold_s, Some(0.3));
        assert!(!sum.series[0].contiguous_upper);

        let none = summarize(&rows[..2]);
        assert_eq!(none.series[0].threshold_s, None);
        assert!(!none.series[0].contiguous_upper);
    }

    #[test]
    fn class_codes() {
        assert_eq!(class_code(Some(Classification::ConnectedMonotone)), 0);
        assert_eq!(class_code(Some(Classification::NoConnection)), 4);
        assert_eq!(class_code(None), -1);
    }

    #[test]
    fn invalid_points_become_error_rows() {
        let r = record(0.0, None);
        assert!(!r.error.is_empty());
        assert_eq!(r.label(), "error");
        let mut buf = Vec::new();
        write_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().nth(1).unwrap().contains(",-1,"));
    }
}
