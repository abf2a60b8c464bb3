//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relshock::dissipation::{
    bdn_causality_class, profile_matrix_bdn, profile_matrix_ft, velocity_gradient, BdnCoefficients, CausalityClass,
    DissipationModel, FtCoefficients,
};
use relshock::fluid::{BarotropicEos, FluidState, PowerTerm};
use relshock::linalg::{Mat2, Vec2};
use relshock::profile::{
    compute_profile, lyapunov_eval, lyapunov_gradient, planar_rhs, profile_flux, rest_point_classify,
    scalar_profile_ft, Classification, End, ShootingOptions,
};
use relshock::rankine_hugoniot::{
    char_speeds, end_states, g_derivatives, g_eval, rho_bar, shock_from_strength, ShockData,
};
use shockscan::config::{ConfigFile, RunConfig};
use shockscan::scan::{run_scan, summarize, write_csv, ScanRecord};

struct Outcome {
    rows: Vec<(bool, String, String)>,
}

impl Outcome {
    fn report(&mut self, name: &str, pass: bool, detail: String) {
        println!("{} | {name} | {detail}", if pass { "PASS" } else { "FAIL" });
        self.rows.push((pass, name.into(), detail));
    }
}

const Q1S: [f64; 3] = [0.5, 3.0, 10.0];

fn strengths() -> Vec<f64> {
    (1..=19).map(|i| i as f64 * 0.05).collect()
}

fn eos_columns() -> Vec<BarotropicEos<f64>> {
    vec![BarotropicEos::radiation(), BarotropicEos::power_law(5.0).unwrap()]
}

/// (v ± c)/(1 ± v c) from the state's velocity and sound speed.
fn addition_speeds(s: &FluidState<f64>, eos: &BarotropicEos<f64>) -> (f64, f64) {
    let u = s.velocity();
    let v = u[1] / u[0];
    let c = eos.sound_speed_sq(s.theta()).sqrt();
    ((v - c) / (1.0 - v * c), (v + c) / (1.0 + v * c))
}

fn lax_pattern_holds(shock: &ShockData<f64>, eos: &BarotropicEos<f64>) -> bool {
    let (a, b) = addition_speeds(&shock.state_minus, eos);
    let (c, d) = addition_speeds(&shock.state_plus, eos);
    a > 0.0 && b > 0.0 && c < 0.0 && d > 0.0
}

fn fd_jacobian(f: impl Fn([f64; 2]) -> [f64; 2], y: [f64; 2], h: f64) -> Mat2<f64> {
    let mut j = Mat2::zero();
    for k in 0..2 {
        let (mut yp, mut ym) = (y, y);
        yp[k] += h;
        ym[k] -= h;
        let (fp, fm) = (f(yp), f(ym));
        for i in 0..2 {
            j[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    j
}

/// Hessian of L at a state, differencing F = ∇L.
fn hessian(state: &FluidState<f64>, shock: &ShockData<f64>, eos: &BarotropicEos<f64>) -> Mat2<f64> {
    let y = state.covariant();
    let f = |y: [f64; 2]| profile_flux(&FluidState::from_covariant(Vec2(y)).unwrap(), &shock.q, eos).unwrap().0;
    let h = fd_jacobian(f, y.0, 1e-6 * y.norm());
    let off = 0.5 * (h[(0, 1)] + h[(1, 0)]);
    let mut sym = h;
    sym[(0, 1)] = off;
    sym[(1, 0)] = off;
    sym
}

fn scalar_ft_suite(out: &mut Outcome, shocks: &mut Vec<(ShockData<f64>, BarotropicEos<f64>)>) {
    let opts = ShootingOptions::<f64>::default();
    let c = FtCoefficients::new(1.0, 0.0, 0.0).unwrap();
    let (mut runs, mut bad) = (0, Vec::new());
    let mut worst_err = 0.0f64;
    for eos in eos_columns() {
        for q1 in Q1S {
            for s in strengths() {
                runs += 1;
                let q = shock_from_strength(q1, s, &eos).unwrap();
                let p = match scalar_profile_ft(q, &eos, &c, &opts) {
                    Ok(p) => p,
                    Err(e) => {
                        bad.push(format!("{} q1={q1} s={s:.2}: {e}", eos.name()));
                        continue;
                    }
                };
                let err = p.relative_endpoint_errors().into_iter().fold(0.0, f64::max);
                worst_err = worst_err.max(err);
                let strict = p.samples.windows(2).all(|w| w[1].rho > w[0].rho);
                if p.classification != Classification::ConnectedMonotone || err >= 1e-6 || !strict {
                    bad.push(format!(
                        "{} q1={q1} s={s:.2}: {} err={err:.1e} strict={strict}",
                        eos.name(),
                        p.classification
                    ));
                }
                shocks.push((p.shock, eos.clone()));
            }
        }
    }
    out.report(
        "Scalar FT profiles (chi = 0) connect monotonically",
        bad.is_empty(),
        format!("{runs} runs, {} bad, worst endpoint error {worst_err:.1e}{}", bad.len(), first(&bad)),
    );
}

fn heat_conduction_suite(out: &mut Outcome, shocks: &mut Vec<(ShockData<f64>, BarotropicEos<f64>)>) {
    let opts = ShootingOptions::<f64>::default();
    let (mut runs, mut bad) = (0, Vec::new());
    for eos in eos_columns() {
        for chi in [0.1, 0.5, 1.0] {
            let model = DissipationModel::ft(FtCoefficients::new(1.0, 0.0, chi).unwrap());
            for q1 in Q1S {
                for s in strengths() {
                    runs += 1;
                    let tag = format!("{} chi={chi} q1={q1} s={s:.2}", eos.name());
                    let q = shock_from_strength(q1, s, &eos).unwrap();
                    let p = match compute_profile(&model, q, &eos, &opts) {
                        Ok(p) => p,
                        Err(e) => {
                            bad.push(format!("{tag}: {e}"));
                            continue;
                        }
                    };
                    let l: Vec<f64> = p.samples.iter().map(|x| lyapunov_eval(&x.state, &q, &eos).unwrap()).collect();
                    let scale = l.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    let increasing = l.windows(2).all(|w| w[1] - w[0] > -1e-12 * scale) && l[l.len() - 1] > l[0];
                    let hm = hessian(&p.shock.state_minus, &p.shock, &eos);
                    let hp = hessian(&p.shock.state_plus, &p.shock, &eos);
                    let pd = hm[(0, 0)] > 0.0 && hm.det() > 0.0;
                    let saddle = hp.det() < 0.0;
                    if p.classification != Classification::ConnectedMonotone || !increasing || !pd || !saddle {
                        bad.push(format!(
                            "{tag}: {} L-increasing={increasing} H-(pd)={pd} detH+<0={saddle}",
                            p.classification
                        ));
                    }
                    shocks.push((p.shock, eos.clone()));
                }
            }
        }
    }
    out.report(
        "FT profiles with heat conduction connect monotonically",
        bad.is_empty(),
        format!("{runs} runs, {} bad{}", bad.len(), first(&bad)),
    );
}

fn consistency(out: &mut Outcome) {
    let eos = BarotropicEos::<f64>::radiation();
    let opts = ShootingOptions::<f64>::default();
    let q = shock_from_strength(3.0, 0.5, &eos).unwrap();
    let scalar = scalar_profile_ft(q, &eos, &FtCoefficients::new(1.0, 0.0, 0.0).unwrap(), &opts).unwrap();
    let planar =
        compute_profile(&DissipationModel::ft(FtCoefficients::new(1.0, 0.0, 1e-3).unwrap()), q, &eos, &opts).unwrap();
    let sup = scalar
        .samples
        .iter()
        .chain(planar.samples.iter())
        .map(|s| (scalar.rho_at(s.x).unwrap() - planar.rho_at(s.x).unwrap()).abs())
        .fold(0.0, f64::max);
    out.report(
        "Consistency oracle (chi=1e-3 vs scalar)",
        planar.is_connected() && sup < 1e-2,
        format!("{}, sup |rho_planar - rho_scalar| = {sup:.2e}", planar.classification),
    );
}

fn random_eos(rng: &mut ChaCha8Rng) -> BarotropicEos<f64> {
    match rng.gen_range(0..3) {
        0 => BarotropicEos::radiation(),
        1 => BarotropicEos::power_law(rng.gen_range(2.2..8.0)).unwrap(),
        _ => BarotropicEos::polynomial(
            vec![
                PowerTerm { coef: rng.gen_range(0.1..1.0), power: 4.0 },
                PowerTerm { coef: rng.gen_range(0.05..1.0), power: rng.gen_range(2.3..6.0) },
            ],
            0.0,
            f64::INFINITY,
        )
        .unwrap(),
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a) > 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if (f(m) > 0.0) == fa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn hugoniot_root_oracle(out: &mut Outcome, shocks: &mut Vec<(ShockData<f64>, BarotropicEos<f64>)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    for case in 0..200 {
        let eos = random_eos(&mut rng);
        let q1 = 10f64.powf(rng.gen_range(-1.0..1.5));
        let s = rng.gen_range(0.02..0.98);
        let tag = format!("case {case} {} q1={q1:.3} s={s:.3}", eos.name());
        let shock = match shock_from_strength(q1, s, &eos).and_then(|q| end_states(q, &eos)) {
            Ok(x) => x,
            Err(e) => {
                bad.push(format!("{tag}: {e}"));
                continue;
            }
        };
        let d = shock.q.q0 * shock.q.q0 - q1 * q1;
        let top = rho_bar(q1, &eos).unwrap();
        let h = |rho: f64| g_eval(rho, q1, &eos).unwrap() - d;
        let n = 10_000;
        let grid: Vec<f64> = (0..=n).map(|i| top * i as f64 / n as f64).collect();
        let crossings: Vec<_> = grid.windows(2).filter(|w| (h(w[0]) > 0.0) != (h(w[1]) > 0.0)).collect();
        if crossings.len() != 2 {
            bad.push(format!("{tag}: {} crossings", crossings.len()));
            continue;
        }
        let lo = bisect(h, crossings[0][0], crossings[0][1]);
        let hi = bisect(h, crossings[1][0], crossings[1][1]);
        let dev = (lo - shock.rho_minus).abs().max((hi - shock.rho_plus).abs()) / top;
        worst = worst.max(dev);
        let concave = eos.gnl_indicator(shock.rho_star).unwrap() <= 0.0
            || g_derivatives(shock.rho_star, q1, &eos).unwrap().1 < 0.0;
        if dev >= 1e-8 || !concave {
            bad.push(format!("{tag}: deviation {dev:.1e}, g'' < 0: {concave}"));
        }
        shocks.push((shock, eos));
    }
    out.report(
        "Hugoniot roots (count and location)",
        bad.is_empty(),
        format!("200 random cases, {} bad, worst relative deviation {worst:.1e}{}", bad.len(), first(&bad)),
    );
}

fn char_speed_oracle(out: &mut Outcome, shocks: &[(ShockData<f64>, BarotropicEos<f64>)]) {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let eos = if rng.gen_bool(0.5) {
            BarotropicEos::radiation()
        } else {
            BarotropicEos::power_law(rng.gen_range(2.2..9.0)).unwrap()
        };
        let v: f64 = rng.gen_range(-0.95..0.95);
        let theta = rng.gen_range(0.1..10.0);
        let s = FluidState::from_velocity(v / (1.0 - v * v).sqrt(), theta).unwrap();
        let (a, b) = char_speeds(&s, &eos).unwrap();
        let (oa, ob) = addition_speeds(&s, &eos);
        worst = worst.max((a - oa).abs()).max((b - ob).abs());
    }
    let lax_bad = shocks.iter().filter(|(sh, eos)| !lax_pattern_holds(sh, eos)).count();
    out.report(
        "Characteristic-speed oracle",
        worst < 1e-8 && lax_bad == 0,
        format!(
            "100 random states, max |speed - velocity addition| = {worst:.1e}; Lax pattern fails at {lax_bad} of {} shocks",
            shocks.len()
        ),
    );
}

fn bdn_scan(nu: &str) -> Vec<ScanRecord> {
    let text = format!("[model]\nname = \"bdn\"\neta = 1\nmu = \"4/3\"\nnu = {nu}\n[shock]\nq1 = 3\n");
    let cfg = RunConfig::resolve(ConfigFile::parse(&text).unwrap()).unwrap();
    assert_eq!(cfg.grids.s.len(), 50);
    run_scan(&cfg, 1).unwrap()
}

fn counts(records: &[ScanRecord]) -> String {
    let mut m: BTreeMap<&str, usize> = BTreeMap::new();
    for r in records {
        *m.entry(r.label()).or_default() += 1;
    }
    m.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

fn bdn_sharply_causal_scan(out: &mut Outcome) {
    let c = bdn_causality_class(&BdnCoefficients::new(1.0, 4.0 / 3.0, 4.0).unwrap());
    let records = bdn_scan("4");
    let sum = summarize(&records);
    let series = &sum.series[0];
    let pass =
        c.class == CausalityClass::SharplyCausal && c.bound == 4.0 && series.anomalous > 0 && series.contiguous_upper;
    out.report(
        "BDN (1, 4/3, 4) oscillatory or failed profiles at large s",
        pass,
        format!(
            "bound = {}, {}; threshold s* = {:?}, contiguous upper range: {}; {}",
            c.bound,
            counts(&records),
            series.threshold_s,
            series.contiguous_upper,
            sum.note
        ),
    );
}

fn bdn_strictly_causal_scan(out: &mut Outcome) {
    let c = bdn_causality_class(&BdnCoefficients::new(1.0, 4.0 / 3.0, 2.0).unwrap());
    let records = bdn_scan("2");
    let failures: Vec<f64> = records.iter().filter(|r| r.is_failure()).map(|r| r.point.s).collect();
    out.report(
        "BDN (1, 4/3, 2) Lax shocks without profile",
        c.class == CausalityClass::StrictlyCausal && !failures.is_empty(),
        format!("{}, {}; failure set {:?}", c.class, counts(&records), failures),
    );
    let wide = bdn_scan("8");
    let lost: Vec<f64> = wide.iter().filter(|r| r.is_failure()).map(|r| r.point.s).collect();
    println!(
        "INFO | BDN (1, 4/3, 8), classified {} | {}; failure set from s = {:?} ({} points)",
        bdn_causality_class(&BdnCoefficients::new(1.0, 4.0 / 3.0, 8.0).unwrap()).class,
        counts(&wide),
        lost.first(),
        lost.len()
    );
}

fn causality(out: &mut Outcome) {
    let class = |e: f64, m: f64, n: f64| bdn_causality_class(&BdnCoefficients::new(e, m, n).unwrap()).class;
    let got = [class(1.0, 4.0 / 3.0, 4.0), class(1.0, 4.0 / 3.0, 2.0), class(1.0, 1.0, 1.0)];
    let want = [CausalityClass::SharplyCausal, CausalityClass::StrictlyCausal, CausalityClass::Acausal];
    out.report("Causality classifier", got == want, format!("{got:?}"));
}

type Tensor4 = [[[[f64; 4]; 4]; 4]; 4];

/// Full 4D η B_E − μ B_1 − ν B_2 for a velocity along x.
fn bdn_tensor_4d(u0: f64, u1: f64, eta: f64, mu: f64, nu: f64) -> Tensor4 {
    let g = |a: usize, b: usize| {
        if a != b {
            0.0
        } else if a == 0 {
            -1.0
        } else {
            1.0
        }
    };
    let u = [u0, u1, 0.0, 0.0];
    let pi = |a: usize, b: usize| g(a, b) + u[a] * u[b];
    let pi_mixed = |a: usize, e: usize| (0..4).map(|z| pi(a, z) * g(z, e)).sum::<f64>();
    let mut t = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let be = pi(a, c) * pi(b, d) + pi(a, d) * pi(b, c) - 2.0 / 3.0 * pi(a, b) * pi(c, d);
                    let b1 = (3.0 * u[a] * u[b] + pi(a, b)) * (3.0 * u[c] * u[d] + pi(c, d));
                    let b2: f64 = (0..4)
                        .map(|e| (u[a] * pi_mixed(b, e) + u[b] * pi_mixed(a, e)) * (u[c] * pi(d, e) + u[d] * pi(c, e)))
                        .sum();
                    t[a][b][c][d] = eta * be - mu * b1 - nu * b2;
                }
            }
        }
    }
    t
}

fn gradient_checks(out: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let rad = BarotropicEos::<f64>::radiation();

    let mut grad_worst = 0.0f64;
    for _ in 0..100 {
        let q = shock_from_strength(rng.gen_range(0.5..10.0), rng.gen_range(0.05..0.95), &rad).unwrap();
        let y = FluidState::from_velocity(rng.gen_range(-3.0..3.0), rng.gen_range(0.2..5.0)).unwrap().covariant().0;
        let l = |y: [f64; 2]| lyapunov_eval(&FluidState::from_covariant(Vec2(y)).unwrap(), &q, &rad).unwrap();
        let g = lyapunov_gradient(&FluidState::from_covariant(Vec2(y)).unwrap(), &q, &rad).unwrap();
        let h = 1e-6 * Vec2(y).norm();
        for k in 0..2 {
            let (mut yp, mut ym) = (y, y);
            yp[k] += h;
            ym[k] -= h;
            let fd = (l(yp) - l(ym)) / (2.0 * h);
            grad_worst = grad_worst.max((fd - g[k]).abs() / g.norm().max(q.q0));
        }
    }

    let mut jac_worst = 0.0f64;
    let models = [
        DissipationModel::ft(FtCoefficients::new(1.0, 0.0, 0.1).unwrap()),
        DissipationModel::ft(FtCoefficients::new(1.0, 0.0, 0.5).unwrap()),
        DissipationModel::ft(FtCoefficients::new(1.0, 0.0, 1.0).unwrap()),
        DissipationModel::bdn(BdnCoefficients::new(1.0, 4.0 / 3.0, 4.0).unwrap()),
        DissipationModel::bdn(BdnCoefficients::new(1.0, 4.0 / 3.0, 2.0).unwrap()),
    ];
    for model in &models {
        for s in [0.1, 0.5, 0.9] {
            let q = shock_from_strength(3.0, s, &rad).unwrap();
            let shock = end_states(q, &rad).unwrap();
            for which in [End::Minus, End::Plus] {
                let r = rest_point_classify(model, &shock, which, &rad, 1e-10, 1e-6).unwrap();
                let f = |y: [f64; 2]| {
                    planar_rhs(model, &FluidState::from_covariant(Vec2(y)).unwrap(), &q, &rad, 1e-10).unwrap().0
                };
                let y = r.state.covariant();
                let j = fd_jacobian(f, y.0, 1e-6 * y.norm());
                jac_worst = jac_worst.max((j - r.jacobian).norm() / r.jacobian.norm());
            }
        }
    }

    let mut bdn_worst = 0.0f64;
    for _ in 0..100 {
        let s = FluidState::from_velocity(rng.gen_range(-5.0..5.0), rng.gen_range(0.1..10.0)).unwrap();
        let (eta, mu, nu) = (rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0), rng.gen_range(0.1..8.0));
        let m = profile_matrix_bdn(&s, &BdnCoefficients::new(eta, mu, nu).unwrap()).unwrap().matrix;
        let u = s.velocity();
        let full = bdn_tensor_4d(u[0], u[1], eta, mu, nu);
        for a in 0..2 {
            for c in 0..2 {
                bdn_worst = bdn_worst.max((m[(a, c)] - full[a][1][c][1]).abs() / m.norm().max(1.0));
            }
        }
    }

    let mut ft_worst = 0.0f64;
    for _ in 0..100 {
        let s = FluidState::from_velocity(rng.gen_range(-5.0..5.0), rng.gen_range(0.1..10.0)).unwrap();
        let (eta, zeta) = (rng.gen_range(0.1..2.0), rng.gen_range(0.0..1.0));
        let m = profile_matrix_ft(&s, &FtCoefficients::new(eta, zeta, 0.0).unwrap(), &rad).unwrap().matrix;
        let dpsi = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let sigma = (4.0 / 3.0 * eta + zeta) / (1.0 - 1.0 / 3.0);
        let expect = velocity_gradient(&s, dpsi).unwrap().scale(sigma);
        ft_worst = ft_worst.max((m.mul_vec(&dpsi) - expect).norm() / (m.norm() * dpsi.norm()));
    }

    let pass = grad_worst < 1e-6 && jac_worst < 1e-5 && bdn_worst < 1e-12 && ft_worst < 1e-10;
    out.report(
        "Gradient and assembly checks",
        pass,
        format!(
            "grad L {grad_worst:.1e} (<1e-6), rest-point Jacobians {jac_worst:.1e} (<1e-5), \
             BDN tensor {bdn_worst:.1e} (<1e-12), FT action {ft_worst:.1e} (<1e-10)"
        ),
    );
}

fn determinism(out: &mut Outcome) {
    let text = "[model]\nname = \"ft\"\n[scan]\nchi = [0, 0.5]\nnu = [4]\n\
                s = { from = 0.01, to = 0.99, points = 50 }\n";
    let ft = RunConfig::resolve(ConfigFile::parse(text).unwrap()).unwrap();
    let bdn = RunConfig::resolve(
        ConfigFile::parse("[model]\nname = \"bdn\"\nmu = \"4/3\"\n[scan]\nnu = [2, 4, 8]\n").unwrap(),
    )
    .unwrap();
    let table = |cfg: &RunConfig, workers: usize| {
        let records = run_scan(cfg, workers).unwrap();
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        buf.extend(serde_json::to_vec(&summarize(&records)).unwrap());
        buf
    };
    let mut same = true;
    let mut rows = 0;
    for cfg in [&ft, &bdn] {
        let serial = table(cfg, 1);
        rows += serial.iter().filter(|b| **b == b'\n').count();
        same &= serial == table(cfg, 1) && serial == table(cfg, 4);
    }
    out.report(
        "Determinism (repeat and parallel vs serial)",
        same,
        format!("{rows} CSV lines over two scans, byte-identical: {same}"),
    );
}

fn first(bad: &[String]) -> String {
    bad.first().map_or(String::new(), |b| format!("; first: {b}"))
}

fn main() -> ExitCode {
    let mut out = Outcome { rows: Vec::new() };
    let mut shocks = Vec::new();
    scalar_ft_suite(&mut out, &mut shocks);
    heat_conduction_suite(&mut out, &mut shocks);
    consistency(&mut out);
    hugoniot_root_oracle(&mut out, &mut shocks);
    char_speed_oracle(&mut out, &shocks);
    bdn_sharply_causal_scan(&mut out);
    bdn_strictly_causal_scan(&mut out);
    causality(&mut out);
    gradient_checks(&mut out);
    determinism(&mut out);

    let failed: Vec<_> = out.rows.iter().filter(|r| !r.0).map(|r| r.1.as_str()).collect();
    println!("{} of {} criteria pass", out.rows.len() - failed.len(), out.rows.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", failed.join("; "));
        ExitCode::FAILURE
    }
}
