//! Acceptance criteria. Each criterion prints one `[PASS]` or `[FAIL]` line;
//! the test fails at the end if any criterion failed.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines
//! when everything passes.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use pseudoflow::builtin::{conformal_metric, EinsteinBase};
use pseudoflow::chart::{Chart, MetricField, Point};
use pseudoflow::curvature::ricci_tensor;
use pseudoflow::flows::grid::{discrete_laplacian, sample_lattice};
use pseudoflow::flows::{
    ansatz_ode_family, exact_einstein_family, flow_rhs, sample_times, warped_sphere_family, wrong_sphere_family,
    ConformalGridFamily, FlowMap, MetricFamily,
};
use pseudoflow::verify::{
    axiom_suite, run_suite, theorem_a_residual, variation_algebraic, Convergence, SuiteConfig, SuiteOutcome,
    AXIOMS, DEFAULT_DT,
};
use pseudoflow::GeometryError;

const SINGLE_BLOCK: [EinsteinBase; 4] =
    [EinsteinBase::FlatTorus(2), EinsteinBase::Sphere(2), EinsteinBase::Sphere(3), EinsteinBase::Hyperbolic(2)];
const EXACT_COUNT: usize = 5;
const MAPS: [FlowMap; 2] = [FlowMap::Ricci, FlowMap::MinusTwoRicci];

const TOL_EVOLUTION: f64 = 1e-6;
const ORDER_TARGET: f64 = 2.0;
const ORDER_TOL: f64 = 0.2;
const RUNTIME_LIMIT_S: f64 = 30.0;
const TOL_ALGEBRAIC: f64 = 1e-10;
const DETECT_MIN: f64 = 0.1;
const TOL_AXIOM_REL: f64 = 1e-9;
const TRIPLES: usize = 12;
const TOL_REDUCTION: f64 = 1e-12;
const TOL_RICCI: f64 = 1e-8;
const TOL_RICCI_SCALING: f64 = 1e-10;
const TOL_RK4_GLOBAL: f64 = 1e-8;
const RK4_ORDER: f64 = 4.0;
const RK4_ORDER_TOL: f64 = 0.3;
const TOL_COLLAPSE: f64 = 1e-6;
const LAPLACIAN_ORDER: f64 = 2.0;
const LAPLACIAN_ORDER_TOL: f64 = 0.3;
const TOL_STATIONARY: f64 = 1e-12;

struct Line {
    id: u8,
    name: &'static str,
    passed: bool,
    detail: String,
}

#[derive(Default)]
struct Report {
    lines: Vec<Line>,
}

impl Report {
    fn record(&mut self, id: u8, name: &'static str, passed: bool, detail: String) {
        println!("[{}] {id} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
        self.lines.push(Line { id, name, passed, detail });
    }

    fn note(&self, id: u8, text: &str) {
        println!("       {id} note: {text}");
    }
}

/// The five exact families: flat T², S², S³, H² and S²×S² (as the block ODE
/// started from coefficients 1 and 2).
fn exact_family(idx: usize, map: FlowMap) -> MetricFamily {
    match SINGLE_BLOCK.get(idx) {
        Some(&base) => exact_einstein_family(base, map).unwrap(),
        None => {
            let s2 = EinsteinBase::Sphere(2);
            ansatz_ode_family(&[(s2, 1.0), (s2, 2.0)], map).unwrap()
        }
    }
}

fn grid_family(map: FlowMap) -> MetricFamily {
    let n = 16;
    let u0 = sample_lattice(n, |x, y| 0.1 * (2.0 * PI * x).sin() + 0.05 * (2.0 * PI * y).cos());
    MetricFamily::ConformalGrid(ConformalGridFamily::new(n, u0, map).unwrap())
}

fn quarter() -> Point {
    Point::new(vec![PI / 4.0, 1.0])
}

fn criterion_1(r: &mut Report) -> Vec<SuiteOutcome> {
    let start = Instant::now();
    let cfg = SuiteConfig { dt: DEFAULT_DT, ..SuiteConfig::default() };
    let mut outcomes = Vec::new();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut outcomes_seen = Vec::new();
    for idx in 0..EXACT_COUNT {
        for map in MAPS {
            let fam = exact_family(idx, map);
            let out = run_suite(&fam, map, &cfg).unwrap();
            let residual = out.max_residual("theorem_a");
            let samples = out.summary.points * out.summary.times.len();
            worst = worst.max(residual);
            let conv_ok = match out.summary.convergence.outcome {
                Convergence::ExactWithinPrecision => true,
                Convergence::Order(o) => (o - ORDER_TARGET).abs() <= ORDER_TOL,
                Convergence::Undetermined => false,
            };
            outcomes_seen.push(format!("{}/{}: {}", fam.id(), map, out.summary.convergence.outcome));
            if residual > TOL_EVOLUTION || !conv_ok || samples != 100 {
                failures.push(format!("{}/{} residual {residual:.2e} samples {samples}", fam.id(), map));
            }
            outcomes.push(out);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let passed = failures.is_empty() && elapsed <= RUNTIME_LIMIT_S;
    r.record(
        1,
        "connection evolution identity",
        passed,
        format!(
            "10 combinations x 20 points x 5 times, max residual {worst:.3e} (tol {TOL_EVOLUTION:e}), \
             runtime {elapsed:.1} s (limit {RUNTIME_LIMIT_S} s){}",
            if failures.is_empty() { String::new() } else { format!("; failing: {}", failures.join("; ")) }
        ),
    );
    r.note(1, &format!("dt-convergence: {}", outcomes_seen.join(", ")));
    r.note(
        1,
        "Christoffel symbols are invariant under blockwise constant rescaling, so every exact family has \
         d/dt Gamma = 0 and no O(dt^2) differencing term; residuals sit at the rounding floor",
    );
    outcomes
}

fn criterion_2(r: &mut Report, suites: &[SuiteOutcome]) {
    let mut worst = suites.iter().map(|s| s.max_residual("variation_algebraic")).fold(0.0, f64::max);
    let mut count: usize = suites.iter().map(|s| s.reports.iter().filter(|x| x.check == "variation_algebraic").count()).sum();
    let extra = [
        wrong_sphere_family(),
        warped_sphere_family(),
        grid_family(FlowMap::MinusTwoRicci),
    ];
    for fam in &extra {
        for t in sample_times(&fam.interval()) {
            for p in fam.chart().sample_points(0) {
                let m = fam.query(t, &p).unwrap().metric;
                let h = flow_rhs(fam.map(), &m).unwrap();
                worst = worst.max(variation_algebraic(fam.id(), t, &p, &m, &h).unwrap().residual_max);
                count += 1;
            }
        }
    }
    r.record(
        2,
        "differencing-free identity",
        worst <= TOL_ALGEBRAIC,
        format!("{count} samples over 13 family/map pairs, max residual {worst:.3e} (tol {TOL_ALGEBRAIC:e})"),
    );
}

fn criterion_3(r: &mut Report) {
    let fam = wrong_sphere_family();
    let a = theorem_a_residual(&fam, FlowMap::Ricci, 0.0, &quarter(), DEFAULT_DT).unwrap();
    let residual = a.report.residual_max;
    r.record(
        3,
        "negative control detectability",
        residual >= DETECT_MIN,
        format!("wrong family c(t) = 1 + 2t on S^2 at t = 0, theta = pi/4: residual {residual:.3e} (need >= {DETECT_MIN})"),
    );
    let s = fam.query(0.0, &quarter()).unwrap();
    let gap = (s.dt_metric.values() - flow_rhs(FlowMap::Ricci, &s.metric).unwrap().values()).abs().max();
    let warped = theorem_a_residual(&warped_sphere_family(), FlowMap::Ricci, 0.0, &quarter(), DEFAULT_DT).unwrap();
    r.note(
        3,
        "c(t) g_0 with Ric = g_0 = g_t / c(t) gives P = I / c(t) and tilde Gamma = Gamma / c(t) = P Gamma, while \
         d/dt Gamma = 0; the coefficient identity is blind to constant rescalings",
    );
    r.note(
        3,
        &format!(
            "flow-equation gap of the same family {gap:.3e}; warped control d theta^2 + (1+t) sin^2 theta d phi^2 \
             residual {:.3e}",
            warped.report.residual_max
        ),
    );
}

fn criterion_4(r: &mut Report, suites: &[SuiteOutcome]) {
    let mut worst = [0.0f64; 4];
    let mut reduction: f64 = 0.0;
    for s in suites {
        for (w, name) in worst.iter_mut().zip(AXIOMS) {
            *w = w.max(s.max_relative(name));
        }
        reduction = reduction.max(s.max_residual("levi_civita_reduction"));
    }
    // the grid is sampled only where the conformal equation is forward parabolic
    {
        let map = FlowMap::MinusTwoRicci;
        let fam = grid_family(map);
        let t = sample_times(&fam.interval())[2];
        let source = |p: &Point| {
            let m = fam.query(t, p)?.metric;
            let h = flow_rhs(map, &m)?;
            Ok((m, h))
        };
        let rows = axiom_suite(fam.id(), t, source, fam.chart(), 0, TRIPLES).unwrap();
        for (w, name) in worst.iter_mut().zip(AXIOMS) {
            *w = rows.iter().filter(|x| x.check == name).fold(*w, |m, x| m.max(x.residual_rel));
        }
    }
    let axioms_ok = worst.iter().all(|&w| w <= TOL_AXIOM_REL);
    let parts: Vec<String> = AXIOMS.iter().zip(worst).map(|(n, w)| format!("{n} {w:.2e}")).collect();
    r.record(
        4,
        "pseudoconnection axioms",
        axioms_ok && reduction <= TOL_REDUCTION,
        format!(
            "{TRIPLES} triples per family, worst relative: {} (tol {TOL_AXIOM_REL:e}); S = g reduction {reduction:.2e} \
             (tol {TOL_REDUCTION:e})",
            parts.join(", ")
        ),
    );
}

fn ricci_gap(metric: &MetricField, chart: &Chart, expect: impl Fn(&nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<f64>) -> f64 {
    chart
        .sample_points(0)
        .iter()
        .map(|p| {
            let m = metric.jet(p).unwrap();
            (ricci_tensor(&m).unwrap() - expect(&m.g())).abs().max()
        })
        .fold(0.0, f64::max)
}

fn criterion_5(r: &mut Report) {
    let s2 = EinsteinBase::Sphere(2);
    let h2 = EinsteinBase::Hyperbolic(2);
    let t2 = EinsteinBase::FlatTorus(2);
    let sphere = ricci_gap(&s2.metric(), &s2.chart(), |g| g.clone());
    let hyper = ricci_gap(&h2.metric(), &h2.chart(), |g| -g);
    let flat = ricci_gap(&t2.metric(), &t2.chart(), |g| g * 0.0);

    let bump = conformal_metric(2, |x| (x[0].sin() * x[1].cos()) * 0.3);
    let plane = Chart::open_box("plane", vec![(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
    let s3 = EinsteinBase::Sphere(3);
    let mut scaling: f64 = 0.0;
    for (metric, chart) in [(s2.metric(), s2.chart()), (h2.metric(), h2.chart()), (s3.metric(), s3.chart()), (bump, plane)] {
        for p in chart.sample_points(0) {
            let m = metric.jet(&p).unwrap();
            let ric = ricci_tensor(&m).unwrap();
            for c in [0.5, 3.0] {
                scaling = scaling.max((ricci_tensor(&m.scaled(c)).unwrap() - &ric).abs().max());
            }
        }
    }
    let worst = sphere.max(hyper).max(flat);
    r.record(
        5,
        "curvature ground truth",
        worst <= TOL_RICCI && scaling <= TOL_RICCI_SCALING,
        format!(
            "Ric(S^2) - g {sphere:.2e}, Ric(H^2) + g {hyper:.2e}, Ric(flat) {flat:.2e} (tol {TOL_RICCI:e}); \
             Ric(c g) - Ric(g) for c in {{1/2, 3}} {scaling:.2e} (tol {TOL_RICCI_SCALING:e})"
        ),
    );
}

fn criterion_6(r: &mut Report) {
    let s2 = EinsteinBase::Sphere(2);
    let fam = ansatz_ode_family(&[(s2, 1.0)], FlowMap::Ricci).unwrap();
    let traj = fam.trajectory(1.0, 0.1).unwrap();
    let global = traj.times.iter().zip(&traj.states).map(|(t, s)| (s[0] - (1.0 + t)).abs()).fold(0.0, f64::max);
    let horizon_ok = (traj.last().0 - 1.0).abs() < 1e-12;

    let errors: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&h| {
            let fam = ansatz_ode_family(&[(s2, 1.0)], FlowMap::ScalarMultiple(1.0)).unwrap();
            (fam.trajectory(1.0, h).unwrap().last().1[0] - 1f64.exp()).abs()
        })
        .collect();
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let orders_ok = orders.iter().all(|o| (o - RK4_ORDER).abs() <= RK4_ORDER_TOL);

    let collapse = match ansatz_ode_family(&[(s2, 1.0)], FlowMap::MinusTwoRicci).unwrap().trajectory(1.0, 0.1) {
        Err(halt) => match halt.error {
            GeometryError::Degeneration { time, .. } => Some(time),
            _ => None,
        },
        Ok(_) => None,
    };
    let collapse_ok = collapse.is_some_and(|t| (t - 0.5).abs() <= TOL_COLLAPSE);
    r.record(
        6,
        "flow integration",
        horizon_ok && global <= TOL_RK4_GLOBAL && orders_ok && collapse_ok,
        format!(
            "c(t) = 1 + t global error {global:.2e} (tol {TOL_RK4_GLOBAL:e}); order under halving {:.3}, {:.3} \
             ({RK4_ORDER} +- {RK4_ORDER_TOL}); minus_two_ricci collapse at {} (0.5 +- {TOL_COLLAPSE:e})",
            orders[0],
            orders[1],
            collapse.map_or("none".to_string(), |t| format!("{t:.9}")),
        ),
    );
    r.note(
        6,
        "RK4 integrates the constant-rate Ricci ansatz exactly, so the order is measured on the same ansatz \
         under scale:1 where c(t) = e^t",
    );
}

fn criterion_7(r: &mut Report) {
    let errors: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| {
            let u = sample_lattice(n, |x, y| (2.0 * PI * x).sin() * (4.0 * PI * y).cos());
            let exact = sample_lattice(n, |x, y| -20.0 * PI * PI * (2.0 * PI * x).sin() * (4.0 * PI * y).cos());
            discrete_laplacian(&u, n).iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .collect();
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let orders_ok = orders.iter().all(|o| (o - LAPLACIAN_ORDER).abs() <= LAPLACIAN_ORDER_TOL);

    let n = 16;
    let step = 0.2 / (n * n) as f64;
    let mut drift: f64 = 0.0;
    for (u0, map) in [(0.0, FlowMap::Ricci), (0.0, FlowMap::MinusTwoRicci), (0.3, FlowMap::Ricci)] {
        let fam = MetricFamily::ConformalGrid(ConformalGridFamily::new(n, vec![u0; n * n], map).unwrap());
        let traj = fam.trajectory(100.0 * step, step).unwrap();
        assert_eq!(traj.times.len(), 101);
        for s in &traj.states {
            drift = s.iter().fold(drift, |m, v| m.max((v - u0).abs()));
        }
    }
    r.record(
        7,
        "conformal grid",
        orders_ok && drift <= TOL_STATIONARY,
        format!(
            "Laplacian order {:.3}, {:.3} for N = 16, 32, 64 ({LAPLACIAN_ORDER} +- {LAPLACIAN_ORDER_TOL}); \
             flat torus drift over 100 steps {drift:.2e} (tol {TOL_STATIONARY:e})",
            orders[0], orders[1]
        ),
    );
}

fn criterion_8(r: &mut Report) {
    let dir = tempfile::tempdir().unwrap();
    let mut identical = true;
    let mut sizes = Vec::new();
    for (family, map) in [("sphere2", "ricci"), ("s2xs2", "ricci"), ("conformal-torus", "minus2ricci")] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let path = dir.path().join(format!("{family}-{run}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_pseudoflow"))
                .args(["verify", "--family", family, "--map", map, "--seed", "42", "--out"])
                .arg(&path)
                .env_remove("PSEUDOFLOW_OUT_DIR")
                .stderr(std::process::Stdio::null())
                .status()
                .unwrap();
            assert!(status.code().is_some());
            outputs.push(std::fs::read(&path).unwrap());
        }
        identical &= !outputs[0].is_empty() && outputs[0] == outputs[1];
        sizes.push(format!("{family} {} bytes", outputs[0].len()));
    }
    r.record(8, "determinism", identical, format!("two verify runs with seed 42, byte-identical CSV: {}", sizes.join(", ")));
}

#[test]
fn acceptance() {
    let mut report = Report::default();
    let suites = criterion_1(&mut report);
    criterion_2(&mut report, &suites);
    criterion_3(&mut report);
    criterion_4(&mut report, &suites);
    criterion_5(&mut report);
    criterion_6(&mut report);
    criterion_7(&mut report);
    criterion_8(&mut report);

    let failed: Vec<String> = report.lines.iter().filter(|l| !l.passed).map(|l| format!("{} {}", l.id, l.name)).collect();
    println!("{} of {} criteria pass", report.lines.len() - failed.len(), report.lines.len());
    for l in report.lines.iter().filter(|l| !l.passed) {
        eprintln!("criterion {} ({}) failed: {}", l.id, l.name, l.detail);
    }
    assert!(failed.is_empty(), "failing criteria: {}", failed.join(", "));
}
