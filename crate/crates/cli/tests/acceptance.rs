//! Acceptance suite. Prints one PASS/FAIL line per criterion, then fails if
//! any criterion failed.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use tempfile::TempDir;

use tccbf::barrier::{
    barrier_eval, barrier_gradient, smooth_max, tc_cbf, tc_components, BarrierConfig, BarrierKind, Obstacle,
    PlanarKinematicPose,
};
use tccbf::metrics::{compute_metrics, Metrics};
use tccbf::nmpc::{solve_qp, QpProblem};
use tccbf::sim::{builtin_scenario, decay_violations, run_parameter_sweep, run_scenario, Outcome, SweepGrid, TrajectoryLog};
use tccbf::vehicle::{coriolis_matrix, rk4_step, rk4_step_with_jacobians, AsvParams, VehicleModel};

/// Relative band on arrival time against the published table.
const T_A_REL: f64 = 0.10;
/// Absolute band on mean speed error [m/s].
const E_SPEED_ABS: f64 = 0.05;
/// Relative band on mean cross-track error.
const E_CTE_REL: f64 = 0.35;
/// Wall-clock budget per unicycle scenario [s].
const RUNTIME_BUDGET: f64 = 60.0;
/// Allowed intrusion into the safety radius when no slack was used [m].
const SAFETY_MARGIN: f64 = 0.05;
const SLACK_FREE: f64 = 1e-6;
const DECAY_TOL: f64 = 1e-6;
const CORIOLIS_TOL: f64 = 1e-12;
const DERIVATIVE_REL_TOL: f64 = 1e-4;
const FD_STEP: f64 = 1e-6;
const RK4_RATIO: (f64, f64) = (12.0, 20.0);
const QP_TOL: f64 = 1e-6;

/// `(scenario, t_a, e_speed, e_cte)` for MPC-TCCBF, then MPC-EDCBF.
const TABLE: [(&str, [(f64, f64, f64); 2]); 3] = [
    ("unicycle-static", [(20.4, 0.005, 0.962), (21.6, 0.088, 1.273)]),
    ("unicycle-headon", [(25.5, 0.019, 0.659), (26.9, 0.107, 0.889)]),
    ("unicycle-overtaking", [(20.1, 0.002, 0.450), (21.3, 0.087, 0.916)]),
];

type Verdict = Result<String, String>;

struct Run {
    log: TrajectoryLog,
    metrics: Metrics,
    seconds: f64,
}

fn run(name: &str, kind: BarrierKind) -> Run {
    let scenario = builtin_scenario(name).unwrap().with_barrier(kind);
    let start = Instant::now();
    let log = run_scenario(&scenario).unwrap();
    let seconds = start.elapsed().as_secs_f64();
    let metrics = compute_metrics(&log);
    Run { log, metrics, seconds }
}

fn run_all(names: &[&str]) -> Vec<(Run, Run)> {
    names
        .par_iter()
        .map(|n| (run(n, BarrierKind::Tc), run(n, BarrierKind::Ed)))
        .collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.3}"))
}

fn criterion_table(unicycle: &[(Run, Run)]) -> Verdict {
    let mut misses = Vec::new();
    let mut notes = Vec::new();
    for ((name, want), (tc, ed)) in TABLE.iter().zip(unicycle) {
        for (r, (t_a, e_speed, e_cte)) in [tc, ed].into_iter().zip(want) {
            let m = &r.metrics;
            let label = format!("{name} {}", m.controller());
            notes.push(format!(
                "{label} t_a {} e_speed {:.3} e_cte {:.3} ({:.1}s)",
                fmt_opt(m.t_a),
                m.e_speed,
                m.e_cte,
                r.seconds
            ));
            match m.t_a {
                Some(t) if ((t - t_a) / t_a).abs() <= T_A_REL => {}
                got => misses.push(format!("{label} t_a {} vs {t_a}", fmt_opt(got))),
            }
            if (m.e_speed - e_speed).abs() > E_SPEED_ABS {
                misses.push(format!("{label} e_speed {:.3} vs {e_speed}", m.e_speed));
            }
            if ((m.e_cte - e_cte) / e_cte).abs() > E_CTE_REL {
                misses.push(format!("{label} e_cte {:.3} vs {e_cte}", m.e_cte));
            }
            if r.seconds >= RUNTIME_BUDGET {
                misses.push(format!("{label} took {:.1}s", r.seconds));
            }
        }
    }
    if misses.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!("{} (measured: {})", misses.join("; "), notes.join("; ")))
    }
}

fn criterion_ordering(unicycle: &[(Run, Run)]) -> Verdict {
    let mut misses = Vec::new();
    for (tc, ed) in unicycle {
        let (t, e) = (&tc.metrics, &ed.metrics);
        let name = &t.scenario;
        match (t.t_a, e.t_a) {
            (Some(a), Some(b)) if a < b => {}
            (a, b) => misses.push(format!("{name} t_a {} vs {}", fmt_opt(a), fmt_opt(b))),
        }
        if t.e_speed >= e.e_speed {
            misses.push(format!("{name} e_speed {:.3} vs {:.3}", t.e_speed, e.e_speed));
        }
        if t.e_cte >= e.e_cte {
            misses.push(format!("{name} e_cte {:.3} vs {:.3}", t.e_cte, e.e_cte));
        }
    }
    if misses.is_empty() {
        Ok("TC ahead on every metric in all three scenarios".into())
    } else {
        Err(format!("TC not ahead: {}", misses.join("; ")))
    }
}

/// Smallest clearance of a run and whether it respects the safety radius.
fn safety(log: &TrajectoryLog) -> Result<f64, String> {
    let r_s = log.scenario.barrier.r_s;
    let slack_free = log.max_slack() <= SLACK_FREE;
    let mut worst = f64::INFINITY;
    for r in &log.records {
        let Some(b) = r.barrier else { continue };
        worst = worst.min(b.clearance);
        if b.clearance < 0.0 {
            return Err(format!("collision at t = {} (clearance {:.3})", r.t, b.clearance));
        }
        if slack_free && b.clearance < r_s - SAFETY_MARGIN {
            return Err(format!("inside safety radius at t = {} (clearance {:.3})", r.t, b.clearance));
        }
    }
    Ok(worst)
}

fn label(log: &TrajectoryLog) -> String {
    format!("{} {}", log.scenario.name, log.scenario.barrier.kind)
}

fn criterion_safety(logs: &[&TrajectoryLog]) -> Verdict {
    let mut misses = Vec::new();
    let mut checked = 0;
    for log in logs {
        if matches!(log.outcome, Outcome::Failed(_)) {
            continue;
        }
        checked += 1;
        if let Err(e) = safety(log) {
            misses.push(format!("{}: {e}", label(log)));
        }
    }
    if misses.is_empty() && checked > 0 {
        Ok(format!("{checked} runs never closer than o_r + R_s - {SAFETY_MARGIN}"))
    } else {
        Err(format!("{checked} runs checked; {}", misses.join("; ")))
    }
}

fn criterion_decay(logs: &[&TrajectoryLog]) -> Verdict {
    let mut pairs = 0;
    let mut misses = Vec::new();
    for log in logs {
        let (checked, bad) = decay_violations(log, DECAY_TOL);
        pairs += checked;
        if !bad.is_empty() {
            misses.push(format!("{} at t = {:?}", label(log), bad));
        }
    }
    if misses.is_empty() && pairs > 0 {
        Ok(format!("{pairs} consecutive feasible step pairs over {} runs", logs.len()))
    } else {
        Err(format!("{pairs} pairs checked; violations: {}", misses.join("; ")))
    }
}

fn criterion_asv(asv: &[(Run, Run)]) -> Verdict {
    let mut misses = Vec::new();
    let mut notes = Vec::new();
    for (tc, ed) in asv {
        let (t, e) = (&tc.metrics, &ed.metrics);
        let name = &t.scenario;
        for r in [tc, ed] {
            if r.log.outcome != Outcome::Reached {
                misses.push(format!("{} outcome {}", label(&r.log), r.log.outcome.label()));
            }
            if let Err(err) = safety(&r.log) {
                misses.push(format!("{}: {err}", label(&r.log)));
            }
        }
        notes.push(format!(
            "{name} t_a {}/{} e_speed {:.3}/{:.3}",
            fmt_opt(t.t_a),
            fmt_opt(e.t_a),
            t.e_speed,
            e.e_speed
        ));
        match (t.t_a, e.t_a) {
            (Some(a), Some(b)) if a < b => {}
            _ => misses.push(format!("{name} t_a not smaller under TC")),
        }
        if t.e_speed >= e.e_speed {
            misses.push(format!("{name} e_speed not smaller under TC"));
        }
    }
    if misses.is_empty() {
        Ok(format!("TC/ED: {}", notes.join("; ")))
    } else {
        Err(format!("{} (TC/ED: {})", misses.join("; "), notes.join("; ")))
    }
}

fn smooth_max_sandwich(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..10_000 {
        let a = rng.random_range(-20.0..20.0);
        let b = rng.random_range(-20.0..20.0);
        let k = rng.random_range(0.1..100.0);
        let s = smooth_max(a, b, k);
        let m = f64::max(a, b);
        let ulp = 4.0 * f64::EPSILON * m.abs().max(1.0);
        if s > m + ulp || s < m - std::f64::consts::LN_2 / k - ulp {
            return Err(format!("smooth_max({a}, {b}, {k}) = {s}"));
        }
    }
    Ok(())
}

fn random_pose(rng: &mut ChaCha8Rng, obs: &Obstacle, keep_out: f64) -> PlanarKinematicPose {
    loop {
        let x = rng.random_range(-12.0..12.0);
        let y = rng.random_range(-12.0..12.0);
        if (x - obs.ox).hypot(y - obs.oy) > keep_out {
            let course = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            return PlanarKinematicPose::new(x, y, course, rng.random_range(0.3..3.0));
        }
    }
}

fn random_obstacle(rng: &mut ChaCha8Rng) -> Obstacle {
    let moving = rng.random_bool(0.5);
    let v = |rng: &mut ChaCha8Rng| if moving { rng.random_range(-1.0..1.0) } else { 0.0 };
    let (vx, vy) = (v(rng), v(rng));
    Obstacle::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(0.5..3.0), vx, vy).unwrap()
}

fn random_barrier(rng: &mut ChaCha8Rng, kind: BarrierKind) -> BarrierConfig {
    BarrierConfig {
        kind,
        alpha: rng.random_range(0.1..1.0),
        r_max: rng.random_range(0.1..0.6),
        r_s: rng.random_range(0.0..1.0),
        k: rng.random_range(1.0..20.0),
        ..BarrierConfig::default()
    }
}

fn one_side(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let mut nonneg = 0;
    for _ in 0..10_000 {
        let obs = random_obstacle(rng);
        let cfg = random_barrier(rng, BarrierKind::Tc);
        let pose = random_pose(rng, &obs, 0.0);
        let (right, left) = tc_components(&pose, &obs, &cfg);
        if tc_cbf(&pose, &obs, &cfg) >= 0.0 {
            nonneg += 1;
            if right.max(left) < 0.0 {
                return Err(format!("tc >= 0 with both circles intruding at {pose:?}"));
            }
        }
    }
    if nonneg < 1_000 {
        return Err(format!("only {nonneg} samples had tc >= 0"));
    }
    Ok(())
}

fn coriolis(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let p = AsvParams::heron_placeholder();
    for _ in 0..1_000 {
        let nu = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let c = coriolis_matrix(nu[0], nu[1], &p);
        let (mut work, mut scale) = (0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                work += nu[i] * c[i][j] * nu[j];
                scale += (nu[i] * c[i][j] * nu[j]).abs();
            }
        }
        if work.abs() > CORIOLIS_TOL * scale.max(1.0) {
            return Err(format!("nu' C nu = {work:e} at {nu:?}"));
        }
    }
    Ok(())
}

fn close(analytic: f64, fd: f64) -> bool {
    (analytic - fd).abs() <= DERIVATIVE_REL_TOL * fd.abs().max(1.0)
}

fn barrier_gradients(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for kind in BarrierKind::ALL {
        for _ in 0..1_000 {
            let obs = random_obstacle(rng);
            let cfg = random_barrier(rng, kind);
            let pose = random_pose(rng, &obs, obs.o_r + 0.2);
            let g = barrier_gradient(kind, &pose, &obs, &cfg).map_err(|e| e.to_string())?;
            let base = [pose.x, pose.y, pose.course, pose.speed];
            for (i, gi) in g.iter().enumerate() {
                let at = |d: f64| {
                    let mut v = base;
                    v[i] += d;
                    barrier_eval(kind, &PlanarKinematicPose::new(v[0], v[1], v[2], v[3]), &obs, &cfg).value
                };
                let fd = (at(FD_STEP) - at(-FD_STEP)) / (2.0 * FD_STEP);
                if !close(*gi, fd) {
                    return Err(format!("{kind} d/d{i}: {gi} vs {fd} at {pose:?}"));
                }
            }
        }
    }
    Ok(())
}

fn random_state(rng: &mut ChaCha8Rng, model: &VehicleModel) -> (DVector<f64>, DVector<f64>) {
    match model {
        VehicleModel::Unicycle => (
            DVector::from_fn(4, |i, _| if i == 3 { rng.random_range(0.2..3.0) } else { rng.random_range(-5.0..5.0) }),
            DVector::from_fn(2, |_, _| rng.random_range(-1.0..1.0)),
        ),
        VehicleModel::Asv(_) => {
            let away_from_zero = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| {
                let v: f64 = rng.random_range(lo..hi);
                v.signum() * v.abs().max(0.01)
            };
            let x = DVector::from_row_slice(&[
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(0.2..2.0),
                away_from_zero(rng, -0.5, 0.5),
                rng.random_range(-0.5..0.5),
            ]);
            (x, DVector::from_fn(2, |_, _| rng.random_range(-20.0..30.0)))
        }
    }
}

fn check_jacobian(
    what: &str,
    analytic: &DMatrix<f64>,
    f: impl Fn(&DVector<f64>) -> DVector<f64>,
    at: &DVector<f64>,
) -> Result<(), String> {
    for j in 0..at.len() {
        let mut plus = at.clone();
        let mut minus = at.clone();
        plus[j] += FD_STEP;
        minus[j] -= FD_STEP;
        let fd = (f(&plus) - f(&minus)) / (2.0 * FD_STEP);
        for i in 0..fd.len() {
            if !close(analytic[(i, j)], fd[i]) {
                return Err(format!("{what} ({i},{j}): {} vs {}", analytic[(i, j)], fd[i]));
            }
        }
    }
    Ok(())
}

fn model_jacobians(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for model in [VehicleModel::Unicycle, VehicleModel::Asv(AsvParams::heron_placeholder())] {
        let name = model.kind();
        for _ in 0..1_000 {
            let (x, u) = random_state(rng, &model);
            let (a, b) = model.jacobians(&x, &u);
            check_jacobian(&format!("{name:?} df/dx"), &a, |x| model.deriv(x, &u), &x)?;
            check_jacobian(&format!("{name:?} df/du"), &b, |u| model.deriv(&x, u), &u)?;
            let (_, sa, sb) = rk4_step_with_jacobians(&model, &x, &u, 0.1);
            check_jacobian(&format!("{name:?} step/dx"), &sa, |x| model.step(x, &u, 0.1), &x)?;
            check_jacobian(&format!("{name:?} step/du"), &sb, |u| model.step(&x, u, 0.1), &u)?;
            check_jacobian(&format!("{name:?} pose"), &model.pose_jacobian(&x), |x| {
                let p = model.pose(x);
                DVector::from_row_slice(&[p.x, p.y, p.course, p.speed])
            }, &x)?;
        }
    }
    Ok(())
}

fn rk4_ratio() -> Result<f64, String> {
    let (speed, rate, horizon) = (2.0, 0.5, 3.0);
    let model = VehicleModel::Unicycle;
    let error = |steps: usize| {
        let ts = horizon / steps as f64;
        let u = DVector::from_row_slice(&[rate, 0.0]);
        let mut x = DVector::from_row_slice(&[0.0, 0.0, 0.0, speed]);
        for _ in 0..steps {
            x = rk4_step(|x, u| model.deriv(x, u), &x, &u, ts);
        }
        let radius = speed / rate;
        (x[0] - radius * (rate * horizon).sin()).hypot(x[1] - radius * (1.0 - (rate * horizon).cos()))
    };
    let ratio = error(10) / error(20);
    if (RK4_RATIO.0..=RK4_RATIO.1).contains(&ratio) {
        Ok(ratio)
    } else {
        Err(format!("error ratio {ratio}"))
    }
}

/// Enumerates every active set of bounds and rows and returns the point
/// satisfying all KKT conditions.
fn qp_oracle(qp: &QpProblem) -> Option<DVector<f64>> {
    let n = qp.dim();
    let m = qp.a.nrows();
    for code in 0..(3usize.pow(n as u32) << m) {
        let mut c = code;
        let side: Vec<usize> = (0..n)
            .map(|_| {
                let s = c % 3;
                c /= 3;
                s
            })
            .collect();
        let fixed: Vec<usize> = (0..n).filter(|&j| side[j] != 0).collect();
        let rows: Vec<usize> = (0..m).filter(|i| c >> i & 1 == 1).collect();
        let size = n + fixed.len() + rows.len();
        let mut k = DMatrix::zeros(size, size);
        let mut rhs = DVector::zeros(size);
        k.view_mut((0, 0), (n, n)).copy_from(&qp.hessian);
        rhs.rows_mut(0, n).copy_from(&(-&qp.gradient));
        for (e, &j) in fixed.iter().enumerate() {
            k[(j, n + e)] = -1.0;
            k[(n + e, j)] = 1.0;
            rhs[n + e] = if side[j] == 1 { qp.lower[j] } else { qp.upper[j] };
        }
        for (e, &r) in rows.iter().enumerate() {
            let at = n + fixed.len() + e;
            for j in 0..n {
                k[(j, at)] = -qp.a[(r, j)];
                k[(at, j)] = qp.a[(r, j)];
            }
            rhs[at] = qp.b[r];
        }
        let Some(sol) = k.clone().lu().solve(&rhs) else { continue };
        if (&k * &sol - &rhs).amax() > 1e-9 {
            continue;
        }
        let x = sol.rows(0, n).into_owned();
        if qp.infeasibility(&x) > 1e-9 {
            continue;
        }
        let bounds_ok = fixed.iter().enumerate().all(|(e, &j)| {
            let l = sol[n + e];
            if side[j] == 1 { l >= -1e-9 } else { l <= 1e-9 }
        });
        let rows_ok = (0..rows.len()).all(|e| sol[n + fixed.len() + e] >= -1e-9);
        if bounds_ok && rows_ok {
            return Some(x);
        }
    }
    None
}

fn qp_versus_oracle(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..200 {
        let n = rng.random_range(1..=5);
        let m = rng.random_range(0..=4);
        let l = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let hessian = &l * l.transpose() + DMatrix::identity(n, n) * 0.1;
        let gradient = DVector::from_fn(n, |_, _| rng.random_range(-3.0..3.0));
        let lower = DVector::from_fn(n, |_, _| rng.random_range(-2.0..-0.5));
        let upper = DVector::from_fn(n, |_, _| rng.random_range(0.5..2.0));
        let x0 = DVector::from_fn(n, |i, _| rng.random_range(lower[i]..upper[i]));
        let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
        let b = &a * &x0 - DVector::from_fn(m, |_, _| rng.random_range(0.0..1.0));
        let qp = QpProblem { hessian, gradient, lower, upper, a, b };
        let got = solve_qp(&qp, &x0).map_err(|e| format!("case {case}: {e}"))?;
        let want = qp_oracle(&qp).ok_or(format!("case {case}: oracle found no KKT point"))?;
        let err = (&got.x - &want).amax();
        if err > QP_TOL {
            return Err(format!("case {case}: off by {err:e}"));
        }
    }
    Ok(())
}

fn criterion_numerics() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut misses = Vec::new();
    let mut check = |name: &str, r: Result<(), String>| {
        if let Err(e) = r {
            misses.push(format!("{name}: {e}"));
        }
    };
    check("smooth-max sandwich", smooth_max_sandwich(&mut rng));
    check("one-side", one_side(&mut rng));
    check("coriolis", coriolis(&mut rng));
    check("barrier gradients", barrier_gradients(&mut rng));
    check("model jacobians", model_jacobians(&mut rng));
    let ratio = rk4_ratio();
    check("rk4", ratio.clone().map(|_| ()));
    check("qp oracle", qp_versus_oracle(&mut rng));
    if misses.is_empty() {
        Ok(format!(
            "all six suites hold (RK4 ratio {:.2})",
            ratio.unwrap_or(f64::NAN)
        ))
    } else {
        Err(misses.join("; "))
    }
}

fn tccbf(out: &Path, args: &[&str]) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_tccbf"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr).trim()))
    }
}

/// Every CSV in `dir`, sorted by name.
fn csvs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn criterion_determinism() -> Verdict {
    let invocations: [&[&str]; 3] = [
        &["run", "--scenario", "unicycle-headon", "--barrier", "ed"],
        &["run", "--scenario", "asv-overtaking", "--barrier", "tc"],
        &["sweep", "--scenario", "unicycle-static"],
    ];
    let mut compared = 0;
    for args in invocations {
        let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        tccbf(a.path(), args)?;
        tccbf(b.path(), args)?;
        let (fa, fb) = (csvs(a.path()), csvs(b.path()));
        if fa.is_empty() || fa != fb {
            return Err(format!("{args:?} produced different CSVs"));
        }
        compared += fa.len();
    }
    Ok(format!("{compared} CSVs byte-identical across repeated run/sweep invocations"))
}

/// Largest |y| of a restricted node in an emitted level-set grid (course 0,
/// obstacle at the origin).
fn perpendicular_extent(csv: &str) -> Option<f64> {
    csv.lines()
        .skip(2)
        .filter_map(|line| {
            let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            (v[2] < 0.0).then_some(v[1].abs())
        })
        .reduce(f64::max)
}

fn criterion_levelset() -> Verdict {
    let dir = TempDir::new().unwrap();
    tccbf(
        dir.path(),
        &["levelset", "--speed", "1.5", "--course", "0", "--rmax", "0.3", "--alpha", "0.5"],
    )?;
    let extent = |kind: &str| perpendicular_extent(&fs::read_to_string(dir.path().join(format!("levelset-{kind}.csv"))).unwrap());
    match (extent("ed"), extent("tc")) {
        (Some(ed), Some(tc)) if ed > tc => Ok(format!("perpendicular extent ED {ed:.2} m > TC {tc:.2} m")),
        (ed, tc) => Err(format!("perpendicular extent ED {} m, TC {} m", fmt_opt(ed), fmt_opt(tc))),
    }
}

#[test]
fn acceptance() {
    let unicycle = run_all(&["unicycle-static", "unicycle-headon", "unicycle-overtaking"]);
    let asv = run_all(&["asv-static", "asv-headon", "asv-overtaking"]);
    let grid = SweepGrid { alpha: vec![0.25, 0.5, 0.75, 1.0], decay: vec![0.03, 0.05, 0.07] };
    let sweep = run_parameter_sweep(&builtin_scenario("unicycle-static").unwrap().with_barrier(BarrierKind::Ed), &grid).unwrap();
    let sweep_logs: Vec<&TrajectoryLog> = sweep.iter().filter_map(|p| p.run.as_ref().ok()).collect();

    let mut all_logs: Vec<&TrajectoryLog> = unicycle
        .iter()
        .chain(&asv)
        .flat_map(|(tc, ed)| [&tc.log, &ed.log])
        .collect();
    all_logs.extend(sweep_logs.iter().copied());
    let sweep_errors = sweep.len() - sweep_logs.len();

    let results: Vec<(&str, Verdict)> = vec![
        ("1 unicycle table within tolerance", criterion_table(&unicycle)),
        ("2 TC beats ED on t_a, e_speed, e_cte", criterion_ordering(&unicycle)),
        (
            "3 safety invariant",
            if sweep_errors > 0 {
                Err(format!("{sweep_errors} sweep points errored"))
            } else {
                criterion_safety(&all_logs)
            },
        ),
        ("4 closed-loop barrier decay", criterion_decay(&all_logs)),
        ("5 ASV property suite", criterion_asv(&asv)),
        ("6 numerical property suites", criterion_numerics()),
        ("7 determinism", criterion_determinism()),
        ("8 ED exclusion wider across course", criterion_levelset()),
    ];

    let mut failed = Vec::new();
    println!();
    for (name, verdict) in &results {
        match verdict {
            Ok(detail) => println!("PASS [{name}] {detail}"),
            Err(detail) => {
                println!("FAIL [{name}] {detail}");
                failed.push(*name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
