//! Closed-loop receding-horizon simulation.

mod log;
mod scenarios;

use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::barrier::{barrier_eval, BarrierConfig, BarrierKind, Obstacle};
use crate::nmpc::{build_reference, shift_warm_start, sqp_solve, MpcConfig, OcpProblem, PathSpec, SolveStatus, WarmStart};
use crate::vehicle::VehicleModel;
use crate::{Error, Result};

pub use log::{BarrierValues, Outcome, SolverDiagnostics, StepRecord, TrajectoryLog};
pub use scenarios::{builtin_scenario, builtin_scenarios, BUILTIN_NAMES};

fn default_yaw_bias() -> f64 {
    1e-3
}

/// Everything needed to reproduce one closed-loop run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub vehicle: VehicleModel,
    pub initial_state: Vec<f64>,
    /// Input assumed applied before `t = 0`, for the first rate term.
    pub initial_input: Vec<f64>,
    pub goal_x: f64,
    pub reference_speed: f64,
    pub obstacles: Vec<Obstacle>,
    pub barrier: BarrierConfig,
    pub mpc: MpcConfig,
    pub max_time: f64,
    /// Small left-turn offset added to every initial guess so that an
    /// obstacle centred on the path does not leave the solver on the
    /// symmetric saddle. Zero disables it.
    #[serde(default = "default_yaw_bias")]
    pub yaw_bias: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        let (nx, nu) = (self.vehicle.state_dim(), self.vehicle.input_dim());
        if let VehicleModel::Asv(p) = &self.vehicle {
            p.validate()?;
        }
        if self.initial_state.len() != nx {
            return bad(format!("initial_state needs {nx} entries, got {}", self.initial_state.len()));
        }
        if self.initial_input.len() != nu {
            return bad(format!("initial_input needs {nu} entries, got {}", self.initial_input.len()));
        }
        if self.initial_state.iter().chain(&self.initial_input).any(|v| !v.is_finite()) {
            return bad("initial state and input must be finite".into());
        }
        if !(self.max_time > 0.0 && self.max_time.is_finite()) {
            return bad(format!("max_time must be positive, got {}", self.max_time));
        }
        if !(self.goal_x > self.initial_state[0]) {
            return bad("goal_x must lie beyond the initial x position".into());
        }
        if !(self.reference_speed.is_finite() && self.reference_speed > 0.0) {
            return bad("reference_speed must be positive".into());
        }
        if !(self.yaw_bias.is_finite() && self.yaw_bias >= 0.0) {
            return bad("yaw_bias must be non-negative".into());
        }
        for o in &self.obstacles {
            o.validate()?;
        }
        self.barrier.validate()?;
        self.mpc.validate(&self.vehicle)
    }

    /// The scenario with a different barrier kind, everything else equal.
    /// Pretty-printed JSON that [`crate::config::load_scenario_str`] reads back.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn with_barrier(&self, kind: BarrierKind) -> Self {
        let mut s = self.clone();
        s.barrier.kind = kind;
        s
    }
}

/// Obstacle positions at time `t` under constant-velocity motion.
pub fn propagate_obstacles(obstacles: &[Obstacle], t: f64) -> Vec<Obstacle> {
    obstacles.iter().map(|o| o.at_time(t)).collect()
}

/// Barrier values of every kind at `x`, taking the minimum over obstacles.
pub fn barrier_values(model: &VehicleModel, x: &DVector<f64>, obstacles: &[Obstacle], cfg: &BarrierConfig) -> Option<BarrierValues> {
    if obstacles.is_empty() {
        return None;
    }
    let pose = model.pose(x);
    let min_over = |kind| {
        obstacles
            .iter()
            .map(|o| barrier_eval(kind, &pose, o, cfg).value)
            .fold(f64::INFINITY, f64::min)
    };
    let (center, clearance) = obstacles.iter().fold((f64::INFINITY, f64::INFINITY), |(c, cl), o| {
        let d = (pose.x - o.ox).hypot(pose.y - o.oy);
        (c.min(d), cl.min(d - o.o_r))
    });
    Some(BarrierValues {
        ed: min_over(BarrierKind::Ed),
        tc: min_over(BarrierKind::Tc),
        dc: min_over(BarrierKind::Dc),
        center_distance: center,
        clearance,
    })
}

/// Runs the closed loop until the goal x-position is crossed or the time
/// limit is hit. A numerical failure ends the run early; the partial log is
/// returned with [`Outcome::Failed`].
pub fn run_scenario(scenario: &Scenario) -> Result<TrajectoryLog> {
    scenario.validate()?;
    let model = &scenario.vehicle;
    let cfg = &scenario.mpc;
    let ts = cfg.ts;
    let reference = build_reference(model, &PathSpec::along_x(scenario.reference_speed), cfg.horizon)?;
    let bias = model.yaw_input(scenario.yaw_bias);
    let max_steps = (scenario.max_time / ts - 1e-9).ceil() as usize;

    let mut x = DVector::from_column_slice(&scenario.initial_state);
    let mut prev_u = DVector::from_column_slice(&scenario.initial_input);
    let mut warm: Option<WarmStart> = None;
    let mut records = Vec::new();
    let mut solve_seconds = Vec::new();
    let mut outcome = Outcome::Timeout;

    for k in 0..=max_steps {
        let t = k as f64 * ts;
        let obstacles_now = propagate_obstacles(&scenario.obstacles, t);
        let barrier = barrier_values(model, &x, &obstacles_now, &scenario.barrier);
        if x[0] >= scenario.goal_x || k == max_steps {
            if x[0] >= scenario.goal_x {
                outcome = Outcome::Reached;
            }
            records.push(StepRecord { t, state: x.as_slice().to_vec(), input: None, barrier, solver: None });
            break;
        }

        let problem = OcpProblem::new(
            model.clone(),
            x.clone(),
            prev_u.clone(),
            reference.clone(),
            &obstacles_now,
            scenario.barrier,
            cfg,
        );
        let mut guess = warm.take().unwrap_or_else(|| {
            WarmStart::constant(model, &x, &DVector::zeros(model.input_dim()), cfg.horizon, ts)
        });
        guess.perturb_inputs(&bias);

        let started = Instant::now();
        let result = match sqp_solve(&problem, cfg, Some(&guess)) {
            Ok(r) => r,
            Err(e) => {
                records.push(StepRecord { t, state: x.as_slice().to_vec(), input: None, barrier, solver: None });
                outcome = Outcome::Failed(e.to_string());
                break;
            }
        };
        solve_seconds.push(started.elapsed().as_secs_f64());

        let u = result.inputs[0].clone();
        records.push(StepRecord {
            t,
            state: x.as_slice().to_vec(),
            input: Some(u.as_slice().to_vec()),
            barrier,
            solver: Some(SolverDiagnostics {
                status: result.status,
                iterations: result.sqp_iterations,
                kkt_residual: result.kkt_residual,
                max_slack: result.max_slack,
            }),
        });
        x = model.step(&x, &u, ts);
        if x.iter().any(|v| !v.is_finite()) {
            outcome = Outcome::Failed(format!("plant state became non-finite at t = {}", t + ts));
            break;
        }
        warm = Some(shift_warm_start(&result, model, ts));
        prev_u = u;
    }

    Ok(TrajectoryLog {
        scenario: scenario.clone(),
        outcome,
        records,
        solve_seconds,
    })
}

/// Grid over the barrier class-K gain `alpha` and the discrete decay rate
/// of the scenario's barrier kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub alpha: Vec<f64>,
    pub decay: Vec<f64>,
}

impl SweepGrid {
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.alpha
            .iter()
            .flat_map(|a| self.decay.iter().map(move |g| (*a, *g)))
            .collect()
    }
}

/// Scenario for one sweep point. The decay rate goes to `alpha_t` for the
/// TC barrier and to `alpha_e` otherwise.
pub fn sweep_scenario(base: &Scenario, alpha: f64, decay: f64) -> Scenario {
    let mut s = base.clone();
    s.barrier.alpha = alpha;
    match s.barrier.kind {
        BarrierKind::Tc => s.barrier.alpha_t = decay,
        BarrierKind::Ed | BarrierKind::Dc => s.barrier.alpha_e = decay,
    }
    s
}

#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub alpha: f64,
    pub decay: f64,
    /// The run's log, or the message of the error that prevented it.
    pub run: std::result::Result<TrajectoryLog, String>,
}

/// Runs every grid point independently (in parallel); results keep the
/// grid's row-major order.
pub fn run_parameter_sweep(base: &Scenario, grid: &SweepGrid) -> Result<Vec<SweepPoint>> {
    let points = grid.points();
    if points.is_empty() {
        return Err(Error::InvalidConfig("sweep grid is empty".into()));
    }
    Ok(points
        .par_iter()
        .map(|&(alpha, decay)| SweepPoint {
            alpha,
            decay,
            run: run_scenario(&sweep_scenario(base, alpha, decay)).map_err(|e| e.to_string()),
        })
        .collect())
}

/// Consecutive feasible step pairs of `log` that break the discrete decay
/// condition `h_{k+1} >= (1 - gamma) h_k - tol` for the scenario's barrier.
/// Returns `(pairs checked, violating times)`.
pub fn decay_violations(log: &TrajectoryLog, tol: f64) -> (usize, Vec<f64>) {
    let cfg = &log.scenario.barrier;
    let Some(gamma) = cfg.decay() else {
        return (0, Vec::new());
    };
    let mut checked = 0;
    let mut bad = Vec::new();
    for w in log.records.windows(2) {
        let feasible = w[0].solver.is_some_and(|s| s.status == SolveStatus::Converged);
        let (Some(a), Some(b)) = (w[0].barrier, w[1].barrier) else { continue };
        if !feasible {
            continue;
        }
        let (h0, h1) = match cfg.kind {
            BarrierKind::Tc => (a.tc, b.tc),
            _ => (a.ed, b.ed),
        };
        checked += 1;
        if h1 < (1.0 - gamma) * h0 - tol {
            bad.push(w[0].t);
        }
    }
    (checked, bad)
}
