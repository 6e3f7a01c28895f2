use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::Scenario;
use crate::nmpc::{SolveStatus, SLACK_TOL};
use crate::vehicle::VehicleKind;

/// Barrier values of every kind at one logged state (minimum over
/// obstacles) and the distances to the nearest obstacle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierValues {
    pub ed: f64,
    pub tc: f64,
    pub dc: f64,
    /// Distance to the nearest obstacle center.
    pub center_distance: f64,
    /// Distance to the nearest obstacle boundary.
    pub clearance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub status: SolveStatus,
    pub iterations: usize,
    pub kkt_residual: f64,
    pub max_slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub state: Vec<f64>,
    /// Input applied over `[t, t + T_s)`; absent on the final row.
    pub input: Option<Vec<f64>>,
    /// Absent when the scenario has no obstacles.
    pub barrier: Option<BarrierValues>,
    pub solver: Option<SolverDiagnostics>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Reached,
    Timeout,
    Failed(String),
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Reached => "reached",
            Outcome::Timeout => "timeout",
            Outcome::Failed(_) => "failed",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryLog {
    pub scenario: Scenario,
    pub outcome: Outcome,
    /// One row per control step at `t = k T_s`, plus a final row for the
    /// state where the run ended.
    pub records: Vec<StepRecord>,
    /// Wall-clock time of each solve. Kept out of the CSV so that reruns
    /// produce identical files.
    pub solve_seconds: Vec<f64>,
}

fn push_opt(line: &mut String, v: Option<f64>) {
    line.push(',');
    if let Some(v) = v {
        let _ = write!(line, "{v}");
    }
}

impl TrajectoryLog {
    pub fn state_columns(kind: VehicleKind) -> &'static [&'static str] {
        match kind {
            VehicleKind::Unicycle => &["x", "y", "psi", "u"],
            VehicleKind::Asv => &["x", "y", "psi", "u", "v", "r"],
        }
    }

    pub fn input_columns(kind: VehicleKind) -> &'static [&'static str] {
        match kind {
            VehicleKind::Unicycle => &["yaw_rate", "accel"],
            VehicleKind::Asv => &["f_l", "f_r"],
        }
    }

    /// CSV header: `t`, the state, the applied input, the barrier values
    /// (`h_ed`, `h_tc`, `h_dc`), `center_distance`, `clearance`, then the
    /// solver diagnostics (`status`, `sqp_iters`, `kkt`, `max_slack`).
    pub fn csv_header(kind: VehicleKind) -> String {
        let mut cols = vec!["t"];
        cols.extend(Self::state_columns(kind));
        cols.extend(Self::input_columns(kind));
        cols.extend(["h_ed", "h_tc", "h_dc", "center_distance", "clearance", "status", "sqp_iters", "kkt", "max_slack"]);
        cols.join(",")
    }

    pub fn to_csv(&self) -> String {
        let kind = self.scenario.vehicle.kind();
        let nu = Self::input_columns(kind).len();
        let mut out = Self::csv_header(kind);
        out.push('\n');
        for r in &self.records {
            let mut line = format!("{}", r.t);
            for v in &r.state {
                let _ = write!(line, ",{v}");
            }
            for i in 0..nu {
                push_opt(&mut line, r.input.as_ref().map(|u| u[i]));
            }
            let b = r.barrier;
            push_opt(&mut line, b.map(|b| b.ed));
            push_opt(&mut line, b.map(|b| b.tc));
            push_opt(&mut line, b.map(|b| b.dc));
            push_opt(&mut line, b.map(|b| b.center_distance));
            push_opt(&mut line, b.map(|b| b.clearance));
            match r.solver {
                Some(s) => {
                    let _ = write!(line, ",{},{},{},{}", s.status.as_str(), s.iterations, s.kkt_residual, s.max_slack);
                }
                None => line.push_str(",,,,"),
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    /// The scenario as pretty-printed JSON; loading it back and rerunning
    /// reproduces [`TrajectoryLog::to_csv`].
    pub fn sidecar_json(&self) -> String {
        self.scenario.to_json()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Largest slack used by any solve.
    pub fn max_slack(&self) -> f64 {
        self.records
            .iter()
            .filter_map(|r| r.solver.map(|s| s.max_slack))
            .fold(0.0, f64::max)
    }

    /// Whether every solve kept its slacks at or below 1e-6.
    pub fn slack_free(&self) -> bool {
        self.max_slack() <= SLACK_TOL
    }

    pub fn count_status(&self, status: SolveStatus) -> usize {
        self.records
            .iter()
            .filter(|r| r.solver.is_some_and(|s| s.status == status))
            .count()
    }
}
