//! Arrival time, tracking errors and side-by-side comparison tables.
//!
//! The speed and cross-track averages run over the logged steps with
//! `t <= t_a` only, so that they end with the arrival rather than with the
//! last logged row. Runs that never arrive average over the whole log.

use std::fmt::Write as _;

use nalgebra::DVector;
use serde::Serialize;

use crate::barrier::BarrierKind;
use crate::nmpc::SolveStatus;
use crate::sim::TrajectoryLog;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metrics {
    pub scenario: String,
    pub barrier: BarrierKind,
    pub outcome: String,
    /// Goal crossing time, interpolated between steps; `None` if never reached.
    pub t_a: Option<f64>,
    /// Mean |speed - u_r| (forward speed for the unicycle, speed over ground
    /// for the vessel).
    pub e_speed: f64,
    /// Mean |y|.
    pub e_cte: f64,
    /// Smallest distance to an obstacle boundary; `None` without obstacles.
    pub d_min: Option<f64>,
    pub max_slack: f64,
    pub degraded_steps: usize,
}

impl Metrics {
    pub fn controller(&self) -> &'static str {
        self.barrier.controller_label()
    }
}

/// Interpolated time at which `x` first reaches `goal_x`.
pub fn arrival_time(log: &TrajectoryLog) -> Option<f64> {
    let goal = log.scenario.goal_x;
    let j = log.records.iter().position(|r| r.state[0] >= goal)?;
    if j == 0 {
        return Some(log.records[0].t);
    }
    let (a, b) = (&log.records[j - 1], &log.records[j]);
    let frac = (goal - a.state[0]) / (b.state[0] - a.state[0]);
    Some(a.t + frac * (b.t - a.t))
}

pub fn compute_metrics(log: &TrajectoryLog) -> Metrics {
    let sc = &log.scenario;
    let t_a = arrival_time(log);
    let window: Vec<_> = log
        .records
        .iter()
        .filter(|r| t_a.is_none_or(|t| r.t <= t))
        .collect();
    let n = window.len().max(1) as f64;
    let e_speed = window
        .iter()
        .map(|r| (sc.vehicle.tracked_speed(&DVector::from_column_slice(&r.state)) - sc.reference_speed).abs())
        .sum::<f64>()
        / n;
    let e_cte = window.iter().map(|r| r.state[1].abs()).sum::<f64>() / n;
    let d_min = log
        .records
        .iter()
        .filter_map(|r| r.barrier.map(|b| b.clearance))
        .reduce(f64::min);
    Metrics {
        scenario: sc.name.clone(),
        barrier: sc.barrier.kind,
        outcome: log.outcome.label().to_string(),
        t_a,
        e_speed,
        e_cte,
        d_min,
        max_slack: log.max_slack(),
        degraded_steps: log.count_status(SolveStatus::DegradedFeasibility),
    }
}

/// Metrics of several controllers on one scenario, with the best value of
/// each of `t_a`, `e_speed` and `e_cte` flagged. Only runs that reached the
/// goal compete.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub scenario: String,
    pub rows: Vec<Metrics>,
    pub best_t_a: Vec<bool>,
    pub best_e_speed: Vec<bool>,
    pub best_e_cte: Vec<bool>,
}

fn flag_min(rows: &[Metrics], value: impl Fn(&Metrics) -> f64) -> Vec<bool> {
    let best = rows
        .iter()
        .filter(|m| m.t_a.is_some())
        .map(&value)
        .fold(f64::INFINITY, f64::min);
    rows.iter().map(|m| m.t_a.is_some() && value(m) == best).collect()
}

pub fn compare(logs: &[TrajectoryLog]) -> Result<ComparisonTable> {
    let first = logs
        .first()
        .ok_or_else(|| Error::InvalidConfig("nothing to compare".into()))?;
    let kind = first.scenario.barrier.kind;
    for log in &logs[1..] {
        if log.scenario.with_barrier(kind) != first.scenario {
            return Err(Error::ScenarioMismatch(format!(
                "`{}` and `{}` differ in more than the barrier kind",
                first.scenario.name, log.scenario.name
            )));
        }
    }
    let rows: Vec<Metrics> = logs.iter().map(compute_metrics).collect();
    Ok(ComparisonTable {
        scenario: first.scenario.name.clone(),
        best_t_a: flag_min(&rows, |m| m.t_a.unwrap_or(f64::INFINITY)),
        best_e_speed: flag_min(&rows, |m| m.e_speed),
        best_e_cte: flag_min(&rows, |m| m.e_cte),
        rows,
    })
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.prec$}"))
}

fn csv_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

impl ComparisonTable {
    /// Aligned plain-text table; best values carry a trailing `*`.
    pub fn to_text(&self) -> String {
        let header = ["controller", "outcome", "t_a [s]", "e_speed [m/s]", "e_cte [m]", "d_min [m]", "max_slack"];
        let mark = |s: String, best: bool| if best { s + "*" } else { s };
        let body: Vec<[String; 7]> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, m)| {
                [
                    m.controller().to_string(),
                    m.outcome.clone(),
                    mark(opt(m.t_a, 2), self.best_t_a[i]),
                    mark(format!("{:.3}", m.e_speed), self.best_e_speed[i]),
                    mark(format!("{:.3}", m.e_cte), self.best_e_cte[i]),
                    opt(m.d_min, 3),
                    format!("{:.1e}", m.max_slack),
                ]
            })
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|c| body.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap())
            .collect();
        let mut out = format!("scenario: {}\n", self.scenario);
        let line = |cells: Vec<&str>| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        out.push_str(&line(header.to_vec()));
        out.push('\n');
        out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(|s| s.as_str()).collect()));
        out.push('\n');
        for r in &body {
            out.push_str(&line(r.iter().map(|s| s.as_str()).collect()));
            out.push('\n');
        }
        out.push_str("* best among runs that reached the goal\n");
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "scenario,controller,barrier,outcome,t_a,e_speed,e_cte,d_min,max_slack,degraded_steps,best_t_a,best_e_speed,best_e_cte\n",
        );
        for (i, m) in self.rows.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                m.scenario,
                m.controller(),
                m.barrier,
                m.outcome,
                csv_opt(m.t_a),
                m.e_speed,
                m.e_cte,
                csv_opt(m.d_min),
                m.max_slack,
                m.degraded_steps,
                self.best_t_a[i],
                self.best_e_speed[i],
                self.best_e_cte[i]
            );
        }
        out
    }
}

/// One-run summary in the same layout as a comparison.
pub fn summary_text(log: &TrajectoryLog) -> String {
    let m = compute_metrics(log);
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {}", m.scenario);
    let _ = writeln!(out, "controller: {}", m.controller());
    let _ = writeln!(out, "outcome: {}", m.outcome);
    let _ = writeln!(out, "t_a [s]: {}", opt(m.t_a, 3));
    let _ = writeln!(out, "e_speed [m/s]: {:.4}", m.e_speed);
    let _ = writeln!(out, "e_cte [m]: {:.4}", m.e_cte);
    let _ = writeln!(out, "d_min [m]: {}", opt(m.d_min, 4));
    let _ = writeln!(out, "max_slack: {:e}", m.max_slack);
    let _ = writeln!(out, "degraded_steps: {}", m.degraded_steps);
    out
}
