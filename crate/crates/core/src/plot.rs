//! Hand-written SVG figures.
//!
//! A run figure has two panels: the x-y trajectory with periodic obstacle
//! snapshots, and stacked time series of the active barrier value, the
//! clearance to the nearest obstacle, the tracked speed and the inputs.

use std::fmt::Write as _;

use nalgebra::DVector;

use crate::barrier::LevelSetGrid;
use crate::barrier::BarrierKind;
use crate::sim::{propagate_obstacles, TrajectoryLog};
use crate::vehicle::VehicleKind;
use crate::{Error, Result};

const WIDTH: f64 = 900.0;
const FONT: &str = "font-family=\"sans-serif\" font-size=\"11\"";

fn color(kind: BarrierKind) -> &'static str {
    match kind {
        BarrierKind::Ed => "#d62728",
        BarrierKind::Tc => "#1f77b4",
        BarrierKind::Dc => "#2ca02c",
    }
}

/// Rounds a raw tick spacing up to 1, 2 or 5 times a power of ten.
fn nice_step(span: f64, ticks: f64) -> f64 {
    let raw = (span / ticks).max(1e-12);
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let n = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    n * mag
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// A rectangular plotting area with linear data coordinates.
struct Axes {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Axes {
    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x.0) / (self.x.1 - self.x.0) * self.width
    }

    fn py(&self, y: f64) -> f64 {
        self.top + (self.y.1 - y) / (self.y.1 - self.y.0) * self.height
    }

    fn scale_x(&self) -> f64 {
        self.width / (self.x.1 - self.x.0)
    }

    fn frame(&self, out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let _ = writeln!(
            out,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#333\"/>",
            self.left, self.top, self.width, self.height
        );
        let step = nice_step(self.x.1 - self.x.0, 6.0);
        let mut v = (self.x.0 / step).ceil() * step;
        while v <= self.x.1 + 1e-9 {
            let p = self.px(v);
            let _ = writeln!(
                out,
                "<line x1=\"{p:.2}\" y1=\"{:.2}\" x2=\"{p:.2}\" y2=\"{:.2}\" stroke=\"#333\"/><text x=\"{p:.2}\" y=\"{:.2}\" text-anchor=\"middle\" {FONT}>{}</text>",
                self.top + self.height,
                self.top + self.height + 4.0,
                self.top + self.height + 15.0,
                tick_label(v, step)
            );
            v += step;
        }
        let step = nice_step(self.y.1 - self.y.0, 4.0);
        let mut v = (self.y.0 / step).ceil() * step;
        while v <= self.y.1 + 1e-9 {
            let p = self.py(v);
            let _ = writeln!(
                out,
                "<line x1=\"{:.2}\" y1=\"{p:.2}\" x2=\"{:.2}\" y2=\"{p:.2}\" stroke=\"#333\"/><text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" {FONT}>{}</text>",
                self.left - 4.0,
                self.left,
                self.left - 6.0,
                p + 4.0,
                tick_label(v, step)
            );
            v += step;
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" {FONT} font-weight=\"bold\">{title}</text>",
            self.left + self.width / 2.0,
            self.top - 6.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" {FONT}>{xlabel}</text>",
            self.left + self.width / 2.0,
            self.top + self.height + 30.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" {FONT} transform=\"rotate(-90 {:.2} {:.2})\">{ylabel}</text>",
            self.left - 40.0,
            self.top + self.height / 2.0,
            self.left - 40.0,
            self.top + self.height / 2.0
        );
    }

    fn polyline(&self, out: &mut String, pts: impl Iterator<Item = (f64, f64)>, stroke: &str, dash: Option<&str>) {
        let pts: Vec<String> = pts
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        if pts.is_empty() {
            return;
        }
        let dash = dash.map(|d| format!(" stroke-dasharray=\"{d}\"")).unwrap_or_default();
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1.5\"{dash}/>",
            pts.join(" ")
        );
    }
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 { 0 } else { (-step.log10().floor()) as usize };
    let s = format!("{:.*}", decimals, v);
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn snapshot_interval(kind: VehicleKind) -> f64 {
    match kind {
        VehicleKind::Unicycle => 2.5,
        VehicleKind::Asv => 6.0,
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Run figure for one or more logs of the same scenario (for example the
/// same scenario under several barriers).
pub fn run_figure_svg(logs: &[&TrajectoryLog]) -> Result<String> {
    let logs: Vec<&TrajectoryLog> = logs.iter().copied().filter(|l| !l.is_empty()).collect();
    let Some(first) = logs.first() else {
        return Err(Error::NothingToPlot);
    };
    let sc = &first.scenario;
    let interval = snapshot_interval(sc.vehicle.kind());
    let t_end = logs.iter().map(|l| l.records.last().unwrap().t).fold(0.0, f64::max);
    let snapshot_times: Vec<f64> = (0..)
        .map(|i| i as f64 * interval)
        .take_while(|t| *t <= t_end + 1e-9)
        .collect();

    // Trajectory extent, including obstacle snapshots.
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for l in &logs {
        for r in &l.records {
            xs.push(r.state[0]);
            ys.push(r.state[1]);
        }
    }
    for t in &snapshot_times {
        for o in propagate_obstacles(&sc.obstacles, *t) {
            xs.extend([o.ox - o.o_r, o.ox + o.o_r]);
            ys.extend([o.oy - o.o_r, o.oy + o.o_r]);
        }
    }
    xs.push(sc.goal_x);
    let (x0, x1) = padded(range(xs.into_iter()).0, range(std::iter::once(sc.goal_x)).1.max(0.0));
    let (xr0, xr1) = (x0.min(range(logs.iter().flat_map(|l| l.records.iter().map(|r| r.state[0]))).0), x1);
    let (y0, y1) = padded(range(ys.iter().copied()).0, range(ys.iter().copied()).1);

    let plot_w = WIDTH - 110.0;
    // Equal aspect ratio for the map, with a sensible minimum height.
    let scale = plot_w / (xr1 - xr0);
    let traj_h = ((y1 - y0) * scale).clamp(120.0, 400.0);
    let yc = 0.5 * (y0 + y1);
    let half = 0.5 * traj_h / scale;
    let traj = Axes {
        left: 80.0,
        top: 40.0,
        width: plot_w,
        height: traj_h,
        x: (xr0, xr1),
        y: (yc - half.max(0.5 * (y1 - y0)), yc + half.max(0.5 * (y1 - y0))),
    };

    let series_h = 110.0;
    let series_gap = 50.0;
    let series_top = traj.top + traj.height + 80.0;
    let height = series_top + 4.0 * (series_h + series_gap) + 20.0;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {WIDTH:.0} {height:.0}\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");

    // Panel 1: trajectories.
    let _ = writeln!(out, "<g id=\"panel-trajectory\">");
    traj.frame(&mut out, &format!("{}: trajectories", sc.name), "x [m]", "y [m]");
    let _ = writeln!(
        out,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>",
        traj.px(xr0),
        traj.py(0.0),
        traj.px(xr1),
        traj.py(0.0)
    );
    let _ = writeln!(
        out,
        "<line x1=\"{gx:.2}\" y1=\"{:.2}\" x2=\"{gx:.2}\" y2=\"{:.2}\" stroke=\"#555\"/>",
        traj.top,
        traj.top + traj.height,
        gx = traj.px(sc.goal_x)
    );
    for (i, t) in snapshot_times.iter().enumerate() {
        let opacity = 0.15 + 0.6 * (i as f64 + 1.0) / snapshot_times.len() as f64;
        for o in propagate_obstacles(&sc.obstacles, *t) {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"#888\" fill-opacity=\"{:.2}\" stroke=\"#444\" stroke-opacity=\"{:.2}\"/>",
                traj.px(o.ox),
                traj.py(o.oy),
                o.o_r * traj.scale_x(),
                opacity * 0.4,
                opacity
            );
            if o.is_static() {
                break;
            }
        }
    }
    for l in &logs {
        let c = color(l.scenario.barrier.kind);
        traj.polyline(&mut out, l.records.iter().map(|r| (r.state[0], r.state[1])), c, None);
        for t in &snapshot_times {
            if let Some(r) = l.records.iter().find(|r| r.t >= *t - 1e-9) {
                let _ = writeln!(
                    out,
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{c}\"/>",
                    traj.px(r.state[0]),
                    traj.py(r.state[1])
                );
            }
        }
    }
    legend(&mut out, &logs, traj.left + 8.0, traj.top + 14.0);
    let _ = writeln!(out, "</g>");

    // Panel 2: time series.
    let _ = writeln!(out, "<g id=\"panel-timeseries\">");
    let t_axis = (0.0, t_end.max(1e-9));
    let speed = |l: &TrajectoryLog, s: &[f64]| l.scenario.vehicle.tracked_speed(&DVector::from_column_slice(s));
    let active = |l: &TrajectoryLog, b: &crate::sim::BarrierValues| match l.scenario.barrier.kind {
        BarrierKind::Ed => b.ed,
        BarrierKind::Tc => b.tc,
        BarrierKind::Dc => b.dc,
    };
    let input_names = crate::sim::TrajectoryLog::input_columns(sc.vehicle.kind());

    type Series<'a> = Box<dyn Fn(&TrajectoryLog) -> Vec<Vec<(f64, f64)>> + 'a>;
    let panels: Vec<(&str, String, Series)> = vec![
        (
            "barrier value",
            "h".to_string(),
            Box::new(|l: &TrajectoryLog| {
                vec![l.records.iter().filter_map(|r| r.barrier.map(|b| (r.t, active(l, &b)))).collect()]
            }),
        ),
        (
            "clearance to nearest obstacle",
            "d - o_r [m]".to_string(),
            Box::new(|l: &TrajectoryLog| {
                vec![l.records.iter().filter_map(|r| r.barrier.map(|b| (r.t, b.clearance))).collect()]
            }),
        ),
        (
            "speed",
            "speed [m/s]".to_string(),
            Box::new(|l: &TrajectoryLog| vec![l.records.iter().map(|r| (r.t, speed(l, &r.state))).collect()]),
        ),
        (
            "inputs",
            format!("{} (solid), {} (dashed)", input_names[0], input_names[1]),
            Box::new(|l: &TrajectoryLog| {
                (0..2)
                    .map(|i| l.records.iter().filter_map(|r| r.input.as_ref().map(|u| (r.t, u[i]))).collect())
                    .collect()
            }),
        ),
    ];
    for (p, (title, ylabel, series)) in panels.iter().enumerate() {
        let data: Vec<(BarrierKind, Vec<Vec<(f64, f64)>>)> =
            logs.iter().map(|l| (l.scenario.barrier.kind, series(l))).collect();
        let (lo, hi) = range(data.iter().flat_map(|(_, s)| s.iter().flatten().map(|p| p.1)));
        let axes = Axes {
            left: 80.0,
            top: series_top + p as f64 * (series_h + series_gap),
            width: plot_w,
            height: series_h,
            x: t_axis,
            y: padded(lo, hi),
        };
        axes.frame(&mut out, title, "t [s]", ylabel);
        if p == 1 {
            let rs = sc.barrier.r_s;
            if rs > axes.y.0 && rs < axes.y.1 {
                let _ = writeln!(
                    out,
                    "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>",
                    axes.left,
                    axes.left + axes.width,
                    y = axes.py(rs)
                );
            }
        }
        for (kind, lines) in &data {
            for (i, line) in lines.iter().enumerate() {
                axes.polyline(&mut out, line.iter().copied(), color(*kind), (i > 0).then_some("5 3"));
            }
        }
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    Ok(out)
}

fn legend(out: &mut String, logs: &[&TrajectoryLog], x: f64, y: f64) {
    for (i, l) in logs.iter().enumerate() {
        let kind = l.scenario.barrier.kind;
        let yy = y + 14.0 * i as f64;
        let _ = writeln!(
            out,
            "<line x1=\"{x:.2}\" y1=\"{yy:.2}\" x2=\"{:.2}\" y2=\"{yy:.2}\" stroke=\"{}\" stroke-width=\"2\"/><text x=\"{:.2}\" y=\"{:.2}\" {FONT}>{}</text>",
            x + 18.0,
            color(kind),
            x + 22.0,
            yy + 4.0,
            kind.controller_label()
        );
    }
}

/// Filled plot of the restricted region (value < 0) of a level-set grid,
/// with the obstacle outline and the vehicle's direction of travel.
pub fn levelset_svg(grid: &LevelSetGrid) -> Result<String> {
    if grid.xs.is_empty() || grid.ys.is_empty() {
        return Err(Error::NothingToPlot);
    }
    let (x0, x1) = (grid.xs[0], *grid.xs.last().unwrap());
    let (y0, y1) = (grid.ys[0], *grid.ys.last().unwrap());
    let side = 560.0;
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let axes = Axes {
        left: 70.0,
        top: 40.0,
        width: side * (x1 - x0).max(1e-9) / span,
        height: side * (y1 - y0).max(1e-9) / span,
        x: (x0, x1.max(x0 + 1e-9)),
        y: (y0, y1.max(y0 + 1e-9)),
    };
    let w = axes.left + axes.width + 30.0;
    let h = axes.top + axes.height + 50.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let dx = if grid.xs.len() > 1 { grid.xs[1] - grid.xs[0] } else { 1.0 };
    let dy = if grid.ys.len() > 1 { grid.ys[1] - grid.ys[0] } else { 1.0 };
    let fill = color(grid.kind);
    let _ = writeln!(out, "<g id=\"restricted\" fill=\"{fill}\" fill-opacity=\"0.45\">");
    for (j, y) in grid.ys.iter().enumerate() {
        let row = &grid.values[j];
        let mut i = 0;
        while i < row.len() {
            if row[i] < 0.0 {
                let start = i;
                while i < row.len() && row[i] < 0.0 {
                    i += 1;
                }
                let xa = grid.xs[start] - dx / 2.0;
                let xb = grid.xs[i - 1] + dx / 2.0;
                let _ = writeln!(
                    out,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\"/>",
                    axes.px(xa.max(x0)),
                    axes.py((y + dy / 2.0).min(y1)),
                    axes.px(xb.min(x1)) - axes.px(xa.max(x0)),
                    axes.py((y - dy / 2.0).max(y0)) - axes.py((y + dy / 2.0).min(y1))
                );
            } else {
                i += 1;
            }
        }
    }
    let _ = writeln!(out, "</g>");
    let o = &grid.obstacle;
    let _ = writeln!(
        out,
        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"#888\" stroke=\"#333\"/>",
        axes.px(o.ox),
        axes.py(o.oy),
        o.o_r * axes.scale_x()
    );
    let (sin, cos) = grid.course.sin_cos();
    let (ax, ay) = (axes.left + 30.0, axes.top + axes.height - 30.0);
    let _ = writeln!(
        out,
        "<line x1=\"{ax:.2}\" y1=\"{ay:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#000\" stroke-width=\"2\"/><text x=\"{ax:.2}\" y=\"{:.2}\" {FONT}>course</text>",
        ax + 20.0 * cos,
        ay - 20.0 * sin,
        ay + 16.0
    );
    let title = format!(
        "{} restricted region, speed {} m/s, r_max {}, alpha {}",
        grid.kind.as_str().to_uppercase(),
        grid.speed,
        grid.config.r_max,
        grid.config.alpha
    );
    axes.frame(&mut out, &title, "x [m]", "y [m]");
    out.push_str("</svg>\n");
    Ok(out)
}
