use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{barrier_eval, BarrierConfig, BarrierKind, Obstacle, PlanarKinematicPose};
use crate::{Error, Result};

/// Rectangular grid of evaluation nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub resolution: f64,
}

impl GridSpec {
    /// Square grid of half-width `half` centred on `(cx, cy)`.
    pub fn centered(cx: f64, cy: f64, half: f64, resolution: f64) -> Self {
        Self {
            x_min: cx - half,
            x_max: cx + half,
            y_min: cy - half,
            y_max: cy + half,
            resolution,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "grid resolution must be positive, got {}",
                self.resolution
            )));
        }
        if !(self.x_max > self.x_min && self.y_max > self.y_min) {
            return Err(Error::InvalidConfig("grid extents must be increasing".into()));
        }
        Ok(())
    }

    fn axis(min: f64, max: f64, res: f64) -> Vec<f64> {
        let n = ((max - min) / res + 1e-9).floor() as usize + 1;
        (0..n).map(|i| min + i as f64 * res).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.resolution)
    }

    pub fn ys(&self) -> Vec<f64> {
        Self::axis(self.y_min, self.y_max, self.resolution)
    }
}

/// Barrier values over a planar grid at fixed course and speed.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSetGrid {
    pub kind: BarrierKind,
    pub config: BarrierConfig,
    pub obstacle: Obstacle,
    pub course: f64,
    pub speed: f64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// `values[j][i]` is the barrier at `(xs[i], ys[j])`.
    pub values: Vec<Vec<f64>>,
}

pub fn level_set_grid(
    kind: BarrierKind,
    cfg: &BarrierConfig,
    obs: &Obstacle,
    course: f64,
    speed: f64,
    grid: &GridSpec,
) -> Result<LevelSetGrid> {
    grid.validate()?;
    let xs = grid.xs();
    let ys = grid.ys();
    let values = ys
        .iter()
        .map(|&y| {
            xs.iter()
                .map(|&x| barrier_eval(kind, &PlanarKinematicPose::new(x, y, course, speed), obs, cfg).value)
                .collect()
        })
        .collect();
    Ok(LevelSetGrid {
        kind,
        config: *cfg,
        obstacle: *obs,
        course,
        speed,
        xs,
        ys,
        values,
    })
}

impl LevelSetGrid {
    pub fn header(&self) -> String {
        let c = &self.config;
        format!(
            "# kind={} course={} speed={} alpha={} r_max={} r_s={} k={} obstacle=({},{},{})",
            self.kind, self.course, self.speed, c.alpha, c.r_max, c.r_s, c.k,
            self.obstacle.ox, self.obstacle.oy, self.obstacle.o_r
        )
    }

    /// Parameter comment line, column names, then one `x,y,value` row per node.
    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push_str("\nx,y,value\n");
        for (j, &y) in self.ys.iter().enumerate() {
            for (i, &x) in self.xs.iter().enumerate() {
                let _ = writeln!(out, "{x},{y},{}", self.values[j][i]);
            }
        }
        out
    }

    /// Nodes where the barrier is negative.
    pub fn restricted_nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ys.iter().enumerate().flat_map(move |(j, &y)| {
            self.xs
                .iter()
                .enumerate()
                .filter(move |&(i, _)| self.values[j][i] < 0.0)
                .map(move |(_, &x)| (x, y))
        })
    }

    /// Largest distance, perpendicular to the course, from the obstacle
    /// center to a restricted node. `None` if nothing is restricted.
    pub fn perpendicular_extent(&self) -> Option<f64> {
        let (s, c) = self.course.sin_cos();
        self.restricted_nodes()
            .map(|(x, y)| (-(x - self.obstacle.ox) * s + (y - self.obstacle.oy) * c).abs())
            .reduce(f64::max)
    }

    /// Largest distance from the obstacle center to a restricted node.
    pub fn radial_extent(&self) -> Option<f64> {
        self.restricted_nodes()
            .map(|(x, y)| (x - self.obstacle.ox).hypot(y - self.obstacle.oy))
            .reduce(f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::centered(0.0, 0.0, 10.0, 0.1)
    }

    fn cfg(kind: BarrierKind) -> BarrierConfig {
        BarrierConfig {
            kind,
            alpha: 0.5,
            r_max: 0.3,
            ..BarrierConfig::default()
        }
    }

    #[test]
    fn rest_contours_are_the_inflated_circle() {
        let obs = Obstacle::fixed(0.0, 0.0, 2.0);
        for kind in [BarrierKind::Ed, BarrierKind::Tc] {
            let g = level_set_grid(kind, &cfg(kind), &obs, 0.0, 0.0, &grid()).unwrap();
            for (j, &y) in g.ys.iter().enumerate() {
                for (i, &x) in g.xs.iter().enumerate() {
                    let d = x.hypot(y);
                    if (d - 2.5).abs() > 1e-9 {
                        assert_eq!(g.values[j][i] < 0.0, d < 2.5, "{kind} at ({x}, {y})");
                    }
                }
            }
            let extent = g.radial_extent().unwrap();
            assert!(extent <= 2.5 && extent > 2.4, "{kind}: {extent}");
        }
    }

    #[test]
    fn tc_grid_is_mirror_symmetric_about_course_axis() {
        let obs = Obstacle::fixed(0.0, 0.0, 2.0);
        let g = level_set_grid(BarrierKind::Tc, &cfg(BarrierKind::Tc), &obs, 0.0, 1.5, &grid()).unwrap();
        let n = g.ys.len();
        for j in 0..n {
            assert!((g.ys[j] + g.ys[n - 1 - j]).abs() < 1e-9);
            for i in 0..g.xs.len() {
                let (a, b) = (g.values[j][i], g.values[n - 1 - j][i]);
                assert!((a - b).abs() < 1e-9, "({}, {}): {a} vs {b}", g.xs[i], g.ys[j]);
            }
        }
    }

    #[test]
    fn rejects_bad_resolution() {
        let obs = Obstacle::fixed(0.0, 0.0, 2.0);
        let bad = GridSpec { resolution: -0.1, ..grid() };
        assert!(level_set_grid(BarrierKind::Ed, &cfg(BarrierKind::Ed), &obs, 0.0, 1.0, &bad).is_err());
    }

    #[test]
    fn csv_layout() {
        let obs = Obstacle::fixed(0.0, 0.0, 2.0);
        let spec = GridSpec::centered(0.0, 0.0, 1.0, 1.0);
        let g = level_set_grid(BarrierKind::Dc, &cfg(BarrierKind::Dc), &obs, 0.0, 0.0, &spec).unwrap();
        let csv = g.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# kind=dc"));
        assert_eq!(lines[1], "x,y,value");
        assert_eq!(lines.len(), 2 + 9);
        assert_eq!(lines[2], "-1,-1,-1.0857864376269049");
    }
}
