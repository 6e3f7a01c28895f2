//! Barrier functions for circular obstacles.
//!
//! Every barrier is evaluated on a [`PlanarKinematicPose`]: position,
//! direction of travel and ground speed. For the unicycle that is
//! `(x, y, psi, u)`; for the vessel the course and speed over ground take
//! the place of heading and surge speed.
//!
//! Gradients are with respect to `(x, y, course, speed)`; chain through the
//! vehicle's pose Jacobian to get state gradients.

mod levelset;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use levelset::{level_set_grid, GridSpec, LevelSetGrid};

/// Line-of-sight distances below this are clamped.
pub const LOS_EPSILON: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BarrierKind {
    /// Higher-order Euclidean-distance barrier `dh/dt + alpha h`.
    Ed,
    /// Turning-circle barrier.
    Tc,
    /// Plain distance constraint `h >= 0` without a decay law.
    Dc,
}

impl BarrierKind {
    pub const ALL: [BarrierKind; 3] = [BarrierKind::Dc, BarrierKind::Ed, BarrierKind::Tc];

    pub fn as_str(self) -> &'static str {
        match self {
            BarrierKind::Ed => "ed",
            BarrierKind::Tc => "tc",
            BarrierKind::Dc => "dc",
        }
    }

    /// Controller label used in comparison tables.
    pub fn controller_label(self) -> &'static str {
        match self {
            BarrierKind::Ed => "MPC-EDCBF",
            BarrierKind::Tc => "MPC-TCCBF",
            BarrierKind::Dc => "MPC-DC",
        }
    }
}

impl std::str::FromStr for BarrierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ed" => Ok(BarrierKind::Ed),
            "tc" => Ok(BarrierKind::Tc),
            "dc" => Ok(BarrierKind::Dc),
            other => Err(Error::InvalidConfig(format!(
                "unknown barrier kind `{other}` (expected ed, tc or dc)"
            ))),
        }
    }
}

impl std::fmt::Display for BarrierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Circular obstacle moving at constant planar velocity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Obstacle {
    pub ox: f64,
    pub oy: f64,
    pub o_r: f64,
    #[serde(default)]
    pub vx: f64,
    #[serde(default)]
    pub vy: f64,
}

impl Obstacle {
    pub fn new(ox: f64, oy: f64, o_r: f64, vx: f64, vy: f64) -> Result<Self> {
        let o = Self { ox, oy, o_r, vx, vy };
        o.validate()?;
        Ok(o)
    }

    /// Static obstacle. Panics on a non-positive radius.
    pub fn fixed(ox: f64, oy: f64, o_r: f64) -> Self {
        Self::new(ox, oy, o_r, 0.0, 0.0).expect("invalid obstacle")
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.ox, self.oy, self.o_r, self.vx, self.vy].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidConfig("obstacle fields must be finite".into()));
        }
        if self.o_r <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "obstacle radius must be positive, got {}",
                self.o_r
            )));
        }
        Ok(())
    }

    /// Constant-velocity extrapolation `t` seconds ahead.
    pub fn at_time(&self, t: f64) -> Self {
        Self {
            ox: self.ox + self.vx * t,
            oy: self.oy + self.vy * t,
            ..*self
        }
    }

    pub fn is_static(&self) -> bool {
        self.vx == 0.0 && self.vy == 0.0
    }
}

/// Parameters shared by all barrier kinds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierConfig {
    pub kind: BarrierKind,
    /// Gain of the higher-order ED term [1/s].
    pub alpha: f64,
    /// Discrete decay of the ED barrier, in (0, 1].
    pub alpha_e: f64,
    /// Discrete decay of the TC barrier, in (0, 1].
    pub alpha_t: f64,
    /// Maximum turn rate defining the turning circles [rad/s].
    pub r_max: f64,
    /// Vehicle safety radius [m].
    pub r_s: f64,
    /// Smooth-max sharpness.
    pub k: f64,
}

impl Default for BarrierConfig {
    fn default() -> Self {
        Self {
            kind: BarrierKind::Tc,
            alpha: 0.5,
            alpha_e: 0.05,
            alpha_t: 0.05,
            r_max: 0.3,
            r_s: 0.5,
            k: 5.0,
        }
    }
}

impl BarrierConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kind == BarrierKind::Dc {
            return if self.r_s >= 0.0 && self.r_s.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig("safety radius must be non-negative".into()))
            };
        }
        let in_unit = |v: f64| v > 0.0 && v <= 1.0;
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !in_unit(self.alpha_e) {
            return Err(Error::InvalidConfig(format!("alpha_e must lie in (0, 1], got {}", self.alpha_e)));
        }
        if !in_unit(self.alpha_t) {
            return Err(Error::InvalidConfig(format!("alpha_t must lie in (0, 1], got {}", self.alpha_t)));
        }
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(Error::InvalidConfig(format!("r_max must be positive, got {}", self.r_max)));
        }
        if !(self.r_s >= 0.0 && self.r_s.is_finite()) {
            return Err(Error::InvalidConfig(format!("safety radius must be non-negative, got {}", self.r_s)));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidConfig(format!("smoothing parameter must be positive, got {}", self.k)));
        }
        Ok(())
    }

    /// Discrete decay rate of the active barrier; `None` for DC.
    pub fn decay(&self) -> Option<f64> {
        match self.kind {
            BarrierKind::Ed => Some(self.alpha_e),
            BarrierKind::Tc => Some(self.alpha_t),
            BarrierKind::Dc => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarKinematicPose {
    pub x: f64,
    pub y: f64,
    /// Direction of travel [rad].
    pub course: f64,
    /// Ground speed [m/s].
    pub speed: f64,
}

impl PlanarKinematicPose {
    pub fn new(x: f64, y: f64, course: f64, speed: f64) -> Self {
        Self { x, y, course, speed }
    }

    pub fn velocity(&self) -> (f64, f64) {
        let (s, c) = self.course.sin_cos();
        (self.speed * c, self.speed * s)
    }
}

/// Value and pose gradient of a barrier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierEval {
    pub value: f64,
    pub gradient: [f64; 4],
    /// Set when the line-of-sight distance was clamped at [`LOS_EPSILON`].
    pub clamped: bool,
}

/// Clearance between the vehicle's safety disc and the obstacle.
pub fn euclid_h(pose: &PlanarKinematicPose, obs: &Obstacle, cfg: &BarrierConfig) -> f64 {
    (pose.x - obs.ox).hypot(pose.y - obs.oy) - (obs.o_r + cfg.r_s)
}

/// Rate of change of the center distance along the line of sight.
///
/// With `relative` set, the obstacle velocity is subtracted from the
/// vehicle velocity first.
pub fn euclid_h_dot(pose: &PlanarKinematicPose, obs: &Obstacle, relative: bool) -> Result<f64> {
    let e = h_dot_eval(pose, obs, relative);
    if e.clamped {
        return Err(Error::LineOfSightUndefined {
            distance: (pose.x - obs.ox).hypot(pose.y - obs.oy),
        });
    }
    Ok(e.value)
}

/// Higher-order Euclidean-distance barrier `h_e = dh/dt + alpha h`, using the
/// relative velocity for moving obstacles.
pub fn ed_cbf(pose: &PlanarKinematicPose, obs: &Obstacle, cfg: &BarrierConfig) -> Result<f64> {
    let e = ed_eval(pose, obs, cfg);
    if e.clamped {
        return Err(Error::LineOfSightUndefined {
            distance: (pose.x - obs.ox).hypot(pose.y - obs.oy),
        });
    }
    Ok(e.value)
}

pub fn turning_radius(speed: f64, r_max: f64) -> f64 {
    speed / r_max
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TurningCenters {
    pub right: (f64, f64),
    pub left: (f64, f64),
}

/// Centers of the right and left turning circles of radius `radius`.
pub fn turning_centers(pose: &PlanarKinematicPose, radius: f64) -> TurningCenters {
    let (s, c) = pose.course.sin_cos();
    TurningCenters {
        right: (pose.x + radius * s, pose.y - radius * c),
        left: (pose.x - radius * s, pose.y + radius * c),
    }
}

/// Clearances `(h_tr, h_tl)` of the right and left turning circles.
pub fn tc_components(pose: &PlanarKinematicPose, obs: &Obstacle, cfg: &BarrierConfig) -> (f64, f64) {
    let (right, left) = tc_component_evals(pose, obs, cfg);
    (right.value, left.value)
}

/// `(1/k) ln((e^{k a} + e^{k b}) / 2)`, shifted by the larger argument so it
/// stays finite for any `k a`, `k b`.
pub fn smooth_max(a: f64, b: f64, k: f64) -> f64 {
    let m = a.max(b);
    let s = (k * (a - m)).exp() + (k * (b - m)).exp();
    m + (0.5 * s).ln() / k
}

/// Turning-circle barrier: smooth maximum of the two circle clearances.
pub fn tc_cbf(pose: &PlanarKinematicPose, obs: &Obstacle, cfg: &BarrierConfig) -> f64 {
    let (r, l) = tc_components(pose, obs, cfg);
    smooth_max(r, l, cfg.k)
}

/// `(h_next - h_now) + decay * h_now`; non-negative iff the discrete decay
/// condition holds.
pub fn discrete_cbf_residual(h_now: f64, h_next: f64, decay: f64) -> f64 {
    (h_next - h_now) + decay * h_now
}

/// Value of the barrier selected by `kind`: `h_e` for ED, `h_t` for TC and
/// the plain clearance `h` for DC.
pub fn barrier_value(kind: BarrierKind, pose: &PlanarKinematicPose, obs: &Obstacle, cfg: &BarrierConfig) -> Result<f64> {
    let e = barrier_eval(kind, pose, obs, cfg);
    if e.clamped {
        return Err(Error::LineOfSightUndefined {
            distance: (pose.x - obs.ox).hypot(pose.y - obs.oy),
        });
    }
    Ok(e.value)
}

/// Analytic gradient of the selected barrier with respect to
/// `(x, y, course, speed)`.
pub fn barrier_gradient(kind: BarrierKind, pose: &PlanarKinematicPose, obs: &Obstacle, cfg: &BarrierConfig) -> Result<[f64; 4]> {
    let e = barrier_eval(kind, pose, obs, cfg);
    if e.clamped && kind != BarrierKind::Tc {
        return Err(Error::LineOfSightUndefined {
            distance: (pose.x - obs.ox).hypot(pose.y - obs.oy),
        });
    }
    Ok(e.gradient)
}

/// Total version of [`barrier_value`] + [`barrier_gradient`] used inside the
/// optimizer: near-singular line-of-sight distances are clamped and flagged
/// instead of failing.
pub fn barrier_eval(kind: BarrierKind, pose: &PlanarKinematicPose, obs: &Obstacle, cfg: &BarrierConfig) -> BarrierEval {
    match kind {
        BarrierKind::Dc => euclid_eval(pose, obs, cfg),
        BarrierKind::Ed => ed_eval(pose, obs, cfg),
        BarrierKind::Tc => tc_eval(pose, obs, cfg),
    }
}

fn euclid_eval(pose: &PlanarKinematicPose, obs: &Obstacle, cfg: &BarrierConfig) -> BarrierEval {
    let (dx, dy) = (pose.x - obs.ox, pose.y - obs.oy);
    let d = dx.hypot(dy);
    let clamped = d < LOS_EPSILON;
    let gradient = if d > 0.0 { [dx / d, dy / d, 0.0, 0.0] } else { [0.0; 4] };
    BarrierEval {
        value: d - (obs.o_r + cfg.r_s),
        gradient,
        clamped,
    }
}

fn h_dot_eval(pose: &PlanarKinematicPose, obs: &Obstacle, relative: bool) -> BarrierEval {
    let (dx, dy) = (pose.x - obs.ox, pose.y - obs.oy);
    let raw = dx.hypot(dy);
    let clamped = raw < LOS_EPSILON;
    let d = raw.max(LOS_EPSILON);
    let (s, c) = pose.course.sin_cos();
    let (mut vx, mut vy) = (pose.speed * c, pose.speed * s);
    if relative {
        vx -= obs.vx;
        vy -= obs.vy;
    }
    let value = (dx * vx + dy * vy) / d;
    let gradient = if clamped {
        // Direction is meaningless at the center; only the velocity terms
        // are kept.
        [0.0, 0.0, 0.0, 0.0]
    } else {
        [
            (vx - value * dx / d) / d,
            (vy - value * dy / d) / d,
            pose.speed * (-dx * s + dy * c) / d,
            (dx * c + dy * s) / d,
        ]
    };
    BarrierEval { value, gradient, clamped }
}

fn ed_eval(pose: &PlanarKinematicPose, obs: &Obstacle, cfg: &BarrierConfig) -> BarrierEval {
    let h = euclid_eval(pose, obs, cfg);
    let hd = h_dot_eval(pose, obs, true);
    let mut gradient = [0.0; 4];
    for (g, (a, b)) in gradient.iter_mut().zip(hd.gradient.iter().zip(&h.gradient)) {
        *g = a + cfg.alpha * b;
    }
    BarrierEval {
        value: hd.value + cfg.alpha * h.value,
        gradient,
        clamped: hd.clamped,
    }
}

fn tc_component_evals(pose: &PlanarKinematicPose, obs: &Obstacle, cfg: &BarrierConfig) -> (BarrierEval, BarrierEval) {
    let radius = turning_radius(pose.speed, cfg.r_max);
    let centers = turning_centers(pose, radius);
    let (s, c) = pose.course.sin_cos();
    let offset = obs.o_r + cfg.r_s + radius;

    // d(center)/d(course) and d(center)/d(speed) for each side.
    let right = circle_eval(centers.right, obs, offset, (radius * c, radius * s), (s / cfg.r_max, -c / cfg.r_max), cfg.r_max);
    let left = circle_eval(centers.left, obs, offset, (-radius * c, -radius * s), (-s / cfg.r_max, c / cfg.r_max), cfg.r_max);
    (right, left)
}

fn circle_eval(
    center: (f64, f64),
    obs: &Obstacle,
    offset: f64,
    d_course: (f64, f64),
    d_speed: (f64, f64),
    r_max: f64,
) -> BarrierEval {
    let (dx, dy) = (center.0 - obs.ox, center.1 - obs.oy);
    let d = dx.hypot(dy);
    let (ux, uy) = if d > 0.0 { (dx / d, dy / d) } else { (0.0, 0.0) };
    BarrierEval {
        value: d - offset,
        gradient: [
            ux,
            uy,
            ux * d_course.0 + uy * d_course.1,
            ux * d_speed.0 + uy * d_speed.1 - 1.0 / r_max,
        ],
        clamped: d < LOS_EPSILON,
    }
}

fn tc_eval(pose: &PlanarKinematicPose, obs: &Obstacle, cfg: &BarrierConfig) -> BarrierEval {
    let (r, l) = tc_component_evals(pose, obs, cfg);
    let m = r.value.max(l.value);
    let er = (cfg.k * (r.value - m)).exp();
    let el = (cfg.k * (l.value - m)).exp();
    let (wr, wl) = (er / (er + el), el / (er + el));
    let mut gradient = [0.0; 4];
    for i in 0..4 {
        gradient[i] = wr * r.gradient[i] + wl * l.gradient[i];
    }
    BarrierEval {
        value: m + (0.5 * (er + el)).ln() / cfg.k,
        gradient,
        clamped: false,
    }
}
