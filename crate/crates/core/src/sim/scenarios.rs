use super::Scenario;
use crate::barrier::{BarrierConfig, BarrierKind, Obstacle};
use crate::nmpc::MpcConfig;
use crate::vehicle::{AsvParams, VehicleModel};
use crate::{Error, Result};

pub const BUILTIN_NAMES: [&str; 6] = [
    "unicycle-static",
    "unicycle-headon",
    "unicycle-overtaking",
    "asv-static",
    "asv-headon",
    "asv-overtaking",
];

const UNICYCLE_SPEED: f64 = 2.0;
const UNICYCLE_R_MAX: f64 = 0.3;
const ASV_SPEED: f64 = 0.9;
const ASV_OBSTACLE_RADIUS: f64 = 4.0;
const ASV_OBSTACLE_SPEED: f64 = 0.3;
/// Vessel obstacles sit this far to starboard of the path. A vessel aimed
/// exactly at an obstacle centre can settle into braking straight ahead
/// under the ED barrier.
const ASV_OBSTACLE_OFFSET: f64 = -1.0;

fn unicycle(name: &str, goal_x: f64, obstacle: Obstacle) -> Scenario {
    Scenario {
        name: name.to_string(),
        vehicle: VehicleModel::Unicycle,
        initial_state: vec![0.0, 0.0, 0.0, UNICYCLE_SPEED],
        initial_input: vec![0.0, 0.0],
        goal_x,
        reference_speed: UNICYCLE_SPEED,
        obstacles: vec![obstacle],
        barrier: BarrierConfig {
            kind: BarrierKind::Tc,
            alpha: 0.5,
            alpha_e: 0.05,
            alpha_t: 0.05,
            r_max: UNICYCLE_R_MAX,
            r_s: 0.5,
            k: 5.0,
        },
        mpc: MpcConfig::unicycle(UNICYCLE_R_MAX),
        max_time: 60.0,
        yaw_bias: 1e-3,
    }
}

/// Per-thruster force holding surge speed `u` in straight-line motion.
fn trim_thrust(p: &AsvParams, u: f64) -> f64 {
    -(p.X_u + p.X_uu * u.abs()) * u / 2.0
}

fn asv(name: &str, goal_x: f64, obstacle: Obstacle) -> Scenario {
    let params = AsvParams::heron_placeholder();
    let trim = trim_thrust(&params, ASV_SPEED);
    Scenario {
        name: name.to_string(),
        vehicle: VehicleModel::Asv(params),
        initial_state: vec![0.0, 0.0, 0.0, ASV_SPEED, 0.0, 0.0],
        initial_input: vec![trim, trim],
        goal_x,
        reference_speed: ASV_SPEED,
        obstacles: vec![obstacle],
        barrier: BarrierConfig {
            kind: BarrierKind::Tc,
            alpha: 1.0,
            alpha_e: 0.015,
            alpha_t: 0.02,
            r_max: 0.2,
            r_s: 1.0,
            k: 5.0,
        },
        mpc: MpcConfig::asv(),
        max_time: 120.0,
        yaw_bias: 1e-3,
    }
}

fn moving(ox: f64, oy: f64, o_r: f64, vx: f64) -> Obstacle {
    Obstacle { ox, oy, o_r, vx, vy: 0.0 }
}

/// The named scenarios, in [`BUILTIN_NAMES`] order. All use the TC barrier;
/// switch with [`Scenario::with_barrier`].
pub fn builtin_scenarios() -> Vec<Scenario> {
    vec![
        unicycle("unicycle-static", 40.0, Obstacle::fixed(15.0, 0.0, 2.0)),
        unicycle("unicycle-headon", 50.0, moving(30.0, 0.0, 1.0, -0.75)),
        unicycle("unicycle-overtaking", 40.0, moving(10.0, 0.0, 1.0, 0.5)),
        asv("asv-static", 40.0, Obstacle::fixed(20.0, ASV_OBSTACLE_OFFSET, ASV_OBSTACLE_RADIUS)),
        asv("asv-headon", 40.0, moving(35.0, ASV_OBSTACLE_OFFSET, ASV_OBSTACLE_RADIUS, -ASV_OBSTACLE_SPEED)),
        asv("asv-overtaking", 40.0, moving(8.0, ASV_OBSTACLE_OFFSET, ASV_OBSTACLE_RADIUS, ASV_OBSTACLE_SPEED)),
    ]
}

pub fn builtin_scenario(name: &str) -> Result<Scenario> {
    builtin_scenarios()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))
}
