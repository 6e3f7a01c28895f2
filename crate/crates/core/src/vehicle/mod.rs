//! Vehicle dynamics: the kinematic unicycle and the 3-DOF underactuated
//! surface vessel, plus the fixed-step integrator and its sensitivities.

mod asv;
mod integrate;
mod unicycle;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::barrier::PlanarKinematicPose;

pub use asv::{
    asv_deriv, asv_jacobians, coriolis_matrix, sog_cog, thrust_allocation, AsvInput, AsvParams,
    AsvState,
};
pub use integrate::{rk4_step, rk4_step_with_jacobians};
pub use unicycle::{unicycle_deriv, unicycle_jacobians, UnicycleInput, UnicycleState};

/// Below this speed-over-ground the vessel course falls back to its heading.
pub const MIN_COURSE_SPEED: f64 = 1e-9;

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(angle: f64) -> f64 {
    use std::f64::consts::PI;
    let mut a = angle % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VehicleKind {
    Unicycle,
    Asv,
}

/// Continuous-time model shared by the controller and the simulated plant.
///
/// State and input vectors are laid out as
/// `(x, y, psi, u)` / `(r, a)` for the unicycle and
/// `(x, y, psi, u, v, r)` / `(F_l, F_r)` for the vessel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VehicleModel {
    Unicycle,
    Asv(AsvParams),
}

impl VehicleModel {
    pub fn kind(&self) -> VehicleKind {
        match self {
            VehicleModel::Unicycle => VehicleKind::Unicycle,
            VehicleModel::Asv(_) => VehicleKind::Asv,
        }
    }

    pub fn state_dim(&self) -> usize {
        match self {
            VehicleModel::Unicycle => 4,
            VehicleModel::Asv(_) => 6,
        }
    }

    pub fn input_dim(&self) -> usize {
        2
    }

    /// Index of the heading in the state vector.
    pub fn heading_index(&self) -> usize {
        2
    }

    pub fn deriv(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        match self {
            VehicleModel::Unicycle => {
                let d = unicycle_deriv(&UnicycleState::from_slice(x.as_slice()), &UnicycleInput::from_slice(u.as_slice()));
                DVector::from_row_slice(&d)
            }
            VehicleModel::Asv(p) => {
                let d = asv_deriv(&AsvState::from_slice(x.as_slice()), &AsvInput::from_slice(u.as_slice()), p);
                DVector::from_row_slice(&d)
            }
        }
    }

    /// Analytic Jacobians `(df/dx, df/du)` of the continuous dynamics.
    pub fn jacobians(&self, x: &DVector<f64>, u: &DVector<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        match self {
            VehicleModel::Unicycle => {
                let (a, b) = unicycle_jacobians(&UnicycleState::from_slice(x.as_slice()));
                (
                    DMatrix::from_fn(4, 4, |i, j| a[i][j]),
                    DMatrix::from_fn(4, 2, |i, j| b[i][j]),
                )
            }
            VehicleModel::Asv(p) => {
                let _ = u;
                let (a, b) = asv_jacobians(&AsvState::from_slice(x.as_slice()), p);
                (
                    DMatrix::from_fn(6, 6, |i, j| a[i][j]),
                    DMatrix::from_fn(6, 2, |i, j| b[i][j]),
                )
            }
        }
    }

    /// One RK4 step of length `ts` with the input held constant.
    pub fn step(&self, x: &DVector<f64>, u: &DVector<f64>, ts: f64) -> DVector<f64> {
        rk4_step(|s, i| self.deriv(s, i), x, u, ts)
    }

    /// Position, direction of travel and ground speed.
    ///
    /// For the vessel the course over ground is used, falling back to the
    /// heading when the vessel is (numerically) at rest.
    pub fn pose(&self, x: &DVector<f64>) -> PlanarKinematicPose {
        match self {
            VehicleModel::Unicycle => PlanarKinematicPose::new(x[0], x[1], x[2], x[3]),
            VehicleModel::Asv(_) => {
                let s = AsvState::from_slice(x.as_slice());
                match sog_cog(&s) {
                    Ok((speed, course)) if speed > MIN_COURSE_SPEED => {
                        PlanarKinematicPose::new(s.x, s.y, course, speed)
                    }
                    _ => PlanarKinematicPose::new(s.x, s.y, s.psi, 0.0),
                }
            }
        }
    }

    /// Jacobian (4 x n) of [`VehicleModel::pose`] with respect to the state.
    pub fn pose_jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.state_dim();
        let mut j = DMatrix::zeros(4, n);
        j[(0, 0)] = 1.0;
        j[(1, 1)] = 1.0;
        j[(2, 2)] = 1.0;
        match self {
            VehicleModel::Unicycle => j[(3, 3)] = 1.0,
            VehicleModel::Asv(_) => {
                let (u, v) = (x[3], x[4]);
                let v2 = u * u + v * v;
                let speed = v2.sqrt();
                if speed > MIN_COURSE_SPEED {
                    j[(2, 3)] = -v / v2;
                    j[(2, 4)] = u / v2;
                    j[(3, 3)] = u / speed;
                    j[(3, 4)] = v / speed;
                } else {
                    j[(3, 3)] = 1.0;
                }
            }
        }
        j
    }

    /// Speed tracked against the reference: forward speed for the unicycle,
    /// speed over ground for the vessel.
    pub fn tracked_speed(&self, x: &DVector<f64>) -> f64 {
        match self {
            VehicleModel::Unicycle => x[3],
            VehicleModel::Asv(_) => x[3].hypot(x[4]),
        }
    }

    /// Input offset that commands a small left (counter-clockwise) turn.
    pub fn yaw_input(&self, magnitude: f64) -> DVector<f64> {
        match self {
            VehicleModel::Unicycle => DVector::from_row_slice(&[magnitude, 0.0]),
            VehicleModel::Asv(_) => DVector::from_row_slice(&[-magnitude, magnitude]),
        }
    }
}
