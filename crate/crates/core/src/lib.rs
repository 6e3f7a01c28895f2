//! Collision avoidance for nonholonomic vehicles with control barrier
//! functions embedded in a nonlinear model predictive controller.
//!
//! Two barrier families are provided:
//!
//! - the Euclidean-distance barrier (ED) and its higher-order form
//!   `h_e = dh/dt + alpha * h`;
//! - the turning-circle barrier (TC), a smooth maximum of the clearances of
//!   the vehicle's left and right minimum-radius turning circles.
//!
//! A plain distance constraint (DC) is available as a baseline. The
//! controller transcribes the finite-horizon problem by direct multiple
//! shooting and solves it with a Gauss-Newton SQP whose QP subproblems are
//! condensed and handed to a dense primal active-set solver.
//!
//! ```
//! use tccbf::barrier::{tc_cbf, BarrierConfig, Obstacle, PlanarKinematicPose};
//!
//! let pose = PlanarKinematicPose::new(0.0, 0.0, 0.0, 1.5);
//! let obstacle = Obstacle::fixed(15.0, 0.0, 2.0);
//! let cfg = BarrierConfig { r_max: 0.3, ..BarrierConfig::default() };
//! assert!(tc_cbf(&pose, &obstacle, &cfg) > 8.0);
//! ```

pub mod barrier;
pub mod config;
mod error;
pub mod metrics;
pub mod nmpc;
pub mod plot;
pub mod sim;
pub mod vehicle;

pub use error::{Error, Result};
