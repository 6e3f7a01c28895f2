//! Finite-horizon optimal control with barrier constraints.
//!
//! The problem over states `x_0..x_N`, inputs `u_0..u_{N-1}` and one slack
//! per barrier row is
//!
//! ```text
//! min  sum_{i<N} |x_i - r_i|_Q^2 + |u_i|_R^2 + |(u_i - u_{i-1})/T_s|_Rd^2
//!      + |x_N - r_N|_P^2 + rho * sum(slack)
//! s.t. x_0 = x_init
//!      x_{i+1} = f_d(x_i, u_i)
//!      u_lo <= u_i <= u_hi
//!      barrier rows + slack >= 0,  slack >= 0
//! ```
//!
//! where the barrier rows are `h(x_{i+1}) - (1 - gamma) h(x_i)` for the ED and
//! TC barriers and `h(x_i)` for the plain distance constraint.

mod qp;
mod reference;
mod sqp;
mod transcription;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::barrier::{BarrierConfig, Obstacle};
use crate::vehicle::VehicleModel;
use crate::{Error, Result};

pub use qp::{solve_qp, QpProblem, QpSolution};
pub use reference::{build_reference, PathSpec};
pub use sqp::{evaluate_cost, kkt_residual, shift_warm_start, sqp_solve, WarmStart};
pub use transcription::{transcribe, CbfRow, Nlp, NlpLayout};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    pub max_sqp_iters: usize,
    pub kkt_tol: f64,
    pub slack_penalty: f64,
    pub line_search_shrink: f64,
    pub max_line_search: usize,
    /// Initial multiple of the identity added to the QP Hessian.
    pub regularization: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            max_sqp_iters: 50,
            kkt_tol: 1e-6,
            slack_penalty: 1e4,
            line_search_shrink: 0.5,
            max_line_search: 30,
            regularization: 1e-8,
        }
    }
}

/// Horizon, weights and input limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MpcConfig {
    pub horizon: usize,
    pub ts: f64,
    /// Diagonal state-error weight.
    pub q: Vec<f64>,
    /// Diagonal input weight.
    pub r: Vec<f64>,
    /// Diagonal input-rate weight.
    pub rd: Vec<f64>,
    /// Diagonal terminal weight.
    pub p: Vec<f64>,
    pub input_lower: Vec<f64>,
    pub input_upper: Vec<f64>,
    #[serde(default)]
    pub solver: SolverSettings,
}

impl MpcConfig {
    /// Unicycle settings: N = 10, T_s = 0.1 s, turn rate limited to `r_max`
    /// and acceleration to 1 m/s^2.
    pub fn unicycle(r_max: f64) -> Self {
        Self {
            horizon: 10,
            ts: 0.1,
            q: vec![0.0, 2.0, 25.0, 100.0],
            r: vec![50.0, 50.0],
            rd: vec![5.0, 5.0],
            p: vec![0.0, 2.0, 25.0, 100.0],
            input_lower: vec![-r_max, -1.0],
            input_upper: vec![r_max, 1.0],
            solver: SolverSettings::default(),
        }
    }

    /// Vessel settings: N = 20, T_s = 0.1 s, thrust in [-20, 30] N per side.
    pub fn asv() -> Self {
        Self {
            horizon: 20,
            ts: 0.1,
            q: vec![0.0, 1.0, 3.0, 50.0, 0.0, 3.0],
            r: vec![1e-6, 1e-6],
            rd: vec![0.03, 0.03],
            p: vec![0.0, 5.0, 15.0, 250.0, 0.0, 15.0],
            input_lower: vec![-20.0, -20.0],
            input_upper: vec![30.0, 30.0],
            solver: SolverSettings::default(),
        }
    }

    pub fn validate(&self, model: &VehicleModel) -> Result<()> {
        let (nx, nu) = (model.state_dim(), model.input_dim());
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.horizon < 1 {
            return bad("horizon must be at least 1".into());
        }
        if !(self.ts > 0.0 && self.ts.is_finite()) {
            return bad(format!("sampling time must be positive, got {}", self.ts));
        }
        for (name, w, len) in [("q", &self.q, nx), ("p", &self.p, nx), ("r", &self.r, nu), ("rd", &self.rd, nu)] {
            if w.len() != len {
                return bad(format!("weight `{name}` needs {len} entries, got {}", w.len()));
            }
            if w.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                return bad(format!("weight `{name}` must be non-negative"));
            }
        }
        if self.input_lower.len() != nu || self.input_upper.len() != nu {
            return bad(format!("input bounds need {nu} entries"));
        }
        if self.input_lower.iter().zip(&self.input_upper).any(|(l, u)| !(l <= u)) {
            return bad("input bounds must be well ordered".into());
        }
        let s = &self.solver;
        if !(s.slack_penalty > 0.0) || !(s.kkt_tol > 0.0) || s.max_sqp_iters == 0 {
            return bad("solver settings must be positive".into());
        }
        if !(s.line_search_shrink > 0.0 && s.line_search_shrink < 1.0) {
            return bad("line-search shrink factor must lie in (0, 1)".into());
        }
        Ok(())
    }

    pub fn clamp_input(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            u.len(),
            u.iter().enumerate().map(|(i, v)| v.clamp(self.input_lower[i], self.input_upper[i])),
        )
    }
}

/// One instance of the receding-horizon problem.
#[derive(Clone, Debug)]
pub struct OcpProblem {
    pub model: VehicleModel,
    pub initial_state: DVector<f64>,
    /// Input applied in the previous control step, for the rate term at i = 0.
    pub previous_input: DVector<f64>,
    /// `r_0..r_N`.
    pub reference: Vec<DVector<f64>>,
    /// `obstacles[j][i]` is obstacle `j` extrapolated to prediction step `i`.
    pub obstacles: Vec<Vec<Obstacle>>,
    pub barrier: BarrierConfig,
}

impl OcpProblem {
    /// Builds a problem whose obstacles are extrapolated at constant velocity
    /// from their current positions over the horizon.
    pub fn new(
        model: VehicleModel,
        initial_state: DVector<f64>,
        previous_input: DVector<f64>,
        reference: Vec<DVector<f64>>,
        obstacles_now: &[Obstacle],
        barrier: BarrierConfig,
        config: &MpcConfig,
    ) -> Self {
        let obstacles = obstacles_now
            .iter()
            .map(|o| (0..=config.horizon).map(|i| o.at_time(i as f64 * config.ts)).collect())
            .collect();
        Self {
            model,
            initial_state,
            previous_input,
            reference,
            obstacles,
            barrier,
        }
    }

    pub fn validate(&self, config: &MpcConfig) -> Result<()> {
        config.validate(&self.model)?;
        self.barrier.validate()?;
        let n = config.horizon;
        if self.initial_state.len() != self.model.state_dim() {
            return Err(Error::InvalidConfig("initial state has the wrong dimension".into()));
        }
        if self.previous_input.len() != self.model.input_dim() {
            return Err(Error::InvalidConfig("previous input has the wrong dimension".into()));
        }
        if self.reference.len() != n + 1 {
            return Err(Error::InvalidConfig(format!(
                "reference needs {} entries, got {}",
                n + 1,
                self.reference.len()
            )));
        }
        if self.obstacles.iter().any(|track| track.len() != n + 1) {
            return Err(Error::InvalidConfig(format!("obstacle tracks need {} entries", n + 1)));
        }
        if self.initial_state.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("initial state must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIters,
    /// Barrier slacks above 1e-6 were needed.
    DegradedFeasibility,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIters => "max_iters",
            SolveStatus::DegradedFeasibility => "degraded_feasibility",
        }
    }
}

/// Slack magnitude above which a solve is reported as degraded.
pub const SLACK_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub inputs: Vec<DVector<f64>>,
    pub states: Vec<DVector<f64>>,
    pub slacks: Vec<f64>,
    pub status: SolveStatus,
    /// Whether the KKT residual reached the tolerance, independent of slack.
    pub kkt_converged: bool,
    pub kkt_residual: f64,
    pub sqp_iterations: usize,
    pub max_slack: f64,
    pub cost: f64,
    /// Multipliers of the barrier rows.
    pub row_multipliers: Vec<f64>,
    /// L1 merit before and after each accepted step, at that step's penalty.
    pub merit_history: Vec<(f64, f64)>,
}
