//! Python bindings: barrier evaluation, builtin and JSON scenarios,
//! closed-loop runs, metrics, comparison tables, level-set grids and SVG
//! figures.

use pyo3::exceptions::{PyKeyError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use tccbf::barrier::{self, BarrierKind, GridSpec, PlanarKinematicPose};
use tccbf::config::{load_scenario_str, Overrides};
use tccbf::metrics::{self, compute_metrics};
use tccbf::sim::{self, Outcome, BUILTIN_NAMES};
use tccbf::{plot, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::UnknownScenario(_) => PyKeyError::new_err(e.to_string()),
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::NumericalFailure { .. } | Error::QpInfeasible(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn py_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "None".into(), |v| v.to_string())
}

fn parse_kind(kind: &str) -> PyResult<BarrierKind> {
    kind.parse().map_err(to_py)
}

#[pyclass(name = "Obstacle", frozen)]
pub struct PyObstacle(barrier::Obstacle);

#[pymethods]
impl PyObstacle {
    #[new]
    #[pyo3(signature = (ox, oy, o_r, vx = 0.0, vy = 0.0))]
    fn new(ox: f64, oy: f64, o_r: f64, vx: f64, vy: f64) -> PyResult<Self> {
        barrier::Obstacle::new(ox, oy, o_r, vx, vy).map(Self).map_err(to_py)
    }

    /// Position after `t` seconds of constant-velocity motion.
    fn at_time(&self, t: f64) -> Self {
        Self(self.0.at_time(t))
    }

    #[getter]
    fn ox(&self) -> f64 {
        self.0.ox
    }

    #[getter]
    fn oy(&self) -> f64 {
        self.0.oy
    }

    #[getter]
    fn o_r(&self) -> f64 {
        self.0.o_r
    }

    #[getter]
    fn velocity(&self) -> (f64, f64) {
        (self.0.vx, self.0.vy)
    }

    fn __repr__(&self) -> String {
        let o = &self.0;
        format!("Obstacle(ox={}, oy={}, o_r={}, vx={}, vy={})", o.ox, o.oy, o.o_r, o.vx, o.vy)
    }
}

#[pyclass(name = "BarrierConfig", frozen)]
pub struct PyBarrierConfig(barrier::BarrierConfig);

#[pymethods]
impl PyBarrierConfig {
    #[new]
    #[pyo3(signature = (kind = "tc", alpha = 0.5, alpha_e = 0.05, alpha_t = 0.05, r_max = 0.3, r_s = 0.5, k = 5.0))]
    fn new(kind: &str, alpha: f64, alpha_e: f64, alpha_t: f64, r_max: f64, r_s: f64, k: f64) -> PyResult<Self> {
        let cfg = barrier::BarrierConfig { kind: parse_kind(kind)?, alpha, alpha_e, alpha_t, r_max, r_s, k };
        cfg.validate().map_err(to_py)?;
        Ok(Self(cfg))
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind.as_str()
    }

    /// Discrete decay rate of the barrier's constraint rows, if it has one.
    #[getter]
    fn decay(&self) -> Option<f64> {
        self.0.decay()
    }

    fn __repr__(&self) -> String {
        let c = &self.0;
        format!(
            "BarrierConfig(kind='{}', alpha={}, alpha_e={}, alpha_t={}, r_max={}, r_s={}, k={})",
            c.kind, c.alpha, c.alpha_e, c.alpha_t, c.r_max, c.r_s, c.k
        )
    }
}

/// `(1/k) ln((e^{ka} + e^{kb}) / 2)`.
#[pyfunction]
fn smooth_max(a: f64, b: f64, k: f64) -> f64 {
    barrier::smooth_max(a, b, k)
}

/// Barrier value at a planar pose `(x, y, course, speed)`. The kind comes
/// from `config`.
#[pyfunction]
fn barrier_value(
    pose: (f64, f64, f64, f64),
    obstacle: PyRef<'_, PyObstacle>,
    config: PyRef<'_, PyBarrierConfig>,
) -> PyResult<f64> {
    let pose = PlanarKinematicPose::new(pose.0, pose.1, pose.2, pose.3);
    barrier::barrier_value(config.0.kind, &pose, &obstacle.0, &config.0).map_err(to_py)
}

/// Gradient of [`barrier_value`] with respect to `(x, y, course, speed)`.
#[pyfunction]
fn barrier_gradient(
    pose: (f64, f64, f64, f64),
    obstacle: PyRef<'_, PyObstacle>,
    config: PyRef<'_, PyBarrierConfig>,
) -> PyResult<[f64; 4]> {
    let pose = PlanarKinematicPose::new(pose.0, pose.1, pose.2, pose.3);
    barrier::barrier_gradient(config.0.kind, &pose, &obstacle.0, &config.0).map_err(to_py)
}

/// Clearances `(right, left)` of the two turning circles.
#[pyfunction]
fn tc_components(
    pose: (f64, f64, f64, f64),
    obstacle: PyRef<'_, PyObstacle>,
    config: PyRef<'_, PyBarrierConfig>,
) -> (f64, f64) {
    let pose = PlanarKinematicPose::new(pose.0, pose.1, pose.2, pose.3);
    barrier::tc_components(&pose, &obstacle.0, &config.0)
}

#[pyclass(name = "Scenario", frozen)]
pub struct PyScenario(sim::Scenario);

#[pymethods]
impl PyScenario {
    /// One of the names returned by `builtin_names()`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        sim::builtin_scenario(name).map(Self).map_err(to_py)
    }

    /// Scenario JSON, optionally naming a builtin under `"base"`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        load_scenario_str(text).map(Self).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    /// Copy with some parameters replaced. `r_max` also bounds the unicycle
    /// turn rate.
    #[pyo3(signature = (*, barrier = None, alpha = None, alpha_e = None, alpha_t = None, r_max = None, k = None, r_s = None, horizon = None, ts = None, max_time = None))]
    #[allow(clippy::too_many_arguments)]
    fn with_overrides(
        &self,
        barrier: Option<&str>,
        alpha: Option<f64>,
        alpha_e: Option<f64>,
        alpha_t: Option<f64>,
        r_max: Option<f64>,
        k: Option<f64>,
        r_s: Option<f64>,
        horizon: Option<usize>,
        ts: Option<f64>,
        max_time: Option<f64>,
    ) -> PyResult<Self> {
        let overrides = Overrides {
            barrier: barrier.map(parse_kind).transpose()?,
            alpha,
            alpha_e,
            alpha_t,
            r_max,
            k,
            r_s,
            horizon,
            ts,
            max_time,
        };
        let mut s = self.0.clone();
        overrides.apply(&mut s).map_err(to_py)?;
        Ok(Self(s))
    }

    #[getter]
    fn name(&self) -> &str {
        &self.0.name
    }

    #[getter]
    fn barrier(&self) -> PyBarrierConfig {
        PyBarrierConfig(self.0.barrier)
    }

    #[getter]
    fn obstacles(&self) -> Vec<PyObstacle> {
        self.0.obstacles.iter().copied().map(PyObstacle).collect()
    }

    #[getter]
    fn goal_x(&self) -> f64 {
        self.0.goal_x
    }

    /// Runs the closed loop. The solver loop releases the interpreter lock.
    fn run(&self, py: Python<'_>) -> PyResult<PyTrajectory> {
        let scenario = self.0.clone();
        py.detach(move || sim::run_scenario(&scenario)).map(PyTrajectory).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Scenario('{}', barrier='{}')", self.0.name, self.0.barrier.kind)
    }
}

#[pyclass(name = "Trajectory", frozen)]
pub struct PyTrajectory(sim::TrajectoryLog);

#[pymethods]
impl PyTrajectory {
    /// `"reached"`, `"timeout"` or `"failed"`.
    #[getter]
    fn outcome(&self) -> &'static str {
        self.0.outcome.label()
    }

    /// Failure message when the run ended on a numerical failure.
    #[getter]
    fn failure(&self) -> Option<String> {
        match &self.0.outcome {
            Outcome::Failed(m) => Some(m.clone()),
            _ => None,
        }
    }

    #[getter]
    fn scenario(&self) -> PyScenario {
        PyScenario(self.0.scenario.clone())
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.records.iter().map(|r| r.t).collect()
    }

    #[getter]
    fn states(&self) -> Vec<Vec<f64>> {
        self.0.records.iter().map(|r| r.state.clone()).collect()
    }

    /// Applied inputs; the final row has none.
    #[getter]
    fn inputs(&self) -> Vec<Option<Vec<f64>>> {
        self.0.records.iter().map(|r| r.input.clone()).collect()
    }

    #[getter]
    fn max_slack(&self) -> f64 {
        self.0.max_slack()
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    fn sidecar_json(&self) -> String {
        self.0.sidecar_json()
    }

    /// Arrival time, mean speed and cross-track errors, closest approach.
    fn metrics(&self) -> PyMetrics {
        PyMetrics(compute_metrics(&self.0))
    }

    /// `(pairs checked, times of violations)` of the discrete decay
    /// condition over converged steps.
    #[pyo3(signature = (tol = 1e-6))]
    fn decay_violations(&self, tol: f64) -> (usize, Vec<f64>) {
        sim::decay_violations(&self.0, tol)
    }

    fn svg(&self) -> PyResult<String> {
        plot::run_figure_svg(&[&self.0]).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.0.records.len()
    }
}

#[pyclass(name = "Metrics", frozen)]
pub struct PyMetrics(metrics::Metrics);

#[pymethods]
impl PyMetrics {
    #[getter]
    fn scenario(&self) -> &str {
        &self.0.scenario
    }

    #[getter]
    fn controller(&self) -> &'static str {
        self.0.controller()
    }

    #[getter]
    fn outcome(&self) -> &str {
        &self.0.outcome
    }

    #[getter]
    fn t_a(&self) -> Option<f64> {
        self.0.t_a
    }

    #[getter]
    fn e_speed(&self) -> f64 {
        self.0.e_speed
    }

    #[getter]
    fn e_cte(&self) -> f64 {
        self.0.e_cte
    }

    #[getter]
    fn d_min(&self) -> Option<f64> {
        self.0.d_min
    }

    #[getter]
    fn max_slack(&self) -> f64 {
        self.0.max_slack
    }

    #[getter]
    fn degraded_steps(&self) -> usize {
        self.0.degraded_steps
    }

    fn __repr__(&self) -> String {
        let m = &self.0;
        format!(
            "Metrics(scenario='{}', controller='{}', outcome='{}', t_a={}, e_speed={}, e_cte={}, d_min={})",
            m.scenario,
            m.controller(),
            m.outcome,
            py_opt(m.t_a),
            m.e_speed,
            m.e_cte,
            py_opt(m.d_min)
        )
    }
}

/// Aligned text table comparing runs of one scenario; `*` marks the best
/// value of each metric.
#[pyfunction]
fn compare(runs: Vec<PyRef<'_, PyTrajectory>>) -> PyResult<String> {
    let logs: Vec<sim::TrajectoryLog> = runs.iter().map(|r| r.0.clone()).collect();
    metrics::compare(&logs).map(|t| t.to_text()).map_err(to_py)
}

#[pyclass(name = "LevelSetGrid", frozen)]
pub struct PyLevelSetGrid(barrier::LevelSetGrid);

#[pymethods]
impl PyLevelSetGrid {
    #[getter]
    fn xs(&self) -> Vec<f64> {
        self.0.xs.clone()
    }

    #[getter]
    fn ys(&self) -> Vec<f64> {
        self.0.ys.clone()
    }

    /// `values[j][i]` is the barrier at `(xs[i], ys[j])`.
    #[getter]
    fn values(&self) -> Vec<Vec<f64>> {
        self.0.values.clone()
    }

    fn perpendicular_extent(&self) -> Option<f64> {
        self.0.perpendicular_extent()
    }

    fn radial_extent(&self) -> Option<f64> {
        self.0.radial_extent()
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    fn svg(&self) -> PyResult<String> {
        plot::levelset_svg(&self.0).map_err(to_py)
    }
}

/// Barrier over a square grid of vehicle positions at fixed course and
/// speed. The kind comes from `config`.
#[pyfunction]
#[pyo3(signature = (config, obstacle, course, speed, half_width = 12.0, resolution = 0.1))]
fn level_set(
    config: PyRef<'_, PyBarrierConfig>,
    obstacle: PyRef<'_, PyObstacle>,
    course: f64,
    speed: f64,
    half_width: f64,
    resolution: f64,
) -> PyResult<PyLevelSetGrid> {
    let o = &obstacle.0;
    let spec = GridSpec::centered(o.ox, o.oy, half_width, resolution);
    barrier::level_set_grid(config.0.kind, &config.0, o, course, speed, &spec)
        .map(PyLevelSetGrid)
        .map_err(to_py)
}

#[pyfunction]
fn builtin_names() -> Vec<&'static str> {
    BUILTIN_NAMES.to_vec()
}

#[pymodule]
pub fn tccbf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyObstacle>()?;
    m.add_class::<PyBarrierConfig>()?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyMetrics>()?;
    m.add_class::<PyLevelSetGrid>()?;
    m.add_function(wrap_pyfunction!(smooth_max, m)?)?;
    m.add_function(wrap_pyfunction!(barrier_value, m)?)?;
    m.add_function(wrap_pyfunction!(barrier_gradient, m)?)?;
    m.add_function(wrap_pyfunction!(tc_components, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(level_set, m)?)?;
    m.add_function(wrap_pyfunction!(builtin_names, m)?)?;
    Ok(())
}
