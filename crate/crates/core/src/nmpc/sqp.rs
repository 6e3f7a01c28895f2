//! Gauss-Newton SQP with an L1 merit line search.
//!
//! Each iteration condenses the linearized shooting constraints so that the
//! QP only contains input and slack steps, solves it with the active-set
//! solver and then backtracks on the exact-penalty merit function.

use nalgebra::{DMatrix, DVector};

use super::transcription::{Linearization, Nlp};
use super::{solve_qp, transcribe, MpcConfig, OcpProblem, QpProblem, SolveStatus, SolverResult, SLACK_TOL};
use crate::vehicle::VehicleModel;
use crate::{Error, Result};

const ARMIJO: f64 = 1e-4;
const MAX_REGULARIZATION_RETRIES: usize = 8;
const BOUND_TOL: f64 = 1e-9;
/// Shooting defects are driven below this before a solve is accepted.
const PRIMAL_TOL: f64 = 1e-10;

/// Initial guess for the states and inputs over the horizon.
#[derive(Clone, Debug)]
pub struct WarmStart {
    pub states: Vec<DVector<f64>>,
    pub inputs: Vec<DVector<f64>>,
}

impl WarmStart {
    /// Rolls `inputs` out from `x0`.
    pub fn rollout(model: &VehicleModel, x0: &DVector<f64>, inputs: Vec<DVector<f64>>, ts: f64) -> Self {
        let mut states = vec![x0.clone()];
        for u in &inputs {
            let next = model.step(states.last().unwrap(), u, ts);
            states.push(next);
        }
        Self { states, inputs }
    }

    /// Constant-input guess.
    pub fn constant(model: &VehicleModel, x0: &DVector<f64>, u: &DVector<f64>, horizon: usize, ts: f64) -> Self {
        Self::rollout(model, x0, vec![u.clone(); horizon], ts)
    }

    /// Adds `delta` to every input.
    pub fn perturb_inputs(&mut self, delta: &DVector<f64>) {
        for u in &mut self.inputs {
            *u += delta;
        }
    }
}

/// Drops the first stage of a previous solution and repeats the last input
/// to fill the horizon.
pub fn shift_warm_start(prev: &SolverResult, model: &VehicleModel, ts: f64) -> WarmStart {
    let mut inputs: Vec<_> = prev.inputs.iter().skip(1).cloned().collect();
    let last_u = prev.inputs.last().cloned().unwrap_or_else(|| DVector::zeros(model.input_dim()));
    inputs.push(last_u.clone());
    let mut states: Vec<_> = prev.states.iter().skip(1).cloned().collect();
    let tail = model.step(prev.states.last().unwrap(), &last_u, ts);
    states.push(tail);
    WarmStart { states, inputs }
}

/// Objective value of a candidate trajectory, slack penalty included.
pub fn evaluate_cost(nlp: &Nlp, states: &[DVector<f64>], inputs: &[DVector<f64>], slacks: &[f64]) -> f64 {
    nlp.cost(&nlp.pack(states, inputs, slacks))
}

/// Condensed step: `dx_i = e_i + S_i du`.
struct Condensed {
    e: Vec<DVector<f64>>,
    s: Vec<DMatrix<f64>>,
}

fn condense(nlp: &Nlp, z: &DVector<f64>, lin: &Linearization) -> Condensed {
    let l = &nlp.layout;
    let n_u = l.horizon * l.nu;
    let mut e = vec![&nlp.problem.initial_state - nlp.state(z, 0)];
    let mut s = vec![DMatrix::zeros(l.nx, n_u)];
    for i in 0..l.horizon {
        let defect = &lin.predicted[i] - nlp.state(z, i + 1);
        e.push(&lin.a[i] * &e[i] + defect);
        let mut si = &lin.a[i] * &s[i];
        let mut block = si.view_mut((0, i * l.nu), (l.nx, l.nu));
        block += &lin.b[i];
        s.push(si);
    }
    Condensed { e, s }
}

/// Equality multipliers from the state stationarity conditions, given a
/// gradient of the objective with respect to each state.
fn costates(nlp: &Nlp, lin: &Linearization, state_grad: &[DVector<f64>], mu: &[f64]) -> Vec<DVector<f64>> {
    let l = &nlp.layout;
    let mut g: Vec<DVector<f64>> = state_grad.to_vec();
    for (r, grads) in lin.row_grads.iter().enumerate() {
        for (stage, grad) in grads {
            g[*stage] -= grad * mu[r];
        }
    }
    let mut nu = vec![DVector::zeros(l.nx); l.horizon + 1];
    nu[l.horizon] = g[l.horizon].clone();
    for i in (0..l.horizon).rev() {
        nu[i] = &g[i] + lin.a[i].transpose() * &nu[i + 1];
    }
    nu
}

fn state_gradients(nlp: &Nlp, grad: &DVector<f64>) -> Vec<DVector<f64>> {
    (0..=nlp.layout.horizon)
        .map(|i| {
            let r = nlp.layout.state(i);
            grad.rows(r.start, r.len()).into_owned()
        })
        .collect()
}

fn kkt_from_linearization(nlp: &Nlp, z: &DVector<f64>, lin: &Linearization, mu: &[f64]) -> f64 {
    let l = &nlp.layout;
    let grad = &lin.cost_gradient;
    let nu = costates(nlp, lin, &state_gradients(nlp, grad), mu);
    let (lo, hi) = nlp.bounds();

    let mut stationarity = 0.0_f64;
    for i in 0..l.horizon {
        let rng = l.input(i);
        let r = grad.rows(rng.start, l.nu) + lin.b[i].transpose() * &nu[i + 1];
        for k in 0..l.nu {
            let idx = rng.start + k;
            let res = if z[idx] <= lo[idx] + BOUND_TOL {
                (-r[k]).max(0.0)
            } else if z[idx] >= hi[idx] - BOUND_TOL {
                r[k].max(0.0)
            } else {
                r[k].abs()
            };
            stationarity = stationarity.max(res);
        }
    }
    for (r, m) in mu.iter().enumerate() {
        let d = grad[l.slack(r)] - m;
        let res = if z[l.slack(r)] <= BOUND_TOL { (-d).max(0.0) } else { d.abs() };
        stationarity = stationarity.max(res);
    }
    let scale = grad.amax().max(mu.iter().fold(0.0_f64, |a, m| a.max(m.abs()))).max(1.0);

    let c = nlp.equality(z);
    let mut primal = c.amax();
    let mut complementarity = 0.0_f64;
    for (r, g) in lin.row_values.iter().enumerate() {
        primal = primal.max((-g).max(0.0));
        complementarity = complementarity.max((mu[r] * g).abs());
        complementarity = complementarity.max((-mu[r]).max(0.0));
    }
    (stationarity / scale).max(primal).max(complementarity / scale)
}

/// Scaled KKT residual at `z` for barrier-row multipliers `mu`. Equality
/// multipliers are recovered from the state stationarity conditions, and
/// input-bound multipliers are implied by projecting the input gradient.
pub fn kkt_residual(nlp: &Nlp, z: &DVector<f64>, mu: &[f64]) -> f64 {
    kkt_from_linearization(nlp, z, &nlp.linearize(z), mu)
}

fn infeasibility(nlp: &Nlp, z: &DVector<f64>) -> f64 {
    let c: f64 = nlp.equality(z).iter().map(|v| v.abs()).sum();
    let g: f64 = nlp.inequality(z).iter().map(|v| (-v).max(0.0)).sum();
    c + g
}

fn merit(nlp: &Nlp, z: &DVector<f64>, penalty: f64) -> f64 {
    nlp.cost(z) + penalty * infeasibility(nlp, z)
}

fn check_finite(iteration: usize, what: &str, values: &[f64], z: &DVector<f64>) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NumericalFailure {
            iteration,
            what: what.to_string(),
            dump: z.iter().copied().collect(),
        })
    }
}

struct Step {
    dz: DVector<f64>,
    mu: Vec<f64>,
    /// Largest equality multiplier of the QP solution.
    nu_max: f64,
}

fn qp_step(nlp: &Nlp, z: &DVector<f64>, lin: &Linearization, iteration: usize) -> Result<Step> {
    let l = &nlp.layout;
    let cfg = &nlp.config;
    let n_u = l.horizon * l.nu;
    let m = l.n_slack;
    let dim = n_u + m;
    let cond = condense(nlp, z, lin);
    let grad = &lin.cost_gradient;

    let mut h_uu = nlp.input_hessian().clone();
    let mut g_u = grad.rows(l.inputs().start, n_u).into_owned();
    for i in 0..=l.horizon {
        let w = DVector::from_vec(nlp.state_hessian_diag(i));
        let si = &cond.s[i];
        let ws = DMatrix::from_fn(l.nx, n_u, |r, c| w[r] * si[(r, c)]);
        h_uu += si.transpose() * ws;
        let rs = l.state(i);
        let gx = grad.rows(rs.start, l.nx) + w.component_mul(&cond.e[i]);
        g_u += si.transpose() * gx;
    }

    let mut gradient = DVector::zeros(dim);
    gradient.rows_mut(0, n_u).copy_from(&g_u);
    let mut lower = DVector::zeros(dim);
    let mut upper = DVector::from_element(dim, f64::INFINITY);
    for i in 0..l.horizon {
        for k in 0..l.nu {
            let idx = l.input(i).start + k;
            lower[i * l.nu + k] = cfg.input_lower[k] - z[idx];
            upper[i * l.nu + k] = cfg.input_upper[k] - z[idx];
        }
    }
    let mut a = DMatrix::zeros(m, dim);
    let mut b = DVector::zeros(m);
    for (r, grads) in lin.row_grads.iter().enumerate() {
        let mut offset = lin.row_values[r];
        for (stage, g) in grads {
            let row = g.transpose() * &cond.s[*stage];
            let mut target = a.view_mut((r, 0), (1, n_u));
            target += row;
            offset += g.dot(&cond.e[*stage]);
        }
        a[(r, n_u + r)] = 1.0;
        b[r] = -offset;
        gradient[n_u + r] = grad[l.slack(r)];
        lower[n_u + r] = -z[l.slack(r)];
    }
    check_finite(iteration, "QP data", h_uu.as_slice(), z)?;
    check_finite(iteration, "QP data", a.as_slice(), z)?;
    check_finite(iteration, "QP data", b.as_slice(), z)?;
    check_finite(iteration, "QP data", gradient.as_slice(), z)?;

    let mut start = DVector::zeros(dim);
    for i in 0..n_u {
        start[i] = 0.0_f64.clamp(lower[i], upper[i]);
    }
    for r in 0..m {
        start[n_u + r] = lower[n_u + r].max(b[r] - (a.row(r).columns(0, n_u) * start.rows(0, n_u))[0]);
    }

    let mut reg = cfg.solver.regularization;
    let mut last_err = None;
    for _ in 0..=MAX_REGULARIZATION_RETRIES {
        let mut hessian = DMatrix::zeros(dim, dim);
        hessian.view_mut((0, 0), (n_u, n_u)).copy_from(&h_uu);
        for d in 0..dim {
            hessian[(d, d)] += reg;
        }
        let qp = QpProblem {
            hessian,
            gradient: gradient.clone(),
            lower: lower.clone(),
            upper: upper.clone(),
            a: a.clone(),
            b: b.clone(),
        };
        match solve_qp(&qp, &start) {
            Ok(sol) => {
                let du = sol.x.rows(0, n_u).into_owned();
                let mut dz = DVector::zeros(l.len());
                for i in 0..=l.horizon {
                    let dx = &cond.e[i] + &cond.s[i] * &du;
                    dz.rows_mut(l.state(i).start, l.nx).copy_from(&dx);
                }
                dz.rows_mut(l.inputs().start, n_u).copy_from(&du);
                for r in 0..m {
                    dz[l.slack(r)] = sol.x[n_u + r];
                }
                let mu: Vec<f64> = sol.row_multipliers.iter().copied().collect();
                let model_grad: Vec<DVector<f64>> = (0..=l.horizon)
                    .map(|i| {
                        let w = DVector::from_vec(nlp.state_hessian_diag(i));
                        let rs = l.state(i);
                        grad.rows(rs.start, l.nx) + w.component_mul(&dz.rows(rs.start, l.nx))
                    })
                    .collect();
                let nu = costates(nlp, lin, &model_grad, &mu);
                let nu_max = nu.iter().fold(0.0_f64, |acc, v| acc.max(v.amax()));
                check_finite(iteration, "QP step", dz.as_slice(), z)?;
                return Ok(Step { dz, mu, nu_max });
            }
            Err(e) => {
                last_err = Some(e);
                reg *= 10.0;
            }
        }
    }
    Err(last_err.unwrap_or_else(|| Error::QpInfeasible("QP solve failed".into())))
}

/// Solves one receding-horizon problem.
pub fn sqp_solve(problem: &OcpProblem, config: &MpcConfig, warm: Option<&WarmStart>) -> Result<SolverResult> {
    let nlp = transcribe(problem, config)?;
    let l = nlp.layout;
    let model = &problem.model;

    let guess = match warm {
        Some(w) if w.states.len() == l.horizon + 1 && w.inputs.len() == l.horizon => w.clone(),
        Some(_) => return Err(Error::InvalidConfig("warm start has the wrong horizon".into())),
        None => WarmStart::constant(
            model,
            &problem.initial_state,
            &config.clamp_input(&DVector::zeros(model.input_dim())),
            l.horizon,
            config.ts,
        ),
    };
    let mut states = guess.states;
    states[0] = problem.initial_state.clone();
    let inputs: Vec<_> = guess.inputs.iter().map(|u| config.clamp_input(u)).collect();
    let mut z = nlp.pack(&states, &inputs, &[]);
    let slacks = nlp.minimal_slacks(&z);
    for (r, s) in slacks.iter().enumerate() {
        z[l.slack(r)] = *s;
    }
    check_finite(0, "initial guess", z.as_slice(), &z)?;

    let settings = config.solver;
    let mut penalty = 0.0_f64;
    let mut mu = vec![0.0; l.n_slack];
    let mut merit_history = Vec::new();
    let mut kkt = f64::INFINITY;
    let mut iterations = 0;
    let mut lin = nlp.linearize(&z);

    for it in 0..settings.max_sqp_iters {
        iterations = it + 1;
        let step = qp_step(&nlp, &z, &lin, it)?;
        let mult_max = step.mu.iter().fold(step.nu_max, |a, m| a.max(m.abs()));
        penalty = penalty.max(1.1 * mult_max + 1.0);

        let phi0 = merit(&nlp, &z, penalty);
        let slope = lin.cost_gradient.dot(&step.dz) - penalty * infeasibility(&nlp, &z);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..settings.max_line_search {
            let trial = &z + &step.dz * t;
            let phi = merit(&nlp, &trial, penalty);
            if phi.is_finite() && phi <= phi0 + ARMIJO * t * slope.min(0.0) {
                accepted = Some((trial, phi));
                break;
            }
            t *= settings.line_search_shrink;
        }
        let Some((trial, phi)) = accepted else {
            // No acceptable step along the search direction.
            kkt = kkt_from_linearization(&nlp, &z, &lin, &mu);
            break;
        };
        merit_history.push((phi0, phi));
        z = trial;
        // Keep bounded variables exactly inside their boxes.
        let (lo, hi) = nlp.bounds();
        for k in l.inputs().start..l.len() {
            z[k] = z[k].clamp(lo[k], hi[k]);
        }
        check_finite(it, "iterate", z.as_slice(), &z)?;
        mu = step.mu;
        lin = nlp.linearize(&z);
        kkt = kkt_from_linearization(&nlp, &z, &lin, &mu);
        if kkt <= settings.kkt_tol && nlp.equality(&z).amax() <= PRIMAL_TOL {
            break;
        }
    }

    let (states, inputs, slacks) = nlp.unpack(&z);
    let max_slack = slacks.iter().fold(0.0_f64, |a, s| a.max(*s));
    let kkt_converged = kkt <= settings.kkt_tol;
    let status = if max_slack > SLACK_TOL {
        SolveStatus::DegradedFeasibility
    } else if kkt_converged {
        SolveStatus::Converged
    } else {
        SolveStatus::MaxIters
    };
    Ok(SolverResult {
        cost: nlp.cost(&z),
        inputs,
        states,
        slacks,
        status,
        kkt_converged,
        kkt_residual: kkt,
        sqp_iterations: iterations,
        max_slack,
        row_multipliers: mu,
        merit_history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::{BarrierConfig, BarrierKind, Obstacle};
    use crate::nmpc::{build_reference, PathSpec};

    fn unicycle_problem(x0: [f64; 4], obstacles: &[Obstacle], kind: BarrierKind) -> (OcpProblem, MpcConfig) {
        let cfg = MpcConfig::unicycle(0.3);
        let model = VehicleModel::Unicycle;
        let p = OcpProblem::new(
            model.clone(),
            DVector::from_row_slice(&x0),
            DVector::zeros(2),
            build_reference(&model, &PathSpec::along_x(2.0), cfg.horizon).unwrap(),
            obstacles,
            BarrierConfig { kind, ..BarrierConfig::default() },
            &cfg,
        );
        (p, cfg)
    }

    #[test]
    fn equilibrium_needs_no_input() {
        let (p, cfg) = unicycle_problem([0.0, 0.0, 0.0, 2.0], &[], BarrierKind::Tc);
        let res = sqp_solve(&p, &cfg, None).unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        for u in &res.inputs {
            assert!(u.amax() <= 1e-6);
        }
        assert!(res.cost.abs() < 1e-10);
    }

    #[test]
    fn far_obstacle_matches_free_solution() {
        let x0 = [0.0, 1.0, 0.1, 1.8];
        let (free, cfg) = unicycle_problem(x0, &[], BarrierKind::Tc);
        let (far, _) = unicycle_problem(x0, &[Obstacle::fixed(500.0, 300.0, 1.0)], BarrierKind::Tc);
        let a = sqp_solve(&free, &cfg, None).unwrap();
        let b = sqp_solve(&far, &cfg, None).unwrap();
        assert_eq!(a.status, SolveStatus::Converged);
        assert_eq!(b.status, SolveStatus::Converged);
        for (ua, ub) in a.inputs.iter().zip(&b.inputs) {
            assert!((ua - ub).amax() <= 1e-6);
        }
    }

    #[test]
    fn overlapping_obstacle_degrades() {
        let (p, cfg) = unicycle_problem([0.0, 0.0, 0.0, 2.0], &[Obstacle::fixed(1.0, 0.0, 2.0)], BarrierKind::Dc);
        let res = sqp_solve(&p, &cfg, None).unwrap();
        assert_eq!(res.status, SolveStatus::DegradedFeasibility);
        assert!(res.max_slack > 0.0);
    }

    #[test]
    fn avoids_obstacle_ahead() {
        for kind in BarrierKind::ALL {
            let (p, cfg) = unicycle_problem([0.0, 0.3, 0.0, 2.0], &[Obstacle::fixed(6.0, 0.0, 1.0)], kind);
            let res = sqp_solve(&p, &cfg, None).unwrap();
            assert_eq!(res.status, SolveStatus::Converged, "{kind}");
            assert!(res.max_slack <= SLACK_TOL);
            for w in res.merit_history.iter() {
                assert!(w.1 <= w.0 + 1e-9, "{kind}: merit rose {w:?}");
            }
            let nlp = transcribe(&p, &cfg).unwrap();
            let z = nlp.pack(&res.states, &res.inputs, &res.slacks);
            assert!(nlp.equality(&z).amax() <= 1e-8);
            assert!(nlp.inequality(&z).iter().all(|g| *g >= -1e-8));
            for u in &res.inputs {
                assert!(u[0].abs() <= 0.3 + 1e-12 && u[1].abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn shift_drops_first_stage() {
        let (p, cfg) = unicycle_problem([0.0, 0.5, 0.0, 2.0], &[], BarrierKind::Tc);
        let res = sqp_solve(&p, &cfg, None).unwrap();
        let w = shift_warm_start(&res, &p.model, cfg.ts);
        assert_eq!(w.inputs.len(), cfg.horizon);
        assert_eq!(w.states.len(), cfg.horizon + 1);
        assert_eq!(w.inputs[0], res.inputs[1]);
        assert_eq!(w.inputs[cfg.horizon - 1], res.inputs[cfg.horizon - 1]);
        assert_eq!(w.states[0], res.states[1]);
        let tail = p.model.step(&res.states[cfg.horizon], &res.inputs[cfg.horizon - 1], cfg.ts);
        assert_eq!(w.states[cfg.horizon], tail);
    }

    #[test]
    fn warm_start_reconverges_quickly() {
        let (p, cfg) = unicycle_problem([0.0, 0.5, 0.05, 2.0], &[Obstacle::fixed(8.0, 0.0, 1.0)], BarrierKind::Tc);
        let first = sqp_solve(&p, &cfg, None).unwrap();
        let warm = WarmStart { states: first.states.clone(), inputs: first.inputs.clone() };
        let again = sqp_solve(&p, &cfg, Some(&warm)).unwrap();
        assert!(again.kkt_converged);
        assert!(again.sqp_iterations <= 2);
    }

    #[test]
    fn shift_with_unit_horizon_repeats_final_entries() {
        let model = VehicleModel::Unicycle;
        let x0 = DVector::from_row_slice(&[0.0, 0.0, 0.0, 2.0]);
        let u = DVector::from_row_slice(&[0.1, 0.2]);
        let w = WarmStart::constant(&model, &x0, &u, 1, 0.1);
        let prev = SolverResult {
            inputs: w.inputs.clone(),
            states: w.states.clone(),
            slacks: vec![],
            status: SolveStatus::Converged,
            kkt_converged: true,
            kkt_residual: 0.0,
            sqp_iterations: 1,
            max_slack: 0.0,
            cost: 0.0,
            row_multipliers: vec![],
            merit_history: vec![],
        };
        let shifted = shift_warm_start(&prev, &model, 0.1);
        assert_eq!(shifted.inputs, vec![u.clone()]);
        assert_eq!(shifted.states[0], w.states[1]);
        assert_eq!(shifted.states[1], model.step(&w.states[1], &u, 0.1));
    }

    #[test]
    fn shifted_tracking_solution_reconverges() {
        let (p, cfg) = unicycle_problem([0.0, 0.4, 0.0, 1.9], &[], BarrierKind::Tc);
        let first = sqp_solve(&p, &cfg, None).unwrap();
        let x1 = p.model.step(&p.initial_state, &first.inputs[0], cfg.ts);
        let next = OcpProblem { initial_state: x1, previous_input: first.inputs[0].clone(), ..p.clone() };
        let warm = shift_warm_start(&first, &p.model, cfg.ts);
        let res = sqp_solve(&next, &cfg, Some(&warm)).unwrap();
        assert!(res.kkt_converged);
        assert!(res.sqp_iterations <= 2, "took {}", res.sqp_iterations);
    }

    #[test]
    fn deterministic() {
        let (p, cfg) = unicycle_problem([0.0, 0.2, 0.0, 2.0], &[Obstacle::new(9.0, 0.0, 1.0, -0.75, 0.0).unwrap()], BarrierKind::Ed);
        let a = sqp_solve(&p, &cfg, None).unwrap();
        let b = sqp_solve(&p, &cfg, None).unwrap();
        assert_eq!(a.inputs, b.inputs);
        assert_eq!(a.states, b.states);
        assert_eq!(a.sqp_iterations, b.sqp_iterations);
    }

    #[test]
    fn stage_cost_of_single_offset() {
        let (p, cfg) = unicycle_problem([0.0, 0.0, 0.0, 2.0], &[], BarrierKind::Tc);
        let nlp = transcribe(&p, &cfg).unwrap();
        let mut states = p.reference.clone();
        let delta = 0.3;
        states[3][1] += delta;
        let cost = evaluate_cost(&nlp, &states, &vec![DVector::zeros(2); 10], &[]);
        assert!((cost - 2.0 * delta * delta).abs() < 1e-12);
        assert_eq!(evaluate_cost(&nlp, &p.reference, &vec![DVector::zeros(2); 10], &[]), 0.0);
    }

    #[test]
    fn wrong_warm_start_rejected() {
        let (p, cfg) = unicycle_problem([0.0, 0.0, 0.0, 2.0], &[], BarrierKind::Tc);
        let warm = WarmStart { states: vec![], inputs: vec![] };
        assert!(matches!(sqp_solve(&p, &cfg, Some(&warm)), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn nan_state_is_reported() {
        let (mut p, cfg) = unicycle_problem([0.0, 0.0, 0.0, 2.0], &[], BarrierKind::Tc);
        p.reference[2][1] = f64::NAN;
        assert!(matches!(sqp_solve(&p, &cfg, None), Err(Error::NumericalFailure { .. })));
    }
}
