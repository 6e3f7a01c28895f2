//! Direct multiple-shooting transcription.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};

use super::{MpcConfig, OcpProblem};
use crate::barrier::{barrier_eval, BarrierKind, Obstacle};
use crate::vehicle::{rk4_step_with_jacobians, wrap_angle};
use crate::Result;

/// Offsets of the blocks inside the decision vector
/// `[x_0 .. x_N, u_0 .. u_{N-1}, s_0 .. s_{m-1}]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NlpLayout {
    pub nx: usize,
    pub nu: usize,
    pub horizon: usize,
    pub n_slack: usize,
}

impl NlpLayout {
    pub fn state(&self, i: usize) -> Range<usize> {
        i * self.nx..(i + 1) * self.nx
    }

    pub fn input(&self, i: usize) -> Range<usize> {
        let base = (self.horizon + 1) * self.nx;
        base + i * self.nu..base + (i + 1) * self.nu
    }

    pub fn inputs(&self) -> Range<usize> {
        let base = (self.horizon + 1) * self.nx;
        base..base + self.horizon * self.nu
    }

    pub fn slack(&self, r: usize) -> usize {
        (self.horizon + 1) * self.nx + self.horizon * self.nu + r
    }

    pub fn len(&self) -> usize {
        (self.horizon + 1) * self.nx + self.horizon * self.nu + self.n_slack
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_equality(&self) -> usize {
        (self.horizon + 1) * self.nx
    }
}

/// One softened barrier row: obstacle `obstacle` at prediction step
/// `stage`. Decay rows couple `stage` and `stage + 1`; distance rows only
/// touch `stage`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CbfRow {
    pub obstacle: usize,
    pub stage: usize,
}

/// The transcribed nonlinear program.
#[derive(Clone, Debug)]
pub struct Nlp {
    pub problem: OcpProblem,
    pub config: MpcConfig,
    pub layout: NlpLayout,
    pub rows: Vec<CbfRow>,
    input_hessian: DMatrix<f64>,
}

/// Barrier value with its gradient with respect to the full state.
#[derive(Clone, Debug)]
pub(crate) struct StateBarrier {
    pub value: f64,
    pub gradient: DVector<f64>,
}

/// First-order data of the NLP at one point.
#[derive(Clone, Debug)]
pub(crate) struct Linearization {
    /// `f_d(x_i, u_i)` for `i < N`.
    pub predicted: Vec<DVector<f64>>,
    pub a: Vec<DMatrix<f64>>,
    pub b: Vec<DMatrix<f64>>,
    /// Row values including their slack.
    pub row_values: Vec<f64>,
    /// Per row, `(stage, d row / d x_stage)`.
    pub row_grads: Vec<Vec<(usize, DVector<f64>)>>,
    pub cost_gradient: DVector<f64>,
}

pub fn transcribe(problem: &OcpProblem, config: &MpcConfig) -> Result<Nlp> {
    problem.validate(config)?;
    let n = config.horizon;
    let nx = problem.model.state_dim();
    let nu = problem.model.input_dim();

    let mut rows = Vec::new();
    let stages = match problem.barrier.kind {
        BarrierKind::Dc => n + 1,
        BarrierKind::Ed | BarrierKind::Tc => n,
    };
    for stage in 0..stages {
        for obstacle in 0..problem.obstacles.len() {
            rows.push(CbfRow { obstacle, stage });
        }
    }

    // Input block of the (constant) cost Hessian.
    let rate = |k: usize| 2.0 * config.rd[k] / (config.ts * config.ts);
    let mut h = DMatrix::zeros(n * nu, n * nu);
    for i in 0..n {
        for k in 0..nu {
            let d = i * nu + k;
            h[(d, d)] += 2.0 * config.r[k] + rate(k);
            if i + 1 < n {
                let e = (i + 1) * nu + k;
                h[(d, d)] += rate(k);
                h[(d, e)] -= rate(k);
                h[(e, d)] -= rate(k);
            }
        }
    }

    Ok(Nlp {
        problem: problem.clone(),
        config: config.clone(),
        layout: NlpLayout {
            nx,
            nu,
            horizon: n,
            n_slack: rows.len(),
        },
        rows,
        input_hessian: h,
    })
}

impl Nlp {
    pub fn state<'a>(&self, z: &'a DVector<f64>, i: usize) -> nalgebra::DVectorView<'a, f64> {
        let r = self.layout.state(i);
        z.rows(r.start, r.len())
    }

    pub fn input<'a>(&self, z: &'a DVector<f64>, i: usize) -> nalgebra::DVectorView<'a, f64> {
        let r = self.layout.input(i);
        z.rows(r.start, r.len())
    }

    pub fn pack(&self, states: &[DVector<f64>], inputs: &[DVector<f64>], slacks: &[f64]) -> DVector<f64> {
        let mut z = DVector::zeros(self.layout.len());
        for (i, x) in states.iter().enumerate() {
            z.rows_mut(self.layout.state(i).start, self.layout.nx).copy_from(x);
        }
        for (i, u) in inputs.iter().enumerate() {
            z.rows_mut(self.layout.input(i).start, self.layout.nu).copy_from(u);
        }
        for (r, s) in slacks.iter().enumerate() {
            z[self.layout.slack(r)] = *s;
        }
        z
    }

    pub fn unpack(&self, z: &DVector<f64>) -> (Vec<DVector<f64>>, Vec<DVector<f64>>, Vec<f64>) {
        let l = &self.layout;
        (
            (0..=l.horizon).map(|i| self.state(z, i).into_owned()).collect(),
            (0..l.horizon).map(|i| self.input(z, i).into_owned()).collect(),
            (0..l.n_slack).map(|r| z[l.slack(r)]).collect(),
        )
    }

    /// Diagonal of the state Hessian at stage `i` (`2Q`, or `2P` at `N`).
    pub fn state_hessian_diag(&self, i: usize) -> Vec<f64> {
        let w = if i == self.layout.horizon { &self.config.p } else { &self.config.q };
        w.iter().map(|v| 2.0 * v).collect()
    }

    pub fn input_hessian(&self) -> &DMatrix<f64> {
        &self.input_hessian
    }

    fn state_error(&self, z: &DVector<f64>, i: usize) -> DVector<f64> {
        let mut e = self.state(z, i) - &self.problem.reference[i];
        let h = self.problem.model.heading_index();
        e[h] = wrap_angle(e[h]);
        e
    }

    fn rate(&self, z: &DVector<f64>, i: usize) -> DVector<f64> {
        let prev = if i == 0 {
            self.problem.previous_input.clone()
        } else {
            self.input(z, i - 1).into_owned()
        };
        (self.input(z, i) - prev) / self.config.ts
    }

    pub fn cost(&self, z: &DVector<f64>) -> f64 {
        let c = &self.config;
        let l = &self.layout;
        let quad = |v: &DVector<f64>, w: &[f64]| v.iter().zip(w).map(|(a, b)| b * a * a).sum::<f64>();
        let mut total = 0.0;
        for i in 0..l.horizon {
            total += quad(&self.state_error(z, i), &c.q);
            total += quad(&self.input(z, i).into_owned(), &c.r);
            total += quad(&self.rate(z, i), &c.rd);
        }
        total += quad(&self.state_error(z, l.horizon), &c.p);
        total + c.solver.slack_penalty * (0..l.n_slack).map(|r| z[l.slack(r)]).sum::<f64>()
    }

    pub fn cost_gradient(&self, z: &DVector<f64>) -> DVector<f64> {
        let l = &self.layout;
        let mut g = DVector::zeros(l.len());
        for i in 0..=l.horizon {
            let e = self.state_error(z, i);
            let w = self.state_hessian_diag(i);
            let base = l.state(i).start;
            for k in 0..l.nx {
                g[base + k] = w[k] * e[k];
            }
        }
        // Input terms: H_uu u minus the contribution of the fixed previous input.
        let u = z.rows(l.inputs().start, l.horizon * l.nu);
        let gu = &self.input_hessian * u;
        g.rows_mut(l.inputs().start, l.horizon * l.nu).copy_from(&gu);
        let ts2 = self.config.ts * self.config.ts;
        for k in 0..l.nu {
            g[l.input(0).start + k] -= 2.0 * self.config.rd[k] * self.problem.previous_input[k] / ts2;
        }
        for r in 0..l.n_slack {
            g[l.slack(r)] = self.config.solver.slack_penalty;
        }
        g
    }

    /// Barrier of the configured kind at state `x` against `obs`.
    pub(crate) fn barrier(&self, x: &DVector<f64>, obs: &Obstacle) -> StateBarrier {
        let model = &self.problem.model;
        let pose = model.pose(x);
        let e = barrier_eval(self.problem.barrier.kind, &pose, obs, &self.problem.barrier);
        let jp = model.pose_jacobian(x);
        let gp = DVector::from_row_slice(&e.gradient);
        StateBarrier {
            value: e.value,
            gradient: jp.transpose() * gp,
        }
    }

    fn decay(&self) -> f64 {
        self.problem.barrier.decay().unwrap_or(1.0)
    }

    /// Barrier row values (slack included) and their state gradients.
    fn rows_with_grads(&self, z: &DVector<f64>, want_grads: bool) -> (Vec<f64>, Vec<Vec<(usize, DVector<f64>)>>) {
        let mut values = Vec::with_capacity(self.rows.len());
        let mut grads = Vec::with_capacity(if want_grads { self.rows.len() } else { 0 });
        let kind = self.problem.barrier.kind;
        for (r, row) in self.rows.iter().enumerate() {
            let track = &self.problem.obstacles[row.obstacle];
            let slack = z[self.layout.slack(r)];
            let now = self.barrier(&self.state(z, row.stage).into_owned(), &track[row.stage]);
            match kind {
                BarrierKind::Dc => {
                    values.push(now.value + slack);
                    if want_grads {
                        grads.push(vec![(row.stage, now.gradient)]);
                    }
                }
                BarrierKind::Ed | BarrierKind::Tc => {
                    let keep = 1.0 - self.decay();
                    let next = self.barrier(&self.state(z, row.stage + 1).into_owned(), &track[row.stage + 1]);
                    values.push(next.value - keep * now.value + slack);
                    if want_grads {
                        grads.push(vec![(row.stage, now.gradient * -keep), (row.stage + 1, next.gradient)]);
                    }
                }
            }
        }
        (values, grads)
    }

    /// Barrier rows `>= 0`, slack included.
    pub fn inequality(&self, z: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(self.rows_with_grads(z, false).0)
    }

    /// Initial-condition and shooting residuals.
    pub fn equality(&self, z: &DVector<f64>) -> DVector<f64> {
        let l = &self.layout;
        let model = &self.problem.model;
        let mut c = DVector::zeros(l.n_equality());
        c.rows_mut(0, l.nx).copy_from(&(self.state(z, 0) - &self.problem.initial_state));
        for i in 0..l.horizon {
            let next = model.step(&self.state(z, i).into_owned(), &self.input(z, i).into_owned(), self.config.ts);
            c.rows_mut(l.state(i + 1).start, l.nx).copy_from(&(self.state(z, i + 1) - next));
        }
        c
    }

    pub fn equality_jacobian(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let l = &self.layout;
        let lin = self.linearize(z);
        let mut j = DMatrix::zeros(l.n_equality(), l.len());
        for i in 0..=l.horizon {
            let rs = l.state(i).start;
            j.view_mut((rs, rs), (l.nx, l.nx)).fill_with_identity();
            if i > 0 {
                j.view_mut((rs, l.state(i - 1).start), (l.nx, l.nx)).copy_from(&(-&lin.a[i - 1]));
                j.view_mut((rs, l.input(i - 1).start), (l.nx, l.nu)).copy_from(&(-&lin.b[i - 1]));
            }
        }
        j
    }

    pub fn inequality_jacobian(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let l = &self.layout;
        let (_, grads) = self.rows_with_grads(z, true);
        let mut j = DMatrix::zeros(self.rows.len(), l.len());
        for (r, g) in grads.iter().enumerate() {
            for (stage, grad) in g {
                let base = l.state(*stage).start;
                for k in 0..l.nx {
                    j[(r, base + k)] += grad[k];
                }
            }
            j[(r, l.slack(r))] = 1.0;
        }
        j
    }

    /// Variable bounds: input box, non-negative slacks, free states.
    pub fn bounds(&self) -> (DVector<f64>, DVector<f64>) {
        let l = &self.layout;
        let mut lo = DVector::from_element(l.len(), f64::NEG_INFINITY);
        let mut hi = DVector::from_element(l.len(), f64::INFINITY);
        for i in 0..l.horizon {
            let base = l.input(i).start;
            for k in 0..l.nu {
                lo[base + k] = self.config.input_lower[k];
                hi[base + k] = self.config.input_upper[k];
            }
        }
        for r in 0..l.n_slack {
            lo[l.slack(r)] = 0.0;
        }
        (lo, hi)
    }

    pub(crate) fn linearize(&self, z: &DVector<f64>) -> Linearization {
        let l = &self.layout;
        let mut predicted = Vec::with_capacity(l.horizon);
        let mut a = Vec::with_capacity(l.horizon);
        let mut b = Vec::with_capacity(l.horizon);
        for i in 0..l.horizon {
            let (next, ai, bi) = rk4_step_with_jacobians(
                &self.problem.model,
                &self.state(z, i).into_owned(),
                &self.input(z, i).into_owned(),
                self.config.ts,
            );
            predicted.push(next);
            a.push(ai);
            b.push(bi);
        }
        let (row_values, row_grads) = self.rows_with_grads(z, true);
        Linearization {
            predicted,
            a,
            b,
            row_values,
            row_grads,
            cost_gradient: self.cost_gradient(z),
        }
    }

    /// Slacks that make every barrier row hold at `z` (ignoring the slack
    /// entries already in `z`).
    pub(crate) fn minimal_slacks(&self, z: &DVector<f64>) -> Vec<f64> {
        let mut z0 = z.clone();
        for r in 0..self.layout.n_slack {
            z0[self.layout.slack(r)] = 0.0;
        }
        self.inequality(&z0).iter().map(|v| (-v).max(0.0)).collect()
    }
}
