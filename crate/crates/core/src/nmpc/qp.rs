//! Dense primal active-set solver for strictly convex QPs
//!
//! ```text
//! minimize    1/2 x'Hx + g'x
//! subject to  lower <= x <= upper
//!             A x >= b
//! ```
//!
//! Bounds are handled by fixing variables rather than as general rows, so
//! each iteration solves a KKT system over the free variables and the
//! active general rows only. A feasible starting point must be supplied.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct QpProblem {
    pub hessian: DMatrix<f64>,
    pub gradient: DVector<f64>,
    /// Variable bounds; use infinities for free variables.
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
    /// General rows `A x >= b`.
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

#[derive(Clone, Debug)]
pub struct QpSolution {
    pub x: DVector<f64>,
    /// Multipliers of the variable bounds: positive when the lower bound is
    /// active, negative when the upper bound is, zero otherwise.
    pub bound_multipliers: DVector<f64>,
    /// Non-negative multipliers of the general rows.
    pub row_multipliers: DVector<f64>,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Lower,
    Upper,
}

const FEAS_TOL: f64 = 1e-9;

impl QpProblem {
    /// Box-only problem.
    pub fn with_bounds(hessian: DMatrix<f64>, gradient: DVector<f64>, lower: DVector<f64>, upper: DVector<f64>) -> Self {
        let n = gradient.len();
        Self {
            hessian,
            gradient,
            lower,
            upper,
            a: DMatrix::zeros(0, n),
            b: DVector::zeros(0),
        }
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.hessian * x)) + self.gradient.dot(x)
    }

    /// Largest constraint violation at `x`.
    pub fn infeasibility(&self, x: &DVector<f64>) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.dim() {
            worst = worst.max(self.lower[j] - x[j]).max(x[j] - self.upper[j]);
        }
        if self.a.nrows() > 0 {
            let ax = &self.a * x;
            for i in 0..ax.len() {
                worst = worst.max(self.b[i] - ax[i]);
            }
        }
        worst
    }

    fn check_dims(&self) -> Result<()> {
        let n = self.dim();
        let ok = self.hessian.shape() == (n, n)
            && self.lower.len() == n
            && self.upper.len() == n
            && self.a.ncols() == n
            && self.a.nrows() == self.b.len();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig("QP dimensions are inconsistent".into()))
        }
    }
}

/// Solves `qp` starting from the feasible point `start`.
pub fn solve_qp(qp: &QpProblem, start: &DVector<f64>) -> Result<QpSolution> {
    qp.check_dims()?;
    let n = qp.dim();
    let m = qp.a.nrows();
    let scale = 1.0 + start.amax();
    if qp.infeasibility(start) > FEAS_TOL * scale {
        return Err(Error::QpInfeasible(format!(
            "starting point violates constraints by {:e}",
            qp.infeasibility(start)
        )));
    }

    let mut x = start.clone();
    for j in 0..n {
        x[j] = x[j].clamp(qp.lower[j], qp.upper[j]);
    }
    let mut fixed: Vec<Option<Side>> = (0..n)
        .map(|j| (qp.lower[j] == qp.upper[j]).then_some(Side::Lower))
        .collect();
    let mut active_rows: Vec<usize> = Vec::new();
    let max_iter = 20 * (n + m) + 100;

    for iteration in 1..=max_iter {
        let c = &qp.hessian * &x + &qp.gradient;
        let free: Vec<usize> = (0..n).filter(|&j| fixed[j].is_none()).collect();
        let (p, lambda) = solve_eqp(qp, &c, &free, &active_rows)?;

        let step_norm = p.amax();
        if step_norm <= 1e-12 * (1.0 + x.amax()) {
            // Stationary on the working set: check multiplier signs.
            let mut w = &c + &qp.hessian * &p;
            for (k, &i) in active_rows.iter().enumerate() {
                w -= qp.a.row(i).transpose() * lambda[k];
            }
            let mut worst: Option<(f64, Release)> = None;
            for (k, &l) in lambda.iter().enumerate() {
                if worst.is_none_or(|(v, _)| l < v) {
                    worst = Some((l, Release::Row(k)));
                }
            }
            for j in 0..n {
                let mu = match fixed[j] {
                    Some(_) if qp.lower[j] == qp.upper[j] => continue,
                    Some(Side::Lower) => w[j],
                    Some(Side::Upper) => -w[j],
                    None => continue,
                };
                if worst.is_none_or(|(v, _)| mu < v) {
                    worst = Some((mu, Release::Bound(j)));
                }
            }
            let tol = 1e-10 * (1.0 + c.amax());
            match worst {
                Some((v, which)) if v < -tol => match which {
                    Release::Row(k) => {
                        active_rows.remove(k);
                    }
                    Release::Bound(j) => fixed[j] = None,
                },
                _ => {
                    let mut bound_multipliers = DVector::zeros(n);
                    for j in 0..n {
                        if fixed[j].is_some() {
                            bound_multipliers[j] = w[j];
                        }
                    }
                    let mut row_multipliers = DVector::zeros(m);
                    for (k, &i) in active_rows.iter().enumerate() {
                        row_multipliers[i] = lambda[k].max(0.0);
                    }
                    return Ok(QpSolution {
                        x,
                        bound_multipliers,
                        row_multipliers,
                        iterations: iteration,
                    });
                }
            }
            continue;
        }

        // Ratio test against inactive constraints.
        let mut alpha = 1.0;
        let mut blocking: Option<Block> = None;
        for &j in &free {
            if p[j] < 0.0 && qp.lower[j].is_finite() {
                let t = ((qp.lower[j] - x[j]) / p[j]).max(0.0);
                if t < alpha {
                    alpha = t;
                    blocking = Some(Block::Bound(j, Side::Lower));
                }
            } else if p[j] > 0.0 && qp.upper[j].is_finite() {
                let t = ((qp.upper[j] - x[j]) / p[j]).max(0.0);
                if t < alpha {
                    alpha = t;
                    blocking = Some(Block::Bound(j, Side::Upper));
                }
            }
        }
        if m > 0 {
            let ap = &qp.a * &p;
            let ax = &qp.a * &x;
            for i in 0..m {
                if active_rows.contains(&i) {
                    continue;
                }
                if ap[i] < -1e-14 * (1.0 + qp.a.row(i).amax() * step_norm) {
                    let t = ((qp.b[i] - ax[i]) / ap[i]).max(0.0);
                    if t < alpha {
                        alpha = t;
                        blocking = Some(Block::Row(i));
                    }
                }
            }
        }
        x += &p * alpha;
        match blocking {
            Some(Block::Bound(j, side)) => {
                x[j] = if side == Side::Lower { qp.lower[j] } else { qp.upper[j] };
                fixed[j] = Some(side);
            }
            Some(Block::Row(i)) => active_rows.push(i),
            None => {}
        }
    }
    Err(Error::QpInfeasible(format!("active-set iteration limit ({max_iter}) reached")))
}

#[derive(Clone, Copy)]
enum Release {
    Row(usize),
    Bound(usize),
}

enum Block {
    Bound(usize, Side),
    Row(usize),
}

/// Equality-constrained step on the working set:
///
/// ```text
/// [ H_FF   -A_WF' ] [p_F]   [-c_F]
/// [ A_WF    0     ] [ l ] = [  0 ]
/// ```
fn solve_eqp(qp: &QpProblem, c: &DVector<f64>, free: &[usize], rows: &[usize]) -> Result<(DVector<f64>, DVector<f64>)> {
    let n = qp.dim();
    let nf = free.len();
    let nr = rows.len();
    let size = nf + nr;
    let mut p = DVector::zeros(n);
    if size == 0 {
        return Ok((p, DVector::zeros(0)));
    }
    let mut kkt = DMatrix::zeros(size, size);
    let mut rhs = DVector::zeros(size);
    for (a, &ja) in free.iter().enumerate() {
        for (b, &jb) in free.iter().enumerate() {
            kkt[(a, b)] = qp.hessian[(ja, jb)];
        }
        rhs[a] = -c[ja];
    }
    for (k, &i) in rows.iter().enumerate() {
        for (a, &ja) in free.iter().enumerate() {
            let v = qp.a[(i, ja)];
            kkt[(nf + k, a)] = v;
            kkt[(a, nf + k)] = -v;
        }
    }
    let sol = kkt
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::QpInfeasible("singular working-set KKT system".into()))?;
    for (a, &ja) in free.iter().enumerate() {
        p[ja] = sol[a];
    }
    Ok((p, sol.rows(nf, nr).into_owned()))
}
