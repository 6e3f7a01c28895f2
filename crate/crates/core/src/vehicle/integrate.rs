use nalgebra::{DMatrix, DVector};

use super::VehicleModel;

/// Classical fourth-order Runge-Kutta step with zero-order-hold input.
pub fn rk4_step<F>(f: F, x: &DVector<f64>, u: &DVector<f64>, ts: f64) -> DVector<f64>
where
    F: Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64>,
{
    let k1 = f(x, u);
    let k2 = f(&(x + &k1 * (ts / 2.0)), u);
    let k3 = f(&(x + &k2 * (ts / 2.0)), u);
    let k4 = f(&(x + &k3 * ts), u);
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (ts / 6.0)
}

/// RK4 step together with its exact sensitivities `(d x+/dx, d x+/du)`,
/// obtained by differentiating each stage.
pub fn rk4_step_with_jacobians(
    model: &VehicleModel,
    x: &DVector<f64>,
    u: &DVector<f64>,
    ts: f64,
) -> (DVector<f64>, DMatrix<f64>, DMatrix<f64>) {
    let n = x.len();
    let m = u.len();
    let eye = DMatrix::<f64>::identity(n, n);

    let k1 = model.deriv(x, u);
    let (a1, b1) = model.jacobians(x, u);
    let dk1x = a1;
    let dk1u = b1;

    let x2 = x + &k1 * (ts / 2.0);
    let k2 = model.deriv(&x2, u);
    let (a2, b2) = model.jacobians(&x2, u);
    let dk2x = &a2 * (&eye + &dk1x * (ts / 2.0));
    let dk2u = &a2 * &dk1u * (ts / 2.0) + b2;

    let x3 = x + &k2 * (ts / 2.0);
    let k3 = model.deriv(&x3, u);
    let (a3, b3) = model.jacobians(&x3, u);
    let dk3x = &a3 * (&eye + &dk2x * (ts / 2.0));
    let dk3u = &a3 * &dk2u * (ts / 2.0) + b3;

    let x4 = x + &k3 * ts;
    let k4 = model.deriv(&x4, u);
    let (a4, b4) = model.jacobians(&x4, u);
    let dk4x = &a4 * (&eye + &dk3x * ts);
    let dk4u = &a4 * &dk3u * ts + b4;

    let next = x + (&k1 + &k2 * 2.0 + &k3 * 2.0 + &k4) * (ts / 6.0);
    let ax = eye + (dk1x + dk2x * 2.0 + dk3x * 2.0 + dk4x) * (ts / 6.0);
    let bu = (dk1u + dk2u * 2.0 + dk3u * 2.0 + dk4u) * (ts / 6.0);
    debug_assert_eq!(bu.shape(), (n, m));
    (next, ax, bu)
}
