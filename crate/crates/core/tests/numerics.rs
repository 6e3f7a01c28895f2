use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tccbf::barrier::{barrier_value, BarrierConfig, BarrierKind, Obstacle};
use tccbf::nmpc::{build_reference, sqp_solve, MpcConfig, OcpProblem, PathSpec, SolveStatus};
use tccbf::vehicle::{rk4_step, VehicleModel};

/// Position error of a unicycle driven along a constant-rate arc for
/// `horizon` seconds, against the closed form.
fn circle_error(steps: usize) -> f64 {
    let (speed, rate, horizon) = (2.0, 0.5, 3.0);
    let ts = horizon / steps as f64;
    let model = VehicleModel::Unicycle;
    let u = DVector::from_row_slice(&[rate, 0.0]);
    let mut x = DVector::from_row_slice(&[0.0, 0.0, 0.0, speed]);
    for _ in 0..steps {
        x = rk4_step(|x, u| model.deriv(x, u), &x, &u, ts);
    }
    let radius = speed / rate;
    let exact = (radius * (rate * horizon).sin(), radius * (1.0 - (rate * horizon).cos()));
    (x[0] - exact.0).hypot(x[1] - exact.1)
}

#[test]
fn rk4_is_fourth_order_on_circle() {
    for steps in [5, 10, 20, 40] {
        let ratio = circle_error(steps) / circle_error(2 * steps);
        assert!((12.0..=20.0).contains(&ratio), "{steps} steps: ratio {ratio}");
    }
}

#[test]
fn converged_plans_keep_predicted_decay() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let model = VehicleModel::Unicycle;
    let obstacle = Obstacle::fixed(8.0, 0.0, 2.0);
    let mut checked = 0;
    for trial in 0..60 {
        let kind = [BarrierKind::Ed, BarrierKind::Tc][trial % 2];
        let cfg = MpcConfig::unicycle(0.3);
        let barrier = BarrierConfig { kind, ..BarrierConfig::default() };
        let x0 = DVector::from_row_slice(&[
            rng.random_range(0.0..3.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-0.4..0.4),
            rng.random_range(1.0..2.5),
        ]);
        let p = OcpProblem::new(
            model.clone(),
            x0,
            DVector::zeros(2),
            build_reference(&model, &PathSpec::along_x(2.0), cfg.horizon).unwrap(),
            &[obstacle],
            barrier,
            &cfg,
        );
        let res = sqp_solve(&p, &cfg, None).unwrap();
        if res.status != SolveStatus::Converged {
            continue;
        }
        let gamma = barrier.decay().unwrap();
        let h: Vec<f64> = res
            .states
            .iter()
            .map(|x| barrier_value(kind, &model.pose(x), &obstacle, &barrier).unwrap())
            .collect();
        for w in h.windows(2) {
            assert!(w[1] >= (1.0 - gamma) * w[0] - 1e-6, "trial {trial} {kind}: {h:?}");
        }
        checked += 1;
    }
    assert!(checked >= 40, "only {checked} solves converged");
}
