mod common;

use approx::assert_relative_eq;
use common::*;
use faprodmp::mp::*;
use faprodmp::Error;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn init(pos: &[f64], vel: &[f64]) -> InitialState {
    InitialState::new(DVector::from_column_slice(pos), DVector::from_column_slice(vel))
}

#[test]
fn fit_recovers_composed_weights() {
    let b = basis(8, 2.0, 201, BasisKind::ProDmp);
    let mut r = rng(11);
    for _ in 0..20 {
        let omega = WeightVector::new(uniform_vec(&mut r, 2 * b.weights_per_dim(), -50.0, 50.0));
        let y0 = init(&[0.3, -0.2], &[0.5, 0.0]);
        let traj = compose_mean(&b, &omega, &y0).unwrap();
        let back = fit_weights(&traj, &b, &y0, 0.0).unwrap();
        let rel = (back.as_vector() - omega.as_vector()).norm() / omega.as_vector().norm();
        assert!(rel < 1e-6, "relative error {rel}");
    }
}

#[test]
fn compose_is_affine_in_weights() {
    let b = basis(6, 1.0, 101, BasisKind::ProDmp);
    let mut r = rng(3);
    let w = b.weights_per_dim();
    let y0 = init(&[1.0], &[0.0]);
    let zero = InitialState::zeros(1);
    let a = WeightVector::new(uniform_vec(&mut r, w, -5.0, 5.0));
    let c = WeightVector::new(uniform_vec(&mut r, w, -5.0, 5.0));
    let sum = WeightVector::new(a.as_vector() * 2.0 + c.as_vector());
    let lhs = b.compose(&sum, &zero).unwrap();
    let rhs = b.compose(&a, &zero).unwrap().values() * 2.0 + b.compose(&c, &zero).unwrap().values();
    assert!(max_abs(lhs.values(), &rhs) < 1e-10);
    // The homogeneous part only depends on the initial state.
    let shifted = b.compose(&a, &y0).unwrap().values() - b.compose(&a, &zero).unwrap().values();
    let free = b.compose(&WeightVector::zeros(1, w), &y0).unwrap();
    assert!(max_abs(&shifted, free.values()) < 1e-12);
}

/// Second-order one-sided difference at the first sample.
fn three_point(v: &DMatrix<f64>, d: usize, dt: f64) -> f64 {
    (-3.0 * v[(0, d)] + 4.0 * v[(1, d)] - v[(2, d)]) / (2.0 * dt)
}

#[test]
fn prodmp_starts_at_initial_state() {
    let b = basis(10, 3.0, 3001, BasisKind::ProDmp);
    let mut r = rng(5);
    let dt = b.grid().dt();
    for _ in 0..10 {
        let omega = WeightVector::new(uniform_vec(&mut r, 3 * b.weights_per_dim(), -100.0, 100.0));
        let pos = uniform_vec(&mut r, 3, -1.0, 1.0);
        let vel = uniform_vec(&mut r, 3, -0.5, 0.5);
        let traj = b.compose(&omega, &InitialState::new(pos.clone(), vel.clone())).unwrap();
        let analytic = b.compose_velocity(&omega, &InitialState::new(pos.clone(), vel.clone())).unwrap();
        for d in 0..3 {
            assert_eq!(traj.values()[(0, d)], pos[d]);
            assert!((analytic[(0, d)] - vel[d]).abs() < 1e-9);
            let fd = three_point(traj.values(), d, dt);
            assert!((fd - vel[d]).abs() <= 1e-2 * (1.0 + vel[d].abs()), "dim {d}: {fd} vs {}", vel[d]);
        }
    }
}

#[test]
fn integrator_agrees_with_basis() {
    let cfg = DmpConfig::for_duration(2.0).with_basis(7);
    let grid = TimeGrid::new(2.0, 201).unwrap();
    let b = build_basis(&cfg, &grid, BasisKind::ProDmp).unwrap();
    let mut r = rng(8);
    for _ in 0..5 {
        let omega = WeightVector::new(uniform_vec(&mut r, 2 * cfg.weights_per_dim(), -30.0, 30.0));
        let y0 = init(&[0.1, 0.4], &[-0.3, 0.2]);
        let a = integrate_dmp(&cfg, &omega, &y0, &grid).unwrap();
        let c = b.compose(&omega, &y0).unwrap();
        assert!(max_abs(a.values(), c.values()) < 1e-6);
    }
}

#[test]
fn zero_forcing_converges_to_goal() {
    let cfg = DmpConfig::for_duration(3.0);
    let grid = TimeGrid::new(3.0, 301).unwrap();
    let b = build_basis(&cfg, &grid, BasisKind::ProDmp).unwrap();
    let mut omega = WeightVector::zeros(1, cfg.weights_per_dim());
    omega.0[cfg.n_basis] = 2.0;
    let traj = b.compose(&omega, &init(&[0.0], &[0.0])).unwrap();
    assert!((traj.values()[(300, 0)] - 2.0).abs() < 1e-3);
}

#[test]
fn promp_fit_needs_ridge() {
    let b = basis(5, 1.0, 51, BasisKind::ProMp);
    let traj = Trajectory::new(*b.grid(), DMatrix::from_fn(51, 1, |t, _| (t as f64 * 0.1).sin())).unwrap();
    let y0 = traj.initial_state();
    assert!(matches!(fit_weights(&traj, &b, &y0, 0.0), Err(Error::IllConditioned(_))));
    let w = fit_weights(&traj, &b, &y0, DEFAULT_RIDGE).unwrap();
    assert!(w.as_vector().iter().all(|v| v.is_finite()));
}

#[test]
fn fit_rejects_grid_mismatch() {
    let b = basis(5, 1.0, 51, BasisKind::ProDmp);
    let traj = Trajectory::new(TimeGrid::new(1.0, 41).unwrap(), DMatrix::zeros(41, 1)).unwrap();
    assert!(matches!(fit_weights(&traj, &b, &InitialState::zeros(1), 0.0), Err(Error::Shape(_))));
}

#[test]
fn distribution_needs_two_samples() {
    let w = vec![WeightVector::new(DVector::from_element(6, 1.0))];
    assert!(matches!(fit_weight_distribution_default(&w, 1), Err(Error::InsufficientData(_))));
}

#[test]
fn distribution_of_identical_weights_is_regularised() {
    let w = vec![WeightVector::new(DVector::from_element(4, 1.0)); 3];
    let wd = fit_weight_distribution(&w, 1e-6, 2).unwrap();
    assert_relative_eq!(wd.covariance(), &(DMatrix::identity(4, 4) * 1e-6), epsilon = 1e-15);
}

#[test]
fn sampling_is_seeded() {
    let mut r = rng(1);
    let wd = random_distribution(&mut r, 2, 4, 0.0);
    let a = sample_weights(&wd, 5, 42).unwrap();
    let b = sample_weights(&wd, 5, 42).unwrap();
    let c = sample_weights(&wd, 5, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn monte_carlo_matches_closed_form_small() {
    let mut r = rng(21);
    let b = basis(4, 1.0, 21, BasisKind::ProDmp);
    let wd = random_distribution(&mut r, 1, b.weights_per_dim(), 0.0);
    let y0 = init(&[0.2], &[0.1]);
    let dist = trajectory_distribution(&wd, &b, &y0).unwrap();
    let n = 20_000;
    let samples = sample_trajectories(&wd, &b, &y0, n, 9).unwrap();
    let mut mean = DVector::zeros(21);
    for s in &samples {
        mean += s.column(0);
    }
    mean /= n as f64;
    for t in 0..21 {
        let se = dist.covariance()[(t, t)].sqrt() / (n as f64).sqrt();
        assert!((mean[t] - dist.mean()[t]).abs() <= 4.0 * se + 1e-12);
    }
}

#[test]
fn marginal_std_matches_full_covariance() {
    let mut r = rng(4);
    let b = basis(5, 1.0, 31, BasisKind::ProDmp);
    let wd = random_distribution(&mut r, 2, b.weights_per_dim(), 1e-4);
    let full = trajectory_distribution(&wd, &b, &InitialState::zeros(2)).unwrap();
    let std = marginal_std(&wd, &b).unwrap();
    for d in 0..2 {
        for t in 0..31 {
            let i = full.index(t, d);
            assert_relative_eq!(std[(t, d)], full.covariance()[(i, i)].sqrt(), max_relative = 1e-9);
        }
    }
}

#[test]
fn anchored_basis_restarts_from_state() {
    let b = basis(6, 2.0, 201, BasisKind::ProDmp);
    let mut r = rng(7);
    let omega = WeightVector::new(uniform_vec(&mut r, b.weights_per_dim(), -20.0, 20.0));
    let traj = b.compose(&omega, &init(&[0.0], &[0.0])).unwrap();
    let step = 80;
    let vel = traj.velocities();
    let state = init(&[traj.values()[(step, 0)]], &[vel[(step, 0)]]);
    let anchored = b.anchored_at(step).unwrap();
    let again = anchored.compose(&omega, &state).unwrap();
    assert_eq!(again.values()[(step, 0)], traj.values()[(step, 0)]);
    // Same weights from a matching state continue the same movement, up to the
    // finite-difference velocity used to restart it.
    let tail = (step..201).map(|t| (again.values()[(t, 0)] - traj.values()[(t, 0)]).abs()).fold(0.0, f64::max);
    assert!(tail < 1e-3, "{tail}");
}

fn spd_strategy(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    proptest::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| {
        let a = DMatrix::from_vec(n, n, v);
        &a * a.transpose() + DMatrix::identity(n, n) * 1e-3
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fitted_covariance_is_psd(samples in proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, 6), 2..10)) {
        let weights: Vec<WeightVector> = samples.into_iter().map(|v| WeightVector::new(DVector::from_vec(v))).collect();
        let wd = fit_weight_distribution_default(&weights, 2).unwrap();
        let sym = (wd.covariance() - wd.covariance().transpose()).amax();
        prop_assert!(sym <= 1e-10 * wd.covariance().amax().max(1e-300));
        let eig = wd.covariance().clone().symmetric_eigen().eigenvalues;
        let max = eig.max();
        prop_assert!(eig.min() >= -1e-9 * max);
    }

    #[test]
    fn trajectory_covariance_is_psd(sigma in spd_strategy(5)) {
        let b = basis(4, 1.0, 11, BasisKind::ProDmp);
        let wd = WeightDistribution::new(DVector::zeros(5), sigma, 1, 0.0).unwrap();
        let dist = trajectory_distribution(&wd, &b, &InitialState::zeros(1)).unwrap();
        let eig = dist.covariance().clone().symmetric_eigen().eigenvalues;
        prop_assert!(eig.min() >= -1e-9 * eig.max().max(1e-300));
    }

    #[test]
    fn boundary_condition_holds(p in -2.0f64..2.0, v in -1.0f64..1.0, g in -3.0f64..3.0) {
        let b = basis(5, 1.5, 1501, BasisKind::ProDmp);
        let mut omega = WeightVector::zeros(1, 6);
        omega.0[5] = g;
        let traj = b.compose(&omega, &init(&[p], &[v])).unwrap();
        prop_assert_eq!(traj.values()[(0, 0)], p);
        let fd = three_point(traj.values(), 0, b.grid().dt());
        prop_assert!((fd - v).abs() <= 1e-3 * (1.0 + v.abs() + (g - p).abs()), "{} vs {}", fd, v);
    }
}
