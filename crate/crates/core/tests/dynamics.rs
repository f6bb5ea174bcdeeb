mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use portham_core::dirac::GramSpace;
use portham_core::physics::{ClosedSystem, ConstitutiveLaw, PortSplit};
use portham_core::timestepping::{
    convergence_order, simulate, ConvergenceCase, FnInput, InputSignal, Integrator, RampInput, SimulationOptions,
    SineInput, ZeroInput,
};

fn sine(closed: &ClosedSystem, freq: f64) -> SineInput {
    SineInput {
        freq,
        amplitude: 1.0,
        mask: vec![1.0; closed.input_dim()],
    }
}

fn rel_diff(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

#[test]
fn sine_forcing_balances_every_step() {
    for (label, cells) in [("wave1d", vec![16]), ("beam1d", vec![12]), ("elasticity2d", vec![4, 4])] {
        let (_, closed) = closed(label, &cells);
        let x0 = DVector::zeros(closed.state_dim());
        let traj = simulate(&closed, &sine(&closed, 1.5), &x0, 1e-2, 1000, &SimulationOptions::default()).unwrap();
        for (k, r) in traj.balance_residuals.iter().enumerate() {
            let h = traj.energies[k].abs().max(traj.energies[k + 1].abs());
            assert!(*r <= 1e-10 * (1.0 + h), "{label} step {k}: {r:e}");
        }
        assert!(traj.energies.last().unwrap() > &0.0, "{label}: input did no work");
    }
}

#[test]
fn zero_input_conserves_energy() {
    let mut r = rng(5);
    for (label, cells) in small_cases() {
        let (_, closed) = closed(label, &cells);
        let x0 = random_vector(&mut r, closed.state_dim());
        let zero = ZeroInput(closed.input_dim());
        let traj = simulate(&closed, &zero, &x0, 2e-2, 1000, &SimulationOptions::default()).unwrap();
        let h0 = traj.energies[0];
        let drift = (traj.energies.last().unwrap() - h0).abs() / h0;
        assert!(drift <= 1e-10, "{label}: {drift:e}");
    }
}

#[test]
fn ramp_input_energy_equals_boundary_work() {
    let (_, closed) = closed("beam1d", &[10]);
    let mut mask = vec![0.0; closed.input_dim()];
    mask[0] = 1.0;
    let ramp = RampInput { rate: 2.0, mask };
    let dt = 5e-3;
    let x0 = DVector::zeros(closed.state_dim());
    let traj = simulate(&closed, &ramp, &x0, dt, 400, &SimulationOptions::default()).unwrap();
    let work: f64 = traj.boundary_power.iter().map(|p| p * dt).sum();
    let h = *traj.energies.last().unwrap();
    assert!(h > 0.0);
    assert!((h - work).abs() <= 1e-10 * (1.0 + h), "{h} vs {work}");
}

#[test]
fn lossy_maxwell_dissipates_joule_heat() {
    let (_, closed) = maxwell(&[2, 2, 2], 1.0);
    let mut r = rng(9);
    let x0 = random_vector(&mut r, closed.state_dim());
    let dt = 1e-2;
    let zero = ZeroInput(closed.input_dim());
    let traj = simulate(&closed, &zero, &x0, dt, 500, &SimulationOptions::default()).unwrap();
    for k in 0..traj.steps() {
        let (h0, h1) = (traj.energies[k], traj.energies[k + 1]);
        assert!(h1 <= h0, "step {k}: {h0} -> {h1}");
        let joule = (h1 - h0 + dt * traj.dissipated_power[k]).abs();
        assert!(joule <= 1e-10 * (1.0 + h0), "step {k}: {joule:e}");
    }
    assert!(traj.energies.last().unwrap() < &(0.5 * traj.energies[0]));
}

#[test]
fn insulating_maxwell_conserves_energy() {
    let (_, closed) = maxwell(&[2, 2, 2], 0.0);
    let mut r = rng(10);
    let x0 = random_vector(&mut r, closed.state_dim());
    let zero = ZeroInput(closed.input_dim());
    let traj = simulate(&closed, &zero, &x0, 1e-2, 500, &SimulationOptions::default()).unwrap();
    assert!(traj.dissipated_power.iter().all(|p| *p == 0.0));
    let drift = (traj.energies.last().unwrap() - traj.energies[0]).abs() / traj.energies[0];
    assert!(drift <= 1e-10, "{drift:e}");
}

#[test]
fn backward_steps_undo_forward_steps() {
    let mut r = rng(12);
    for (label, cells) in small_cases() {
        let (_, closed) = closed(label, &cells);
        let x0 = random_vector(&mut r, closed.state_dim());
        let zero = ZeroInput(closed.input_dim());
        let (dt, n) = (1e-2, 200);
        let forward = Integrator::new(&closed, dt).unwrap();
        let backward = Integrator::new(&closed, -dt).unwrap();
        let mut x = x0.clone();
        for k in 0..n {
            x = forward.step(&x, k as f64 * dt, &zero).unwrap().0;
        }
        for k in (1..=n).rev() {
            x = backward.step(&x, k as f64 * dt, &zero).unwrap().0;
        }
        let err = rel_diff(&x0, &x);
        assert!(err <= 1e-9, "{label}: {err:e}");
    }
}

#[test]
fn simulate_is_linear_in_state_and_input() {
    let mut r = rng(13);
    let (_, closed) = closed("wave2d", &[3, 4]);
    let (n, m) = (closed.state_dim(), closed.input_dim());
    let (x1, x2) = (random_vector(&mut r, n), random_vector(&mut r, n));
    let (c1, c2) = (random_vector(&mut r, m), random_vector(&mut r, m));
    let (a, b) = (0.7, -1.3);
    let u1 = FnInput { dim: m, f: |t: f64| &c1 * (3.0 * t).sin() };
    let u2 = FnInput { dim: m, f: |t: f64| &c2 * t.cos() };
    let u12 = FnInput {
        dim: m,
        f: |t: f64| u1.at(t) * a + u2.at(t) * b,
    };
    let opts = SimulationOptions::default();
    let run = |u: &dyn InputSignal, x0: &DVector<f64>| simulate(&closed, u, x0, 1e-2, 300, &opts).unwrap();
    let t1 = run(&u1, &x1);
    let t2 = run(&u2, &x2);
    let t12 = run(&u12, &(&x1 * a + &x2 * b));
    let combined = t1.final_state() * a + t2.final_state() * b;
    assert!(rel_diff(&combined, t12.final_state()) <= 1e-11);
    for k in [0, 150, 299] {
        let y = &t1.outputs[k] * a + &t2.outputs[k] * b;
        assert!((y - &t12.outputs[k]).norm() <= 1e-11 * (1.0 + t12.outputs[k].norm()));
    }
}

#[test]
fn midpoint_is_solvable_for_any_step() {
    for (label, cells) in small_cases() {
        let (_, closed) = closed(label, &cells);
        let n = closed.state_dim();
        let p = closed.law.energy_matrix();
        let p = (&p + p.transpose()) * 0.5;
        let w = p.cholesky().unwrap().l().transpose();
        let w_inv = w.clone().try_inverse().unwrap();
        let g = closed.generator();
        for dt in [1e-3, 1e-2, 1e-1, 1.0, 10.0] {
            let m = &w * (DMatrix::identity(n, n) - &g * (0.5 * dt)) * &w_inv;
            let smin = m.singular_values().min();
            assert!(smin >= 1.0 - 1e-10, "{label} dt {dt}: {smin}");
            assert!(Integrator::new(&closed, dt).is_ok());
        }
    }
}

/// `ẋ = [[0, −1], [1, 0]]·x`; one midpoint step rotates by `2·atan(Δt/2)`.
#[test]
fn harmonic_oscillator_rotates_by_cayley_angle() {
    let id = DMatrix::identity(2, 2);
    let law = ConstitutiveLaw::new(id.clone(), None, PortSplit::all_storage(2), &GramSpace::identity(2)).unwrap();
    let closed = ClosedSystem {
        a: DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]),
        b: DMatrix::zeros(2, 0),
        c: DMatrix::zeros(0, 2),
        d: DMatrix::zeros(0, 0),
        r_e: DMatrix::zeros(0, 2),
        r_u: DMatrix::zeros(0, 0),
        trace: DMatrix::zeros(0, 2),
        law,
        boundary_space: GramSpace::trivial(),
    };
    let dt = 0.1;
    let n = 1000;
    let x0 = DVector::from_vec(vec![1.0, 0.0]);
    let traj = simulate(&closed, &ZeroInput(0), &x0, dt, n, &SimulationOptions::default()).unwrap();
    let theta = n as f64 * 2.0 * (dt / 2.0).atan();
    let expected = DVector::from_vec(vec![theta.cos(), theta.sin()]);
    assert!((traj.final_state() - expected).norm() <= 1e-11);
    assert!((traj.energies[n] - 0.5).abs() <= 1e-13);
}

#[test]
fn standing_mode_converges_at_second_order() {
    let report = convergence_order(ConvergenceCase::WaveStandingMode, &[8, 16, 32]).unwrap();
    assert!(report.monotone);
    for p in &report.orders {
        assert!((p - 2.0).abs() <= 0.2, "{:?}", report.orders);
    }
    let zero = convergence_order(ConvergenceCase::WaveZero, &[4, 8]).unwrap();
    assert!(zero.errors.iter().all(|e| *e == 0.0));
}

#[test]
fn balance_violation_aborts_run() {
    let (_, closed) = closed("wave1d", &[8]);
    let x0 = DVector::from_element(closed.state_dim(), 1.0);
    let opts = SimulationOptions {
        balance_tol: -1.0,
        state_stride: 1,
    };
    let res = simulate(&closed, &sine(&closed, 1.0), &x0, 1e-2, 100, &opts);
    assert!(matches!(res, Err(portham_core::Error::BalanceViolation { step: 0, .. })));
}

#[test]
fn incompatible_start_is_a_warning() {
    let (_, closed) = closed("wave1d", &[8]);
    let x0 = DVector::zeros(closed.state_dim());
    let mut mask = vec![0.0; closed.input_dim()];
    mask[0] = 1.0;
    let cosine = FnInput {
        dim: closed.input_dim(),
        f: |t: f64| DVector::from_vec(mask.iter().map(|m| m * t.cos()).collect()),
    };
    let traj = simulate(&closed, &cosine, &x0, 1e-2, 10, &SimulationOptions::default()).unwrap();
    assert_eq!(traj.compatibility_defect, 1.0);
    assert_eq!(traj.warnings.len(), 1);

    let zero = simulate(&closed, &ZeroInput(closed.input_dim()), &x0, 1e-2, 10, &SimulationOptions::default()).unwrap();
    assert_eq!(zero.compatibility_defect, 0.0);
    assert!(zero.warnings.is_empty());
}

#[test]
fn compatible_start_has_no_warning() {
    let (_, closed) = closed("wave1d", &[8]);
    // v = 1 everywhere: boundary velocities are both 1
    let mut x0 = DVector::zeros(closed.state_dim());
    x0.rows_mut(0, 9).fill(1.0);
    let ones = FnInput {
        dim: 2,
        f: |_| DVector::from_element(2, 1.0),
    };
    let traj = simulate(&closed, &ones, &x0, 1e-2, 10, &SimulationOptions::default()).unwrap();
    assert!(traj.compatibility_defect < 1e-14, "{}", traj.compatibility_defect);
    assert!(traj.warnings.is_empty());
}
