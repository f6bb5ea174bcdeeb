//! Implicit midpoint integration of `α̇ = A·Q·α + B·u`, `y = C·Q·α + D·u`.
//!
//! The midpoint rule preserves quadratic invariants of skew flows, so the
//! discrete power balance holds per step up to rounding, for every `Δt`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, LU};

use crate::bcs::assemble_extended;
use crate::discretization::{stencil::Axis, wave_1d_system, CoefficientField};
use crate::error::{check_dim, Error, Result};
use crate::physics::{balance_terms, build_constitutive, close_ports, ClosedSystem, PhysicsKind, StepData, BALANCE_TOL};

/// Boundary input `u(t)`.
pub trait InputSignal {
    fn dim(&self) -> usize;
    fn at(&self, t: f64) -> DVector<f64>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroInput(pub usize);

impl InputSignal for ZeroInput {
    fn dim(&self) -> usize {
        self.0
    }

    fn at(&self, _t: f64) -> DVector<f64> {
        DVector::zeros(self.0)
    }
}

/// `amplitude·sin(2π·freq·t)` on the ports selected by `mask`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineInput {
    pub freq: f64,
    pub amplitude: f64,
    pub mask: Vec<f64>,
}

impl InputSignal for SineInput {
    fn dim(&self) -> usize {
        self.mask.len()
    }

    fn at(&self, t: f64) -> DVector<f64> {
        let v = self.amplitude * (2.0 * PI * self.freq * t).sin();
        DVector::from_iterator(self.mask.len(), self.mask.iter().map(|m| m * v))
    }
}

/// `rate·t` on the ports selected by `mask`.
#[derive(Debug, Clone, PartialEq)]
pub struct RampInput {
    pub rate: f64,
    pub mask: Vec<f64>,
}

impl InputSignal for RampInput {
    fn dim(&self) -> usize {
        self.mask.len()
    }

    fn at(&self, t: f64) -> DVector<f64> {
        DVector::from_iterator(self.mask.len(), self.mask.iter().map(|m| m * self.rate * t))
    }
}

/// Piecewise-linear interpolation of sampled values, held constant outside
/// the sampled range.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledInput {
    times: Vec<f64>,
    values: Vec<DVector<f64>>,
}

impl SampledInput {
    pub fn new(times: Vec<f64>, values: Vec<DVector<f64>>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "sampled input needs matching nonempty times and values, got {} and {}",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("sample times must be finite and strictly increasing".into()));
        }
        let dim = values[0].len();
        if values.iter().any(|v| v.len() != dim || v.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidArgument("samples must be finite with a common width".into()));
        }
        Ok(Self { times, values })
    }
}

impl InputSignal for SampledInput {
    fn dim(&self) -> usize {
        self.values[0].len()
    }

    fn at(&self, t: f64) -> DVector<f64> {
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            return self.values[0].clone();
        }
        if k == self.times.len() {
            return self.values[k - 1].clone();
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        &self.values[k - 1] * (1.0 - w) + &self.values[k] * w
    }
}

/// Closure-backed signal.
pub struct FnInput<F: Fn(f64) -> DVector<f64>> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(f64) -> DVector<f64>> InputSignal for FnInput<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn at(&self, t: f64) -> DVector<f64> {
        (self.f)(t)
    }
}

/// Midpoint stepper with `I − (Δt/2)·A·Q` factored once.
pub struct Integrator<'a> {
    closed: &'a ClosedSystem,
    dt: f64,
    lhs: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    rhs: DMatrix<f64>,
}

impl<'a> Integrator<'a> {
    /// Any finite `dt` is accepted; a negative one steps backwards in time.
    pub fn new(closed: &'a ClosedSystem, dt: f64) -> Result<Self> {
        if !dt.is_finite() {
            return Err(Error::NonFinite("time step"));
        }
        let n = closed.state_dim();
        let aq = closed.generator() * (0.5 * dt);
        let id = DMatrix::identity(n, n);
        let lhs = (&id - &aq).lu();
        if n > 0 && lhs.u().diagonal().iter().any(|d| *d == 0.0) {
            return Err(Error::Singular("midpoint system"));
        }
        Ok(Self {
            closed,
            dt,
            lhs,
            rhs: id + aq,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// One step from `t`; returns `(α_{n+1}, u_mid, y_mid)`.
    pub fn step(&self, x: &DVector<f64>, t: f64, u: &dyn InputSignal) -> Result<(DVector<f64>, DVector<f64>, DVector<f64>)> {
        check_dim("midpoint step state", self.closed.state_dim(), x.len())?;
        check_dim("midpoint step input", self.closed.input_dim(), u.dim())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("state"));
        }
        let u_mid = u.at(t + 0.5 * self.dt);
        if u_mid.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("input"));
        }
        let b = &self.rhs * x + &self.closed.b * &u_mid * self.dt;
        let next = if x.is_empty() {
            b
        } else {
            self.lhs.solve(&b).ok_or(Error::Singular("midpoint system"))?
        };
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("state"));
        }
        let mid = (x + &next) * 0.5;
        let y_mid = self.closed.output(&mid, &u_mid);
        Ok((next, u_mid, y_mid))
    }
}

/// Single midpoint step; factors the system on every call.
pub fn midpoint_step(
    x: &DVector<f64>,
    t: f64,
    dt: f64,
    closed: &ClosedSystem,
    u: &dyn InputSignal,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let (next, _, y) = Integrator::new(closed, dt)?.step(x, t, u)?;
    Ok((next, y))
}

/// Relative trace mismatch at `t = 0` above which [`simulate`] records a
/// warning. The discrete system accepts any initial data.
pub const COMPATIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOptions {
    /// Per-step balance tolerance relative to `1 + max(|H_n|, |H_{n+1}|)`.
    pub balance_tol: f64,
    /// Keep every k-th state (the final state is always kept).
    pub state_stride: usize,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            balance_tol: BALANCE_TOL,
            state_stride: 1,
        }
    }
}

/// Sampled trajectory with its per-step energy audit.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `(step index, state)` pairs kept according to the stride.
    pub states: Vec<(usize, DVector<f64>)>,
    /// Midpoint inputs, one per step.
    pub inputs: Vec<DVector<f64>>,
    /// Midpoint outputs, one per step.
    pub outputs: Vec<DVector<f64>>,
    /// `C·Q·α_n + D·u(t_n)` at every time.
    pub endpoint_outputs: Vec<DVector<f64>>,
    pub energies: Vec<f64>,
    pub boundary_power: Vec<f64>,
    pub dissipated_power: Vec<f64>,
    pub balance_residuals: Vec<f64>,
    /// Relative mismatch between the initial boundary trace and `u(0)`.
    pub compatibility_defect: f64,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn final_state(&self) -> &DVector<f64> {
        &self.states.last().expect("initial state is always kept").1
    }

    pub fn max_balance_residual(&self) -> f64 {
        self.balance_residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Runs `n_steps` midpoint steps of size `dt` from `x0`, auditing the power
/// balance after every step.
pub fn simulate(
    closed: &ClosedSystem,
    u: &dyn InputSignal,
    x0: &DVector<f64>,
    dt: f64,
    n_steps: usize,
    options: &SimulationOptions,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    if options.state_stride == 0 {
        return Err(Error::InvalidArgument("state stride must be at least 1".into()));
    }
    check_dim("initial state", closed.state_dim(), x0.len())?;
    let integrator = Integrator::new(closed, dt)?;
    let law = &closed.law;
    let mut traj = Trajectory {
        times: Vec::with_capacity(n_steps + 1),
        states: vec![(0, x0.clone())],
        inputs: Vec::with_capacity(n_steps),
        outputs: Vec::with_capacity(n_steps),
        endpoint_outputs: Vec::with_capacity(n_steps + 1),
        energies: Vec::with_capacity(n_steps + 1),
        boundary_power: Vec::with_capacity(n_steps),
        dissipated_power: Vec::with_capacity(n_steps),
        balance_residuals: Vec::with_capacity(n_steps),
        compatibility_defect: closed.compatibility_defect(x0, &u.at(0.0)),
        warnings: Vec::new(),
    };
    if traj.compatibility_defect > COMPATIBILITY_TOL {
        traj.warnings.push(format!(
            "initial state is not compatible with u(0): relative trace mismatch {:.3e}",
            traj.compatibility_defect
        ));
    }
    traj.times.push(0.0);
    traj.energies.push(law.hamiltonian(x0));
    traj.endpoint_outputs.push(closed.output(x0, &u.at(0.0)));
    let mut x = x0.clone();
    for step in 0..n_steps {
        let t = step as f64 * dt;
        let (next, u_mid, y_mid) = integrator.step(&x, t, u)?;
        let terms = balance_terms(
            &StepData {
                alpha_n: &x,
                alpha_next: &next,
                u_mid: &u_mid,
                y_mid: &y_mid,
                dt,
            },
            closed,
        )?;
        let h_next = law.hamiltonian(&next);
        let tolerance = options.balance_tol * (1.0 + h_next.abs().max(traj.energies[step].abs()));
        if !(terms.residual <= tolerance) {
            return Err(Error::BalanceViolation {
                step,
                residual: terms.residual,
                tolerance,
            });
        }
        let t_next = (step + 1) as f64 * dt;
        traj.times.push(t_next);
        traj.energies.push(h_next);
        traj.endpoint_outputs.push(closed.output(&next, &u.at(t_next)));
        traj.inputs.push(u_mid);
        traj.outputs.push(y_mid);
        traj.boundary_power.push(terms.boundary_power);
        traj.dissipated_power.push(terms.dissipated_power);
        traj.balance_residuals.push(terms.residual);
        if (step + 1) % options.state_stride == 0 || step + 1 == n_steps {
            traj.states.push((step + 1, next.clone()));
        }
        x = next;
    }
    Ok(traj)
}

/// Closed-form reference problems for refinement studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceCase {
    /// `w = cos(πx)·cos(πt)` on the unit interval, `ρ = T = 1`, driven by the
    /// exact boundary velocities.
    WaveStandingMode,
    /// Zero data and zero input.
    WaveZero,
}

impl ConvergenceCase {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "wave1d-standing" => Ok(Self::WaveStandingMode),
            "wave1d-zero" => Ok(Self::WaveZero),
            other => Err(Error::InvalidArgument(format!(
                "unknown convergence case `{other}` (supported: wave1d-standing, wave1d-zero)"
            ))),
        }
    }
}

/// Time step in cell widths.
pub const CONVERGENCE_CFL: f64 = 0.5;

/// Final time of the refinement study.
pub const CONVERGENCE_FINAL_TIME: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub cells: Vec<usize>,
    /// Gram-weighted L² error of the co-energy variables at the final time.
    pub errors: Vec<f64>,
    /// `log(e_k/e_{k+1}) / log(n_{k+1}/n_k)`; NaN when both errors vanish.
    pub orders: Vec<f64>,
    /// Errors decrease strictly along the refinement sequence.
    pub monotone: bool,
}

/// Refinement study on the unit interval with `Δt = CFL·h`.
pub fn convergence_order(case: ConvergenceCase, refinements: &[usize]) -> Result<ConvergenceReport> {
    if refinements.len() < 2 || refinements.windows(2).any(|w| w[1] <= w[0]) || refinements[0] < 2 {
        return Err(Error::InvalidArgument(
            "refinements must be at least two increasing cell counts, each >= 2".into(),
        ));
    }
    let mut errors = Vec::with_capacity(refinements.len());
    for &n in refinements {
        errors.push(wave_error(case, n)?);
    }
    let orders = refinements
        .windows(2)
        .zip(errors.windows(2))
        .map(|(n, e)| {
            if e[0] == 0.0 && e[1] == 0.0 {
                f64::NAN
            } else {
                (e[0] / e[1]).ln() / (n[1] as f64 / n[0] as f64).ln()
            }
        })
        .collect();
    let monotone = errors.windows(2).all(|e| e[1] < e[0]);
    Ok(ConvergenceReport {
        cells: refinements.to_vec(),
        errors,
        orders,
        monotone,
    })
}

fn wave_error(case: ConvergenceCase, n: usize) -> Result<f64> {
    let ax = Axis::new(n, 1.0);
    let sys = wave_1d_system(ax)?;
    let fields = [CoefficientField::uniform("rho", 1.0), CoefficientField::uniform("T", 1.0)];
    let law = build_constitutive(PhysicsKind::Wave, &sys, &fields)?;
    let closed = close_ports(&assemble_extended(&sys)?, &law)?;
    let dt = CONVERGENCE_CFL * ax.h;
    let steps = (CONVERGENCE_FINAL_TIME / dt).round() as usize;
    let t_end = steps as f64 * dt;
    let xn = ax.node_coords();
    let xe = ax.ext_coords();
    let n1 = xn.len();

    // velocity v = −π·cos(πx)·sin(πt), stress σ = −π·sin(πx)·cos(πt)
    let exact = |t: f64| {
        let mut e: Vec<f64> = xn.iter().map(|x| -PI * (PI * x).cos() * (PI * t).sin()).collect();
        e.extend(xe.iter().map(|x| -PI * (PI * x).sin() * (PI * t).cos()));
        DVector::from_vec(e)
    };
    let (x0, reference, input): (DVector<f64>, DVector<f64>, Box<dyn InputSignal>) = match case {
        ConvergenceCase::WaveStandingMode => (
            exact(0.0),
            exact(t_end),
            Box::new(FnInput {
                dim: 2,
                f: |t: f64| DVector::from_vec(vec![-PI * (PI * t).sin(), PI * (PI * t).sin()]),
            }),
        ),
        ConvergenceCase::WaveZero => (
            DVector::zeros(sys.x1.dim() + sys.x2.dim()),
            DVector::zeros(sys.x1.dim() + sys.x2.dim()),
            Box::new(ZeroInput(2)),
        ),
    };
    debug_assert_eq!(n1 + xe.len(), x0.len());
    // with ρ = T = 1 the energy variables equal the co-energy variables
    let traj = simulate(&closed, input.as_ref(), &x0, dt, steps, &SimulationOptions::default())?;
    let err = law.co_energy(traj.final_state()) - reference;
    Ok(law.storage_space.inner(&err, &err)?.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::GramSpace;
    use crate::physics::{ConstitutiveLaw, PortSplit};

    fn oscillator() -> ClosedSystem {
        let law = ConstitutiveLaw::new(
            DMatrix::identity(2, 2),
            None,
            PortSplit::all_storage(2),
            &GramSpace::identity(2),
        )
        .unwrap();
        ClosedSystem {
            a: DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]),
            b: DMatrix::zeros(2, 0),
            c: DMatrix::zeros(0, 2),
            d: DMatrix::zeros(0, 0),
            r_e: DMatrix::zeros(0, 2),
            r_u: DMatrix::zeros(0, 0),
            trace: DMatrix::zeros(0, 2),
            law,
            boundary_space: GramSpace::trivial(),
        }
    }

    #[test]
    fn harmonic_oscillator_cayley_step() {
        let sys = oscillator();
        let x0 = DVector::from_vec(vec![1.0, 0.0]);
        let (x1, _) = midpoint_step(&x0, 0.0, 0.2, &sys, &ZeroInput(0)).unwrap();
        // (I − 0.1J)⁻¹(I + 0.1J)e₁ = (0.99, 0.2)/1.01
        assert!((x1[0] - 0.99 / 1.01).abs() < 1e-15);
        assert!((x1[1] - 0.2 / 1.01).abs() < 1e-15);
        assert!((x1[0] - 0.980198).abs() < 1e-6 && (x1[1] - 0.198020).abs() < 1e-6);
        assert!((x1.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_step_is_identity() {
        let sys = oscillator();
        let x0 = DVector::from_vec(vec![0.3, -0.7]);
        let (x1, _) = midpoint_step(&x0, 0.0, 0.0, &sys, &ZeroInput(0)).unwrap();
        assert_eq!(x1, x0);
    }

    #[test]
    fn nan_state_rejected() {
        let sys = oscillator();
        let x0 = DVector::from_vec(vec![f64::NAN, 0.0]);
        assert!(matches!(
            midpoint_step(&x0, 0.0, 0.1, &sys, &ZeroInput(0)).unwrap_err(),
            Error::NonFinite(_)
        ));
    }

    #[test]
    fn sampled_input_interpolates() {
        let s = SampledInput::new(
            vec![0.0, 1.0, 3.0],
            vec![
                DVector::from_vec(vec![0.0]),
                DVector::from_vec(vec![2.0]),
                DVector::from_vec(vec![0.0]),
            ],
        )
        .unwrap();
        assert_eq!(s.at(0.5)[0], 1.0);
        assert_eq!(s.at(2.0)[0], 1.0);
        assert_eq!(s.at(-1.0)[0], 0.0);
        assert_eq!(s.at(9.0)[0], 0.0);
        assert!(SampledInput::new(vec![1.0, 1.0], vec![DVector::zeros(1); 2]).is_err());
    }

    #[test]
    fn zero_case_has_zero_error() {
        let r = convergence_order(ConvergenceCase::WaveZero, &[4, 8]).unwrap();
        assert_eq!(r.errors, vec![0.0, 0.0]);
        assert!(r.orders[0].is_nan());
    }

    #[test]
    fn invalid_refinements_rejected() {
        assert!(convergence_order(ConvergenceCase::WaveZero, &[8]).is_err());
        assert!(convergence_order(ConvergenceCase::WaveZero, &[8, 4]).is_err());
    }
}
