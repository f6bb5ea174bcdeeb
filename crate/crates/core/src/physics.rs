//! Constitutive closures, Hamiltonian and power-balance audits.
//!
//! Storage degrees of freedom carry a quadratic energy `H = ½·αᵀ·M·Q·α`.
//! Resistive degrees of freedom (the current port of Maxwell's equations) are
//! closed by substituting `e_r = S·f_r` into the extended structure, which
//! leaves an input-state-output system on the storage part.

use nalgebra::{DMatrix, DVector};

use crate::bcs::{ExtendedOperator, PortSystem};
use crate::dirac::GramSpace;
use crate::discretization::{CoefficientField, Lame};
use crate::error::{check_dim, Error, Result};
use crate::linalg;

/// Symmetry tolerance of `M·Q`, relative to `‖M·Q‖∞`.
pub const CONSTITUTIVE_SYM_TOL: f64 = 1e-13;

/// Per-step power-balance contract, relative to `1 + |H|`.
pub const BALANCE_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhysicsKind {
    Wave,
    Elasticity,
    Beam,
    Maxwell,
}

impl PhysicsKind {
    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            "wave1d" | "wave2d" => Ok(Self::Wave),
            "elasticity2d" => Ok(Self::Elasticity),
            "beam1d" => Ok(Self::Beam),
            "maxwell3d" => Ok(Self::Maxwell),
            other => Err(Error::InvalidArgument(format!("unknown physics label `{other}`"))),
        }
    }

    /// Required coefficient names, then optional ones.
    pub fn field_names(&self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            Self::Wave => (&["rho", "T"], &[]),
            Self::Elasticity => (&["rho", "lambda", "mu"], &[]),
            Self::Beam => (&["mu", "bending"], &[]),
            Self::Maxwell => (&["eps", "mu_mag"], &["eta_inv"]),
        }
    }
}

/// Storage/resistive partition of `X¹ × X²`, as global indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PortSplit {
    pub storage: Vec<usize>,
    pub resistive: Vec<usize>,
}

impl PortSplit {
    pub fn all_storage(n: usize) -> Self {
        Self {
            storage: (0..n).collect(),
            resistive: Vec::new(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for &i in self.storage.iter().chain(&self.resistive) {
            if i >= n || seen[i] {
                return Err(Error::InvalidArgument(format!(
                    "port split is not a partition of {n} degrees of freedom (index {i})"
                )));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidArgument("port split does not cover every degree of freedom".into()));
        }
        Ok(())
    }
}

fn select(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn select_rows(m: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

fn select_cols(m: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}

/// Co-energy map `e = Q·α` on the storage part and resistive law `e_r = S·f_r`.
#[derive(Debug, Clone)]
pub struct ConstitutiveLaw {
    pub q: DMatrix<f64>,
    pub s: Option<DMatrix<f64>>,
    pub split: PortSplit,
    /// State Gram restricted to the storage part.
    pub storage_space: GramSpace,
    /// State Gram restricted to the resistive part.
    pub resistive_space: GramSpace,
}

impl ConstitutiveLaw {
    /// Checks `M·Q` symmetric positive-definite and `S` positive semidefinite.
    pub fn new(q: DMatrix<f64>, s: Option<DMatrix<f64>>, split: PortSplit, state: &GramSpace) -> Result<Self> {
        split.validate(state.dim())?;
        check_dim("Q rows", split.storage.len(), q.nrows())?;
        check_dim("Q columns", split.storage.len(), q.ncols())?;
        let storage_space = GramSpace::new(select(state.gram(), &split.storage, &split.storage))?;
        let resistive_space = GramSpace::new(select(state.gram(), &split.resistive, &split.resistive))?;
        if let Some(s) = &s {
            check_dim("S rows", split.resistive.len(), s.nrows())?;
            check_dim("S columns", split.resistive.len(), s.ncols())?;
        }
        let law = Self {
            q,
            s,
            split,
            storage_space,
            resistive_space,
        };
        let mq = law.energy_matrix();
        let asym = linalg::inf_norm(&(&mq - mq.transpose()));
        if !linalg::all_finite(&mq) || asym > CONSTITUTIVE_SYM_TOL * linalg::inf_norm(&mq).max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidConstitutive(format!("M·Q is not symmetric (residual {asym:.3e})")));
        }
        let (lo, _) = law.energy_bounds();
        if !(lo > 0.0) {
            return Err(Error::InvalidConstitutive(format!("Q is not positive-definite (smallest eigenvalue {lo:.3e})")));
        }
        dissipation_check(&law)?;
        Ok(law)
    }

    /// `M_s·Q`
    pub fn energy_matrix(&self) -> DMatrix<f64> {
        self.storage_space.gram() * &self.q
    }

    pub fn storage_dim(&self) -> usize {
        self.split.storage.len()
    }

    /// Extreme eigenvalues `(c₁, c₂)` of `Q` in the storage Gram, so that
    /// `½c₁‖α‖²_M ≤ H(α) ≤ ½c₂‖α‖²_M`.
    pub fn energy_bounds(&self) -> (f64, f64) {
        let n = self.storage_dim();
        if n == 0 {
            return (1.0, 1.0);
        }
        let mq = self.energy_matrix();
        let sym = (&mq + mq.transpose()) * 0.5;
        let chol = match self.storage_space.gram().clone().cholesky() {
            Some(c) => c,
            None => return (f64::NAN, f64::NAN),
        };
        let l_inv = chol
            .l()
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .expect("Cholesky factor is invertible");
        let w = &l_inv * sym * l_inv.transpose();
        let eig = w.symmetric_eigenvalues();
        (eig.min(), eig.max())
    }

    /// `½·αᵀ·M·Q·α`
    pub fn hamiltonian(&self, alpha: &DVector<f64>) -> f64 {
        0.5 * (self.storage_space.gram() * alpha).dot(&(&self.q * alpha))
    }

    pub fn co_energy(&self, alpha: &DVector<f64>) -> DVector<f64> {
        &self.q * alpha
    }

    pub fn is_lossless(&self) -> bool {
        self.s.as_ref().is_none_or(|s| s.iter().all(|v| *v == 0.0))
    }
}

/// `½·αᵀ·M·Q·α` after a dimension check.
pub fn hamiltonian(law: &ConstitutiveLaw, alpha: &DVector<f64>) -> Result<f64> {
    check_dim("hamiltonian state", law.storage_dim(), alpha.len())?;
    Ok(law.hamiltonian(alpha))
}

fn field<'a>(fields: &'a [CoefficientField], name: &str) -> Option<&'a CoefficientField> {
    fields.iter().find(|f| f.name == name)
}

fn check_fields(kind: PhysicsKind, fields: &[CoefficientField]) -> Result<()> {
    let (required, optional) = kind.field_names();
    let names: Vec<&str> = fields.iter().map(|f| f.name.as_str()).collect();
    let missing = required.iter().any(|r| !names.contains(r));
    let unknown = names.iter().any(|n| !required.contains(n) && !optional.contains(n));
    let mut dup = names.clone();
    dup.sort_unstable();
    dup.dedup();
    if missing || unknown || dup.len() != names.len() {
        return Err(Error::InvalidArgument(format!(
            "{kind:?} expects fields {required:?} (optional {optional:?}), got {names:?}"
        )));
    }
    Ok(())
}

fn positive(f: &CoefficientField, n: usize) -> Result<Vec<f64>> {
    f.validate_positive()?;
    f.expand(n)
}

/// Assembles `Q` pointwise and, for Maxwell, the resistive law on the current
/// block (`S = 0` when no resistivity is given).
pub fn build_constitutive(kind: PhysicsKind, sys: &PortSystem, fields: &[CoefficientField]) -> Result<ConstitutiveLaw> {
    if PhysicsKind::from_label(&sys.label)? != kind {
        return Err(Error::InvalidArgument(format!(
            "constitutive kind {kind:?} does not match system `{}`",
            sys.label
        )));
    }
    check_fields(kind, fields)?;
    let get = |name: &str| field(fields, name).expect("presence checked");
    let (n1, n2) = (sys.x1.dim(), sys.x2.dim());
    let state = sys.state_space();
    let inv = |v: Vec<f64>| v.into_iter().map(|x| 1.0 / x).collect::<Vec<_>>();
    match kind {
        PhysicsKind::Wave | PhysicsKind::Beam => {
            let (mass, stiff) = if kind == PhysicsKind::Wave {
                ("rho", "T")
            } else {
                ("mu", "bending")
            };
            let mut d = inv(positive(get(mass), n1)?);
            d.extend(positive(get(stiff), n2)?);
            ConstitutiveLaw::new(linalg::diag(&d), None, PortSplit::all_storage(n1 + n2), &state)
        }
        PhysicsKind::Elasticity => {
            let sxx = range(sys, "sxx")?;
            let syy = range(sys, "syy")?;
            let sxy = range(sys, "sxy")?;
            let lame = Lame {
                lambda: get("lambda").clone(),
                mu: get("mu").clone(),
            };
            let (lambda, mu) = lame.expand(sxx.len(), sxy.len())?;
            let mut q = DMatrix::zeros(n1 + n2, n1 + n2);
            for (i, r) in inv(positive(get("rho"), n1)?).into_iter().enumerate() {
                q[(i, i)] = r;
            }
            for c in 0..sxx.len() {
                let (ix, iy) = (n1 + sxx.start + c, n1 + syy.start + c);
                q[(ix, ix)] = lambda[c] + 2.0 * mu[c];
                q[(iy, iy)] = lambda[c] + 2.0 * mu[c];
                q[(ix, iy)] = lambda[c];
                q[(iy, ix)] = lambda[c];
            }
            for c in 0..sxy.len() {
                let i = n1 + sxy.start + c;
                q[(i, i)] = 2.0 * mu[sxx.len() + c];
            }
            ConstitutiveLaw::new(q, None, PortSplit::all_storage(n1 + n2), &state)
        }
        PhysicsKind::Maxwell => {
            let current = range(sys, "J")?;
            let n_h = n2 - current.len();
            let mut d = inv(positive(get("eps"), n1)?);
            d.extend(inv(positive(get("mu_mag"), n_h)?));
            let s = match field(fields, "eta_inv") {
                Some(eta) => {
                    eta.validate_nonnegative()?;
                    linalg::diag(&eta.expand(current.len())?)
                }
                None => DMatrix::zeros(current.len(), current.len()),
            };
            let split = PortSplit {
                storage: (0..n1 + n_h).collect(),
                resistive: (n1 + current.start..n1 + current.end).collect(),
            };
            ConstitutiveLaw::new(linalg::diag(&d), Some(s), split, &state)
        }
    }
}

fn range(sys: &PortSystem, name: &str) -> Result<std::ops::Range<usize>> {
    sys.x2_layout
        .range(name)
        .ok_or_else(|| Error::InvalidArgument(format!("system `{}` has no `{name}` block", sys.label)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DissipationReport {
    pub lossy: bool,
    /// Smallest eigenvalue of the symmetric part of `M_r·S`; `0` without a
    /// resistive port.
    pub min_eigenvalue: f64,
    pub symmetry_residual: f64,
}

/// Checks that `M_r·S` is symmetric positive semidefinite.
pub fn dissipation_check(law: &ConstitutiveLaw) -> Result<DissipationReport> {
    let Some(s) = &law.s else {
        return Ok(DissipationReport {
            lossy: false,
            min_eigenvalue: 0.0,
            symmetry_residual: 0.0,
        });
    };
    if s.nrows() == 0 {
        return Ok(DissipationReport {
            lossy: false,
            min_eigenvalue: 0.0,
            symmetry_residual: 0.0,
        });
    }
    let ms = law.resistive_space.gram() * s;
    let symmetry_residual = linalg::inf_norm(&(&ms - ms.transpose()));
    if !linalg::all_finite(&ms) || symmetry_residual > CONSTITUTIVE_SYM_TOL * linalg::inf_norm(&ms).max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidConstitutive(format!(
            "resistive map is not symmetric (residual {symmetry_residual:.3e})"
        )));
    }
    let min_eigenvalue = if linalg::is_diagonal(s) {
        s.diagonal().min()
    } else {
        ((&ms + ms.transpose()) * 0.5).symmetric_eigenvalues().min()
    };
    if min_eigenvalue < 0.0 {
        return Err(Error::IndefiniteResistance { min_eigenvalue });
    }
    Ok(DissipationReport {
        lossy: s.iter().any(|v| *v != 0.0),
        min_eigenvalue,
        symmetry_residual,
    })
}

/// Input-state-output system on the storage part after eliminating the
/// resistive port:
///
/// ```text
/// α̇ = A·Q·α + B·u,   y = C·Q·α + D·u,   f_r = R_e·Q·α + R_u·u
/// ```
#[derive(Debug, Clone)]
pub struct ClosedSystem {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub r_e: DMatrix<f64>,
    pub r_u: DMatrix<f64>,
    /// Trace map `G` on the storage part.
    pub trace: DMatrix<f64>,
    pub law: ConstitutiveLaw,
    pub boundary_space: GramSpace,
}

impl ClosedSystem {
    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    /// `A·Q`
    pub fn generator(&self) -> DMatrix<f64> {
        &self.a * &self.law.q
    }

    pub fn output(&self, alpha: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        &self.c * self.law.co_energy(alpha) + &self.d * u
    }

    pub fn resistive_flow(&self, alpha: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        &self.r_e * self.law.co_energy(alpha) + &self.r_u * u
    }

    /// `‖G·Q·α − u‖_N / max(‖G·Q·α‖_N, ‖u‖_N)`, zero when both vanish.
    pub fn compatibility_defect(&self, alpha: &DVector<f64>, u: &DVector<f64>) -> f64 {
        if u.is_empty() {
            return 0.0;
        }
        let trace = &self.trace * self.law.co_energy(alpha);
        let n = self.boundary_space.gram();
        let norm = |v: &DVector<f64>| v.dot(&(n * v)).max(0.0).sqrt();
        let scale = norm(&trace).max(norm(u));
        if scale == 0.0 {
            0.0
        } else {
            norm(&(trace - u)) / scale
        }
    }

    /// `⟨f_r, S·f_r⟩_{M_r}`
    pub fn dissipation(&self, f_r: &DVector<f64>) -> f64 {
        match &self.law.s {
            Some(s) if !f_r.is_empty() => f_r.dot(&(self.law.resistive_space.gram() * s * f_r)),
            _ => 0.0,
        }
    }
}

/// Eliminates the resistive port of `op` with the law's `S`.
pub fn close_ports(op: &ExtendedOperator, law: &ConstitutiveLaw) -> Result<ClosedSystem> {
    let n = op.a.nrows();
    law.split.validate(n)?;
    let (st, rs) = (&law.split.storage, &law.split.resistive);
    let a_ss = select(&op.a, st, st);
    let a_sr = select(&op.a, st, rs);
    let a_rs = select(&op.a, rs, st);
    let a_rr = select(&op.a, rs, rs);
    let b_s = select_rows(&op.b, st);
    let b_r = select_rows(&op.b, rs);
    let c_s = select_cols(&op.c, st);
    let c_r = select_cols(&op.c, rs);
    let nr = rs.len();
    let s = law.s.clone().unwrap_or_else(|| DMatrix::zeros(nr, nr));
    let (r_e, r_u) = if nr == 0 {
        (DMatrix::zeros(0, st.len()), DMatrix::zeros(0, op.b.ncols()))
    } else {
        let lu = (DMatrix::identity(nr, nr) - &a_rr * &s).lu();
        let r_e = lu.solve(&a_rs).ok_or(Error::Singular("resistive closure"))?;
        let r_u = lu.solve(&b_r).ok_or(Error::Singular("resistive closure"))?;
        (r_e, r_u)
    };
    let a_sr_s = &a_sr * &s;
    let c_r_s = &c_r * &s;
    Ok(ClosedSystem {
        a: a_ss + &a_sr_s * &r_e,
        b: b_s + &a_sr_s * &r_u,
        c: c_s + &c_r_s * &r_e,
        d: &c_r_s * &r_u,
        r_e,
        r_u,
        trace: select_cols(&op.g, st),
        law: law.clone(),
        boundary_space: op.boundary_space.clone(),
    })
}

/// Data of one time step.
#[derive(Debug, Clone)]
pub struct StepData<'a> {
    pub alpha_n: &'a DVector<f64>,
    pub alpha_next: &'a DVector<f64>,
    pub u_mid: &'a DVector<f64>,
    pub y_mid: &'a DVector<f64>,
    pub dt: f64,
}

/// Terms of the discrete balance `ΔH = Δt·(⟨y, u⟩_N − ⟨f_r, S·f_r⟩_{M_r})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceTerms {
    pub delta_h: f64,
    /// `⟨y_mid, u_mid⟩_N`
    pub boundary_power: f64,
    /// `⟨f_r, S·f_r⟩_{M_r}` at the midpoint.
    pub dissipated_power: f64,
    pub residual: f64,
}

pub fn balance_terms(step: &StepData<'_>, closed: &ClosedSystem) -> Result<BalanceTerms> {
    let n = closed.state_dim();
    check_dim("balance: alpha_n", n, step.alpha_n.len())?;
    check_dim("balance: alpha_next", n, step.alpha_next.len())?;
    check_dim("balance: u_mid", closed.input_dim(), step.u_mid.len())?;
    check_dim("balance: y_mid", closed.input_dim(), step.y_mid.len())?;
    let law = &closed.law;
    let delta_h = law.hamiltonian(step.alpha_next) - law.hamiltonian(step.alpha_n);
    let mid = (step.alpha_n + step.alpha_next) * 0.5;
    let boundary_power = closed.boundary_space.inner(step.y_mid, step.u_mid)?;
    let dissipated_power = closed.dissipation(&closed.resistive_flow(&mid, step.u_mid));
    let residual = (delta_h - step.dt * (boundary_power - dissipated_power)).abs();
    Ok(BalanceTerms {
        delta_h,
        boundary_power,
        dissipated_power,
        residual,
    })
}

/// `|H(α_{n+1}) − H(α_n) − Δt·(⟨y_mid, u_mid⟩_N − ⟨f_r, S·f_r⟩_{M_r})|`
pub fn power_balance_residual(step: &StepData<'_>, closed: &ClosedSystem) -> Result<f64> {
    Ok(balance_terms(step, closed)?.residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bcs::assemble_extended;
    use crate::discretization::{build_maxwell_3d, build_wave, GridSpec};

    fn wave(rho: f64, t: f64) -> (PortSystem, ConstitutiveLaw) {
        let f = [CoefficientField::uniform("rho", rho), CoefficientField::uniform("T", t)];
        let sys = build_wave(&GridSpec::unit(&[3]).unwrap(), &f[0], &f[1]).unwrap();
        let law = build_constitutive(PhysicsKind::Wave, &sys, &f).unwrap();
        (sys, law)
    }

    #[test]
    fn wave_q_is_pointwise() {
        let (_, law) = wave(2.0, 3.0);
        let d: Vec<f64> = law.q.diagonal().iter().copied().collect();
        assert_eq!(&d[..4], &[0.5; 4]);
        assert_eq!(&d[4..], &[3.0; 5]);
        assert!(law.is_lossless());
    }

    #[test]
    fn maxwell_insulator_has_identity_q_and_zero_s() {
        let grid = GridSpec::unit(&[2, 2, 2]).unwrap();
        let one = CoefficientField::uniform("eps", 1.0);
        let mu = CoefficientField::uniform("mu_mag", 1.0);
        let eta = CoefficientField::uniform("eta_inv", 0.0);
        let sys = build_maxwell_3d(&grid, &one, &mu, Some(&eta)).unwrap();
        let law = build_constitutive(PhysicsKind::Maxwell, &sys, &[one, mu, eta]).unwrap();
        let n = law.storage_dim();
        assert_eq!(law.q, DMatrix::identity(n, n));
        assert!(law.s.as_ref().unwrap().iter().all(|v| *v == 0.0));
        assert_eq!(law.split.resistive.len(), sys.x2_layout.range("J").unwrap().len());
        assert!(!dissipation_check(&law).unwrap().lossy);
    }

    #[test]
    fn beam_velocity_block() {
        let grid = GridSpec::unit(&[4]).unwrap();
        let f = [CoefficientField::uniform("mu", 4.0), CoefficientField::uniform("bending", 1.0)];
        let sys = crate::discretization::build_beam_1d(&grid, &f[0], &f[1]).unwrap();
        let law = build_constitutive(PhysicsKind::Beam, &sys, &f).unwrap();
        assert!(law.q.diagonal().rows(0, 5).iter().all(|v| *v == 0.25));
    }

    #[test]
    fn hamiltonian_hand_values() {
        let law = ConstitutiveLaw::new(
            DMatrix::identity(2, 2),
            None,
            PortSplit::all_storage(2),
            &GramSpace::identity(2),
        )
        .unwrap();
        let a = DVector::from_vec(vec![3.0, 4.0]);
        assert_eq!(hamiltonian(&law, &a).unwrap(), 12.5);
        assert_eq!(hamiltonian(&law, &(&a * 2.0)).unwrap(), 50.0);
        assert_eq!(hamiltonian(&law, &DVector::zeros(2)).unwrap(), 0.0);
        assert!(hamiltonian(&law, &DVector::zeros(3)).is_err());
    }

    #[test]
    fn dissipation_classification() {
        let gram = GramSpace::identity(3);
        let split = PortSplit {
            storage: vec![0],
            resistive: vec![1, 2],
        };
        let q = DMatrix::identity(1, 1);
        let lossy = ConstitutiveLaw::new(q.clone(), Some(linalg::diag(&[1.0, 2.0])), split.clone(), &gram).unwrap();
        let r = dissipation_check(&lossy).unwrap();
        assert!(r.lossy);
        assert_eq!(r.min_eigenvalue, 1.0);
        let bad = ConstitutiveLaw::new(q, Some(linalg::diag(&[1.0, -2.0])), split, &gram);
        assert!(matches!(bad.unwrap_err(), Error::IndefiniteResistance { .. }));
    }

    #[test]
    fn field_list_is_checked() {
        let (sys, _) = wave(1.0, 1.0);
        let only_rho = [CoefficientField::uniform("rho", 1.0)];
        assert!(build_constitutive(PhysicsKind::Wave, &sys, &only_rho).is_err());
        let negative = [CoefficientField::uniform("rho", -1.0), CoefficientField::uniform("T", 1.0)];
        assert!(build_constitutive(PhysicsKind::Wave, &sys, &negative).is_err());
        assert!(build_constitutive(PhysicsKind::Beam, &sys, &negative).is_err());
    }

    #[test]
    fn energy_bounds_are_positive() {
        let (_, law) = wave(2.0, 3.0);
        let (lo, hi) = law.energy_bounds();
        assert!((lo - 0.5).abs() < 1e-12 && (hi - 3.0).abs() < 1e-12);
    }

    #[test]
    fn closure_without_resistive_port_is_identity() {
        let (sys, law) = wave(1.0, 1.0);
        let op = assemble_extended(&sys).unwrap();
        let closed = close_ports(&op, &law).unwrap();
        assert_eq!(closed.a, op.a);
        assert_eq!(closed.b, op.b);
        assert_eq!(closed.c, op.c);
        assert!(closed.d.iter().all(|v| *v == 0.0));
    }
}
