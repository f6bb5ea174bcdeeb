//! Boundary control systems at finite dimension.
//!
//! A [`PortSystem`] carries the operator quadruple `(L, K, γ, β)` together with
//! the Gram matrices of the state spaces `X¹, X²` and boundary spaces `U¹, U²`.
//! The structure operator is `J = [[0, −K], [L, 0]]` on `X = X¹ × X²` and the
//! trace map is `G = blkdiag(γ¹, γ²)`. Everything here hinges on the discrete
//! Green identity
//!
//! ```text
//! Lᵀ·M₂ − M₁·K = γ¹ᵀ·N₁·β² + β¹ᵀ·N₂·γ²
//! ```
//!
//! which makes `J` skew on `ker G` and lets [`assemble_extended`] produce a
//! structure operator whose graph is a Dirac structure.

use nalgebra::DMatrix;

use crate::dirac::{self, GramSpace, SubspaceBasis};
use crate::error::{check_dim, Error, Result};
use crate::linalg;

/// Relative tolerance of the structural identities (Green, skewness).
pub const STRUCTURAL_TOL: f64 = 1e-12;

/// Relative tolerance of the splitting identities `J = A + B·G`, `G·H = I`.
pub const SPLIT_TOL: f64 = 1e-13;

/// Rank threshold for the trace maps.
pub const TRACE_RANK_TOL: f64 = 1e-10;

/// Named contiguous segments of a state space, e.g. `vx`, `vy` of a velocity space.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Layout {
    pub segments: Vec<(String, usize)>,
}

impl Layout {
    pub fn single(name: &str, len: usize) -> Self {
        Self {
            segments: vec![(name.to_string(), len)],
        }
    }

    pub fn new(segments: &[(&str, usize)]) -> Self {
        Self {
            segments: segments.iter().map(|(n, l)| (n.to_string(), *l)).collect(),
        }
    }

    pub fn total(&self) -> usize {
        self.segments.iter().map(|(_, l)| l).sum()
    }

    /// Offset and length of a named segment.
    pub fn range(&self, name: &str) -> Option<std::ops::Range<usize>> {
        let mut off = 0;
        for (n, l) in &self.segments {
            if n == name {
                return Some(off..off + l);
            }
            off += l;
        }
        None
    }
}

/// Finite-dimensional realization of the boundary-control quadruple.
#[derive(Debug, Clone, PartialEq)]
pub struct PortSystem {
    pub label: String,
    pub x1: GramSpace,
    pub x2: GramSpace,
    pub u1: GramSpace,
    pub u2: GramSpace,
    /// `X¹ → X²`
    pub l: DMatrix<f64>,
    /// `X² → X¹`
    pub k: DMatrix<f64>,
    /// `X¹ → U¹`
    pub gamma1: DMatrix<f64>,
    /// `X² → U²`
    pub gamma2: DMatrix<f64>,
    /// `X¹ → U²` (dual identified through `N₂`)
    pub beta1: DMatrix<f64>,
    /// `X² → U¹` (dual identified through `N₁`)
    pub beta2: DMatrix<f64>,
    pub x1_layout: Layout,
    pub x2_layout: Layout,
}

impl PortSystem {
    pub fn dims(&self) -> SystemDims {
        SystemDims {
            x1: self.x1.dim(),
            x2: self.x2.dim(),
            u1: self.u1.dim(),
            u2: self.u2.dim(),
        }
    }

    pub fn validate_dims(&self) -> Result<()> {
        let d = self.dims();
        let expect = |ctx, m: &DMatrix<f64>, r: usize, c: usize| -> Result<()> {
            check_dim(ctx, r, m.nrows())?;
            check_dim(ctx, c, m.ncols())
        };
        expect("L: X1 -> X2", &self.l, d.x2, d.x1)?;
        expect("K: X2 -> X1", &self.k, d.x1, d.x2)?;
        expect("gamma1: X1 -> U1", &self.gamma1, d.u1, d.x1)?;
        expect("gamma2: X2 -> U2", &self.gamma2, d.u2, d.x2)?;
        expect("beta1: X1 -> U2", &self.beta1, d.u2, d.x1)?;
        expect("beta2: X2 -> U1", &self.beta2, d.u1, d.x2)?;
        if self.x1_layout.total() != d.x1 || self.x2_layout.total() != d.x2 {
            return Err(Error::InvalidArgument(format!(
                "layout sizes ({}, {}) do not match state dims ({}, {})",
                self.x1_layout.total(),
                self.x2_layout.total(),
                d.x1,
                d.x2
            )));
        }
        Ok(())
    }

    /// `M = blkdiag(M₁, M₂)`
    pub fn state_space(&self) -> GramSpace {
        GramSpace::product(&[&self.x1, &self.x2])
    }

    /// `N = blkdiag(N₁, N₂)`
    pub fn boundary_space(&self) -> GramSpace {
        GramSpace::product(&[&self.u1, &self.u2])
    }

    /// `J = [[0, −K], [L, 0]]`
    pub fn structure_matrix(&self) -> DMatrix<f64> {
        let d = self.dims();
        let neg_k = -&self.k;
        linalg::block_matrix(&[d.x1, d.x2], &[d.x1, d.x2], &[(0, 1, &neg_k), (1, 0, &self.l)])
    }

    /// `G = blkdiag(γ¹, γ²)`
    pub fn trace_map(&self) -> DMatrix<f64> {
        linalg::block_diag(&[&self.gamma1, &self.gamma2])
    }

    /// `C = [[0, β²], [β¹, 0]]`
    pub fn observation_map(&self) -> DMatrix<f64> {
        let d = self.dims();
        linalg::block_matrix(
            &[d.u1, d.u2],
            &[d.x1, d.x2],
            &[(0, 1, &self.beta2), (1, 0, &self.beta1)],
        )
    }

    /// `‖L‖∞ + ‖K‖∞`, the reference scale of the Green residual.
    pub fn green_scale(&self) -> f64 {
        linalg::inf_norm(&self.l) + linalg::inf_norm(&self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemDims {
    pub x1: usize,
    pub x2: usize,
    pub u1: usize,
    pub u2: usize,
}

impl SystemDims {
    pub fn state(&self) -> usize {
        self.x1 + self.x2
    }

    pub fn boundary(&self) -> usize {
        self.u1 + self.u2
    }

    pub fn total(&self) -> usize {
        self.state() + self.boundary()
    }
}

/// Residual matrix `Lᵀ·M₂ − M₁·K − γ¹ᵀ·N₁·β² − β¹ᵀ·N₂·γ²`.
pub fn green_defect(sys: &PortSystem) -> Result<DMatrix<f64>> {
    sys.validate_dims()?;
    let lhs = sys.l.transpose() * sys.x2.gram() - sys.x1.gram() * &sys.k;
    let bnd = sys.gamma1.transpose() * sys.u1.gram() * &sys.beta2
        + sys.beta1.transpose() * sys.u2.gram() * &sys.gamma2;
    Ok(lhs - bnd)
}

/// `‖Lᵀ·M₂ − M₁·K − γ¹ᵀ·N₁·β² − β¹ᵀ·N₂·γ²‖∞`
pub fn green_residual(sys: &PortSystem) -> Result<f64> {
    Ok(linalg::inf_norm(&green_defect(sys)?))
}

fn check_surjective(map: &'static str, g: &DMatrix<f64>) -> Result<()> {
    let deficit = g.nrows() - linalg::rank(g, TRACE_RANK_TOL).min(g.nrows());
    if deficit > 0 {
        Err(Error::NotSurjective { map, deficit })
    } else {
        Ok(())
    }
}

/// Basis of `ker γ`, orthonormal in the Gram of `space`.
fn gram_orthonormal_kernel(gamma: &DMatrix<f64>, space: &GramSpace) -> Result<DMatrix<f64>> {
    let z = linalg::null_space(gamma, TRACE_RANK_TOL);
    if z.ncols() == 0 {
        return Ok(z);
    }
    let s = z.transpose() * space.gram() * &z;
    let chol = s.cholesky().ok_or(Error::Singular("kernel Gram orthonormalization"))?;
    // s = R·Rᵀ, so z·R⁻ᵀ is Gram-orthonormal
    let inv = chol
        .l()
        .transpose()
        .solve_upper_triangular(&DMatrix::identity(z.ncols(), z.ncols()))
        .ok_or(Error::Singular("kernel Gram orthonormalization"))?;
    Ok(z * inv)
}

/// Generator restricted to `ker G`, in a Gram-orthonormal kernel basis.
#[derive(Debug, Clone)]
pub struct KernelRestriction {
    /// `Zᵀ·M·J·Z`
    pub a_red: DMatrix<f64>,
    /// Columns span `ker γ¹ × ker γ²`, with `Zᵀ·M·Z = I`.
    pub z: DMatrix<f64>,
}

impl KernelRestriction {
    pub fn skew_residual(&self) -> f64 {
        linalg::skew_residual(&self.a_red)
    }
}

fn restrict(sys: &PortSystem) -> Result<KernelRestriction> {
    let z1 = gram_orthonormal_kernel(&sys.gamma1, &sys.x1)?;
    let z2 = gram_orthonormal_kernel(&sys.gamma2, &sys.x2)?;
    let z = linalg::block_diag(&[&z1, &z2]);
    let m = sys.state_space();
    let a_red = z.transpose() * m.gram() * sys.structure_matrix() * &z;
    Ok(KernelRestriction { a_red, z })
}

/// `A_red = Zᵀ·M·J·Z` on `ker G`; skew whenever the Green identity holds.
pub fn kernel_restriction(sys: &PortSystem) -> Result<KernelRestriction> {
    sys.validate_dims()?;
    check_surjective("gamma1", &sys.gamma1)?;
    check_surjective("gamma2", &sys.gamma2)?;
    restrict(sys)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionVerdict {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Finite-dimensional counterparts of the boundary-control-system conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct BcsReport {
    pub trace_rank: usize,
    pub boundary_dim: usize,
    pub kernel_dim: usize,
    pub restricted_skew_residual: f64,
    /// Condition number of `I − A_red`.
    pub cond_minus: f64,
    /// Condition number of `I + A_red`.
    pub cond_plus: f64,
    pub conditions: Vec<ConditionVerdict>,
}

impl BcsReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn rank_deficit(&self) -> usize {
        self.boundary_dim - self.trace_rank
    }
}

/// Reports the conditions (i)-(iv) with `β = 1`, plus `I + A_red` onto.
/// Failures are report content, never errors.
pub fn check_bcs_conditions(sys: &PortSystem) -> Result<BcsReport> {
    sys.validate_dims()?;
    let g = sys.trace_map();
    let boundary_dim = g.nrows();
    let trace_rank = linalg::rank(&g, TRACE_RANK_TOL).min(boundary_dim);
    let restriction = restrict(sys)?;
    let kernel_dim = restriction.z.ncols();
    let a = &restriction.a_red;
    let skew = restriction.skew_residual();
    let skew_tol = STRUCTURAL_TOL * (1.0 + linalg::inf_norm(a));
    let id = DMatrix::identity(kernel_dim, kernel_dim);
    let minus = &id - a;
    let plus = &id + a;
    let cond_minus = linalg::cond2(&minus);
    let cond_plus = linalg::cond2(&plus);
    let smallest_sv = |m: &DMatrix<f64>| linalg::singular_values(m).last().copied().unwrap_or(1.0);

    let deficit = boundary_dim - trace_rank;
    let conditions = vec![
        ConditionVerdict {
            name: "(i) G is onto",
            passed: deficit == 0,
            detail: if deficit == 0 {
                format!("rank {trace_rank} = dim U {boundary_dim}")
            } else {
                format!("rank deficit {deficit}")
            },
        },
        ConditionVerdict {
            name: "(ii) J restricted to ker G is skew",
            passed: skew <= skew_tol,
            detail: format!("dim ker G = {kernel_dim}, skew residual {skew:.3e}"),
        },
        ConditionVerdict {
            name: "(iii) I - A_red is onto",
            passed: cond_minus.is_finite(),
            detail: format!("cond {cond_minus:.6e}"),
        },
        ConditionVerdict {
            name: "(iv) ker(I - A_red) = {0}",
            passed: smallest_sv(&minus) > 0.0,
            detail: format!("smallest singular value {:.6e}", smallest_sv(&minus)),
        },
        ConditionVerdict {
            name: "I + A_red is onto",
            passed: cond_plus.is_finite(),
            detail: format!("cond {cond_plus:.6e}"),
        },
    ];
    Ok(BcsReport {
        trace_rank,
        boundary_dim,
        kernel_dim,
        restricted_skew_residual: skew,
        cond_minus,
        cond_plus,
        conditions,
    })
}

/// `J = A + B·G` together with the right inverse `H` of `G`.
#[derive(Debug, Clone)]
pub struct Splitting {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    /// Gram-weighted minimum-norm right inverse of `G`.
    pub h: DMatrix<f64>,
    /// `Π = I − H·G`, the Gram-orthogonal projection onto `ker G`.
    pub projector: DMatrix<f64>,
}

impl Splitting {
    /// `‖J − (A + B·G)‖∞`
    pub fn reconstruction_residual(&self, j: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
        linalg::inf_norm(&(j - (&self.a + &self.b * g)))
    }
}

/// `H = M⁻¹Gᵀ(G M⁻¹ Gᵀ)⁻¹`, so that `G·H = I` and `Π = I − H·G` is
/// `M`-orthogonal.
pub fn gram_right_inverse(g: &DMatrix<f64>, m: &GramSpace) -> Result<DMatrix<f64>> {
    check_dim("right inverse (G columns)", m.dim(), g.ncols())?;
    if g.nrows() == 0 {
        return Ok(DMatrix::zeros(g.ncols(), 0));
    }
    let m_inv_gt = linalg::spd_solve(m.gram(), &g.transpose())?;
    let s = g * &m_inv_gt;
    let lu = s.lu();
    let s_inv = lu.try_inverse().ok_or(Error::NotSurjective {
        map: "G",
        deficit: g.nrows() - linalg::rank(g, TRACE_RANK_TOL).min(g.nrows()),
    })?;
    Ok(m_inv_gt * s_inv)
}

/// Splitting by projection onto `ker G`: `A = J·Π`, `B = J·H`.
///
/// It satisfies `J = A + B·G` and `A = J` on `ker G`, but `A` is generally not
/// skew in the state Gram, so it does not feed the extended operator.
pub fn projected_split(j: &DMatrix<f64>, g: &DMatrix<f64>, m: &GramSpace) -> Result<Splitting> {
    check_dim("projected split (J rows)", m.dim(), j.nrows())?;
    check_surjective("G", g)?;
    let h = gram_right_inverse(g, m)?;
    let n = m.dim();
    let projector = DMatrix::identity(n, n) - &h * g;
    Ok(Splitting {
        a: j * &projector,
        b: j * &h,
        h,
        projector,
    })
}

/// Splitting compatible with the boundary observation `C`:
/// `B = M⁻¹·Cᵀ·N` and `A = J − B·G`.
///
/// `B` is block-antidiagonal (`B¹ = M₂⁻¹β²ᵀN₁`, `B² = M₁⁻¹β¹ᵀN₂`), `A` agrees
/// with `J` on `ker G`, `B = (J − A)·H` for the Gram right inverse `H`, and the
/// Green identity makes `M·A` skew.
pub fn split_operator(sys: &PortSystem) -> Result<Splitting> {
    sys.validate_dims()?;
    check_surjective("gamma1", &sys.gamma1)?;
    check_surjective("gamma2", &sys.gamma2)?;
    let m = sys.state_space();
    let n = sys.boundary_space();
    let g = sys.trace_map();
    let c = sys.observation_map();
    let b = linalg::spd_solve(m.gram(), &(c.transpose() * n.gram()))?;
    let j = sys.structure_matrix();
    let a = &j - &b * &g;
    let h = gram_right_inverse(&g, &m)?;
    let dim = m.dim();
    let projector = DMatrix::identity(dim, dim) - &h * &g;
    Ok(Splitting { a, b, h, projector })
}

/// Assembled `𝒥 = [[A, B], [−C, 0]]` over `X¹ × X² × U¹ × U²`.
#[derive(Debug, Clone)]
pub struct ExtendedOperator {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    /// Trace map `G`.
    pub g: DMatrix<f64>,
    pub full: DMatrix<f64>,
    pub dims: SystemDims,
    /// `M = blkdiag(M₁, M₂)`
    pub state_space: GramSpace,
    /// `N = blkdiag(N₁, N₂)`
    pub boundary_space: GramSpace,
}

impl ExtendedOperator {
    /// `blkdiag(M₁, M₂, N₁, N₂)`
    pub fn effort_space(&self) -> GramSpace {
        GramSpace::product(&[&self.state_space, &self.boundary_space])
    }

    pub fn skew_residual(&self) -> f64 {
        linalg::skew_residual(&(self.effort_space().gram() * &self.full))
    }

    pub fn graph(&self) -> SubspaceBasis {
        dirac::graph_subspace(&self.full)
    }

    pub fn dirac_defect(&self) -> Result<f64> {
        dirac::dirac_defect(&self.graph(), &self.effort_space())
    }
}

/// Builds `𝒥` after checking the Green identity to [`STRUCTURAL_TOL`].
pub fn assemble_extended(sys: &PortSystem) -> Result<ExtendedOperator> {
    let residual = green_residual(sys)?;
    let tolerance = STRUCTURAL_TOL * sys.green_scale().max(1.0);
    if residual > tolerance {
        return Err(Error::GreenIdentity {
            residual,
            tolerance,
        });
    }
    let split = split_operator(sys)?;
    let c = sys.observation_map();
    let dims = sys.dims();
    let (nx, nu) = (dims.state(), dims.boundary());
    let neg_c = -&c;
    let zero = DMatrix::zeros(nu, nu);
    let full = linalg::block_matrix(
        &[nx, nu],
        &[nx, nu],
        &[(0, 0, &split.a), (0, 1, &split.b), (1, 0, &neg_c), (1, 1, &zero)],
    );
    Ok(ExtendedOperator {
        a: split.a,
        b: split.b,
        c,
        g: sys.trace_map(),
        full,
        dims,
        state_space: sys.state_space(),
        boundary_space: sys.boundary_space(),
    })
}
