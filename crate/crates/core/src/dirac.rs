//! Bond-space algebra over finite-dimensional Gram spaces.
//!
//! A bond element is a flow/effort pair `(f, e)` of vectors living in the same
//! [`GramSpace`]; duality is realized through the Gram matrix, so the power
//! pairing is `⟨f, e⟩ = fᵀ·W·e`. Subspaces of the bond space are stored as
//! column bases of the stacked vector `(f; e)`, flows first.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::linalg;

/// Relative rank threshold used when validating subspace bases and
/// comparing spans.
pub const RANK_TOL: f64 = 1e-10;

/// Kernel threshold of the pairing matrix, relative to its largest singular value.
pub const KERNEL_TOL: f64 = 1e-12;

/// A finite-dimensional Hilbert space given by a symmetric positive-definite
/// Gram (quadrature) matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSpace {
    gram: DMatrix<f64>,
}

impl GramSpace {
    pub fn new(gram: DMatrix<f64>) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::InvalidGram(format!(
                "expected a square matrix, got {}x{}",
                gram.nrows(),
                gram.ncols()
            )));
        }
        if gram != gram.transpose() {
            return Err(Error::InvalidGram("matrix is not symmetric".into()));
        }
        if !linalg::all_finite(&gram) {
            return Err(Error::InvalidGram("non-finite entry".into()));
        }
        if gram.nrows() > 0 && gram.clone().cholesky().is_none() {
            return Err(Error::InvalidGram("matrix is not positive-definite".into()));
        }
        Ok(Self { gram })
    }

    /// Diagonal Gram from positive weights.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidGram(format!("non-positive weight {w}")));
        }
        Ok(Self {
            gram: linalg::diag(weights),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            gram: DMatrix::identity(dim, dim),
        }
    }

    /// The zero-dimensional space.
    pub fn trivial() -> Self {
        Self::identity(0)
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// `fᵀ·W·e`
    pub fn inner(&self, f: &DVector<f64>, e: &DVector<f64>) -> Result<f64> {
        check_dim("inner product (flow)", self.dim(), f.len())?;
        check_dim("inner product (effort)", self.dim(), e.len())?;
        Ok(f.dot(&(&self.gram * e)))
    }

    /// Block-diagonal combination of several spaces.
    pub fn product(spaces: &[&GramSpace]) -> GramSpace {
        let grams: Vec<&DMatrix<f64>> = spaces.iter().map(|s| &s.gram).collect();
        GramSpace {
            gram: linalg::block_diag(&grams),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        linalg::is_diagonal(&self.gram)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BondElement {
    pub flow: DVector<f64>,
    pub effort: DVector<f64>,
}

impl BondElement {
    pub fn new(flow: DVector<f64>, effort: DVector<f64>) -> Result<Self> {
        check_dim("bond element", flow.len(), effort.len())?;
        Ok(Self { flow, effort })
    }

    pub fn from_slices(flow: &[f64], effort: &[f64]) -> Result<Self> {
        Self::new(
            DVector::from_column_slice(flow),
            DVector::from_column_slice(effort),
        )
    }

    pub fn dim(&self) -> usize {
        self.flow.len()
    }
}

/// Column basis of a subspace of the bond space `𝓕 × 𝓔` (rows: flows, then efforts).
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    basis: DMatrix<f64>,
}

impl SubspaceBasis {
    /// Validates linear independence of the columns.
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let r = linalg::rank(&basis, RANK_TOL);
        if r < basis.ncols() {
            return Err(Error::RankDeficient {
                rank: r,
                columns: basis.ncols(),
            });
        }
        Ok(Self { basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn flows(&self) -> DMatrix<f64> {
        let n = self.ambient_dim() / 2;
        self.basis.rows(0, n).into_owned()
    }

    pub fn efforts(&self) -> DMatrix<f64> {
        let n = self.ambient_dim() / 2;
        self.basis.rows(n, n).into_owned()
    }

    pub fn element(&self, k: usize) -> BondElement {
        let n = self.ambient_dim() / 2;
        let col = self.basis.column(k);
        BondElement {
            flow: col.rows(0, n).into_owned(),
            effort: col.rows(n, n).into_owned(),
        }
    }

    /// Mutual containment residual of the two column spans (0 for equal spans).
    pub fn span_distance(&self, other: &SubspaceBasis) -> f64 {
        if self.ambient_dim() != other.ambient_dim() {
            return f64::INFINITY;
        }
        let ab = linalg::containment_residual(&self.basis, &other.basis, RANK_TOL);
        let ba = linalg::containment_residual(&other.basis, &self.basis, RANK_TOL);
        ab.max(ba)
    }

    pub fn same_span(&self, other: &SubspaceBasis, tol: f64) -> bool {
        self.rank() == other.rank() && self.span_distance(other) <= tol
    }
}

/// Symmetric bond pairing `⟨f₁, e₂⟩ + ⟨f₂, e₁⟩`.
pub fn bond_pairing(b1: &BondElement, b2: &BondElement, space: &GramSpace) -> Result<f64> {
    check_dim("bond pairing (first element)", space.dim(), b1.dim())?;
    check_dim("bond pairing (second element)", space.dim(), b2.dim())?;
    Ok(space.inner(&b1.flow, &b2.effort)? + space.inner(&b2.flow, &b1.effort)?)
}

fn check_ambient(d: &SubspaceBasis, space: &GramSpace) -> Result<()> {
    check_dim("bond subspace ambient dimension", 2 * space.dim(), d.ambient_dim())
}

/// All bond elements whose pairing with every element of `d` vanishes.
pub fn orthogonal_companion(d: &SubspaceBasis, space: &GramSpace) -> Result<SubspaceBasis> {
    check_ambient(d, space)?;
    let n = space.dim();
    if d.rank() == 0 {
        return SubspaceBasis::new(DMatrix::identity(2 * n, 2 * n));
    }
    let w = space.gram();
    // Row k pairs (f, e) with the k-th basis element: (W e_k)ᵀ f + (W f_k)ᵀ e.
    let we = (w * d.efforts()).transpose();
    let wf = (w * d.flows()).transpose();
    let mut pairing = DMatrix::zeros(d.rank(), 2 * n);
    pairing.view_mut((0, 0), (d.rank(), n)).copy_from(&we);
    pairing.view_mut((0, n), (d.rank(), n)).copy_from(&wf);
    SubspaceBasis::new(linalg::null_space(&pairing, KERNEL_TOL))
}

/// Span distance between `d` and its companion; zero iff `d` is Dirac.
pub fn dirac_defect(d: &SubspaceBasis, space: &GramSpace) -> Result<f64> {
    let companion = orthogonal_companion(d, space)?;
    if companion.rank() != d.rank() {
        return Ok(f64::INFINITY);
    }
    Ok(d.span_distance(&companion))
}

/// `𝒟^[⊥] = 𝒟`, checked by mutual containment to `tol`.
pub fn is_dirac(d: &SubspaceBasis, space: &GramSpace, tol: f64) -> Result<bool> {
    Ok(dirac_defect(d, space)? <= tol)
}

/// Basis `[J; I]` of `{(J e, e)}`.
pub fn graph_subspace(j: &DMatrix<f64>) -> SubspaceBasis {
    let (m, n) = j.shape();
    let mut basis = DMatrix::zeros(m + n, n);
    basis.view_mut((0, 0), (m, n)).copy_from(j);
    basis
        .view_mut((m, 0), (n, n))
        .copy_from(&DMatrix::identity(n, n));
    // The identity block makes the columns independent.
    SubspaceBasis { basis }
}

/// `‖W·J + (W·J)ᵀ‖∞`; zero iff `⟨J e, e⟩ = 0` for every effort.
pub fn check_skew_symmetric_like(j: &DMatrix<f64>, space: &GramSpace) -> Result<f64> {
    check_dim("structure matrix rows", space.dim(), j.nrows())?;
    check_dim("structure matrix columns", space.dim(), j.ncols())?;
    Ok(linalg::skew_residual(&(space.gram() * j)))
}

/// Tolerance factor for the skewness of `J` in [`extended_structure_matrix`].
pub const EXTENDED_SKEW_TOL: f64 = 1e-14;

/// `[[J, B], [−Bᵀ, 0]]` for a skew `J`.
pub fn extended_structure_matrix(j: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !j.is_square() {
        return Err(Error::DimensionMismatch {
            context: "extended structure matrix (J square)",
            expected: j.nrows(),
            found: j.ncols(),
        });
    }
    check_dim("extended structure matrix (B rows)", j.nrows(), b.nrows())?;
    let residual = linalg::skew_residual(j);
    let tolerance = EXTENDED_SKEW_TOL * linalg::inf_norm(j).max(1.0);
    if residual > tolerance {
        return Err(Error::NotSkew {
            residual,
            tolerance,
        });
    }
    let n = j.nrows();
    let m = b.ncols();
    let neg_bt = -b.transpose();
    let zero = DMatrix::zeros(m, m);
    Ok(linalg::block_matrix(
        &[n, m],
        &[n, m],
        &[(0, 0, j), (0, 1, b), (1, 0, &neg_bt), (1, 1, &zero)],
    ))
}
