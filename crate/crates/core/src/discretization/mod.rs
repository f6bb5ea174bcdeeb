//! Staggered-grid builders producing [`PortSystem`](crate::bcs::PortSystem)
//! values with an exact discrete Green identity.
//!
//! Every builder assembles its difference operators and, independently, the
//! boundary term `Γ` of the Green identity from one-dimensional pieces. The
//! boundary ports are then read off from `Γ` by [`factor_boundary_term`], so
//! `green_residual` compares two separately built matrices.

mod beam;
mod elasticity;
mod maxwell;
pub mod stencil;
mod wave;

use nalgebra::DMatrix;

use crate::dirac::GramSpace;
use crate::error::{Error, Result};

pub use beam::build_beam_1d;
pub use elasticity::{build_elasticity_2d, Lame};
pub use maxwell::{build_maxwell_3d, MaxwellLayout};
pub use wave::build_wave;

pub(crate) use wave::wave_1d_system;

/// Uniform tensor-product grid on `[0, L₁] × … × [0, L_d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    cells: Vec<usize>,
    lengths: Vec<f64>,
}

/// Point sets of one grid axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    PrimalNode,
    CellCenter,
    /// Cell midpoints plus the two boundary points.
    ExtendedStaggered,
}

impl GridSpec {
    pub fn new(cells: &[usize], lengths: &[f64]) -> Result<Self> {
        if cells.is_empty() || cells.len() > 3 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1, 2 or 3, got {}",
                cells.len()
            )));
        }
        if cells.len() != lengths.len() {
            return Err(Error::InvalidGrid(format!(
                "{} cell counts but {} lengths",
                cells.len(),
                lengths.len()
            )));
        }
        if let Some(c) = cells.iter().find(|&&c| c < 2) {
            return Err(Error::InvalidGrid(format!(
                "at least 2 cells per axis required, got {c}"
            )));
        }
        if let Some(l) = lengths.iter().find(|&&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::InvalidGrid(format!(
                "axis lengths must be positive, got {l}"
            )));
        }
        Ok(Self {
            cells: cells.to_vec(),
            lengths: lengths.to_vec(),
        })
    }

    /// Unit-length axes.
    pub fn unit(cells: &[usize]) -> Result<Self> {
        Self::new(cells, &vec![1.0; cells.len()])
    }

    pub fn dimension(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn axis(&self, k: usize) -> stencil::Axis {
        stencil::Axis::new(self.cells[k], self.lengths[k])
    }

    pub fn axis_points(&self, k: usize, placement: Placement) -> Vec<f64> {
        let ax = self.axis(k);
        match placement {
            Placement::PrimalNode => ax.node_coords(),
            Placement::CellCenter => ax.cell_coords(),
            Placement::ExtendedStaggered => ax.ext_coords(),
        }
    }

    pub(crate) fn require_dimension(&self, dims: &[usize], builder: &str) -> Result<()> {
        if dims.contains(&self.dimension()) {
            Ok(())
        } else {
            Err(Error::InvalidGrid(format!(
                "{builder} needs a {dims:?}-dimensional grid, got {}",
                self.dimension()
            )))
        }
    }
}

/// Material coefficient, either uniform (one value) or one value per degree
/// of freedom of the block it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    pub name: String,
    pub values: Vec<f64>,
}

impl CoefficientField {
    pub fn uniform(name: &str, value: f64) -> Self {
        Self {
            name: name.to_string(),
            values: vec![value],
        }
    }

    pub fn per_dof(name: &str, values: Vec<f64>) -> Self {
        Self {
            name: name.to_string(),
            values,
        }
    }

    fn invalid(&self, reason: String) -> Error {
        Error::InvalidCoefficient {
            name: self.name.clone(),
            reason,
        }
    }

    /// Strictly positive and finite.
    pub fn validate_positive(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(self.invalid("no values".into()));
        }
        match self.values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            Some(v) => Err(self.invalid(format!("values must be positive and finite, got {v}"))),
            None => Ok(()),
        }
    }

    /// Nonnegative and finite.
    pub fn validate_nonnegative(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(self.invalid("no values".into()));
        }
        match self.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            Some(v) => Err(self.invalid(format!("values must be nonnegative and finite, got {v}"))),
            None => Ok(()),
        }
    }

    /// Values for a block of `n` degrees of freedom.
    pub fn expand(&self, n: usize) -> Result<Vec<f64>> {
        match self.values.len() {
            1 => Ok(vec![self.values[0]; n]),
            len if len == n => Ok(self.values.clone()),
            len => Err(self.invalid(format!("expected 1 or {n} values, got {len}"))),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Boundary ports read off a boundary term `Γ = Pᵀ·N·R`.
#[derive(Debug, Clone)]
pub struct BoundaryFactor {
    /// Extraction of the rows of `Γ` that carry boundary coupling.
    pub extraction: DMatrix<f64>,
    /// Diagonal boundary Gram: the absolute row sums of those rows.
    pub gram: GramSpace,
    /// `N⁻¹·Γ[rows, :]`
    pub reduced: DMatrix<f64>,
}

/// Factors `Γ` through its nonzero rows. The weight of a row is its absolute
/// entry sum, i.e. the boundary quadrature weight of that degree of freedom.
pub fn factor_boundary_term(gamma: &DMatrix<f64>) -> Result<BoundaryFactor> {
    let rows: Vec<usize> = (0..gamma.nrows())
        .filter(|&i| gamma.row(i).iter().any(|v| *v != 0.0))
        .collect();
    let weights: Vec<f64> = rows
        .iter()
        .map(|&i| gamma.row(i).iter().map(|v| v.abs()).sum())
        .collect();
    let mut extraction = DMatrix::zeros(rows.len(), gamma.nrows());
    let mut reduced = DMatrix::zeros(rows.len(), gamma.ncols());
    for (k, &i) in rows.iter().enumerate() {
        extraction[(k, i)] = 1.0;
        reduced.set_row(k, &(gamma.row(i) / weights[k]));
    }
    Ok(BoundaryFactor {
        extraction,
        gram: GramSpace::diagonal(&weights)?,
        reduced,
    })
}

/// Weights of a tensor-product point set; the first factor is the slow index.
pub(crate) fn kron_weights(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}
