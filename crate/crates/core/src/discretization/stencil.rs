//! One-dimensional staggered operators on a uniform axis.
//!
//! Three point sets live on an axis with `n` cells of width `h`:
//!
//! - nodes `x_i = i·h`, `i = 0..=n`, trapezoid weights `h/2, h, …, h, h/2`;
//! - cells, midpoints `(i+½)·h`, weights `h`;
//! - the extended staggered set: left boundary point, the `n` midpoints, right
//!   boundary point, weights `w_b, h, …, h, w_b`.
//!
//! The difference operators satisfy the summation-by-parts identity
//! `Fᵀ·M_E + M_N·D = γ_Nᵀ·β_E` exactly, whatever `w_b` is.

use nalgebra::DMatrix;

use crate::linalg;

/// Boundary-point weight of the extended staggered set, in cell widths.
pub const BOUNDARY_WEIGHT_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub cells: usize,
    pub h: f64,
}

impl Axis {
    pub fn new(cells: usize, length: f64) -> Self {
        Self {
            cells,
            h: length / cells as f64,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.cells + 1
    }

    pub fn n_ext(&self) -> usize {
        self.cells + 2
    }

    pub fn boundary_weight(&self) -> f64 {
        BOUNDARY_WEIGHT_FRACTION * self.h
    }

    pub fn node_weights(&self) -> Vec<f64> {
        let mut w = vec![self.h; self.n_nodes()];
        w[0] = 0.5 * self.h;
        w[self.cells] = 0.5 * self.h;
        w
    }

    pub fn cell_weights(&self) -> Vec<f64> {
        vec![self.h; self.cells]
    }

    pub fn ext_weights(&self) -> Vec<f64> {
        let mut w = vec![self.h; self.n_ext()];
        w[0] = self.boundary_weight();
        w[self.cells + 1] = self.boundary_weight();
        w
    }

    pub fn node_gram(&self) -> DMatrix<f64> {
        linalg::diag(&self.node_weights())
    }

    pub fn ext_gram(&self) -> DMatrix<f64> {
        linalg::diag(&self.ext_weights())
    }

    pub fn node_coords(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| i as f64 * self.h).collect()
    }

    pub fn cell_coords(&self) -> Vec<f64> {
        (0..self.cells).map(|i| (i as f64 + 0.5) * self.h).collect()
    }

    pub fn ext_coords(&self) -> Vec<f64> {
        let mut x = vec![0.0];
        x.extend(self.cell_coords());
        x.push(self.cells as f64 * self.h);
        x
    }

    /// Nodes → extended set: midpoint differences, zero boundary rows.
    pub fn grad(&self) -> DMatrix<f64> {
        let n = self.cells;
        let mut f = DMatrix::zeros(n + 2, n + 1);
        for i in 0..n {
            f[(i + 1, i)] = -1.0 / self.h;
            f[(i + 1, i + 1)] = 1.0 / self.h;
        }
        f
    }

    /// Extended set → nodes: centered differences inside, half-cell
    /// differences against the boundary points at the two end nodes.
    pub fn div(&self) -> DMatrix<f64> {
        let n = self.cells;
        let h = self.h;
        let mut d = DMatrix::zeros(n + 1, n + 2);
        d[(0, 0)] = -2.0 / h;
        d[(0, 1)] = 2.0 / h;
        for i in 1..n {
            d[(i, i)] = -1.0 / h;
            d[(i, i + 1)] = 1.0 / h;
        }
        d[(n, n)] = -2.0 / h;
        d[(n, n + 1)] = 2.0 / h;
        d
    }

    /// End-node values `(v₀, v_n)`.
    pub fn node_trace(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(2, self.n_nodes());
        g[(0, 0)] = 1.0;
        g[(1, self.cells)] = 1.0;
        g
    }

    /// Outward normal component at the boundary points: `(−s_left, s_right)`.
    pub fn ext_normal_trace(&self) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(2, self.n_ext());
        b[(0, 0)] = -1.0;
        b[(1, self.cells + 1)] = 1.0;
        b
    }

    /// `γ_Nᵀ·β_E`, the boundary term of the summation-by-parts identity,
    /// written out entrywise.
    pub fn sbp_boundary(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n_nodes(), self.n_ext());
        m[(0, 0)] = -1.0;
        m[(self.cells, self.cells + 1)] = 1.0;
        m
    }

    /// Nodes → cells: plain differences.
    pub fn node_to_cell(&self) -> DMatrix<f64> {
        let n = self.cells;
        let mut f = DMatrix::zeros(n, n + 1);
        for i in 0..n {
            f[(i, i)] = -1.0 / self.h;
            f[(i, i + 1)] = 1.0 / self.h;
        }
        f
    }

    /// Second difference on nodes with zero rows at the two end nodes.
    pub fn second_difference(&self) -> DMatrix<f64> {
        let n = self.cells;
        let h2 = self.h * self.h;
        let mut t = DMatrix::zeros(n + 1, n + 1);
        for i in 1..n {
            t[(i, i - 1)] = 1.0 / h2;
            t[(i, i)] = -2.0 / h2;
            t[(i, i + 1)] = 1.0 / h2;
        }
        t
    }
}
