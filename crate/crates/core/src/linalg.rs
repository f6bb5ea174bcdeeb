//! Dense linear-algebra helpers shared by the structural checks.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Induced infinity norm (largest absolute row sum). Zero for empty matrices.
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Block-diagonal assembly; zero-sized blocks are allowed.
pub fn block_diag(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(*b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Assembles a dense matrix from a grid of optional blocks. `None` entries are
/// zero; every row of blocks must agree on heights and every column on widths.
pub fn block_matrix(row_sizes: &[usize], col_sizes: &[usize], blocks: &[(usize, usize, &DMatrix<f64>)]) -> DMatrix<f64> {
    let row_off: Vec<usize> = offsets(row_sizes);
    let col_off: Vec<usize> = offsets(col_sizes);
    let mut out = DMatrix::zeros(row_sizes.iter().sum(), col_sizes.iter().sum());
    for &(bi, bj, b) in blocks {
        assert_eq!(b.nrows(), row_sizes[bi], "block row height");
        assert_eq!(b.ncols(), col_sizes[bj], "block column width");
        out.view_mut((row_off[bi], col_off[bj]), (b.nrows(), b.ncols()))
            .copy_from(b);
    }
    out
}

pub(crate) fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    sizes
        .iter()
        .map(|s| {
            let o = acc;
            acc += s;
            o
        })
        .collect()
}

pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

pub fn diag(values: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(values))
}

/// Singular values and right singular vectors of `a`, padded so that the
/// full right basis is available even when `a` has fewer rows than columns.
/// Returned in descending singular-value order.
fn full_right_svd(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.ncols();
    let padded = if a.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut v = DMatrix::zeros(n, order.len());
    for (k, &i) in order.iter().enumerate() {
        v.set_column(k, &v_t.row(i).transpose());
    }
    (sv, v)
}

/// Descending singular values.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Numerical rank with threshold `rel_tol * sigma_max`.
pub fn rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = singular_values(a);
    match sv.first() {
        None => 0,
        Some(0.0) => 0,
        Some(&smax) => sv.iter().filter(|&&s| s > rel_tol * smax).count(),
    }
}

/// Orthonormal basis of the kernel of `a`; singular values at or below
/// `rel_tol * sigma_max` count as zero.
pub fn null_space(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let n = a.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if a.nrows() == 0 || max_abs(a) == 0.0 {
        return DMatrix::identity(n, n);
    }
    let (sv, v) = full_right_svd(a);
    let smax = sv[0];
    let r = sv.iter().filter(|&&s| s > rel_tol * smax).count();
    v.columns(r, n - r).into_owned()
}

/// Orthonormal basis of the column span of `a`.
pub fn range_basis(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    if a.ncols() == 0 || a.nrows() == 0 || max_abs(a) == 0.0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > rel_tol * smax)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(a.nrows(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Relative distance of the columns of `b` from span(`a`):
/// ‖(I − QQᵀ)B‖_F / max(‖B‖_F, tiny), with Q an orthonormal basis of span(a).
pub fn containment_residual(a: &DMatrix<f64>, b: &DMatrix<f64>, rel_tol: f64) -> f64 {
    if b.ncols() == 0 {
        return 0.0;
    }
    let q = range_basis(a, rel_tol);
    let proj = &q * (q.transpose() * b);
    let num = (b - proj).norm();
    let den = b.norm().max(f64::MIN_POSITIVE);
    num / den
}

/// 2-norm condition number; infinite when singular.
pub fn cond2(a: &DMatrix<f64>) -> f64 {
    let sv = singular_values(a);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Symmetric part residual ‖W + Wᵀ‖∞.
pub fn skew_residual(w: &DMatrix<f64>) -> f64 {
    inf_norm(&(w + w.transpose()))
}

/// Inverse of a strictly positive diagonal matrix given by its diagonal.
pub fn inv_diag(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if !is_diagonal(m) {
        return None;
    }
    let d: Vec<f64> = (0..m.nrows()).map(|i| 1.0 / m[(i, i)]).collect();
    Some(diag(&d))
}

pub fn is_diagonal(m: &DMatrix<f64>) -> bool {
    m.is_square()
        && m.iter()
            .enumerate()
            .all(|(k, v)| *v == 0.0 || k % m.nrows() == k / m.nrows())
}

/// Solves `m x = rhs` for SPD `m`, using the diagonal fast path when possible.
pub fn spd_solve(m: &DMatrix<f64>, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if let Some(inv) = inv_diag(m) {
        return Ok(inv * rhs);
    }
    let chol = m
        .clone()
        .cholesky()
        .ok_or(Error::Singular("SPD solve"))?;
    Ok(chol.solve(rhs))
}

pub fn all_finite(m: &DMatrix<f64>) -> bool {
    m.iter().all(|v| v.is_finite())
}
