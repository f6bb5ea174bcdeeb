use nalgebra::DMatrix;

use super::stencil::Axis;
use super::{factor_boundary_term, kron_weights, CoefficientField, GridSpec};
use crate::bcs::{Layout, PortSystem};
use crate::dirac::GramSpace;
use crate::error::Result;
use crate::linalg;

/// Scalar wave equation with velocity control at the boundary.
///
/// Velocity lives on primal nodes, stress on the extended staggered set (one
/// stress component per axis in 2D). `U¹` collects the boundary nodes, `U²` is
/// trivial.
pub fn build_wave(grid: &GridSpec, rho: &CoefficientField, tension: &CoefficientField) -> Result<PortSystem> {
    grid.require_dimension(&[1, 2], "wave")?;
    rho.validate_positive()?;
    tension.validate_positive()?;
    let sys = match grid.dimension() {
        1 => wave_1d_system(grid.axis(0)),
        _ => wave_2d_system(grid.axis(0), grid.axis(1)),
    }?;
    rho.expand(sys.x1.dim())?;
    tension.expand(sys.x2.dim())?;
    Ok(sys)
}

/// 1D system without the grid-size check, so the 1-cell case is reachable.
pub(crate) fn wave_1d_system(ax: Axis) -> Result<PortSystem> {
    let boundary = factor_boundary_term(&ax.sbp_boundary())?;
    let (n1, n2) = (ax.n_nodes(), ax.n_ext());
    Ok(PortSystem {
        label: "wave1d".into(),
        x1: GramSpace::diagonal(&ax.node_weights())?,
        x2: GramSpace::diagonal(&ax.ext_weights())?,
        u1: boundary.gram,
        u2: GramSpace::trivial(),
        l: ax.grad(),
        k: -ax.div(),
        gamma1: boundary.extraction,
        gamma2: DMatrix::zeros(0, n2),
        beta1: DMatrix::zeros(0, n1),
        beta2: boundary.reduced,
        x1_layout: Layout::single("v", n1),
        x2_layout: Layout::single("sigma", n2),
    })
}

fn wave_2d_system(ax: Axis, ay: Axis) -> Result<PortSystem> {
    let (ix, iy) = (
        DMatrix::identity(ax.n_nodes(), ax.n_nodes()),
        DMatrix::identity(ay.n_nodes(), ay.n_nodes()),
    );
    let (nx_n, nx_e) = (ax.n_nodes(), ax.n_ext());
    let (ny_n, ny_e) = (ay.n_nodes(), ay.n_ext());
    let n1 = nx_n * ny_n;
    let (sx, sy) = (nx_e * ny_n, nx_n * ny_e);

    let gx = linalg::kron(&ax.grad(), &iy);
    let gy = linalg::kron(&ix, &ay.grad());
    let l = linalg::block_matrix(&[sx, sy], &[n1], &[(0, 0, &gx), (1, 0, &gy)]);
    let dx = -linalg::kron(&ax.div(), &iy);
    let dy = -linalg::kron(&ix, &ay.div());
    let k = linalg::block_matrix(&[n1], &[sx, sy], &[(0, 0, &dx), (0, 1, &dy)]);

    let gamma_x = linalg::kron(&ax.sbp_boundary(), &ay.node_gram());
    let gamma_y = linalg::kron(&ax.node_gram(), &ay.sbp_boundary());
    let gamma = linalg::block_matrix(&[n1], &[sx, sy], &[(0, 0, &gamma_x), (0, 1, &gamma_y)]);
    let boundary = factor_boundary_term(&gamma)?;

    let mut w2 = kron_weights(&ax.ext_weights(), &ay.node_weights());
    w2.extend(kron_weights(&ax.node_weights(), &ay.ext_weights()));
    Ok(PortSystem {
        label: "wave2d".into(),
        x1: GramSpace::diagonal(&kron_weights(&ax.node_weights(), &ay.node_weights()))?,
        x2: GramSpace::diagonal(&w2)?,
        u1: boundary.gram,
        u2: GramSpace::trivial(),
        l,
        k,
        gamma1: boundary.extraction,
        gamma2: DMatrix::zeros(0, sx + sy),
        beta1: DMatrix::zeros(0, n1),
        beta2: boundary.reduced,
        x1_layout: Layout::single("v", n1),
        x2_layout: Layout::new(&[("sigma_x", sx), ("sigma_y", sy)]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bcs::green_residual;
    use nalgebra::DVector;

    fn unit() -> (CoefficientField, CoefficientField) {
        (CoefficientField::uniform("rho", 1.0), CoefficientField::uniform("T", 1.0))
    }

    #[test]
    fn wave_1d_dims_and_green() {
        let (rho, t) = unit();
        let sys = build_wave(&GridSpec::unit(&[4]).unwrap(), &rho, &t).unwrap();
        let d = sys.dims();
        assert_eq!((d.x1, d.x2, d.u1, d.u2), (5, 6, 2, 0));
        assert!(green_residual(&sys).unwrap() <= 1e-15);
    }

    #[test]
    fn wave_1d_contracted_identity_on_three_nodes() {
        // n = 2: e1ᵀLᵀM2e2 − e1ᵀM1Ke2 is v·(σ·n) at the ends, per coordinate pair.
        let (rho, t) = unit();
        let sys = build_wave(&GridSpec::unit(&[2]).unwrap(), &rho, &t).unwrap();
        for i in 0..3 {
            for j in 0..4 {
                let e1 = DVector::from_fn(3, |k, _| if k == i { 1.0 } else { 0.0 });
                let e2 = DVector::from_fn(4, |k, _| if k == j { 1.0 } else { 0.0 });
                let lhs = (sys.l.transpose() * sys.x2.gram() * &e2).dot(&e1)
                    - (sys.x1.gram() * &sys.k * &e2).dot(&e1);
                let hand = match (i, j) {
                    (0, 0) => -1.0,
                    (2, 3) => 1.0,
                    _ => 0.0,
                };
                assert!((lhs - hand).abs() < 1e-15, "({i},{j}): {lhs}");
            }
        }
    }

    #[test]
    fn constants_are_in_kernel_of_grad() {
        let (rho, t) = unit();
        for cells in [vec![5], vec![3, 4]] {
            let sys = build_wave(&GridSpec::unit(&cells).unwrap(), &rho, &t).unwrap();
            let one = DVector::from_element(sys.x1.dim(), 1.0);
            assert!((&sys.l * one).amax() < 1e-13);
        }
    }

    #[test]
    fn wave_2d_dims() {
        let (rho, t) = unit();
        let sys = build_wave(&GridSpec::new(&[3, 4], &[1.0, 2.0]).unwrap(), &rho, &t).unwrap();
        let d = sys.dims();
        assert_eq!(d.x1, 4 * 5);
        assert_eq!(d.x2, 5 * 5 + 4 * 6);
        assert_eq!(d.u1, 2 * 4 + 2 * 5 - 4);
        assert!(green_residual(&sys).unwrap() <= 1e-12 * sys.green_scale());
    }

    #[test]
    fn rejects_bad_input() {
        let (rho, _) = unit();
        let bad = CoefficientField::uniform("T", 0.0);
        assert!(build_wave(&GridSpec::unit(&[4]).unwrap(), &rho, &bad).is_err());
        assert!(build_wave(&GridSpec::unit(&[2, 2, 2]).unwrap(), &rho, &rho).is_err());
        let wrong_len = CoefficientField::per_dof("rho", vec![1.0; 3]);
        assert!(build_wave(&GridSpec::unit(&[4]).unwrap(), &wrong_len, &rho).is_err());
    }
}
