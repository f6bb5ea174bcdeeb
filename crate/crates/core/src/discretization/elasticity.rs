use nalgebra::DMatrix;

use super::{factor_boundary_term, kron_weights, CoefficientField, GridSpec};
use crate::bcs::{Layout, PortSystem};
use crate::dirac::GramSpace;
use crate::error::{Error, Result};
use crate::linalg;

/// Isotropic plane stiffness. `lambda` is uniform or given per normal-stress
/// point; `mu` is uniform or given per normal-stress point followed by the
/// shear-stress points.
#[derive(Debug, Clone, PartialEq)]
pub struct Lame {
    pub lambda: CoefficientField,
    pub mu: CoefficientField,
}

impl Lame {
    pub fn uniform(lambda: f64, mu: f64) -> Self {
        Self {
            lambda: CoefficientField::uniform("lambda", lambda),
            mu: CoefficientField::uniform("mu", mu),
        }
    }

    /// `λ` at the normal-stress points and `μ` at normal then shear points,
    /// checked for a positive-definite plane stiffness (`μ > 0`, `λ + μ > 0`).
    pub fn expand(&self, n_normal: usize, n_shear: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let lambda = self.lambda.expand(n_normal)?;
        let mu = self.mu.expand(n_normal + n_shear)?;
        if let Some(m) = mu.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::InvalidCoefficient {
                name: self.mu.name.clone(),
                reason: format!("shear modulus must be positive, got {m}"),
            });
        }
        if let Some((l, m)) = lambda
            .iter()
            .zip(&mu)
            .find(|(l, m)| !(l.is_finite() && **l + **m > 0.0))
        {
            return Err(Error::InvalidCoefficient {
                name: self.lambda.name.clone(),
                reason: format!("stiffness not positive-definite: lambda + mu = {}", l + m),
            });
        }
        Ok((lambda, mu))
    }
}

/// Plane elasticity on a Virieux staggered layout with traction control.
///
/// `vx` lives on x-nodes × extended y-points, `vy` on extended x-points ×
/// y-nodes, `σxx, σyy` on extended × extended points, `σxy` on nodes × nodes.
/// `U¹` is trivial; `U²` carries the boundary tractions, paired with the
/// boundary velocities through `β¹`.
pub fn build_elasticity_2d(grid: &GridSpec, rho: &CoefficientField, stiffness: &Lame) -> Result<PortSystem> {
    grid.require_dimension(&[2], "elasticity")?;
    rho.validate_positive()?;
    let (ax, ay) = (grid.axis(0), grid.axis(1));
    let (nxn, nxe, nyn, nye) = (ax.n_nodes(), ax.n_ext(), ay.n_nodes(), ay.n_ext());
    let (n_vx, n_vy) = (nxn * nye, nxe * nyn);
    let (n_c, n_s) = (nxe * nye, nxn * nyn);
    rho.expand(n_vx + n_vy)?;
    stiffness.expand(n_c, n_s)?;

    let id = |n: usize| DMatrix::<f64>::identity(n, n);
    let (fx, fy, dx, dy) = (ax.grad(), ay.grad(), ax.div(), ay.div());

    let l_xx = linalg::kron(&fx, &id(nye));
    let l_yy = linalg::kron(&id(nxe), &fy);
    let l_xy_x = linalg::kron(&id(nxn), &dy) * 0.5;
    let l_xy_y = linalg::kron(&dx, &id(nyn)) * 0.5;
    let x1_sizes = [n_vx, n_vy];
    let x2_sizes = [n_c, n_c, n_s];
    let l = linalg::block_matrix(
        &x2_sizes,
        &x1_sizes,
        &[(0, 0, &l_xx), (1, 1, &l_yy), (2, 0, &l_xy_x), (2, 1, &l_xy_y)],
    );

    let k_x_xx = -linalg::kron(&dx, &id(nye));
    let k_x_xy = -linalg::kron(&id(nxn), &fy);
    let k_y_yy = -linalg::kron(&id(nxe), &dy);
    let k_y_xy = -linalg::kron(&fx, &id(nyn));
    let k = linalg::block_matrix(
        &x1_sizes,
        &x2_sizes,
        &[(0, 0, &k_x_xx), (0, 2, &k_x_xy), (1, 1, &k_y_yy), (1, 2, &k_y_xy)],
    );

    let (sx, sy) = (ax.sbp_boundary(), ay.sbp_boundary());
    let g_x_xx = linalg::kron(&sx, &ay.ext_gram());
    let g_x_xy = linalg::kron(&ax.node_gram(), &sy.transpose());
    let g_y_yy = linalg::kron(&ax.ext_gram(), &sy);
    let g_y_xy = linalg::kron(&sx.transpose(), &ay.node_gram());
    let gamma = linalg::block_matrix(
        &x1_sizes,
        &x2_sizes,
        &[(0, 0, &g_x_xx), (0, 2, &g_x_xy), (1, 1, &g_y_yy), (1, 2, &g_y_xy)],
    );
    let boundary = factor_boundary_term(&gamma)?;

    let mut w1 = kron_weights(&ax.node_weights(), &ay.ext_weights());
    w1.extend(kron_weights(&ax.ext_weights(), &ay.node_weights()));
    let center = kron_weights(&ax.ext_weights(), &ay.ext_weights());
    let mut w2 = center.clone();
    w2.extend(&center);
    w2.extend(kron_weights(&ax.node_weights(), &ay.node_weights()).iter().map(|w| 2.0 * w));

    Ok(PortSystem {
        label: "elasticity2d".into(),
        x1: GramSpace::diagonal(&w1)?,
        x2: GramSpace::diagonal(&w2)?,
        u1: GramSpace::trivial(),
        u2: boundary.gram,
        l,
        k,
        gamma1: DMatrix::zeros(0, n_vx + n_vy),
        gamma2: boundary.reduced,
        beta1: boundary.extraction,
        beta2: DMatrix::zeros(0, 2 * n_c + n_s),
        x1_layout: Layout::new(&[("vx", n_vx), ("vy", n_vy)]),
        x2_layout: Layout::new(&[("sxx", n_c), ("syy", n_c), ("sxy", n_s)]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bcs::green_residual;
    use crate::discretization::Placement;
    use nalgebra::DVector;

    fn build(nx: usize, ny: usize) -> (GridSpec, PortSystem) {
        let grid = GridSpec::new(&[nx, ny], &[1.0, 1.5]).unwrap();
        let sys = build_elasticity_2d(&grid, &CoefficientField::uniform("rho", 1.0), &Lame::uniform(1.0, 1.0)).unwrap();
        (grid, sys)
    }

    #[test]
    fn green_identity_on_4x4() {
        let (_, sys) = build(4, 4);
        assert!(green_residual(&sys).unwrap() <= 1e-12 * sys.green_scale());
        assert_eq!(sys.dims().u1, 0);
    }

    fn velocity(grid: &GridSpec, f: impl Fn(f64, f64) -> (f64, f64)) -> DVector<f64> {
        let xn = grid.axis_points(0, Placement::PrimalNode);
        let xe = grid.axis_points(0, Placement::ExtendedStaggered);
        let yn = grid.axis_points(1, Placement::PrimalNode);
        let ye = grid.axis_points(1, Placement::ExtendedStaggered);
        let mut v = Vec::new();
        for x in &xn {
            for y in &ye {
                v.push(f(*x, *y).0);
            }
        }
        for x in &xe {
            for y in &yn {
                v.push(f(*x, *y).1);
            }
        }
        DVector::from_vec(v)
    }

    #[test]
    fn rigid_motions_are_strain_free() {
        let (grid, sys) = build(4, 3);
        let translation = velocity(&grid, |_, _| (1.0, 0.0));
        assert!((&sys.l * translation).amax() < 1e-13);
        let rotation = velocity(&grid, |x, y| (-y, x));
        assert!((&sys.l * rotation).amax() < 1e-12);
        let stretch = velocity(&grid, |x, _| (x, 0.0));
        assert!((&sys.l * stretch).amax() > 0.5);
    }

    #[test]
    fn stiffness_validation() {
        assert!(Lame::uniform(1.0, 1.0).expand(4, 2).is_ok());
        assert!(Lame::uniform(1.0, 0.0).expand(4, 2).is_err());
        assert!(Lame::uniform(-2.0, 1.0).expand(4, 2).is_err());
        assert!(Lame::uniform(-0.5, 1.0).expand(4, 2).is_ok());
    }
}
