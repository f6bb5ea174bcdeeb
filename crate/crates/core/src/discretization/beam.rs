use nalgebra::DMatrix;

use super::{CoefficientField, GridSpec};
use crate::bcs::{Layout, PortSystem};
use crate::dirac::GramSpace;
use crate::error::{Error, Result};

/// Euler-Bernoulli beam: velocity and curvature on primal nodes, `L = K` the
/// second difference.
///
/// `U¹` stacks `[v(0), v(ℓ), ∂ₙv(0), ∂ₙv(ℓ)]`; the matching `β²` rows are the
/// shear force `−∂ₙm` at both ends followed by the bending moment at both ends.
pub fn build_beam_1d(grid: &GridSpec, mu: &CoefficientField, bending: &CoefficientField) -> Result<PortSystem> {
    grid.require_dimension(&[1], "beam")?;
    let ax = grid.axis(0);
    if ax.cells < 4 {
        return Err(Error::InvalidGrid(format!(
            "beam needs at least 4 cells for two boundary traces per end, got {}",
            ax.cells
        )));
    }
    mu.validate_positive()?;
    bending.validate_positive()?;
    let n = ax.n_nodes();
    mu.expand(n)?;
    bending.expand(n)?;

    let t = ax.second_difference();
    // first-order pieces: nodes → cells difference and its boundary read-off
    let f0 = ax.node_to_cell();
    let mut normal_cell = DMatrix::zeros(2, ax.cells);
    normal_cell[(0, 0)] = -1.0;
    normal_cell[(1, ax.cells - 1)] = 1.0;
    let node_trace = ax.node_trace();
    let normal_slope = &normal_cell * &f0;

    let mut gamma1 = DMatrix::zeros(4, n);
    gamma1.rows_mut(0, 2).copy_from(&node_trace);
    gamma1.rows_mut(2, 2).copy_from(&normal_slope);
    let mut beta2 = DMatrix::zeros(4, n);
    beta2.rows_mut(0, 2).copy_from(&(-&normal_slope));
    beta2.rows_mut(2, 2).copy_from(&node_trace);

    let w = ax.node_weights();
    Ok(PortSystem {
        label: "beam1d".into(),
        x1: GramSpace::diagonal(&w)?,
        x2: GramSpace::diagonal(&w)?,
        u1: GramSpace::identity(4),
        u2: GramSpace::trivial(),
        l: t.clone(),
        k: t,
        gamma1,
        gamma2: DMatrix::zeros(0, n),
        beta1: DMatrix::zeros(0, n),
        beta2,
        x1_layout: Layout::single("v", n),
        x2_layout: Layout::single("kappa", n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bcs::green_residual;
    use nalgebra::DVector;

    fn unit() -> CoefficientField {
        CoefficientField::uniform("mu", 1.0)
    }

    #[test]
    fn beam_dims_and_green() {
        let sys = build_beam_1d(&GridSpec::unit(&[6]).unwrap(), &unit(), &unit()).unwrap();
        assert_eq!(sys.dims().u1, 4);
        assert!(green_residual(&sys).unwrap() <= 1e-13);
    }

    #[test]
    fn affine_fields_in_kernel() {
        let sys = build_beam_1d(&GridSpec::new(&[7], &[2.0]).unwrap(), &unit(), &unit()).unwrap();
        let x = GridSpec::new(&[7], &[2.0]).unwrap().axis(0).node_coords();
        let e = DVector::from_iterator(8, x.iter().map(|x| 0.3 - 1.7 * x));
        assert!((&sys.l * e).amax() < 1e-12);
    }

    #[test]
    fn quadratic_boundary_pairing_by_hand() {
        // v = x²/2, m ≡ 1, h = 1/4: slopes −1/8 and 7/8, moments 1, shear 0
        let sys = build_beam_1d(&GridSpec::unit(&[4]).unwrap(), &unit(), &unit()).unwrap();
        let x = GridSpec::unit(&[4]).unwrap().axis(0).node_coords();
        let e1 = DVector::from_iterator(5, x.iter().map(|x| 0.5 * x * x));
        let e2 = DVector::from_element(5, 1.0);
        let traces = &sys.gamma1 * &e1;
        let obs = &sys.beta2 * &e2;
        assert_eq!(traces.as_slice(), &[0.0, 0.5, -0.125, 0.875]);
        assert_eq!(obs.as_slice(), &[0.0, 0.0, 1.0, 1.0]);
        let bnd = traces.dot(&obs);
        assert!((bnd - 0.75).abs() < 1e-15);
        let lhs = e1.dot(&(sys.l.transpose() * sys.x2.gram() * &e2)) - e1.dot(&(sys.x1.gram() * &sys.k * &e2));
        assert!((lhs - 0.75).abs() < 1e-14);
    }

    #[test]
    fn too_small_grid_rejected() {
        let err = build_beam_1d(&GridSpec::unit(&[3]).unwrap(), &unit(), &unit()).unwrap_err();
        assert!(matches!(err, Error::InvalidGrid(_)));
    }
}
