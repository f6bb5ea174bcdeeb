//! System construction from a scenario and the structural verification suite.

use anyhow::{anyhow, bail, Result};
use nalgebra::DMatrix;
use portham_core::bcs::{assemble_extended, check_bcs_conditions, green_residual, kernel_restriction, split_operator, PortSystem};
use portham_core::dirac::check_skew_symmetric_like;
use portham_core::discretization::{
    build_beam_1d, build_elasticity_2d, build_maxwell_3d, build_wave, CoefficientField, GridSpec, Lame,
};
use portham_core::linalg::inf_norm;
use serde::Serialize;

use crate::config::{Material, Tolerances};

/// Dirac membership is checked on the assembled graph only up to this total
/// dimension; above it the skew residual stands in.
pub const DIRAC_MAX_DIM: usize = 40;

pub fn fields(materials: &[(String, Material)]) -> Vec<CoefficientField> {
    materials
        .iter()
        .map(|(name, m)| match m {
            Material::Uniform(v) => CoefficientField::uniform(name, *v),
            Material::PerDof(v) => CoefficientField::per_dof(name, v.clone()),
        })
        .collect()
}

fn get<'a>(fields: &'a [CoefficientField], name: &str) -> Result<&'a CoefficientField> {
    fields
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| anyhow!("missing material `{name}`"))
}

pub fn build_system(physics: &str, grid: &GridSpec, fields: &[CoefficientField]) -> Result<PortSystem> {
    let sys = match physics {
        "wave1d" | "wave2d" => build_wave(grid, get(fields, "rho")?, get(fields, "T")?)?,
        "elasticity2d" => {
            let lame = Lame {
                lambda: get(fields, "lambda")?.clone(),
                mu: get(fields, "mu")?.clone(),
            };
            build_elasticity_2d(grid, get(fields, "rho")?, &lame)?
        }
        "beam1d" => build_beam_1d(grid, get(fields, "mu")?, get(fields, "bending")?)?,
        "maxwell3d" => build_maxwell_3d(
            grid,
            get(fields, "eps")?,
            get(fields, "mu_mag")?,
            fields.iter().find(|f| f.name == "eta_inv"),
        )?,
        other => bail!("no builder for `{other}`"),
    };
    if sys.label != physics {
        bail!("builder produced `{}` for `{physics}`", sys.label);
    }
    Ok(sys)
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub skipped: bool,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl Check {
    fn measured(name: &str, residual: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed: residual <= tolerance,
            skipped: false,
            residual: Some(residual),
            tolerance: Some(tolerance),
            detail,
        }
    }

    fn verdict(&self) -> &'static str {
        match (self.skipped, self.passed) {
            (true, _) => "SKIP",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Dims {
    pub x1: usize,
    pub x2: usize,
    pub u1: usize,
    pub u2: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub label: String,
    pub dims: Dims,
    pub checks: Vec<Check>,
    /// `‖green defect‖∞ / (‖L‖∞ + ‖K‖∞)`
    pub green: f64,
    /// `‖A_red + A_redᵀ‖∞ / (1 + ‖A_red‖∞)`
    pub skew: f64,
    /// `‖J − (A + B·G)‖∞ / ‖J‖∞`
    pub split: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "{}: X1.dim = {}, X2.dim = {}, U1.dim = {}, U2.dim = {}\n",
            self.label, self.dims.x1, self.dims.x2, self.dims.u1, self.dims.u2
        );
        for c in &self.checks {
            out.push_str(&format!("{} {:<38} {}\n", c.verdict(), c.name, c.detail));
        }
        out.push_str(if self.passed() { "overall: PASS\n" } else { "overall: FAIL\n" });
        out
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

/// Green identity, restricted skewness, boundary-control conditions, the
/// splitting and, for small systems, Dirac membership of the assembled graph.
pub fn verify_system(sys: &PortSystem, tol: &Tolerances) -> Result<VerifyReport> {
    let d = sys.dims();
    let mut checks = Vec::new();

    let green = ratio(green_residual(sys)?, sys.green_scale());
    checks.push(Check::measured(
        "green identity",
        green,
        tol.green,
        format!("residual/(‖L‖+‖K‖) {green:.3e} (tol {:.1e})", tol.green),
    ));

    let a_red = kernel_restriction(sys)?.a_red;
    let skew = ratio(portham_core::linalg::skew_residual(&a_red), 1.0 + inf_norm(&a_red));
    checks.push(Check::measured(
        "restricted generator skew",
        skew,
        tol.skew,
        format!("‖A_red + A_redᵀ‖/(1+‖A_red‖) {skew:.3e} (tol {:.1e})", tol.skew),
    ));

    let bcs = check_bcs_conditions(sys)?;
    for v in bcs.conditions.iter().filter(|v| !v.name.starts_with("(ii)")) {
        checks.push(Check {
            name: v.name.to_string(),
            passed: v.passed,
            skipped: false,
            residual: None,
            tolerance: None,
            detail: v.detail.clone(),
        });
    }

    let j = sys.structure_matrix();
    let m = sys.state_space();
    let j_norm = inf_norm(&j);
    let split = split_operator(sys)?;
    let split_ratio = ratio(split.reconstruction_residual(&j, &sys.trace_map()), j_norm);
    checks.push(Check::measured(
        "split J = A + B·G",
        split_ratio,
        tol.split,
        format!("‖J − (A + B·G)‖/‖J‖ {split_ratio:.3e} (tol {:.1e})", tol.split),
    ));
    let a_skew = ratio(check_skew_symmetric_like(&split.a, &m)?, j_norm);
    checks.push(Check::measured(
        "skew-symmetric-like A",
        a_skew,
        tol.skew,
        format!("‖M·A + (M·A)ᵀ‖/‖J‖ {a_skew:.3e} (tol {:.1e})", tol.skew),
    ));
    checks.push(block_shape(&split.b, d.x1, d.u1, d.x2, d.u2));

    checks.push(match assemble_extended(sys) {
        Err(e) => Check {
            name: "Dirac structure".into(),
            passed: false,
            skipped: false,
            residual: None,
            tolerance: Some(tol.dirac),
            detail: format!("extended operator not assembled: {e}"),
        },
        Ok(ext) if ext.dims.total() > DIRAC_MAX_DIM => {
            let w = ext.effort_space();
            let r = ratio(ext.skew_residual(), inf_norm(&(w.gram() * &ext.full)));
            Check {
                name: "Dirac structure".into(),
                passed: r <= tol.skew,
                skipped: true,
                residual: Some(r),
                tolerance: Some(tol.skew),
                detail: format!(
                    "dim {} > {DIRAC_MAX_DIM}: companion check skipped, extended skew residual {r:.3e}",
                    ext.dims.total()
                ),
            }
        }
        Ok(ext) => {
            let defect = ext.dirac_defect()?;
            Check::measured(
                "Dirac structure",
                defect,
                tol.dirac,
                format!("companion span distance {defect:.3e} (tol {:.1e})", tol.dirac),
            )
        }
    });

    Ok(VerifyReport {
        label: sys.label.clone(),
        dims: Dims {
            x1: d.x1,
            x2: d.x2,
            u1: d.u1,
            u2: d.u2,
        },
        checks,
        green,
        skew,
        split: split_ratio,
    })
}

fn block_shape(b: &DMatrix<f64>, x1: usize, u1: usize, x2: usize, u2: usize) -> Check {
    let top = b.view((0, 0), (x1, u1)).iter().all(|v| *v == 0.0);
    let bottom = b.view((x1, u1), (x2, u2)).iter().all(|v| *v == 0.0);
    Check {
        name: "B block-antidiagonal".into(),
        passed: top && bottom,
        skipped: false,
        residual: None,
        tolerance: None,
        detail: format!("B[X1,U1] zero {top}, B[X2,U2] zero {bottom}"),
    }
}

/// Deliberate perturbations for exercising the failure paths.
pub fn corrupt(sys: &mut PortSystem, block: &str) -> Result<()> {
    match block {
        "K" => sys.k = -&sys.k,
        "L" => sys.l = -&sys.l,
        other => bail!("unknown corruption `{other}` (supported: K, L)"),
    }
    Ok(())
}
