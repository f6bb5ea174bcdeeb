//! Batch front end for the port-Hamiltonian toolkit: scenario configs,
//! structural verification, simulations and refinement studies.

pub mod artifacts;
pub mod config;
pub mod run;
pub mod verify;

use anyhow::Result;
use portham_core::timestepping::{convergence_order, ConvergenceCase, ConvergenceReport};

pub fn convergence(case: &str, refinements: &[usize]) -> Result<ConvergenceReport> {
    Ok(convergence_order(ConvergenceCase::from_name(case)?, refinements)?)
}

pub fn render_convergence(r: &ConvergenceReport) -> String {
    let mut out = String::from("cells      error                    order\n");
    for (k, (n, e)) in r.cells.iter().zip(&r.errors).enumerate() {
        let order = if k == 0 { String::from("-") } else { format!("{:.4}", r.orders[k - 1]) };
        out.push_str(&format!("{n:<10} {e:<24.16e} {order}\n"));
    }
    out.push_str(&format!("monotone: {}\n", r.monotone));
    out
}
