//! `run`: build, verify, simulate, write artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use nalgebra::{DMatrix, DVector};
use portham_core::bcs::assemble_extended;
use portham_core::discretization::GridSpec;
use portham_core::physics::{build_constitutive, close_ports, ClosedSystem, PhysicsKind};
use portham_core::timestepping::{simulate, InputSignal, RampInput, SimulationOptions, SineInput, ZeroInput};
use serde_json::json;

use crate::artifacts::{read_samples, read_snapshot, write_snapshot, write_trajectory_csv, Staging};
use crate::config::{InitialState, InputSpec, ScenarioConfig};
use crate::verify::{build_system, fields, verify_system, VerifyReport};

#[derive(Debug)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub report: VerifyReport,
    pub steps: usize,
    pub h_initial: f64,
    pub h_final: f64,
    pub max_balance_residual: f64,
    pub wall_time: f64,
    pub warnings: Vec<String>,
}

fn port_mask(mask: &Option<Vec<f64>>, dim: usize) -> Result<Vec<f64>> {
    match mask {
        None => Ok(vec![1.0; dim]),
        Some(m) if m.len() == dim => Ok(m.clone()),
        Some(m) => bail!("input.mask has {} entries, the system has {dim} boundary inputs", m.len()),
    }
}

fn input_signal(spec: &InputSpec, dim: usize) -> Result<Box<dyn InputSignal>> {
    Ok(match spec {
        InputSpec::Zero => Box::new(ZeroInput(dim)),
        InputSpec::Sine { freq, amplitude, mask } => Box::new(SineInput {
            freq: *freq,
            amplitude: *amplitude,
            mask: port_mask(mask, dim)?,
        }),
        InputSpec::Ramp { rate, mask } => Box::new(RampInput {
            rate: *rate,
            mask: port_mask(mask, dim)?,
        }),
        InputSpec::Samples { file } => Box::new(read_samples(file, dim)?),
    })
}

/// `index`-th oscillating mode: eigenvectors of `−(A·Q)²`, self-adjoint in
/// the energy inner product, with nonzero eigenvalue `ω²` in ascending order,
/// scaled to `H = ½`. Static (zero-frequency) states are skipped.
pub fn mode_state(closed: &ClosedSystem, index: usize) -> Result<DVector<f64>> {
    let n = closed.state_dim();
    let p = closed.law.energy_matrix();
    let p = (&p + p.transpose()) * 0.5;
    let l = p.cholesky().context("energy matrix is not positive-definite")?.unpack();
    let lt_inv = l
        .transpose()
        .solve_upper_triangular(&DMatrix::identity(n, n))
        .context("singular energy factor")?;
    let g = l.transpose() * closed.generator() * &lt_inv;
    let eig = (g.transpose() * &g).symmetric_eigen();
    let cutoff = 1e-10 * eig.eigenvalues.amax();
    let mut order: Vec<usize> = (0..n).filter(|k| eig.eigenvalues[*k] > cutoff).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    let Some(&k) = order.get(index) else {
        bail!("initial_state.index {index} out of range: the system has {} oscillating modes", order.len());
    };
    let v = eig.eigenvectors.column(k).into_owned();
    let lead = v.iter().copied().fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
    Ok(lt_inv * v * lead.signum())
}

fn initial_state(spec: &InitialState, closed: &ClosedSystem) -> Result<DVector<f64>> {
    let n = closed.state_dim();
    match spec {
        InitialState::Zero => Ok(DVector::zeros(n)),
        InitialState::Mode { index } => mode_state(closed, *index),
        InitialState::File { file } => {
            let s = read_snapshot(file)?;
            if s.state.len() != n {
                bail!("`{}` holds {} values, the state has {n}", file.display(), s.state.len());
            }
            Ok(s.state)
        }
    }
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunSummary> {
    let start = Instant::now();
    let staging = Staging::new(&cfg.output.dir, cfg.output.overwrite)?;
    let grid = GridSpec::new(&cfg.cells, &cfg.lengths)?;
    let fields = fields(&cfg.materials);
    let sys = build_system(&cfg.physics, &grid, &fields)?;
    let report = verify_system(&sys, &cfg.tolerances)?;
    if !report.passed() {
        let failed: Vec<String> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect();
        bail!("structural verification failed, not time stepping:\n  {}", failed.join("\n  "));
    }
    let law = build_constitutive(PhysicsKind::from_label(&cfg.physics)?, &sys, &fields)?;
    let closed = close_ports(&assemble_extended(&sys)?, &law)?;
    let input = input_signal(&cfg.input, closed.input_dim())?;
    let x0 = initial_state(&cfg.initial_state, &closed)?;

    let every = cfg.output.snapshot_every;
    let options = SimulationOptions {
        balance_tol: cfg.tolerances.balance,
        state_stride: if every == 0 { cfg.steps } else { every },
    };
    let traj = simulate(&closed, input.as_ref(), &x0, cfg.dt, cfg.steps, &options)?;

    write_trajectory_csv(&staging.path().join(&cfg.output.csv), &traj)?;
    let mut snapshots = Vec::new();
    if every > 0 {
        let dir = staging.path().join("snapshots");
        fs::create_dir(&dir)?;
        for (step, state) in &traj.states {
            let name = format!("state_{step:08}.bin");
            write_snapshot(&dir.join(&name), *step, traj.times[*step], state)?;
            snapshots.push(format!("snapshots/{name}"));
        }
    }
    let h_initial = traj.energies[0];
    let h_final = *traj.energies.last().expect("initial energy");
    let max_balance_residual = traj.max_balance_residual();
    let wall_time = start.elapsed().as_secs_f64();
    let manifest = json!({
        "tool": concat!("portham ", env!("CARGO_PKG_VERSION")),
        "config": serde_json::to_value(&cfg.source)?,
        "physics": cfg.physics,
        "grid": { "cells": cfg.cells, "lengths": cfg.lengths },
        "dims": report.dims,
        "residuals": { "green": report.green, "skew": report.skew, "split": report.split },
        "checks": report.checks,
        "simulation": {
            "dt": cfg.dt,
            "steps": cfg.steps,
            "final_time": traj.times.last(),
            "state_dim": closed.state_dim(),
            "input_dim": closed.input_dim(),
            "H_initial": h_initial,
            "H_final": h_final,
            "max_balance_residual": max_balance_residual,
            "balance_tolerance": cfg.tolerances.balance,
            "compatibility_defect": traj.compatibility_defect,
        },
        "warnings": traj.warnings,
        "artifacts": { "csv": cfg.output.csv, "snapshots": snapshots },
        "wall_time_s": wall_time,
    });
    fs::write(
        staging.path().join(&cfg.output.manifest),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    let dir = staging.commit()?;
    Ok(RunSummary {
        dir,
        report,
        steps: cfg.steps,
        h_initial,
        h_final,
        max_balance_residual,
        wall_time,
        warnings: traj.warnings.clone(),
    })
}

pub fn load_config(path: &Path, overrides: &crate::config::Overrides) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading `{}`", path.display()))?;
    let base = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    Ok(crate::config::parse_config_with(&text, base, overrides)?)
}
