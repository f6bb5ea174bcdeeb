use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use portham_cli::config::{dimension, Overrides, Tolerances, SUPPORTED_PHYSICS};
use portham_cli::run::{load_config, run_scenario};
use portham_cli::verify::{build_system, corrupt, fields, verify_system};
use portham_core::discretization::GridSpec;

#[derive(Parser)]
#[command(name = "portham", version, about = "Structure-preserving port-Hamiltonian simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenario configs.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Output directory (single config only).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scenarios run in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Structural checks for a builder or a scenario config.
    Verify {
        /// Physics name or path to a config.
        target: String,
        /// Cells per axis (physics targets).
        #[arg(long)]
        n: Option<usize>,
        /// Perturb a block before checking (K or L).
        #[arg(long)]
        corrupt: Option<String>,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Refinement study against a closed-form solution.
    Convergence {
        /// wave1d-standing or wave1d-zero
        case: String,
        refinements: Vec<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Run {
            configs,
            dt,
            steps,
            out,
            jobs,
        } => {
            if out.is_some() && configs.len() > 1 {
                bail!("--out needs a single config");
            }
            run_all(&configs, &Overrides { dt, steps, out }, jobs.max(1))
        }
        Command::Verify { target, n, corrupt, json } => verify(&target, n, corrupt.as_deref(), json.as_deref()),
        Command::Convergence { case, refinements, csv } => {
            let refinements = if refinements.is_empty() { vec![8, 16, 32] } else { refinements };
            let report = portham_cli::convergence(&case, &refinements)?;
            print!("{}", portham_cli::render_convergence(&report));
            if let Some(path) = csv {
                let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating `{}`", path.display()))?;
                w.write_record(["cells", "error", "order"])?;
                for (k, (n, e)) in report.cells.iter().zip(&report.errors).enumerate() {
                    let order = if k == 0 { String::new() } else { format!("{:.16e}", report.orders[k - 1]) };
                    w.write_record([n.to_string(), format!("{e:.16e}"), order])?;
                }
                w.flush()?;
            }
            Ok(true)
        }
    }
}

fn run_one(path: &Path, overrides: &Overrides) -> Result<String> {
    let cfg = load_config(path, overrides)?;
    let s = run_scenario(&cfg)?;
    for w in &s.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(format!(
        "{}: {} steps, H {:.6e} -> {:.6e}, max balance residual {:.3e}, wrote {} ({:.2}s)",
        path.display(),
        s.steps,
        s.h_initial,
        s.h_final,
        s.max_balance_residual,
        s.dir.display(),
        s.wall_time
    ))
}

fn run_all(configs: &[PathBuf], overrides: &Overrides, jobs: usize) -> Result<bool> {
    let results: Vec<(usize, Result<String>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs.min(configs.len()))
            .map(|w| {
                scope.spawn(move || {
                    (w..configs.len())
                        .step_by(jobs)
                        .map(|i| (i, run_one(&configs[i], overrides)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        let mut all: Vec<_> = handles
            .into_iter()
            .flat_map(|h| h.join().expect("scenario worker panicked"))
            .collect();
        all.sort_by_key(|(i, _)| *i);
        all
    });
    let mut ok = true;
    for (i, r) in results {
        match r {
            Ok(line) => println!("{line}"),
            Err(e) => {
                ok = false;
                eprintln!("error: {}: {e:#}", configs[i].display());
            }
        }
    }
    Ok(ok)
}

fn default_cells(physics: &str) -> usize {
    match physics {
        "maxwell3d" => 2,
        "wave2d" | "elasticity2d" => 4,
        _ => 8,
    }
}

fn verify(target: &str, n: Option<usize>, corruption: Option<&str>, json: Option<&Path>) -> Result<bool> {
    let (mut sys, tolerances) = if SUPPORTED_PHYSICS.contains(&target) {
        let n = n.unwrap_or_else(|| default_cells(target));
        let grid = GridSpec::unit(&vec![n; dimension(target)])?;
        let kind = portham_core::physics::PhysicsKind::from_label(target)?;
        let unit: Vec<_> = kind
            .field_names()
            .0
            .iter()
            .map(|f| portham_core::discretization::CoefficientField::uniform(f, 1.0))
            .collect();
        (build_system(target, &grid, &unit)?, Tolerances::default())
    } else if Path::new(target).is_file() {
        if n.is_some() {
            bail!("--n applies to physics targets only");
        }
        let cfg = load_config(Path::new(target), &Overrides::default())?;
        let grid = GridSpec::new(&cfg.cells, &cfg.lengths)?;
        (build_system(&cfg.physics, &grid, &fields(&cfg.materials))?, cfg.tolerances)
    } else {
        bail!(
            "`{target}` is neither a supported physics ({}) nor a config file",
            SUPPORTED_PHYSICS.join(", ")
        );
    };
    if let Some(block) = corruption {
        corrupt(&mut sys, block)?;
    }
    let report = verify_system(&sys, &tolerances)?;
    print!("{}", report.render());
    if let Some(path) = json {
        std::fs::write(path, serde_json::to_string_pretty(&report)? + "\n")
            .with_context(|| format!("writing `{}`", path.display()))?;
    }
    Ok(report.passed())
}
