//! Output files.
//!
//! Binary state snapshot, all fields little-endian:
//!
//! | offset | size  | content                  |
//! |--------|-------|--------------------------|
//! | 0      | 8     | magic `PHSTATE1`         |
//! | 8      | 8     | u64 step index           |
//! | 16     | 8     | f64 time                 |
//! | 24     | 8     | u64 state dimension `n`  |
//! | 32     | 8·n   | f64 state values         |

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nalgebra::DVector;
use portham_core::timestepping::{SampledInput, Trajectory};

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"PHSTATE1";

/// Directory written next to its final location and renamed into place on
/// [`Staging::commit`]; dropped uncommitted, it is removed.
pub struct Staging {
    tmp: PathBuf,
    target: PathBuf,
    committed: bool,
}

impl Staging {
    pub fn new(target: &Path, overwrite: bool) -> Result<Self> {
        if target.exists() && !overwrite {
            bail!(
                "output directory `{}` already exists (set output.overwrite = true to replace it)",
                target.display()
            );
        }
        let name = target
            .file_name()
            .with_context(|| format!("output path `{}` has no directory name", target.display()))?
            .to_string_lossy()
            .into_owned();
        let parent = target.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        fs::create_dir_all(parent).with_context(|| format!("creating `{}`", parent.display()))?;
        let tmp = parent.join(format!(".{name}.partial-{}", std::process::id()));
        if tmp.exists() {
            fs::remove_dir_all(&tmp)?;
        }
        fs::create_dir(&tmp).with_context(|| format!("creating `{}`", tmp.display()))?;
        Ok(Self {
            tmp,
            target: target.to_path_buf(),
            committed: false,
        })
    }

    pub fn path(&self) -> &Path {
        &self.tmp
    }

    pub fn commit(mut self) -> Result<PathBuf> {
        if self.target.exists() {
            fs::remove_dir_all(&self.target).with_context(|| format!("replacing `{}`", self.target.display()))?;
        }
        fs::rename(&self.tmp, &self.target).with_context(|| format!("moving results to `{}`", self.target.display()))?;
        self.committed = true;
        Ok(self.target.clone())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.tmp);
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// `time, H, boundary_power, dissipated_power, balance_residual`; the step
/// columns of row `n > 0` describe the step ending at `t_n` and are empty in
/// the first row.
pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating `{}`", path.display()))?;
    w.write_record(["time", "H", "boundary_power", "dissipated_power", "balance_residual"])?;
    for (k, t) in traj.times.iter().enumerate() {
        let step = |v: &[f64]| if k == 0 { String::new() } else { num(v[k - 1]) };
        w.write_record([
            num(*t),
            num(traj.energies[k]),
            step(&traj.boundary_power),
            step(&traj.dissipated_power),
            step(&traj.balance_residuals),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_snapshot(path: &Path, step: usize, time: f64, state: &DVector<f64>) -> Result<()> {
    let mut buf = Vec::with_capacity(32 + 8 * state.len());
    buf.extend_from_slice(SNAPSHOT_MAGIC);
    buf.extend_from_slice(&(step as u64).to_le_bytes());
    buf.extend_from_slice(&time.to_le_bytes());
    buf.extend_from_slice(&(state.len() as u64).to_le_bytes());
    for v in state.iter() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let mut f = fs::File::create(path).with_context(|| format!("creating `{}`", path.display()))?;
    f.write_all(&buf)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: u64,
    pub time: f64,
    pub state: DVector<f64>,
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bytes = fs::read(path).with_context(|| format!("reading `{}`", path.display()))?;
    if bytes.len() < 32 || &bytes[..8] != SNAPSHOT_MAGIC {
        bail!("`{}` is not a state snapshot", path.display());
    }
    let word = |i: usize| <[u8; 8]>::try_from(&bytes[i..i + 8]).expect("8-byte slice");
    let n = u64::from_le_bytes(word(24)) as usize;
    if bytes.len() != 32 + 8 * n {
        bail!("`{}`: header says {n} values, file holds {} bytes", path.display(), bytes.len());
    }
    Ok(Snapshot {
        step: u64::from_le_bytes(word(8)),
        time: f64::from_le_bytes(word(16)),
        state: DVector::from_iterator(n, (0..n).map(|k| f64::from_le_bytes(word(32 + 8 * k)))),
    })
}

/// CSV with a header row and columns `time, u0, u1, ...`.
pub fn read_samples(path: &Path, input_dim: usize) -> Result<SampledInput> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading `{}`", path.display()))?;
    let width = r.headers()?.len();
    if width != input_dim + 1 {
        bail!(
            "`{}` has {width} columns, expected time plus {input_dim} input columns",
            path.display()
        );
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("`{}` row {}: invalid number", path.display(), i + 2))?;
        times.push(row[0]);
        values.push(DVector::from_column_slice(&row[1..]));
    }
    Ok(SampledInput::new(times, values)?)
}
