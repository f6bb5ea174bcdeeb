//! Scenario configuration.
//!
//! ```toml
//! physics = "wave1d"
//! dt = 0.01
//! steps = 500
//!
//! [grid]
//! cells = [32]        # or `n = 32` for every axis
//! lengths = [1.0]     # default 1 per axis
//!
//! [materials]         # default 1 for every required field
//! rho = 1.0
//! T = [1.0, ...]      # one value per degree of freedom
//!
//! [input]
//! kind = "sine"       # zero | sine | ramp | samples
//! freq = 2.0
//! amplitude = 0.1
//! mask = [1.0, 0.0]   # default: every port
//!
//! [initial_state]
//! kind = "mode"       # zero | mode | file
//! index = 3           # oscillating modes, lowest frequency first
//!
//! [output]
//! dir = "out/wave1d"
//! snapshot_every = 100
//!
//! [tolerances]
//! balance = 1e-11
//! ```
//!
//! Relative paths resolve against the directory of the config file.

use std::fmt;
use std::path::{Path, PathBuf};

use portham_core::bcs::STRUCTURAL_TOL;
use portham_core::physics::{PhysicsKind, BALANCE_TOL};
use toml::{Table, Value};

pub const SUPPORTED_PHYSICS: [&str; 5] = ["wave1d", "wave2d", "elasticity2d", "beam1d", "maxwell3d"];

pub fn dimension(physics: &str) -> usize {
    match physics {
        "wave1d" | "beam1d" => 1,
        "wave2d" | "elasticity2d" => 2,
        _ => 3,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Material {
    Uniform(f64),
    PerDof(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    Zero,
    Sine { freq: f64, amplitude: f64, mask: Option<Vec<f64>> },
    Ramp { rate: f64, mask: Option<Vec<f64>> },
    Samples { file: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Zero,
    Mode { index: usize },
    File { file: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub csv: String,
    pub manifest: String,
    /// Write a binary state snapshot every k steps; 0 disables snapshots.
    pub snapshot_every: usize,
    pub overwrite: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Green residual relative to `‖L‖∞ + ‖K‖∞`.
    pub green: f64,
    /// Skew residual of the restricted generator relative to `1 + ‖A_red‖∞`.
    pub skew: f64,
    /// Splitting reconstruction relative to `‖J‖∞`.
    pub split: f64,
    pub dirac: f64,
    /// Per-step power balance relative to `1 + |H|`.
    pub balance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            green: STRUCTURAL_TOL,
            skew: STRUCTURAL_TOL,
            split: 1e-13,
            dirac: 1e-10,
            balance: BALANCE_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub physics: String,
    pub cells: Vec<usize>,
    pub lengths: Vec<f64>,
    /// Sorted by name.
    pub materials: Vec<(String, Material)>,
    pub input: InputSpec,
    pub initial_state: InitialState,
    pub dt: f64,
    pub steps: usize,
    pub output: OutputSpec,
    pub tolerances: Tolerances,
    /// The parsed document after overrides, echoed into the manifest.
    pub source: Table,
}

/// Command-line values that replace config scalars.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub errors: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid scenario config ({} error(s)):", self.errors.len())?;
        for e in &self.errors {
            writeln!(f, "  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

struct Checker<'a> {
    base: &'a Path,
    errors: Vec<String>,
}

impl Checker<'_> {
    fn err(&mut self, msg: impl Into<String>) {
        self.errors.push(msg.into());
    }

    fn unknown_keys(&mut self, table: &Table, section: &str, allowed: &[&str]) {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                let at = if section.is_empty() { key.clone() } else { format!("{section}.{key}") };
                self.err(format!("unknown key `{at}` (allowed: {})", allowed.join(", ")));
            }
        }
    }

    fn section<'t>(&mut self, root: &'t Table, name: &str) -> Option<&'t Table> {
        match root.get(name) {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(_) => {
                self.err(format!("`{name}` must be a table"));
                None
            }
        }
    }

    fn number(&mut self, v: &Value, at: &str) -> Option<f64> {
        match v {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            _ => {
                self.err(format!("`{at}` must be a number"));
                None
            }
        }
    }

    fn opt_number(&mut self, t: &Table, key: &str, at: &str) -> Option<f64> {
        t.get(key).and_then(|v| self.number(v, &format!("{at}{key}")))
    }

    fn count(&mut self, v: &Value, at: &str) -> Option<usize> {
        match v {
            Value::Integer(i) if *i >= 0 => Some(*i as usize),
            _ => {
                self.err(format!("`{at}` must be a nonnegative integer"));
                None
            }
        }
    }

    fn numbers(&mut self, v: &Value, at: &str) -> Option<Vec<f64>> {
        let Value::Array(items) = v else {
            self.err(format!("`{at}` must be an array of numbers"));
            return None;
        };
        let mut out = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            out.push(self.number(item, &format!("{at}[{i}]"))?);
        }
        Some(out)
    }

    fn string<'v>(&mut self, v: &'v Value, at: &str) -> Option<&'v str> {
        match v {
            Value::String(s) => Some(s),
            _ => {
                self.err(format!("`{at}` must be a string"));
                None
            }
        }
    }

    fn existing_file(&mut self, v: &Value, at: &str) -> Option<PathBuf> {
        let path = self.base.join(self.string(v, at)?);
        if !path.is_file() {
            self.err(format!("`{at}`: file `{}` does not exist", path.display()));
            return None;
        }
        Some(path)
    }
}

pub fn parse_config(text: &str, base_dir: &Path) -> Result<ScenarioConfig, ConfigError> {
    parse_config_with(text, base_dir, &Overrides::default())
}

pub fn parse_config_with(text: &str, base_dir: &Path, overrides: &Overrides) -> Result<ScenarioConfig, ConfigError> {
    let mut root: Table = text.parse().map_err(|e: toml::de::Error| ConfigError {
        errors: vec![format!("malformed config: {}", e.message())],
    })?;
    apply_overrides(&mut root, overrides);
    let mut c = Checker {
        base: base_dir,
        errors: Vec::new(),
    };
    c.unknown_keys(
        &root,
        "",
        &["physics", "dt", "steps", "grid", "materials", "input", "initial_state", "output", "tolerances"],
    );

    let physics = match root.get("physics") {
        None => {
            c.err("missing `physics`");
            None
        }
        Some(v) => c.string(v, "physics").and_then(|p| {
            if SUPPORTED_PHYSICS.contains(&p) {
                Some(p.to_string())
            } else {
                c.err(format!("unknown physics `{p}` (supported: {})", SUPPORTED_PHYSICS.join(", ")));
                None
            }
        }),
    };

    let dt = match root.get("dt") {
        None => {
            c.err("missing `dt`");
            None
        }
        Some(v) => c.number(v, "dt").and_then(|dt| {
            if dt > 0.0 && dt.is_finite() {
                Some(dt)
            } else {
                c.err(format!("dt must be positive, got {dt}"));
                None
            }
        }),
    };

    let steps = match root.get("steps") {
        None => {
            c.err("missing `steps`");
            None
        }
        Some(v) => c.count(v, "steps").and_then(|s| {
            if s >= 1 {
                Some(s)
            } else {
                c.err("steps must be at least 1");
                None
            }
        }),
    };

    let grid = parse_grid(&mut c, &root, physics.as_deref());
    let materials = parse_materials(&mut c, &root, physics.as_deref());
    let input = parse_input(&mut c, &root);
    let initial_state = parse_initial_state(&mut c, &root);
    let output = parse_output(&mut c, &root);
    let tolerances = parse_tolerances(&mut c, &root);

    if !c.errors.is_empty() {
        return Err(ConfigError { errors: c.errors });
    }
    let (cells, lengths) = grid.expect("grid errors reported");
    Ok(ScenarioConfig {
        physics: physics.expect("reported"),
        cells,
        lengths,
        materials: materials.expect("reported"),
        input: input.expect("reported"),
        initial_state: initial_state.expect("reported"),
        dt: dt.expect("reported"),
        steps: steps.expect("reported"),
        output: output.expect("reported"),
        tolerances: tolerances.expect("reported"),
        source: root,
    })
}

fn apply_overrides(root: &mut Table, o: &Overrides) {
    if let Some(dt) = o.dt {
        root.insert("dt".into(), Value::Float(dt));
    }
    if let Some(steps) = o.steps {
        root.insert("steps".into(), Value::Integer(steps as i64));
    }
    if let Some(out) = &o.out {
        let entry = root
            .entry("output")
            .or_insert_with(|| Value::Table(Table::new()));
        if let Value::Table(t) = entry {
            t.insert("dir".into(), Value::String(out.display().to_string()));
        }
    }
}

fn parse_grid(c: &mut Checker<'_>, root: &Table, physics: Option<&str>) -> Option<(Vec<usize>, Vec<f64>)> {
    let Some(grid) = c.section(root, "grid") else {
        if !root.contains_key("grid") {
            c.err("missing `[grid]`");
        }
        return None;
    };
    c.unknown_keys(grid, "grid", &["n", "cells", "lengths"]);
    let dim = physics.map(dimension);
    let cells = match (grid.get("n"), grid.get("cells")) {
        (Some(_), Some(_)) => {
            c.err("give either `grid.n` or `grid.cells`, not both");
            None
        }
        (None, None) => {
            c.err("missing `grid.n` or `grid.cells`");
            None
        }
        (Some(n), None) => {
            let n = c.count(n, "grid.n");
            n.zip(dim).map(|(n, d)| vec![n; d])
        }
        (None, Some(v)) => match v {
            Value::Array(items) => {
                let mut cells = Vec::new();
                for (i, item) in items.iter().enumerate() {
                    cells.push(c.count(item, &format!("grid.cells[{i}]"))?);
                }
                Some(cells)
            }
            _ => {
                c.err("`grid.cells` must be an array of integers");
                None
            }
        },
    };
    let cells = cells?;
    if let Some(d) = dim {
        if cells.len() != d {
            c.err(format!("`grid.cells` has {} entries, {} needs {d}", cells.len(), physics.unwrap_or("")));
            return None;
        }
    }
    if let Some(n) = cells.iter().find(|n| **n < 2) {
        c.err(format!("every axis needs at least 2 cells, got {n}"));
    }
    if physics == Some("beam1d") && cells.first().is_some_and(|n| *n < 4) {
        c.err("beam1d needs at least 4 cells");
    }
    let lengths = match grid.get("lengths") {
        None => vec![1.0; cells.len()],
        Some(v) => {
            let l = c.numbers(v, "grid.lengths")?;
            if l.len() != cells.len() {
                c.err(format!("`grid.lengths` has {} entries, expected {}", l.len(), cells.len()));
                return None;
            }
            if l.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                c.err("grid lengths must be positive");
                return None;
            }
            l
        }
    };
    Some((cells, lengths))
}

fn parse_materials(c: &mut Checker<'_>, root: &Table, physics: Option<&str>) -> Option<Vec<(String, Material)>> {
    let kind = PhysicsKind::from_label(physics?).ok()?;
    let (required, optional) = kind.field_names();
    let mut allowed: Vec<&str> = required.to_vec();
    allowed.extend(optional);
    let empty = Table::new();
    let table = match c.section(root, "materials") {
        Some(t) => t,
        None if root.contains_key("materials") => return None,
        None => &empty,
    };
    c.unknown_keys(table, "materials", &allowed);
    let mut out = Vec::new();
    for name in &allowed {
        let at = format!("materials.{name}");
        let m = match table.get(*name) {
            None if required.contains(name) => Material::Uniform(1.0),
            None => continue,
            Some(v @ Value::Array(_)) => Material::PerDof(c.numbers(v, &at)?),
            Some(v) => Material::Uniform(c.number(v, &at)?),
        };
        out.push((name.to_string(), m));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Some(out)
}

fn mask(c: &mut Checker<'_>, t: &Table) -> Option<Option<Vec<f64>>> {
    match t.get("mask") {
        None => Some(None),
        Some(v) => c.numbers(v, "input.mask").map(Some),
    }
}

fn parse_input(c: &mut Checker<'_>, root: &Table) -> Option<InputSpec> {
    let Some(t) = c.section(root, "input") else {
        return (!root.contains_key("input")).then_some(InputSpec::Zero);
    };
    let kind = match t.get("kind") {
        None => "zero",
        Some(v) => c.string(v, "input.kind")?,
    };
    match kind {
        "zero" => {
            c.unknown_keys(t, "input", &["kind"]);
            Some(InputSpec::Zero)
        }
        "sine" => {
            c.unknown_keys(t, "input", &["kind", "freq", "amplitude", "mask"]);
            let freq = c.opt_number(t, "freq", "input.");
            if freq.is_none() && !t.contains_key("freq") {
                c.err("sine input needs `input.freq`");
            }
            let amplitude = match t.get("amplitude") {
                None => Some(1.0),
                Some(v) => c.number(v, "input.amplitude"),
            };
            let mask = mask(c, t);
            Some(InputSpec::Sine {
                freq: freq?,
                amplitude: amplitude?,
                mask: mask?,
            })
        }
        "ramp" => {
            c.unknown_keys(t, "input", &["kind", "rate", "mask"]);
            let rate = c.opt_number(t, "rate", "input.");
            if rate.is_none() && !t.contains_key("rate") {
                c.err("ramp input needs `input.rate`");
            }
            let mask = mask(c, t);
            Some(InputSpec::Ramp { rate: rate?, mask: mask? })
        }
        "samples" => {
            c.unknown_keys(t, "input", &["kind", "file"]);
            match t.get("file") {
                None => {
                    c.err("samples input needs `input.file`");
                    None
                }
                Some(v) => Some(InputSpec::Samples {
                    file: c.existing_file(v, "input.file")?,
                }),
            }
        }
        other => {
            c.err(format!("unknown input kind `{other}` (supported: zero, sine, ramp, samples)"));
            None
        }
    }
}

fn parse_initial_state(c: &mut Checker<'_>, root: &Table) -> Option<InitialState> {
    let Some(t) = c.section(root, "initial_state") else {
        return (!root.contains_key("initial_state")).then_some(InitialState::Zero);
    };
    let kind = match t.get("kind") {
        None => "zero",
        Some(v) => c.string(v, "initial_state.kind")?,
    };
    match kind {
        "zero" => {
            c.unknown_keys(t, "initial_state", &["kind"]);
            Some(InitialState::Zero)
        }
        "mode" => {
            c.unknown_keys(t, "initial_state", &["kind", "index"]);
            match t.get("index") {
                None => Some(InitialState::Mode { index: 0 }),
                Some(v) => Some(InitialState::Mode {
                    index: c.count(v, "initial_state.index")?,
                }),
            }
        }
        "file" => {
            c.unknown_keys(t, "initial_state", &["kind", "file"]);
            match t.get("file") {
                None => {
                    c.err("file initial state needs `initial_state.file`");
                    None
                }
                Some(v) => Some(InitialState::File {
                    file: c.existing_file(v, "initial_state.file")?,
                }),
            }
        }
        other => {
            c.err(format!("unknown initial state kind `{other}` (supported: zero, mode, file)"));
            None
        }
    }
}

fn parse_output(c: &mut Checker<'_>, root: &Table) -> Option<OutputSpec> {
    let empty = Table::new();
    let t = match c.section(root, "output") {
        Some(t) => t,
        None if root.contains_key("output") => return None,
        None => &empty,
    };
    c.unknown_keys(t, "output", &["dir", "csv", "manifest", "snapshot_every", "overwrite"]);
    let mut file_name = |key: &str, default: &str| -> Option<String> {
        match t.get(key) {
            None => Some(default.to_string()),
            Some(v) => {
                let s = c.string(v, &format!("output.{key}"))?;
                if s.is_empty() || s.contains(['/', '\\']) {
                    c.err(format!("`output.{key}` must be a plain file name"));
                    return None;
                }
                Some(s.to_string())
            }
        }
    };
    let csv = file_name("csv", "trajectory.csv");
    let manifest = file_name("manifest", "manifest.json");
    let dir = match t.get("dir") {
        None => Some(c.base.join("out")),
        Some(v) => c.string(v, "output.dir").map(|d| c.base.join(d)),
    };
    let snapshot_every = match t.get("snapshot_every") {
        None => Some(0),
        Some(v) => c.count(v, "output.snapshot_every"),
    };
    let overwrite = match t.get("overwrite") {
        None => Some(false),
        Some(Value::Boolean(b)) => Some(*b),
        Some(_) => {
            c.err("`output.overwrite` must be a boolean");
            None
        }
    };
    Some(OutputSpec {
        dir: dir?,
        csv: csv?,
        manifest: manifest?,
        snapshot_every: snapshot_every?,
        overwrite: overwrite?,
    })
}

fn parse_tolerances(c: &mut Checker<'_>, root: &Table) -> Option<Tolerances> {
    let mut tol = Tolerances::default();
    let Some(t) = c.section(root, "tolerances") else {
        return (!root.contains_key("tolerances")).then_some(tol);
    };
    c.unknown_keys(t, "tolerances", &["green", "skew", "split", "dirac", "balance"]);
    let mut ok = true;
    for (key, slot) in [
        ("green", &mut tol.green),
        ("skew", &mut tol.skew),
        ("split", &mut tol.split),
        ("dirac", &mut tol.dirac),
        ("balance", &mut tol.balance),
    ] {
        if let Some(v) = t.get(key) {
            match c.number(v, &format!("tolerances.{key}")) {
                Some(x) if x > 0.0 && x.is_finite() => *slot = x,
                Some(x) => {
                    c.err(format!("tolerance `{key}` must be positive, got {x}"));
                    ok = false;
                }
                None => ok = false,
            }
        }
    }
    ok.then_some(tol)
}
