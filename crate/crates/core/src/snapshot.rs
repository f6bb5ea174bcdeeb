//! Plain-text snapshot of a [`PortSystem`].
//!
//! ```text
//! portham-system 1
//! label wave1d
//! layout x1 v:3
//! layout x2 sigma:4
//! matrix M1 3 3
//! 2.5000000000000000e-1 0.0000000000000000e0 ...
//! ...
//! ```
//!
//! Matrices are written row-major, one row per line, with 17 significant
//! digits so that a round trip is exact. Empty matrices keep their header.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::bcs::{Layout, PortSystem};
use crate::dirac::GramSpace;
use crate::error::{Error, Result};

const MAGIC: &str = "portham-system 1";

const MATRICES: [&str; 10] = ["M1", "M2", "N1", "N2", "L", "K", "gamma1", "gamma2", "beta1", "beta2"];

fn write_matrix(out: &mut String, name: &str, m: &DMatrix<f64>) {
    let _ = writeln!(out, "matrix {name} {} {}", m.nrows(), m.ncols());
    for row in m.row_iter() {
        // negative zero prints as zero
        let line: Vec<String> = row.iter().map(|v| format!("{:.16e}", v + 0.0)).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
}

fn write_layout(out: &mut String, name: &str, layout: &Layout) {
    let parts: Vec<String> = layout.segments.iter().map(|(n, l)| format!("{n}:{l}")).collect();
    let _ = writeln!(out, "layout {name} {}", parts.join(" "));
}

pub fn to_text(sys: &PortSystem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "label {}", sys.label);
    write_layout(&mut out, "x1", &sys.x1_layout);
    write_layout(&mut out, "x2", &sys.x2_layout);
    let blocks = [
        sys.x1.gram(),
        sys.x2.gram(),
        sys.u1.gram(),
        sys.u2.gram(),
        &sys.l,
        &sys.k,
        &sys.gamma1,
        &sys.gamma2,
        &sys.beta1,
        &sys.beta2,
    ];
    for (name, m) in MATRICES.iter().zip(blocks) {
        write_matrix(&mut out, name, m);
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        loop {
            match self.inner.next() {
                Some((i, l)) if l.trim().is_empty() => self.last = i + 1,
                Some((i, l)) => {
                    self.last = i + 1;
                    return Ok(l.trim());
                }
                None => return Err(self.err("unexpected end of snapshot")),
            }
        }
    }

    fn err(&self, reason: &str) -> Error {
        Error::Snapshot {
            line: self.last,
            reason: reason.to_string(),
        }
    }

    fn expect_keyword(&mut self, keyword: &str) -> Result<&'a str> {
        let line = self.next()?;
        line.strip_prefix(keyword)
            .and_then(|r| r.strip_prefix(' ').or(if r.is_empty() { Some("") } else { None }))
            .ok_or_else(|| self.err(&format!("expected `{keyword}`")))
    }
}

fn parse_layout(lines: &mut Lines<'_>, name: &str) -> Result<Layout> {
    let rest = lines.expect_keyword("layout")?;
    let mut parts = rest.split_whitespace();
    if parts.next() != Some(name) {
        return Err(lines.err(&format!("expected layout {name}")));
    }
    let mut segments = Vec::new();
    for p in parts {
        let (seg, len) = p.split_once(':').ok_or_else(|| lines.err("layout segment must be name:len"))?;
        let len = len.parse().map_err(|_| lines.err("invalid layout length"))?;
        segments.push((seg.to_string(), len));
    }
    Ok(Layout { segments })
}

fn parse_matrix(lines: &mut Lines<'_>, name: &str) -> Result<DMatrix<f64>> {
    let rest = lines.expect_keyword("matrix")?;
    let head: Vec<&str> = rest.split_whitespace().collect();
    if head.len() != 3 || head[0] != name {
        return Err(lines.err(&format!("expected `matrix {name} <rows> <cols>`")));
    }
    let rows: usize = head[1].parse().map_err(|_| lines.err("invalid row count"))?;
    let cols: usize = head[2].parse().map_err(|_| lines.err("invalid column count"))?;
    let mut data = Vec::with_capacity(rows * cols);
    if cols > 0 {
        for _ in 0..rows {
            let line = lines.next()?;
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| lines.err("invalid number"))?;
            if row.len() != cols {
                return Err(lines.err(&format!("expected {cols} values, got {}", row.len())));
            }
            data.extend(row);
        }
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

pub fn from_text(text: &str) -> Result<PortSystem> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    if lines.next()? != MAGIC {
        return Err(lines.err("missing `portham-system 1` header"));
    }
    let label = lines.expect_keyword("label")?.to_string();
    let x1_layout = parse_layout(&mut lines, "x1")?;
    let x2_layout = parse_layout(&mut lines, "x2")?;
    let mut m = Vec::with_capacity(MATRICES.len());
    for name in MATRICES {
        m.push(parse_matrix(&mut lines, name)?);
    }
    let mut it = m.into_iter();
    let mut take = || it.next().expect("all matrices parsed");
    let gram = |g: DMatrix<f64>| if g.nrows() == 0 { Ok(GramSpace::trivial()) } else { GramSpace::new(g) };
    let sys = PortSystem {
        label,
        x1: gram(take())?,
        x2: gram(take())?,
        u1: gram(take())?,
        u2: gram(take())?,
        l: take(),
        k: take(),
        gamma1: take(),
        gamma2: take(),
        beta1: take(),
        beta2: take(),
        x1_layout,
        x2_layout,
    };
    sys.validate_dims()?;
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{build_beam_1d, CoefficientField, GridSpec};

    #[test]
    fn round_trip_is_exact() {
        let one = CoefficientField::uniform("mu", 1.0);
        let sys = build_beam_1d(&GridSpec::new(&[5], &[0.3]).unwrap(), &one, &one).unwrap();
        let back = from_text(&to_text(&sys)).unwrap();
        assert_eq!(back, sys);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = from_text("portham-system 1\nlabel x\nlayout x1 a:1\nlayout x2 b:1\nmatrix M1 1 1\nfoo\n").unwrap_err();
        assert_eq!(
            err,
            Error::Snapshot {
                line: 6,
                reason: "invalid number".into()
            }
        );
        assert!(matches!(from_text("").unwrap_err(), Error::Snapshot { .. }));
        assert!(matches!(from_text("nope\n").unwrap_err(), Error::Snapshot { line: 1, .. }));
    }
}
