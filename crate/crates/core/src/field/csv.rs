//! Plain-text node tables: a header `r,theta[,phi],<columns>` and one row
//! per node in storage order. Numbers use the shortest round-trip decimal.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::sync::Arc;

use super::angular::AngularKind;
use super::grid::{Grid, GridMode, GridSpec};
use super::scalar::ScalarField;
use crate::error::{Error, Result};

/// Shortest round-trip decimal; exponent form outside `[1e-4, 1e16)`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn has_phi(grid: &Grid) -> bool {
    grid.kind() == AngularKind::Sphere
}

fn coordinate_header(grid: &Grid) -> &'static str {
    if has_phi(grid) {
        "r,theta,phi"
    } else {
        "r,theta"
    }
}

/// Write named columns on rings `rings` (a range of ring indices).
pub fn write_columns<W: Write>(out: &mut W, grid: &Grid, names: &[&str], columns: &[&[f64]], rings: std::ops::Range<usize>) -> Result<()> {
    let mut line = String::from(coordinate_header(grid));
    for n in names {
        line.push(',');
        line.push_str(n);
    }
    writeln!(out, "{line}")?;
    let na = grid.n_angular();
    for i in rings {
        for a in 0..na {
            let n = grid.node(i, a);
            line.clear();
            if has_phi(grid) {
                write!(line, "{},{},{}", num(n.r), num(n.theta), num(n.phi)).unwrap();
            } else {
                write!(line, "{},{}", num(n.r), num(n.theta)).unwrap();
            }
            for c in columns {
                write!(line, ",{}", num(c[i * na + a])).unwrap();
            }
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

pub fn write_field<W: Write>(out: &mut W, f: &ScalarField) -> Result<()> {
    let g = f.grid();
    write_columns(out, g, &["value"], &[f.values()], 0..g.n_r() + 1)
}

/// Boundary-ring samples with header `theta[,phi],value`.
pub fn write_boundary<W: Write>(out: &mut W, grid: &Grid, values: &[f64]) -> Result<()> {
    let phi = has_phi(grid);
    writeln!(out, "{}", if phi { "theta,phi,value" } else { "theta,value" })?;
    for (a, v) in values.iter().enumerate() {
        let n = grid.node(grid.n_r(), a);
        if phi {
            writeln!(out, "{},{},{}", num(n.theta), num(n.phi), num(*v))?;
        } else {
            writeln!(out, "{},{}", num(n.theta), num(*v))?;
        }
    }
    Ok(())
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn read_table<R: BufRead>(input: R) -> Result<Table> {
    let mut lines = input.lines();
    let header =
        lines.next().ok_or_else(|| Error::Parse("empty table".into()))??.split(',').map(|s| s.trim().to_string()).collect::<Vec<_>>();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("row {}: {e}", k + 2))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != header.len() {
            return Err(Error::Parse(format!("row {} has {} columns, header has {}", k + 2, row.len(), header.len())));
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}

fn column(t: &Table, name: &str) -> Result<usize> {
    t.header.iter().position(|h| h == name).ok_or_else(|| Error::Parse(format!("missing column {name}")))
}

fn distinct(values: impl Iterator<Item = f64>) -> usize {
    values.map(|v| (v * 1e9).round() as i64).collect::<BTreeSet<_>>().len()
}

/// Read a field table and rebuild its grid. Two-coordinate tables are
/// disks for `dim = 2` and axisymmetric balls for `dim = 3`.
pub fn read_field<R: BufRead>(input: R, dim: usize) -> Result<ScalarField> {
    let t = read_table(input)?;
    let (ir, it, iv) = (column(&t, "r")?, column(&t, "theta")?, column(&t, "value")?);
    let ip = column(&t, "phi").ok();
    let rings = distinct(t.rows.iter().map(|r| r[ir]));
    if rings < 2 || t.rows.len() % rings != 0 {
        return Err(Error::Parse("rows do not form complete rings".into()));
    }
    let per_ring = t.rows.len() / rings;
    let spec = match (ip, dim) {
        (Some(p), 3) => {
            let n_phi = distinct(t.rows.iter().take(per_ring).map(|r| r[p]));
            GridSpec::ball(rings - 1, per_ring / n_phi, n_phi)
        }
        (None, 3) => GridSpec { dim: 3, mode: GridMode::Axisymmetric, n_r: rings - 1, n_theta: per_ring, n_phi: 1 },
        (None, 2) => GridSpec::disk(rings - 1, per_ring),
        _ => return Err(Error::Parse(format!("table layout does not fit dimension {dim}"))),
    };
    let grid = Grid::new(spec)?;
    let values = t.rows.iter().map(|r| r[iv]).collect();
    let f = ScalarField::new(grid.clone(), values)?;
    for (k, row) in t.rows.iter().enumerate() {
        let n = grid.node_at(k);
        let mut ok = (row[ir] - n.r).abs() < 1e-9 && (row[it] - n.theta).abs() < 1e-9;
        if let Some(p) = ip {
            ok &= (row[p] - n.phi).abs() < 1e-9;
        }
        if !ok {
            return Err(Error::Parse(format!("row {} does not sit on a {spec} grid node", k + 2)));
        }
    }
    Ok(f)
}

/// Read boundary samples (`theta[,phi],value`) and check them against the
/// boundary nodes of `grid`.
pub fn read_boundary<R: BufRead>(input: R, grid: &Arc<Grid>) -> Result<Vec<f64>> {
    let t = read_table(input)?;
    let (it, iv) = (column(&t, "theta")?, column(&t, "value")?);
    let ip = column(&t, "phi").ok();
    if t.rows.len() != grid.n_angular() {
        return Err(Error::GridMismatch);
    }
    t.rows
        .iter()
        .enumerate()
        .map(|(a, row)| {
            let n = grid.node(grid.n_r(), a);
            let mut ok = (row[it] - n.theta).abs() < 1e-9;
            if let Some(p) = ip {
                ok &= (row[p] - n.phi).abs() < 1e-9;
            }
            if ok {
                Ok(row[iv])
            } else {
                Err(Error::GridMismatch)
            }
        })
        .collect()
}

/// Read boundary samples and infer the boundary grid they live on.
pub fn read_boundary_samples<R: BufRead>(input: R, dim: usize) -> Result<(Arc<Grid>, Vec<f64>)> {
    let t = read_table(input)?;
    let (it, iv) = (column(&t, "theta")?, column(&t, "value")?);
    let ip = column(&t, "phi").ok();
    let n = t.rows.len();
    let spec = match (ip, dim) {
        (Some(p), 3) => {
            let n_phi = distinct(t.rows.iter().map(|r| r[p]));
            GridSpec::ball(8, n / n_phi, n_phi)
        }
        (None, 3) => GridSpec::axisymmetric(8, n),
        (None, 2) => GridSpec::disk(8, n),
        _ => return Err(Error::Parse(format!("table layout does not fit dimension {dim}"))),
    };
    let grid = Grid::new(spec)?;
    for (a, row) in t.rows.iter().enumerate() {
        let node = grid.node(grid.n_r(), a);
        if (row[it] - node.theta).abs() > 1e-9 || ip.is_some_and(|p| (row[p] - node.phi).abs() > 1e-9) {
            return Err(Error::Parse(format!("row {} is not a {spec} boundary node", a + 2)));
        }
    }
    Ok((grid, t.rows.iter().map(|r| r[iv]).collect()))
}
