use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use adsslice::field::csv::{num, write_boundary, write_columns, write_field};
use adsslice::geometry::GeometryReport;
use adsslice::{Error, Grid, GridSpec, ScalarField};

pub const SCHEMA: u32 = 1;

/// Exit status 2: rejected before any computation.
pub const CONFIG_ERROR: u8 = 2;
/// Exit status 1: a computation failed.
pub const SOLVER_ERROR: u8 = 1;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: CONFIG_ERROR, message: message.into() }
    }

    pub fn solver(e: Error) -> Self {
        Self { code: SOLVER_ERROR, message: e.to_string() }
    }
}

/// Errors from parsing or validating inputs are configuration errors.
pub fn config_err(e: Error) -> Failure {
    Failure::config(e.to_string())
}

#[derive(Serialize)]
struct Versions {
    cli: &'static str,
    core: &'static str,
}

#[derive(Serialize)]
pub struct Manifest {
    schema: u32,
    command: &'static str,
    versions: Versions,
    config: Value,
    pub grid: Option<GridSpec>,
    pub failed: bool,
    pub error: Option<String>,
    pub verdict: String,
    /// `1 - max q` over interior nodes.
    pub spacelike_margin: Option<f64>,
    pub norms: BTreeMap<&'static str, f64>,
    pub results: BTreeMap<&'static str, Value>,
    pub files: Vec<&'static str>,
}

impl Manifest {
    pub fn new(command: &'static str, config: Value) -> Self {
        Self {
            schema: SCHEMA,
            command,
            versions: Versions { cli: env!("CARGO_PKG_VERSION"), core: adsslice::VERSION },
            config,
            grid: None,
            failed: false,
            error: None,
            verdict: String::new(),
            spacelike_margin: None,
            norms: BTreeMap::new(),
            results: BTreeMap::new(),
            files: Vec::new(),
        }
    }

    pub fn norm(&mut self, key: &'static str, v: f64) {
        self.norms.insert(key, v);
    }

    pub fn result(&mut self, key: &'static str, v: impl Serialize) {
        self.results.insert(key, serde_json::to_value(v).expect("serializable result"));
    }
}

pub struct RunDir {
    dir: PathBuf,
}

impl RunDir {
    pub fn create(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    fn open(&self, name: &str) -> std::io::Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    pub fn manifest(&self, m: &Manifest) -> std::io::Result<()> {
        let mut w = self.open("manifest.json")?;
        serde_json::to_writer_pretty(&mut w, m)?;
        writeln!(w)?;
        w.flush()
    }

    pub fn solution(&self, m: &mut Manifest, u: &ScalarField) -> adsslice::Result<()> {
        let mut w = self.open("solution.csv")?;
        write_field(&mut w, u)?;
        w.flush()?;
        m.files.push("solution.csv");
        Ok(())
    }

    pub fn boundary(&self, m: &mut Manifest, grid: &Grid, values: &[f64]) -> adsslice::Result<()> {
        let mut w = self.open("boundary.csv")?;
        write_boundary(&mut w, grid, values)?;
        w.flush()?;
        m.files.push("boundary.csv");
        Ok(())
    }

    /// Per-node geometry on the interior rings.
    pub fn geometry(&self, m: &mut Manifest, r: &GeometryReport) -> adsslice::Result<()> {
        let g = r.h_div.grid();
        let mut w = self.open("geometry.csv")?;
        write_columns(&mut w, g, &["H", "h2", "gauss_residual"], &[r.h_div.values(), r.sff.h2.values(), r.gauss.values()], 0..g.n_r())?;
        w.flush()?;
        m.files.push("geometry.csv");
        Ok(())
    }

    pub fn table(&self, m: &mut Manifest, header: &[&str], rows: &[Vec<f64>]) -> std::io::Result<()> {
        let mut w = self.open("convergence.csv")?;
        writeln!(w, "{}", header.join(","))?;
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| if v.is_nan() { String::new() } else { num(*v) }).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        w.flush()?;
        m.files.push("convergence.csv");
        Ok(())
    }
}
