//! Manifests, table formatting and atomic file output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::design::{design_csv, sensitivity_csv, DesignResult};
use crate::error::{Error, Result};
use crate::models::OutcomeModel;

/// Plain-text `key = value` record of everything a run depended on.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Localized parameters of `model` under `prefix`.
    pub fn record_model(&mut self, prefix: &str, model: &dyn OutcomeModel) {
        self.set(format!("{prefix}.model"), model.name());
        let space = model.design_space();
        self.set(format!("{prefix}.design_space"), format!("[{}, {}]", space.lo, space.hi));
        let p = model.params();
        for (n, v) in p.names().iter().zip(p.values()) {
            self.set(format!("{prefix}.param.{n}"), v);
        }
    }

    /// Outcome of one optimization under `prefix`.
    pub fn record_result(&mut self, prefix: &str, r: &DesignResult) {
        self.set(format!("{prefix}.criterion"), r.criterion_value);
        self.set(format!("{prefix}.bound"), r.bound);
        self.set(format!("{prefix}.support"), join(r.design.points()));
        self.set(format!("{prefix}.weights"), join(r.design.weights()));
        self.set(format!("{prefix}.iterations"), r.iterations);
        self.set(format!("{prefix}.converged"), r.converged);
        let c = &r.certificate;
        self.set(format!("{prefix}.certificate.grid"), c.grid_size);
        self.set(format!("{prefix}.certificate.max_sensitivity"), c.max_sensitivity);
        self.set(format!("{prefix}.certificate.argmax"), c.argmax);
        self.set(format!("{prefix}.certificate.trace_sum"), c.trace_sum);
        self.set(format!("{prefix}.certificate.passed"), c.passed);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            writeln!(out, "{k} = {v}").unwrap();
        }
        out
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.10}")).collect::<Vec<_>>().join(" ")
}

/// Files produced by a run, held in memory until everything has been computed.
#[derive(Debug, Clone, Default)]
pub struct OutputSet {
    files: Vec<(String, String)>,
}

impl OutputSet {
    pub fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    /// Design and sensitivity CSVs for one result.
    pub fn add_design(&mut self, stem: &str, r: &DesignResult) {
        self.add(format!("{stem}_design.csv"), design_csv(&r.design));
        self.add(format!("{stem}_sensitivity.csv"), sensitivity_csv(r));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    /// Writes every file into `dir`, each through a temporary file and a rename.
    pub fn write_all(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)
            .map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))?;
        self.files
            .iter()
            .map(|(name, contents)| {
                let path = dir.join(name);
                write_atomic(&path, contents)?;
                Ok(path)
            })
            .collect()
    }
}

/// Writes `contents` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    let res = fs::write(&tmp, contents).and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = res {
        let _ = fs::remove_file(&tmp);
        return Err(Error::Io(format!("cannot write {}: {e}", path.display())));
    }
    Ok(())
}

/// Square table with row and column labels; `corner` heads the label column.
pub fn matrix_csv(corner: &str, rows: &[String], cols: &[String], values: &[Vec<f64>]) -> String {
    let mut out = String::from(corner);
    for c in cols {
        write!(out, ",{c}").unwrap();
    }
    out.push('\n');
    for (r, row) in rows.iter().zip(values) {
        out.push_str(r);
        for v in row {
            write!(out, ",{v:.2}").unwrap();
        }
        out.push('\n');
    }
    out
}
