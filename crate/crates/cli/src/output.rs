//! CSV and JSON writers with provenance headers.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::cache::write_atomic;
use crate::config::{DataChecksum, RunConfig};
use crate::error::CliError;

/// What every output file records about how it was produced.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub command: String,
    pub config_sha256: String,
    pub data: Vec<DataChecksum>,
}

impl Provenance {
    pub fn new(command: &str, cfg: &RunConfig, data: Vec<DataChecksum>) -> Self {
        Self {
            tool: format!("surftrap {}", env!("CARGO_PKG_VERSION")),
            command: command.into(),
            config_sha256: cfg.hash(),
            data,
        }
    }
}

/// 17 significant digits in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Writer<'a> {
    pub dir: PathBuf,
    pub cfg: &'a RunConfig,
    pub prov: Provenance,
    pub written: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    pub fn new(dir: &Path, cfg: &'a RunConfig, prov: Provenance) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            cfg,
            prov,
            written: Vec::new(),
        })
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        log::info!("wrote {}", path.display());
        self.written.push(path);
        Ok(())
    }

    /// Comma-separated table after `#` metadata lines; skipped unless the
    /// `csv` format is enabled.
    pub fn csv(
        &mut self,
        name: &str,
        notes: &[String],
        columns: &[&str],
        rows: &[Vec<String>],
    ) -> Result<(), CliError> {
        if !self.cfg.wants("csv") {
            return Ok(());
        }
        self.table(name, notes, columns, rows)
    }

    /// As [`Writer::csv`], regardless of the enabled formats.
    pub fn table(
        &mut self,
        name: &str,
        notes: &[String],
        columns: &[&str],
        rows: &[Vec<String>],
    ) -> Result<(), CliError> {
        let mut s = String::new();
        let p = &self.prov;
        writeln!(s, "# {} {}", p.tool, p.command).unwrap();
        writeln!(s, "# config_sha256 = {}", p.config_sha256).unwrap();
        for d in &p.data {
            writeln!(s, "# data {} sha256 = {}", d.name, d.sha256).unwrap();
        }
        for n in notes {
            writeln!(s, "# {n}").unwrap();
        }
        writeln!(s, "{}", columns.join(",")).unwrap();
        for r in rows {
            debug_assert_eq!(r.len(), columns.len());
            writeln!(s, "{}", r.join(",")).unwrap();
        }
        self.put(name, s.as_bytes())
    }

    /// Result payload wrapped with provenance and the resolved config.
    pub fn json<T: Serialize>(&mut self, name: &str, results: &T) -> Result<(), CliError> {
        if !self.cfg.wants("json") {
            return Ok(());
        }
        #[derive(Serialize)]
        struct Doc<'b, T> {
            provenance: &'b Provenance,
            config: &'b RunConfig,
            results: &'b T,
        }
        let doc = Doc {
            provenance: &self.prov,
            config: self.cfg,
            results,
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("results serialize");
        text.push('\n');
        self.put(name, text.as_bytes())
    }

    /// The resolved config next to the results.
    pub fn config(&mut self) -> Result<(), CliError> {
        let name = format!("{}.config.toml", self.prov.command);
        let text = format!(
            "# {} {}\n# config_sha256 = {}\n{}",
            self.prov.tool,
            self.prov.command,
            self.prov.config_sha256,
            self.cfg.to_toml()
        );
        self.put(&name, text.as_bytes())
    }
}
