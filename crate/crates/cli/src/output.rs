//! Run directory, manifest and snapshot bookkeeping.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use korteweg_core::solver::Termination;
use korteweg_core::spectral::io::{load_binary, write_binary};
use korteweg_core::Field;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";
pub const MANIFEST_SCHEMA: u32 = 1;

/// Variables stored per snapshot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    /// `q = ln ρ`, `u`
    LogDensity,
    /// `ρ`, `v = u + (κ/μ̄)∇ln ρ`
    Effective,
    /// `c = Δ ln ρ`, `v_L = div u`
    Divergence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub index: usize,
    pub t: f64,
    /// Variable name to file, relative to the run directory.
    pub fields: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerminationRecord {
    pub cause: String,
    pub t: Option<f64>,
    pub rho_min: Option<f64>,
}

impl From<&Termination> for TerminationRecord {
    fn from(t: &Termination) -> Self {
        match *t {
            Termination::Completed => Self::completed(),
            Termination::Vacuum { t, rho_min } => Self {
                cause: "vacuum".into(),
                t: Some(t),
                rho_min: Some(rho_min),
            },
            Termination::NonFinite { t } => Self {
                cause: "nan".into(),
                t: Some(t),
                rho_min: None,
            },
        }
    }
}

impl TerminationRecord {
    pub fn completed() -> Self {
        Self {
            cause: "completed".into(),
            t: None,
            rho_min: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.cause.as_str() {
            "vacuum" => 3,
            "nan" => 4,
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub experiment: String,
    /// Resolved configuration, without the output directory.
    pub config: ExperimentConfig,
    pub termination: TerminationRecord,
    pub exit_code: i32,
    pub state_kind: Option<StateKind>,
    pub snapshots: Vec<SnapshotRecord>,
    /// Every file written besides the manifest, in write order.
    pub artifacts: Vec<String>,
    pub summary: serde_json::Value,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<(Self, PathBuf), CliError> {
        let path = if path.is_dir() { path.join(MANIFEST) } else { path.to_path_buf() };
        let text = fs::read_to_string(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let m: Self = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Ok((m, dir))
    }

    pub fn load_field(dir: &Path, rel: &str) -> Result<Field, CliError> {
        Ok(load_binary(dir.join(rel))?)
    }
}

/// Collects artifacts written under one run directory.
pub struct RunDir {
    root: PathBuf,
    artifacts: Vec<String>,
    snapshots: Vec<SnapshotRecord>,
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            artifacts: Vec::new(),
            snapshots: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn open(&mut self, rel: &str) -> Result<fs::File, CliError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        self.artifacts.push(rel.to_string());
        Ok(fs::File::create(path)?)
    }

    pub fn text(&mut self, rel: &str, content: &str) -> Result<(), CliError> {
        self.open(rel)?.write_all(content.as_bytes())?;
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.text(rel, &s)
    }

    /// Writes through a closure that formats into a byte buffer.
    pub fn with<F>(&mut self, rel: &str, f: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> korteweg_core::Result<()>,
    {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.open(rel)?.write_all(&buf)?;
        Ok(())
    }

    pub fn snapshot(&mut self, t: f64, fields: &[(&str, &Field)]) -> Result<(), CliError> {
        let index = self.snapshots.len();
        let mut map = BTreeMap::new();
        for (name, field) in fields {
            let rel = format!("snapshots/{index:04}_{name}.bin");
            let mut buf = Vec::new();
            write_binary(field, &mut buf)?;
            self.open(&rel)?.write_all(&buf)?;
            map.insert(name.to_string(), rel);
        }
        self.snapshots.push(SnapshotRecord { index, t, fields: map });
        Ok(())
    }

    pub fn finish(
        self,
        cfg: &ExperimentConfig,
        termination: TerminationRecord,
        state_kind: Option<StateKind>,
        summary: serde_json::Value,
    ) -> Result<Manifest, CliError> {
        let mut config = cfg.clone();
        config.out = None;
        let manifest = Manifest {
            schema: MANIFEST_SCHEMA,
            tool: "korteweg-lab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            experiment: cfg.experiment.name().into(),
            config,
            exit_code: termination.exit_code(),
            termination,
            state_kind,
            snapshots: self.snapshots,
            artifacts: self.artifacts,
            summary,
        };
        let mut s = serde_json::to_string_pretty(&manifest)?;
        s.push('\n');
        fs::write(self.root.join(MANIFEST), s)?;
        Ok(manifest)
    }
}
