//! Experiment driver behind the `flowfem` binary.
//!
//! Each subcommand turns a [`config::RunConfig`] into a list of
//! [`artifact::Artifact`] tables. Rendering is pure, so identical
//! configurations give identical bytes; [`write_artifacts`] puts them on disk.

pub mod artifact;
pub mod commands;
pub mod config;
pub mod plot;
pub mod verify;

use std::path::{Path, PathBuf};

use flowfem_core::Error as CoreError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFICATION: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("{failed} verification criteria failed")]
    Verification { failed: usize },
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Verification { .. } => EXIT_VERIFICATION,
            CliError::Solver(_) | CliError::Io(_) => EXIT_SOLVER,
        }
    }

    pub(crate) fn config(err: impl std::fmt::Display) -> Self {
        CliError::Config(err.to_string())
    }
}

/// Parameter problems count as configuration errors; anything raised by the
/// numerics proper is a solver failure.
impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::InvalidParameter { .. }
            | CoreError::OutOfDomain { .. }
            | CoreError::MisalignedField { .. }
            | CoreError::OrderMismatch { .. }
            | CoreError::MeshMismatch(_)
            | CoreError::TooFewNodes { .. } => CliError::Config(err.to_string()),
            _ => CliError::Solver(err.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Writes each artifact's CSV and metadata (and SVG when `plot` is set).
pub fn write_artifacts(
    artifacts: &[artifact::Artifact],
    out: &Path,
    config_hash: &str,
    plot: bool,
) -> CliResult<Vec<PathBuf>> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let mut written = Vec::new();
    for a in artifacts {
        let mut files = vec![
            (format!("{}.csv", a.name), a.render_csv()),
            (format!("{}.meta.json", a.name), a.render_meta(config_hash).into_bytes()),
        ];
        if plot {
            if let Some(svg) = a.render_plot(config_hash) {
                files.push((format!("{}.svg", a.name), svg.into_bytes()));
            }
        }
        for (name, bytes) in files {
            let path = out.join(name);
            std::fs::write(&path, bytes)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            written.push(path);
        }
    }
    Ok(written)
}
