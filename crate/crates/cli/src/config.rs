//! TOML run configuration. Every key is optional; command-line flags win
//! over file values.
//!
//! ```toml
//! [physics]
//! pe = 3.0          # or u_z = 10.0, not both
//!
//! [field]
//! a = 8.0
//! b = 12.0
//! magnitude = 1.0
//! length = 20.0
//!
//! [mesh]
//! dz = 0.25
//! order = 1
//!
//! [solve]
//! mode = "asy"
//! ```

use std::path::Path;

use flowfem_core::fem1d::{magnet_nodes, InputMode};
use flowfem_core::fem2d::{ChannelGeometry, GridOptions};
use flowfem_core::physics::{MU_0, SODIUM_CONDUCTIVITY};
use flowfem_core::{AppliedField, ElementOrder, Mesh1D, PhysicalParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Physics {
    pub mu: f64,
    pub sigma: f64,
    /// Element Peclet number on the configured `dz`.
    pub pe: Option<f64>,
    /// Flow velocity in m/s.
    pub u_z: Option<f64>,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            mu: MU_0,
            sigma: SODIUM_CONDUCTIVITY,
            pe: None,
            u_z: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Field {
    pub a: f64,
    pub b: f64,
    pub magnitude: f64,
    pub length: f64,
}

impl Default for Field {
    fn default() -> Self {
        Self {
            a: 8.0,
            b: 12.0,
            magnitude: 1.0,
            length: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Mesh {
    pub dz: f64,
    pub order: u8,
}

impl Default for Mesh {
    fn default() -> Self {
        Self { dz: 0.25, order: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Solve {
    /// `bx` or `asy`.
    pub mode: String,
}

impl Default for Solve {
    fn default() -> Self {
        Self { mode: "asy".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweep {
    pub pe_min: f64,
    pub pe_max: f64,
    /// Log-spaced points between `pe_min` and `pe_max`.
    pub points: usize,
    /// Extra Peclet numbers merged into the grid.
    pub include: Vec<f64>,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            pe_min: 1.05,
            pe_max: 1000.0,
            points: 48,
            include: vec![3.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Poles {
    pub pe_values: Vec<f64>,
    /// Residual below which the alternating pole counts as cancelled.
    pub tolerance: f64,
}

impl Default for Poles {
    fn default() -> Self {
        Self {
            pe_values: vec![0.5, 1.0, 2.0, 3.0, 10.0, 30.0, 41.0, 100.0, 300.0, 1000.0, 3000.0, 30000.0],
            tolerance: flowfem_core::ztrans::DEFAULT_CANCELLATION_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Channel {
    pub d_values: Vec<f64>,
    pub u_z: f64,
    /// Magnet window as fractions of the axial length.
    pub window: [f64; 2],
    pub magnitude: f64,
    pub target_pe: f64,
    pub interface_spacing: f64,
    pub fluid_grading: f64,
    pub air_grading: f64,
    pub refinement: u32,
}

impl Default for Channel {
    fn default() -> Self {
        let g = GridOptions::default();
        Self {
            d_values: vec![0.1, 0.2, 0.4],
            u_z: 10.0,
            window: [0.3, 0.5],
            magnitude: 1.0,
            target_pe: g.target_pe,
            interface_spacing: g.interface_spacing,
            fluid_grading: g.fluid_grading,
            air_grading: g.air_grading,
            refinement: g.refinement,
        }
    }
}

impl Channel {
    pub fn grid_options(&self, extra_refinement: u32) -> GridOptions {
        GridOptions {
            target_pe: self.target_pe,
            interface_spacing: self.interface_spacing,
            fluid_grading: self.fluid_grading,
            air_grading: self.air_grading,
            refinement: self.refinement + extra_refinement,
        }
    }

    pub fn geometry(&self, d: f64) -> CliResult<ChannelGeometry> {
        ChannelGeometry::with_window_fractions(d, self.window[0], self.window[1])
            .map_err(CliError::config)
    }

    pub fn params(&self, physics: &Physics) -> CliResult<PhysicalParams> {
        PhysicalParams::new(physics.mu, physics.sigma, self.u_z).map_err(CliError::config)
    }

    fn validate(&self) -> CliResult<()> {
        if self.d_values.is_empty() {
            return Err(CliError::Config("channel.d_values must not be empty".into()));
        }
        for &d in &self.d_values {
            self.geometry(d)?;
        }
        if !(self.u_z.is_finite() && self.u_z >= 0.0) {
            return Err(CliError::Config("channel.u_z must be >= 0".into()));
        }
        self.grid_options(0).validate().map_err(CliError::config)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub physics: Physics,
    pub field: Field,
    pub mesh: Mesh,
    pub solve: Solve,
    pub sweep: Sweep,
    pub poles: Poles,
    pub channel: Channel,
}

/// Command-line values that replace file values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub mode: Option<InputMode>,
    pub order: Option<u8>,
    pub pe: Option<f64>,
    pub dz: Option<f64>,
}

/// Element Peclet number used when neither `pe` nor `u_z` is given.
pub const DEFAULT_PE: f64 = 3.0;

/// Fully specified 1D problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem1D {
    pub params: PhysicalParams,
    pub field: AppliedField,
    pub mesh: Mesh1D,
    pub mode: InputMode,
    pub pe: f64,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(CliError::config)
    }

    /// Reads `path`, or returns the defaults when no file is given.
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                Self::from_toml(&text).map_err(|e| match e {
                    CliError::Config(msg) => CliError::Config(format!("{}: {msg}", p.display())),
                    other => other,
                })
            }
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(mode) = o.mode {
            self.solve.mode = mode.short_name().into();
        }
        if let Some(order) = o.order {
            self.mesh.order = order;
        }
        if let Some(pe) = o.pe {
            self.physics.pe = Some(pe);
            self.physics.u_z = None;
        }
        if let Some(dz) = o.dz {
            self.mesh.dz = dz;
        }
    }

    /// Checks every section so that commands only fail on numerics.
    pub fn validate(&self) -> CliResult<()> {
        self.problem_1d()?;
        let s = &self.sweep;
        if !(s.pe_min > 0.0 && s.pe_max > s.pe_min && s.points >= 2) {
            return Err(CliError::Config(
                "sweep needs 0 < pe_min < pe_max and points >= 2".into(),
            ));
        }
        if s.include.iter().any(|&p| !(p.is_finite() && p > 0.0)) {
            return Err(CliError::Config("sweep.include values must be > 0".into()));
        }
        if self.poles.pe_values.iter().any(|&p| !(p.is_finite() && p > 0.0)) {
            return Err(CliError::Config("poles.pe_values must be > 0".into()));
        }
        if !(self.poles.tolerance.is_finite() && self.poles.tolerance >= 0.0) {
            return Err(CliError::Config("poles.tolerance must be >= 0".into()));
        }
        self.channel.validate()
    }

    pub fn mode(&self) -> CliResult<InputMode> {
        self.solve.mode.parse().map_err(CliError::config)
    }

    pub fn order(&self) -> CliResult<ElementOrder> {
        ElementOrder::from_degree(self.mesh.order).map_err(CliError::config)
    }

    pub fn applied_field(&self) -> CliResult<AppliedField> {
        let f = &self.field;
        AppliedField::new(f.a, f.b, f.magnitude, f.length).map_err(CliError::config)
    }

    /// Mesh with the configured spacing and order, checked against the field.
    pub fn mesh_1d(&self) -> CliResult<Mesh1D> {
        let mesh = Mesh1D::covering(self.field.length, self.mesh.dz, self.order()?)
            .map_err(CliError::config)?;
        magnet_nodes(&mesh, &self.applied_field()?).map_err(CliError::config)?;
        Ok(mesh)
    }

    /// Linear mesh on the same nodes, used for reference fields.
    pub fn linear_mesh_1d(&self) -> CliResult<Mesh1D> {
        Mesh1D::covering(self.field.length, self.mesh.dz, ElementOrder::Linear)
            .map_err(CliError::config)
    }

    pub fn params_for_pe(&self, pe: f64) -> CliResult<PhysicalParams> {
        PhysicalParams::with_peclet(self.physics.mu, self.physics.sigma, pe, self.mesh.dz)
            .map_err(CliError::config)
    }

    pub fn params(&self) -> CliResult<PhysicalParams> {
        let p = &self.physics;
        match (p.pe, p.u_z) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "set either physics.pe or physics.u_z, not both".into(),
            )),
            (None, Some(u)) => PhysicalParams::new(p.mu, p.sigma, u).map_err(CliError::config),
            (pe, None) => self.params_for_pe(pe.unwrap_or(DEFAULT_PE)),
        }
    }

    pub fn problem_1d(&self) -> CliResult<Problem1D> {
        let params = self.params()?;
        Ok(Problem1D {
            params,
            field: self.applied_field()?,
            mesh: self.mesh_1d()?,
            mode: self.mode()?,
            pe: params.peclet(self.mesh.dz),
        })
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serialises");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let p = c.problem_1d().unwrap();
        assert!((p.pe - DEFAULT_PE).abs() < 1e-12);
        assert_eq!(p.mode, InputMode::VectorPotential);
        assert_eq!(p.mesh.n_nodes(), 81);
    }

    #[test]
    fn parses_sections_and_rejects_unknown_keys() {
        let c = RunConfig::from_toml("[physics]\nu_z = 10.0\n[mesh]\norder = 2\n").unwrap();
        assert_eq!(c.physics.u_z, Some(10.0));
        assert_eq!(c.order().unwrap(), ElementOrder::Quadratic);
        let err = RunConfig::from_toml("[mesh]\nspacing = 1.0\n").unwrap_err();
        assert!(matches!(err, CliError::Config(ref m) if m.contains("spacing")));
        let err = RunConfig::from_toml("[mesh]\ndz = \"x\"\n").unwrap_err();
        assert!(matches!(err, CliError::Config(ref m) if m.contains("line 2")), "{err}");
    }

    #[test]
    fn flags_override_file() {
        let mut c = RunConfig::from_toml("[physics]\nu_z = 10.0\n[solve]\nmode = \"asy\"\n").unwrap();
        c.apply(&Overrides {
            mode: Some(InputMode::FluxDensity),
            order: Some(2),
            pe: Some(30.0),
            dz: Some(0.5),
        });
        let p = c.problem_1d().unwrap();
        assert_eq!(p.mode, InputMode::FluxDensity);
        assert_eq!(p.mesh.order(), ElementOrder::Quadratic);
        assert!((p.pe - 30.0).abs() < 1e-12);
        assert_eq!(c.physics.u_z, None);
    }

    #[test]
    fn conflicting_or_misaligned_inputs_are_config_errors() {
        let c = RunConfig::from_toml("[physics]\nu_z = 1.0\npe = 2.0\n").unwrap();
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
        let c = RunConfig::from_toml("[field]\na = 8.1\n").unwrap();
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
        let c = RunConfig::from_toml("[solve]\nmode = \"upwind\"\n").unwrap();
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
        let c = RunConfig::from_toml("[mesh]\norder = 3\n").unwrap();
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.mesh.dz = 0.125;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
