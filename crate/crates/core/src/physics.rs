//! Material constants and the dimensionless numbers built from them.

use crate::error::{Error, Result};

/// Vacuum permeability in H/m.
pub const MU_0: f64 = 4.0e-7 * std::f64::consts::PI;

/// Electrical conductivity of liquid sodium in S/m.
pub const SODIUM_CONDUCTIVITY: f64 = 7.21e6;

/// Fluid and material constants of the induction problem.
///
/// Together they fix the convection coefficient `k = mu * sigma * u_z`
/// (units 1/m), from which the element Peclet number and the magnetic
/// Reynolds number follow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    mu: f64,
    sigma: f64,
    u_z: f64,
}

impl PhysicalParams {
    pub fn new(mu: f64, sigma: f64, u_z: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::invalid("mu", format!("must be finite and > 0, got {mu}")));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::invalid(
                "sigma",
                format!("must be finite and > 0, got {sigma}"),
            ));
        }
        if !(u_z.is_finite() && u_z >= 0.0) {
            return Err(Error::invalid("u_z", format!("must be finite and >= 0, got {u_z}")));
        }
        Ok(Self { mu, sigma, u_z })
    }

    /// Liquid sodium in a non-magnetic pipe moving at `u_z`.
    pub fn liquid_sodium(u_z: f64) -> Result<Self> {
        Self::new(MU_0, SODIUM_CONDUCTIVITY, u_z)
    }

    /// Picks the velocity that produces element Peclet number `pe` on spacing `dz`.
    pub fn with_peclet(mu: f64, sigma: f64, pe: f64, dz: f64) -> Result<Self> {
        if !(dz.is_finite() && dz > 0.0) {
            return Err(Error::invalid("dz", format!("must be finite and > 0, got {dz}")));
        }
        if !(pe.is_finite() && pe >= 0.0) {
            return Err(Error::invalid("pe", format!("must be finite and >= 0, got {pe}")));
        }
        Self::new(mu, sigma, 2.0 * pe / (mu * sigma * dz))
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn u_z(&self) -> f64 {
        self.u_z
    }

    /// Convection coefficient `mu * sigma * u_z`.
    pub fn k(&self) -> f64 {
        self.mu * self.sigma * self.u_z
    }

    /// Element Peclet number `mu * sigma * u_z * dz / 2`.
    pub fn peclet(&self, dz: f64) -> f64 {
        debug_assert!(dz > 0.0);
        self.mu * self.sigma * self.u_z * dz / 2.0
    }

    /// Magnetic Reynolds number `mu * sigma * u_z * d_h` for hydraulic diameter `d_h`.
    pub fn magnetic_reynolds(&self, d_h: f64) -> f64 {
        debug_assert!(d_h > 0.0);
        self.mu * self.sigma * self.u_z * d_h
    }
}
