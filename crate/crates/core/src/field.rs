//! The applied flux density profile and its source vector potential.

use crate::error::{Error, Result};

/// Relative slack applied to domain-membership checks so that node
/// coordinates computed as `n * dz` are not rejected by rounding.
const DOMAIN_SLACK: f64 = 1e-9;

/// Piecewise-constant applied field `B_x(z)`: `B` on `[a, b]`, zero elsewhere
/// on the analysis domain `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppliedField {
    start: f64,
    end: f64,
    magnitude: f64,
    length: f64,
}

impl AppliedField {
    pub fn new(start: f64, end: f64, magnitude: f64, length: f64) -> Result<Self> {
        if !magnitude.is_finite() {
            return Err(Error::invalid("B", "flux density must be finite"));
        }
        if !(start.is_finite() && end.is_finite() && length.is_finite()) {
            return Err(Error::invalid("a, b, L", "positions must be finite"));
        }
        if !(0.0 < start && start < end && end < length) {
            return Err(Error::invalid(
                "a, b, L",
                format!("need 0 < a < b < L, got a = {start}, b = {end}, L = {length}"),
            ));
        }
        Ok(Self {
            start,
            end,
            magnitude,
            length,
        })
    }

    /// Field start `a`.
    pub fn start(&self) -> f64 {
        self.start
    }

    /// Field end `b`.
    pub fn end(&self) -> f64 {
        self.end
    }

    /// Flux density magnitude `B`.
    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    /// Domain length `L`.
    pub fn length(&self) -> f64 {
        self.length
    }

    fn check_domain(&self, z: f64) -> Result<f64> {
        let slack = DOMAIN_SLACK * self.length;
        if !(z.is_finite() && z >= -slack && z <= self.length + slack) {
            return Err(Error::OutOfDomain {
                z,
                length: self.length,
            });
        }
        Ok(z.clamp(0.0, self.length))
    }

    /// `B_x(z)`; both field edges belong to the magnet.
    pub fn flux_density(&self, z: f64) -> Result<f64> {
        let z = self.check_domain(z)?;
        Ok(self.flux_density_unchecked(z))
    }

    pub(crate) fn flux_density_unchecked(&self, z: f64) -> f64 {
        if z < self.start || z > self.end {
            0.0
        } else {
            self.magnitude
        }
    }

    /// Source potential `A_sy(z)` with `-dA_sy/dz = B_x` and gauge `A_sy(0) = 0`.
    pub fn source_potential(&self, z: f64) -> Result<f64> {
        let z = self.check_domain(z)?;
        Ok(self.source_potential_unchecked(z))
    }

    pub(crate) fn source_potential_unchecked(&self, z: f64) -> f64 {
        if z < self.start {
            0.0
        } else if z <= self.end {
            -self.magnitude * (z - self.start)
        } else {
            -self.magnitude * (self.end - self.start)
        }
    }
}
