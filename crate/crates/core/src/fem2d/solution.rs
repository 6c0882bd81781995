use crate::error::{Error, Result};

use super::grid::Grid2D;

/// Nodal reaction field `b_x(y, z)` on a [`Grid2D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Solution2D {
    grid: Grid2D,
    b_x: Vec<f64>,
    mu: f64,
    residual_history: Vec<f64>,
}

/// Current density `(J_y, J_z)` at an element centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementCurrent {
    pub z: f64,
    pub y: f64,
    pub j_y: f64,
    pub j_z: f64,
}

/// Axial current crossing a transverse line, per unit depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetCurrent {
    /// `int J_z dy`.
    pub net: f64,
    /// `int |J_z| dy`.
    pub absolute: f64,
}

impl NetCurrent {
    /// `|net| / absolute`, zero when no current flows.
    pub fn relative(&self) -> f64 {
        if self.absolute > 0.0 {
            self.net.abs() / self.absolute
        } else {
            0.0
        }
    }
}

impl Solution2D {
    pub(crate) fn new(grid: Grid2D, b_x: Vec<f64>, mu: f64, residual_history: Vec<f64>) -> Self {
        Self {
            grid,
            b_x,
            mu,
            residual_history,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// Nodal values, indexed `i * ny + j`.
    pub fn values(&self) -> &[f64] {
        &self.b_x
    }

    pub fn b_x(&self, i: usize, j: usize) -> f64 {
        self.b_x[self.grid.node(i, j)]
    }

    /// Relative residual after the direct solve and each refinement sweep.
    pub fn residual_history(&self) -> &[f64] {
        &self.residual_history
    }

    pub fn max_abs(&self) -> f64 {
        self.b_x.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `b_x` along the channel axis `y = 0`.
    pub fn centerline(&self) -> Vec<f64> {
        let j = self.grid.axis_index();
        (0..self.grid.nz()).map(|i| self.b_x(i, j)).collect()
    }

    /// Trapezoidal `int b_x dy` over the full transverse extent at each axial node.
    pub fn y_integrated(&self) -> Vec<f64> {
        let y = self.grid.y();
        (0..self.grid.nz())
            .map(|i| {
                y.windows(2)
                    .enumerate()
                    .map(|(j, w)| 0.5 * (w[1] - w[0]) * (self.b_x(i, j) + self.b_x(i, j + 1)))
                    .sum()
            })
            .collect()
    }

    /// `J = (1/mu) curl(b_x e_x)`: `J_y = (1/mu) db/dz`, `J_z = -(1/mu) db/dy`.
    pub fn current_density(&self) -> Vec<ElementCurrent> {
        let (z, y) = (self.grid.z(), self.grid.y());
        let mut out = Vec::with_capacity(self.grid.n_elements());
        for i in 0..self.grid.nz() - 1 {
            for j in 0..self.grid.ny() - 1 {
                let (b00, b10) = (self.b_x(i, j), self.b_x(i + 1, j));
                let (b01, b11) = (self.b_x(i, j + 1), self.b_x(i + 1, j + 1));
                let dbdz = (b10 + b11 - b00 - b01) / (2.0 * (z[i + 1] - z[i]));
                let dbdy = (b01 + b11 - b00 - b10) / (2.0 * (y[j + 1] - y[j]));
                out.push(ElementCurrent {
                    z: 0.5 * (z[i] + z[i + 1]),
                    y: 0.5 * (y[j] + y[j + 1]),
                    j_y: dbdz / self.mu,
                    j_z: -dbdy / self.mu,
                });
            }
        }
        out
    }

    /// Net `J_z` through the line `z = z0`, integrated exactly for the
    /// bilinear field (piecewise linear in `y` along the line).
    pub fn net_current_bisecting_plane(&self, z0: f64) -> Result<NetCurrent> {
        let z = self.grid.z();
        let len = *z.last().expect("non-empty grid");
        if !(z0.is_finite() && (0.0..=len).contains(&z0)) {
            return Err(Error::OutOfDomain { z: z0, length: len });
        }
        let i = z.partition_point(|&v| v <= z0).clamp(1, z.len() - 1) - 1;
        let t = (z0 - z[i]) / (z[i + 1] - z[i]);
        let col: Vec<f64> = (0..self.grid.ny())
            .map(|j| (1.0 - t) * self.b_x(i, j) + t * self.b_x(i + 1, j))
            .collect();
        // int_{y_j}^{y_j+1} J_z dy = -(b_{j+1} - b_j) / mu
        let (mut net, mut absolute) = (0.0, 0.0);
        for w in col.windows(2) {
            let c = -(w[1] - w[0]) / self.mu;
            net += c;
            absolute += c.abs();
        }
        Ok(NetCurrent { net, absolute })
    }

    /// Largest `|b_x|` over the last 5% of the axial span, relative to the
    /// global maximum.
    pub fn downstream_decay_metric(&self) -> f64 {
        let global = self.max_abs();
        if global == 0.0 {
            return 0.0;
        }
        let z = self.grid.z();
        let cut = 0.95 * z.last().expect("non-empty grid");
        let ny = self.grid.ny();
        let tail = z
            .iter()
            .enumerate()
            .filter(|(_, &zi)| zi >= cut)
            .flat_map(|(i, _)| self.b_x[i * ny..(i + 1) * ny].iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        tail / global
    }

    /// Largest `|b_x|` upstream of `a - (b - a)`, relative to the global maximum.
    pub fn upstream_confinement(&self, window: (f64, f64)) -> f64 {
        let global = self.max_abs();
        if global == 0.0 {
            return 0.0;
        }
        let cut = window.0 - (window.1 - window.0);
        let ny = self.grid.ny();
        self.grid
            .z()
            .iter()
            .enumerate()
            .filter(|(_, &zi)| zi < cut)
            .flat_map(|(i, _)| self.b_x[i * ny..(i + 1) * ny].iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
            / global
    }
}
