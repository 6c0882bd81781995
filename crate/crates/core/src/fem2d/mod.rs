//! Two-dimensional check of the 1D boundary conditions: a conducting fluid
//! layer between two plates, surrounded by air, moving through a magnet.
//!
//! The unknown is the single reaction component `b_x(y, z)`; currents close
//! in the `y`-`z` plane, so no other reaction component arises.

mod assembly;
mod grid;
mod solution;

pub use assembly::{assemble_2d, solve_2d, System2D, MAX_REFINEMENT_SWEEPS, SOLVE_2D_TOLERANCE};
pub use grid::{build_grid, ChannelGeometry, Grid2D, GridOptions, AIR_EXTENT_FACTOR, AXIAL_LENGTH_FACTOR};
pub use solution::{ElementCurrent, NetCurrent, Solution2D};

use crate::error::Result;
use crate::physics::PhysicalParams;

/// Grid, assemble and solve for a magnet of strength `b`.
pub fn solve_channel(
    geom: &ChannelGeometry,
    params: &PhysicalParams,
    options: &GridOptions,
    b: f64,
) -> Result<Solution2D> {
    let grid = build_grid(geom, params, options)?;
    let field = geom.applied_field(b)?;
    solve_2d(&assemble_2d(&grid, geom, params, &field)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn small() -> (ChannelGeometry, PhysicalParams) {
        (
            ChannelGeometry::with_window_fractions(0.05, 0.3, 0.5).unwrap(),
            PhysicalParams::liquid_sodium(10.0).unwrap(),
        )
    }

    #[test]
    fn zero_magnet_gives_zero_field() {
        let (g, p) = small();
        let sol = solve_channel(&g, &p, &GridOptions::default(), 0.0).unwrap();
        assert!(sol.values().iter().all(|&v| v == 0.0));
        assert_eq!(sol.downstream_decay_metric(), 0.0);
    }

    #[test]
    fn zero_velocity_gives_zero_field() {
        let (g, _) = small();
        let p = PhysicalParams::liquid_sodium(0.0).unwrap();
        let sol = solve_channel(&g, &p, &GridOptions::default(), 1.0).unwrap();
        assert!(sol.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn boundary_is_zero_and_residual_small() {
        let (g, p) = small();
        let sol = solve_channel(&g, &p, &GridOptions::default(), 1.0).unwrap();
        let grid = sol.grid();
        for i in 0..grid.nz() {
            for j in 0..grid.ny() {
                if grid.is_boundary(i, j) {
                    assert_eq!(sol.b_x(i, j), 0.0);
                }
            }
        }
        assert!(*sol.residual_history().last().unwrap() < SOLVE_2D_TOLERANCE);
        assert!(sol.values().iter().all(|v| v.is_finite()));
        assert!(sol.max_abs() > 0.0);
    }

    #[test]
    fn net_current_vanishes_across_the_channel() {
        let (g, p) = small();
        let sol = solve_channel(&g, &p, &GridOptions::default(), 1.0).unwrap();
        let len = g.axial_length();
        for k in 1..20 {
            let z0 = len * k as f64 / 20.0 + 1e-4 * len;
            let c = sol.net_current_bisecting_plane(z0).unwrap();
            assert!(c.relative() < 1e-6, "z0 = {z0}: {c:?}");
        }
        assert!(matches!(
            sol.net_current_bisecting_plane(-1.0),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn element_currents_match_the_line_integral() {
        // summing element J_z over a column of elements reproduces the
        // midpoint line integral
        let (g, p) = small();
        let sol = solve_channel(&g, &p, &GridOptions::default(), 1.0).unwrap();
        let grid = sol.grid();
        let i = grid.nz() / 2;
        let zc = 0.5 * (grid.z()[i] + grid.z()[i + 1]);
        let cur = sol.current_density();
        let ny = grid.ny();
        let col: f64 = (0..ny - 1)
            .map(|j| cur[i * (ny - 1) + j].j_z * (grid.y()[j + 1] - grid.y()[j]))
            .sum();
        let line = sol.net_current_bisecting_plane(zc).unwrap();
        assert!((col - line.net).abs() <= 1e-9 * line.absolute);
    }

    #[test]
    fn misaligned_field_rejected() {
        let (g, p) = small();
        let grid = build_grid(&g, &p, &GridOptions::default()).unwrap();
        let f = crate::field::AppliedField::new(0.1501234, 0.25, 1.0, g.axial_length()).unwrap();
        assert!(matches!(
            assemble_2d(&grid, &g, &p, &f),
            Err(Error::MisalignedField { .. })
        ));
    }
}
