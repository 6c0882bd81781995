use crate::banded::{inf_norm, residual_inf, BandedMatrix};
use crate::error::{Error, Result};
use crate::field::AppliedField;
use crate::physics::PhysicalParams;

use super::grid::{ChannelGeometry, Grid2D};
use super::solution::Solution2D;

/// Assembled 2D system with the outer Dirichlet rows already in place.
#[derive(Debug, Clone)]
pub struct System2D {
    pub(crate) grid: Grid2D,
    pub(crate) matrix: BandedMatrix,
    pub(crate) rhs: Vec<f64>,
    pub(crate) mu: f64,
}

impl System2D {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn matrix(&self) -> &BandedMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn n_unknowns(&self) -> usize {
        self.rhs.len()
    }
}

const GAUSS_2: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

/// Galerkin bilinear discretization of
/// `(1/mu) lap(b) - sigma u db/dz = sigma u dB/dz` (fluid) and
/// `lap(b) = 0` (air), with `b = 0` on the outer boundary.
///
/// The source is integrated by parts, `sigma u int B dN/dz`, so the jumps of
/// the rectangular applied field need no special treatment.
pub fn assemble_2d(
    grid: &Grid2D,
    geom: &ChannelGeometry,
    params: &PhysicalParams,
    field: &AppliedField,
) -> Result<System2D> {
    let len = geom.axial_length();
    if (field.length() - len).abs() > 1e-9 * len
        || (grid.z().last().copied().unwrap_or(0.0) - len).abs() > 1e-9 * len
        || (grid.plate_separation() - geom.d()).abs() > 1e-12 * geom.d()
    {
        return Err(Error::MeshMismatch(
            "grid, geometry and applied field must describe the same channel".into(),
        ));
    }
    for (edge, z) in [("a", field.start()), ("b", field.end())] {
        if grid.axial_node_at(z).is_none() {
            return Err(Error::MisalignedField {
                edge,
                position: z,
                dz: grid.dz(),
            });
        }
    }

    let (nz, ny) = (grid.nz(), grid.ny());
    let bw = ny + 1;
    let mut matrix = BandedMatrix::zeros(grid.n_nodes(), bw, bw);
    let mut rhs = vec![0.0; grid.n_nodes()];
    let inv_mu = 1.0 / params.mu();
    let z = grid.z();
    let y = grid.y();

    for i in 0..nz - 1 {
        let hz = z[i + 1] - z[i];
        let b_src = field.flux_density_unchecked(0.5 * (z[i] + z[i + 1]));
        for j in 0..ny - 1 {
            let hy = y[j + 1] - y[j];
            let jac = hz * hy / 4.0;
            if jac <= 0.0 {
                return Err(Error::DegenerateElement {
                    element: i * (ny - 1) + j,
                    determinant: jac,
                });
            }
            let su = if grid.is_fluid_row(j) {
                params.sigma() * params.u_z()
            } else {
                0.0
            };
            // counter-clockwise: (i,j), (i+1,j), (i+1,j+1), (i,j+1)
            let nodes = [
                grid.node(i, j),
                grid.node(i + 1, j),
                grid.node(i + 1, j + 1),
                grid.node(i, j + 1),
            ];
            let mut ke = [[0.0; 4]; 4];
            let mut fe = [0.0; 4];
            for &xi in &GAUSS_2 {
                for &eta in &GAUSS_2 {
                    let n = [
                        (1.0 - xi) * (1.0 - eta) / 4.0,
                        (1.0 + xi) * (1.0 - eta) / 4.0,
                        (1.0 + xi) * (1.0 + eta) / 4.0,
                        (1.0 - xi) * (1.0 + eta) / 4.0,
                    ];
                    let dxi = [-(1.0 - eta) / 4.0, (1.0 - eta) / 4.0, (1.0 + eta) / 4.0, -(1.0 + eta) / 4.0];
                    let deta = [-(1.0 - xi) / 4.0, -(1.0 + xi) / 4.0, (1.0 + xi) / 4.0, (1.0 - xi) / 4.0];
                    let dnz: [f64; 4] = std::array::from_fn(|p| dxi[p] * 2.0 / hz);
                    let dny: [f64; 4] = std::array::from_fn(|p| deta[p] * 2.0 / hy);
                    for p in 0..4 {
                        for q in 0..4 {
                            ke[p][q] += (inv_mu * (dnz[p] * dnz[q] + dny[p] * dny[q])
                                + su * n[p] * dnz[q])
                                * jac;
                        }
                        fe[p] += su * b_src * dnz[p] * jac;
                    }
                }
            }
            for p in 0..4 {
                rhs[nodes[p]] += fe[p];
                for q in 0..4 {
                    matrix.add(nodes[p], nodes[q], ke[p][q]);
                }
            }
        }
    }

    for i in 0..nz {
        for j in 0..ny {
            if grid.is_boundary(i, j) {
                let n = grid.node(i, j);
                matrix.clear_row(n);
                matrix.set(n, n, 1.0);
                rhs[n] = 0.0;
                // the prescribed value is zero, so the column drops out too
                // and the boundary rows stay decoupled under pivoting
                for r in matrix.row_columns(n) {
                    if r != n {
                        matrix.set(r, n, 0.0);
                    }
                }
            }
        }
    }

    Ok(System2D {
        grid: grid.clone(),
        matrix,
        rhs,
        mu: params.mu(),
    })
}

/// Relative residual required of [`solve_2d`].
pub const SOLVE_2D_TOLERANCE: f64 = 1e-8;
/// Iterative refinement sweeps allowed after the first direct solve.
pub const MAX_REFINEMENT_SWEEPS: usize = 5;

/// Banded LU followed by iterative refinement until
/// `||A x - b||_inf / ||b||_inf < 1e-8`.
pub fn solve_2d(system: &System2D) -> Result<Solution2D> {
    let n = system.n_unknowns();
    let scale = inf_norm(&system.rhs);
    if scale == 0.0 {
        return Ok(Solution2D::new(system.grid.clone(), vec![0.0; n], system.mu, vec![0.0]));
    }
    let lu = system.matrix.factorize()?;
    let mut x = lu.solve(&system.rhs)?;
    let mut history = Vec::new();
    for sweep in 0..=MAX_REFINEMENT_SWEEPS {
        let r: Vec<f64> = system
            .matrix
            .mul_vec(&x)
            .iter()
            .zip(&system.rhs)
            .map(|(ax, b)| b - ax)
            .collect();
        let rel = inf_norm(&r) / scale;
        history.push(rel);
        if rel < SOLVE_2D_TOLERANCE {
            return Ok(Solution2D::new(system.grid.clone(), x, system.mu, history));
        }
        if sweep == MAX_REFINEMENT_SWEEPS {
            break;
        }
        let dx = lu.solve(&r)?;
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
    }
    debug_assert!(residual_inf(&system.matrix, &x, &system.rhs) / scale >= SOLVE_2D_TOLERANCE);
    Err(Error::NotConverged {
        tolerance: SOLVE_2D_TOLERANCE,
        history,
    })
}
