//! Galerkin assembly and solution of the 1D induction problem
//! `-A'' + k A' = k B_x` on a uniform mesh.
//!
//! Every row is scaled by `dz` so that linear elements produce the stencil
//! `(-1 - Pe, 2, -1 + Pe)` with `Pe = k dz / 2`. The source enters either
//! as the flux density `B_x` sampled at nodes, or as the source potential
//! `A_sy` pushed through the same discrete convection operator as the
//! unknown. The second form gives the discrete transfer function zeros at
//! `Z = +1` and `Z = -1`, the latter cancelling the oscillatory pole for
//! large `Pe`.

use crate::banded::{inf_norm, residual_inf, BandedMatrix};
use crate::error::{Error, Result};
use crate::field::AppliedField;
use crate::mesh::{ElementOrder, Mesh1D};
use crate::physics::PhysicalParams;
use crate::solution::Solution1D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputMode {
    /// Source given as the applied flux density `B_x`.
    FluxDensity,
    /// Source given as the applied vector potential `A_sy`.
    VectorPotential,
}

impl InputMode {
    pub fn short_name(self) -> &'static str {
        match self {
            InputMode::FluxDensity => "bx",
            InputMode::VectorPotential => "asy",
        }
    }
}

impl std::str::FromStr for InputMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bx" | "flux" | "flux-density" | "fluxdensity" => Ok(InputMode::FluxDensity),
            "asy" | "potential" | "vector-potential" | "vectorpotential" => {
                Ok(InputMode::VectorPotential)
            }
            other => Err(Error::invalid(
                "mode",
                format!("expected `bx` or `asy`, got `{other}`"),
            )),
        }
    }
}

/// Node indices of the field edges `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MagnetNodes {
    pub start: usize,
    pub end: usize,
}

/// Locates `a` and `b` on the mesh, which must span exactly `[0, L]`.
pub fn magnet_nodes(mesh: &Mesh1D, field: &AppliedField) -> Result<MagnetNodes> {
    let len = field.length();
    if (mesh.length() - len).abs() > 1e-9 * len {
        return Err(Error::MeshMismatch(format!(
            "mesh spans {} but the field domain is {}",
            mesh.length(),
            len
        )));
    }
    let locate = |edge: &'static str, z: f64| {
        mesh.vertex_at(z).ok_or(Error::MisalignedField {
            edge,
            position: z,
            dz: mesh.dz(),
        })
    };
    Ok(MagnetNodes {
        start: locate("a", field.start())?,
        end: locate("b", field.end())?,
    })
}

/// Assembled (and possibly constrained) 1D system.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSystem {
    mesh: Mesh1D,
    matrix: BandedMatrix,
    rhs: Vec<f64>,
    constrained: bool,
}

impl BandedSystem {
    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn matrix(&self) -> &BandedMatrix {
        &self.matrix
    }

    /// Mutable access for experiments that perturb the assembled operator.
    pub fn matrix_mut(&mut self) -> &mut BandedMatrix {
        &mut self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn rhs_mut(&mut self) -> &mut [f64] {
        &mut self.rhs
    }

    pub fn bandwidth(&self) -> usize {
        self.matrix.bandwidth()
    }

    pub fn has_boundary_conditions(&self) -> bool {
        self.constrained
    }

    /// Coefficients of row `n` over columns `n - w ..= n + w`.
    pub fn row(&self, n: usize) -> Vec<f64> {
        let w = self.bandwidth() as isize;
        (-w..=w)
            .map(|d| {
                let j = n as isize + d;
                if j < 0 {
                    0.0
                } else {
                    self.matrix.get(n, j as usize)
                }
            })
            .collect()
    }
}

/// Finite-difference stencil of `-A'' + k A'` (central differences, times `dz^2`).
pub fn central_difference_stencil(pe: f64) -> [f64; 3] {
    // -(y[n+1] - 2 y[n] + y[n-1]) + (k dz / 2)(y[n+1] - y[n-1])
    let diffusion = [-1.0, 2.0, -1.0];
    let convection = [-pe, 0.0, pe];
    [
        diffusion[0] + convection[0],
        diffusion[1] + convection[1],
        diffusion[2] + convection[2],
    ]
}

/// One-dimensional Lagrange element on the reference interval `[-1, 1]`.
struct LagrangeElement {
    order: ElementOrder,
}

impl LagrangeElement {
    fn n(&self) -> usize {
        self.order.nodes_per_element_step() + 1
    }

    fn shape(&self, xi: f64) -> [f64; 3] {
        match self.order {
            ElementOrder::Linear => [(1.0 - xi) / 2.0, (1.0 + xi) / 2.0, 0.0],
            ElementOrder::Quadratic => [xi * (xi - 1.0) / 2.0, 1.0 - xi * xi, xi * (xi + 1.0) / 2.0],
        }
    }

    fn dshape(&self, xi: f64) -> [f64; 3] {
        match self.order {
            ElementOrder::Linear => [-0.5, 0.5, 0.0],
            ElementOrder::Quadratic => [xi - 0.5, -2.0 * xi, xi + 0.5],
        }
    }

    fn gauss(&self) -> &'static [(f64, f64)] {
        const G2: [(f64, f64); 2] = [(-0.577_350_269_189_625_8, 1.0), (0.577_350_269_189_625_8, 1.0)];
        const G3: [(f64, f64); 3] = [
            (-0.774_596_669_241_483_4, 5.0 / 9.0),
            (0.0, 8.0 / 9.0),
            (0.774_596_669_241_483_4, 5.0 / 9.0),
        ];
        match self.order {
            ElementOrder::Linear => &G2,
            ElementOrder::Quadratic => &G3,
        }
    }

    /// Diffusion and convection matrices of one element, both scaled by the
    /// node spacing `dz`: `dz * int N_i' N_j'` and `dz * k * int N_i N_j'`.
    fn matrices(&self, pe: f64) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
        let steps = self.order.nodes_per_element_step() as f64;
        // element length h = steps * dz; dxi/dz = 2 / h; jacobian h / 2
        let mut k = [[0.0; 3]; 3];
        let mut c = [[0.0; 3]; 3];
        for &(xi, w) in self.gauss() {
            let nn = self.shape(xi);
            let dn = self.dshape(xi);
            for i in 0..self.n() {
                for j in 0..self.n() {
                    // dz * dN_i/dz * dN_j/dz * h/2 = dN_i/dxi dN_j/dxi * 2 / steps
                    k[i][j] += w * dn[i] * dn[j] * 2.0 / steps;
                    // dz * k * N_i dN_j/dz * h/2 = 2 Pe N_i dN_j/dxi
                    c[i][j] += w * nn[i] * dn[j] * 2.0 * pe;
                }
            }
        }
        (k, c)
    }
}

fn check_order(mesh: &Mesh1D, expected: ElementOrder) -> Result<()> {
    if mesh.order() != expected {
        return Err(Error::OrderMismatch {
            expected: expected.degree(),
            found: mesh.order().degree(),
        });
    }
    Ok(())
}

fn assemble_with(
    mesh: &Mesh1D,
    params: &PhysicalParams,
    field: &AppliedField,
    mode: InputMode,
) -> Result<BandedSystem> {
    magnet_nodes(mesh, field)?;
    let element = LagrangeElement {
        order: mesh.order(),
    };
    let dz = mesh.dz();
    let pe = params.peclet(dz);
    let steps = mesh.order().nodes_per_element_step();
    let n = mesh.n_nodes();
    let mut matrix = BandedMatrix::zeros(n, steps, steps);
    let mut rhs = vec![0.0; n];
    let (ke, ce) = element.matrices(pe);
    let nodes_z = mesh.coordinates();
    let a_sy: Vec<f64> = nodes_z
        .iter()
        .map(|&z| field.source_potential_unchecked(z.min(field.length())))
        .collect();

    for e in 0..mesh.n_elements() {
        let first = e * steps;
        let local = element.n();
        for i in 0..local {
            for j in 0..local {
                matrix.add(first + i, first + j, ke[i][j] + ce[i][j]);
            }
        }
        match (mode, mesh.order()) {
            (InputMode::FluxDensity, ElementOrder::Linear) => {
                // lumped nodal sampling: dz * k * (dz / 2) * B_x(z_i) from each element
                for i in 0..local {
                    rhs[first + i] += pe * dz * field.flux_density_unchecked(nodes_z[first + i]);
                }
            }
            (InputMode::FluxDensity, ElementOrder::Quadratic) => {
                // dz * k * int N_i B_x with the 3-point rule; jacobian dz
                for &(xi, w) in element.gauss() {
                    let z = nodes_z[first] + (xi + 1.0) * dz;
                    let b = field.flux_density_unchecked(z);
                    let nn = element.shape(xi);
                    for i in 0..local {
                        rhs[first + i] += 2.0 * pe * dz * w * nn[i] * b;
                    }
                }
            }
            (InputMode::VectorPotential, _) => {
                // k * int N_i B_x = -k * int N_i A_sy' = -(C a_sy)_i
                for i in 0..local {
                    let s: f64 = (0..local).map(|j| ce[i][j] * a_sy[first + j]).sum();
                    rhs[first + i] -= s;
                }
            }
        }
    }
    Ok(BandedSystem {
        mesh: *mesh,
        matrix,
        rhs,
        constrained: false,
    })
}

/// Linear-element system; interior rows carry `(-1 - Pe, 2, -1 + Pe)`.
pub fn assemble_linear(
    mesh: &Mesh1D,
    params: &PhysicalParams,
    field: &AppliedField,
    mode: InputMode,
) -> Result<BandedSystem> {
    check_order(mesh, ElementOrder::Linear)?;
    assemble_with(mesh, params, field, mode)
}

/// Three-node Lagrange elements with consistent convection matrix.
pub fn assemble_quadratic(
    mesh: &Mesh1D,
    params: &PhysicalParams,
    field: &AppliedField,
    mode: InputMode,
) -> Result<BandedSystem> {
    check_order(mesh, ElementOrder::Quadratic)?;
    assemble_with(mesh, params, field, mode)
}

/// Dispatches on the mesh's element order.
pub fn assemble(
    mesh: &Mesh1D,
    params: &PhysicalParams,
    field: &AppliedField,
    mode: InputMode,
) -> Result<BandedSystem> {
    assemble_with(mesh, params, field, mode)
}

/// Pins `A_y(0) = 0` and replaces the last row by `A_y(N-1) = A_y(N)`.
///
/// Column 0 is cleared below the pinned row as well; it only ever
/// multiplies the prescribed zero, and removing it keeps the first unknown
/// exactly zero under pivoting.
pub fn apply_boundary_conditions(mut system: BandedSystem) -> BandedSystem {
    let last = system.matrix.dim() - 1;
    system.matrix.clear_row(0);
    system.matrix.set(0, 0, 1.0);
    system.rhs[0] = 0.0;
    for r in system.matrix.row_columns(0) {
        if r != 0 && system.matrix.lower() >= r {
            system.matrix.set(r, 0, 0.0);
        }
    }
    system.matrix.clear_row(last);
    system.matrix.set(last, last - 1, -1.0);
    system.matrix.set(last, last, 1.0);
    system.rhs[last] = 0.0;
    system.constrained = true;
    system
}

/// Relative residual bound enforced after every 1D solve.
pub const SOLVE_RELATIVE_RESIDUAL: f64 = 1e-10;
/// Absolute residual bound used when the load vector vanishes.
pub const SOLVE_ABSOLUTE_RESIDUAL: f64 = 1e-12;

pub fn solve_banded(system: &BandedSystem) -> Result<Solution1D> {
    if !system.constrained {
        return Err(Error::MissingBoundaryConditions);
    }
    let x = system.matrix.solve(&system.rhs)?;
    let residual = residual_inf(&system.matrix, &x, &system.rhs);
    let scale = inf_norm(&system.rhs);
    let (measured, tolerance) = if scale > 0.0 {
        (residual / scale, SOLVE_RELATIVE_RESIDUAL)
    } else {
        (residual, SOLVE_ABSOLUTE_RESIDUAL)
    };
    if measured >= tolerance {
        return Err(Error::ResidualTooLarge {
            residual: measured,
            tolerance,
        });
    }
    Solution1D::from_potential(x, system.mesh.dz())
}

/// Assemble, constrain and solve in one call.
pub fn solve(
    mesh: &Mesh1D,
    params: &PhysicalParams,
    field: &AppliedField,
    mode: InputMode,
) -> Result<Solution1D> {
    let system = apply_boundary_conditions(assemble(mesh, params, field, mode)?);
    solve_banded(&system)
}

/// Pure-diffusion patch test for quadratic elements: solves `-A'' = f`
/// with the load and end values of `A = c0 + c1 z + c2 z^2` and returns the
/// largest nodal deviation from it.
pub fn quadratic_patch_test(mesh: &Mesh1D, coeffs: [f64; 3]) -> Result<f64> {
    check_order(mesh, ElementOrder::Quadratic)?;
    let exact = |z: f64| coeffs[0] + coeffs[1] * z + coeffs[2] * z * z;
    let f = -2.0 * coeffs[2];
    let element = LagrangeElement {
        order: ElementOrder::Quadratic,
    };
    let dz = mesh.dz();
    let n = mesh.n_nodes();
    let (ke, _) = element.matrices(0.0);
    let mut matrix = BandedMatrix::zeros(n, 2, 2);
    let mut rhs = vec![0.0; n];
    for e in 0..mesh.n_elements() {
        let first = 2 * e;
        for i in 0..3 {
            for j in 0..3 {
                matrix.add(first + i, first + j, ke[i][j]);
            }
        }
        for &(xi, w) in element.gauss() {
            let nn = element.shape(xi);
            for i in 0..3 {
                // dz * int N_i f, jacobian dz
                rhs[first + i] += dz * dz * w * nn[i] * f;
            }
        }
    }
    let last = n - 1;
    for (row, value) in [(0, exact(0.0)), (last, exact(mesh.length()))] {
        matrix.clear_row(row);
        matrix.set(row, row, 1.0);
        rhs[row] = value;
    }
    let x = matrix.solve(&rhs)?;
    Ok(x
        .iter()
        .enumerate()
        .map(|(i, v)| (v - exact(mesh.z(i))).abs())
        .fold(0.0, f64::max))
}

/// Oscillation measures of a discrete reaction field against a reference.
///
/// Errors live on edges (`e[n] = b_x[n] - b_ref[n]`, edge `n` joins nodes
/// `n` and `n + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct OscillationMetrics {
    /// `max |b_x - b_ref|` over all edges.
    pub peak_abs_error: f64,
    /// Edge index where the peak error occurs.
    pub peak_error_node: usize,
    /// Largest excursion of `b_x` outside the reference range
    /// `[min b_ref, max b_ref]`, over edges from the magnet leading edge on.
    pub oscillation_amplitude: f64,
    /// Edge where the amplitude is attained, if any excursion exists.
    pub amplitude_edge: Option<usize>,
    /// Sign alternations of the error on edges downstream of `b`.
    pub sign_change_count: usize,
    /// Sign alternations of the error on edges inside `[a, b]`.
    pub magnet_sign_changes: usize,
    /// Number of edges inside `[a, b]`.
    pub magnet_edges: usize,
    /// `e[m] / e[m - 1]` at the amplitude edge `m`.
    pub error_ratio: Option<f64>,
}

/// Errors smaller than this fraction of the reference scale are treated as
/// rounding noise when counting sign changes.
pub const SIGN_NOISE_FLOOR: f64 = 1e-9;

fn sign_changes(errors: &[f64], floor: f64) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for &e in errors.iter().filter(|e| e.abs() > floor) {
        if last != 0.0 && e.signum() != last.signum() {
            count += 1;
        }
        last = e;
    }
    count
}

pub fn oscillation_metrics(
    sol: &Solution1D,
    reference: &Solution1D,
    magnet: MagnetNodes,
) -> Result<OscillationMetrics> {
    if sol.n_nodes() != reference.n_nodes() {
        return Err(Error::LengthMismatch {
            left: sol.n_nodes(),
            right: reference.n_nodes(),
        });
    }
    let edges = sol.b_x().len();
    if magnet.start >= magnet.end || magnet.end > edges {
        return Err(Error::NodeOutOfRange {
            node: magnet.end,
            count: sol.n_nodes(),
        });
    }
    let b = sol.b_x();
    let r = reference.b_x();
    let errors: Vec<f64> = b.iter().zip(r).map(|(x, y)| x - y).collect();

    let (peak_error_node, peak_abs_error) = errors
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, e)| if e.abs() > acc.1 { (i, e.abs()) } else { acc });

    let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut amplitude = 0.0;
    let mut amplitude_edge = None;
    for (j, &v) in b.iter().enumerate().skip(magnet.start) {
        let over = (v - hi).max(lo - v).max(0.0);
        if over > amplitude {
            amplitude = over;
            amplitude_edge = Some(j);
        }
    }

    let scale = {
        let s = inf_norm(r);
        if s > 0.0 {
            s
        } else {
            inf_norm(b)
        }
    };
    let floor = SIGN_NOISE_FLOOR * scale;
    let error_ratio = amplitude_edge
        .filter(|&j| j > 0 && errors[j - 1] != 0.0)
        .map(|j| errors[j] / errors[j - 1]);

    Ok(OscillationMetrics {
        peak_abs_error,
        peak_error_node,
        oscillation_amplitude: amplitude,
        amplitude_edge,
        sign_change_count: sign_changes(&errors[magnet.end..], floor),
        magnet_sign_changes: sign_changes(&errors[magnet.start..magnet.end], floor),
        magnet_edges: magnet.end - magnet.start,
        error_ratio,
    })
}
