//! Python bindings. Parameter problems raise `ValueError`; numerical
//! failures raise `RuntimeError`.

use flowfem_core::analytic;
use flowfem_core::continuum;
use flowfem_core::fem1d::{self, magnet_nodes, InputMode};
use flowfem_core::fem2d::{self, ChannelGeometry as CoreGeometry, GridOptions, Solution2D};
use flowfem_core::ztrans;
use flowfem_core::{
    AppliedField as CoreField, ElementOrder, Error as CoreError, Mesh1D as CoreMesh,
    PhysicalParams as CoreParams, Solution1D as CoreSolution,
};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: CoreError) -> PyErr {
    match e {
        CoreError::InvalidParameter { .. }
        | CoreError::OutOfDomain { .. }
        | CoreError::MisalignedField { .. }
        | CoreError::OrderMismatch { .. }
        | CoreError::MeshMismatch(_)
        | CoreError::TooFewNodes { .. }
        | CoreError::LengthMismatch { .. }
        | CoreError::NodeOutOfRange { .. }
        | CoreError::SingularPeclet
        | CoreError::DegenerateConvection => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn mode(s: &str) -> PyResult<InputMode> {
    s.parse().map_err(err)
}

fn order(degree: u8) -> PyResult<ElementOrder> {
    ElementOrder::from_degree(degree).map_err(err)
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PhysicalParams(CoreParams);

#[pymethods]
impl PhysicalParams {
    #[new]
    fn new(mu: f64, sigma: f64, u_z: f64) -> PyResult<Self> {
        CoreParams::new(mu, sigma, u_z).map(Self).map_err(err)
    }

    /// Liquid sodium in vacuum permeability.
    #[staticmethod]
    fn liquid_sodium(u_z: f64) -> PyResult<Self> {
        CoreParams::liquid_sodium(u_z).map(Self).map_err(err)
    }

    /// Velocity chosen so that the element Peclet number on `dz` is `pe`.
    #[staticmethod]
    fn with_peclet(mu: f64, sigma: f64, pe: f64, dz: f64) -> PyResult<Self> {
        CoreParams::with_peclet(mu, sigma, pe, dz).map(Self).map_err(err)
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.0.mu()
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.0.sigma()
    }

    #[getter]
    fn u_z(&self) -> f64 {
        self.0.u_z()
    }

    #[getter]
    fn k(&self) -> f64 {
        self.0.k()
    }

    fn peclet(&self, dz: f64) -> f64 {
        self.0.peclet(dz)
    }

    fn __repr__(&self) -> String {
        format!("PhysicalParams(mu={}, sigma={}, u_z={})", self.0.mu(), self.0.sigma(), self.0.u_z())
    }
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct AppliedField(CoreField);

#[pymethods]
impl AppliedField {
    #[new]
    #[pyo3(signature = (a, b, magnitude, length))]
    fn new(a: f64, b: f64, magnitude: f64, length: f64) -> PyResult<Self> {
        CoreField::new(a, b, magnitude, length).map(Self).map_err(err)
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.start()
    }

    #[getter]
    fn b(&self) -> f64 {
        self.0.end()
    }

    #[getter]
    fn magnitude(&self) -> f64 {
        self.0.magnitude()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.0.length()
    }

    fn flux_density(&self, z: f64) -> PyResult<f64> {
        self.0.flux_density(z).map_err(err)
    }

    fn source_potential(&self, z: f64) -> PyResult<f64> {
        self.0.source_potential(z).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "AppliedField(a={}, b={}, magnitude={}, length={})",
            self.0.start(),
            self.0.end(),
            self.0.magnitude(),
            self.0.length()
        )
    }
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct Mesh1D(CoreMesh);

#[pymethods]
impl Mesh1D {
    #[new]
    #[pyo3(signature = (dz, n_nodes, order = 1))]
    fn new(dz: f64, n_nodes: usize, order: u8) -> PyResult<Self> {
        CoreMesh::new(dz, n_nodes, self::order(order)?).map(Self).map_err(err)
    }

    /// Uniform mesh spanning `[0, length]`.
    #[staticmethod]
    #[pyo3(signature = (length, dz, order = 1))]
    fn covering(length: f64, dz: f64, order: u8) -> PyResult<Self> {
        CoreMesh::covering(length, dz, self::order(order)?).map(Self).map_err(err)
    }

    #[getter]
    fn dz(&self) -> f64 {
        self.0.dz()
    }

    #[getter]
    fn n_nodes(&self) -> usize {
        self.0.n_nodes()
    }

    #[getter]
    fn order(&self) -> u8 {
        self.0.order().degree()
    }

    fn coordinates(&self) -> Vec<f64> {
        self.0.coordinates()
    }

    fn __repr__(&self) -> String {
        format!("Mesh1D(dz={}, n_nodes={}, order={})", self.0.dz(), self.0.n_nodes(), self.0.order().degree())
    }
}

/// Nodal `A_y` and the edge field `b_x`, one value per interval.
#[pyclass(frozen, skip_from_py_object)]
struct Solution1D(CoreSolution);

#[pymethods]
impl Solution1D {
    #[getter]
    fn a_y(&self) -> Vec<f64> {
        self.0.a_y().to_vec()
    }

    #[getter]
    fn b_x(&self) -> Vec<f64> {
        self.0.b_x().to_vec()
    }

    #[getter]
    fn dz(&self) -> f64 {
        self.0.dz()
    }

    fn __len__(&self) -> usize {
        self.0.n_nodes()
    }
}

#[pyfunction]
#[pyo3(signature = (mesh, params, field, mode = "asy"))]
fn solve_1d(mesh: &Mesh1D, params: &PhysicalParams, field: &AppliedField, mode: &str) -> PyResult<Solution1D> {
    fem1d::solve(&mesh.0, &params.0, &field.0, self::mode(mode)?)
        .map(Solution1D)
        .map_err(err)
}

/// Exact continuum samples on the nodes of `mesh`.
#[pyfunction]
fn continuum_reference(mesh: &Mesh1D, field: &AppliedField, params: &PhysicalParams) -> PyResult<Solution1D> {
    continuum::continuum_reference(&mesh.0, &field.0, &params.0)
        .map(Solution1D)
        .map_err(err)
}

#[pyfunction]
fn continuum_reaction_field(field: &AppliedField, params: &PhysicalParams, z: f64) -> PyResult<f64> {
    continuum::continuum_reaction_field(&field.0, &params.0, z).map_err(err)
}

/// Oscillation metrics of `solution` against `reference` as a dict.
#[pyfunction]
fn oscillation_metrics<'py>(
    py: Python<'py>,
    solution: &Solution1D,
    reference: &Solution1D,
    mesh: &Mesh1D,
    field: &AppliedField,
) -> PyResult<Bound<'py, PyDict>> {
    let m = fem1d::oscillation_metrics(&solution.0, &reference.0, magnet_nodes(&mesh.0, &field.0).map_err(err)?)
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("peak_abs_error", m.peak_abs_error)?;
    d.set_item("peak_error_edge", m.peak_error_node)?;
    d.set_item("oscillation_amplitude", m.oscillation_amplitude)?;
    d.set_item("amplitude_edge", m.amplitude_edge)?;
    d.set_item("sign_change_count", m.sign_change_count)?;
    d.set_item("magnet_sign_changes", m.magnet_sign_changes)?;
    d.set_item("magnet_edges", m.magnet_edges)?;
    d.set_item("error_ratio", m.error_ratio)?;
    Ok(d)
}

/// Closed-form nodal values of the linear-element solution.
#[pyfunction]
#[pyo3(signature = (mesh, params, field, mode = "asy"))]
fn discrete_oracle(mesh: &Mesh1D, params: &PhysicalParams, field: &AppliedField, mode: &str) -> PyResult<Vec<f64>> {
    analytic::discrete_oracle(&mesh.0, &params.0, &field.0, self::mode(mode)?)
        .map(|s| s.values())
        .map_err(err)
}

#[pyfunction]
fn oscillation_amplitude_asy(pe: f64, b: f64) -> f64 {
    analytic::oscillation_amplitude_asy(pe, b)
}

#[pyfunction]
fn oscillation_amplitude_bx(pe: f64, b: f64) -> f64 {
    analytic::oscillation_amplitude_bx(pe, b)
}

#[pyclass(frozen, skip_from_py_object)]
struct TransferFunction(ztrans::RationalTF);

#[pymethods]
impl TransferFunction {
    #[getter]
    fn gain(&self) -> f64 {
        self.0.gain
    }

    #[getter]
    fn zeros(&self) -> Vec<Complex64> {
        self.0.zeros.clone()
    }

    #[getter]
    fn poles(&self) -> Vec<Complex64> {
        self.0.poles.clone()
    }

    fn __call__(&self, z: Complex64) -> Complex64 {
        self.0.eval(z)
    }
}

#[pyfunction]
#[pyo3(signature = (pe, dz, mode = "asy"))]
fn transfer_function(pe: f64, dz: f64, mode: &str) -> PyResult<TransferFunction> {
    ztrans::transfer_function(pe, dz, self::mode(mode)?)
        .map(TransferFunction)
        .map_err(err)
}

/// `(classification, cancellation_residual, oscillatory_pole)`.
#[pyfunction]
#[pyo3(signature = (tf, pe, tolerance = ztrans::DEFAULT_CANCELLATION_TOLERANCE))]
fn stability_report(tf: &TransferFunction, pe: f64, tolerance: f64) -> PyResult<(&'static str, f64, Option<Complex64>)> {
    let r = ztrans::stability_report_with_tolerance(&tf.0, pe, tolerance).map_err(err)?;
    Ok((r.classification.as_str(), r.cancellation_residual, r.oscillatory_pole))
}

/// Reaction field of the 2D channel model.
#[pyclass(frozen, skip_from_py_object)]
struct Channel2D {
    solution: Solution2D,
    window: (f64, f64),
}

#[pymethods]
impl Channel2D {
    #[getter]
    fn z(&self) -> Vec<f64> {
        self.solution.grid().z().to_vec()
    }

    #[getter]
    fn y(&self) -> Vec<f64> {
        self.solution.grid().y().to_vec()
    }

    /// `b_x` as rows of constant `z`.
    fn values(&self) -> Vec<Vec<f64>> {
        self.solution
            .values()
            .chunks(self.solution.grid().ny())
            .map(<[f64]>::to_vec)
            .collect()
    }

    fn centerline(&self) -> Vec<f64> {
        self.solution.centerline()
    }

    fn residual_history(&self) -> Vec<f64> {
        self.solution.residual_history().to_vec()
    }

    fn downstream_decay_metric(&self) -> f64 {
        self.solution.downstream_decay_metric()
    }

    fn upstream_confinement(&self) -> f64 {
        self.solution.upstream_confinement(self.window)
    }

    /// `(net, absolute)` axial current through the transverse line at `z0`.
    fn net_current(&self, z0: f64) -> PyResult<(f64, f64)> {
        let c = self.solution.net_current_bisecting_plane(z0).map_err(err)?;
        Ok((c.net, c.absolute))
    }
}

#[pyfunction]
#[pyo3(signature = (d, u_z = 10.0, window = (0.3, 0.5), magnitude = 1.0, refinement = 0))]
fn solve_channel(d: f64, u_z: f64, window: (f64, f64), magnitude: f64, refinement: u32) -> PyResult<Channel2D> {
    let geom = CoreGeometry::with_window_fractions(d, window.0, window.1).map_err(err)?;
    let params = CoreParams::liquid_sodium(u_z).map_err(err)?;
    let options = GridOptions {
        refinement,
        ..GridOptions::default()
    };
    let solution = fem2d::solve_channel(&geom, &params, &options, magnitude).map_err(err)?;
    Ok(Channel2D {
        solution,
        window: geom.window(),
    })
}

#[pymodule]
fn flowfem(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PhysicalParams>()?;
    m.add_class::<AppliedField>()?;
    m.add_class::<Mesh1D>()?;
    m.add_class::<Solution1D>()?;
    m.add_class::<TransferFunction>()?;
    m.add_class::<Channel2D>()?;
    m.add_function(wrap_pyfunction!(solve_1d, m)?)?;
    m.add_function(wrap_pyfunction!(continuum_reference, m)?)?;
    m.add_function(wrap_pyfunction!(continuum_reaction_field, m)?)?;
    m.add_function(wrap_pyfunction!(oscillation_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(discrete_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(oscillation_amplitude_asy, m)?)?;
    m.add_function(wrap_pyfunction!(oscillation_amplitude_bx, m)?)?;
    m.add_function(wrap_pyfunction!(transfer_function, m)?)?;
    m.add_function(wrap_pyfunction!(stability_report, m)?)?;
    m.add_function(wrap_pyfunction!(solve_channel, m)?)?;
    Ok(())
}
