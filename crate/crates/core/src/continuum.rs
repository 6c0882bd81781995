//! Exact solution of `-A'' + k A' = k B_x` with `A(0) = 0` and `A'(L) = 0`.
//!
//! The three branches are evaluated in an `exp_m1` form so that neither
//! large `k z` (overflow) nor small `k` (cancellation) loses accuracy.

use crate::error::{Error, Result};
use crate::field::AppliedField;
use crate::mesh::Mesh1D;
use crate::physics::PhysicalParams;
use crate::solution::Solution1D;

fn convection(params: &PhysicalParams) -> Result<f64> {
    let k = params.k();
    if k <= 0.0 {
        return Err(Error::DegenerateConvection);
    }
    Ok(k)
}

/// Continuum vector potential `A_y(z)`.
pub fn ode_analytic_solution(field: &AppliedField, params: &PhysicalParams, z: f64) -> Result<f64> {
    let k = convection(params)?;
    // reuse the field's domain check
    field.flux_density(z)?;
    let z = z.clamp(0.0, field.length());
    Ok(potential(field, k, z))
}

fn potential(field: &AppliedField, k: f64, z: f64) -> f64 {
    let (a, b, bm) = (field.start(), field.end(), field.magnitude());
    if z < a {
        // (B/k)(e^{-k(a-z)} - e^{-k(b-z)})(1 - e^{-kz})
        (bm / k) * (-(-k * z).exp_m1()) * ((-k * (a - z)).exp() - (-k * (b - z)).exp())
    } else if z <= b {
        // (B/k)(1 - e^{-ka} + e^{-kb} - e^{-k(b-z)}) + B(z - a)
        (bm / k) * (-(-k * a).exp_m1() + (-k * (b - z)).exp() * (-k * z).exp_m1())
            + bm * (z - a)
    } else {
        (bm / k) * (-k * a).exp() * (-k * (b - a)).exp_m1() + bm * (b - a)
    }
}

/// Continuum reaction field `b_x(z) = -dA_y/dz`.
pub fn continuum_reaction_field(
    field: &AppliedField,
    params: &PhysicalParams,
    z: f64,
) -> Result<f64> {
    let k = convection(params)?;
    field.flux_density(z)?;
    let (a, b, bm) = (field.start(), field.end(), field.magnitude());
    Ok(if z < a {
        -bm * ((-k * (a - z)).exp() - (-k * (b - z)).exp())
    } else if z <= b {
        bm * (-k * (b - z)).exp_m1()
    } else {
        0.0
    })
}

/// Exact nodal samples of the continuum potential and their forward-difference field.
///
/// Differencing the exact nodal values makes the edge values interval
/// averages of the continuum `b_x`, which is the natural comparison for a
/// discrete forward-difference field.
pub fn continuum_reference(
    mesh: &Mesh1D,
    field: &AppliedField,
    params: &PhysicalParams,
) -> Result<Solution1D> {
    let a_y = mesh
        .coordinates()
        .into_iter()
        .map(|z| ode_analytic_solution(field, params, z))
        .collect::<Result<Vec<_>>>()?;
    Solution1D::from_potential(a_y, mesh.dz())
}

/// Downstream plateau `A_y(z > b)`.
pub fn downstream_plateau(field: &AppliedField, params: &PhysicalParams) -> Result<f64> {
    let k = convection(params)?;
    Ok(potential(field, k, field.length()))
}
