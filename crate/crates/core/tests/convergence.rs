//! Mesh refinement against the continuum solution.

use flowfem_core::continuum::{continuum_reference, downstream_plateau, ode_analytic_solution};
use flowfem_core::fem1d::{self, InputMode};
use flowfem_core::{AppliedField, ElementOrder, Mesh1D, PhysicalParams};

fn field() -> AppliedField {
    AppliedField::new(8.0, 12.0, 1.0, 20.0).unwrap()
}

fn nodal_error(order: ElementOrder, mode: InputMode, dz: f64, params: &PhysicalParams) -> f64 {
    let mesh = Mesh1D::covering(20.0, dz, order).unwrap();
    let sol = fem1d::solve(&mesh, params, &field(), mode).unwrap();
    sol.a_y()
        .iter()
        .enumerate()
        .map(|(n, a)| (a - ode_analytic_solution(&field(), params, mesh.z(n)).unwrap()).abs())
        .fold(0.0, f64::max)
}

fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

const SPACINGS: [f64; 4] = [0.25, 0.125, 0.0625, 0.03125];

#[test]
fn potential_input_is_second_order() {
    let p = PhysicalParams::liquid_sodium(0.5).unwrap();
    assert!(p.peclet(SPACINGS[0]) < 1.0);
    let e: Vec<f64> = SPACINGS
        .iter()
        .map(|&dz| nodal_error(ElementOrder::Linear, InputMode::VectorPotential, dz, &p))
        .collect();
    let o = orders(&e);
    println!("errors {e:?} orders {o:?}");
    assert!(o.iter().all(|&x| x >= 1.9), "{o:?}");
}

#[test]
fn flux_density_input_is_first_order() {
    // nodal sampling with both field edges inside the magnet adds one extra
    // B dz of load, which shows up as an O(dz) plateau offset
    let p = PhysicalParams::liquid_sodium(0.5).unwrap();
    let e: Vec<f64> = SPACINGS
        .iter()
        .map(|&dz| nodal_error(ElementOrder::Linear, InputMode::FluxDensity, dz, &p))
        .collect();
    let o = orders(&e);
    assert!(o.iter().all(|&x| (x - 1.0).abs() < 0.1), "{o:?}");
    for dz in SPACINGS {
        let mesh = Mesh1D::covering(20.0, dz, ElementOrder::Linear).unwrap();
        let sol = fem1d::solve(&mesh, &p, &field(), InputMode::FluxDensity).unwrap();
        let offset = sol.a_y().last().unwrap() - downstream_plateau(&field(), &p).unwrap();
        assert!((offset - dz).abs() < 0.1 * dz, "dz {dz}: offset {offset}");
    }
}

#[test]
fn quadratic_elements_converge() {
    let p = PhysicalParams::liquid_sodium(0.5).unwrap();
    let e: Vec<f64> = SPACINGS
        .iter()
        .map(|&dz| nodal_error(ElementOrder::Quadratic, InputMode::VectorPotential, dz, &p))
        .collect();
    let o = orders(&e);
    assert!(o.iter().all(|&x| x >= 1.9), "{o:?}");
}

#[test]
fn potential_input_hits_the_plateau_exactly() {
    // the discrete load sums to the exact jump in A_sy, so the plateau has
    // no discretisation error at all
    let p = PhysicalParams::liquid_sodium(0.5).unwrap();
    let want = downstream_plateau(&field(), &p).unwrap();
    for dz in SPACINGS {
        let mesh = Mesh1D::covering(20.0, dz, ElementOrder::Linear).unwrap();
        let sol = fem1d::solve(&mesh, &p, &field(), InputMode::VectorPotential).unwrap();
        let gap = (sol.a_y().last().unwrap() - want).abs();
        assert!(gap < 1e-12 * want, "dz {dz}: gap {gap:e}");
        assert!(sol.b_x().last().unwrap().abs() < 1e-12);
    }
}

#[test]
fn reference_field_is_interval_average() {
    // the forward-differenced exact potential integrates b_x exactly over each edge
    let p = PhysicalParams::liquid_sodium(2.0).unwrap();
    let mesh = Mesh1D::covering(20.0, 0.5, ElementOrder::Linear).unwrap();
    let r = continuum_reference(&mesh, &field(), &p).unwrap();
    let total: f64 = r.b_x().iter().sum::<f64>() * 0.5;
    let want = -ode_analytic_solution(&field(), &p, 20.0).unwrap();
    assert!((total - want).abs() < 1e-12);
}
