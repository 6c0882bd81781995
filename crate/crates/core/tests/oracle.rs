//! Linear-element solves against the closed-form difference solutions.

use flowfem_core::analytic::discrete_oracle;
use flowfem_core::fem1d::{self, InputMode};
use flowfem_core::physics::{MU_0, SODIUM_CONDUCTIVITY};
use flowfem_core::{AppliedField, ElementOrder, Mesh1D, PhysicalParams};
use proptest::prelude::*;

struct Case {
    mesh: Mesh1D,
    field: AppliedField,
    params: PhysicalParams,
}

fn layout(mode: InputMode, pe: f64, dz: f64, m_b: usize, m_c: usize, m_d: usize, b: f64) -> Case {
    let ramp = match mode {
        InputMode::FluxDensity => 1,
        InputMode::VectorPotential => 2,
    };
    let n = m_b + 2 * ramp + m_c + m_d;
    let start = m_b + 1;
    let end = match mode {
        InputMode::FluxDensity => m_b + 1 + m_c,
        InputMode::VectorPotential => m_b + m_c + 3,
    };
    Case {
        mesh: Mesh1D::new(dz, n + 1, ElementOrder::Linear).unwrap(),
        field: AppliedField::new(start as f64 * dz, end as f64 * dz, b, n as f64 * dz).unwrap(),
        params: PhysicalParams::with_peclet(MU_0, SODIUM_CONDUCTIVITY, pe, dz).unwrap(),
    }
}

fn relative_gap(case: &Case, mode: InputMode) -> f64 {
    let sol = fem1d::solve(&case.mesh, &case.params, &case.field, mode).unwrap();
    let oracle = discrete_oracle(&case.mesh, &case.params, &case.field, mode).unwrap();
    let want = oracle.values();
    assert_eq!(want.len(), sol.n_nodes());
    let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    sol.a_y()
        .iter()
        .zip(&want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale
}

#[test]
fn reference_configurations() {
    let cases = [
        (InputMode::FluxDensity, 200.0, 0.25, 31, 6, 31),
        (InputMode::FluxDensity, 3.0, 0.33, 23, 4, 23),
        (InputMode::VectorPotential, 300.0, 0.33, 22, 4, 22),
        (InputMode::VectorPotential, 3.0, 0.25, 30, 6, 30),
    ];
    for (mode, pe, dz, mb, mc, md) in cases {
        let case = layout(mode, pe, dz, mb, mc, md, 1.0);
        let gap = relative_gap(&case, mode);
        assert!(gap < 1e-9, "{mode:?} Pe {pe}: {gap:e}");
    }
}

#[test]
fn oracle_layout_recovers_counts() {
    let case = layout(InputMode::VectorPotential, 300.0, 0.33, 22, 4, 22, 1.0);
    let o = discrete_oracle(&case.mesh, &case.params, &case.field, InputMode::VectorPotential).unwrap();
    assert_eq!((o.m_b(), o.m_c(), o.m_d(), o.ramp_width()), (22, 4, 22, 2));
    assert!((o.lambda() - 0.33).abs() < 1e-15);
}

#[test]
fn magnitude_scales_linearly() {
    let one = layout(InputMode::FluxDensity, 17.0, 0.2, 9, 5, 9, 1.0);
    let two = layout(InputMode::FluxDensity, 17.0, 0.2, 9, 5, 9, -2.5);
    let a = fem1d::solve(&one.mesh, &one.params, &one.field, InputMode::FluxDensity).unwrap();
    let b = fem1d::solve(&two.mesh, &two.params, &two.field, InputMode::FluxDensity).unwrap();
    for (x, y) in a.a_y().iter().zip(b.a_y()) {
        assert!((-2.5 * x - y).abs() <= 1e-12 * x.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_configurations_match(
        asy in any::<bool>(),
        log_pe in -1.0f64..3.5,
        dz in 0.05f64..0.5,
        m_b in 1usize..40,
        m_c in 1usize..20,
        m_d in 1usize..40,
    ) {
        let pe = 10f64.powf(log_pe);
        prop_assume!((pe - 1.0).abs() > 1e-3);
        let mode = if asy { InputMode::VectorPotential } else { InputMode::FluxDensity };
        let case = layout(mode, pe, dz, m_b, m_c, m_d, 1.0);
        let gap = relative_gap(&case, mode);
        prop_assert!(gap < 1e-9, "gap {gap:e}");
    }
}
