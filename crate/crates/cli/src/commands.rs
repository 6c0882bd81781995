//! One function per subcommand, each returning the artifacts to write.

use flowfem_core::analytic::{discrete_oracle, log_grid, peak_error_curve};
use flowfem_core::continuum::{continuum_reaction_field, continuum_reference};
use flowfem_core::fem1d::{self, magnet_nodes, oscillation_metrics, InputMode, OscillationMetrics};
use flowfem_core::fem2d::{solve_channel, Solution2D};
use flowfem_core::ztrans::{stability_report_with_tolerance, transfer_function};
use flowfem_core::{ElementOrder, Error as CoreError, Mesh1D, Solution1D};
use rayon::prelude::*;
use serde_json::json;

use crate::artifact::{Artifact, Cell, PlotSpec};
use crate::config::{Problem1D, RunConfig};
use crate::CliResult;

const DEFAULT_GEOMETRY_NOTE: &str =
    "field window, domain length and mesh spacing are defaults of this tool unless set in the config";

fn metrics_json(m: &OscillationMetrics) -> serde_json::Value {
    json!({
        "peak_abs_error": m.peak_abs_error,
        "peak_error_edge": m.peak_error_node,
        "oscillation_amplitude": m.oscillation_amplitude,
        "amplitude_edge": m.amplitude_edge,
        "downstream_sign_changes": m.sign_change_count,
        "magnet_sign_changes": m.magnet_sign_changes,
        "magnet_edges": m.magnet_edges,
        "error_ratio": m.error_ratio,
    })
}

/// Solution, continuum reference and metrics for one 1D problem.
pub struct Solve1D {
    pub solution: Solution1D,
    pub reference: Option<Solution1D>,
    pub metrics: Option<OscillationMetrics>,
}

/// The continuum reference needs `u_z > 0`; without it only the solve is reported.
pub fn run_1d(p: &Problem1D, linear: &Mesh1D) -> CliResult<Solve1D> {
    let solution = fem1d::solve(&p.mesh, &p.params, &p.field, p.mode)?;
    let reference = match continuum_reference(linear, &p.field, &p.params) {
        Ok(r) => Some(r),
        Err(CoreError::DegenerateConvection) => None,
        Err(e) => return Err(e.into()),
    };
    let metrics = match &reference {
        Some(r) => Some(oscillation_metrics(&solution, r, magnet_nodes(linear, &p.field)?)?),
        None => None,
    };
    Ok(Solve1D {
        solution,
        reference,
        metrics,
    })
}

pub fn solve1d(cfg: &RunConfig) -> CliResult<Vec<Artifact>> {
    let p = cfg.problem_1d()?;
    let linear = cfg.linear_mesh_1d()?;
    let run = run_1d(&p, &linear)?;
    let oracle = if p.mesh.order() == ElementOrder::Linear && p.pe != 1.0 {
        discrete_oracle(&p.mesh, &p.params, &p.field, p.mode).ok().map(|o| o.values())
    } else {
        None
    };

    let mut a = Artifact::new(
        "solve1d",
        "nodal vector potential and edge reaction field of the 1D convection-diffusion solve",
        &[
            "node",
            "z",
            "a_y",
            "b_x",
            "a_y_continuum",
            "b_x_continuum",
            "a_y_oracle",
            "error_a_y",
            "error_b_x",
        ],
    );
    let sol = &run.solution;
    let n = sol.n_nodes();
    for i in 0..n {
        let z = p.mesh.z(i);
        let edge = (i + 1 < n).then_some(i);
        let b = edge.map(|e| sol.b_x()[e]);
        let a_ref = run.reference.as_ref().map(|r| r.a_y()[i]);
        let b_ref = run.reference.as_ref().zip(edge).map(|(r, e)| r.b_x()[e]);
        a.push_row(vec![
            i.into(),
            z.into(),
            sol.a_y()[i].into(),
            b.into(),
            a_ref.into(),
            b_ref.into(),
            oracle.as_ref().map(|o| o[i]).into(),
            a_ref.map(|r| sol.a_y()[i] - r).into(),
            b.zip(b_ref).map(|(x, r)| x - r).into(),
        ]);
    }
    a.set("mode", p.mode.short_name());
    a.set("order", p.mesh.order().degree());
    a.set("pe", p.pe);
    a.set("dz", p.mesh.dz());
    a.set("u_z", p.params.u_z());
    a.set("nodes", n);
    a.set("field", json!({"a": p.field.start(), "b": p.field.end(), "magnitude": p.field.magnitude(), "length": p.field.length()}));
    if let Some(m) = &run.metrics {
        a.set("metrics", metrics_json(m));
    }
    if let Some(o) = &oracle {
        let scale = o.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let gap = sol.a_y().iter().zip(o).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        a.set("oracle_relative_gap", if scale > 0.0 { gap / scale } else { gap });
    }
    a.note("b_x, b_x_continuum and error_b_x refer to the interval from this node to the next");
    a.note("continuum columns are exact nodal values of the ODE solution and their interval averages");
    a.note(DEFAULT_GEOMETRY_NOTE);
    a.plot = Some(PlotSpec {
        x: "z".into(),
        ys: vec!["b_x".into(), "b_x_continuum".into()],
        log_x: false,
        x_label: "z [m]".into(),
        y_label: "b_x [T]".into(),
    });
    Ok(vec![a])
}

/// Sorted, de-duplicated sweep grid.
pub fn sweep_grid(cfg: &RunConfig) -> Vec<f64> {
    let s = &cfg.sweep;
    let mut grid = log_grid(s.pe_min, s.pe_max, s.points);
    grid.extend(&s.include);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn measured_percent(cfg: &RunConfig, pe: f64, mode: InputMode) -> CliResult<f64> {
    let mut c = cfg.clone();
    c.physics.pe = Some(pe);
    c.physics.u_z = None;
    c.mesh.order = 1;
    c.solve.mode = mode.short_name().into();
    let p = c.problem_1d()?;
    let run = run_1d(&p, &c.linear_mesh_1d()?)?;
    let m = run.metrics.expect("pe > 0 gives a continuum reference");
    Ok(100.0 * m.oscillation_amplitude / p.field.magnitude().abs())
}

pub fn sweep_error(cfg: &RunConfig) -> CliResult<Vec<Artifact>> {
    cfg.problem_1d()?;
    let grid = sweep_grid(cfg);
    let b = cfg.field.magnitude;
    let analytic = peak_error_curve(&grid, b)?;
    let measured: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&pe| {
            Ok((
                measured_percent(cfg, pe, InputMode::VectorPotential)?,
                measured_percent(cfg, pe, InputMode::FluxDensity)?,
            ))
        })
        .collect::<CliResult<_>>()?;

    let mut a = Artifact::new(
        "sweep_error",
        "peak oscillation error at the magnet exit against the element Peclet number",
        &[
            "pe",
            "analytic_asy_percent",
            "analytic_bx_percent",
            "measured_asy_percent",
            "measured_bx_percent",
        ],
    );
    let mut worst_gap = 0.0f64;
    for (row, (m_asy, m_bx)) in analytic.iter().zip(&measured) {
        worst_gap = worst_gap
            .max((row.asy_percent - m_asy).abs())
            .max((row.bx_percent - m_bx).abs());
        a.push_row(vec![
            row.pe.into(),
            row.asy_percent.into(),
            row.bx_percent.into(),
            (*m_asy).into(),
            (*m_bx).into(),
        ]);
    }
    let peak = analytic
        .iter()
        .max_by(|x, y| x.asy_percent.total_cmp(&y.asy_percent))
        .expect("non-empty grid");
    a.set("points", grid.len());
    a.set("dz", cfg.mesh.dz);
    a.set("asy_peak_pe", peak.pe);
    a.set("asy_peak_percent", peak.asy_percent);
    a.set("max_abs_gap_percent", worst_gap);
    a.note("percent values are |amplitude| / |B| * 100, so the potential-input peak of 12.5 is the fraction 1/8");
    a.note("measured values are the largest overshoot of the linear-element b_x beyond the continuum range");
    a.note(DEFAULT_GEOMETRY_NOTE);
    a.plot = Some(PlotSpec {
        x: "pe".into(),
        ys: a.headers[1..].to_vec(),
        log_x: true,
        x_label: "Pe".into(),
        y_label: "peak error [% of B]".into(),
    });
    Ok(vec![a])
}

pub fn poles(cfg: &RunConfig) -> CliResult<Vec<Artifact>> {
    cfg.validate()?;
    let dz = cfg.mesh.dz;
    let mut a = Artifact::new(
        "poles",
        "z-domain poles and zeros of the linear-element stencil for both input modes",
        &[
            "pe",
            "mode",
            "gain",
            "zero_1",
            "zero_2",
            "pole_1",
            "pole_2",
            "oscillatory_pole",
            "cancellation_residual",
            "classification",
            "note",
        ],
    );
    let mut singular = 0usize;
    for &pe in &cfg.poles.pe_values {
        for mode in [InputMode::FluxDensity, InputMode::VectorPotential] {
            let tf = match transfer_function(pe, dz, mode) {
                Ok(tf) => tf,
                Err(CoreError::SingularPeclet) => {
                    singular += 1;
                    let mut row = vec![pe.into(), mode.short_name().into()];
                    row.extend(std::iter::repeat_n(Cell::Empty, 7));
                    row.push("singular".into());
                    row.push("Pe = 1: leading stencil coefficient vanishes".into());
                    a.push_row(row);
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            let report = stability_report_with_tolerance(&tf, pe, cfg.poles.tolerance)?;
            a.push_row(vec![
                pe.into(),
                mode.short_name().into(),
                tf.gain.into(),
                tf.zeros.first().map(|c| c.re).into(),
                tf.zeros.get(1).map(|c| c.re).into(),
                tf.poles.first().map(|c| c.re).into(),
                tf.poles.get(1).map(|c| c.re).into(),
                report.oscillatory_pole.map(|c| c.re).into(),
                report.cancellation_residual.into(),
                report.classification.as_str().into(),
                Cell::Empty,
            ]);
        }
    }
    a.set("dz", dz);
    a.set("cancellation_tolerance", cfg.poles.tolerance);
    a.set("singular_rows", singular);
    a.note("all poles and zeros are real; only real parts are listed");
    a.note("cancellation_residual is the distance from the non-unit pole to the nearest zero");
    a.note("the cancellation tolerance is a choice of this tool");
    Ok(vec![a])
}

/// Coarse solution for one plate separation.
pub struct ChannelRun {
    pub d: f64,
    pub window: (f64, f64),
    pub solution: Solution2D,
    pub max_element_pe: f64,
}

impl ChannelRun {
    /// Largest relative net current over transverse lines at every axial
    /// node and element midpoint.
    pub fn worst_net_current(&self) -> CliResult<f64> {
        let z = self.solution.grid().z();
        let mut worst = 0.0f64;
        for w in z.windows(2) {
            for z0 in [w[0], 0.5 * (w[0] + w[1])] {
                worst = worst.max(self.solution.net_current_bisecting_plane(z0)?.relative());
            }
        }
        Ok(worst)
    }
}

pub fn run_channel(cfg: &RunConfig, d: f64, extra_refinement: u32) -> CliResult<ChannelRun> {
    let ch = &cfg.channel;
    let geom = ch.geometry(d)?;
    let params = ch.params(&cfg.physics)?;
    let options = ch.grid_options(extra_refinement);
    let solution = solve_channel(&geom, &params, &options, ch.magnitude)?;
    let max_element_pe = solution.grid().max_element_peclet(&params);
    Ok(ChannelRun {
        d,
        window: geom.window(),
        solution,
        max_element_pe,
    })
}

pub fn solve2d(cfg: &RunConfig) -> CliResult<Vec<Artifact>> {
    cfg.validate()?;
    let ch = &cfg.channel;
    let params = ch.params(&cfg.physics)?;

    let mut centre = Artifact::new(
        "channel_centerline",
        "reaction field on the channel axis and integrated across the cross-section",
        &["d", "z", "z_over_d", "b_x_centerline", "b_x_y_integrated", "b_x_1d_continuum"],
    );
    let mut metrics = Artifact::new(
        "channel_metrics",
        "per-separation solver and field metrics of the 2D channel model",
        &[
            "d",
            "nz",
            "ny",
            "unknowns",
            "max_element_pe",
            "max_abs_b_x",
            "decay_metric",
            "upstream_confinement",
            "max_net_current_relative",
            "final_residual",
            "refinement_sweeps",
        ],
    );
    let mut fields = Vec::new();
    for (k, &d) in ch.d_values.iter().enumerate() {
        let run = run_channel(cfg, d, 0)?;
        let sol = &run.solution;
        let grid = sol.grid();
        let field1d = ch.geometry(d)?.applied_field(ch.magnitude)?;
        for ((&z, c), s) in grid.z().iter().zip(sol.centerline()).zip(sol.y_integrated()) {
            let one_d = if params.u_z() > 0.0 {
                Some(continuum_reaction_field(&field1d, &params, z)?)
            } else {
                None
            };
            centre.push_row(vec![d.into(), z.into(), (z / d).into(), c.into(), s.into(), one_d.into()]);
        }
        metrics.push_row(vec![
            d.into(),
            grid.nz().into(),
            grid.ny().into(),
            grid.n_nodes().into(),
            run.max_element_pe.into(),
            sol.max_abs().into(),
            sol.downstream_decay_metric().into(),
            sol.upstream_confinement(run.window).into(),
            run.worst_net_current()?.into(),
            (*sol.residual_history().last().expect("history")).into(),
            (sol.residual_history().len() - 1).into(),
        ]);

        let mut f = Artifact::new(
            format!("channel_field_{k}"),
            format!("nodal reaction field b_x(z, y) for plate separation d = {d}"),
            &["i", "j", "z", "y", "b_x"],
        );
        for (i, &z) in grid.z().iter().enumerate() {
            for (j, &y) in grid.y().iter().enumerate() {
                f.push_row(vec![i.into(), j.into(), z.into(), y.into(), sol.b_x(i, j).into()]);
            }
        }
        f.set("d", d);
        f.note("the fluid occupies |y| < d/2; the rest of the domain is air");
        fields.push(f);
    }
    for a in [&mut centre, &mut metrics] {
        a.set("u_z", ch.u_z);
        a.set("d_values", &ch.d_values);
        a.set("window_fractions", ch.window);
        a.note("the plate separations, window and grid grading are defaults of this tool");
    }
    centre.note("b_x_y_integrated is the integral of b_x over the full height of the domain");
    metrics.note("decay_metric is max |b_x| over the last 5% of the axial span divided by the global max");
    metrics.note("max_net_current_relative is |int J_z dy| / int |J_z| dy over transverse lines");
    centre.plot = Some(PlotSpec {
        x: "z_over_d".into(),
        ys: vec!["b_x_centerline".into()],
        log_x: false,
        x_label: "z / d".into(),
        y_label: "b_x [T]".into(),
    });
    let mut out = vec![centre, metrics];
    out.extend(fields);
    Ok(out)
}
