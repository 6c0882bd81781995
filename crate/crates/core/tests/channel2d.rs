use std::time::Instant;

use flowfem_core::continuum::continuum_reaction_field;
use flowfem_core::fem2d::{solve_channel, ChannelGeometry, GridOptions, Solution2D};
use flowfem_core::PhysicalParams;

fn run(d: f64, refinement: u32) -> (ChannelGeometry, Solution2D, f64) {
    let g = ChannelGeometry::with_window_fractions(d, 0.3, 0.5).unwrap();
    let p = PhysicalParams::liquid_sodium(10.0).unwrap();
    let t = Instant::now();
    let sol = solve_channel(&g, &p, &GridOptions { refinement, ..Default::default() }, 1.0).unwrap();
    (g, sol, t.elapsed().as_secs_f64())
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn plate_separation_sweep() {
    let mut decay = Vec::new();
    for d in [0.1, 0.2, 0.4] {
        let (g, coarse, t0) = run(d, 0);
        let (_, fine, t1) = run(d, 1);
        let c0 = coarse.centerline();
        let c1: Vec<f64> = fine.centerline().into_iter().step_by(2).collect();
        let peak = c0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let change = c0.iter().zip(&c1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / peak;

        let z = coarse.grid().z();
        let mut worst_current = 0.0f64;
        for w in z.windows(2) {
            for z0 in [w[0], 0.5 * (w[0] + w[1])] {
                worst_current = worst_current.max(coarse.net_current_bisecting_plane(z0).unwrap().relative());
            }
        }

        let p = PhysicalParams::liquid_sodium(10.0).unwrap();
        let f = g.applied_field(1.0).unwrap();
        let one_d: Vec<f64> = z.iter().map(|&zi| continuum_reaction_field(&f, &p, zi).unwrap()).collect();
        let corr = correlation(&c0, &one_d);
        let up = coarse.upstream_confinement(g.window());
        println!(
            "d {d}: unknowns {} / {}, change {change:.4}, decay {:.4}, current {worst_current:e}, corr {corr:.4}, upstream {up:.4}, t {t0:.2}s / {t1:.2}s",
            coarse.grid().n_nodes(),
            fine.grid().n_nodes(),
            coarse.downstream_decay_metric()
        );
        assert!(fine.grid().n_nodes() <= 100_000);
        assert!(change < 0.02);
        assert!(worst_current < 1e-6);
        assert!(corr > 0.95);
        assert!(up < 0.10);
        let rel = (coarse.downstream_decay_metric() - fine.downstream_decay_metric()).abs()
            / coarse.downstream_decay_metric();
        assert!(rel < 0.10, "decay not mesh-stable: {rel}");
        decay.push(coarse.downstream_decay_metric());
    }
    assert!(decay.windows(2).all(|w| w[1] < w[0]), "{decay:?}");
}
