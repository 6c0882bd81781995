//! Closed-form solutions of the linear-element difference equation
//! `r y(n-1) + (-1 - r) y(n) + y(n+1) = rhs(n) / (-1 + Pe)` with
//! `r = (-1 - Pe)/(-1 + Pe)`, for a node-aligned rectangular field.
//!
//! The mesh splits into five sub-domains joined at shared nodes:
//! upstream `B` (`m_b` intervals), the entry ramp `F`, the magnet body `C`
//! (`m_c` intervals), the exit ramp `G` and the downstream region `D`
//! (`m_d` intervals). The ramps are one interval wide for flux-density
//! input and two for potential input, where the loads at the field edges
//! are spread over two nodes. Each domain carries `y = p1 + p2 r^n` plus a
//! particular solution; the coefficients follow from continuity and from
//! the difference equation at each junction.

use crate::error::{Error, Result};
use crate::fem1d::{magnet_nodes, InputMode, MagnetNodes};
use crate::field::AppliedField;
use crate::mesh::{ElementOrder, Mesh1D};
use crate::physics::PhysicalParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainLabel {
    /// `B`: from the inlet to the node before the field.
    Upstream,
    /// `F`: entry ramp.
    EntryRamp,
    /// `C`: inside the field.
    Magnet,
    /// `G`: exit ramp.
    ExitRamp,
    /// `D`: from the end of the exit ramp to the outlet.
    Downstream,
}

impl DomainLabel {
    pub const ALL: [DomainLabel; 5] = [
        DomainLabel::Upstream,
        DomainLabel::EntryRamp,
        DomainLabel::Magnet,
        DomainLabel::ExitRamp,
        DomainLabel::Downstream,
    ];

    pub fn letter(self) -> char {
        match self {
            DomainLabel::Upstream => 'B',
            DomainLabel::EntryRamp => 'F',
            DomainLabel::Magnet => 'C',
            DomainLabel::ExitRamp => 'G',
            DomainLabel::Downstream => 'D',
        }
    }
}

/// Complementary-solution coefficients, named after their domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub b1: f64,
    pub b2: f64,
    pub f1: f64,
    pub f2: f64,
    pub c1: f64,
    pub c2: f64,
    pub g1: f64,
    pub g2: f64,
    pub d1: f64,
    pub d2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseDifferenceSolution {
    r: f64,
    lambda: f64,
    m_b: usize,
    m_c: usize,
    m_d: usize,
    ramp_width: usize,
    coeffs: Coefficients,
}

fn validate(pe: f64, m_b: usize, m_c: usize, m_d: usize) -> Result<f64> {
    if !(pe.is_finite() && pe > 0.0) {
        return Err(Error::invalid("pe", format!("must be finite and > 0, got {pe}")));
    }
    if pe == 1.0 {
        return Err(Error::SingularPeclet);
    }
    for (name, m) in [("m_b", m_b), ("m_c", m_c), ("m_d", m_d)] {
        if m == 0 {
            return Err(Error::invalid(name, "sub-domain must hold at least one interval"));
        }
    }
    Ok((-1.0 - pe) / (-1.0 + pe))
}

fn powi(r: f64, n: usize) -> f64 {
    r.powi(n as i32)
}

/// Closed form for flux-density input (ramps one interval wide).
pub fn difference_solution_bx(
    pe: f64,
    lambda: f64,
    m_b: usize,
    m_c: usize,
    m_d: usize,
) -> Result<PiecewiseDifferenceSolution> {
    let r = validate(pe, m_b, m_c, m_d)?;
    let l = lambda;
    let g2 = l / (1.0 - r).powi(2);
    let c2 = l / (powi(r, m_c) * (1.0 - r));
    let f2 = -l / (1.0 - r).powi(2) + c2 / r;
    let b2 = l / (powi(r, m_b - 1) * (1.0 - r).powi(2)) + f2 / powi(r, m_b);
    let b1 = -b2;
    let f1 = b1 + b2 * powi(r, m_b) - f2;
    let c1 = f1 + f2 * r + l * r / (r - 1.0) - c2;
    let g1 = c1 + c2 * powi(r, m_c) + l * m_c as f64 - g2;
    let d1 = g1 + g2 * r + l / (1.0 - r);
    Ok(PiecewiseDifferenceSolution {
        r,
        lambda,
        m_b,
        m_c,
        m_d,
        ramp_width: 1,
        coeffs: Coefficients {
            b1,
            b2,
            f1,
            f2,
            c1,
            c2,
            g1,
            g2,
            d1,
            d2: 0.0,
        },
    })
}

/// Closed form for potential input (ramps two intervals wide).
pub fn difference_solution_asy(
    pe: f64,
    lambda: f64,
    m_b: usize,
    m_c: usize,
    m_d: usize,
) -> Result<PiecewiseDifferenceSolution> {
    let r = validate(pe, m_b, m_c, m_d)?;
    let l = lambda;
    let g2 = l / (2.0 * r * (1.0 - r).powi(2));
    let c2 = l * (1.0 + r) / (2.0 * powi(r, m_c + 1) * (1.0 - r));
    let f2 = -l / (2.0 * r * (1.0 - r).powi(2)) + c2 / (r * r);
    let b2 = l * r / (2.0 * powi(r, m_b) * (1.0 - r).powi(2)) + f2 / powi(r, m_b);
    let b1 = -b2;
    let f1 = b1 + b2 * powi(r, m_b) - f2;
    let c1 = f1 + f2 * r + l * (3.0 * r - 2.0) / (2.0 * (r - 1.0)) - c2 / r;
    let g1 = c1 + c2 * powi(r, m_c) + l * m_c as f64 - l / (2.0 * r * (1.0 - r).powi(2));
    let d1 = g1 + g2 * r + l * (r - 2.0) / (2.0 * (r - 1.0));
    Ok(PiecewiseDifferenceSolution {
        r,
        lambda,
        m_b,
        m_c,
        m_d,
        ramp_width: 2,
        coeffs: Coefficients {
            b1,
            b2,
            f1,
            f2,
            c1,
            c2,
            g1,
            g2,
            d1,
            d2: 0.0,
        },
    })
}

/// Closed form for either input mode.
pub fn difference_solution(
    mode: InputMode,
    pe: f64,
    lambda: f64,
    m_b: usize,
    m_c: usize,
    m_d: usize,
) -> Result<PiecewiseDifferenceSolution> {
    match mode {
        InputMode::FluxDensity => difference_solution_bx(pe, lambda, m_b, m_c, m_d),
        InputMode::VectorPotential => difference_solution_asy(pe, lambda, m_b, m_c, m_d),
    }
}

impl PiecewiseDifferenceSolution {
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn m_b(&self) -> usize {
        self.m_b
    }

    pub fn m_c(&self) -> usize {
        self.m_c
    }

    pub fn m_d(&self) -> usize {
        self.m_d
    }

    pub fn ramp_width(&self) -> usize {
        self.ramp_width
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn mode(&self) -> InputMode {
        if self.ramp_width == 1 {
            InputMode::FluxDensity
        } else {
            InputMode::VectorPotential
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.m_b + 2 * self.ramp_width + self.m_c + self.m_d + 1
    }

    /// Number of intervals in a domain.
    pub fn domain_len(&self, label: DomainLabel) -> usize {
        match label {
            DomainLabel::Upstream => self.m_b,
            DomainLabel::EntryRamp | DomainLabel::ExitRamp => self.ramp_width,
            DomainLabel::Magnet => self.m_c,
            DomainLabel::Downstream => self.m_d,
        }
    }

    /// Global index of a domain's local node 0.
    pub fn domain_start(&self, label: DomainLabel) -> usize {
        DomainLabel::ALL
            .iter()
            .take_while(|&&d| d != label)
            .map(|&d| self.domain_len(d))
            .sum()
    }

    /// Nodes carrying the field edges `a` and `b`.
    pub fn magnet_nodes(&self) -> MagnetNodes {
        let start = self.m_b + 1;
        let end = match self.ramp_width {
            1 => self.m_b + 1 + self.m_c,
            _ => self.m_b + self.m_c + 3,
        };
        MagnetNodes { start, end }
    }

    /// Domain and local index of a global node. Junction nodes are
    /// reported as the last node of the upstream-side domain.
    pub fn locate(&self, global_node: usize) -> Result<(DomainLabel, usize)> {
        if global_node >= self.n_nodes() {
            return Err(Error::NodeOutOfRange {
                node: global_node,
                count: self.n_nodes(),
            });
        }
        for label in DomainLabel::ALL {
            let start = self.domain_start(label);
            if global_node <= start + self.domain_len(label) {
                return Ok((label, global_node - start));
            }
        }
        unreachable!("node within span belongs to some domain")
    }

    /// Closed form of one domain at local index `n` (not range checked, so
    /// junctions can be evaluated from either side).
    pub fn evaluate_local(&self, label: DomainLabel, n: usize) -> f64 {
        let c = &self.coeffs;
        let r = self.r;
        let l = self.lambda;
        let x = n as f64;
        let rn = powi(r, n);
        let ramp = if self.ramp_width == 1 { 2.0 } else { 4.0 };
        let q = (r + 1.0) / (r - 1.0);
        match label {
            DomainLabel::Upstream => c.b1 + c.b2 * rn,
            DomainLabel::EntryRamp => c.f1 + c.f2 * rn + (l / ramp) * q * x + (l / ramp) * x * x,
            DomainLabel::Magnet => c.c1 + c.c2 * rn + l * x,
            DomainLabel::ExitRamp => {
                c.g1 + c.g2 * rn + (1.0 - q / ramp) * l * x - (l / ramp) * x * x
            }
            DomainLabel::Downstream => c.d1 + c.d2 * rn,
        }
    }

    pub fn evaluate(&self, global_node: usize) -> Result<f64> {
        let (label, n) = self.locate(global_node)?;
        Ok(self.evaluate_local(label, n))
    }

    /// All nodal values, upstream to downstream.
    pub fn values(&self) -> Vec<f64> {
        (0..self.n_nodes())
            .map(|n| {
                let (label, local) = self.locate(n).expect("in range");
                self.evaluate_local(label, local)
            })
            .collect()
    }

    /// Oscillatory part of `(A(m_c - 1) - A(m_c)) / dz` at the end of the
    /// magnet domain: `c2 r^(m_c-1) (1 - r) / dz`.
    pub fn exit_oscillation(&self, dz: f64) -> f64 {
        self.coeffs.c2 * powi(self.r, self.m_c - 1) * (1.0 - self.r) / dz
    }
}

/// Closed form matching a linear mesh and a node-aligned field, with
/// `lambda = B dz`.
pub fn discrete_oracle(
    mesh: &Mesh1D,
    params: &PhysicalParams,
    field: &AppliedField,
    mode: InputMode,
) -> Result<PiecewiseDifferenceSolution> {
    if mesh.order() != ElementOrder::Linear {
        return Err(Error::OrderMismatch {
            expected: 1,
            found: mesh.order().degree(),
        });
    }
    let MagnetNodes { start, end } = magnet_nodes(mesh, field)?;
    let last = mesh.n_nodes() - 1;
    let ramp = match mode {
        InputMode::FluxDensity => 0,
        InputMode::VectorPotential => 2,
    };
    if start < 2 || end + 2 > last || end < start + ramp + 1 {
        return Err(Error::invalid(
            "field",
            "every sub-domain needs at least one interval",
        ));
    }
    let m_b = start - 1;
    let m_d = last - end - 1;
    let m_c = end - start - ramp;
    difference_solution(
        mode,
        params.peclet(mesh.dz()),
        field.magnitude() * mesh.dz(),
        m_b,
        m_c,
        m_d,
    )
}

/// Oscillation amplitude at the magnet exit for potential input:
/// `B (1 - Pe) / (1 + Pe)^2`.
pub fn oscillation_amplitude_asy(pe: f64, b: f64) -> f64 {
    b * (1.0 - pe) / (1.0 + pe).powi(2)
}

/// Oscillation amplitude at the magnet exit for flux-density input:
/// `B (1 - Pe) / (1 + Pe)`.
pub fn oscillation_amplitude_bx(pe: f64, b: f64) -> f64 {
    b * (1.0 - pe) / (1.0 + pe)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakErrorRow {
    pub pe: f64,
    /// `|oscillation_amplitude_asy| / |B|` in percent.
    pub asy_percent: f64,
    /// `|oscillation_amplitude_bx| / |B|` in percent.
    pub bx_percent: f64,
}

pub fn peak_error_curve(pe_grid: &[f64], b: f64) -> Result<Vec<PeakErrorRow>> {
    if !(b.is_finite() && b != 0.0) {
        return Err(Error::invalid("B", "must be finite and non-zero"));
    }
    pe_grid
        .iter()
        .map(|&pe| {
            if !(pe.is_finite() && pe > 0.0) {
                return Err(Error::invalid("pe", format!("grid values must be > 0, got {pe}")));
            }
            Ok(PeakErrorRow {
                pe,
                asy_percent: 100.0 * (oscillation_amplitude_asy(pe, b) / b).abs(),
                bx_percent: 100.0 * (oscillation_amplitude_bx(pe, b) / b).abs(),
            })
        })
        .collect()
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
