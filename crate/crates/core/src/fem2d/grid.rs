use crate::error::{Error, Result};
use crate::field::AppliedField;
use crate::physics::PhysicalParams;

/// Air region thickness beyond each plate, in units of `d`.
pub const AIR_EXTENT_FACTOR: f64 = 5.0;
/// Axial domain length in units of `d`.
pub const AXIAL_LENGTH_FACTOR: f64 = 10.0;

/// Fluid layer `|y| < d/2` between two plates, air out to `5d` beyond each
/// plate, axial span `[0, 10d]` and a magnet over `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGeometry {
    d: f64,
    window_start: f64,
    window_end: f64,
}

impl ChannelGeometry {
    pub fn new(d: f64, window_start: f64, window_end: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::invalid("d", format!("must be finite and > 0, got {d}")));
        }
        let len = AXIAL_LENGTH_FACTOR * d;
        if !(window_start > 0.0 && window_start < window_end && window_end < len) {
            return Err(Error::invalid(
                "window",
                format!("need 0 < a < b < {len}, got a = {window_start}, b = {window_end}"),
            ));
        }
        Ok(Self {
            d,
            window_start,
            window_end,
        })
    }

    /// Window given as fractions of the axial length.
    pub fn with_window_fractions(d: f64, start: f64, end: f64) -> Result<Self> {
        let len = AXIAL_LENGTH_FACTOR * d;
        Self::new(d, start * len, end * len)
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn air_extent(&self) -> f64 {
        AIR_EXTENT_FACTOR * self.d
    }

    pub fn axial_length(&self) -> f64 {
        AXIAL_LENGTH_FACTOR * self.d
    }

    /// Distance from the channel axis to the outer boundary.
    pub fn half_height(&self) -> f64 {
        self.d / 2.0 + self.air_extent()
    }

    pub fn window(&self) -> (f64, f64) {
        (self.window_start, self.window_end)
    }

    /// Rectangular applied field of magnitude `b` over the window.
    pub fn applied_field(&self, b: f64) -> Result<AppliedField> {
        AppliedField::new(self.window_start, self.window_end, b, self.axial_length())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    /// Axial element Peclet number to aim for; must lie in `(0, 1)`.
    pub target_pe: f64,
    /// Transverse cell size at the fluid–air interface, in units of `d`.
    pub interface_spacing: f64,
    /// Largest growth ratio of transverse cells inside the fluid.
    pub fluid_grading: f64,
    /// Largest growth ratio of transverse cells in the air.
    pub air_grading: f64,
    /// Number of uniform bisections applied in both directions.
    pub refinement: u32,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            target_pe: 0.3,
            interface_spacing: 0.1,
            fluid_grading: 1.2,
            air_grading: 1.3,
            refinement: 0,
        }
    }
}

impl GridOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_pe > 0.0 && self.target_pe < 1.0) {
            return Err(Error::invalid(
                "target_pe",
                format!("must lie in (0, 1), got {}", self.target_pe),
            ));
        }
        if !(self.interface_spacing > 0.0 && self.interface_spacing <= 0.5) {
            return Err(Error::invalid(
                "interface_spacing",
                format!("must lie in (0, 0.5], got {}", self.interface_spacing),
            ));
        }
        for (name, q) in [("fluid_grading", self.fluid_grading), ("air_grading", self.air_grading)] {
            if !(q.is_finite() && q >= 1.0) {
                return Err(Error::invalid(name, format!("must be >= 1, got {q}")));
            }
        }
        if self.refinement > 6 {
            return Err(Error::invalid("refinement", "at most 6 bisections"));
        }
        Ok(())
    }
}

/// Structured tensor-product grid of bilinear quadrilaterals.
///
/// Node `(i, j)` sits at `(z[i], y[j])` and has global index `i * ny + j`,
/// which keeps the matrix band at `ny + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    z: Vec<f64>,
    y: Vec<f64>,
    d: f64,
}

impl Grid2D {
    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn nz(&self) -> usize {
        self.z.len()
    }

    pub fn ny(&self) -> usize {
        self.y.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.nz() * self.ny()
    }

    pub fn n_elements(&self) -> usize {
        (self.nz() - 1) * (self.ny() - 1)
    }

    pub fn node(&self, i: usize, j: usize) -> usize {
        i * self.ny() + j
    }

    /// Uniform axial spacing.
    pub fn dz(&self) -> f64 {
        self.z[1] - self.z[0]
    }

    pub fn plate_separation(&self) -> f64 {
        self.d
    }

    /// Whether the cell row between `y[j]` and `y[j + 1]` lies in the fluid.
    pub fn is_fluid_row(&self, j: usize) -> bool {
        let yc = 0.5 * (self.y[j] + self.y[j + 1]);
        yc.abs() < self.d / 2.0
    }

    /// Index of the transverse node on the channel axis.
    pub fn axis_index(&self) -> usize {
        let mut best = 0;
        for (j, y) in self.y.iter().enumerate() {
            if y.abs() < self.y[best].abs() {
                best = j;
            }
        }
        best
    }

    /// Largest axial element Peclet number over fluid elements.
    pub fn max_element_peclet(&self, params: &PhysicalParams) -> f64 {
        self.z
            .windows(2)
            .map(|w| params.peclet(w[1] - w[0]))
            .fold(0.0, f64::max)
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nz() || j + 1 == self.ny()
    }

    /// Index of the axial node at `z`, if there is one.
    pub fn axial_node_at(&self, z: f64) -> Option<usize> {
        let dz = self.dz();
        let x = z / dz;
        let n = x.round();
        (n >= 0.0 && (n as usize) < self.nz() && (x - n).abs() <= 1e-9 * x.abs().max(1.0))
            .then_some(n as usize)
    }
}

/// Cell sizes growing geometrically from `h0` by a ratio at most `q_max`,
/// using the fewest cells that can fill `length`, rescaled to sum exactly.
fn graded_cells(h0: f64, length: f64, q_max: f64) -> Vec<f64> {
    let fill = |q: f64, n: usize| {
        if q == 1.0 {
            h0 * n as f64
        } else {
            h0 * (q.powi(n as i32) - 1.0) / (q - 1.0)
        }
    };
    let mut n = 1usize;
    let q = loop {
        if h0 * n as f64 >= length {
            break 1.0;
        }
        if fill(q_max, n) >= length {
            let (mut lo, mut hi) = (1.0, q_max);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if fill(mid, n) < length {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            break 0.5 * (lo + hi);
        }
        n += 1;
    };
    let raw: Vec<f64> = (0..n).map(|i| h0 * q.powi(i as i32)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|h| h * length / total).collect()
}

fn transverse_coordinates(geom: &ChannelGeometry, options: &GridOptions) -> Vec<f64> {
    let d = geom.d();
    let h0 = options.interface_spacing * d;
    // interface outward / inward, smallest cells at the interface
    let air = graded_cells(h0, geom.air_extent(), options.air_grading);
    let fluid = graded_cells(h0, d / 2.0, options.fluid_grading);
    let mut lower: Vec<f64> = air.iter().rev().copied().collect();
    lower.extend(fluid.iter().copied());
    let mut sizes = lower.clone();
    sizes.extend(lower.iter().rev().copied());
    let parts = 1usize << options.refinement;
    let mut y = Vec::with_capacity(sizes.len() * parts + 1);
    let mut acc = -geom.half_height();
    y.push(acc);
    for h in sizes {
        for _ in 0..parts {
            acc += h / parts as f64;
            y.push(acc);
        }
    }
    // pin the symmetric ends and the axis exactly
    let last = y.len() - 1;
    y[last] = geom.half_height();
    y[last / 2] = 0.0;
    y
}

/// Builds the grid. Axial spacing aims at `target_pe` (capped at the
/// interface spacing when the flow is slow), then shrinks until both window
/// edges land on nodes.
pub fn build_grid(
    geom: &ChannelGeometry,
    params: &PhysicalParams,
    options: &GridOptions,
) -> Result<Grid2D> {
    options.validate()?;
    let len = geom.axial_length();
    let k = params.k();
    let cap = options.interface_spacing * geom.d();
    let target = if k > 0.0 {
        (2.0 * options.target_pe / k).min(cap)
    } else {
        cap
    };
    let (a, b) = geom.window();
    let aligned = |n: usize, x: f64| {
        let t = x / len * n as f64;
        (t - t.round()).abs() <= 1e-9 * t.max(1.0)
    };
    let mut n = (len / target).ceil().max(2.0) as usize;
    let limit = n * 1000 + 10_000;
    while !(aligned(n, a) && aligned(n, b)) {
        n += 1;
        if n > limit {
            return Err(Error::invalid(
                "window",
                "window edges cannot be aligned with a uniform axial grid",
            ));
        }
    }
    n <<= options.refinement;
    let z: Vec<f64> = (0..=n).map(|i| len * i as f64 / n as f64).collect();
    let grid = Grid2D {
        z,
        y: transverse_coordinates(geom, options),
        d: geom.d(),
    };
    debug_assert!(grid.max_element_peclet(params) < 1.0);
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(d: f64) -> ChannelGeometry {
        ChannelGeometry::with_window_fractions(d, 0.3, 0.5).unwrap()
    }

    #[test]
    fn graded_cells_fill_length_with_bounded_ratio() {
        for (h0, len, q) in [(0.01, 0.5, 1.3), (0.04, 2.0, 1.3), (0.02, 0.1, 1.2), (0.5, 0.4, 1.2)] {
            let c = graded_cells(h0, len, q);
            let total: f64 = c.iter().sum();
            assert!((total - len).abs() < 1e-12 * len);
            for w in c.windows(2) {
                assert!(w[1] / w[0] <= q + 1e-12 && w[1] >= w[0] * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn transverse_grid_is_symmetric_and_spans_the_channel() {
        let g = geom(0.2);
        let p = PhysicalParams::liquid_sodium(10.0).unwrap();
        let grid = build_grid(&g, &p, &GridOptions::default()).unwrap();
        let y = grid.y();
        assert_eq!(y[0], -g.half_height());
        assert_eq!(*y.last().unwrap(), g.half_height());
        for j in 0..y.len() {
            assert!((y[j] + y[y.len() - 1 - j]).abs() < 1e-12);
        }
        assert_eq!(y[grid.axis_index()], 0.0);
        // the interfaces are nodes
        assert!(y.iter().any(|v| (v - 0.1).abs() < 1e-12));
    }

    #[test]
    fn axial_spacing_meets_target_and_window_aligns() {
        let g = geom(0.2);
        let p = PhysicalParams::liquid_sodium(10.0).unwrap();
        let grid = build_grid(&g, &p, &GridOptions::default()).unwrap();
        assert!(grid.max_element_peclet(&p) <= 0.3 + 1e-12);
        let (a, b) = g.window();
        assert!(grid.axial_node_at(a).is_some());
        assert!(grid.axial_node_at(b).is_some());
        assert_eq!(*grid.z().last().unwrap(), g.axial_length());
    }

    #[test]
    fn refinement_halves_spacing_and_quadruples_elements() {
        let g = geom(0.1);
        let p = PhysicalParams::liquid_sodium(10.0).unwrap();
        let g0 = build_grid(&g, &p, &GridOptions::default()).unwrap();
        let g1 = build_grid(&g, &p, &GridOptions { refinement: 1, ..Default::default() }).unwrap();
        assert!((g1.dz() - g0.dz() / 2.0).abs() < 1e-15);
        assert_eq!(g1.n_elements(), 4 * g0.n_elements());
    }

    #[test]
    fn rejects_bad_options() {
        let g = geom(0.1);
        let p = PhysicalParams::liquid_sodium(10.0).unwrap();
        for pe in [0.0, 1.0, 1.5] {
            let o = GridOptions { target_pe: pe, ..Default::default() };
            assert!(build_grid(&g, &p, &o).is_err());
        }
        assert!(ChannelGeometry::new(0.1, 0.5, 0.3).is_err());
        assert!(ChannelGeometry::new(0.1, 0.3, 1.0).is_err());
    }

    #[test]
    fn zero_velocity_uses_the_cap() {
        let g = geom(0.1);
        let p = PhysicalParams::liquid_sodium(0.0).unwrap();
        let grid = build_grid(&g, &p, &GridOptions::default()).unwrap();
        assert!(grid.dz() <= 0.01 + 1e-15);
    }
}
