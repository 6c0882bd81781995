use crate::error::{Error, Result};

/// Relative tolerance for deciding that a coordinate falls on a node.
const ALIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementOrder {
    Linear,
    Quadratic,
}

impl ElementOrder {
    pub fn degree(self) -> u8 {
        match self {
            ElementOrder::Linear => 1,
            ElementOrder::Quadratic => 2,
        }
    }

    pub fn from_degree(degree: u8) -> Result<Self> {
        match degree {
            1 => Ok(ElementOrder::Linear),
            2 => Ok(ElementOrder::Quadratic),
            other => Err(Error::invalid(
                "order",
                format!("element order must be 1 or 2, got {other}"),
            )),
        }
    }

    /// Nodes spanned by one element, minus one.
    pub fn nodes_per_element_step(self) -> usize {
        self.degree() as usize
    }
}

/// Uniform 1D mesh; node `n` sits at `z = n * dz`.
///
/// For quadratic elements `dz` is the node spacing, so each element spans
/// `2 * dz` and carries a mid-edge node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh1D {
    dz: f64,
    n_nodes: usize,
    order: ElementOrder,
}

impl Mesh1D {
    pub fn new(dz: f64, n_nodes: usize, order: ElementOrder) -> Result<Self> {
        if !(dz.is_finite() && dz > 0.0) {
            return Err(Error::invalid("dz", format!("must be finite and > 0, got {dz}")));
        }
        if n_nodes < 3 {
            return Err(Error::TooFewNodes {
                required: 3,
                found: n_nodes,
            });
        }
        if order == ElementOrder::Quadratic && !(n_nodes - 1).is_multiple_of(2) {
            return Err(Error::invalid(
                "n_nodes",
                format!("quadratic mesh needs an even number of intervals, got {}", n_nodes - 1),
            ));
        }
        Ok(Self { dz, n_nodes, order })
    }

    /// Mesh covering `[0, length]` with spacing `dz`; `length / dz` must be integral.
    pub fn covering(length: f64, dz: f64, order: ElementOrder) -> Result<Self> {
        if !(dz.is_finite() && dz > 0.0) {
            return Err(Error::invalid("dz", format!("must be finite and > 0, got {dz}")));
        }
        let intervals = length / dz;
        let rounded = intervals.round();
        if (intervals - rounded).abs() > ALIGN_TOL * intervals.max(1.0) {
            return Err(Error::MeshMismatch(format!(
                "length {length} is not a whole number of spacings {dz}"
            )));
        }
        Self::new(dz, rounded as usize + 1, order)
    }

    pub fn dz(&self) -> f64 {
        self.dz
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn order(&self) -> ElementOrder {
        self.order
    }

    pub fn n_elements(&self) -> usize {
        (self.n_nodes - 1) / self.order.nodes_per_element_step()
    }

    pub fn length(&self) -> f64 {
        (self.n_nodes - 1) as f64 * self.dz
    }

    pub fn z(&self, node: usize) -> f64 {
        node as f64 * self.dz
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n_nodes).map(|n| self.z(n)).collect()
    }

    /// Index of the node at `z`, if `z` is on the mesh.
    pub fn node_at(&self, z: f64) -> Option<usize> {
        let x = z / self.dz;
        let n = x.round();
        if n < 0.0 || n as usize >= self.n_nodes {
            return None;
        }
        ((x - n).abs() <= ALIGN_TOL * x.abs().max(1.0)).then_some(n as usize)
    }

    /// Index of the node at `z`, restricted to element vertices for quadratic meshes.
    pub fn vertex_at(&self, z: f64) -> Option<usize> {
        let n = self.node_at(z)?;
        (n % self.order.nodes_per_element_step() == 0).then_some(n)
    }
}
