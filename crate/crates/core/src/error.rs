use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("position z = {z} lies outside the domain [0, {length}]")]
    OutOfDomain { z: f64, length: f64 },

    #[error("closed-form continuum solution needs u_z > 0 (k = mu*sigma*u_z is zero)")]
    DegenerateConvection,

    #[error("Pe = 1 makes the homogeneous root r = (-1-Pe)/(-1+Pe) undefined")]
    SingularPeclet,

    #[error("field edge `{edge}` at z = {position} is not aligned with a permitted mesh node (dz = {dz})")]
    MisalignedField {
        edge: &'static str,
        position: f64,
        dz: f64,
    },

    #[error("element order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: u8, found: u8 },

    #[error("mesh does not match the field: {0}")]
    MeshMismatch(String),

    #[error("singular pivot in banded elimination at row {row}")]
    SingularPivot { row: usize },

    #[error("boundary conditions have not been applied to the system")]
    MissingBoundaryConditions,

    #[error("solution residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {required} nodes, got {found}")]
    TooFewNodes { required: usize, found: usize },

    #[error("node {node} is outside 0..{count}")]
    NodeOutOfRange { node: usize, count: usize },

    #[error("degenerate element {element}: jacobian determinant {determinant}")]
    DegenerateElement { element: usize, determinant: f64 },

    #[error("2D solve did not reach relative residual {tolerance:e}; history {history:?}")]
    NotConverged { tolerance: f64, history: Vec<f64> },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
