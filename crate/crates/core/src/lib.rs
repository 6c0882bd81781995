//! Finite element solvers for the induced field of a conducting fluid
//! moving through a transverse magnetic field.
//!
//! The 1D model solves `-A'' + k A' = k B_x` for the induced vector
//! potential with linear or quadratic Galerkin elements, with the source
//! given either as flux density or as the applied vector potential. Closed
//! form difference-equation solutions, transfer-function analysis and a 2D
//! channel model sit alongside.

pub mod analytic;
pub mod banded;
pub mod continuum;
pub mod error;
pub mod fem1d;
pub mod fem2d;
pub mod field;
pub mod mesh;
pub mod physics;
pub mod solution;
pub mod ztrans;

pub use error::{Error, Result};
pub use fem1d::{InputMode, MagnetNodes, OscillationMetrics};
pub use field::AppliedField;
pub use mesh::{ElementOrder, Mesh1D};
pub use physics::PhysicalParams;
pub use solution::Solution1D;
