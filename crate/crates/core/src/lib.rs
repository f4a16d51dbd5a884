//! Congruence invariants, moduli coordinates and assembly criteria for
//! finite point sets in complex hyperbolic space, in the unit ball model.
//!
//! Indices in this API are zero-based; index 0 is the distinguished point.
//! Global labels used by the assembly schemes are one-based.

pub mod areas;
pub mod assembly;
pub mod ball;
pub mod error;
pub mod linalg;
pub mod moduli;
pub mod realhyp;
pub mod rkhs;
pub mod sampling;
pub mod selftest;
pub mod triangles;

pub use ball::{BallPoint, ComplexGeodesic, PointConfig};
pub use error::{Error, Result};
pub use linalg::{HermitianMatrix, Tolerance, C64};
pub use moduli::ModuliPoint;
pub use rkhs::GramSpec;
