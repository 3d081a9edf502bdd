pub mod approximation;
pub mod error;
pub mod elements;
pub mod geometry;
pub mod harness;
pub mod quadrature;
pub mod verify;
mod util;

pub use error::{Error, Result};
pub use geometry::{Barycentric, Mesh, Point2, Triangle};
pub use approximation::{Element, LocalApproximant, PiecewiseField};
pub use elements::{ElementSpec, EnrichedElement, Functional, Matrix3};
