//! Exact verification of transfer operators, interaction groups and
//! transformation groupoids for semigroup actions on the binary full shift
//! and the rational circle.

pub mod cocycle;
pub mod convolution;
pub mod dynamics;
pub mod error;
pub mod groupoid;
pub mod lattice;
pub mod operators;
pub mod report;
pub mod scalar;
pub mod space;
pub mod suites;

pub use error::{Error, Result};
pub use cocycle::Cocycle;
pub use dynamics::{Action, Dictionary, Endo};
pub use lattice::{LatticeElement, LatticeGroup, MiniSquare};
pub use scalar::{Rational, Scalar};
pub use report::{Report, Sampling, Status};
pub use space::{CylinderFunction, CylinderSet, Point, Word};
