// Negated comparisons are deliberate: NaN inputs must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod geodesic;
pub mod grasp;
pub mod integrators;
pub mod kinematics;
pub mod mesh;
pub mod se3;

pub use error::{Error, Result};
