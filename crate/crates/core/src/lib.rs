//! Isometric dilations and functional models for commuting tuples of
//! contraction matrices.
//!
//! The crate decides whether a tuple `(T_1, ..., T_n)` dilates to commuting
//! isometries whose product is the minimal isometric dilation of
//! `T = T_1 ... T_n`, extracts the unitaries and projections that
//! parametrize such a dilation, builds the dilation exactly on finitely
//! supported vectors, and checks the functional model in the C·0 case.

pub mod dilation_build;
pub mod dilation_data;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod models;
pub mod random;
pub mod tuples;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, Tolerance, C64};
