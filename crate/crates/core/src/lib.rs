// `!(x >= 0.0)` guards deliberately reject NaN along with negatives.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod checks;
pub mod collinearity;
pub mod designs;
pub mod generators;
pub mod geometry;
pub mod io;
pub mod lcc;
pub mod reductions;
pub mod selftest;
pub mod spectral;

pub use error::{Error, Result};
pub use geometry::{CMatrix, CVector, PointConfig, SpectrumSummary, Subspace, C64};
