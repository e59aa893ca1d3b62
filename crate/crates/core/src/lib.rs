#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classification;
pub mod cli;
pub mod curvature;
pub mod error;
pub mod extremal;
pub mod geometry;
pub mod grid;
pub mod profile;
pub mod pseudoconvexity;
pub mod sweep;

pub use num_complex::Complex64 as C64;
