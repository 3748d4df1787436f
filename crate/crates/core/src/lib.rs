//! Lie and Noether point symmetries of the Klein-Gordon equation
//! `u_tt + eps (u_xx + u_yy + V u) = 0` on flat three-dimensional space,
//! checked with an exact symbolic kernel.

pub mod cli;
pub mod data;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod noether;
pub mod reduction;
pub mod report;
pub mod suites;
pub mod symmetry;
pub mod symkernel;

pub use error::{Error, Result};
