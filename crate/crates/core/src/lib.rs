//! Semiclassical Bohmian trajectories in one-dimensional potential wells.
//!
//! The crate builds WKB approximate energy eigenstates, derives their
//! travelling-wave envelopes, and evaluates Bohmian velocity fields,
//! trajectories and Husimi phase-space densities. A Numerov shooting
//! solver supplies exact eigenstates for validation.

// `!(x > 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bohm;
pub mod eigensolver;
pub mod error;
pub mod field;
pub mod husimi;
pub mod interp;
pub mod quadrature;
pub mod well;
pub mod wkb;

pub use error::{Error, Flag, Flagged, Result};
pub use num_complex::Complex64;
