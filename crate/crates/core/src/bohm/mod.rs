//! Bohmian velocity fields, trajectory integration and ensemble checks.

mod ensemble;
mod integrate;
mod velocity;

pub use ensemble::*;
pub use integrate::*;
pub use velocity::*;
