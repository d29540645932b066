//! Networks of coupled quadratic maps: orbit iteration, escape-time rendering
//! of their Mandelbrot- and Julia-type sets, and topological measurements of
//! the rendered sets.

pub mod error;
pub mod harness;
pub mod network;
pub mod oracle;
pub mod render;
pub mod topology;

pub use error::{Error, Result};
