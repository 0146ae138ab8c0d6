//! Quantifies the tilt perceived in Cafe Wall patterns.
//!
//! Pipeline: [`stimulus`] renders the pattern and foveal crops, [`dog`]
//! filters them with a multiscale Difference-of-Gaussians retinal model and
//! binarises the responses, [`hough`] extracts long straight segments, and
//! [`analysis`] buckets them around H, V, D1 and D2 to report per-scale tilt.
//! [`experiments`] runs the crop-sample and whole-pattern studies end to end.

pub mod analysis;
pub mod cli;
pub mod dog;
pub mod error;
pub mod experiments;
pub mod hough;
pub mod io;
pub mod raster;
pub mod render;
pub mod stimulus;

pub use error::{Error, Result};
pub use raster::{BinaryMap, GrayImage, ResponseMap};
