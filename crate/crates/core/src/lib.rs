//! Markerless monocular 3D position tracking built on ray-casting estimators.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every pure part of the
//! system: the per-frame pixel pipeline, the object projection estimators, the
//! tracking state machine and the deterministic scene generator used as ground
//! truth. IO, file formats and the command line live in the `sltk` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod error;
pub mod geometry;
pub mod image;
pub mod pipeline;
pub mod raycast;
pub mod scene;
pub mod tracking;

pub use error::{Error, Result};
pub use geometry::Point;
pub use image::{DiffImage, EdgeImage, Frame, GrayImage, Rgb};
pub use pipeline::{Pipeline, PipelineConfig, Preprocessed};
pub use raycast::{EstimatorConfig, ProjectionEstimate};
pub use tracking::{Coord3D, Mode, StepReport, Tracker, TrackerConfig};
