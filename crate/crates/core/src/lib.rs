//! Tracking by paired detections.
//!
//! A detection is a pair of oriented boxes sharing one extent: one at the
//! end of a multi-sweep lidar buffer and one at the first sweep where the
//! object appears. The crate provides the geometry and data model for such
//! pairs, association likelihoods that need no motion model, ranked
//! assignment enumeration, a multi-hypothesis tracker, a scenario simulator,
//! CLEAR-MOT scoring and the sparse-grid machinery that maps objects onto
//! detector anchor cells.

pub mod assignment;
pub mod detection;
pub mod evaluation;
pub mod geometry;
pub mod io;
pub mod likelihood;
pub mod simulator;
pub mod sweep;
pub mod tracker;
