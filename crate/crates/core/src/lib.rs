//! Damage detection and morphology identification for multi-legged robots
//! from body-orientation data.
//!
//! A recorded roll/pitch/yaw trace is screened by a sliding-window detector,
//! conditioned by a spectral peak filter, and compared against a surrogate
//! walking model evaluated for candidate morphologies. A genetic search (with
//! an exhaustive oracle for verification) finds the morphology whose
//! simulated orientation best matches the recording.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod config;
pub mod detector;
pub mod error;
pub mod identifier;
pub mod io;
pub mod morphology;
pub mod scenarios;
pub mod signal;
pub mod surrogate;
pub mod trajectory;

pub use error::{Error, Result};
pub use morphology::{MorphologyVector, RobotSpec};
pub use trajectory::{OrientationTrajectory, TimedRecord};
