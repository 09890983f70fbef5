//! Proposal-generation kernels for two-branch scene-text detection.
//!
//! Two proposal branches share one geometry layer:
//!
//! - the semantic branch builds per-pixel training targets from text polygons
//!   ([`raster`]), then rebuilds text instances from an erosion map and a
//!   per-pixel structuring-kernel map with a deformable dilation
//!   ([`morphsem`]);
//! - the geometric branch decodes anchor regressions in the midpoint-offset
//!   representation ([`anchors`], [`geometry::midpoint`]).
//!
//! [`features`] holds the forward passes of the interleaved feature attention
//! block and rotated RoI align, [`losses`] the training objectives with
//! analytic gradients, and [`evalkit`] the rotated-box evaluation harness.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs; file formats, threading and the command line live
//! in the `cpn` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod anchors;
mod error;
pub mod evalkit;
pub mod features;
pub mod geometry;
pub mod losses;
mod math;
pub mod morphsem;
pub mod raster;
pub mod sum;

pub use error::{Error, Result};
pub use geometry::{MidpointOffsetBox, Point2, Polygon, Proposal, ProposalSource, RotatedRect};
pub use raster::{BinaryMask, GridMap, LabelMap};
