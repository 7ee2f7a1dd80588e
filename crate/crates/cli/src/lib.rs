//! File formats, raster IO, and plotting for the grasp toolkit.
//!
//! Everything algorithmic lives in `graspkit-core`; this crate reads and
//! writes the on-disk artifacts (PNG rasters, annotation and calibration
//! text, trajectory CSV) and renders the joint-angle plot. The `graspkit`
//! binary wires these into the dataset-creation and grasp-execution
//! pipelines.

pub mod config;
pub mod formats;
pub mod plot;
