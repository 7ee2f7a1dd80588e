//! Core algorithms for turning rectangle-tagged grasp images into robot
//! joint commands.
//!
//! The crate is organized as a pipeline plus a kinematics stack:
//!
//! 1. [`extraction`] — recover the pose (center, orientation) of a grasp
//!    rectangle drawn on an RGB image, by color collection and 2-means
//!    clustering of the gripper-plate edge pixels.
//! 2. [`translation`] — move the extracted rectangle to the object centroid
//!    computed from binary image moments, then refine to a fixed-size
//!    rectangle.
//! 3. [`dataset`] — Cornell-format annotation parsing, paired-image
//!    rendering, and rectangle-metric evaluation (Jaccard + angle test).
//! 4. [`camera`] — pinhole deprojection and a rigid camera-to-robot
//!    transform fitted from point correspondences.
//! 5. [`kinematics`] — modified-DH forward kinematics for a 7-DOF arm,
//!    geometric Jacobian, Newton-Raphson inverse pose solution, and
//!    resolved-rate trajectory generation sharing the same pseudoinverse.
//!
//! Everything operates on in-memory values; file IO, PNG codecs, and the
//! command-line front end live in the companion `graspkit` crate. The crate
//! is `no_std` (with `alloc`) so the algorithms can run on embedded
//! controllers as well as on the desktop tooling.
//!
//! ```
//! use graspkit_core::dataset::{rectangle_metric, render_paired_image};
//! use graspkit_core::extraction::extract_pose;
//! use graspkit_core::geometry::{rect5d_to_corners, GraspRect5D};
//! use graspkit_core::image::RgbImage;
//! use graspkit_core::translation::refine_rect;
//!
//! // Draw a grasp rectangle, recover its pose, and check the round trip
//! // with the rectangle metric.
//! let rect = GraspRect5D::new(128.0, 120.0, 0.4, 20.0, 80.0).unwrap();
//! let tagged =
//!     render_paired_image(&RgbImage::new(256, 256), &rect5d_to_corners(&rect), 3);
//! let pose = extract_pose(&tagged).unwrap();
//! let refined = refine_rect(&pose, 30.0, 60.0);
//! assert!(rectangle_metric(&refined, &rect5d_to_corners(&rect)).matched);
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub use nalgebra;

pub mod angle;
pub mod camera;
pub mod dataset;
pub mod extraction;
pub mod geometry;
pub mod image;
pub mod kinematics;
pub mod translation;

pub use camera::{CameraIntrinsics, DepthImage, RigidTransform, RobotGrasp};
pub use extraction::{ColorClass, ExtractedPose};
pub use geometry::{GraspRect5D, OrientedRectCorners, Pose6D};
pub use image::{BinaryMask, GrayImage, PixelCluster, RgbImage};
pub use kinematics::{DhRow, DhTable, JointVector, Trajectory};
