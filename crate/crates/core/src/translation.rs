//! Pose translation: move an extracted grasp rectangle to the object
//! centroid obtained from binary image moments, then refine it to a
//! fixed-size rectangle.
//!
//! The centroid route assumes one solid object segmented from a plain
//! table; hollow or irregular shapes can put the centroid outside the
//! object, which is why callers may bypass translation entirely.

use core::fmt;

use nalgebra::{Point2, Vector2};
#[allow(unused_imports)] // float math for no_std builds
use num_traits::Float;

use crate::extraction::ExtractedPose;
use crate::geometry::GraspRect5D;
use crate::image::{BinaryMask, GrayImage, RgbImage};

/// Default refined plate-side length in pixels (for 256x256 inputs).
pub const DEFAULT_REFINED_H: f64 = 30.0;
/// Default refined opening-side length in pixels (for 256x256 inputs).
pub const DEFAULT_REFINED_W: f64 = 60.0;
/// Default binarization threshold.
pub const DEFAULT_BINARIZE_THRESHOLD: u8 = 127;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranslationError {
    /// The mask has no set bits, so no centroid exists.
    EmptyMask,
}

impl fmt::Display for TranslationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TranslationError::EmptyMask => write!(f, "mask is empty; no object segmented"),
        }
    }
}

impl core::error::Error for TranslationError {}

/// Raw binary image moments up to first order, kept as exact integer sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Moments {
    /// Set-pixel count.
    pub m00: u64,
    /// Column-weighted sum.
    pub m10: u64,
    /// Row-weighted sum.
    pub m01: u64,
}

/// Object centroid in pixels, `(m10 / m00, m01 / m00)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Centroid {
    pub x: f64,
    pub y: f64,
}

/// ITU-R 601 luma: `round(0.299 r + 0.587 g + 0.114 b)`.
pub fn to_gray(img: &RgbImage) -> GrayImage {
    let mut out = GrayImage::new(img.width(), img.height());
    for (u, v, [r, g, b]) in img.enumerate() {
        let y = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
        out.set(u, v, y.round().clamp(0.0, 255.0) as u8);
    }
    out
}

/// Thresholds a gray image: bit = (value > threshold) XOR invert.
pub fn binarize(gray: &GrayImage, threshold: u8, invert: bool) -> BinaryMask {
    let mut mask = BinaryMask::new(gray.width(), gray.height());
    for v in 0..gray.height() {
        for u in 0..gray.width() {
            mask.set(u, v, (gray.get(u, v) > threshold) != invert);
        }
    }
    mask
}

/// Otsu's threshold: maximizes the between-class variance of the gray
/// histogram. Returns 0 for a constant image.
pub fn otsu_threshold(gray: &GrayImage) -> u8 {
    let mut hist = [0u64; 256];
    for &v in gray.values() {
        hist[v as usize] += 1;
    }
    let total = gray.values().len() as f64;
    let total_sum: f64 = hist.iter().enumerate().map(|(i, &n)| i as f64 * n as f64).sum();

    let mut best_t = 0u8;
    let mut best_var = -1.0;
    let mut w0 = 0.0;
    let mut sum0 = 0.0;
    for (t, &count) in hist.iter().enumerate() {
        w0 += count as f64;
        sum0 += t as f64 * count as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let mu0 = sum0 / w0;
        let mu1 = (total_sum - sum0) / w1;
        let var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if var > best_var {
            best_var = var;
            best_t = t as u8;
        }
    }
    best_t
}

/// First-order moments of a binary mask: `m00 = sum(bit)`,
/// `m10 = sum(u bit)`, `m01 = sum(v bit)`.
pub fn compute_moments(mask: &BinaryMask) -> Moments {
    let mut m = Moments::default();
    for (u, v) in mask.set_coords() {
        m.m00 += 1;
        m.m10 += u as u64;
        m.m01 += v as u64;
    }
    m
}

/// Centroid of the set pixels; errors on an empty mask.
pub fn centroid(mask: &BinaryMask) -> Result<Centroid, TranslationError> {
    let m = compute_moments(mask);
    if m.m00 == 0 {
        return Err(TranslationError::EmptyMask);
    }
    Ok(Centroid { x: m.m10 as f64 / m.m00 as f64, y: m.m01 as f64 / m.m00 as f64 })
}

/// Moves the extracted pose so its center lands on the centroid; the
/// orientation is unchanged and the plate midpoints shift by the same
/// vector. The recorded plate clusters keep the source pixels.
pub fn translate_rect(pose: &ExtractedPose, c: &Centroid) -> ExtractedPose {
    let d = Vector2::new(c.x - pose.center.x, c.y - pose.center.y);
    ExtractedPose {
        center: Point2::new(c.x, c.y),
        theta: pose.theta,
        m1: pose.m1 + d,
        m2: pose.m2 + d,
        plate_clusters: pose.plate_clusters.clone(),
    }
}

/// Replaces the extracted rectangle's sides with fixed values, keeping
/// center and orientation. Side lengths carry no information downstream;
/// only `(x, y, theta)` reaches the robot controller.
pub fn refine_rect(pose: &ExtractedPose, h: f64, w: f64) -> GraspRect5D {
    GraspRect5D::new(pose.center.x, pose.center.y, pose.theta, h, w)
        .expect("refinement sizes must be positive")
}
