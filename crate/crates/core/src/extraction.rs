//! Pose extraction from a rectangle-tagged image.
//!
//! The drawn rectangle carries its orientation in color: the two
//! gripper-plate edges are green, the two opening edges yellow. Collecting
//! the green pixels and splitting them with 2-means yields the two plate
//! edges; the line joining the cluster means runs parallel to the opening
//! sides, so its slope is the rectangle orientation and its midpoint the
//! rectangle center.

use alloc::vec::Vec;
use core::fmt;

use nalgebra::Point2;
#[allow(unused_imports)] // float math for no_std builds
use num_traits::Float;

use crate::angle::wrap_to_pi;
use crate::image::{PixelCluster, RgbImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractionError {
    /// No pixel matched the color class: there is no rectangle in the image.
    EmptyCluster,
    /// All collected pixels are identical (or fewer than two), so no two
    /// clusters can be formed.
    DegenerateCluster,
}

impl fmt::Display for ExtractionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtractionError::EmptyCluster => write!(f, "no pixels matched the color class"),
            ExtractionError::DegenerateCluster => {
                write!(f, "pixel cluster has fewer than two distinct points")
            }
        }
    }
}

impl core::error::Error for ExtractionError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorName {
    Green,
    Yellow,
}

/// Per-channel inclusive bounds classifying a pixel into a rectangle-edge
/// color. The green and yellow predicates are mutually exclusive (they
/// disagree on the red channel), so edge pixels are never double-counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColorClass {
    pub name: ColorName,
    pub r: (u8, u8),
    pub g: (u8, u8),
    pub b: (u8, u8),
}

impl ColorClass {
    /// Plate-edge green: strong green channel, weak red and blue. Exact on
    /// the renderer's pure `(0, 255, 0)` and tolerant on decoded PNG/JPEG.
    pub fn green() -> Self {
        ColorClass { name: ColorName::Green, r: (0, 100), g: (200, 255), b: (0, 100) }
    }

    /// Opening-edge yellow: strong red and green, weak blue.
    pub fn yellow() -> Self {
        ColorClass { name: ColorName::Yellow, r: (200, 255), g: (200, 255), b: (0, 100) }
    }

    pub fn matches(&self, [r, g, b]: [u8; 3]) -> bool {
        self.r.0 <= r && r <= self.r.1
            && self.g.0 <= g && g <= self.g.1
            && self.b.0 <= b && b <= self.b.1
    }
}

/// Pose recovered from a tagged image: rectangle center, orientation, the
/// two plate-edge midpoints and the pixel clusters they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedPose {
    /// Rectangle center, midpoint of `m1` and `m2`.
    pub center: Point2<f64>,
    /// Orientation `atan2(m1.y - m2.y, m1.x - m2.x)` in `(-pi, pi]`.
    pub theta: f64,
    /// Midpoint of the first plate edge (smaller x, ties by y).
    pub m1: Point2<f64>,
    /// Midpoint of the second plate edge.
    pub m2: Point2<f64>,
    /// Source pixels of each plate edge.
    pub plate_clusters: (PixelCluster, PixelCluster),
}

/// Collects every pixel whose channels satisfy the class predicate.
pub fn collect_color_pixels(
    img: &RgbImage,
    class: &ColorClass,
) -> Result<PixelCluster, ExtractionError> {
    let points: Vec<(u32, u32)> = img
        .enumerate()
        .filter(|&(_, _, px)| class.matches(px))
        .map(|(u, v, _)| (u, v))
        .collect();
    if points.is_empty() {
        return Err(ExtractionError::EmptyCluster);
    }
    Ok(PixelCluster::new(points))
}

/// Result of the k=2 Lloyd split: member clusters and their means, ordered
/// so `m1.x <= m2.x` (ties broken by y).
#[derive(Debug, Clone, PartialEq)]
pub struct KmeansSplit {
    pub c1: PixelCluster,
    pub m1: Point2<f64>,
    pub c2: PixelCluster,
    pub m2: Point2<f64>,
    pub iterations: usize,
}

const MAX_LLOYD_ITERATIONS: usize = 100;

fn dist2(p: (u32, u32), c: Point2<f64>) -> f64 {
    let dx = p.0 as f64 - c.x;
    let dy = p.1 as f64 - c.y;
    dx * dx + dy * dy
}

fn mean_point(points: &[(u32, u32)], members: &[bool], side: bool) -> Option<Point2<f64>> {
    let mut n = 0u64;
    let (mut su, mut sv) = (0.0, 0.0);
    for (p, &m) in points.iter().zip(members) {
        if m == side {
            su += p.0 as f64;
            sv += p.1 as f64;
            n += 1;
        }
    }
    if n == 0 {
        None
    } else {
        Some(Point2::new(su / n as f64, sv / n as f64))
    }
}

/// Deterministic centroid seeding: among the points attaining the bounding
/// box extremes, take the pair with the largest separation. The two plate
/// edges are the two farthest pixel groups, so Lloyd iteration converges in
/// one or two passes.
fn seed_centroids(points: &[(u32, u32)]) -> (Point2<f64>, Point2<f64>) {
    let mut candidates: [(u32, u32); 4] = [points[0]; 4];
    for &p in points {
        if p.0 < candidates[0].0 {
            candidates[0] = p;
        }
        if p.0 > candidates[1].0 {
            candidates[1] = p;
        }
        if p.1 < candidates[2].1 {
            candidates[2] = p;
        }
        if p.1 > candidates[3].1 {
            candidates[3] = p;
        }
    }
    let mut best = (candidates[0], candidates[1]);
    let mut best_d = -1.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let d = dist2(candidates[i], Point2::new(candidates[j].0 as f64, candidates[j].1 as f64));
            if d > best_d {
                best_d = d;
                best = (candidates[i], candidates[j]);
            }
        }
    }
    (
        Point2::new(best.0 .0 as f64, best.0 .1 as f64),
        Point2::new(best.1 .0 as f64, best.1 .1 as f64),
    )
}

/// Lloyd's algorithm with k = 2 run to convergence (assignment unchanged) or
/// 100 iterations.
///
/// Cluster storage order is canonical, so the split depends only on the
/// pixel set. The `seed` parameter is accepted for interface stability; the
/// deterministic extreme-pair initializer consumes no randomness.
pub fn kmeans2(cluster: &PixelCluster, _seed: u64) -> Result<KmeansSplit, ExtractionError> {
    let points = cluster.points();
    let first = *points.first().ok_or(ExtractionError::DegenerateCluster)?;
    if points.iter().all(|&p| p == first) {
        return Err(ExtractionError::DegenerateCluster);
    }

    let (mut c1, mut c2) = seed_centroids(points);
    let mut members: Vec<bool> = alloc::vec![false; points.len()];
    let mut iterations = 0;
    for it in 1..=MAX_LLOYD_ITERATIONS {
        iterations = it;
        let mut changed = false;
        for (i, &p) in points.iter().enumerate() {
            let side = dist2(p, c2) < dist2(p, c1);
            if members[i] != side {
                members[i] = side;
                changed = true;
            }
        }
        // Reseed an emptied centroid to the point farthest from the survivor.
        for side in [false, true] {
            if members.iter().all(|&m| m != side) {
                let survivor = if side { c1 } else { c2 };
                let far = points
                    .iter()
                    .enumerate()
                    .max_by(|(_, a), (_, b)| {
                        dist2(**a, survivor).partial_cmp(&dist2(**b, survivor)).unwrap()
                    })
                    .map(|(i, _)| i)
                    .unwrap();
                members[far] = side;
                changed = true;
            }
        }
        c1 = mean_point(points, &members, false).unwrap();
        c2 = mean_point(points, &members, true).unwrap();
        if !changed {
            break;
        }
    }

    let split = |side: bool| {
        PixelCluster::new(
            points
                .iter()
                .zip(&members)
                .filter(|(_, &m)| m == side)
                .map(|(&p, _)| p)
                .collect(),
        )
    };
    let (k1, k2) = (split(false), split(true));
    let ordered = c1.x < c2.x || (c1.x == c2.x && c1.y <= c2.y);
    if ordered {
        Ok(KmeansSplit { c1: k1, m1: c1, c2: k2, m2: c2, iterations })
    } else {
        Ok(KmeansSplit { c1: k2, m1: c2, c2: k1, m2: c1, iterations })
    }
}

/// Full pose extraction: collect green plate pixels, split them with
/// 2-means, and read center and orientation off the cluster means.
pub fn extract_pose(img: &RgbImage) -> Result<ExtractedPose, ExtractionError> {
    let green = collect_color_pixels(img, &ColorClass::green())?;
    let split = kmeans2(&green, 0)?;
    let (m1, m2) = (split.m1, split.m2);
    let theta = wrap_to_pi((m1.y - m2.y).atan2(m1.x - m2.x));
    Ok(ExtractedPose {
        center: Point2::new((m1.x + m2.x) / 2.0, (m1.y + m2.y) / 2.0),
        theta,
        m1,
        m2,
        plate_clusters: (split.c1, split.c2),
    })
}
