//! Annotation formats, paired-image rendering, and rectangle-metric
//! evaluation.
//!
//! The Cornell positive-rectangle text format is four `x y` lines per
//! rectangle; blocks containing non-finite values (the dataset ships some
//! NaN lines) are dropped and counted. Rendering draws the plate edges green
//! and the opening edges yellow, which is exactly what the extraction stage
//! expects back. A prediction counts as correct under the rectangle metric
//! when it overlaps some ground-truth rectangle with Jaccard index above
//! 0.25 and orientation within 30 degrees (modulo pi).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{Point2, Vector2};
#[allow(unused_imports)] // float math for no_std builds
use num_traits::Float;

use crate::angle::wrap_to_half_pi;
use crate::geometry::{rect5d_to_corners, GraspRect5D, OrientedRectCorners};
use crate::image::RgbImage;

/// Pure plate-edge green used by the renderer.
pub const PLATE_COLOR: [u8; 3] = [0, 255, 0];
/// Pure opening-edge yellow used by the renderer.
pub const OPENING_COLOR: [u8; 3] = [255, 255, 0];

/// Rectangle-metric thresholds.
pub const JACCARD_THRESHOLD: f64 = 0.25;
pub const ANGLE_THRESHOLD_RAD: f64 = core::f64::consts::PI / 6.0;

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetError {
    /// Structural problem in an annotation stream (1-based line number).
    MalformedFile { line: usize, reason: String },
    /// Predictions referenced image ids with no ground-truth record.
    MissingGroundTruth { ids: Vec<String> },
}

impl fmt::Display for DatasetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetError::MalformedFile { line, reason } => {
                write!(f, "malformed file at line {line}: {reason}")
            }
            DatasetError::MissingGroundTruth { ids } => {
                write!(f, "missing ground truth for ids: {}", ids.join(", "))
            }
        }
    }
}

impl core::error::Error for DatasetError {}

/// One Cornell image id with its positive rectangles.
#[derive(Debug, Clone, PartialEq)]
pub struct CornellRecord {
    pub id: String,
    pub rectangles: Vec<OrientedRectCorners>,
}

/// One generated annotation: image id plus the refined grasp.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationRecord {
    pub id: String,
    pub grasp: GraspRect5D,
}

/// Outcome of parsing a Cornell positive-rectangle stream.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRects {
    pub rects: Vec<OrientedRectCorners>,
    /// Number of 4-line blocks dropped because of non-finite values.
    pub skipped: usize,
}

/// Parses Cornell positive-rectangle text: whitespace-separated `x y` pairs,
/// four lines per rectangle. Blocks with NaN/inf coordinates are skipped and
/// counted; structural problems are errors.
pub fn parse_cornell_rects(text: &str) -> Result<ParsedRects, DatasetError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    if !lines.len().is_multiple_of(4) {
        return Err(DatasetError::MalformedFile {
            line: lines.last().map(|(n, _)| *n).unwrap_or(0),
            reason: format!("{} coordinate lines are not a multiple of 4", lines.len()),
        });
    }

    let mut parsed = ParsedRects { rects: Vec::new(), skipped: 0 };
    for block in lines.chunks_exact(4) {
        let mut corners = [Point2::origin(); 4];
        let mut finite = true;
        for (slot, &(line_no, line)) in corners.iter_mut().zip(block) {
            let mut tokens = line.split_whitespace();
            let (x, y) = match (tokens.next(), tokens.next(), tokens.next()) {
                (Some(x), Some(y), None) => (x, y),
                _ => {
                    return Err(DatasetError::MalformedFile {
                        line: line_no,
                        reason: "expected exactly two coordinates".to_string(),
                    })
                }
            };
            let parse = |tok: &str, line_no: usize| {
                tok.parse::<f64>().map_err(|_| DatasetError::MalformedFile {
                    line: line_no,
                    reason: format!("not a number: {tok:?}"),
                })
            };
            let p = Point2::new(parse(x, line_no)?, parse(y, line_no)?);
            finite &= p.x.is_finite() && p.y.is_finite();
            *slot = p;
        }
        if finite {
            parsed.rects.push(OrientedRectCorners::new(corners));
        } else {
            parsed.skipped += 1;
        }
    }
    Ok(parsed)
}

/// Draws a grasp rectangle onto a copy of the image: plate edges (corners
/// 1-2 and 3-4) in green, opening edges in pure yellow, Bresenham lines
/// thickened to `line_width`. Green is drawn last so the orientation-bearing
/// edges stay intact at shared corners. Pixels outside the image are
/// clipped, so a fully off-image rectangle is a no-op.
pub fn render_paired_image(
    img: &RgbImage,
    rect: &OrientedRectCorners,
    line_width: u32,
) -> RgbImage {
    let mut out = img.clone();
    let px = |p: Point2<f64>| (p.x.round() as i64, p.y.round() as i64);
    let c: Vec<(i64, i64)> = rect.corners.iter().map(|&p| px(p)).collect();
    out.draw_thick_line(c[1], c[2], OPENING_COLOR, line_width);
    out.draw_thick_line(c[3], c[0], OPENING_COLOR, line_width);
    out.draw_thick_line(c[0], c[1], PLATE_COLOR, line_width);
    out.draw_thick_line(c[2], c[3], PLATE_COLOR, line_width);
    out
}

/// Formats annotations as `<id> <x> <y> <theta> <h> <w>` lines, theta in
/// radians, six decimal places.
pub fn format_annotations(records: &[AnnotationRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out += &format!(
            "{} {:.6} {:.6} {:.6} {:.6} {:.6}\n",
            r.id, r.grasp.x, r.grasp.y, r.grasp.theta, r.grasp.h, r.grasp.w
        );
    }
    out
}

/// Parses the annotation line format written by [`format_annotations`].
pub fn parse_annotations(text: &str) -> Result<Vec<AnnotationRecord>, DatasetError> {
    let mut records = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 6 {
            return Err(DatasetError::MalformedFile {
                line: line_no,
                reason: format!("expected 6 fields, found {}", tokens.len()),
            });
        }
        let mut nums = [0.0f64; 5];
        for (slot, tok) in nums.iter_mut().zip(&tokens[1..]) {
            *slot = tok.parse::<f64>().map_err(|_| DatasetError::MalformedFile {
                line: line_no,
                reason: format!("not a number: {tok:?}"),
            })?;
            if !slot.is_finite() {
                return Err(DatasetError::MalformedFile {
                    line: line_no,
                    reason: format!("non-finite field: {tok:?}"),
                });
            }
        }
        let grasp = GraspRect5D::new(nums[0], nums[1], nums[2], nums[3], nums[4]).map_err(
            |e| DatasetError::MalformedFile { line: line_no, reason: e.to_string() },
        )?;
        records.push(AnnotationRecord { id: tokens[0].to_string(), grasp });
    }
    Ok(records)
}

fn cross(o: Point2<f64>, a: Point2<f64>, b: Point2<f64>) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn polygon_area(points: &[Point2<f64>]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..points.len() {
        let j = (i + 1) % points.len();
        acc += points[i].x * points[j].y - points[j].x * points[i].y;
    }
    (acc / 2.0).abs()
}

fn ccw_corners(rect: &OrientedRectCorners) -> Vec<Point2<f64>> {
    let mut pts: Vec<Point2<f64>> = rect.corners.to_vec();
    if rect.signed_area() < 0.0 {
        pts.reverse();
    }
    pts
}

/// Sutherland-Hodgman clip of a convex subject polygon against a convex
/// counter-clockwise clip polygon. Points on a clip edge count as inside, so
/// clipping a polygon against itself returns it unchanged.
fn clip_convex(subject: &[Point2<f64>], clip: &[Point2<f64>]) -> Vec<Point2<f64>> {
    let mut output = subject.to_vec();
    for i in 0..clip.len() {
        if output.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % clip.len()];
        let input = core::mem::take(&mut output);
        for k in 0..input.len() {
            let p = input[k];
            let q = input[(k + 1) % input.len()];
            let p_in = cross(a, b, p) >= 0.0;
            let q_in = cross(a, b, q) >= 0.0;
            if p_in != q_in {
                let edge = b - a;
                let dir = q - p;
                let denom = dir.x * edge.y - dir.y * edge.x;
                // A segment running along the clip line can still straddle
                // it after rounding; its endpoints are kept by the q_in
                // branch, so it is safe to skip the (undefined) crossing.
                if denom != 0.0 {
                    let t = (((a.x - p.x) * edge.y - (a.y - p.y) * edge.x) / denom)
                        .clamp(0.0, 1.0);
                    output.push(p + dir * t);
                }
            }
            if q_in {
                output.push(q);
            }
        }
    }
    output
}

/// Intersection-over-union of two rectangles via exact convex polygon
/// clipping. Returns a ratio in `[0, 1]`; identical rectangles give exactly
/// 1.0 and disjoint ones exactly 0.0.
pub fn jaccard(a: &OrientedRectCorners, b: &OrientedRectCorners) -> f64 {
    let pa = ccw_corners(a);
    let pb = ccw_corners(b);
    let inter = polygon_area(&clip_convex(&pa, &pb));
    let area_a = polygon_area(&pa);
    let area_b = polygon_area(&pb);
    let union = area_a + area_b - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// Rectangle-metric verdict for one prediction against one ground-truth
/// rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectMetric {
    pub matched: bool,
    pub jaccard: f64,
    /// Orientation difference modulo pi, reported in `[0, pi/2]`.
    pub angle_diff: f64,
}

/// Applies the rectangle metric: matched iff Jaccard index exceeds 0.25 and
/// the orientations agree within 30 degrees modulo pi.
pub fn rectangle_metric(pred: &GraspRect5D, truth: &OrientedRectCorners) -> RectMetric {
    let j = jaccard(&rect5d_to_corners(pred), truth);
    let opening: Vector2<f64> = truth.corners[2] - truth.corners[1];
    let truth_theta = opening.y.atan2(opening.x);
    let angle_diff = wrap_to_half_pi(pred.theta - truth_theta).abs();
    RectMetric {
        matched: j > JACCARD_THRESHOLD && angle_diff < ANGLE_THRESHOLD_RAD,
        jaccard: j,
        angle_diff,
    }
}

/// Per-prediction evaluation outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalItem {
    pub id: String,
    pub matched: bool,
    pub best_jaccard: f64,
    pub best_angle_diff: f64,
}

/// Whole-run evaluation report.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub total: usize,
    pub successes: usize,
    pub accuracy: f64,
    /// Per-item results, sorted by id.
    pub items: Vec<EvalItem>,
}

impl EvalReport {
    /// One-line human-readable summary.
    pub fn summary(&self) -> String {
        format!(
            "evaluated {} prediction(s): {} matched ({:.2}%)",
            self.total,
            self.successes,
            self.accuracy * 100.0
        )
    }

    /// Machine-readable per-item results.
    pub fn per_item_csv(&self) -> String {
        let mut out = String::from("id,matched,jaccard,angle_diff\n");
        for item in &self.items {
            out += &format!(
                "{},{},{:.6},{:.6}\n",
                item.id, item.matched, item.best_jaccard, item.best_angle_diff
            );
        }
        out
    }
}

/// Scores predictions against ground truth. A prediction succeeds if the
/// rectangle metric matches any positive rectangle of its image. Every
/// prediction id must have a ground-truth record; all unmatched ids are
/// reported together.
pub fn evaluate(
    preds: &[AnnotationRecord],
    truths: &[CornellRecord],
) -> Result<EvalReport, DatasetError> {
    let by_id: BTreeMap<&str, &CornellRecord> =
        truths.iter().map(|t| (t.id.as_str(), t)).collect();

    let mut missing: Vec<String> = preds
        .iter()
        .filter(|p| !by_id.contains_key(p.id.as_str()))
        .map(|p| p.id.clone())
        .collect();
    if !missing.is_empty() {
        missing.sort();
        missing.dedup();
        return Err(DatasetError::MissingGroundTruth { ids: missing });
    }

    let mut items: Vec<EvalItem> = preds
        .iter()
        .map(|p| {
            let truth = by_id[p.id.as_str()];
            let mut best = RectMetric { matched: false, jaccard: 0.0, angle_diff: 0.0 };
            for rect in &truth.rectangles {
                let m = rectangle_metric(&p.grasp, rect);
                if (m.matched, m.jaccard) > (best.matched, best.jaccard) {
                    best = m;
                }
            }
            EvalItem {
                id: p.id.clone(),
                matched: best.matched,
                best_jaccard: best.jaccard,
                best_angle_diff: best.angle_diff,
            }
        })
        .collect();
    items.sort_by(|a, b| a.id.cmp(&b.id));

    let total = items.len();
    let successes = items.iter().filter(|i| i.matched).count();
    Ok(EvalReport {
        total,
        successes,
        accuracy: if total > 0 { successes as f64 / total as f64 } else { 0.0 },
        items,
    })
}
