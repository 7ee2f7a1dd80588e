//! Grasp-rectangle geometry and rigid poses.
//!
//! A grasp is the 5-tuple `(x, y, theta, h, w)`: center pixel, orientation
//! from the image X-axis, gripper-plate side length `h` and opening side
//! length `w`. The corner-list form mirrors the Cornell annotation layout:
//! corners 1-2 and 3-4 are the gripper-plate edges, corners 2-3 and 4-1 run
//! along the opening direction `theta`.

use alloc::string::String;
use core::f64::consts::PI;
use core::fmt;

use nalgebra::{Matrix3, Matrix4, Point2, Vector2, Vector3};
#[allow(unused_imports)] // float math for no_std builds
use num_traits::Float;

use crate::angle::{wrap_to_half_pi, wrap_to_pi};

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryError {
    /// Rectangle sides must be strictly positive.
    NonPositiveExtent { h: f64, w: f64 },
    /// Corner list does not describe a usable quadrilateral (an edge shorter
    /// than 1e-9 or all four corners collinear).
    DegenerateRectangle { reason: String },
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::NonPositiveExtent { h, w } => {
                write!(f, "rectangle sides must be positive (h={h}, w={w})")
            }
            GeometryError::DegenerateRectangle { reason } => {
                write!(f, "degenerate rectangle: {reason}")
            }
        }
    }
}

impl core::error::Error for GeometryError {}

/// Five-parameter grasp rectangle `(x, y, theta, h, w)` in pixel units.
///
/// `theta` is kept in `(-pi, pi]`; for identity comparisons it is to be read
/// modulo pi since a rectangle is unchanged by a half turn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspRect5D {
    /// Center column.
    pub x: f64,
    /// Center row.
    pub y: f64,
    /// Orientation from the image X-axis, radians in `(-pi, pi]`.
    pub theta: f64,
    /// Gripper-plate side length (the green sides).
    pub h: f64,
    /// Opening side length (the yellow sides).
    pub w: f64,
}

impl GraspRect5D {
    /// Builds a rectangle, normalizing `theta` into `(-pi, pi]`.
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // the negation also rejects NaN
    pub fn new(x: f64, y: f64, theta: f64, h: f64, w: f64) -> Result<Self, GeometryError> {
        if !(h > 0.0) || !(w > 0.0) {
            return Err(GeometryError::NonPositiveExtent { h, w });
        }
        Ok(GraspRect5D { x, y, theta: wrap_to_pi(theta), h, w })
    }

    /// Orientation reduced to `(-pi/2, pi/2]`.
    pub fn theta_mod_pi(&self) -> f64 {
        wrap_to_half_pi(self.theta)
    }

    pub fn center(&self) -> Point2<f64> {
        Point2::new(self.x, self.y)
    }
}

/// Four real-valued corners of an oriented rectangle.
///
/// Corners 1-2 and 3-4 are the gripper-plate edges; the edge 2-3 direction
/// is the opening direction (theta modulo pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRectCorners {
    pub corners: [Point2<f64>; 4],
}

impl OrientedRectCorners {
    pub fn new(corners: [Point2<f64>; 4]) -> Self {
        OrientedRectCorners { corners }
    }

    /// Edge vector from corner `i` to corner `(i + 1) % 4`.
    pub fn edge(&self, i: usize) -> Vector2<f64> {
        self.corners[(i + 1) % 4] - self.corners[i]
    }

    /// Signed shoelace area (positive for counter-clockwise corner order in
    /// x-right / y-up axes).
    pub fn signed_area(&self) -> f64 {
        let c = &self.corners;
        let mut acc = 0.0;
        for i in 0..4 {
            let j = (i + 1) % 4;
            acc += c[i].x * c[j].y - c[j].x * c[i].y;
        }
        acc / 2.0
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }
}

/// Converts the 5-parameter form to corners.
///
/// Corner 1 sits at angle `theta + atan2(h, w)` from the center; the list
/// then proceeds so that plate edges occupy positions 1-2 and 3-4 (the
/// Cornell file convention).
pub fn rect5d_to_corners(r: &GraspRect5D) -> OrientedRectCorners {
    let (s, c) = (r.theta.sin(), r.theta.cos());
    let rot = |dx: f64, dy: f64| {
        Point2::new(r.x + dx * c - dy * s, r.y + dx * s + dy * c)
    };
    let hw = r.w / 2.0;
    let hh = r.h / 2.0;
    OrientedRectCorners::new([
        rot(hw, hh),
        rot(hw, -hh),
        rot(-hw, -hh),
        rot(-hw, hh),
    ])
}

/// Recovers the 5-parameter form from corners.
///
/// Center is the corner mean, `h`/`w` the mean plate/opening edge lengths,
/// and `theta` the edge 2-3 direction reduced modulo pi. Tolerates imperfect
/// (noisy) rectangles; exact rectangles round-trip within 1e-9.
pub fn corners_to_rect5d(c: &OrientedRectCorners) -> Result<GraspRect5D, GeometryError> {
    let edges: [Vector2<f64>; 4] = [c.edge(0), c.edge(1), c.edge(2), c.edge(3)];
    for (i, e) in edges.iter().enumerate() {
        if e.norm() < 1e-9 {
            return Err(GeometryError::DegenerateRectangle {
                reason: alloc::format!("edge {} shorter than 1e-9", i + 1),
            });
        }
    }
    if c.area() < 1e-9 {
        return Err(GeometryError::DegenerateRectangle {
            reason: String::from("corners are collinear"),
        });
    }
    let center = {
        let mut acc = Vector2::zeros();
        for p in &c.corners {
            acc += p.coords;
        }
        acc / 4.0
    };
    let h = (edges[0].norm() + edges[2].norm()) / 2.0;
    let w = (edges[1].norm() + edges[3].norm()) / 2.0;
    let theta = wrap_to_half_pi(edges[1].y.atan2(edges[1].x));
    GraspRect5D::new(center.x, center.y, theta, h, w)
}

/// Rigid pose as a homogeneous 4x4 transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose6D {
    matrix: Matrix4<f64>,
}

impl Pose6D {
    pub fn identity() -> Self {
        Pose6D { matrix: Matrix4::identity() }
    }

    /// Builds from a rotation block and translation; the last row is exact.
    pub fn from_parts(rotation: &Matrix3<f64>, translation: &Vector3<f64>) -> Self {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(translation);
        Pose6D { matrix: m }
    }

    pub fn from_translation(t: Vector3<f64>) -> Self {
        Pose6D::from_parts(&Matrix3::identity(), &t)
    }

    pub fn rotation_x(angle: f64) -> Self {
        let (s, c) = (angle.sin(), angle.cos());
        Pose6D::from_parts(
            &Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c),
            &Vector3::zeros(),
        )
    }

    pub fn rotation_y(angle: f64) -> Self {
        let (s, c) = (angle.sin(), angle.cos());
        Pose6D::from_parts(
            &Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c),
            &Vector3::zeros(),
        )
    }

    pub fn rotation_z(angle: f64) -> Self {
        let (s, c) = (angle.sin(), angle.cos());
        Pose6D::from_parts(
            &Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
            &Vector3::zeros(),
        )
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }

    pub fn rotation(&self) -> Matrix3<f64> {
        self.matrix.fixed_view::<3, 3>(0, 0).into_owned()
    }

    pub fn translation(&self) -> Vector3<f64> {
        self.matrix.fixed_view::<3, 1>(0, 3).into_owned()
    }

    /// Applies the pose to a point.
    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation() * p + self.translation()
    }

    /// Maximum deviation of the rotation block from orthonormality.
    pub fn orthonormality_error(&self) -> f64 {
        let r = self.rotation();
        let gram = r.transpose() * r - Matrix3::identity();
        gram.iter().fold(0.0_f64, |m, &x| m.max(x.abs()))
    }

    /// True when the rotation block is orthonormal and proper within `tol`
    /// and the bottom row is exactly `(0, 0, 0, 1)`.
    pub fn is_rigid(&self, tol: f64) -> bool {
        let bottom_ok = self.matrix.row(3) == Matrix4::identity().row(3);
        bottom_ok
            && self.orthonormality_error() <= tol
            && (self.rotation().determinant() - 1.0).abs() <= tol
    }
}

impl core::ops::Mul for Pose6D {
    type Output = Pose6D;

    fn mul(self, rhs: Pose6D) -> Pose6D {
        Pose6D { matrix: self.matrix * rhs.matrix }
    }
}

impl core::ops::Mul for &Pose6D {
    type Output = Pose6D;

    fn mul(self, rhs: &Pose6D) -> Pose6D {
        Pose6D { matrix: self.matrix * rhs.matrix }
    }
}

/// Angle between two adjacent edge directions minus a right angle; used by
/// tests to state the perpendicularity invariant.
pub fn corner_orthogonality_error(c: &OrientedRectCorners) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..4 {
        let a = c.edge(i);
        let b = c.edge((i + 1) % 4);
        let cos = a.dot(&b) / (a.norm() * b.norm());
        worst = worst.max((cos.clamp(-1.0, 1.0).acos() - PI / 2.0).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // Independent oracle: rotate the four canonical corners with an explicit
    // 2x2 rotation matrix and add the center offset.
    fn corner_oracle(r: &GraspRect5D) -> [[f64; 2]; 4] {
        let m = [[r.theta.cos(), -r.theta.sin()], [r.theta.sin(), r.theta.cos()]];
        let locals = [
            [r.w / 2.0, r.h / 2.0],
            [r.w / 2.0, -r.h / 2.0],
            [-r.w / 2.0, -r.h / 2.0],
            [-r.w / 2.0, r.h / 2.0],
        ];
        locals.map(|[dx, dy]| {
            [
                r.x + m[0][0] * dx + m[0][1] * dy,
                r.y + m[1][0] * dx + m[1][1] * dy,
            ]
        })
    }

    fn same_corner_set(got: &OrientedRectCorners, expected: &[[f64; 2]; 4], tol: f64) {
        for e in expected {
            assert!(
                got.corners
                    .iter()
                    .any(|c| (c.x - e[0]).abs() < tol && (c.y - e[1]).abs() < tol),
                "missing corner {e:?} in {got:?}"
            );
        }
    }

    #[test]
    fn axis_aligned_corners() {
        let r = GraspRect5D::new(0.0, 0.0, 0.0, 2.0, 4.0).unwrap();
        let c = rect5d_to_corners(&r);
        same_corner_set(&c, &[[2.0, 1.0], [-2.0, 1.0], [-2.0, -1.0], [2.0, -1.0]], 1e-12);
        // Plate edges must sit at positions 1-2 and 3-4.
        assert_relative_eq!(c.edge(0).norm(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(c.edge(2).norm(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(c.edge(1).norm(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn quarter_turn_swaps_roles() {
        let r = GraspRect5D::new(5.0, 5.0, PI / 2.0, 2.0, 4.0).unwrap();
        let c = rect5d_to_corners(&r);
        same_corner_set(&c, &[[4.0, 7.0], [4.0, 3.0], [6.0, 3.0], [6.0, 7.0]], 1e-12);
    }

    #[test]
    fn corners_match_rotation_oracle() {
        let r = GraspRect5D::new(3.5, 2.0, 0.3, 10.0, 20.0).unwrap();
        let c = rect5d_to_corners(&r);
        let expected = corner_oracle(&r);
        for (got, want) in c.corners.iter().zip(expected.iter()) {
            assert_relative_eq!(got.x, want[0], epsilon = 1e-12);
            assert_relative_eq!(got.y, want[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn corner_round_trip_axis_aligned() {
        let r = GraspRect5D::new(0.0, 0.0, 0.0, 2.0, 4.0).unwrap();
        let back = corners_to_rect5d(&rect5d_to_corners(&r)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn noisy_corners_keep_center_close() {
        // Averaging bound: independent noise of at most 0.5 px per coordinate
        // moves the corner mean by at most 0.5 px.
        let r = GraspRect5D::new(50.0, 40.0, 0.7, 12.0, 24.0).unwrap();
        let mut c = rect5d_to_corners(&r);
        let noise = [[0.5, -0.5], [-0.5, 0.5], [0.5, 0.5], [-0.5, -0.5]];
        for (p, n) in c.corners.iter_mut().zip(noise.iter()) {
            p.x += n[0];
            p.y += n[1];
        }
        let back = corners_to_rect5d(&c).unwrap();
        assert!((back.x - r.x).abs() <= 0.5 + 1e-12);
        assert!((back.y - r.y).abs() <= 0.5 + 1e-12);
    }

    #[test]
    fn collinear_corners_are_degenerate() {
        let c = OrientedRectCorners::new([
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(3.0, 0.0),
        ]);
        assert!(matches!(
            corners_to_rect5d(&c),
            Err(GeometryError::DegenerateRectangle { .. })
        ));
    }

    #[test]
    fn short_edge_is_degenerate() {
        let c = OrientedRectCorners::new([
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1e-12),
            Point2::new(4.0, 0.0),
            Point2::new(4.0, 1.0),
        ]);
        assert!(matches!(
            corners_to_rect5d(&c),
            Err(GeometryError::DegenerateRectangle { .. })
        ));
    }

    #[test]
    fn zero_sides_rejected() {
        assert!(GraspRect5D::new(0.0, 0.0, 0.0, 0.0, 4.0).is_err());
        assert!(GraspRect5D::new(0.0, 0.0, 0.0, 2.0, -1.0).is_err());
    }

    #[test]
    fn pose_composition_and_parts() {
        let p = Pose6D::rotation_z(0.5) * Pose6D::from_translation(Vector3::new(1.0, 2.0, 3.0));
        assert!(p.is_rigid(1e-12));
        let moved = p.transform_point(&Vector3::zeros());
        assert_relative_eq!(moved.x, 0.5_f64.cos() - 2.0 * 0.5_f64.sin(), epsilon = 1e-12);
        assert_relative_eq!(moved.z, 3.0, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn round_trip_mod_pi(
            x in -100.0..100.0f64,
            y in -100.0..100.0f64,
            theta in (-PI / 2.0 + 1e-6)..(PI / 2.0),
            h in 0.5..50.0f64,
            w in 0.5..50.0f64,
        ) {
            let r = GraspRect5D::new(x, y, theta, h, w).unwrap();
            let back = corners_to_rect5d(&rect5d_to_corners(&r)).unwrap();
            prop_assert!((back.x - r.x).abs() < 1e-9);
            prop_assert!((back.y - r.y).abs() < 1e-9);
            prop_assert!((back.theta - r.theta).abs() < 1e-9);
            prop_assert!((back.h - r.h).abs() < 1e-9);
            prop_assert!((back.w - r.w).abs() < 1e-9);
        }

        #[test]
        fn converted_corners_are_perpendicular(
            theta in -PI..PI,
            h in 0.5..50.0f64,
            w in 0.5..50.0f64,
        ) {
            let r = GraspRect5D::new(0.0, 0.0, theta, h, w).unwrap();
            let c = rect5d_to_corners(&r);
            prop_assert!(corner_orthogonality_error(&c) < 1e-9);
        }
    }
}
