//! Image-to-robot frame mapping.
//!
//! Two transforms compose: pinhole deprojection with camera intrinsics takes
//! pixel coordinates plus depth into the camera frame, and a rigid transform
//! fitted from recorded correspondences takes camera points into the robot
//! base frame. The fit is the closed-form SVD least-squares solution
//! (Kabsch/Umeyama, unit scale).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{Matrix3, Vector3};
#[allow(unused_imports)] // float math for no_std builds
use num_traits::Float;

use crate::angle::wrap_to_pi;
use crate::geometry::{GraspRect5D, Pose6D};

#[derive(Debug, Clone, PartialEq)]
pub enum CameraError {
    /// Depth sample is zero (sensor hole) or no valid depth in the window.
    InvalidDepth,
    /// Pixel coordinates outside the depth image.
    OutOfBounds { u: i64, v: i64 },
    /// Correspondence points are collinear: rotation is unobservable.
    DegenerateConfiguration,
    /// Camera and robot point lists differ in length.
    LengthMismatch { camera: usize, robot: usize },
    /// Focal lengths must be positive.
    InvalidIntrinsics,
    /// Parse problem in a config or correspondence stream.
    MalformedConfig { line: usize, reason: String },
}

impl fmt::Display for CameraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CameraError::InvalidDepth => write!(f, "no valid depth at the requested pixel"),
            CameraError::OutOfBounds { u, v } => write!(f, "pixel ({u}, {v}) out of bounds"),
            CameraError::DegenerateConfiguration => {
                write!(f, "correspondence points are collinear")
            }
            CameraError::LengthMismatch { camera, robot } => {
                write!(f, "{camera} camera points vs {robot} robot points")
            }
            CameraError::InvalidIntrinsics => write!(f, "focal lengths must be positive"),
            CameraError::MalformedConfig { line, reason } => {
                write!(f, "malformed config at line {line}: {reason}")
            }
        }
    }
}

impl core::error::Error for CameraError {}

/// Pinhole intrinsics: focal lengths and principal point in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl CameraIntrinsics {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // the negation also rejects NaN
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64) -> Result<Self, CameraError> {
        if !(fx > 0.0) || !(fy > 0.0) {
            return Err(CameraError::InvalidIntrinsics);
        }
        Ok(CameraIntrinsics { fx, fy, cx, cy })
    }

    /// The K matrix mapping camera points to scaled pixel coordinates.
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(self.fx, 0.0, self.cx, 0.0, self.fy, self.cy, 0.0, 0.0, 1.0)
    }
}

/// Parses the key-value intrinsics format: `fx=`, `fy=`, `cx=`, `cy=` lines.
pub fn parse_intrinsics(text: &str) -> Result<CameraIntrinsics, CameraError> {
    let (mut fx, mut fy, mut cx, mut cy) = (None, None, None, None);
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| CameraError::MalformedConfig {
            line: line_no,
            reason: "expected key=value".to_string(),
        })?;
        let value: f64 =
            value.trim().parse().map_err(|_| CameraError::MalformedConfig {
                line: line_no,
                reason: format!("not a number: {:?}", value.trim()),
            })?;
        match key.trim() {
            "fx" => fx = Some(value),
            "fy" => fy = Some(value),
            "cx" => cx = Some(value),
            "cy" => cy = Some(value),
            other => {
                return Err(CameraError::MalformedConfig {
                    line: line_no,
                    reason: format!("unknown key {other:?}"),
                })
            }
        }
    }
    match (fx, fy, cx, cy) {
        (Some(fx), Some(fy), Some(cx), Some(cy)) => CameraIntrinsics::new(fx, fy, cx, cy),
        _ => Err(CameraError::MalformedConfig {
            line: 0,
            reason: "missing one of fx, fy, cx, cy".to_string(),
        }),
    }
}

/// Per-pixel depth in meters; 0 marks an invalid sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthImage {
    width: u32,
    height: u32,
    depth: Vec<f64>,
}

impl DepthImage {
    /// Constant-depth image, mainly for synthetic scenes.
    pub fn constant(width: u32, height: u32, depth_m: f64) -> Self {
        assert!(width > 0 && height > 0, "depth dimensions must be non-zero");
        assert!(depth_m >= 0.0, "depth must be non-negative");
        DepthImage { width, height, depth: alloc::vec![depth_m; (width * height) as usize] }
    }

    /// Wraps a row-major depth buffer; samples must be non-negative (0 means
    /// invalid) and the length must match the dimensions.
    pub fn from_meters(width: u32, height: u32, depth: Vec<f64>) -> Option<Self> {
        if width == 0 || height == 0 || depth.len() != (width as usize * height as usize) {
            return None;
        }
        if depth.iter().any(|d| d.is_nan() || *d < 0.0) {
            return None;
        }
        Some(DepthImage { width, height, depth })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, u: u32, v: u32) -> f64 {
        self.depth[v as usize * self.width as usize + u as usize]
    }

    pub fn set(&mut self, u: u32, v: u32, meters: f64) {
        self.depth[v as usize * self.width as usize + u as usize] = meters;
    }

    pub fn data(&self) -> &[f64] {
        &self.depth
    }

    /// Median of the valid depths in the `window x window` neighborhood of
    /// `(u, v)`, tolerating sensor holes. `None` when every sample is 0.
    pub fn median_window(&self, u: i64, v: i64, window: u32) -> Option<f64> {
        let half = window as i64 / 2;
        let mut samples: Vec<f64> = Vec::new();
        for dv in -half..=half {
            for du in -half..=half {
                let (uu, vv) = (u + du, v + dv);
                if uu >= 0 && vv >= 0 && uu < self.width as i64 && vv < self.height as i64 {
                    let d = self.get(uu as u32, vv as u32);
                    if d > 0.0 {
                        samples.push(d);
                    }
                }
            }
        }
        if samples.is_empty() {
            return None;
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = samples.len();
        Some(if n % 2 == 1 {
            samples[n / 2]
        } else {
            (samples[n / 2 - 1] + samples[n / 2]) / 2.0
        })
    }
}

/// Deprojects real-valued pixel coordinates with a known depth:
/// `x = (u - cx) / fx * d`, `y = (v - cy) / fy * d`, `z = d`.
pub fn deproject_with_depth(u: f64, v: f64, d: f64, k: &CameraIntrinsics) -> Vector3<f64> {
    Vector3::new((u - k.cx) / k.fx * d, (v - k.cy) / k.fy * d, d)
}

/// Deprojects an integer pixel by looking up its depth sample. Errors on a
/// zero (invalid) depth or out-of-bounds pixel.
pub fn deproject(
    u: u32,
    v: u32,
    depth: &DepthImage,
    k: &CameraIntrinsics,
) -> Result<Vector3<f64>, CameraError> {
    if u >= depth.width() || v >= depth.height() {
        return Err(CameraError::OutOfBounds { u: u as i64, v: v as i64 });
    }
    let d = depth.get(u, v);
    if d <= 0.0 {
        return Err(CameraError::InvalidDepth);
    }
    Ok(deproject_with_depth(u as f64, v as f64, d, k))
}

/// Forward pinhole projection; `None` when the point is not in front of the
/// camera.
pub fn project(p: &Vector3<f64>, k: &CameraIntrinsics) -> Option<(f64, f64)> {
    if p.z <= 0.0 {
        return None;
    }
    Some((p.x / p.z * k.fx + k.cx, p.y / p.z * k.fy + k.cy))
}

/// Rotation plus translation mapping camera-frame points into the robot
/// base frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl RigidTransform {
    pub fn identity() -> Self {
        RigidTransform { rotation: Matrix3::identity(), translation: Vector3::zeros() }
    }

    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        RigidTransform { rotation, translation }
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// `self` after `other`: `(self * other)(p) = self(other(p))`.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidTransform {
        let rt = self.rotation.transpose();
        RigidTransform { rotation: rt, translation: -(rt * self.translation) }
    }

    /// Rotation about the base z-axis carried by this transform.
    pub fn z_angle(&self) -> f64 {
        self.rotation[(1, 0)].atan2(self.rotation[(0, 0)])
    }

    pub fn to_pose(&self) -> Pose6D {
        Pose6D::from_parts(&self.rotation, &self.translation)
    }

    /// Orthonormality within `tol` and determinant +1 within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        let gram = self.rotation.transpose() * self.rotation - Matrix3::identity();
        let err = gram.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
        err <= tol && (self.rotation.determinant() - 1.0).abs() <= tol
    }
}

/// Result of the least-squares rigid fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidFit {
    pub transform: RigidTransform,
    /// Root-mean-square residual of `R c + t - r` over the correspondences.
    pub rms_residual: f64,
}

/// Least-squares rigid fit (rotation + translation, no scale) minimizing
/// `sum |R c_i + t - r_i|^2` over at least three non-collinear
/// correspondences.
pub fn fit_rigid_transform(
    camera_points: &[Vector3<f64>],
    robot_points: &[Vector3<f64>],
) -> Result<RigidFit, CameraError> {
    if camera_points.len() != robot_points.len() {
        return Err(CameraError::LengthMismatch {
            camera: camera_points.len(),
            robot: robot_points.len(),
        });
    }
    let n = camera_points.len();
    if n < 3 {
        return Err(CameraError::DegenerateConfiguration);
    }
    let nf = n as f64;
    let c_mean = camera_points.iter().sum::<Vector3<f64>>() / nf;
    let r_mean = robot_points.iter().sum::<Vector3<f64>>() / nf;

    let mut h = Matrix3::zeros();
    for (c, r) in camera_points.iter().zip(robot_points) {
        h += (c - c_mean) * (r - r_mean).transpose();
    }

    let svd = h.svd(true, true);
    let sigma = svd.singular_values;
    // Collinear camera points collapse the cross-covariance to rank one and
    // leave the rotation about the line unobservable.
    if sigma[1] <= 1e-9 * sigma[0].max(1e-300) {
        return Err(CameraError::DegenerateConfiguration);
    }
    let u = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    let v = v_t.transpose();
    let det = (v * u.transpose()).determinant();
    let d = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, if det < 0.0 { -1.0 } else { 1.0 }));
    let rotation = v * d * u.transpose();
    let translation = r_mean - rotation * c_mean;
    let transform = RigidTransform::new(rotation, translation);

    let ss: f64 = camera_points
        .iter()
        .zip(robot_points)
        .map(|(c, r)| (transform.apply(c) - r).norm_squared())
        .sum();
    Ok(RigidFit { transform, rms_residual: (ss / nf).sqrt() })
}

/// Grasp pose expressed in the robot base frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotGrasp {
    pub position: Vector3<f64>,
    /// Gripper rotation about the base vertical axis, `(-pi, pi]`.
    pub yaw: f64,
}

/// Window used when sampling depth at the rectangle center.
pub const DEPTH_SAMPLE_WINDOW: u32 = 5;

/// Maps an image-space grasp into the robot frame: deproject the rectangle
/// center at the median depth of its 5x5 neighborhood, apply the rigid
/// camera-to-robot transform, and carry theta into gripper yaw through the
/// transform's z-rotation (the camera is assumed parallel to the table after
/// the fit).
pub fn map_grasp_to_robot(
    grasp: &GraspRect5D,
    depth: &DepthImage,
    k: &CameraIntrinsics,
    t: &RigidTransform,
) -> Result<RobotGrasp, CameraError> {
    let (uc, vc) = (grasp.x.round() as i64, grasp.y.round() as i64);
    if uc < 0 || vc < 0 || uc >= depth.width() as i64 || vc >= depth.height() as i64 {
        return Err(CameraError::OutOfBounds { u: uc, v: vc });
    }
    let d = depth
        .median_window(uc, vc, DEPTH_SAMPLE_WINDOW)
        .ok_or(CameraError::InvalidDepth)?;
    let cam = deproject_with_depth(grasp.x, grasp.y, d, k);
    Ok(RobotGrasp {
        position: t.apply(&cam),
        yaw: wrap_to_pi(grasp.theta + t.z_angle()),
    })
}

/// One calibration observation: pixel, depth, and the measured robot-frame
/// point. CSV layout `u,v,d,rx,ry,rz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    pub u: f64,
    pub v: f64,
    pub depth_m: f64,
    pub robot: Vector3<f64>,
}

/// Parses correspondence CSV lines `u,v,d,rx,ry,rz`. Blank and `#` lines are
/// skipped; one non-numeric header line is tolerated.
pub fn parse_correspondences(text: &str) -> Result<Vec<Correspondence>, CameraError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if line_no == 1 && fields.iter().any(|f| f.parse::<f64>().is_err()) {
            continue; // header
        }
        if fields.len() != 6 {
            return Err(CameraError::MalformedConfig {
                line: line_no,
                reason: format!("expected 6 comma-separated fields, found {}", fields.len()),
            });
        }
        let mut nums = [0.0f64; 6];
        for (slot, tok) in nums.iter_mut().zip(&fields) {
            *slot = tok.parse().map_err(|_| CameraError::MalformedConfig {
                line: line_no,
                reason: format!("not a number: {tok:?}"),
            })?;
        }
        out.push(Correspondence {
            u: nums[0],
            v: nums[1],
            depth_m: nums[2],
            robot: Vector3::new(nums[3], nums[4], nums[5]),
        });
    }
    Ok(out)
}

/// Serializes a fitted transform: three rotation rows, one translation row,
/// with the fit residual as a comment.
pub fn format_rigid_transform(t: &RigidTransform, rms_residual: Option<f64>) -> String {
    let mut out = String::from("# camera-to-robot rigid transform: 3 rotation rows, then translation\n");
    if let Some(rms) = rms_residual {
        out += &format!("# rms_residual_m {rms:.9}\n");
    }
    let r = &t.rotation;
    for i in 0..3 {
        out += &format!("{:.12} {:.12} {:.12}\n", r[(i, 0)], r[(i, 1)], r[(i, 2)]);
    }
    out += &format!(
        "{:.12} {:.12} {:.12}\n",
        t.translation.x, t.translation.y, t.translation.z
    );
    out
}

/// Parses the text written by [`format_rigid_transform`].
pub fn parse_rigid_transform(text: &str) -> Result<RigidTransform, CameraError> {
    let mut rows: Vec<[f64; 3]> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(CameraError::MalformedConfig {
                line: line_no,
                reason: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let mut row = [0.0f64; 3];
        for (slot, tok) in row.iter_mut().zip(&fields) {
            *slot = tok.parse().map_err(|_| CameraError::MalformedConfig {
                line: line_no,
                reason: format!("not a number: {tok:?}"),
            })?;
        }
        rows.push(row);
    }
    if rows.len() != 4 {
        return Err(CameraError::MalformedConfig {
            line: 0,
            reason: format!("expected 4 numeric rows, found {}", rows.len()),
        });
    }
    let r = Matrix3::new(
        rows[0][0], rows[0][1], rows[0][2],
        rows[1][0], rows[1][1], rows[1][2],
        rows[2][0], rows[2][1], rows[2][2],
    );
    Ok(RigidTransform::new(r, Vector3::new(rows[3][0], rows[3][1], rows[3][2])))
}
