//! 7-DOF arm model: modified (Craig) Denavit-Hartenberg chain, joint
//! limits, forward kinematics, and the numeric solvers built on top.
//!
//! The per-row transform is `RotX(alpha_prev) * TransX(a_prev) *
//! RotZ(theta + theta_offset) * TransZ(d)`, so joint `i` rotates about the
//! z-axis of frame `i`. The built-in model is the left arm of a Baxter-class
//! research robot; the fixed shoulder height rides in a base transform and
//! an optional tool offset can extend past the wrist flange.

pub mod ik;
pub mod jacobian;
pub mod rate;

pub use ik::{ik_newton_raphson, ik_newton_raphson_with, IkOptions, IkResult, DEFAULT_IK_EPSILON};
pub use jacobian::{
    geometric_jacobian, pose_error, pseudo_inverse, pseudo_inverse_damped, JacobianMatrix,
    PseudoInverse, DEFAULT_DAMPING, SINGULARITY_TOLERANCE,
};
pub use rate::{
    parse_trajectory_csv, resolved_rate, resolved_rate_with, trajectory_csv, RateOptions,
    Trajectory, TrajectorySample,
};

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{Matrix3, Vector3};
#[allow(unused_imports)] // float math for no_std builds
use num_traits::Float;

use crate::angle::deg_to_rad;
use crate::geometry::Pose6D;

#[derive(Debug, Clone, PartialEq)]
pub enum KinematicsError {
    /// A joint angle sits outside its configured range.
    JointLimitViolation { joint: usize, value: f64, min: f64, max: f64 },
    /// The Jacobian row space collapsed below the working tolerance.
    NearSingular,
    /// The iterative solve grew its error for too many consecutive steps.
    Diverged { iterations: usize },
    /// Time step must be positive.
    InvalidTimeStep,
    /// Parse problem in an arm-model config or trajectory log.
    MalformedConfig { line: usize, reason: String },
}

impl fmt::Display for KinematicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KinematicsError::JointLimitViolation { joint, value, min, max } => write!(
                f,
                "joint {} at {value:.6} rad outside [{min:.6}, {max:.6}]",
                joint + 1
            ),
            KinematicsError::NearSingular => write!(f, "Jacobian is near singular"),
            KinematicsError::Diverged { iterations } => {
                write!(f, "solution diverged after {iterations} iterations")
            }
            KinematicsError::InvalidTimeStep => write!(f, "time step must be positive"),
            KinematicsError::MalformedConfig { line, reason } => {
                write!(f, "malformed arm config at line {line}: {reason}")
            }
        }
    }
}

impl core::error::Error for KinematicsError {}

/// One modified-DH row: the constant frame parameters of a joint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DhRow {
    /// Twist about the previous x-axis, radians.
    pub alpha_prev: f64,
    /// Offset along the previous x-axis, meters.
    pub a_prev: f64,
    /// Offset along the joint z-axis, meters.
    pub d: f64,
    /// Constant added to the joint variable (e.g. +90 degrees on joint 2).
    pub theta_offset: f64,
}

/// Per-row transform `RotX(alpha) * TransX(a) * RotZ(theta + offset) *
/// TransZ(d)` in closed form; the rotation block is orthonormal by
/// construction.
pub fn dh_transform(row: &DhRow, theta: f64) -> Pose6D {
    let q = theta + row.theta_offset;
    let (st, ct) = (q.sin(), q.cos());
    let (sa, ca) = (row.alpha_prev.sin(), row.alpha_prev.cos());
    let rotation = Matrix3::new(
        ct, -st, 0.0,
        st * ca, ct * ca, -sa,
        st * sa, ct * sa, ca,
    );
    let translation = Vector3::new(row.a_prev, -sa * row.d, ca * row.d);
    Pose6D::from_parts(&rotation, &translation)
}

/// Joint angles in radians, shoulder to wrist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointVector(pub [f64; 7]);

impl JointVector {
    pub fn zeros() -> Self {
        JointVector([0.0; 7])
    }

    pub fn as_array(&self) -> &[f64; 7] {
        &self.0
    }

    pub fn to_vector(self) -> nalgebra::SVector<f64, 7> {
        nalgebra::SVector::from(self.0)
    }

    pub fn from_vector(v: &nalgebra::SVector<f64, 7>) -> Self {
        JointVector([v[0], v[1], v[2], v[3], v[4], v[5], v[6]])
    }
}

impl core::ops::Index<usize> for JointVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl core::ops::IndexMut<usize> for JointVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// Normalized joint range; construction sorts the endpoints, so a swapped
/// (min, max) pair in a data sheet is tolerated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointLimits {
    pub min: f64,
    pub max: f64,
}

impl JointLimits {
    pub fn new(a: f64, b: f64) -> Self {
        JointLimits { min: a.min(b), max: a.max(b) }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.min <= v && v <= self.max
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.min, self.max)
    }
}

/// Full arm model: seven DH rows, the fixed base transform (shoulder
/// height), an optional tool transform past the flange, and joint limits.
#[derive(Debug, Clone, PartialEq)]
pub struct DhTable {
    pub rows: [DhRow; 7],
    pub base: Pose6D,
    pub tool: Option<Pose6D>,
    pub limits: [JointLimits; 7],
}

/// Link and offset lengths of the built-in arm, meters (L0 through L6).
pub const BAXTER_LINK_LENGTHS_M: [f64; 7] =
    [0.27035, 0.069, 0.36435, 0.069, 0.37429, 0.010, 0.36830];

/// Joint range endpoints of the built-in arm, degrees, shoulder to wrist.
pub const BAXTER_JOINT_LIMITS_DEG: [(f64, f64); 7] = [
    (-141.0, 51.0),
    (-123.0, 60.0),
    (-173.0, 173.0),
    (-3.0, 150.0),
    (-175.0, 175.0),
    (-90.0, 120.0),
    (-175.0, 175.0),
];

impl DhTable {
    /// The 7-DOF left arm of a Baxter-class research robot. The shoulder
    /// height L0 is a base z-offset; the L6 tool extension is off by default
    /// (use [`DhTable::with_tool_z`]).
    pub fn baxter_left_arm() -> Self {
        let [l0, l1, l2, l3, l4, l5, _l6] = BAXTER_LINK_LENGTHS_M;
        let deg90 = deg_to_rad(90.0);
        let rows = [
            DhRow { alpha_prev: 0.0, a_prev: 0.0, d: 0.0, theta_offset: 0.0 },
            DhRow { alpha_prev: -deg90, a_prev: l1, d: 0.0, theta_offset: deg90 },
            DhRow { alpha_prev: deg90, a_prev: 0.0, d: l2, theta_offset: 0.0 },
            DhRow { alpha_prev: -deg90, a_prev: l3, d: 0.0, theta_offset: 0.0 },
            DhRow { alpha_prev: deg90, a_prev: 0.0, d: l4, theta_offset: 0.0 },
            DhRow { alpha_prev: -deg90, a_prev: l5, d: 0.0, theta_offset: 0.0 },
            DhRow { alpha_prev: deg90, a_prev: 0.0, d: 0.0, theta_offset: 0.0 },
        ];
        let limits = BAXTER_JOINT_LIMITS_DEG
            .map(|(a, b)| JointLimits::new(deg_to_rad(a), deg_to_rad(b)));
        DhTable {
            rows,
            base: Pose6D::from_translation(Vector3::new(0.0, 0.0, l0)),
            tool: None,
            limits,
        }
    }

    /// Adds a tool transform extending `z_offset_m` past the flange.
    pub fn with_tool_z(mut self, z_offset_m: f64) -> Self {
        self.tool = Some(Pose6D::from_translation(Vector3::new(0.0, 0.0, z_offset_m)));
        self
    }

    /// Checks every joint against its range.
    pub fn within_limits(&self, q: &JointVector) -> Result<(), KinematicsError> {
        for (i, (&v, lim)) in q.0.iter().zip(&self.limits).enumerate() {
            if !lim.contains(v) {
                return Err(KinematicsError::JointLimitViolation {
                    joint: i,
                    value: v,
                    min: lim.min,
                    max: lim.max,
                });
            }
        }
        Ok(())
    }

    /// Cumulative frames `T_0..T_7` (with `T_0` the base) plus the
    /// end-effector frame including any tool transform.
    pub fn joint_frames(&self, q: &JointVector) -> ([Pose6D; 8], Pose6D) {
        let mut frames = [self.base; 8];
        for i in 0..7 {
            frames[i + 1] = frames[i] * dh_transform(&self.rows[i], q[i]);
        }
        let end = match &self.tool {
            Some(tool) => frames[7] * *tool,
            None => frames[7],
        };
        (frames, end)
    }

    /// End-effector pose without joint-limit validation; used internally by
    /// the differential solvers, which manage limits themselves.
    pub fn forward_kinematics_unchecked(&self, q: &JointVector) -> Pose6D {
        let mut t = self.base;
        for (row, &theta) in self.rows.iter().zip(q.0.iter()) {
            t = t * dh_transform(row, theta);
        }
        match &self.tool {
            Some(tool) => t * *tool,
            None => t,
        }
    }

    /// End-effector pose, rejecting out-of-range joint angles.
    pub fn forward_kinematics(&self, q: &JointVector) -> Result<Pose6D, KinematicsError> {
        self.within_limits(q)?;
        Ok(self.forward_kinematics_unchecked(q))
    }
}

/// Clamps each joint into its range; returns the clamped vector and a
/// per-joint flag of where clamping fired. Idempotent.
pub fn clamp_limits(dh: &DhTable, q: &JointVector) -> (JointVector, [bool; 7]) {
    let mut out = *q;
    let mut flags = [false; 7];
    for i in 0..7 {
        let c = dh.limits[i].clamp(q[i]);
        flags[i] = c != q[i];
        out[i] = c;
    }
    (out, flags)
}

/// Parses an arm-model config. Line formats (degrees and millimeters, as a
/// data sheet would state them):
///
/// ```text
/// dh <alpha_deg> <a_mm> <d_mm> <theta_offset_deg>   # exactly 7 rows
/// lengths <L0..L6 mm>                               # 7 values
/// limit <min_deg> <max_deg>                         # exactly 7 rows
/// tool on                                           # optional, default off
/// ```
///
/// The `dh` rows define the chain; `lengths` supplies the base z-offset (L0)
/// and the optional tool extension (L6).
pub fn parse_arm_config(text: &str) -> Result<DhTable, KinematicsError> {
    let mut dh_rows: Vec<DhRow> = Vec::new();
    let mut limits: Vec<JointLimits> = Vec::new();
    let mut lengths: Option<[f64; 7]> = None;
    let mut tool_on = false;

    let parse_nums = |tokens: &[&str], line: usize| -> Result<Vec<f64>, KinematicsError> {
        tokens
            .iter()
            .map(|t| {
                t.parse::<f64>().map_err(|_| KinematicsError::MalformedConfig {
                    line,
                    reason: format!("not a number: {t:?}"),
                })
            })
            .collect()
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let key = tokens.next().unwrap();
        let rest: Vec<&str> = tokens.collect();
        match key {
            "dh" => {
                if rest.len() != 4 {
                    return Err(KinematicsError::MalformedConfig {
                        line: line_no,
                        reason: "dh expects alpha_deg a_mm d_mm theta_offset_deg".to_string(),
                    });
                }
                let v = parse_nums(&rest, line_no)?;
                dh_rows.push(DhRow {
                    alpha_prev: deg_to_rad(v[0]),
                    a_prev: v[1] / 1000.0,
                    d: v[2] / 1000.0,
                    theta_offset: deg_to_rad(v[3]),
                });
            }
            "lengths" => {
                if rest.len() != 7 {
                    return Err(KinematicsError::MalformedConfig {
                        line: line_no,
                        reason: format!("lengths expects 7 values, found {}", rest.len()),
                    });
                }
                let v = parse_nums(&rest, line_no)?;
                let mut arr = [0.0; 7];
                arr.copy_from_slice(&v);
                lengths = Some(arr.map(|mm| mm / 1000.0));
            }
            "limit" => {
                if rest.len() != 2 {
                    return Err(KinematicsError::MalformedConfig {
                        line: line_no,
                        reason: "limit expects min_deg max_deg".to_string(),
                    });
                }
                let v = parse_nums(&rest, line_no)?;
                limits.push(JointLimits::new(deg_to_rad(v[0]), deg_to_rad(v[1])));
            }
            "tool" => {
                tool_on = matches!(rest.as_slice(), ["on"] | ["1"] | ["true"]);
            }
            other => {
                return Err(KinematicsError::MalformedConfig {
                    line: line_no,
                    reason: format!("unknown directive {other:?}"),
                });
            }
        }
    }

    if dh_rows.len() != 7 || limits.len() != 7 {
        return Err(KinematicsError::MalformedConfig {
            line: 0,
            reason: format!(
                "expected 7 dh rows and 7 limit rows, found {} and {}",
                dh_rows.len(),
                limits.len()
            ),
        });
    }
    let lengths = lengths.ok_or(KinematicsError::MalformedConfig {
        line: 0,
        reason: "missing lengths line".to_string(),
    })?;

    let mut rows = [DhRow { alpha_prev: 0.0, a_prev: 0.0, d: 0.0, theta_offset: 0.0 }; 7];
    rows.copy_from_slice(&dh_rows);
    let mut lim = [JointLimits::new(0.0, 0.0); 7];
    lim.copy_from_slice(&limits);

    let mut table = DhTable {
        rows,
        base: Pose6D::from_translation(Vector3::new(0.0, 0.0, lengths[0])),
        tool: None,
        limits: lim,
    };
    if tool_on {
        table = table.with_tool_z(lengths[6]);
    }
    Ok(table)
}
