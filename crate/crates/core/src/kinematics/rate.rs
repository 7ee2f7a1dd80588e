//! Resolved-rate control: track a commanded Cartesian velocity profile by
//! integrating the minimum-norm joint velocities `qdot = J* xdot`.
//!
//! The pseudoinverse here is the same routine the inverse-pose solver uses,
//! which is the point of the numeric route: one Jacobian factorization
//! serves both solvers. Integration is explicit Euler at a caller-chosen
//! step so the logged `(t, q, qdot)` rows reproduce the integration exactly.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use nalgebra::Vector6;
#[allow(unused_imports)] // float math for no_std builds
use num_traits::Float;

use super::jacobian::{geometric_jacobian, pseudo_inverse, pseudo_inverse_damped};
use super::{DhTable, JointVector, KinematicsError};

/// One logged control step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    /// Time since trajectory start, seconds.
    pub t: f64,
    /// Joint angles at `t`.
    pub q: JointVector,
    /// Commanded joint velocities at `t`, rad/s.
    pub qdot: [f64; 7],
}

/// Timestamped joint trajectory. Consecutive samples satisfy
/// `q[k+1] = q[k] + qdot[k] * dt` exactly (explicit Euler).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    /// Set when a near-singular Jacobian cut the trajectory short; the log
    /// keeps every sample up to the last good one.
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateOptions {
    /// Damping for the least-squares fallback. `None` (default) truncates
    /// the trajectory at a singularity instead of pushing through it.
    pub damping_fallback: Option<f64>,
}

/// Runs resolved-rate control from `start` for `duration` seconds at step
/// `dt`, with default options (truncate at singularities).
pub fn resolved_rate<F>(
    dh: &DhTable,
    start: &JointVector,
    profile: F,
    dt: f64,
    duration: f64,
) -> Result<Trajectory, KinematicsError>
where
    F: Fn(f64) -> Vector6<f64>,
{
    resolved_rate_with(dh, start, profile, dt, duration, &RateOptions::default())
}

/// Runs resolved-rate control. `profile(t)` is the commanded Cartesian
/// velocity, linear (m/s) stacked over angular (rad/s). The start must be
/// within joint limits; the integration itself is not clamped so the log
/// stays exactly Euler-consistent.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // the negation also rejects NaN
pub fn resolved_rate_with<F>(
    dh: &DhTable,
    start: &JointVector,
    profile: F,
    dt: f64,
    duration: f64,
    options: &RateOptions,
) -> Result<Trajectory, KinematicsError>
where
    F: Fn(f64) -> Vector6<f64>,
{
    if !(dt > 0.0) || !duration.is_finite() || duration < 0.0 {
        return Err(KinematicsError::InvalidTimeStep);
    }
    dh.within_limits(start)?;

    let steps = (duration / dt).round() as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    let mut truncated = false;
    let mut q = *start;

    for k in 0..=steps {
        let t = k as f64 * dt;
        let jacobian = geometric_jacobian(dh, &q);
        let pinv = match pseudo_inverse(&jacobian) {
            Ok(p) => p,
            Err(KinematicsError::NearSingular) => match options.damping_fallback {
                Some(lambda) => pseudo_inverse_damped(&jacobian, lambda),
                None => {
                    truncated = true;
                    break;
                }
            },
            Err(other) => return Err(other),
        };
        let qdot_vec = pinv * profile(t);
        let mut qdot = [0.0; 7];
        for i in 0..7 {
            qdot[i] = qdot_vec[i];
        }
        samples.push(TrajectorySample { t, q, qdot });
        if k < steps {
            q = JointVector::from_vector(&(q.to_vector() + qdot_vec * dt));
        }
    }

    Ok(Trajectory { samples, truncated })
}

/// Serializes a trajectory as CSV: header
/// `step,t,theta1..theta7,thetadot1..thetadot7`, one row per sample, time
/// with six decimals and angles/velocities in scientific notation with
/// enough digits to read back within 1e-9.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("step,t");
    for i in 1..=7 {
        out += &format!(",theta{i}");
    }
    for i in 1..=7 {
        out += &format!(",thetadot{i}");
    }
    out.push('\n');
    for (k, s) in traj.samples.iter().enumerate() {
        out += &format!("{},{:.6}", k + 1, s.t);
        for v in s.q.as_array() {
            out += &format!(",{v:.10e}");
        }
        for v in &s.qdot {
            out += &format!(",{v:.10e}");
        }
        out.push('\n');
    }
    out
}

/// Parses the CSV written by [`trajectory_csv`].
pub fn parse_trajectory_csv(text: &str) -> Result<Trajectory, KinematicsError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(KinematicsError::MalformedConfig {
        line: 0,
        reason: "empty trajectory log".to_string(),
    })?;
    if !header.starts_with("step,t,theta1") {
        return Err(KinematicsError::MalformedConfig {
            line: 1,
            reason: "unexpected header".to_string(),
        });
    }
    let mut samples = Vec::new();
    for (i, raw) in lines {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 16 {
            return Err(KinematicsError::MalformedConfig {
                line: line_no,
                reason: format!("expected 16 fields, found {}", fields.len()),
            });
        }
        let num = |tok: &str| -> Result<f64, KinematicsError> {
            tok.trim().parse().map_err(|_| KinematicsError::MalformedConfig {
                line: line_no,
                reason: format!("not a number: {tok:?}"),
            })
        };
        let t = num(fields[1])?;
        let mut q = JointVector::zeros();
        let mut qdot = [0.0; 7];
        for i in 0..7 {
            q[i] = num(fields[2 + i])?;
            qdot[i] = num(fields[9 + i])?;
        }
        samples.push(TrajectorySample { t, q, qdot });
    }
    Ok(Trajectory { samples, truncated: false })
}
