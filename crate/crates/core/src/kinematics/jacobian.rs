//! Geometric Jacobian, pose error, and the Moore-Penrose pseudoinverse
//! shared by the inverse-pose solver and resolved-rate control.

use nalgebra::{Matrix6, Rotation3, SMatrix, UnitQuaternion, Vector3, Vector6};
#[allow(unused_imports)] // float math for no_std builds
use num_traits::Float;

use super::{DhTable, JointVector, KinematicsError};
use crate::geometry::Pose6D;

/// 6x7 task Jacobian: rows are linear then angular velocity, columns are
/// joints.
pub type JacobianMatrix = SMatrix<f64, 6, 7>;

/// 7x6 right pseudoinverse of the task Jacobian.
pub type PseudoInverse = SMatrix<f64, 7, 6>;

/// Smallest tolerated singular value of `J * J^T`.
pub const SINGULARITY_TOLERANCE: f64 = 1e-8;

/// Damping used by the least-squares fallback near singularities.
pub const DEFAULT_DAMPING: f64 = 1e-3;

/// Builds the geometric Jacobian from the forward-kinematics chain. Column
/// `i` is `(z_i x (p_end - p_i); z_i)` with `z_i` the joint rotation axis
/// and `p_i` a point on it, both read off frame `i` of the chain (in the
/// Craig convention joint `i` turns about the z-axis of its own frame).
pub fn geometric_jacobian(dh: &DhTable, q: &JointVector) -> JacobianMatrix {
    let (frames, end) = dh.joint_frames(q);
    let p_end = end.translation();
    let mut j = JacobianMatrix::zeros();
    for i in 0..7 {
        let frame = &frames[i + 1];
        let z: Vector3<f64> = frame.rotation().column(2).into_owned();
        let p = frame.translation();
        let linear = z.cross(&(p_end - p));
        j.fixed_view_mut::<3, 1>(0, i).copy_from(&linear);
        j.fixed_view_mut::<3, 1>(3, i).copy_from(&z);
    }
    j
}

/// Logarithm of a relative rotation as an axis-angle vector with angle in
/// `[0, pi]`.
fn rotation_log(rel: &nalgebra::Matrix3<f64>) -> Vector3<f64> {
    let uq = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(*rel));
    let mut q = uq.into_inner();
    if q.w < 0.0 {
        q = -q;
    }
    let v = q.imag();
    let vn = v.norm();
    if vn < 1e-12 {
        // Small rotation: vector part is axis * angle / 2.
        return v * 2.0;
    }
    let angle = 2.0 * vn.atan2(q.w);
    v * (angle / vn)
}

/// Task-space error from `current` to `target`: translation difference in
/// meters stacked over the axis-angle of `R_target * R_current^T` in
/// radians. Zero exactly when the poses coincide.
pub fn pose_error(current: &Pose6D, target: &Pose6D) -> Vector6<f64> {
    let dp = target.translation() - current.translation();
    let rel = target.rotation() * current.rotation().transpose();
    let w = rotation_log(&rel);
    Vector6::new(dp.x, dp.y, dp.z, w.x, w.y, w.z)
}

/// Moore-Penrose right pseudoinverse `J^T (J J^T)^-1` for the full-row-rank
/// wide Jacobian; this is the minimum-norm least-squares inverse. Errors
/// with [`KinematicsError::NearSingular`] when the smallest singular value
/// of `J J^T` drops below [`SINGULARITY_TOLERANCE`].
pub fn pseudo_inverse(j: &JacobianMatrix) -> Result<PseudoInverse, KinematicsError> {
    let gram: Matrix6<f64> = j * j.transpose();
    let sigma = gram.svd(false, false).singular_values;
    let smallest = sigma.iter().fold(f64::INFINITY, |m, &s| m.min(s));
    if smallest < SINGULARITY_TOLERANCE {
        return Err(KinematicsError::NearSingular);
    }
    let inv = gram.try_inverse().ok_or(KinematicsError::NearSingular)?;
    Ok(j.transpose() * inv)
}

/// Damped least-squares variant `J^T (J J^T + lambda^2 I)^-1`; bounded near
/// singularities and equal to the exact pseudoinverse in the limit
/// `lambda -> 0`.
pub fn pseudo_inverse_damped(j: &JacobianMatrix, lambda: f64) -> PseudoInverse {
    let gram: Matrix6<f64> = j * j.transpose() + Matrix6::identity() * (lambda * lambda);
    let inv = gram
        .try_inverse()
        .expect("damped Gram matrix is positive definite");
    j.transpose() * inv
}
