//! Newton-Raphson inverse-pose solution.
//!
//! Starting from the current configuration, each iteration computes the
//! task-space error, maps it through the Jacobian pseudoinverse to a joint
//! correction `dq = J* e`, and updates `q <- clamp(q + dq)`. Iteration stops
//! when `|dq| < epsilon` or the step budget runs out; ten consecutive error
//! increases count as divergence (an unreachable target).

use nalgebra::Vector6;

use super::jacobian::{
    geometric_jacobian, pose_error, pseudo_inverse, pseudo_inverse_damped, DEFAULT_DAMPING,
};
use super::{clamp_limits, DhTable, JointVector, KinematicsError};
use crate::geometry::Pose6D;

/// Default `|dq|` stopping tolerance.
pub const DEFAULT_IK_EPSILON: f64 = 1e-8;

const DIVERGENCE_STREAK: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkOptions {
    /// Scale applied to the orientation error rows relative to position.
    pub orientation_weight: f64,
    /// Damping for the least-squares fallback near singularities; `None`
    /// propagates [`KinematicsError::NearSingular`] instead.
    pub damping_fallback: Option<f64>,
}

impl Default for IkOptions {
    fn default() -> Self {
        IkOptions { orientation_weight: 1.0, damping_fallback: Some(DEFAULT_DAMPING) }
    }
}

/// Outcome of the iterative solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkResult {
    pub solution: JointVector,
    pub iterations: usize,
    /// Norm of the final pose error (meters and radians stacked, with the
    /// configured orientation weight applied).
    pub final_error_norm: f64,
    /// Whether `|dq| < epsilon` was reached within the iteration budget.
    pub converged: bool,
    /// Number of iterations on which at least one joint was clamped.
    pub limit_clamps: usize,
}

fn weighted_error(current: &Pose6D, target: &Pose6D, orientation_weight: f64) -> Vector6<f64> {
    let mut e = pose_error(current, target);
    for r in 3..6 {
        e[r] *= orientation_weight;
    }
    e
}

/// Solves for joint angles reaching `target` with default options.
pub fn ik_newton_raphson(
    dh: &DhTable,
    target: &Pose6D,
    initial: &JointVector,
    epsilon: f64,
    max_iterations: usize,
) -> Result<IkResult, KinematicsError> {
    ik_newton_raphson_with(dh, target, initial, epsilon, max_iterations, &IkOptions::default())
}

/// Solves for joint angles reaching `target`. The initial guess is clamped
/// into limits and every update is clamped again, with clamping recorded in
/// the result.
pub fn ik_newton_raphson_with(
    dh: &DhTable,
    target: &Pose6D,
    initial: &JointVector,
    epsilon: f64,
    max_iterations: usize,
    options: &IkOptions,
) -> Result<IkResult, KinematicsError> {
    let (mut q, initial_flags) = clamp_limits(dh, initial);
    let mut limit_clamps = usize::from(initial_flags.iter().any(|&f| f));
    let mut previous_error = f64::INFINITY;
    let mut growth_streak = 0usize;

    for iteration in 1..=max_iterations {
        let current = dh.forward_kinematics_unchecked(&q);
        let error = weighted_error(&current, target, options.orientation_weight);
        let error_norm = error.norm();
        if error_norm > previous_error {
            growth_streak += 1;
            if growth_streak >= DIVERGENCE_STREAK {
                return Err(KinematicsError::Diverged { iterations: iteration });
            }
        } else {
            growth_streak = 0;
        }
        previous_error = error_norm;

        let mut jacobian = geometric_jacobian(dh, &q);
        for r in 3..6 {
            for c in 0..7 {
                jacobian[(r, c)] *= options.orientation_weight;
            }
        }
        let pinv = match pseudo_inverse(&jacobian) {
            Ok(p) => p,
            Err(KinematicsError::NearSingular) => match options.damping_fallback {
                Some(lambda) => pseudo_inverse_damped(&jacobian, lambda),
                None => return Err(KinematicsError::NearSingular),
            },
            Err(other) => return Err(other),
        };
        let dq = pinv * error;

        let (clamped, flags) = clamp_limits(dh, &JointVector::from_vector(&(q.to_vector() + dq)));
        q = clamped;
        if flags.iter().any(|&f| f) {
            limit_clamps += 1;
        }

        if dq.norm() < epsilon {
            let final_error = weighted_error(
                &dh.forward_kinematics_unchecked(&q),
                target,
                options.orientation_weight,
            )
            .norm();
            return Ok(IkResult {
                solution: q,
                iterations: iteration,
                final_error_norm: final_error,
                converged: true,
                limit_clamps,
            });
        }
    }

    let final_error =
        weighted_error(&dh.forward_kinematics_unchecked(&q), target, options.orientation_weight)
            .norm();
    Ok(IkResult {
        solution: q,
        iterations: max_iterations,
        final_error_norm: final_error,
        converged: false,
        limit_clamps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_in_limit_q(table: &DhTable, rng: &mut ChaCha8Rng) -> JointVector {
        let mut q = JointVector::zeros();
        for i in 0..7 {
            let lim = table.limits[i];
            // Keep a margin so perturbed initial guesses stay meaningful.
            let span = lim.max - lim.min;
            q[i] = rng.random_range((lim.min + 0.05 * span)..(lim.max - 0.05 * span));
        }
        q
    }

    #[test]
    fn fixed_point_converges_immediately() {
        let table = DhTable::baxter_left_arm();
        let q0 = JointVector([0.3, -0.4, 0.2, 0.9, -0.6, 0.5, 0.1]);
        let target = table.forward_kinematics(&q0).unwrap();
        let result = ik_newton_raphson(&table, &target, &q0, 1e-8, 50).unwrap();
        assert!(result.converged);
        assert!(result.iterations <= 1);
        for i in 0..7 {
            assert!((result.solution[i] - q0[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn perturbed_start_recovers_target_pose() {
        let table = DhTable::baxter_left_arm();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let q_true = random_in_limit_q(&table, &mut rng);
            let target = table.forward_kinematics(&q_true).unwrap();
            let mut initial = q_true;
            for i in 0..7 {
                initial[i] += rng.random_range(-0.05..0.05);
            }
            let result = ik_newton_raphson(&table, &target, &initial, 1e-8, 50).unwrap();
            assert!(result.converged, "did not converge: {result:?}");
            assert!(result.final_error_norm < 1e-8, "converged above tolerance: {result:?}");
            let reached = table.forward_kinematics_unchecked(&result.solution);
            let e = pose_error(&reached, &target);
            assert!(e.fixed_rows::<3>(0).norm() < 1e-6, "position error too large");
            assert!(e.fixed_rows::<3>(3).norm() < 1e-6, "orientation error too large");
        }
    }

    #[test]
    fn unreachable_target_diverges_or_stalls() {
        let table = DhTable::baxter_left_arm();
        // Far beyond full stretch (reach is under a meter from the shoulder).
        let target = Pose6D::from_translation(Vector3::new(2.5, 0.0, 0.27035));
        let initial = JointVector([0.1, -0.3, 0.2, 0.6, -0.2, 0.4, 0.0]);
        match ik_newton_raphson(&table, &target, &initial, 1e-8, 60) {
            Err(KinematicsError::Diverged { .. }) => {}
            Ok(result) => assert!(!result.converged, "cannot converge to unreachable pose"),
            Err(other) => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn out_of_range_initial_guess_is_clamped_and_recorded() {
        let table = DhTable::baxter_left_arm();
        let q0 = JointVector([0.2, -0.3, 0.1, 0.05, -0.4, 0.3, 0.2]);
        let target = table.forward_kinematics(&q0).unwrap();
        let mut initial = q0;
        initial[3] = -1.0; // below the elbow-pitch minimum, clamps to -3 deg
        let result = ik_newton_raphson(&table, &target, &initial, 1e-8, 50).unwrap();
        assert!(result.converged);
        assert!(result.limit_clamps >= 1);
    }

    #[test]
    fn undamped_solver_propagates_singularity() {
        let mut table = DhTable::baxter_left_arm();
        for row in &mut table.rows {
            row.a_prev = 0.0;
        }
        let target = Pose6D::from_translation(Vector3::new(0.3, 0.1, 0.6));
        let options = IkOptions { orientation_weight: 1.0, damping_fallback: None };
        let start = JointVector::zeros(); // stretched: exactly singular
        match ik_newton_raphson_with(&table, &target, &start, 1e-8, 50, &options) {
            Err(KinematicsError::NearSingular) => {}
            other => panic!("expected NearSingular, got {other:?}"),
        }
    }
}
