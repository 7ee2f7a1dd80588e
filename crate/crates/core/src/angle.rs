//! Angle wrapping helpers.
//!
//! Grasp rectangles are symmetric under a half turn, so orientation
//! comparisons happen modulo pi; gripper yaw commands keep the full
//! `(-pi, pi]` range.

use core::f64::consts::PI;

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_to_pi(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = a % two_pi; // (-2*pi, 2*pi)
    if r <= -PI {
        r += two_pi;
    } else if r > PI {
        r -= two_pi;
    }
    r
}

/// Wraps an angle into `(-pi/2, pi/2]`, identifying directions modulo pi.
pub fn wrap_to_half_pi(a: f64) -> f64 {
    let mut r = a % PI; // (-pi, pi)
    if r <= -PI / 2.0 {
        r += PI;
    } else if r > PI / 2.0 {
        r -= PI;
    }
    r
}

/// Degrees to radians.
pub fn deg_to_rad(deg: f64) -> f64 {
    deg * PI / 180.0
}

/// Radians to degrees.
pub fn rad_to_deg(rad: f64) -> f64 {
    rad * 180.0 / PI
}
