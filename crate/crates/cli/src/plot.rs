//! Minimal joint-angle-vs-time plot rendered straight onto an RGB raster.

use graspkit_core::kinematics::Trajectory;
use graspkit_core::RgbImage;

const MARGIN_LEFT: u32 = 50;
const MARGIN_RIGHT: u32 = 15;
const MARGIN_TOP: u32 = 15;
const MARGIN_BOTTOM: u32 = 35;

/// One distinct color per joint, shoulder to wrist.
pub const JOINT_COLORS: [[u8; 3]; 7] = [
    [214, 39, 40],   // red
    [255, 127, 14],  // orange
    [188, 156, 34],  // olive
    [44, 160, 44],   // green
    [23, 190, 207],  // cyan
    [31, 119, 180],  // blue
    [148, 103, 189], // purple
];

/// Renders each joint angle against time as a colored polyline with axes,
/// tick marks, and a legend swatch per joint.
pub fn plot_joint_angles(traj: &Trajectory, width: u32, height: u32) -> RgbImage {
    let mut img = RgbImage::filled(width.max(120), height.max(120), [255, 255, 255]);
    let (w, h) = (img.width(), img.height());
    let x0 = MARGIN_LEFT as f64;
    let x1 = (w - MARGIN_RIGHT) as f64;
    let y0 = (h - MARGIN_BOTTOM) as f64;
    let y1 = MARGIN_TOP as f64;

    let samples = &traj.samples;
    let t_max = samples.last().map(|s| s.t).unwrap_or(1.0).max(1e-9);
    let mut a_min = f64::INFINITY;
    let mut a_max = f64::NEG_INFINITY;
    for s in samples {
        for &v in s.q.as_array() {
            a_min = a_min.min(v);
            a_max = a_max.max(v);
        }
    }
    if !a_min.is_finite() || a_min >= a_max {
        a_min = -1.0;
        a_max = 1.0;
    }
    let pad = 0.05 * (a_max - a_min);
    let (a_min, a_max) = (a_min - pad, a_max + pad);

    let sx = |t: f64| x0 + (t / t_max) * (x1 - x0);
    let sy = |a: f64| y0 + (a - a_min) / (a_max - a_min) * (y1 - y0);

    // Gridlines and tick marks.
    for k in 0..=5 {
        let gx = sx(t_max * k as f64 / 5.0).round() as i64;
        img.draw_thick_line((gx, y1 as i64), (gx, y0 as i64), [225, 225, 225], 1);
        img.draw_thick_line((gx, y0 as i64), (gx, y0 as i64 + 4), [0, 0, 0], 1);
        let ga = a_min + (a_max - a_min) * k as f64 / 5.0;
        let gy = sy(ga).round() as i64;
        img.draw_thick_line((x0 as i64, gy), (x1 as i64, gy), [225, 225, 225], 1);
        img.draw_thick_line((x0 as i64 - 4, gy), (x0 as i64, gy), [0, 0, 0], 1);
    }
    // Axes.
    img.draw_thick_line((x0 as i64, y0 as i64), (x1 as i64, y0 as i64), [0, 0, 0], 1);
    img.draw_thick_line((x0 as i64, y0 as i64), (x0 as i64, y1 as i64), [0, 0, 0], 1);

    // Curves.
    for (joint, &color) in JOINT_COLORS.iter().enumerate() {
        for pair in samples.windows(2) {
            let p0 = (sx(pair[0].t).round() as i64, sy(pair[0].q[joint]).round() as i64);
            let p1 = (sx(pair[1].t).round() as i64, sy(pair[1].q[joint]).round() as i64);
            img.draw_thick_line(p0, p1, color, 2);
        }
        // Legend swatch.
        let lx = (x0 as i64) + 10 + joint as i64 * 18;
        img.draw_thick_line((lx, y1 as i64 + 6), (lx + 10, y1 as i64 + 6), color, 4);
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;
    use graspkit_core::kinematics::{resolved_rate, DhTable, JointVector};
    use graspkit_core::nalgebra::Vector6;

    #[test]
    fn plot_contains_every_joint_color() {
        let table = DhTable::baxter_left_arm();
        let start = JointVector([0.3, -0.6, 0.0, 0.8, 0.0, 0.9, 0.0]);
        let traj = resolved_rate(
            &table,
            &start,
            |_| Vector6::new(0.0, 0.0, -0.01, 0.0, 0.0, 0.0),
            0.02,
            1.0,
        )
        .unwrap();
        let img = plot_joint_angles(&traj, 640, 480);
        assert_eq!((img.width(), img.height()), (640, 480));
        for color in JOINT_COLORS {
            assert!(img.pixels().contains(&color), "missing joint color {color:?}");
        }
    }

    #[test]
    fn empty_trajectory_still_renders_axes() {
        let traj = Trajectory { samples: vec![], truncated: true };
        let img = plot_joint_angles(&traj, 320, 240);
        assert!(img.pixels().contains(&[0, 0, 0]));
    }
}
