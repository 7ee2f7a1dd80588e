//! Acceptance suite: one test per toolkit guarantee, each asserting its
//! stated tolerance and printing a PASS line with the measured margin
//! (visible with `--nocapture`).

use std::time::Instant;

use graspkit_core::angle::{deg_to_rad, wrap_to_half_pi};
use graspkit_core::camera::{fit_rigid_transform, RigidTransform};
use graspkit_core::dataset::{
    jaccard, parse_cornell_rects, rectangle_metric, render_paired_image, DatasetError,
};
use graspkit_core::extraction::extract_pose;
use graspkit_core::geometry::{corners_to_rect5d, rect5d_to_corners, GraspRect5D, Pose6D};
use graspkit_core::image::{BinaryMask, RgbImage};
use graspkit_core::kinematics::{
    clamp_limits, geometric_jacobian, ik_newton_raphson, parse_trajectory_csv, pose_error,
    pseudo_inverse, resolved_rate, trajectory_csv, DhTable, JacobianMatrix, JointVector,
};
use graspkit_core::translation::{centroid, compute_moments, TranslationError};
use nalgebra::{Matrix3, Point2, Vector3, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const IMAGE_SIZE: u32 = 256;
const LINE_WIDTH: u32 = 3;

/// Random grasp rectangle fully inside a 256x256 image. Plate sides are
/// kept shorter than the opening span (the geometry rendered grasp
/// rectangles have; the plate edges must be the two farthest pixel groups
/// for the 2-means split) and the opening span large enough that endpoint
/// rounding cannot push the recovered angle past one degree.
fn random_grasp(rng: &mut ChaCha8Rng) -> GraspRect5D {
    let h: f64 = rng.random_range(14.0..40.0);
    let w: f64 = rng.random_range(80.0..110.0);
    let margin = ((h * h + w * w).sqrt() / 2.0) + 3.0;
    let x = rng.random_range(margin..(IMAGE_SIZE as f64 - margin));
    let y = rng.random_range(margin..(IMAGE_SIZE as f64 - margin));
    let theta = rng.random_range(0.0..core::f64::consts::PI);
    GraspRect5D::new(x, y, theta, h, w).unwrap()
}

fn random_in_limit_q(table: &DhTable, rng: &mut ChaCha8Rng) -> JointVector {
    let mut q = JointVector::zeros();
    for i in 0..7 {
        let lim = table.limits[i];
        let span = lim.max - lim.min;
        q[i] = rng.random_range((lim.min + 0.02 * span)..(lim.max - 0.02 * span));
    }
    q
}

#[test]
fn c01_synthetic_pipeline_accuracy_is_total() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut matched = 0usize;
    const N: usize = 200;
    for _ in 0..N {
        let rect = random_grasp(&mut rng);
        let img = render_paired_image(
            &RgbImage::new(IMAGE_SIZE, IMAGE_SIZE),
            &rect5d_to_corners(&rect),
            LINE_WIDTH,
        );
        let pose = extract_pose(&img).expect("rendered rectangle must extract");
        let refined = graspkit_core::translation::refine_rect(&pose, 30.0, 60.0);
        let metric = rectangle_metric(&refined, &rect5d_to_corners(&rect));
        assert!(
            metric.matched,
            "unmatched render: rect {rect:?}, jaccard {}, angle {}",
            metric.jaccard, metric.angle_diff
        );
        matched += 1;
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert_eq!(matched, N);
    assert!(elapsed < 10.0, "pipeline too slow: {elapsed:.2} s");
    println!("PASS c01 synthetic pipeline accuracy: {matched}/{N} matched in {elapsed:.2} s");
}

#[test]
fn c02_pose_extraction_precision() {
    let mut rng = ChaCha8Rng::seed_from_u64(101); // same renders as c01
    let mut worst_center = 0.0f64;
    let mut worst_theta = 0.0f64;
    const N: usize = 200;
    for _ in 0..N {
        let rect = random_grasp(&mut rng);
        let img = render_paired_image(
            &RgbImage::new(IMAGE_SIZE, IMAGE_SIZE),
            &rect5d_to_corners(&rect),
            LINE_WIDTH,
        );
        let pose = extract_pose(&img).unwrap();
        let center_err =
            ((pose.center.x - rect.x).powi(2) + (pose.center.y - rect.y).powi(2)).sqrt();
        let theta_err = wrap_to_half_pi(pose.theta - rect.theta).abs();
        worst_center = worst_center.max(center_err);
        worst_theta = worst_theta.max(theta_err);
        assert!(center_err <= 1.0, "center error {center_err} for {rect:?}");
        assert!(theta_err <= deg_to_rad(1.0), "theta error {theta_err} for {rect:?}");
    }
    println!(
        "PASS c02 extraction precision: worst center {:.3} px, worst theta {:.3} deg over {N}",
        worst_center,
        worst_theta / deg_to_rad(1.0)
    );
}

#[test]
fn c03_centroid_matches_brute_force_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for case in 0..100 {
        let width = rng.random_range(1..64u32);
        let height = rng.random_range(1..64u32);
        let density = rng.random_range(0.0..1.0f64);
        let mut mask = BinaryMask::new(width, height);
        for v in 0..height {
            for u in 0..width {
                if rng.random_range(0.0..1.0f64) < density {
                    mask.set(u, v, true);
                }
            }
        }
        // Brute-force pixel-mean oracle over integer sums.
        let (mut n, mut su, mut sv) = (0u64, 0u64, 0u64);
        for v in 0..height {
            for u in 0..width {
                if mask.get(u, v) {
                    n += 1;
                    su += u as u64;
                    sv += v as u64;
                }
            }
        }
        let m = compute_moments(&mask);
        assert_eq!((m.m00, m.m10, m.m01), (n, su, sv), "case {case}");
        match centroid(&mask) {
            Ok(c) => {
                assert!(n > 0);
                assert_eq!(c.x, su as f64 / n as f64);
                assert_eq!(c.y, sv as f64 / n as f64);
            }
            Err(TranslationError::EmptyMask) => assert_eq!(n, 0),
        }
    }
    // Explicit empty-mask error path.
    let empty = BinaryMask::new(16, 16);
    assert_eq!(centroid(&empty).unwrap_err(), TranslationError::EmptyMask);
    println!("PASS c03 centroid equals brute-force integer means on 100 random masks");
}

/// Membership test straight from the 5-tuple parameters; shares no code
/// with the polygon clipper.
fn rect_contains(rect: &GraspRect5D, p: Point2<f64>) -> bool {
    let (s, c) = (rect.theta.sin(), rect.theta.cos());
    let dx = p.x - rect.x;
    let dy = p.y - rect.y;
    let along = dx * c + dy * s;
    let across = -dx * s + dy * c;
    along.abs() <= rect.w / 2.0 && across.abs() <= rect.h / 2.0
}

/// Supersampled rasterization IoU: a 1000x1000 grid of cell centers over
/// the padded union bounding box.
fn raster_iou(a: &GraspRect5D, b: &GraspRect5D) -> f64 {
    const GRID: usize = 1000;
    let corners: Vec<Point2<f64>> = rect5d_to_corners(a)
        .corners
        .iter()
        .chain(rect5d_to_corners(b).corners.iter())
        .copied()
        .collect();
    let min_x = corners.iter().map(|p| p.x).fold(f64::INFINITY, f64::min) - 0.05;
    let max_x = corners.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max) + 0.05;
    let min_y = corners.iter().map(|p| p.y).fold(f64::INFINITY, f64::min) - 0.05;
    let max_y = corners.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max) + 0.05;
    let sx = (max_x - min_x) / GRID as f64;
    let sy = (max_y - min_y) / GRID as f64;
    let (mut inter, mut union) = (0u64, 0u64);
    for iy in 0..GRID {
        let y = min_y + (iy as f64 + 0.5) * sy;
        for ix in 0..GRID {
            let x = min_x + (ix as f64 + 0.5) * sx;
            let p = Point2::new(x, y);
            let in_a = rect_contains(a, p);
            let in_b = rect_contains(b, p);
            inter += (in_a && in_b) as u64;
            union += (in_a || in_b) as u64;
        }
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

#[test]
fn c04_jaccard_agrees_with_rasterization_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = GraspRect5D::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(0.0..core::f64::consts::PI),
            rng.random_range(1.5..3.0),
            rng.random_range(1.5..3.0),
        )
        .unwrap();
        let b = GraspRect5D::new(
            a.x + rng.random_range(-1.2..1.2),
            a.y + rng.random_range(-1.2..1.2),
            rng.random_range(0.0..core::f64::consts::PI),
            rng.random_range(1.5..3.0),
            rng.random_range(1.5..3.0),
        )
        .unwrap();
        let exact = jaccard(&rect5d_to_corners(&a), &rect5d_to_corners(&b));
        let sampled = raster_iou(&a, &b);
        let dev = (exact - sampled).abs();
        worst = worst.max(dev);
        assert!(dev < 1e-3, "clipping {exact} vs raster {sampled}");
    }

    let r = rect5d_to_corners(&GraspRect5D::new(5.0, 5.0, 0.35, 2.0, 4.0).unwrap());
    assert_eq!(jaccard(&r, &r), 1.0);
    let far = rect5d_to_corners(&GraspRect5D::new(50.0, 50.0, 0.35, 2.0, 4.0).unwrap());
    assert_eq!(jaccard(&r, &far), 0.0);
    println!("PASS c04 jaccard vs 1000x supersampled raster: worst |dev| {worst:.2e}");
}

#[test]
fn c05_forward_kinematics_validity() {
    let table = DhTable::baxter_left_arm();
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let q = random_in_limit_q(&table, &mut rng);
        let pose = table.forward_kinematics(&q).unwrap();
        worst = worst.max(pose.orthonormality_error());
    }
    assert!(worst < 1e-12, "orthonormality error {worst:.2e}");

    // Independent transform-chain oracle at zero angles: every row as a
    // product of elementary rotations/translations.
    let elementary = |row: &graspkit_core::kinematics::DhRow, theta: f64| {
        Pose6D::rotation_x(row.alpha_prev)
            * Pose6D::from_translation(Vector3::new(row.a_prev, 0.0, 0.0))
            * Pose6D::rotation_z(theta + row.theta_offset)
            * Pose6D::from_translation(Vector3::new(0.0, 0.0, row.d))
    };
    let mut oracle = table.base;
    for row in &table.rows {
        oracle = oracle * elementary(row, 0.0);
    }
    let fk0 = table.forward_kinematics(&JointVector::zeros()).unwrap();
    let dev = (fk0.matrix() - oracle.matrix()).abs().max();
    assert!(dev < 1e-12, "zero-pose deviation {dev:.2e}");
    // Frozen hand-derived zero pose: x = L1+L2+L4, z = L0-L3-L5.
    let p = fk0.translation();
    assert!((p.x - 0.80764).abs() < 1e-12);
    assert!(p.y.abs() < 1e-12);
    assert!((p.z - 0.19135).abs() < 1e-12);
    println!(
        "PASS c05 FK validity: worst orthonormality {worst:.2e}, zero-pose oracle dev {dev:.2e}"
    );
}

/// Central finite differences of the FK pose; orientation rows via
/// rotation-log differences.
fn finite_difference_jacobian(table: &DhTable, q: &JointVector, h: f64) -> JacobianMatrix {
    let log = |rel: Matrix3<f64>| -> Vector3<f64> {
        let current = Pose6D::identity();
        let target = Pose6D::from_parts(&rel, &Vector3::zeros());
        let e = pose_error(&current, &target);
        Vector3::new(e[3], e[4], e[5])
    };
    let mut j = JacobianMatrix::zeros();
    for i in 0..7 {
        let mut qp = *q;
        let mut qm = *q;
        qp[i] += h;
        qm[i] -= h;
        let tp = table.forward_kinematics_unchecked(&qp);
        let tm = table.forward_kinematics_unchecked(&qm);
        let dp = (tp.translation() - tm.translation()) / (2.0 * h);
        let w = log(tp.rotation() * tm.rotation().transpose()) / (2.0 * h);
        j.fixed_view_mut::<3, 1>(0, i).copy_from(&dp);
        j.fixed_view_mut::<3, 1>(3, i).copy_from(&w);
    }
    j
}

#[test]
fn c06_jacobian_matches_finite_differences() {
    let started = Instant::now();
    let table = DhTable::baxter_left_arm();
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let q = random_in_limit_q(&table, &mut rng);
        let dev = (geometric_jacobian(&table, &q) - finite_difference_jacobian(&table, &q, 1e-6))
            .abs()
            .max();
        worst = worst.max(dev);
        assert!(dev < 1e-6, "FD deviation {dev:.2e}");
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "jacobian check too slow: {elapsed:.2} s");
    println!("PASS c06 jacobian vs central differences: worst dev {worst:.2e} in {elapsed:.2} s");
}

#[test]
fn c07_moore_penrose_identities() {
    let table = DhTable::baxter_left_arm();
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    while checked < 100 {
        // Full-rank Jacobians only: resample configurations that wander
        // close to a singularity, where the exact pseudoinverse is not
        // defined to this accuracy.
        let q = random_in_limit_q(&table, &mut rng);
        let j = geometric_jacobian(&table, &q);
        let sigma_min = j.svd(false, false).singular_values.iter().fold(f64::INFINITY, |m, &s| m.min(s));
        if sigma_min < 1e-2 {
            continue;
        }
        let pinv = pseudo_inverse(&j).expect("sigma_min bounded away from zero");
        let d1 = ((j * pinv * j) - j).abs().max();
        let d2 = ((pinv * j * pinv) - pinv).abs().max();
        worst = worst.max(d1).max(d2);
        assert!(d1 < 1e-9 && d2 < 1e-9, "identity residuals {d1:.2e}, {d2:.2e}");
        checked += 1;
    }
    println!("PASS c07 Moore-Penrose identities on {checked} full-rank Jacobians: worst residual {worst:.2e}");
}

#[test]
fn c08_ik_round_trip() {
    let started = Instant::now();
    let table = DhTable::baxter_left_arm();
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let mut worst_pos = 0.0f64;
    let mut worst_rot = 0.0f64;
    let mut max_iterations = 0usize;
    for case in 0..100 {
        let q_true = random_in_limit_q(&table, &mut rng);
        let target = table.forward_kinematics(&q_true).unwrap();
        let mut initial = q_true;
        for i in 0..7 {
            initial[i] += rng.random_range(-0.1..0.1);
        }
        let (initial, _) = clamp_limits(&table, &initial);
        let result = ik_newton_raphson(&table, &target, &initial, 1e-8, 50)
            .unwrap_or_else(|e| panic!("case {case} failed: {e}"));
        assert!(result.converged, "case {case} did not converge: {result:?}");
        max_iterations = max_iterations.max(result.iterations);
        let reached = table.forward_kinematics_unchecked(&result.solution);
        let e = pose_error(&reached, &target);
        let pos = e.fixed_rows::<3>(0).norm();
        let rot = e.fixed_rows::<3>(3).norm();
        worst_pos = worst_pos.max(pos);
        worst_rot = worst_rot.max(rot);
        assert!(pos < 1e-6, "case {case} position error {pos:.2e}");
        assert!(rot < 1e-6, "case {case} orientation error {rot:.2e}");
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "IK sweep too slow: {elapsed:.2} s");
    println!(
        "PASS c08 IK round trip: 100/100 converged (max {max_iterations} iters), worst pos {worst_pos:.2e} m, rot {worst_rot:.2e} rad in {elapsed:.2} s"
    );
}

#[test]
fn c09_resolved_rate_consistency_and_log_layout() {
    let table = DhTable::baxter_left_arm();
    let start = JointVector([0.3, -0.6, 0.0, 0.8, 0.0, 0.9, 0.0]);
    let xdot = Vector6::new(0.0, 0.0, -0.01, 0.0, 0.0, 0.0);
    let traj = resolved_rate(&table, &start, |_| xdot, 0.01, 1.0).unwrap();
    assert!(!traj.truncated);
    assert_eq!(traj.samples.len(), 101);

    let mut worst_residual = 0.0f64;
    for s in &traj.samples {
        let j = geometric_jacobian(&table, &s.q);
        let qdot = nalgebra::SVector::<f64, 7>::from(s.qdot);
        let residual = (j * qdot - xdot).norm();
        worst_residual = worst_residual.max(residual);
        assert!(residual < 1e-9, "rate residual {residual:.2e}");
    }

    let z0 = table.forward_kinematics_unchecked(&traj.samples[0].q).translation().z;
    let z1 = table
        .forward_kinematics_unchecked(&traj.samples.last().unwrap().q)
        .translation()
        .z;
    let dz = z1 - z0;
    assert!((dz + 0.01).abs() < 1e-3, "end-effector dz {dz}");

    // Log layout: step, time, seven angles, seven velocities.
    let csv = trajectory_csv(&traj);
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 16);
    assert_eq!(header[0], "step");
    assert_eq!(header[1], "t");
    assert_eq!(header[2], "theta1");
    assert_eq!(header[8], "theta7");
    assert_eq!(header[9], "thetadot1");
    assert_eq!(header[15], "thetadot7");
    assert_eq!(csv.lines().count(), 102);
    let back = parse_trajectory_csv(&csv).unwrap();
    assert_eq!(back.samples.len(), 101);
    let mut prev = f64::NEG_INFINITY;
    for (a, b) in traj.samples.iter().zip(&back.samples) {
        assert!(b.t > prev);
        prev = b.t;
        for i in 0..7 {
            assert!((a.q[i] - b.q[i]).abs() < 1e-9);
            assert!((a.qdot[i] - b.qdot[i]).abs() < 1e-9);
        }
    }
    println!(
        "PASS c09 resolved rate: dz {dz:.5} m (target -0.01), worst rate residual {worst_residual:.2e}, log 14 value columns"
    );
}

#[test]
fn c10_rigid_fit_recovery() {
    let axis = nalgebra::Unit::new_normalize(Vector3::new(0.3, -0.5, 0.8));
    let truth = RigidTransform::new(
        nalgebra::Rotation3::from_axis_angle(&axis, 1.1).into_inner(),
        Vector3::new(0.45, -0.2, 0.3),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let cam: Vec<Vector3<f64>> = (0..40)
        .map(|_| {
            Vector3::new(
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
                rng.random_range(0.4..1.4),
            )
        })
        .collect();
    let rob: Vec<Vector3<f64>> = cam.iter().map(|p| truth.apply(p)).collect();

    let clean = fit_rigid_transform(&cam, &rob).unwrap();
    let rot_dev = (clean.transform.rotation - truth.rotation).abs().max();
    let t_dev = (clean.transform.translation - truth.translation).abs().max();
    assert!(rot_dev < 1e-9, "rotation deviation {rot_dev:.2e}");
    assert!(t_dev < 1e-9, "translation deviation {t_dev:.2e}");
    assert!(clean.rms_residual < 1e-9);

    // 1 mm isotropic noise: uniform +-1 mm per axis has an RMS vector norm
    // of exactly 1 mm.
    let noisy: Vec<Vector3<f64>> = rob
        .iter()
        .map(|p| {
            p + Vector3::new(
                rng.random_range(-1e-3..1e-3),
                rng.random_range(-1e-3..1e-3),
                rng.random_range(-1e-3..1e-3),
            )
        })
        .collect();
    let fit = fit_rigid_transform(&cam, &noisy).unwrap();
    assert!(fit.transform.is_valid(1e-9));
    assert!(fit.rms_residual <= 2e-3, "noisy rms {:.2e}", fit.rms_residual);
    println!(
        "PASS c10 rigid fit: noiseless dev {rot_dev:.2e}/{t_dev:.2e}, noisy rms {:.2e} m",
        fit.rms_residual
    );
}

#[test]
fn c11_cornell_round_trip_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    let mut records = Vec::new();
    for i in 0..20 {
        let n = rng.random_range(1..=3usize);
        let rects: Vec<GraspRect5D> = (0..n).map(|_| random_grasp(&mut rng)).collect();
        records.push((format!("pcd{i:04}"), rects));
    }

    let mut total = 0usize;
    for (id, rects) in &records {
        let mut text = String::new();
        for r in rects {
            for p in &rect5d_to_corners(r).corners {
                text += &format!("{:.4} {:.4}\n", p.x, p.y);
            }
        }
        let parsed = parse_cornell_rects(&text).unwrap();
        assert_eq!(parsed.rects.len(), rects.len(), "record {id}");
        assert_eq!(parsed.skipped, 0);
        for (corners, source) in parsed.rects.iter().zip(rects) {
            let converted = corners_to_rect5d(corners).unwrap();
            let img = render_paired_image(
                &RgbImage::new(IMAGE_SIZE, IMAGE_SIZE),
                &rect5d_to_corners(&converted),
                LINE_WIDTH,
            );
            let pose = extract_pose(&img).unwrap();
            let pred = graspkit_core::translation::refine_rect(&pose, converted.h, converted.w);
            let metric = rectangle_metric(&pred, &rect5d_to_corners(source));
            assert!(
                metric.matched,
                "record {id}: jaccard {}, angle {}",
                metric.jaccard, metric.angle_diff
            );
            total += 1;
        }
    }

    // Malformed and NaN handling.
    let nan_block = "10 10\nNaN 12\n30 30\n10 30\n";
    let parsed = parse_cornell_rects(nan_block).unwrap();
    assert_eq!((parsed.rects.len(), parsed.skipped), (0, 1));
    assert!(matches!(
        parse_cornell_rects("1 2\n3 4\n5 6\n"),
        Err(DatasetError::MalformedFile { .. })
    ));
    println!("PASS c11 Cornell round trip: {total} rectangles matched across 20 records");
}
