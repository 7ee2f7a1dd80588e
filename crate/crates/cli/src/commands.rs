//! Subcommand implementations. Batch commands never abort on a single bad
//! item: per-item errors go to stderr, processing continues, and the exit
//! code reflects whether anything failed.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};

use graspkit::config::ConfigFile;
use graspkit::formats::{
    atomic_write, image_id, list_images, load_arm_model, load_correspondences, load_depth_png,
    load_intrinsics, load_rgb, load_rigid_transform, save_rgb_png,
};
use graspkit::plot::plot_joint_angles;
use graspkit_core::angle::deg_to_rad;
use graspkit_core::camera::{deproject_with_depth, fit_rigid_transform, map_grasp_to_robot};
use graspkit_core::dataset::{
    evaluate as evaluate_records, format_annotations, parse_annotations, parse_cornell_rects,
    render_paired_image, AnnotationRecord, CornellRecord, DatasetError,
};
use graspkit_core::extraction::extract_pose;
use graspkit_core::geometry::Pose6D;
use graspkit_core::kinematics::{
    ik_newton_raphson, parse_trajectory_csv, resolved_rate, trajectory_csv, JointVector,
    DEFAULT_IK_EPSILON,
};
use graspkit_core::nalgebra::{Matrix3, Vector3, Vector6};
use graspkit_core::translation::{
    binarize, centroid, otsu_threshold, refine_rect, to_gray, translate_rect, Centroid,
    DEFAULT_BINARIZE_THRESHOLD, DEFAULT_REFINED_H, DEFAULT_REFINED_W,
};
use graspkit_core::{ExtractedPose, RgbImage};

/// Expands directory arguments into their image files and sorts everything
/// by id; nonexistent paths are kept so they fail per-item with a report.
fn gather_inputs(inputs: &[PathBuf]) -> Vec<PathBuf> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            match list_images(input) {
                Ok(found) => files.extend(found),
                Err(e) => eprintln!("error: {e:#}"),
            }
        } else {
            files.push(input.clone());
        }
    }
    files.sort_by_key(|p| image_id(p));
    files
}

fn finish_batch(failures: usize) -> Result<()> {
    if failures > 0 {
        bail!("{failures} item(s) failed");
    }
    Ok(())
}

fn write_or_print(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(path) => atomic_write(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn parse_list<const N: usize>(s: &str, what: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        bail!("{what} expects {N} comma-separated values, found {}", parts.len());
    }
    let mut out = [0.0; N];
    for (slot, tok) in out.iter_mut().zip(&parts) {
        *slot = tok.parse().with_context(|| format!("{what}: not a number: {tok:?}"))?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// prep

#[derive(Clone, Copy, ValueEnum)]
pub enum FilterKind {
    Nearest,
    Bilinear,
}

#[derive(Args)]
pub struct PrepArgs {
    /// Input images or directories
    #[arg(required = true)]
    pub images: Vec<PathBuf>,
    /// Output directory
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Center-crop width before resizing
    #[arg(long, default_value_t = 300)]
    pub crop_width: u32,
    /// Center-crop height before resizing
    #[arg(long, default_value_t = 300)]
    pub crop_height: u32,
    /// Output width
    #[arg(long, default_value_t = 256)]
    pub width: u32,
    /// Output height
    #[arg(long, default_value_t = 256)]
    pub height: u32,
    /// Resampling filter
    #[arg(long, value_enum, default_value_t = FilterKind::Bilinear)]
    pub filter: FilterKind,
}

pub fn prep(args: &PrepArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out_dir)?;
    let filter = match args.filter {
        FilterKind::Nearest => image::imageops::FilterType::Nearest,
        FilterKind::Bilinear => image::imageops::FilterType::Triangle,
    };
    let mut failures = 0usize;
    for path in gather_inputs(&args.images) {
        let result = (|| -> Result<()> {
            let img = image::open(&path)
                .with_context(|| format!("cannot open image {}", path.display()))?
                .to_rgb8();
            let (w, h) = img.dimensions();
            let cw = args.crop_width.min(w);
            let ch = args.crop_height.min(h);
            let cropped =
                image::imageops::crop_imm(&img, (w - cw) / 2, (h - ch) / 2, cw, ch).to_image();
            let resized = image::imageops::resize(&cropped, args.width, args.height, filter);
            let out = args.out_dir.join(format!("{}.png", image_id(&path)));
            resized.save(&out).with_context(|| format!("cannot write {}", out.display()))?;
            Ok(())
        })();
        if let Err(e) = result {
            eprintln!("error: {}: {e:#}", path.display());
            failures += 1;
        }
    }
    finish_batch(failures)
}

// ---------------------------------------------------------------------------
// extract / translate

#[derive(Args)]
pub struct ExtractArgs {
    /// Tagged images or directories
    #[arg(required = true)]
    pub images: Vec<PathBuf>,
    /// Write `<id> <x> <y> <theta>` lines here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn extract(args: &ExtractArgs) -> Result<()> {
    let mut lines = Vec::new();
    let mut failures = 0usize;
    for path in gather_inputs(&args.images) {
        match load_rgb(&path).and_then(|img| Ok(extract_pose(&img)?)) {
            Ok(pose) => lines.push(format!(
                "{} {:.6} {:.6} {:.6}\n",
                image_id(&path),
                pose.center.x,
                pose.center.y,
                pose.theta
            )),
            Err(e) => {
                eprintln!("error: {}: {e:#}", path.display());
                failures += 1;
            }
        }
    }
    write_or_print(args.out.as_deref(), &lines.concat())?;
    finish_batch(failures)
}

#[derive(Args)]
pub struct TranslateArgs {
    /// Tagged images or directories
    #[arg(required = true)]
    pub images: Vec<PathBuf>,
    /// Write `<id> <x> <y> <theta>` lines here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Binarization threshold (0-255)
    #[arg(long)]
    pub threshold: Option<u8>,
    /// Pick the threshold per image with Otsu's method
    #[arg(long)]
    pub otsu: bool,
    /// Invert the mask (dark object on a light table)
    #[arg(long)]
    pub invert: bool,
    /// Key-value config file (flags take precedence)
    #[arg(long)]
    pub config: Option<PathBuf>,
}

struct SegmentOptions {
    threshold: Option<u8>,
    otsu: bool,
    invert: bool,
}

fn object_centroid(img: &RgbImage, seg: &SegmentOptions) -> Result<Centroid> {
    let gray = to_gray(img);
    let threshold = if seg.otsu {
        otsu_threshold(&gray)
    } else {
        seg.threshold.unwrap_or(DEFAULT_BINARIZE_THRESHOLD)
    };
    Ok(centroid(&binarize(&gray, threshold, seg.invert))?)
}

fn translated_pose(img: &RgbImage, seg: &SegmentOptions) -> Result<ExtractedPose> {
    let pose = extract_pose(img)?;
    let c = object_centroid(img, seg)?;
    Ok(translate_rect(&pose, &c))
}

pub fn translate(args: &TranslateArgs) -> Result<()> {
    let cfg = ConfigFile::load_optional(args.config.as_deref())?;
    let seg = SegmentOptions {
        threshold: Some(cfg.resolve(args.threshold, "threshold", DEFAULT_BINARIZE_THRESHOLD)?),
        otsu: cfg.resolve_bool(args.otsu.then_some(true), "otsu", false)?,
        invert: cfg.resolve_bool(args.invert.then_some(true), "invert", false)?,
    };
    let mut lines = Vec::new();
    let mut failures = 0usize;
    for path in gather_inputs(&args.images) {
        match load_rgb(&path).and_then(|img| translated_pose(&img, &seg)) {
            Ok(pose) => lines.push(format!(
                "{} {:.6} {:.6} {:.6}\n",
                image_id(&path),
                pose.center.x,
                pose.center.y,
                pose.theta
            )),
            Err(e) => {
                eprintln!("error: {}: {e:#}", path.display());
                failures += 1;
            }
        }
    }
    write_or_print(args.out.as_deref(), &lines.concat())?;
    finish_batch(failures)
}

// ---------------------------------------------------------------------------
// annotate

#[derive(Args)]
pub struct AnnotateArgs {
    /// Tagged images or directories
    #[arg(required = true)]
    pub images: Vec<PathBuf>,
    /// Annotation file to write (`<id> <x> <y> <theta> <h> <w>` lines)
    #[arg(long)]
    pub out: PathBuf,
    /// Skip the centroid translation (hollow / irregular objects)
    #[arg(long)]
    pub no_translate: bool,
    /// Refined plate-side length in pixels
    #[arg(long = "h")]
    pub h: Option<f64>,
    /// Refined opening-side length in pixels
    #[arg(long = "w")]
    pub w: Option<f64>,
    /// Binarization threshold (0-255)
    #[arg(long)]
    pub threshold: Option<u8>,
    /// Pick the threshold per image with Otsu's method
    #[arg(long)]
    pub otsu: bool,
    /// Invert the mask (dark object on a light table)
    #[arg(long)]
    pub invert: bool,
    /// Key-value config file (flags take precedence)
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn annotate(args: &AnnotateArgs) -> Result<()> {
    let cfg = ConfigFile::load_optional(args.config.as_deref())?;
    let translate_on =
        cfg.resolve_bool(args.no_translate.then_some(false), "translate", true)?;
    let h = cfg.resolve(args.h, "h", DEFAULT_REFINED_H)?;
    let w = cfg.resolve(args.w, "w", DEFAULT_REFINED_W)?;
    let seg = SegmentOptions {
        threshold: Some(cfg.resolve(args.threshold, "threshold", DEFAULT_BINARIZE_THRESHOLD)?),
        otsu: cfg.resolve_bool(args.otsu.then_some(true), "otsu", false)?,
        invert: cfg.resolve_bool(args.invert.then_some(true), "invert", false)?,
    };

    let mut records = Vec::new();
    let mut failures = 0usize;
    for path in gather_inputs(&args.images) {
        let result = load_rgb(&path).and_then(|img| {
            let pose = if translate_on {
                translated_pose(&img, &seg)?
            } else {
                extract_pose(&img)?
            };
            Ok(AnnotationRecord { id: image_id(&path), grasp: refine_rect(&pose, h, w) })
        });
        match result {
            Ok(record) => records.push(record),
            Err(e) => {
                eprintln!("error: {}: {e:#}", path.display());
                failures += 1;
            }
        }
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    atomic_write(&args.out, &format_annotations(&records))?;
    println!("wrote {} annotation(s) to {}", records.len(), args.out.display());
    finish_batch(failures)
}

// ---------------------------------------------------------------------------
// render

#[derive(Args)]
pub struct RenderArgs {
    /// Scene images or directories
    #[arg(required = true)]
    pub images: Vec<PathBuf>,
    /// Directory holding `<id>cpos.txt` rectangle files
    #[arg(long)]
    pub rects: PathBuf,
    /// Output directory for paired images
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Edge thickness in pixels
    #[arg(long)]
    pub line_width: Option<u32>,
    /// Key-value config file (flags take precedence)
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Rectangle file for an image id: `pcd0100r.png` pairs with
/// `pcd0100cpos.txt`, so a trailing `r` is dropped when that file exists.
fn rect_file_for(rects_dir: &Path, id: &str) -> PathBuf {
    if let Some(trimmed) = id.strip_suffix('r') {
        let candidate = rects_dir.join(format!("{trimmed}cpos.txt"));
        if candidate.exists() {
            return candidate;
        }
    }
    rects_dir.join(format!("{id}cpos.txt"))
}

pub fn render(args: &RenderArgs) -> Result<()> {
    let cfg = ConfigFile::load_optional(args.config.as_deref())?;
    let line_width = cfg.resolve(args.line_width, "line_width", 3u32)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let mut failures = 0usize;
    let mut written = 0usize;
    for path in gather_inputs(&args.images) {
        let id = image_id(&path);
        let result = (|| -> Result<usize> {
            let img = load_rgb(&path)?;
            let rect_path = rect_file_for(&args.rects, &id);
            let text = std::fs::read_to_string(&rect_path)
                .with_context(|| format!("cannot read rectangles {}", rect_path.display()))?;
            let parsed = parse_cornell_rects(&text)?;
            if parsed.skipped > 0 {
                eprintln!("note: {}: skipped {} non-finite block(s)", rect_path.display(), parsed.skipped);
            }
            for (k, rect) in parsed.rects.iter().enumerate() {
                let paired = render_paired_image(&img, rect, line_width);
                save_rgb_png(&args.out_dir.join(format!("{id}_{k}.png")), &paired)?;
            }
            Ok(parsed.rects.len())
        })();
        match result {
            Ok(n) => written += n,
            Err(e) => {
                eprintln!("error: {}: {e:#}", path.display());
                failures += 1;
            }
        }
    }
    println!("wrote {written} paired image(s) to {}", args.out_dir.display());
    finish_batch(failures)
}

// ---------------------------------------------------------------------------
// evaluate

#[derive(Args)]
pub struct EvaluateArgs {
    /// Annotation file with predictions
    #[arg(long)]
    pub pred: PathBuf,
    /// Directory of ground-truth `<id>cpos.txt` files
    #[arg(long)]
    pub truth_dir: PathBuf,
    /// Write the per-item CSV here
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let pred_text = std::fs::read_to_string(&args.pred)
        .with_context(|| format!("cannot read predictions {}", args.pred.display()))?;
    let mut preds = parse_annotations(&pred_text)?;

    let mut truths = Vec::new();
    let mut skipped = 0usize;
    for entry in std::fs::read_dir(&args.truth_dir)
        .with_context(|| format!("cannot list {}", args.truth_dir.display()))?
    {
        let path = entry?.path();
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let Some(id) = name.strip_suffix("cpos.txt") else { continue };
        let text = std::fs::read_to_string(&path)?;
        let parsed =
            parse_cornell_rects(&text).with_context(|| format!("in {}", path.display()))?;
        skipped += parsed.skipped;
        truths.push(CornellRecord { id: id.to_string(), rectangles: parsed.rects });
    }
    if skipped > 0 {
        eprintln!("note: skipped {skipped} non-finite rectangle block(s) in ground truth");
    }

    // Image files carry a trailing `r` that the rectangle files do not.
    let truth_ids: BTreeSet<&str> = truths.iter().map(|t| t.id.as_str()).collect();
    for pred in &mut preds {
        if !truth_ids.contains(pred.id.as_str()) {
            if let Some(trimmed) = pred.id.strip_suffix('r') {
                if truth_ids.contains(trimmed) {
                    pred.id = trimmed.to_string();
                }
            }
        }
    }

    match evaluate_records(&preds, &truths) {
        Ok(report) => {
            println!("{}", report.summary());
            if let Some(csv) = &args.csv {
                atomic_write(csv, &report.per_item_csv())?;
            }
            Ok(())
        }
        Err(DatasetError::MissingGroundTruth { ids }) => {
            for id in &ids {
                eprintln!("missing ground truth: {id}");
            }
            bail!("{} prediction id(s) have no ground truth", ids.len());
        }
        Err(e) => Err(e.into()),
    }
}

// ---------------------------------------------------------------------------
// calibrate / map

#[derive(Args)]
pub struct CalibrateArgs {
    /// Correspondence CSV: `u,v,d,rx,ry,rz`
    #[arg(long)]
    pub correspondences: PathBuf,
    /// Intrinsics config (`fx=`, `fy=`, `cx=`, `cy=`)
    #[arg(long)]
    pub intrinsics: PathBuf,
    /// Calibration file to write
    #[arg(long)]
    pub out: PathBuf,
}

pub fn calibrate(args: &CalibrateArgs) -> Result<()> {
    let k = load_intrinsics(&args.intrinsics)?;
    let rows = load_correspondences(&args.correspondences)?;
    let mut camera_points = Vec::with_capacity(rows.len());
    let mut robot_points = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.depth_m <= 0.0 {
            bail!("correspondence {} has non-positive depth", i + 1);
        }
        camera_points.push(deproject_with_depth(row.u, row.v, row.depth_m, &k));
        robot_points.push(row.robot);
    }
    let fit = fit_rigid_transform(&camera_points, &robot_points)?;
    atomic_write(
        &args.out,
        &graspkit_core::camera::format_rigid_transform(&fit.transform, Some(fit.rms_residual)),
    )?;
    println!(
        "fitted camera-to-robot transform from {} observation(s), rms residual {:.6} m",
        rows.len(),
        fit.rms_residual
    );
    Ok(())
}

#[derive(Args)]
pub struct MapArgs {
    /// Annotation file with image-space grasps
    #[arg(long)]
    pub annotations: PathBuf,
    /// Depth PNG (16-bit, millimeters), or a directory of per-id depth files
    #[arg(long)]
    pub depth: PathBuf,
    /// Intrinsics config
    #[arg(long)]
    pub intrinsics: PathBuf,
    /// Calibration file from `calibrate`
    #[arg(long)]
    pub calibration: PathBuf,
    /// Robot-grasp file to write: `<id> <x> <y> <z> <yaw>` lines
    #[arg(long)]
    pub out: PathBuf,
}

fn depth_file_for(depth_dir: &Path, id: &str) -> Result<PathBuf> {
    let mut candidates = vec![
        depth_dir.join(format!("{id}.png")),
        depth_dir.join(format!("{id}d.png")),
    ];
    if let Some(trimmed) = id.strip_suffix('r') {
        candidates.push(depth_dir.join(format!("{trimmed}d.png")));
    }
    candidates
        .iter()
        .find(|p| p.exists())
        .cloned()
        .ok_or_else(|| anyhow!("no depth image for id {id} in {}", depth_dir.display()))
}

pub fn map(args: &MapArgs) -> Result<()> {
    let k = load_intrinsics(&args.intrinsics)?;
    let transform = load_rigid_transform(&args.calibration)?;
    let text = std::fs::read_to_string(&args.annotations)
        .with_context(|| format!("cannot read annotations {}", args.annotations.display()))?;
    let mut records = parse_annotations(&text)?;
    records.sort_by(|a, b| a.id.cmp(&b.id));

    let shared_depth =
        if args.depth.is_dir() { None } else { Some(load_depth_png(&args.depth)?) };

    let mut lines = Vec::new();
    let mut failures = 0usize;
    for record in &records {
        let result = (|| -> Result<String> {
            let depth = match &shared_depth {
                Some(d) => d.clone(),
                None => load_depth_png(&depth_file_for(&args.depth, &record.id)?)?,
            };
            let grasp = map_grasp_to_robot(&record.grasp, &depth, &k, &transform)?;
            Ok(format!(
                "{} {:.6} {:.6} {:.6} {:.6}\n",
                record.id, grasp.position.x, grasp.position.y, grasp.position.z, grasp.yaw
            ))
        })();
        match result {
            Ok(line) => lines.push(line),
            Err(e) => {
                eprintln!("skipped {}: {e:#}", record.id);
                failures += 1;
            }
        }
    }
    atomic_write(&args.out, &lines.concat())?;
    println!("mapped {} grasp(s) to {}", lines.len(), args.out.display());
    finish_batch(failures)
}

// ---------------------------------------------------------------------------
// fk / ik / traj

#[derive(Args)]
pub struct FkArgs {
    /// Seven joint angles, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub joints: String,
    /// Interpret the joint angles as degrees
    #[arg(long)]
    pub degrees: bool,
    /// Arm model config file (built-in model when omitted)
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Append the tool transform past the wrist flange
    #[arg(long)]
    pub with_tool: bool,
}

fn parse_joints(s: &str, degrees: bool) -> Result<JointVector> {
    let mut values = parse_list::<7>(s, "--joints")?;
    if degrees {
        for v in &mut values {
            *v = deg_to_rad(*v);
        }
    }
    Ok(JointVector(values))
}

pub fn fk(args: &FkArgs) -> Result<()> {
    let table = load_arm_model(args.model.as_deref(), args.with_tool)?;
    let q = parse_joints(&args.joints, args.degrees)?;
    let pose = table.forward_kinematics(&q)?;
    let m = pose.matrix();
    for r in 0..4 {
        println!(
            "{:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            m[(r, 0)],
            m[(r, 1)],
            m[(r, 2)],
            m[(r, 3)]
        );
    }
    let p = pose.translation();
    println!("position: {:.6} {:.6} {:.6}", p.x, p.y, p.z);
    Ok(())
}

#[derive(Args)]
pub struct IkArgs {
    /// Target position `x,y,z` in meters (robot base frame)
    #[arg(long, allow_hyphen_values = true)]
    pub position: String,
    /// Target orientation as `roll,pitch,yaw` radians (ZYX convention)
    #[arg(long, allow_hyphen_values = true)]
    pub rpy: Option<String>,
    /// Initial joint guess, comma separated (defaults to zeros)
    #[arg(long, allow_hyphen_values = true)]
    pub initial: Option<String>,
    /// Stop when the joint update norm falls below this
    #[arg(long)]
    pub eps: Option<f64>,
    /// Iteration budget
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Arm model config file (built-in model when omitted)
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Append the tool transform past the wrist flange
    #[arg(long)]
    pub with_tool: bool,
    /// Key-value config file (flags take precedence)
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn rotation_zyx(roll: f64, pitch: f64, yaw: f64) -> Matrix3<f64> {
    let rz = Pose6D::rotation_z(yaw);
    let ry = Pose6D::rotation_y(pitch);
    let rx = Pose6D::rotation_x(roll);
    (rz * ry * rx).rotation()
}

pub fn ik(args: &IkArgs) -> Result<()> {
    let cfg = ConfigFile::load_optional(args.config.as_deref())?;
    let eps = cfg.resolve(args.eps, "eps", DEFAULT_IK_EPSILON)?;
    let max_iter = cfg.resolve(args.max_iter, "max_iter", 50usize)?;
    let table = load_arm_model(args.model.as_deref(), args.with_tool)?;

    let [x, y, z] = parse_list::<3>(&args.position, "--position")?;
    let rotation = match &args.rpy {
        Some(s) => {
            let [roll, pitch, yaw] = parse_list::<3>(s, "--rpy")?;
            rotation_zyx(roll, pitch, yaw)
        }
        None => Matrix3::identity(),
    };
    let target = Pose6D::from_parts(&rotation, &Vector3::new(x, y, z));
    let initial = match &args.initial {
        Some(s) => parse_joints(s, false)?,
        None => JointVector::zeros(),
    };

    let result = ik_newton_raphson(&table, &target, &initial, eps, max_iter)?;
    let q = result.solution.as_array();
    println!(
        "joints: {:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
        q[0], q[1], q[2], q[3], q[4], q[5], q[6]
    );
    println!(
        "converged: {} after {} iteration(s), final error {:.3e}",
        result.converged, result.iterations, result.final_error_norm
    );
    if !result.converged {
        bail!("did not converge within {max_iter} iterations");
    }
    Ok(())
}

#[derive(Args)]
pub struct TrajArgs {
    /// Starting joint angles, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub start: String,
    /// Constant Cartesian velocity `vx,vy,vz,wx,wy,wz` (m/s, rad/s)
    #[arg(long, allow_hyphen_values = true)]
    pub velocity: String,
    /// Integration step in seconds
    #[arg(long)]
    pub dt: Option<f64>,
    /// Trajectory duration in seconds
    #[arg(long)]
    pub duration: Option<f64>,
    /// Trajectory CSV to write
    #[arg(long)]
    pub out: PathBuf,
    /// Also render a joint-angle-vs-time plot PNG from the written CSV
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Arm model config file (built-in model when omitted)
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Append the tool transform past the wrist flange
    #[arg(long)]
    pub with_tool: bool,
    /// Key-value config file (flags take precedence)
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn traj(args: &TrajArgs) -> Result<()> {
    let cfg = ConfigFile::load_optional(args.config.as_deref())?;
    let dt = cfg.resolve(args.dt, "dt", 0.01)?;
    let duration = cfg.resolve(args.duration, "duration", 1.0)?;
    let table = load_arm_model(args.model.as_deref(), args.with_tool)?;
    let start = parse_joints(&args.start, false)?;
    let v = parse_list::<6>(&args.velocity, "--velocity")?;
    let xdot = Vector6::new(v[0], v[1], v[2], v[3], v[4], v[5]);

    let trajectory = resolved_rate(&table, &start, |_| xdot, dt, duration)?;
    atomic_write(&args.out, &trajectory_csv(&trajectory))?;
    println!(
        "wrote {} sample(s) to {}",
        trajectory.samples.len(),
        args.out.display()
    );

    if let Some(plot_path) = &args.plot {
        // The plot is rendered from the CSV just written, so any consumer of
        // the log sees exactly what the figure shows.
        let text = std::fs::read_to_string(&args.out)?;
        let parsed = parse_trajectory_csv(&text)?;
        save_rgb_png(plot_path, &plot_joint_angles(&parsed, 800, 600))?;
        println!("wrote joint-angle plot to {}", plot_path.display());
    }

    if trajectory.truncated {
        bail!("trajectory truncated at a near-singular configuration");
    }
    Ok(())
}
