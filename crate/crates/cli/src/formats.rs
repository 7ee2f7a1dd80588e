//! Disk IO for the toolkit's file formats.
//!
//! Rasters are PNG (RGB for scenes, 16-bit grayscale millimeters for
//! depth). Text formats (intrinsics, arm model, correspondences,
//! calibration, annotations, trajectory CSV) are parsed by the core crate;
//! here they just get read and written atomically.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use image::{DynamicImage, ImageBuffer, Luma, Rgb};

use graspkit_core::camera::{
    parse_correspondences, parse_intrinsics, parse_rigid_transform, CameraIntrinsics,
    Correspondence, RigidTransform,
};
use graspkit_core::kinematics::{parse_arm_config, DhTable, BAXTER_LINK_LENGTHS_M};
use graspkit_core::{DepthImage, RgbImage};

/// Loads any image the PNG/JPEG decoders accept and converts to RGB.
pub fn load_rgb(path: &Path) -> Result<RgbImage> {
    let img = image::open(path)
        .with_context(|| format!("cannot open image {}", path.display()))?
        .to_rgb8();
    let (width, height) = img.dimensions();
    let pixels = img.pixels().map(|p| p.0).collect();
    RgbImage::from_pixels(width, height, pixels)
        .with_context(|| format!("bad raster in {}", path.display()))
}

pub fn save_rgb_png(path: &Path, img: &RgbImage) -> Result<()> {
    let flat: Vec<u8> = img.pixels().iter().flatten().copied().collect();
    let buf: ImageBuffer<Rgb<u8>, Vec<u8>> =
        ImageBuffer::from_raw(img.width(), img.height(), flat)
            .expect("pixel count matches dimensions");
    buf.save(path)
        .with_context(|| format!("cannot write image {}", path.display()))
}

/// Loads a 16-bit grayscale PNG holding millimeters per unit; zero stays
/// the invalid-sample marker.
pub fn load_depth_png(path: &Path) -> Result<DepthImage> {
    let img = image::open(path)
        .with_context(|| format!("cannot open depth image {}", path.display()))?
        .to_luma16();
    let (width, height) = img.dimensions();
    let meters: Vec<f64> = img.pixels().map(|p| p.0[0] as f64 / 1000.0).collect();
    DepthImage::from_meters(width, height, meters)
        .context("depth buffer does not match its dimensions")
}

pub fn save_depth_png(path: &Path, depth: &DepthImage) -> Result<()> {
    let mm: Vec<u16> = depth
        .data()
        .iter()
        .map(|m| (m * 1000.0).round().clamp(0.0, u16::MAX as f64) as u16)
        .collect();
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(depth.width(), depth.height(), mm)
            .expect("depth count matches dimensions");
    DynamicImage::ImageLuma16(buf)
        .save(path)
        .with_context(|| format!("cannot write depth image {}", path.display()))
}

pub fn load_intrinsics(path: &Path) -> Result<CameraIntrinsics> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read intrinsics {}", path.display()))?;
    parse_intrinsics(&text).with_context(|| format!("in {}", path.display()))
}

/// Loads an arm model config, or the built-in arm when no path is given.
/// `with_tool` appends the L6 tool transform to the built-in model.
pub fn load_arm_model(path: Option<&Path>, with_tool: bool) -> Result<DhTable> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("cannot read arm model {}", p.display()))?;
            let table = parse_arm_config(&text).with_context(|| format!("in {}", p.display()))?;
            Ok(if with_tool && table.tool.is_none() {
                table.with_tool_z(BAXTER_LINK_LENGTHS_M[6])
            } else {
                table
            })
        }
        None => {
            let table = DhTable::baxter_left_arm();
            Ok(if with_tool {
                table.with_tool_z(BAXTER_LINK_LENGTHS_M[6])
            } else {
                table
            })
        }
    }
}

pub fn load_correspondences(path: &Path) -> Result<Vec<Correspondence>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read correspondences {}", path.display()))?;
    parse_correspondences(&text).with_context(|| format!("in {}", path.display()))
}

pub fn load_rigid_transform(path: &Path) -> Result<RigidTransform> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read calibration {}", path.display()))?;
    parse_rigid_transform(&text).with_context(|| format!("in {}", path.display()))
}

/// Writes through a temporary file in the target directory and renames, so
/// readers never observe a half-written file.
pub fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create temp file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// All PNG/JPEG files directly inside `dir`, sorted by name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("cannot list {}", dir.display()))? {
        let path = entry?.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if matches!(ext.as_deref(), Some("png" | "jpg" | "jpeg")) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Image id: the file stem, matching the dataset convention of naming
/// annotation files after their image.
pub fn image_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}
