//! Raster types shared by the extraction and translation stages.
//!
//! Images are dense row-major buffers addressed as `(u, v)` = (column, row),
//! matching the pixel coordinates used by grasp rectangles. All types are
//! immutable values once built; mutation happens through explicit setters.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Error raised when constructing a raster from mismatched raw parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RasterError {
    /// Width or height is zero.
    EmptyDimensions,
    /// Buffer length does not equal `width * height`.
    LengthMismatch { expected: usize, got: usize },
}

impl fmt::Display for RasterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RasterError::EmptyDimensions => write!(f, "image dimensions must be non-zero"),
            RasterError::LengthMismatch { expected, got } => {
                write!(f, "pixel buffer length {got} does not match dimensions ({expected})")
            }
        }
    }
}

impl core::error::Error for RasterError {}

/// 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    /// Creates a black image of the given size. Panics if a dimension is zero.
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be non-zero");
        RgbImage {
            width,
            height,
            pixels: vec![[0, 0, 0]; width as usize * height as usize],
        }
    }

    /// Creates an image filled with one color.
    pub fn filled(width: u32, height: u32, color: [u8; 3]) -> Self {
        let mut img = RgbImage::new(width, height);
        img.pixels.fill(color);
        img
    }

    /// Wraps a row-major pixel buffer.
    pub fn from_pixels(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyDimensions);
        }
        let expected = width as usize * height as usize;
        if pixels.len() != expected {
            return Err(RasterError::LengthMismatch { expected, got: pixels.len() });
        }
        Ok(RgbImage { width, height, pixels })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn in_bounds(&self, u: i64, v: i64) -> bool {
        u >= 0 && v >= 0 && u < self.width as i64 && v < self.height as i64
    }

    pub fn get(&self, u: u32, v: u32) -> [u8; 3] {
        self.pixels[v as usize * self.width as usize + u as usize]
    }

    pub fn set(&mut self, u: u32, v: u32, color: [u8; 3]) {
        self.pixels[v as usize * self.width as usize + u as usize] = color;
    }

    /// Sets a pixel, silently dropping coordinates outside the image.
    pub fn set_clipped(&mut self, u: i64, v: i64, color: [u8; 3]) {
        if self.in_bounds(u, v) {
            self.set(u as u32, v as u32, color);
        }
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    /// Iterates `(u, v, rgb)` in row-major order.
    pub fn enumerate(&self) -> impl Iterator<Item = (u32, u32, [u8; 3])> + '_ {
        let w = self.width;
        self.pixels
            .iter()
            .enumerate()
            .map(move |(i, px)| ((i as u32) % w, (i as u32) / w, *px))
    }

    /// Draws a straight line segment with Bresenham's algorithm, thickened by
    /// stamping a `width x width` square at every line pixel. Out-of-bounds
    /// pixels are clipped.
    pub fn draw_thick_line(&mut self, p0: (i64, i64), p1: (i64, i64), color: [u8; 3], width: u32) {
        let stamp = width.max(1) as i64;
        let off = (stamp - 1) / 2;
        let (mut x0, mut y0) = p0;
        let (x1, y1) = p1;
        let dx = (x1 - x0).abs();
        let dy = -(y1 - y0).abs();
        let sx = if x0 < x1 { 1 } else { -1 };
        let sy = if y0 < y1 { 1 } else { -1 };
        let mut err = dx + dy;
        loop {
            for du in 0..stamp {
                for dv in 0..stamp {
                    self.set_clipped(x0 + du - off, y0 + dv - off, color);
                }
            }
            if x0 == x1 && y0 == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x0 += sx;
            }
            if e2 <= dx {
                err += dx;
                y0 += sy;
            }
        }
    }
}

/// 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    values: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be non-zero");
        GrayImage { width, height, values: vec![0; width as usize * height as usize] }
    }

    pub fn from_values(width: u32, height: u32, values: Vec<u8>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyDimensions);
        }
        let expected = width as usize * height as usize;
        if values.len() != expected {
            return Err(RasterError::LengthMismatch { expected, got: values.len() });
        }
        Ok(GrayImage { width, height, values })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, u: u32, v: u32) -> u8 {
        self.values[v as usize * self.width as usize + u as usize]
    }

    pub fn set(&mut self, u: u32, v: u32, value: u8) {
        self.values[v as usize * self.width as usize + u as usize] = value;
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }
}

/// Binary (object / background) mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be non-zero");
        BinaryMask { width, height, bits: vec![false; width as usize * height as usize] }
    }

    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyDimensions);
        }
        let expected = width as usize * height as usize;
        if bits.len() != expected {
            return Err(RasterError::LengthMismatch { expected, got: bits.len() });
        }
        Ok(BinaryMask { width, height, bits })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, u: u32, v: u32) -> bool {
        self.bits[v as usize * self.width as usize + u as usize]
    }

    pub fn set(&mut self, u: u32, v: u32, bit: bool) {
        self.bits[v as usize * self.width as usize + u as usize] = bit;
    }

    /// Iterates the coordinates of all set bits in row-major order.
    pub fn set_coords(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(move |(i, _)| ((i as u32) % w, (i as u32) / w))
    }
}

/// A set of integer pixel coordinates `(u, v)`.
///
/// Storage is canonical: sorted by `(v, u)` with duplicates removed, so any
/// computation over a cluster is independent of the order the pixels were
/// gathered in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelCluster {
    points: Vec<(u32, u32)>,
}

impl PixelCluster {
    pub fn new(mut points: Vec<(u32, u32)>) -> Self {
        points.sort_unstable_by_key(|&(u, v)| (v, u));
        points.dedup();
        PixelCluster { points }
    }

    pub fn points(&self) -> &[(u32, u32)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
