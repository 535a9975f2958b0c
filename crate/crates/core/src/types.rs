//! Shared domain types: tracker state, candidate regions, raw frames, and the
//! region arithmetic that binds sub-pixel state to integer pixel rasters.

use thiserror::Error;

/// State of the tracked object: centroid position, velocity, and box size,
/// all in pixel units (velocities in pixels per frame).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub hx: f64,
    pub hy: f64,
}

impl StateVector {
    pub fn new(x: f64, y: f64, vx: f64, vy: f64, hx: f64, hy: f64) -> Self {
        Self { x, y, vx, vy, hx, hy }
    }

    pub fn components(&self) -> [f64; 6] {
        [self.x, self.y, self.vx, self.vy, self.hx, self.hy]
    }

    pub fn from_components(c: [f64; 6]) -> Self {
        Self::new(c[0], c[1], c[2], c[3], c[4], c[5])
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|v| v.is_finite())
    }
}

/// Axis-aligned box of size `w`×`h` centered at `(cx, cy)`.
///
/// Centers and sizes are real-valued; the box only becomes a set of pixels
/// through [`rasterize_region`], which is the one place the sub-pixel to
/// integer-pixel convention lives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

impl Region {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        Self { cx, cy, w, h }
    }
}

/// Inclusive integer pixel bounds of a rasterized region, guaranteed to lie
/// inside the frame and to contain at least one pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelRect {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl PixelRect {
    pub fn width(&self) -> u32 {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> u32 {
        self.y1 - self.y0 + 1
    }

    pub fn pixel_count(&self) -> u64 {
        u64::from(self.width()) * u64::from(self.height())
    }
}

/// Builds the candidate region implied by a state: the box centered at the
/// state's centroid with the box size rounded to whole pixels
/// (half-away-from-zero) and floored at 1.
pub fn region_from_state(s: &StateVector) -> Region {
    Region {
        cx: s.x,
        cy: s.y,
        w: s.hx.round().max(1.0),
        h: s.hy.round().max(1.0),
    }
}

/// Intersects a region with the frame `[0, w]×[0, h]` and recomputes the
/// centroid from the clipped box. An empty intersection collapses to a 1×1
/// box at the frame border point nearest the original centroid.
pub fn clamp_region(r: &Region, frame_w: u32, frame_h: u32) -> Region {
    let fw = f64::from(frame_w);
    let fh = f64::from(frame_h);
    let x_lo = (r.cx - r.w / 2.0).max(0.0);
    let x_hi = (r.cx + r.w / 2.0).min(fw);
    let y_lo = (r.cy - r.h / 2.0).max(0.0);
    let y_hi = (r.cy + r.h / 2.0).min(fh);
    if x_hi <= x_lo || y_hi <= y_lo {
        return Region::new(r.cx.clamp(0.0, fw), r.cy.clamp(0.0, fh), 1.0, 1.0);
    }
    let (cx, w) = clamp_axis(r.cx, x_lo, x_hi, fw);
    let (cy, h) = clamp_axis(r.cy, y_lo, y_hi, fh);
    Region { cx, cy, w, h }
}

// Clipped extents below one pixel keep the original (frame-clamped) center
// at extent 1 instead of the midpoint, so re-clamping is a fixed point.
fn clamp_axis(center: f64, lo: f64, hi: f64, limit: f64) -> (f64, f64) {
    let extent = hi - lo;
    if extent < 1.0 {
        (center.clamp(0.0, limit), 1.0)
    } else {
        ((lo + hi) / 2.0, extent)
    }
}

/// Rasterizes a region to inclusive pixel bounds.
///
/// A pixel `(j, i)` belongs to the region when its center `(j+0.5, i+0.5)`
/// falls in the half-open box `[c-s/2, c+s/2)` on both axes. The result is
/// intersected with the frame; a raster that would come out empty snaps to
/// the single in-frame pixel nearest the box center, so the result always
/// holds at least one pixel.
pub fn rasterize_region(r: &Region, frame_w: u32, frame_h: u32) -> PixelRect {
    let (x0, x1) = rasterize_axis(r.cx, r.w, frame_w);
    let (y0, y1) = rasterize_axis(r.cy, r.h, frame_h);
    PixelRect { x0, y0, x1, y1 }
}

fn rasterize_axis(center: f64, size: f64, limit: u32) -> (u32, u32) {
    let max_idx = i64::from(limit) - 1;
    let lo = center - size / 2.0;
    let hi = center + size / 2.0;
    // Smallest j with j+0.5 >= lo, largest j with j+0.5 < hi.
    let first = (lo - 0.5).ceil() as i64;
    let last = (hi - 0.5).ceil() as i64 - 1;
    if first > last || last < 0 || first > max_idx {
        let nearest = (((lo + hi) / 2.0).floor() as i64).clamp(0, max_idx);
        return (nearest as u32, nearest as u32);
    }
    (first.clamp(0, max_idx) as u32, last.clamp(0, max_idx) as u32)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FrameError {
    #[error("pixel buffer holds {got} bytes, expected {expected} (width*height*3)")]
    BufferSize { expected: usize, got: usize },
    #[error("frame dimensions must be at least 1x1")]
    EmptyDimensions,
}

/// An owned 8-bit RGB raster plus its position `index` in the sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub width: u32,
    pub height: u32,
    pub index: u32,
    pixels: Vec<u8>,
}

impl Frame {
    /// Wraps a row-major RGB byte buffer; the length must be `w*h*3`.
    pub fn new(width: u32, height: u32, index: u32, pixels: Vec<u8>) -> Result<Self, FrameError> {
        if width == 0 || height == 0 {
            return Err(FrameError::EmptyDimensions);
        }
        let expected = width as usize * height as usize * 3;
        if pixels.len() != expected {
            return Err(FrameError::BufferSize { expected, got: pixels.len() });
        }
        Ok(Self { width, height, index, pixels })
    }

    /// A frame filled with a single color.
    pub fn filled(width: u32, height: u32, index: u32, rgb: [u8; 3]) -> Self {
        let n = width as usize * height as usize;
        let mut pixels = Vec::with_capacity(n * 3);
        for _ in 0..n {
            pixels.extend_from_slice(&rgb);
        }
        Self { width, height, index, pixels }
    }

    #[inline]
    pub fn rgb(&self, x: u32, y: u32) -> [u8; 3] {
        let off = self.offset(x, y);
        [self.pixels[off], self.pixels[off + 1], self.pixels[off + 2]]
    }

    #[inline]
    pub fn set_rgb(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let off = self.offset(x, y);
        self.pixels[off..off + 3].copy_from_slice(&rgb);
    }

    #[inline]
    fn offset(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        (y as usize * self.width as usize + x as usize) * 3
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }
}
