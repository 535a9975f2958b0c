//! Appearance features: kernel-weighted RGB color histograms, local binary
//! pattern texture histograms, and the Bhattacharyya distance between them.

use thiserror::Error;

use crate::types::{rasterize_region, Frame, Region};

/// 8x8x8 RGB quantization.
pub const COLOR_BINS: usize = 512;
/// One bin per 8-bit LBP label.
pub const LBP_BINS: usize = 256;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeatureError {
    #[error("histograms have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("region rasterizes to {w}x{h} pixels, need at least 3x3")]
    RegionTooSmall { w: u32, h: u32 },
    #[error("every pixel in the region received zero kernel weight")]
    AllZeroWeights,
}

/// Normalized 512-bin color distribution of a region.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorHistogram {
    bins: Vec<f64>,
}

impl ColorHistogram {
    pub fn bins(&self) -> &[f64] {
        &self.bins
    }
}

/// Normalized 256-bin LBP label distribution of a region.
#[derive(Debug, Clone, PartialEq)]
pub struct LbpHistogram {
    bins: Vec<f64>,
}

impl LbpHistogram {
    pub fn bins(&self) -> &[f64] {
        &self.bins
    }
}

/// Maps an RGB triple to its histogram bin: 32-level quantization per
/// channel, red most significant.
#[inline]
pub fn color_bin(r: u8, g: u8, b: u8) -> usize {
    ((r as usize) >> 5 << 6) | ((g as usize) >> 5 << 3) | ((b as usize) >> 5)
}

/// Epanechnikov-style radial weight: `1 - r^2` inside the unit radius, zero
/// outside. Pixels far from the region centroid count less.
#[inline]
pub fn kernel_weight(r: f64) -> f64 {
    if (0.0..1.0).contains(&r) {
        1.0 - r * r
    } else {
        0.0
    }
}

/// Kernel-weighted, normalized color histogram of the region's pixels.
///
/// Each pixel's radial coordinate is its center's Euclidean distance to the
/// region centroid divided by `sqrt(w^2 + h^2)`; the same scale feeds the
/// normalizer, which cancels any constant factor in that choice.
pub fn extract_color_histogram(f: &Frame, reg: &Region) -> Result<ColorHistogram, FeatureError> {
    let rect = rasterize_region(reg, f.width, f.height);
    let inv_diag_sq = 1.0 / (reg.w * reg.w + reg.h * reg.h);
    let mut bins = vec![0.0f64; COLOR_BINS];
    let mut weight_sum = 0.0f64;
    for y in rect.y0..=rect.y1 {
        let dy = (f64::from(y) + 0.5) - reg.cy;
        for x in rect.x0..=rect.x1 {
            let dx = (f64::from(x) + 0.5) - reg.cx;
            let r_sq = (dx * dx + dy * dy) * inv_diag_sq;
            if r_sq >= 1.0 {
                continue;
            }
            let w = 1.0 - r_sq;
            let [r, g, b] = f.rgb(x, y);
            bins[color_bin(r, g, b)] += w;
            weight_sum += w;
        }
    }
    if weight_sum <= 0.0 {
        return Err(FeatureError::AllZeroWeights);
    }
    let inv = 1.0 / weight_sum;
    for bin in &mut bins {
        *bin *= inv;
    }
    Ok(ColorHistogram { bins })
}

/// Rec. 601 luma, rounded to the nearest integer.
#[inline]
pub fn gray_value(r: u8, g: u8, b: u8) -> u8 {
    (0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b)).round() as u8
}

/// Full-frame grayscale plane, shared by all texture extractions on a frame.
#[derive(Debug, Clone)]
pub struct GrayPlane {
    pub width: u32,
    pub height: u32,
    data: Vec<u8>,
}

impl GrayPlane {
    pub fn from_frame(f: &Frame) -> Self {
        let bytes = f.as_bytes();
        let data = bytes
            .chunks_exact(3)
            .map(|px| gray_value(px[0], px[1], px[2]))
            .collect();
        Self { width: f.width, height: f.height, data }
    }

    #[inline]
    fn at(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }
}

/// 8-bit LBP label of a 3x3 gray patch in row-major order (center at
/// index 4).
///
/// Bits follow the eight neighbors clockwise from the top-left corner, the
/// top-left being the most significant bit; a bit is set when that neighbor
/// is greater than or equal to the center.
#[inline]
pub fn lbp_label(patch: &[u8; 9]) -> u8 {
    // Clockwise from top-left in the row-major patch.
    const ORDER: [usize; 8] = [0, 1, 2, 5, 8, 7, 6, 3];
    let center = patch[4];
    let mut label = 0u8;
    for (i, &idx) in ORDER.iter().enumerate() {
        if patch[idx] >= center {
            label |= 1 << (7 - i);
        }
    }
    label
}

/// Normalized LBP label histogram over the region's interior pixels.
///
/// The region's one-pixel border is skipped because its 3x3 neighborhoods
/// would reach outside the region; regions rasterizing below 3x3 have no
/// interior and are rejected.
pub fn extract_lbp_histogram(f: &Frame, reg: &Region) -> Result<LbpHistogram, FeatureError> {
    extract_lbp_histogram_gray(&GrayPlane::from_frame(f), reg)
}

/// [`extract_lbp_histogram`] against a pre-computed gray plane.
pub fn extract_lbp_histogram_gray(
    gray: &GrayPlane,
    reg: &Region,
) -> Result<LbpHistogram, FeatureError> {
    let rect = rasterize_region(reg, gray.width, gray.height);
    if rect.width() < 3 || rect.height() < 3 {
        return Err(FeatureError::RegionTooSmall { w: rect.width(), h: rect.height() });
    }
    let mut counts = [0u64; LBP_BINS];
    for y in rect.y0 + 1..rect.y1 {
        for x in rect.x0 + 1..rect.x1 {
            let patch = [
                gray.at(x - 1, y - 1),
                gray.at(x, y - 1),
                gray.at(x + 1, y - 1),
                gray.at(x - 1, y),
                gray.at(x, y),
                gray.at(x + 1, y),
                gray.at(x - 1, y + 1),
                gray.at(x, y + 1),
                gray.at(x + 1, y + 1),
            ];
            counts[lbp_label(&patch) as usize] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    let inv = 1.0 / total as f64;
    let bins = counts.iter().map(|&c| c as f64 * inv).collect();
    Ok(LbpHistogram { bins })
}

/// Bhattacharyya distance `sqrt(1 - sum sqrt(p*q))` between two
/// distributions of equal length. Identical inputs give exactly zero; the
/// inner `max(0, .)` guards against rounding pushing the radicand negative.
pub fn bhattacharyya_distance(p: &[f64], q: &[f64]) -> Result<f64, FeatureError> {
    if p.len() != q.len() {
        return Err(FeatureError::LengthMismatch { left: p.len(), right: q.len() });
    }
    if p == q {
        return Ok(0.0);
    }
    let mut coeff = 0.0f64;
    for (a, b) in p.iter().zip(q) {
        coeff += (a * b).sqrt();
    }
    Ok((1.0 - coeff).max(0.0).sqrt())
}
