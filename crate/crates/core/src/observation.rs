//! Observation models: the versioned object template and the Gaussian
//! likelihoods over feature distances.

use crate::features::{
    bhattacharyya_distance, extract_color_histogram, extract_lbp_histogram,
    extract_lbp_histogram_gray, ColorHistogram, FeatureError, GrayPlane, LbpHistogram,
};
use crate::types::{Frame, Region};

/// Lower bound on any likelihood value. Degenerate regions (off-frame, too
/// small to label) must still carry positive weight or a whole weight row
/// could normalize to nothing.
pub const LIKELIHOOD_FLOOR: f64 = 1e-12;

/// Which appearance feature an observation model scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Color,
    Texture,
}

/// Reference appearance of the tracked object: one color distribution and
/// one LBP histogram, with a version counter bumped on every refresh.
#[derive(Debug, Clone)]
pub struct Template {
    pub color_ref: ColorHistogram,
    pub texture_ref: LbpHistogram,
    pub version: u32,
    pub origin_frame: u32,
}

impl Template {
    /// Extracts both reference histograms from `reg`; version starts at 0.
    pub fn build(f: &Frame, reg: &Region) -> Result<Self, FeatureError> {
        let texture_ref = extract_lbp_histogram(f, reg)?;
        let color_ref = extract_color_histogram(f, reg)?;
        Ok(Self { color_ref, texture_ref, version: 0, origin_frame: f.index })
    }

    /// Returns a template with only the named reference replaced from `reg`
    /// and the version incremented.
    pub fn update_feature(
        &self,
        f: &Frame,
        reg: &Region,
        which: FeatureKind,
    ) -> Result<Self, FeatureError> {
        let mut next = self.clone();
        match which {
            FeatureKind::Color => next.color_ref = extract_color_histogram(f, reg)?,
            FeatureKind::Texture => next.texture_ref = extract_lbp_histogram(f, reg)?,
        }
        next.version += 1;
        next.origin_frame = f.index;
        Ok(next)
    }
}

/// Gaussian kernel over a feature distance, floored at
/// [`LIKELIHOOD_FLOOR`]: `exp(-d^2 / (2 sigma^2)) / (sqrt(2 pi) sigma)`.
#[inline]
pub fn gaussian_likelihood(d: f64, sigma: f64) -> f64 {
    let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sigma);
    (norm * (-d * d / (2.0 * sigma * sigma)).exp()).max(LIKELIHOOD_FLOOR)
}

/// Color-model likelihood of the region given the template. Extraction
/// failures score the floor instead of erroring.
pub fn color_likelihood(f: &Frame, reg: &Region, t: &Template, sigma_color: f64) -> f64 {
    match extract_color_histogram(f, reg) {
        Ok(h) => {
            let d = bhattacharyya_distance(h.bins(), t.color_ref.bins())
                .expect("color histograms share a fixed bin count");
            gaussian_likelihood(d, sigma_color)
        }
        Err(_) => LIKELIHOOD_FLOOR,
    }
}

/// Texture-model likelihood of the region given the template.
pub fn texture_likelihood(f: &Frame, reg: &Region, t: &Template, sigma_texture: f64) -> f64 {
    texture_likelihood_gray(&GrayPlane::from_frame(f), reg, t, sigma_texture)
}

/// [`texture_likelihood`] against a pre-computed gray plane, for callers
/// scoring many regions on one frame.
pub fn texture_likelihood_gray(
    gray: &GrayPlane,
    reg: &Region,
    t: &Template,
    sigma_texture: f64,
) -> f64 {
    match extract_lbp_histogram_gray(gray, reg) {
        Ok(h) => {
            let d = bhattacharyya_distance(h.bins(), t.texture_ref.bins())
                .expect("LBP histograms share a fixed bin count");
            gaussian_likelihood(d, sigma_texture)
        }
        Err(_) => LIKELIHOOD_FLOOR,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Frame;

    fn checker_frame() -> Frame {
        let mut f = Frame::filled(64, 64, 0, [90, 90, 90]);
        for y in 20..44 {
            for x in 20..44 {
                let c = if (x / 4 + y / 4) % 2 == 0 { [200, 40, 40] } else { [60, 10, 10] };
                f.set_rgb(x, y, c);
            }
        }
        f
    }

    #[test]
    fn matching_region_scores_the_gaussian_peak() {
        let f = checker_frame();
        let reg = Region::new(32.0, 32.0, 24.0, 24.0);
        let t = Template::build(&f, &reg).unwrap();
        let peak = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * 0.1);
        assert!((color_likelihood(&f, &reg, &t, 0.1) - peak).abs() < 1e-9);
        assert!((texture_likelihood(&f, &reg, &t, 0.1) - peak).abs() < 1e-9);
        assert!((peak - 3.98942).abs() < 1e-5);
    }

    #[test]
    fn distance_one_hits_the_floor() {
        assert_eq!(gaussian_likelihood(1.0, 0.1), LIKELIHOOD_FLOOR);
        // Unfloored value would be ~7.7e-22.
        let raw = 3.98942 * (-50.0f64).exp();
        assert!(raw < LIKELIHOOD_FLOOR);
    }

    #[test]
    fn likelihood_decreases_with_distance() {
        let mut prev = f64::INFINITY;
        for k in 0..8 {
            let lik = gaussian_likelihood(0.1 * f64::from(k), 0.1);
            assert!(lik < prev);
            prev = lik;
        }
    }

    #[test]
    fn too_small_region_scores_floor_for_texture() {
        let f = checker_frame();
        let reg = Region::new(32.0, 32.0, 24.0, 24.0);
        let t = Template::build(&f, &reg).unwrap();
        let tiny = Region::new(32.0, 32.0, 2.0, 2.0);
        assert_eq!(texture_likelihood(&f, &tiny, &t, 0.1), LIKELIHOOD_FLOOR);
    }

    #[test]
    fn constant_region_texture_is_maximal_against_constant_template() {
        let f = Frame::filled(64, 64, 3, [120, 120, 120]);
        let t = Template::build(&f, &Region::new(16.0, 16.0, 12.0, 12.0)).unwrap();
        let lik = texture_likelihood(&f, &Region::new(48.0, 48.0, 12.0, 12.0), &t, 0.1);
        let peak = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * 0.1);
        assert!((lik - peak).abs() < 1e-9);
    }

    #[test]
    fn template_versioning_and_selective_update() {
        let f = checker_frame();
        let reg = Region::new(32.0, 32.0, 24.0, 24.0);
        let t = Template::build(&f, &reg).unwrap();
        assert_eq!(t.version, 0);
        assert_eq!(t.origin_frame, 0);

        let mut f60 = checker_frame();
        f60.index = 60;
        let other = Region::new(10.0, 10.0, 16.0, 16.0);
        let updated = t.update_feature(&f60, &other, FeatureKind::Color).unwrap();
        assert_eq!(updated.version, 1);
        assert_eq!(updated.origin_frame, 60);
        assert_eq!(updated.texture_ref, t.texture_ref);
        assert_ne!(updated.color_ref, t.color_ref);

        let tex_updated = t.update_feature(&f60, &other, FeatureKind::Texture).unwrap();
        assert_eq!(tex_updated.color_ref, t.color_ref);

        // Re-extracting the original region changes content not at all,
        // but still counts as a new version.
        let same = t.update_feature(&f, &reg, FeatureKind::Color).unwrap();
        assert_eq!(same.color_ref, t.color_ref);
        assert_eq!(same.version, 1);
    }

    #[test]
    fn build_template_rejects_tiny_region() {
        let f = checker_frame();
        assert!(Template::build(&f, &Region::new(5.0, 5.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn uniform_red_template_is_two_point_masses() {
        let f = Frame::filled(32, 32, 0, [255, 0, 0]);
        let t = Template::build(&f, &Region::new(16.0, 16.0, 12.0, 12.0)).unwrap();
        assert_eq!(t.color_ref.bins()[crate::features::color_bin(255, 0, 0)], 1.0);
        assert_eq!(t.texture_ref.bins()[255], 1.0);
    }

    #[test]
    fn likelihood_never_exceeds_the_gaussian_peak() {
        let peak = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * 0.1);
        for k in 0..100 {
            let d = f64::from(k) / 99.0;
            let lik = gaussian_likelihood(d, 0.1);
            assert!(lik >= LIKELIHOOD_FLOOR && lik <= peak);
        }
    }
}
