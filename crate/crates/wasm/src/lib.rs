//! Browser bindings for the tracker: render synthetic scenes to RGBA and
//! drive a live tracking run frame by frame from JavaScript.

use wasm_bindgen::prelude::*;

use trackfuse::config::{FusionMode, TrackerConfig};
use trackfuse::fusion::BmaTracker;
use trackfuse::observation::FeatureKind;
use trackfuse::synth::{Scenario, ScenarioKind};
use trackfuse::types::{clamp_region, region_from_state, Frame, Region, StateVector};

/// Names of the built-in scene presets.
#[wasm_bindgen]
pub fn scenario_names() -> Vec<String> {
    ScenarioKind::ALL.iter().map(|k| k.name().to_string()).collect()
}

/// Names of the available fusion modes.
#[wasm_bindgen]
pub fn fusion_modes() -> Vec<String> {
    FusionMode::ALL.iter().map(|m| m.name().to_string()).collect()
}

fn build_scenario(name: &str, seed: u32) -> Result<Scenario, String> {
    let kind: ScenarioKind = name.parse().map_err(|e| format!("{e}"))?;
    let mut sc = Scenario::preset(kind);
    sc.seed = u64::from(seed);
    sc.validate().map_err(|e| format!("{e}"))?;
    Ok(sc)
}

fn to_rgba(frame: &Frame) -> Vec<u8> {
    let mut rgba = Vec::with_capacity(frame.as_bytes().len() / 3 * 4);
    for px in frame.as_bytes().chunks_exact(3) {
        rgba.extend_from_slice(px);
        rgba.push(255);
    }
    rgba
}

/// Renders one frame of a preset as RGBA bytes for `putImageData`.
#[wasm_bindgen]
pub fn render_frame(scenario: &str, seed: u32, t: u32) -> Result<Vec<u8>, String> {
    let sc = build_scenario(scenario, seed)?;
    if t >= sc.frame_count {
        return Err(format!("frame {t} out of range (0..{})", sc.frame_count));
    }
    Ok(to_rgba(&sc.generate_frame(t)))
}

/// A live tracking session over one synthetic scene.
#[wasm_bindgen]
pub struct Demo {
    scenario: Scenario,
    tracker: BmaTracker,
    models: Vec<FeatureKind>,
    frame: Frame,
    t: u32,
    estimate: StateVector,
    pi: [f64; 2],
    ess: f64,
    template_updates: u32,
}

#[wasm_bindgen]
impl Demo {
    /// Starts a session: the tracker is initialized on frame 0 at the
    /// ground-truth box.
    #[wasm_bindgen(constructor)]
    pub fn new(
        scenario: &str,
        mode: &str,
        scene_seed: u32,
        tracker_seed: u32,
    ) -> Result<Demo, String> {
        let sc = build_scenario(scenario, scene_seed)?;
        let fusion_mode: FusionMode = mode.parse().map_err(|e| format!("{e}"))?;
        let cfg = TrackerConfig {
            fusion_mode,
            rng_seed: u64::from(tracker_seed),
            ..TrackerConfig::default()
        };
        let frame = sc.generate_frame(0);
        let truth = sc.truth(0);
        let tracker = BmaTracker::init(&frame, &truth, cfg).map_err(|e| format!("{e}"))?;
        let models = tracker.models().to_vec();
        let share = 1.0 / models.len() as f64;
        let mut pi = [0.0f64; 2];
        for kind in &models {
            match kind {
                FeatureKind::Color => pi[0] = share,
                FeatureKind::Texture => pi[1] = share,
            }
        }
        let n = tracker.config().n_particles as f64;
        Ok(Demo {
            estimate: StateVector::new(truth.cx, truth.cy, 0.0, 0.0, truth.w, truth.h),
            scenario: sc,
            tracker,
            models,
            frame,
            t: 0,
            pi,
            ess: n,
            template_updates: 0,
        })
    }

    pub fn width(&self) -> u32 {
        self.scenario.frame_w
    }

    pub fn height(&self) -> u32 {
        self.scenario.frame_h
    }

    pub fn frame_count(&self) -> u32 {
        self.scenario.frame_count
    }

    pub fn frame_index(&self) -> u32 {
        self.t
    }

    /// Advances one frame; returns false once the scene is exhausted.
    pub fn step(&mut self) -> Result<bool, String> {
        if self.t + 1 >= self.scenario.frame_count {
            return Ok(false);
        }
        self.t += 1;
        self.frame = self.scenario.generate_frame(self.t);
        let out = self.tracker.step(&self.frame).map_err(|e| format!("{e}"))?;
        self.estimate = out.estimate;
        for (m, kind) in self.models.iter().enumerate() {
            match kind {
                FeatureKind::Color => self.pi[0] = out.model_posterior[m],
                FeatureKind::Texture => self.pi[1] = out.model_posterior[m],
            }
        }
        if self.models.len() == 1 {
            match self.models[0] {
                FeatureKind::Color => self.pi[1] = 0.0,
                FeatureKind::Texture => self.pi[0] = 0.0,
            }
        }
        self.ess = out.ess;
        self.template_updates += out.template_updated.iter().filter(|f| **f).count() as u32;
        Ok(true)
    }

    /// Current frame as RGBA bytes.
    pub fn frame_rgba(&self) -> Vec<u8> {
        to_rgba(&self.frame)
    }

    /// Estimated box as `[cx, cy, w, h]`, clamped to the frame.
    pub fn estimate_box(&self) -> Vec<f64> {
        let reg = clamp_region(
            &region_from_state(&self.estimate),
            self.scenario.frame_w,
            self.scenario.frame_h,
        );
        vec![reg.cx, reg.cy, reg.w, reg.h]
    }

    /// Ground-truth box of the current frame as `[cx, cy, w, h]`.
    pub fn truth_box(&self) -> Vec<f64> {
        let r: Region = self.scenario.truth(self.t);
        vec![r.cx, r.cy, r.w, r.h]
    }

    /// `[pi_color, pi_texture]` after the latest step.
    pub fn pi(&self) -> Vec<f64> {
        self.pi.to_vec()
    }

    pub fn ess(&self) -> f64 {
        self.ess
    }

    pub fn center_error(&self) -> f64 {
        let truth = self.scenario.truth(self.t);
        ((self.estimate.x - truth.cx).powi(2) + (self.estimate.y - truth.cy).powi(2)).sqrt()
    }

    pub fn template_updates(&self) -> u32 {
        self.template_updates
    }

    /// Particle centroids, flattened as `[x0, y0, x1, y1, ...]`.
    pub fn particles(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.tracker.ensemble().n_particles() * 2);
        for s in &self.tracker.ensemble().states {
            flat.push(s.x);
            flat.push(s.y);
        }
        flat
    }
}
