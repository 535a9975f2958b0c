//! End-to-end filter behavior on generated scenes.

use trackfuse::config::{FusionMode, TrackerConfig};
use trackfuse::fusion::BmaTracker;
use trackfuse::synth::{Appearance, BackgroundSpec, Scenario, ScenarioKind};
use trackfuse::types::{region_from_state, Region};

fn static_scene(frames: u32) -> Scenario {
    let path: Vec<Region> = (0..frames).map(|_| Region::new(80.0, 60.0, 40.0, 30.0)).collect();
    Scenario {
        kind: ScenarioKind::Constant,
        frame_count: frames,
        frame_w: 160,
        frame_h: 120,
        object_appearance: vec![Appearance::checker([200, 40, 40], [60, 10, 10], 5.0); frames as usize],
        object_path: path,
        background: BackgroundSpec { base: [96, 96, 96], patches: Vec::new() },
        occluder: None,
        noise_std: 0.0,
        seed: 11,
    }
}

#[test]
fn stationary_object_stays_within_two_pixels() {
    let sc = static_scene(51);
    sc.validate().unwrap();
    let f0 = sc.generate_frame(0);
    let cfg = TrackerConfig { rng_seed: 3, ..TrackerConfig::default() };
    let mut tracker = BmaTracker::init(&f0, &sc.truth(0), cfg).unwrap();
    for t in 1..51 {
        let out = tracker.step(&sc.generate_frame(t)).unwrap();
        let truth = sc.truth(t);
        let err = ((out.estimate.x - truth.cx).powi(2) + (out.estimate.y - truth.cy).powi(2)).sqrt();
        assert!(err <= 2.0, "frame {t}: center error {err:.3}");
    }
}

#[test]
fn moving_object_tracked_in_every_mode() {
    let sc = Scenario::preset(ScenarioKind::Constant);
    let frames: Vec<_> = (0..sc.frame_count).map(|t| sc.generate_frame(t)).collect();
    for mode in [FusionMode::Bma, FusionMode::FixedEqual, FusionMode::ColorOnly, FusionMode::TextureOnly]
    {
        let cfg = TrackerConfig { fusion_mode: mode, rng_seed: 17, ..TrackerConfig::default() };
        let mut tracker = BmaTracker::init(&frames[0], &sc.truth(0), cfg).unwrap();
        let mut total = 0.0f64;
        for frame in &frames[1..] {
            let out = tracker.step(frame).unwrap();
            let truth = sc.truth(frame.index);
            total += ((out.estimate.x - truth.cx).powi(2) + (out.estimate.y - truth.cy).powi(2)).sqrt();
        }
        let mean = total / (frames.len() - 1) as f64;
        assert!(mean < 5.0, "{mode}: mean center error {mean:.3}");
    }
}

#[test]
fn fixed_equal_mode_pins_the_posterior() {
    let sc = Scenario::preset(ScenarioKind::AbruptColorChange);
    let f0 = sc.generate_frame(0);
    let cfg = TrackerConfig { fusion_mode: FusionMode::FixedEqual, ..TrackerConfig::default() };
    let mut tracker = BmaTracker::init(&f0, &sc.truth(0), cfg).unwrap();
    for t in 1..80 {
        let out = tracker.step(&sc.generate_frame(t)).unwrap();
        assert_eq!(out.model_posterior, vec![0.5, 0.5]);
    }
}

#[test]
fn color_swap_shifts_posterior_to_texture_and_refreshes_template() {
    let sc = Scenario::preset(ScenarioKind::AbruptColorChange);
    let f0 = sc.generate_frame(0);
    let cfg = TrackerConfig { rng_seed: 5, ..TrackerConfig::default() };
    let mut tracker = BmaTracker::init(&f0, &sc.truth(0), cfg).unwrap();
    let mut color_refreshed = false;
    let mut pi_texture_after_swap = Vec::new();
    for t in 1..sc.frame_count {
        let out = tracker.step(&sc.generate_frame(t)).unwrap();
        if (60..=65).contains(&t) {
            pi_texture_after_swap.push(out.model_posterior[1]);
        }
        color_refreshed |= out.template_updated[0];
    }
    assert!(color_refreshed, "color template never refreshed after the swap");
    assert!(tracker.template().version >= 1);
    assert!(
        pi_texture_after_swap.iter().any(|p| *p > 0.5),
        "texture posterior never dominated after the swap: {pi_texture_after_swap:?}"
    );
}

#[test]
fn template_refreshes_respect_the_cooldown() {
    // A scene whose texture stays weak keeps that model slumped, so
    // refreshes recur; they must be spaced at least ten frames apart.
    let sc = Scenario::preset(ScenarioKind::Constant);
    let f0 = sc.generate_frame(0);
    let cfg = TrackerConfig { rng_seed: 41, ..TrackerConfig::default() };
    let mut tracker = BmaTracker::init(&f0, &sc.truth(0), cfg).unwrap();
    let mut last_refresh: [Option<u32>; 2] = [None, None];
    for t in 1..sc.frame_count {
        let out = tracker.step(&sc.generate_frame(t)).unwrap();
        for (m, updated) in out.template_updated.iter().enumerate() {
            if *updated {
                if let Some(prev) = last_refresh[m] {
                    assert!(t - prev >= 10, "model {m} refreshed at {prev} and {t}");
                }
                last_refresh[m] = Some(t);
            }
        }
    }
}

#[test]
fn simplex_invariants_hold_through_a_run() {
    let sc = Scenario::preset(ScenarioKind::ConfusingColor);
    let f0 = sc.generate_frame(0);
    let cfg = TrackerConfig { rng_seed: 23, ..TrackerConfig::default() };
    let mut tracker = BmaTracker::init(&f0, &sc.truth(0), cfg).unwrap();
    for t in 1..sc.frame_count {
        tracker.step(&sc.generate_frame(t)).unwrap();
        let ens = tracker.ensemble();
        for row in &ens.weights {
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-9, "frame {t}: weight row sum {sum}");
            assert!(row.iter().all(|w| *w >= 0.0));
        }
        let pi_sum: f64 = ens.model_posterior.iter().sum();
        assert!((pi_sum - 1.0).abs() <= 1e-9, "frame {t}: posterior sum {pi_sum}");
        assert!(ens.model_posterior.iter().all(|p| *p >= 1e-6 && *p < 1.0));
    }
}

#[test]
fn frame_geometry_change_is_rejected() {
    let sc = static_scene(3);
    let f0 = sc.generate_frame(0);
    let cfg = TrackerConfig::default();
    let mut tracker = BmaTracker::init(&f0, &sc.truth(0), cfg).unwrap();
    let mut small = Scenario { frame_w: 80, frame_h: 60, ..static_scene(3) };
    small.object_path = vec![Region::new(40.0, 30.0, 20.0, 16.0); 3];
    let bad = small.generate_frame(1);
    assert!(matches!(
        tracker.step(&bad),
        Err(trackfuse::fusion::TrackerError::FrameGeometryChanged { .. })
    ));
}

#[test]
fn frame_index_must_increase() {
    let sc = static_scene(5);
    let f0 = sc.generate_frame(0);
    let mut tracker = BmaTracker::init(&f0, &sc.truth(0), TrackerConfig::default()).unwrap();
    tracker.step(&sc.generate_frame(2)).unwrap();
    assert!(matches!(
        tracker.step(&sc.generate_frame(1)),
        Err(trackfuse::fusion::TrackerError::FrameIndexNotIncreasing { last: 2, got: 1 })
    ));
}

#[test]
fn init_rejects_tiny_region() {
    let sc = static_scene(2);
    let f0 = sc.generate_frame(0);
    let err = BmaTracker::init(&f0, &Region::new(10.0, 10.0, 1.0, 1.0), TrackerConfig::default());
    assert!(err.is_err());
}

#[test]
fn init_sets_uniform_ensemble() {
    let sc = static_scene(2);
    let f0 = sc.generate_frame(0);
    let cfg = TrackerConfig { n_particles: 200, ..TrackerConfig::default() };
    let tracker = BmaTracker::init(&f0, &sc.truth(0), cfg).unwrap();
    let ens = tracker.ensemble();
    assert_eq!(ens.n_particles(), 200);
    assert_eq!(ens.n_models(), 2);
    assert!(ens.weights.iter().all(|row| row.iter().all(|w| *w == 0.005)));
    assert_eq!(ens.model_posterior, vec![0.5, 0.5]);
    let truth = sc.truth(0);
    for s in &ens.states {
        assert_eq!(
            (s.x, s.y, s.vx, s.vy, s.hx, s.hy),
            (truth.cx, truth.cy, 0.0, 0.0, truth.w, truth.h)
        );
    }
}

#[test]
fn runs_are_bit_reproducible() {
    let sc = Scenario::preset(ScenarioKind::PartialOcclusion);
    let frames: Vec<_> = (0..60).map(|t| sc.generate_frame(t)).collect();
    let run = || {
        let cfg = TrackerConfig { rng_seed: 91, ..TrackerConfig::default() };
        let mut tracker = BmaTracker::init(&frames[0], &sc.truth(0), cfg).unwrap();
        let mut outs = Vec::new();
        for frame in &frames[1..] {
            let out = tracker.step(frame).unwrap();
            outs.push((out.estimate.components(), out.model_posterior, out.ess));
        }
        outs
    };
    assert_eq!(run(), run());
}

#[test]
fn estimated_box_follows_region_not_raw_truth() {
    // region_from_state of the estimate is what downstream consumers draw;
    // it must stay a valid region on every step.
    let sc = Scenario::preset(ScenarioKind::ScaleChange);
    let f0 = sc.generate_frame(0);
    let cfg = TrackerConfig { rng_seed: 2, ..TrackerConfig::default() };
    let mut tracker = BmaTracker::init(&f0, &sc.truth(0), cfg).unwrap();
    for t in 1..40 {
        let out = tracker.step(&sc.generate_frame(t)).unwrap();
        let reg = region_from_state(&out.estimate);
        assert!(reg.w >= 1.0 && reg.h >= 1.0);
        assert!(out.estimate.is_finite());
    }
}
