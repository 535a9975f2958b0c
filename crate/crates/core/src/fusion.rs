//! The model-averaging particle filter: per-model importance weighting over
//! a shared particle set, forgetting-based model prediction, model-posterior
//! updates from estimated marginal likelihoods, the mixture state estimate,
//! degeneracy control, and slump-triggered template refreshes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{FusionMode, TrackerConfig};
use crate::dynamics::propagate;
use crate::features::{FeatureError, GrayPlane};
use crate::observation::{color_likelihood, texture_likelihood_gray, FeatureKind, Template};
use crate::types::{clamp_region, region_from_state, Frame, Region, StateVector};

/// Model posteriors never drop below this; the forgetting power map cannot
/// revive a model whose probability reached exactly zero.
pub const MODEL_POSTERIOR_FLOOR: f64 = 1e-6;

/// Minimum frames between template refreshes of the same feature.
pub const TEMPLATE_UPDATE_COOLDOWN: u32 = 10;

/// Unnormalized weights this small in an entire row mean the row carries no
/// information to renormalize.
const DEGENERATE_WEIGHT: f64 = 1e-300;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrackerError {
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("all unnormalized weights of model {model} fell below 1e-300")]
    DegenerateWeights { model: usize },
    #[error("frame is {got_w}x{got_h} but tracking started on {want_w}x{want_h}")]
    FrameGeometryChanged { want_w: u32, want_h: u32, got_w: u32, got_h: u32 },
    #[error("frame index {got} does not increase over {last}")]
    FrameIndexNotIncreasing { last: u32, got: u32 },
}

/// Shared particle states with one weight row per observation model and the
/// posterior probability of each model.
#[derive(Debug, Clone)]
pub struct ParticleEnsemble {
    pub states: Vec<StateVector>,
    /// `weights[m][i]` is particle `i`'s normalized weight under model `m`.
    pub weights: Vec<Vec<f64>>,
    pub model_posterior: Vec<f64>,
}

impl ParticleEnsemble {
    fn uniform(state: StateVector, n: usize, models: usize) -> Self {
        Self {
            states: vec![state; n],
            weights: vec![vec![1.0 / n as f64; n]; models],
            model_posterior: vec![1.0 / models as f64; models],
        }
    }

    pub fn n_particles(&self) -> usize {
        self.states.len()
    }

    pub fn n_models(&self) -> usize {
        self.weights.len()
    }

    /// Per-particle weight under the model mixture:
    /// `beta_i = sum_m pi_m * w[m][i]`. Sums to one when the rows and the
    /// posterior do.
    pub fn mixture_weights(&self) -> Vec<f64> {
        let mut beta = vec![0.0f64; self.n_particles()];
        for (pi, row) in self.model_posterior.iter().zip(&self.weights) {
            for (b, w) in beta.iter_mut().zip(row) {
                *b += pi * w;
            }
        }
        beta
    }
}

/// Result of one filter iteration.
#[derive(Debug, Clone)]
pub struct StepOutput {
    /// Mixture mean of the particle states.
    pub estimate: StateVector,
    pub model_posterior: Vec<f64>,
    /// Estimated per-model evidence for this frame.
    pub per_model_marginal: Vec<f64>,
    /// Whether each model's reference template was refreshed this step.
    pub template_updated: Vec<bool>,
    /// Effective sample size of the mixture weights, before any resampling.
    pub ess: f64,
}

/// Multiplies each weight row by its likelihoods and renormalizes the row.
pub fn weight_update(
    weights: &mut [Vec<f64>],
    likelihoods: &[Vec<f64>],
) -> Result<(), TrackerError> {
    for (m, (row, lik)) in weights.iter_mut().zip(likelihoods).enumerate() {
        let mut sum = 0.0f64;
        let mut max = 0.0f64;
        for (w, l) in row.iter_mut().zip(lik) {
            *w *= l;
            sum += *w;
            max = max.max(*w);
        }
        if max < DEGENERATE_WEIGHT || !sum.is_finite() || sum <= 0.0 {
            return Err(TrackerError::DegenerateWeights { model: m });
        }
        let inv = 1.0 / sum;
        for w in row.iter_mut() {
            *w *= inv;
        }
    }
    Ok(())
}

/// Forgetting-factor model prediction: exponentiates the posterior by
/// `alpha` and renormalizes, pulling it toward uniform while preserving the
/// ranking of the models.
pub fn forget_predict(pi: &[f64], alpha: f64) -> Vec<f64> {
    let powered: Vec<f64> = pi.iter().map(|p| p.powf(alpha)).collect();
    let sum: f64 = powered.iter().sum();
    powered.into_iter().map(|p| p / sum).collect()
}

/// Evidence estimate for one model: previous weights dotted with the current
/// per-particle likelihoods.
pub fn estimate_marginal_likelihood(prev_weights: &[f64], likelihoods: &[f64]) -> f64 {
    let mut acc = 0.0f64;
    for (w, l) in prev_weights.iter().zip(likelihoods) {
        acc += w * l;
    }
    acc
}

/// Bayes update of the model posterior from the predicted prior and the
/// marginal-likelihood estimates, with every entry floored at
/// [`MODEL_POSTERIOR_FLOOR`].
pub fn model_posterior_update(pi_pred: &[f64], marginals: &[f64]) -> Vec<f64> {
    let mut pi: Vec<f64> = pi_pred.iter().zip(marginals).map(|(p, l)| p * l).collect();
    let sum: f64 = pi.iter().sum();
    for p in pi.iter_mut() {
        *p /= sum;
    }
    floor_posterior(&mut pi);
    pi
}

/// Clamps entries up to the floor and renormalizes. The final re-clamp keeps
/// the floor exact; it perturbs the sum by at most M^2 * floor^2, far inside
/// the 1e-9 simplex tolerance.
fn floor_posterior(pi: &mut [f64]) {
    for p in pi.iter_mut() {
        *p = p.max(MODEL_POSTERIOR_FLOOR);
    }
    let sum: f64 = pi.iter().sum();
    for p in pi.iter_mut() {
        *p = (*p / sum).max(MODEL_POSTERIOR_FLOOR);
    }
}

/// Mixture mean of the particle states:
/// `sum_m pi_m sum_i w[m][i] * state_i`, component by component.
pub fn bma_estimate(ens: &ParticleEnsemble) -> StateVector {
    let mut total = [0.0f64; 6];
    for (pi, row) in ens.model_posterior.iter().zip(&ens.weights) {
        let mut per_model = [0.0f64; 6];
        for (w, s) in row.iter().zip(&ens.states) {
            let c = s.components();
            for k in 0..6 {
                per_model[k] += w * c[k];
            }
        }
        for k in 0..6 {
            total[k] += pi * per_model[k];
        }
    }
    StateVector::from_components(total)
}

/// Effective sample size `1 / sum w_i^2` of normalized weights.
pub fn effective_sample_size(weights: &[f64]) -> f64 {
    let sum_sq: f64 = weights.iter().map(|w| w * w).sum();
    1.0 / sum_sq
}

/// Deterministic part of systematic resampling: ancestor index for each of
/// the `n` evenly spaced positions `(k + u0) / n` walked along the CDF of
/// `weights`. Copy counts stay within `floor(n*w)..=ceil(n*w)`.
pub fn systematic_indices(weights: &[f64], u0: f64, n: usize) -> Vec<usize> {
    let last = weights.len() - 1;
    let mut indices = Vec::with_capacity(n);
    let mut i = 0usize;
    let mut cum = weights[0];
    for k in 0..n {
        let u = (k as f64 + u0) / n as f64;
        while cum < u && i < last {
            i += 1;
            cum += weights[i];
        }
        indices.push(i);
    }
    indices
}

/// Systematic resampling from the mixture weights. Particle states are
/// redrawn, every weight row resets to uniform, and the model posterior is
/// left untouched. Consumes exactly one uniform draw.
pub fn resample<R: Rng + ?Sized>(ens: &mut ParticleEnsemble, rng: &mut R) {
    let n = ens.n_particles();
    let beta = ens.mixture_weights();
    let u0: f64 = rng.random();
    let indices = systematic_indices(&beta, u0, n);
    ens.states = indices.iter().map(|&i| ens.states[i]).collect();
    for row in &mut ens.weights {
        row.fill(1.0 / n as f64);
    }
}

/// The tracking engine. Owns the particle ensemble, the object template,
/// and the run's random stream; one [`BmaTracker::step`] per frame.
#[derive(Debug, Clone)]
pub struct BmaTracker {
    cfg: TrackerConfig,
    models: Vec<FeatureKind>,
    ensemble: ParticleEnsemble,
    template: Template,
    rng: ChaCha8Rng,
    frame_w: u32,
    frame_h: u32,
    last_frame_index: u32,
    last_refresh: Vec<Option<u32>>,
}

impl BmaTracker {
    /// Starts a track: the template comes from `init_region` on `f0`, all
    /// particles sit at the region's state with zero velocity, and weights
    /// and model posterior start uniform.
    pub fn init(f0: &Frame, init_region: &Region, cfg: TrackerConfig) -> Result<Self, TrackerError> {
        let region = clamp_region(init_region, f0.width, f0.height);
        let template = Template::build(f0, &region)?;
        let models: Vec<FeatureKind> = match cfg.fusion_mode {
            FusionMode::Bma | FusionMode::FixedEqual => {
                vec![FeatureKind::Color, FeatureKind::Texture]
            }
            FusionMode::ColorOnly => vec![FeatureKind::Color],
            FusionMode::TextureOnly => vec![FeatureKind::Texture],
        };
        let state = StateVector::new(region.cx, region.cy, 0.0, 0.0, region.w, region.h);
        let ensemble = ParticleEnsemble::uniform(state, cfg.n_particles, models.len());
        let rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        let last_refresh = vec![None; models.len()];
        Ok(Self {
            cfg,
            models,
            ensemble,
            template,
            rng,
            frame_w: f0.width,
            frame_h: f0.height,
            last_frame_index: f0.index,
            last_refresh,
        })
    }

    pub fn ensemble(&self) -> &ParticleEnsemble {
        &self.ensemble
    }

    pub fn template(&self) -> &Template {
        &self.template
    }

    pub fn models(&self) -> &[FeatureKind] {
        &self.models
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.cfg
    }

    /// Runs one filter iteration on the next frame: propagate, score, weight,
    /// update the model posterior, estimate, refresh slumped templates, and
    /// resample if the ensemble degenerated.
    pub fn step(&mut self, f: &Frame) -> Result<StepOutput, TrackerError> {
        if f.width != self.frame_w || f.height != self.frame_h {
            return Err(TrackerError::FrameGeometryChanged {
                want_w: self.frame_w,
                want_h: self.frame_h,
                got_w: f.width,
                got_h: f.height,
            });
        }
        if f.index <= self.last_frame_index {
            return Err(TrackerError::FrameIndexNotIncreasing {
                last: self.last_frame_index,
                got: f.index,
            });
        }
        self.last_frame_index = f.index;

        for state in &mut self.ensemble.states {
            *state = propagate(state, &self.cfg.sigma_diag, self.cfg.advect, &mut self.rng);
        }

        let likelihoods = self.likelihood_matrix(f);

        // Evidence per model uses the weights from before this frame's
        // reweighting.
        let marginals: Vec<f64> = self
            .ensemble
            .weights
            .iter()
            .zip(&likelihoods)
            .map(|(row, lik)| estimate_marginal_likelihood(row, lik))
            .collect();

        weight_update(&mut self.ensemble.weights, &likelihoods)?;

        match self.cfg.fusion_mode {
            FusionMode::Bma => {
                let predicted = forget_predict(&self.ensemble.model_posterior, self.cfg.alpha);
                self.ensemble.model_posterior = model_posterior_update(&predicted, &marginals);
            }
            // Pinned or single-model posteriors stay where init put them.
            FusionMode::FixedEqual | FusionMode::ColorOnly | FusionMode::TextureOnly => {}
        }

        let estimate = bma_estimate(&self.ensemble);
        let template_updated = self.refresh_slumped_templates(f, &estimate);

        let beta = self.ensemble.mixture_weights();
        let ess = effective_sample_size(&beta);
        if ess < self.cfg.ess_fraction * self.cfg.n_particles as f64 {
            resample(&mut self.ensemble, &mut self.rng);
        }

        Ok(StepOutput {
            estimate,
            model_posterior: self.ensemble.model_posterior.clone(),
            per_model_marginal: marginals,
            template_updated,
            ess,
        })
    }

    fn likelihood_matrix(&self, f: &Frame) -> Vec<Vec<f64>> {
        let gray = self
            .models
            .contains(&FeatureKind::Texture)
            .then(|| GrayPlane::from_frame(f));
        self.models
            .iter()
            .map(|kind| {
                self.ensemble
                    .states
                    .iter()
                    .map(|s| {
                        let region = clamp_region(&region_from_state(s), f.width, f.height);
                        match kind {
                            FeatureKind::Color => {
                                color_likelihood(f, &region, &self.template, self.cfg.sigma_color)
                            }
                            FeatureKind::Texture => texture_likelihood_gray(
                                gray.as_ref().expect("gray plane built for texture models"),
                                &region,
                                &self.template,
                                self.cfg.sigma_texture,
                            ),
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Rebuilds the reference of every model whose posterior fell below the
    /// slump threshold, from the region of the current estimate, at most
    /// once per cooldown window. A failed extraction leaves the template
    /// unchanged and the flag unset.
    fn refresh_slumped_templates(&mut self, f: &Frame, estimate: &StateVector) -> Vec<bool> {
        let mut flags = vec![false; self.models.len()];
        let region = clamp_region(&region_from_state(estimate), f.width, f.height);
        for (m, kind) in self.models.iter().enumerate() {
            if self.ensemble.model_posterior[m] >= self.cfg.slump_threshold {
                continue;
            }
            let in_cooldown = self.last_refresh[m]
                .is_some_and(|at| f.index.saturating_sub(at) < TEMPLATE_UPDATE_COOLDOWN);
            if in_cooldown {
                continue;
            }
            if let Ok(next) = self.template.update_feature(f, &region, *kind) {
                self.template = next;
                self.last_refresh[m] = Some(f.index);
                flags[m] = true;
            }
        }
        flags
    }
}
