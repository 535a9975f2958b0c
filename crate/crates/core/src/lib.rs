//! A single-object video tracker built on a particle filter that fuses a
//! kernel-weighted RGB color histogram and a local-binary-pattern texture
//! histogram through Bayesian model averaging.
//!
//! Each appearance feature is an observation model with its own likelihood.
//! The filter keeps one shared particle set with a weight row per model,
//! maintains a posterior probability over the models with a forgetting-factor
//! recursion, and reports the mixture state estimate. A drop in a model's
//! posterior triggers a refresh of that feature's reference template.
//!
//! The crate also ships a deterministic synthetic-scene generator and the
//! evaluation helpers used by the `trackfuse` command-line tool.

pub mod config;
pub mod dynamics;
pub mod eval;
pub mod features;
pub mod fusion;
pub mod observation;
pub mod ppm;
pub mod records;
pub mod synth;
pub mod types;

pub use config::{FusionMode, TrackerConfig};
pub use fusion::{BmaTracker, ParticleEnsemble, StepOutput};
pub use observation::{FeatureKind, Template};
pub use types::{Frame, Region, StateVector};
