//! Saliency-guided augmentation that keeps the original salient region.
//!
//! The salient window of an image is found on a saliency map, copied from the
//! unaltered original, resized into one of the eight cells surrounding it and
//! pasted there, while RandAugment is applied to the crop, the rest of the
//! image, or both. Erasing baselines (Cutout, Random Erasing, GridMask,
//! Hide-and-Seek) and single-image baselines (KeepAugment, a SalfMix
//! approximation) share the same plan and manifest machinery.
//!
//! ```
//! use keeporig::{augment, replay_plan, PipelineConfig, RngStream};
//! use keeporig::synthetic::synthetic_image;
//!
//! let img = synthetic_image(7, 0, 32, 32, 3);
//! let cfg = PipelineConfig { keep_prob: 0.0, ..PipelineConfig::default() };
//! let (out, plan) = augment(&img, &cfg, &mut RngStream::new(cfg.seed, 0), None).unwrap();
//! assert!(plan.applied);
//! assert_eq!(replay_plan(&img, &plan, &cfg).unwrap(), out);
//! ```

pub mod composer;
pub mod config;
pub mod dataset;
pub mod error;
pub mod image;
pub mod ops;
pub mod parallel;
pub mod pipeline;
pub mod preview;
pub mod rng;
pub mod saliency;
pub mod synthetic;

pub use composer::{augment, augment_timed, replay_plan, AugmentPlan, StageTimings};
pub use config::{AugTarget, Method, PipelineConfig, PlacementStrategy, SaliencyProvider};
pub use error::{Error, Result};
pub use image::{Image, Rect};
pub use rng::RngStream;
pub use saliency::SaliencyMap;
