//! Circular emotion representation for label distribution learning.
//!
//! An emotion distribution assigns a description degree to each of `C`
//! emotion categories. This crate places those categories as evenly spaced
//! unit vectors on an *emotion circle* (positive emotions on one half,
//! negative on the other) and represents every distribution as a single
//! compound vector with three attributes: polarity `p`, type angle `theta`,
//! and intensity `r`. On top of that representation it provides:
//!
//! - [`circle`]: the circle layout, the distribution-to-vector mapping,
//!   and the Jacobian of that mapping.
//! - [`losses`]: KL loss, polar/type losses, the intensity-weighted
//!   progressive circular (PC) loss, the combined objective, and its
//!   analytic gradient with respect to model logits.
//! - [`metrics`]: Chebyshev / Clark / Canberra / KL / cosine /
//!   intersection measures, top-1 accuracy, and average-rank aggregation.
//! - [`model`]: a linear-softmax predictor with an Adam optimizer and a
//!   deterministic training loop driven by the combined loss.
//! - [`data`]: CSV ingestion, seeded 80/20 splits, and a synthetic
//!   dataset generator with circular-structured labels.
//! - [`config`]: the shared `key = value` configuration file format.
//! - [`cli`]: the `emocircle` command-line surface
//!   (`map`, `train`, `eval`, `gradcheck`, `sweep-mu`, `ablate`, `synth`).
//!
//! # Quick start
//!
//! ```
//! use emocircle::circle::{CircleConfig, EmotionDistribution, map_distribution};
//!
//! let config = CircleConfig::mikel_wheel();
//! let d = EmotionDistribution::new(vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
//! let v = map_distribution(&d, &config).unwrap();
//! assert_eq!(v.polarity.as_f64(), 0.0);
//! assert!((v.angle - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
//! ```
//!
//! Each major capability has a runnable example under `examples/`:
//!
//! ```text
//! cargo run --example map_distribution
//! cargo run --example loss_breakdown
//! cargo run --example gradient_check
//! cargo run --example synthetic_data
//! cargo run --example train_model
//! cargo run --example evaluate_metrics
//! cargo run --example mu_sweep
//! cargo run --example ablation
//! ```

pub mod circle;
pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod losses;
pub mod metrics;
pub mod model;

pub use error::{Error, Result};
