//! Finite-difference verification of the analytic gradient chain.
//!
//! Samples random model/batch configurations, computes the parameter
//! gradients of the combined objective with [`backward`], and compares
//! every coordinate against central finite differences of the scalar loss.
//! Configurations are resampled until they sit away from the angle seam,
//! the polarity boundaries, and degeneracy, where the objective is not
//! differentiable and finite differences are meaningless.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::circle::{map_distribution, CircleConfig, EmotionDistribution, EmotionVector};
use crate::error::{Error, Result};
use crate::losses::{
    batch_loss_report, wrapped_angle_difference, AngleDifference, BatchPrediction, LossConfig,
    PolarityMode,
};
use crate::model::{backward, forward, Gradients, LinearModel};

#[derive(Debug, Clone)]
pub struct GradCheckOptions {
    pub seed: u64,
    /// Number of random configurations to check.
    pub points: usize,
    /// Mu values cycled across the configurations.
    pub mus: Vec<f64>,
    pub polarity_mode: PolarityMode,
    pub angle_difference: AngleDifference,
    /// Central-difference step.
    pub step: f64,
    /// Largest acceptable relative error.
    pub tolerance: f64,
}

impl Default for GradCheckOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            points: 100,
            mus: vec![0.0, 0.3, 0.7, 1.0],
            polarity_mode: PolarityMode::Soft,
            angle_difference: AngleDifference::Raw,
            step: 1e-6,
            tolerance: 1e-5,
        }
    }
}

/// The single worst coordinate seen during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCase {
    pub point: usize,
    pub mu: f64,
    pub parameter: String,
    pub analytic: f64,
    pub numeric: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub points: usize,
    pub parameters_checked: usize,
    pub max_relative_error: f64,
    pub tolerance: f64,
    pub worst: Option<WorstCase>,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.max_relative_error <= self.tolerance
    }
}

/// `|a - n| / max(|a| + |n|, 1e-4)`.
///
/// Central differences at step 1e-6 on an f64 loss of magnitude ~1 carry
/// roundoff noise of roughly `eps * |f| / (2 * step)`, a few 1e-10 in
/// absolute terms. The denominator floor keeps that noise from dominating
/// coordinates whose true gradient is tiny: below the floor the comparison
/// degrades to an absolute check at `tolerance * 1e-4`, which still flags a
/// sign flip or a dropped term on any coordinate of measurable size.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(1e-4)
}

/// Worst relative error between two gradient sets, with the coordinate name.
pub fn max_relative_error(analytic: &Gradients, numeric: &Gradients) -> (f64, String, f64, f64) {
    let mut worst = (0.0, String::from("none"), 0.0, 0.0);
    for (c, (arow, nrow)) in analytic.weights.iter().zip(&numeric.weights).enumerate() {
        for (j, (&a, &n)) in arow.iter().zip(nrow).enumerate() {
            let rel = relative_error(a, n);
            if rel > worst.0 {
                worst = (rel, format!("W[{c}][{j}]"), a, n);
            }
        }
    }
    for (c, (&a, &n)) in analytic.bias.iter().zip(&numeric.bias).enumerate() {
        let rel = relative_error(a, n);
        if rel > worst.0 {
            worst = (rel, format!("b[{c}]"), a, n);
        }
    }
    worst
}

const FEATURE_DIM: usize = 6;
const BATCH: usize = 4;
const SAFE_MARGIN: f64 = 0.05;

struct Configuration {
    model: LinearModel,
    features: Vec<Vec<f64>>,
    labeled: Vec<EmotionDistribution>,
    labels: Vec<EmotionVector>,
}

fn sample_configuration(
    rng: &mut ChaCha8Rng,
    circle: &CircleConfig,
    mode: AngleDifference,
) -> Configuration {
    let c = circle.category_count();
    loop {
        let model = LinearModel {
            weights: (0..c)
                .map(|_| (0..FEATURE_DIM).map(|_| rng.random_range(-0.8..0.8)).collect())
                .collect(),
            bias: (0..c).map(|_| rng.random_range(-0.3..0.3)).collect(),
        };
        let features: Vec<Vec<f64>> = (0..BATCH)
            .map(|_| (0..FEATURE_DIM).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let labeled: Vec<EmotionDistribution> = (0..BATCH)
            .map(|_| {
                let raw: Vec<f64> = (0..c).map(|_| rng.random_range(1e-3..1.0)).collect();
                EmotionDistribution::normalized(raw).expect("positive mass")
            })
            .collect();
        let labels: Vec<EmotionVector> = labeled
            .iter()
            .map(|d| map_distribution(d, circle).expect("matching category count"))
            .collect();
        let batch = forward(&model, &features, &labeled).expect("matching dimensions");

        let safe = labels.iter().zip(&batch.predicted).all(|(lab, pred)| {
            let mapped = map_distribution(pred, circle).expect("matching category count");
            let away_from_boundaries = !mapped.degenerate
                && mapped.intensity > 0.02
                && mapped.angle > SAFE_MARGIN
                && mapped.angle < TAU - SAFE_MARGIN
                && (mapped.angle - FRAC_PI_2).abs() > SAFE_MARGIN
                && (mapped.angle - 3.0 * FRAC_PI_2).abs() > SAFE_MARGIN;
            let away_from_wrap = mode == AngleDifference::Raw
                || wrapped_angle_difference(lab.angle, mapped.angle).abs()
                    < std::f64::consts::PI - SAFE_MARGIN;
            !lab.degenerate && lab.intensity > 0.05 && away_from_boundaries && away_from_wrap
        });
        if safe {
            return Configuration { model, features, labeled, labels };
        }
    }
}

fn numeric_gradients(
    config: &Configuration,
    circle: &CircleConfig,
    loss: &LossConfig,
    step: f64,
) -> Result<Gradients> {
    let value = |model: &LinearModel| -> Result<f64> {
        let batch: BatchPrediction = forward(model, &config.features, &config.labeled)?;
        Ok(batch_loss_report(&batch, &config.labels, circle, loss)?.combined)
    };
    let c = config.model.category_count();
    let f = config.model.feature_dim();
    let mut weights = vec![vec![0.0; f]; c];
    let mut bias = vec![0.0; c];
    for cc in 0..c {
        for (j, slot) in weights[cc].iter_mut().enumerate().take(f) {
            let mut plus = config.model.clone();
            let mut minus = config.model.clone();
            plus.weights[cc][j] += step;
            minus.weights[cc][j] -= step;
            *slot = (value(&plus)? - value(&minus)?) / (2.0 * step);
        }
        let mut plus = config.model.clone();
        let mut minus = config.model.clone();
        plus.bias[cc] += step;
        minus.bias[cc] -= step;
        bias[cc] = (value(&plus)? - value(&minus)?) / (2.0 * step);
    }
    Ok(Gradients { weights, bias })
}

pub fn run(options: &GradCheckOptions) -> Result<GradCheckReport> {
    if options.points == 0 {
        return Err(Error::InvalidConfig("points must be at least 1".into()));
    }
    if options.mus.is_empty() || options.mus.iter().any(|m| !(0.0..=1.0).contains(m)) {
        return Err(Error::InvalidConfig("mu values must be in [0, 1]".into()));
    }
    if options.step <= 0.0 || !options.step.is_finite() || options.tolerance <= 0.0 || !options.tolerance.is_finite() {
        return Err(Error::InvalidConfig("step and tolerance must be positive".into()));
    }
    let circle = CircleConfig::mikel_wheel();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut report = GradCheckReport {
        points: options.points,
        parameters_checked: 0,
        max_relative_error: 0.0,
        tolerance: options.tolerance,
        worst: None,
    };
    for point in 0..options.points {
        let mu = options.mus[point % options.mus.len()];
        let loss = LossConfig {
            mu,
            polarity_mode: options.polarity_mode,
            angle_difference: options.angle_difference,
            ..LossConfig::default()
        };
        let config = sample_configuration(&mut rng, &circle, options.angle_difference);
        let analytic = backward(
            &config.model,
            &config.features,
            &forward(&config.model, &config.features, &config.labeled)?,
            &config.labels,
            &circle,
            &loss,
            0.0,
        )?;
        let numeric = numeric_gradients(&config, &circle, &loss, options.step)?;
        report.parameters_checked +=
            config.model.category_count() * (config.model.feature_dim() + 1);
        let (rel, parameter, a, n) = max_relative_error(&analytic, &numeric);
        if rel > report.max_relative_error {
            report.max_relative_error = rel;
            report.worst = Some(WorstCase {
                point,
                mu,
                parameter,
                analytic: a,
                numeric: n,
                relative_error: rel,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let options = GradCheckOptions { points: 12, ..GradCheckOptions::default() };
        let report = run(&options).unwrap();
        assert!(report.passed(), "max relative error {}", report.max_relative_error);
        assert!(report.max_relative_error < 1e-5);
        assert_eq!(report.parameters_checked, 12 * 8 * 7);
    }

    #[test]
    fn mu_zero_subset_passes() {
        let options =
            GradCheckOptions { points: 6, mus: vec![0.0], ..GradCheckOptions::default() };
        assert!(run(&options).unwrap().passed());
    }

    #[test]
    fn wrapped_mode_passes() {
        let options = GradCheckOptions {
            points: 8,
            angle_difference: AngleDifference::Wrapped,
            ..GradCheckOptions::default()
        };
        assert!(run(&options).unwrap().passed());
    }

    #[test]
    fn injected_sign_error_is_caught() {
        let circle = CircleConfig::mikel_wheel();
        let loss = LossConfig { mu: 0.7, ..LossConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let config = sample_configuration(&mut rng, &circle, AngleDifference::Raw);
        let mut analytic = backward(
            &config.model,
            &config.features,
            &forward(&config.model, &config.features, &config.labeled).unwrap(),
            &config.labels,
            &circle,
            &loss,
            0.0,
        )
        .unwrap();
        let numeric = numeric_gradients(&config, &circle, &loss, 1e-6).unwrap();
        for row in &mut analytic.weights {
            for g in row {
                *g = -*g;
            }
        }
        let (rel, _, _, _) = max_relative_error(&analytic, &numeric);
        assert!(rel > 1e-5, "sign flip went undetected: {rel}");
    }

    #[test]
    fn rejects_bad_options() {
        assert!(run(&GradCheckOptions { points: 0, ..Default::default() }).is_err());
        assert!(run(&GradCheckOptions { mus: vec![1.5], ..Default::default() }).is_err());
        assert!(run(&GradCheckOptions { step: 0.0, ..Default::default() }).is_err());
    }
}
