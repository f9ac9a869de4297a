//! Training losses over the emotion circle.
//!
//! The conventional objective is the cross-entropy form of the KL loss
//! between labeled and predicted distributions. On top of it, the circular
//! losses compare the *mapped* compound vectors: a polar loss on the
//! polarity attribute, a type loss on the angle, and the progressive
//! circular (PC) loss that weights both squared errors by the labeled
//! intensity. The combined objective interpolates between the KL loss and
//! a circular term with a weight `mu`.
//!
//! The predicted polarity is a step function of the predicted angle, so its
//! exact gradient is zero almost everywhere. In the default `Soft` polarity
//! mode training substitutes the predicted negative-half mass (see
//! [`soft_polarity`]) for the hard binary, which has a well-defined
//! gradient; `HardSubgradient` keeps the literal hard-binary value and a
//! zero polar gradient.

use std::f64::consts::{PI, TAU};

use crate::circle::{
    map_distribution, mapping_jacobian, soft_polarity, CircleConfig, EmotionDistribution,
    EmotionVector, DEFAULT_DEGENERACY_THRESHOLD,
};
use crate::error::{Error, Result};

/// Probability floor applied inside the KL-loss logarithm. Softmax outputs
/// are positive, but accumulated rounding must never produce `ln(0)`.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// How the predicted polarity enters the polar and PC losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PolarityMode {
    /// Hard binary from the predicted angle; zero polar gradient.
    HardSubgradient,
    /// Predicted negative-half mass; differentiable.
    #[default]
    Soft,
}

/// How angle differences are measured in the type and PC losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleDifference {
    /// Plain difference of angles in `[0, 2pi)`.
    #[default]
    Raw,
    /// Signed circular difference in `(-pi, pi]`, so near-zero and
    /// near-`2pi` angles count as close.
    Wrapped,
}

/// Which circular term the combined objective weights with `mu`.
///
/// The default is the full intensity-weighted PC loss; the other variants
/// exist for loss-component ablations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CircularTerm {
    Polar,
    Type,
    PolarType,
    #[default]
    Pc,
}

impl CircularTerm {
    fn includes_polar(self) -> bool {
        matches!(self, CircularTerm::Polar | CircularTerm::PolarType | CircularTerm::Pc)
    }

    fn includes_type(self) -> bool {
        matches!(self, CircularTerm::Type | CircularTerm::PolarType | CircularTerm::Pc)
    }

    fn weighted_by_intensity(self) -> bool {
        matches!(self, CircularTerm::Pc)
    }
}

/// Configuration of the combined objective.
#[derive(Debug, Clone, PartialEq)]
pub struct LossConfig {
    /// Weight of the circular term; `1 - mu` goes to the KL loss.
    pub mu: f64,
    pub polarity_mode: PolarityMode,
    pub angle_difference: AngleDifference,
    pub degeneracy_threshold: f64,
    pub term: CircularTerm,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            mu: 0.7,
            polarity_mode: PolarityMode::Soft,
            angle_difference: AngleDifference::Raw,
            degeneracy_threshold: DEFAULT_DEGENERACY_THRESHOLD,
            term: CircularTerm::Pc,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.mu) || !self.mu.is_finite() {
            return Err(Error::InvalidConfig(format!("mu must be in [0, 1], got {}", self.mu)));
        }
        if self.degeneracy_threshold <= 0.0 || !self.degeneracy_threshold.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "degeneracy_threshold must be positive, got {}",
                self.degeneracy_threshold
            )));
        }
        Ok(())
    }
}

/// Per-batch loss values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    pub kl: f64,
    pub polar: f64,
    pub type_: f64,
    pub pc: f64,
    pub combined: f64,
}

/// Logits, their softmax, and the labeled distributions for one batch.
#[derive(Debug, Clone)]
pub struct BatchPrediction {
    pub logits: Vec<Vec<f64>>,
    pub predicted: Vec<EmotionDistribution>,
    pub labeled: Vec<EmotionDistribution>,
}

impl BatchPrediction {
    pub fn from_logits(logits: Vec<Vec<f64>>, labeled: Vec<EmotionDistribution>) -> Result<Self> {
        if logits.len() != labeled.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} logit rows vs {} labeled distributions",
                logits.len(),
                labeled.len()
            )));
        }
        let predicted = softmax_predict(&logits)?;
        Ok(Self { logits, predicted, labeled })
    }
}

/// Row-wise max-shifted softmax.
pub fn softmax_predict(logits: &[Vec<f64>]) -> Result<Vec<EmotionDistribution>> {
    logits
        .iter()
        .enumerate()
        .map(|(i, row)| {
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("logit row {i} contains a non-finite value")));
            }
            Ok(EmotionDistribution::normalized(softmax_row(row))
                .expect("softmax of finite logits is a valid distribution"))
        })
        .collect()
}

pub fn softmax_row(row: &[f64]) -> Vec<f64> {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = row.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / sum).collect()
}

/// Cross-entropy form of the KL loss:
/// `-(1/N) * sum_i sum_j d_i(j) * ln(dhat_i(j))`.
pub fn kl_loss(labeled: &[EmotionDistribution], predicted: &[EmotionDistribution]) -> Result<f64> {
    if labeled.len() != predicted.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} labeled vs {} predicted distributions",
            labeled.len(),
            predicted.len()
        )));
    }
    if labeled.is_empty() {
        return Err(Error::EmptyInput("kl_loss over an empty batch".into()));
    }
    let mut total = 0.0;
    for (i, (d, dhat)) in labeled.iter().zip(predicted).enumerate() {
        if d.len() != dhat.len() {
            return Err(Error::ShapeMismatch(format!(
                "sample {i}: {} labeled degrees vs {} predicted",
                d.len(),
                dhat.len()
            )));
        }
        for (&dj, &pj) in d.degrees().iter().zip(dhat.degrees()) {
            total -= dj * pj.max(PROBABILITY_FLOOR).ln();
        }
    }
    Ok(total / labeled.len() as f64)
}

/// Mean squared polarity error: `(1/N) * sum (p_i - phat_i)^2`.
pub fn polar_loss(labeled: &[f64], predicted: &[f64]) -> f64 {
    assert_eq!(labeled.len(), predicted.len(), "polarity slices must have equal length");
    assert!(!labeled.is_empty(), "polar_loss over an empty batch");
    let sum: f64 = labeled.iter().zip(predicted).map(|(&p, &q)| (p - q) * (p - q)).sum();
    sum / labeled.len() as f64
}

/// Signed circular difference `a - b` wrapped into `(-pi, pi]`.
pub fn wrapped_angle_difference(a: f64, b: f64) -> f64 {
    let mut d = (a - b) % TAU;
    if d > PI {
        d -= TAU;
    } else if d <= -PI {
        d += TAU;
    }
    d
}

fn angle_difference(labeled: f64, predicted: f64, mode: AngleDifference) -> f64 {
    match mode {
        AngleDifference::Raw => labeled - predicted,
        AngleDifference::Wrapped => wrapped_angle_difference(labeled, predicted),
    }
}

/// Mean squared angle error: `(1/N) * sum (theta_i - thetahat_i)^2`.
pub fn type_loss(labeled: &[f64], predicted: &[f64], mode: AngleDifference) -> f64 {
    assert_eq!(labeled.len(), predicted.len(), "angle slices must have equal length");
    assert!(!labeled.is_empty(), "type_loss over an empty batch");
    let sum: f64 = labeled
        .iter()
        .zip(predicted)
        .map(|(&t, &th)| {
            let d = angle_difference(t, th, mode);
            d * d
        })
        .sum();
    sum / labeled.len() as f64
}

/// Predicted polarity/angle pair fed to the circular losses. The polarity is
/// a real in `[0, 1]` so both the hard binary and the soft surrogate fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedVector {
    pub polarity: f64,
    pub angle: f64,
}

impl From<&EmotionVector> for PredictedVector {
    fn from(v: &EmotionVector) -> Self {
        Self { polarity: v.polarity.as_f64(), angle: v.angle }
    }
}

/// Maps a predicted distribution to the polarity/angle pair the circular
/// losses compare against the labeled vector, honoring the polarity mode.
pub fn predicted_attributes(
    predicted: &EmotionDistribution,
    circle: &CircleConfig,
    mode: PolarityMode,
) -> Result<PredictedVector> {
    let mapped = map_distribution(predicted, circle)?;
    let polarity = match mode {
        PolarityMode::HardSubgradient => mapped.polarity.as_f64(),
        PolarityMode::Soft => soft_polarity(predicted, circle),
    };
    Ok(PredictedVector { polarity, angle: mapped.angle })
}

/// PC-loss value plus bookkeeping about degenerate samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcLoss {
    pub value: f64,
    /// Number of non-degenerate labeled samples the mean ran over.
    pub samples_used: usize,
    /// Set when every labeled sample was degenerate; the value is then 0.
    pub all_degenerate: bool,
}

/// Progressive circular loss: the labeled intensity gates the squared
/// polarity and angle errors, averaged over the labeled samples that are
/// not degenerate.
pub fn pc_loss(
    labeled: &[EmotionVector],
    predicted: &[PredictedVector],
    config: &LossConfig,
) -> PcLoss {
    circular_term_value(labeled, predicted, config, CircularTerm::Pc)
}

fn circular_term_value(
    labeled: &[EmotionVector],
    predicted: &[PredictedVector],
    config: &LossConfig,
    term: CircularTerm,
) -> PcLoss {
    assert_eq!(labeled.len(), predicted.len(), "labeled/predicted lengths must match");
    assert!(!labeled.is_empty(), "circular loss over an empty batch");
    let mut sum = 0.0;
    let mut used = 0usize;
    for (lab, pred) in labeled.iter().zip(predicted) {
        if lab.degenerate {
            continue;
        }
        let weight = if term.weighted_by_intensity() { lab.intensity } else { 1.0 };
        let mut err = 0.0;
        if term.includes_polar() {
            let dp = lab.polarity.as_f64() - pred.polarity;
            err += dp * dp;
        }
        if term.includes_type() {
            let dt = angle_difference(lab.angle, pred.angle, config.angle_difference);
            err += dt * dt;
        }
        sum += weight * err;
        used += 1;
    }
    if used == 0 {
        return PcLoss { value: 0.0, samples_used: 0, all_degenerate: true };
    }
    PcLoss { value: sum / used as f64, samples_used: used, all_degenerate: false }
}

/// The combined objective: `(1 - mu) * kl + mu * pc`.
pub fn combined_loss(kl: f64, pc: f64, mu: f64) -> f64 {
    assert!((0.0..=1.0).contains(&mu), "mu must be in [0, 1]");
    (1.0 - mu) * kl + mu * pc
}

/// Computes every loss for one batch: KL, the polar/type components, the PC
/// loss, and the combined objective with the configured circular term.
///
/// `labels` are the mapped labeled vectors; the circular components run over
/// the samples whose labeled vector is non-degenerate.
pub fn batch_loss_report(
    batch: &BatchPrediction,
    labels: &[EmotionVector],
    circle: &CircleConfig,
    config: &LossConfig,
) -> Result<LossReport> {
    config.validate()?;
    if labels.len() != batch.labeled.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} labeled vectors vs batch of {}",
            labels.len(),
            batch.labeled.len()
        )));
    }
    let kl = kl_loss(&batch.labeled, &batch.predicted)?;
    let predicted: Vec<PredictedVector> = batch
        .predicted
        .iter()
        .map(|d| predicted_attributes(d, circle, config.polarity_mode))
        .collect::<Result<_>>()?;
    let polar = circular_term_value(labels, &predicted, config, CircularTerm::Polar);
    let type_ = circular_term_value(labels, &predicted, config, CircularTerm::Type);
    let pc = circular_term_value(labels, &predicted, config, CircularTerm::Pc);
    let term = circular_term_value(labels, &predicted, config, config.term);
    Ok(LossReport {
        kl,
        polar: polar.value,
        type_: type_.value,
        pc: pc.value,
        combined: combined_loss(kl, term.value, config.mu),
    })
}

/// Analytic gradient of the combined objective with respect to the logits.
///
/// The KL part is the softmax cross-entropy gradient `(dhat - d) / N`. The
/// circular part chains through the softmax Jacobian into the mapping
/// Jacobian for the angle and into the negative-half mass for the soft
/// polarity. Samples with a degenerate labeled vector are excluded from the
/// circular term; samples whose *predicted* vector is degenerate contribute
/// only the KL gradient.
pub fn grad_combined_wrt_logits(
    batch: &BatchPrediction,
    labels: &[EmotionVector],
    circle: &CircleConfig,
    config: &LossConfig,
) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    let n = batch.logits.len();
    if n == 0 {
        return Err(Error::EmptyInput("gradient over an empty batch".into()));
    }
    if batch.predicted.len() != n || batch.labeled.len() != n || labels.len() != n {
        return Err(Error::ShapeMismatch("batch fields must have equal lengths".into()));
    }
    let c = circle.category_count();
    for (i, row) in batch.logits.iter().enumerate() {
        if row.len() != c || batch.predicted[i].len() != c || batch.labeled[i].len() != c {
            return Err(Error::ShapeMismatch(format!("sample {i} does not have {c} categories")));
        }
    }

    let mut grad = vec![vec![0.0; c]; n];
    let kl_weight = 1.0 - config.mu;
    if kl_weight != 0.0 {
        for ((row, dhat), d) in grad.iter_mut().zip(&batch.predicted).zip(&batch.labeled) {
            for (g, (&p, &q)) in row.iter_mut().zip(dhat.degrees().iter().zip(d.degrees())) {
                *g += kl_weight * (p - q) / n as f64;
            }
        }
    }

    if config.mu == 0.0 {
        return Ok(grad);
    }
    let usable = labels.iter().filter(|v| !v.degenerate).count();
    if usable == 0 {
        return Ok(grad);
    }
    let term = config.term;
    for i in 0..n {
        if labels[i].degenerate {
            continue;
        }
        let dhat = &batch.predicted[i];
        let mapped = map_distribution(dhat, circle)?;
        if mapped.degenerate {
            continue;
        }
        let weight = if term.weighted_by_intensity() { labels[i].intensity } else { 1.0 };
        let scale = config.mu * weight / usable as f64;
        let degrees = dhat.degrees();

        if term.includes_type() {
            let jac = mapping_jacobian(dhat, circle)?;
            let delta = angle_difference(labels[i].angle, mapped.angle, config.angle_difference);
            // d/d(thetahat) of delta^2 is -2 * delta.
            let dl_dtheta = -2.0 * delta;
            let dot: f64 =
                jac.dtheta_dd.iter().zip(degrees).map(|(&g, &p)| g * p).sum();
            for l in 0..c {
                grad[i][l] += scale * dl_dtheta * degrees[l] * (jac.dtheta_dd[l] - dot);
            }
        }

        if term.includes_polar() && config.polarity_mode == PolarityMode::Soft {
            let s = soft_polarity(dhat, circle);
            let dl_ds = 2.0 * (s - labels[i].polarity.as_f64());
            for l in 0..c {
                let neg = if circle.is_negative(l) { 1.0 } else { 0.0 };
                grad[i][l] += scale * dl_ds * degrees[l] * (neg - s);
            }
        }
    }
    Ok(grad)
}
