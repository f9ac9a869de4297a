//! Distribution measures and rank aggregation for evaluation.
//!
//! Four distances (Chebyshev, Clark, Canberra, KL divergence) and two
//! similarities (cosine, intersection), plus top-1 accuracy. Clark is
//! normalized by `sqrt(C)` and Canberra by `C` so the maxima do not depend
//! on the category count. The KL divergence adds `epsilon = 1e-10` to the
//! denominator inside the logarithm, since it is not defined at zero.

use crate::circle::EmotionDistribution;
use crate::error::{Error, Result};

/// Floor added to predicted probabilities inside the KL-divergence log.
pub const KL_EPSILON: f64 = 1e-10;

/// Dataset means of the six measures plus top-1 accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub chebyshev: f64,
    pub clark: f64,
    pub canberra: f64,
    pub kl_div: f64,
    pub cosine: f64,
    pub intersection: f64,
    pub top1_accuracy: f64,
    pub sample_count: usize,
}

impl EvalReport {
    /// CSV header with the metric names in the reporting order.
    pub fn csv_header() -> &'static str {
        "chebyshev,clark,canberra,kl,cosine,intersection,accuracy"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.chebyshev,
            self.clark,
            self.canberra,
            self.kl_div,
            self.cosine,
            self.intersection,
            self.top1_accuracy
        )
    }

    /// Human-readable table, one measure per line.
    pub fn table(&self) -> String {
        format!(
            "Chebyshev    (down) {:.6}\n\
             Clark        (down) {:.6}\n\
             Canberra     (down) {:.6}\n\
             KL           (down) {:.6}\n\
             Cosine       (up)   {:.6}\n\
             Intersection (up)   {:.6}\n\
             Accuracy     (up)   {:.6}",
            self.chebyshev,
            self.clark,
            self.canberra,
            self.kl_div,
            self.cosine,
            self.intersection,
            self.top1_accuracy
        )
    }
}

fn check_pair(d: &EmotionDistribution, dhat: &EmotionDistribution) -> Result<()> {
    if d.len() != dhat.len() {
        return Err(Error::ShapeMismatch(format!(
            "distributions of length {} vs {}",
            d.len(),
            dhat.len()
        )));
    }
    Ok(())
}

/// Largest coordinate gap: `max_j |d_j - dhat_j|`.
pub fn chebyshev(d: &EmotionDistribution, dhat: &EmotionDistribution) -> Result<f64> {
    check_pair(d, dhat)?;
    Ok(d.degrees()
        .iter()
        .zip(dhat.degrees())
        .map(|(&a, &b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Clark distance `sqrt(sum_j (d_j - dhat_j)^2 / (d_j + dhat_j)^2)`,
/// divided by `sqrt(C)` when `normalized`. Coordinates absent from both
/// distributions (0/0) contribute 0.
pub fn clark(d: &EmotionDistribution, dhat: &EmotionDistribution, normalized: bool) -> Result<f64> {
    check_pair(d, dhat)?;
    let sum: f64 = d
        .degrees()
        .iter()
        .zip(dhat.degrees())
        .map(|(&a, &b)| {
            let denom = a + b;
            if denom == 0.0 {
                0.0
            } else {
                let t = (a - b) / denom;
                t * t
            }
        })
        .sum();
    let value = sum.sqrt();
    Ok(if normalized { value / (d.len() as f64).sqrt() } else { value })
}

/// Canberra metric `sum_j |d_j - dhat_j| / (d_j + dhat_j)`, divided by `C`
/// when `normalized`. 0/0 coordinates contribute 0.
pub fn canberra(
    d: &EmotionDistribution,
    dhat: &EmotionDistribution,
    normalized: bool,
) -> Result<f64> {
    check_pair(d, dhat)?;
    let sum: f64 = d
        .degrees()
        .iter()
        .zip(dhat.degrees())
        .map(|(&a, &b)| {
            let denom = a + b;
            if denom == 0.0 {
                0.0
            } else {
                (a - b).abs() / denom
            }
        })
        .sum();
    Ok(if normalized { sum / d.len() as f64 } else { sum })
}

/// KL divergence `sum_j d_j * ln(d_j / (dhat_j + epsilon))` with the
/// convention that absent labeled coordinates contribute 0.
pub fn kl_divergence(
    d: &EmotionDistribution,
    dhat: &EmotionDistribution,
    epsilon: f64,
) -> Result<f64> {
    check_pair(d, dhat)?;
    Ok(d.degrees()
        .iter()
        .zip(dhat.degrees())
        .map(|(&a, &b)| if a > 0.0 { a * (a / (b + epsilon)).ln() } else { 0.0 })
        .sum())
}

/// Cosine coefficient between the two degree vectors.
pub fn cosine(d: &EmotionDistribution, dhat: &EmotionDistribution) -> Result<f64> {
    check_pair(d, dhat)?;
    let dot: f64 = d.degrees().iter().zip(dhat.degrees()).map(|(&a, &b)| a * b).sum();
    let na: f64 = d.degrees().iter().map(|&a| a * a).sum::<f64>().sqrt();
    let nb: f64 = dhat.degrees().iter().map(|&b| b * b).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::InvalidDistribution("cosine of a zero vector".into()));
    }
    Ok(dot / (na * nb))
}

/// Intersection similarity `sum_j min(d_j, dhat_j)`.
pub fn intersection(d: &EmotionDistribution, dhat: &EmotionDistribution) -> Result<f64> {
    check_pair(d, dhat)?;
    Ok(d.degrees().iter().zip(dhat.degrees()).map(|(&a, &b)| a.min(b)).sum())
}

/// Fraction of samples whose predicted dominant category matches the
/// labeled one; argmax ties break to the lowest index on both sides.
pub fn top1_accuracy(
    labeled: &[EmotionDistribution],
    predicted: &[EmotionDistribution],
) -> Result<f64> {
    if labeled.len() != predicted.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} labeled vs {} predicted",
            labeled.len(),
            predicted.len()
        )));
    }
    if labeled.is_empty() {
        return Err(Error::EmptyInput("top-1 accuracy of an empty set".into()));
    }
    let hits = labeled
        .iter()
        .zip(predicted)
        .filter(|(d, dhat)| d.dominant() == dhat.dominant())
        .count();
    Ok(hits as f64 / labeled.len() as f64)
}

/// Dataset means of every measure plus top-1 accuracy.
pub fn evaluate_all(
    labeled: &[EmotionDistribution],
    predicted: &[EmotionDistribution],
) -> Result<EvalReport> {
    if labeled.len() != predicted.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} labeled vs {} predicted",
            labeled.len(),
            predicted.len()
        )));
    }
    if labeled.is_empty() {
        return Err(Error::EmptyInput("evaluation of an empty set".into()));
    }
    let n = labeled.len() as f64;
    let mut report = EvalReport {
        chebyshev: 0.0,
        clark: 0.0,
        canberra: 0.0,
        kl_div: 0.0,
        cosine: 0.0,
        intersection: 0.0,
        top1_accuracy: 0.0,
        sample_count: labeled.len(),
    };
    for (d, dhat) in labeled.iter().zip(predicted) {
        report.chebyshev += chebyshev(d, dhat)?;
        report.clark += clark(d, dhat, true)?;
        report.canberra += canberra(d, dhat, true)?;
        report.kl_div += kl_divergence(d, dhat, KL_EPSILON)?;
        report.cosine += cosine(d, dhat)?;
        report.intersection += intersection(d, dhat)?;
    }
    report.chebyshev /= n;
    report.clark /= n;
    report.canberra /= n;
    report.kl_div /= n;
    report.cosine /= n;
    report.intersection /= n;
    report.top1_accuracy = top1_accuracy(labeled, predicted)?;
    Ok(report)
}

/// Per-method mean rank over the six distribution measures, rank 1 best.
///
/// Direction-aware: lower is better for the four distances, higher for the
/// two similarities. Tied methods share the lowest rank of the tie group
/// (competition ranking), so values `0.25, 0.25, 0.31` rank `1, 1, 3`.
pub fn average_rank(reports: &[(String, EvalReport)]) -> Result<Vec<(String, f64)>> {
    // (value extractor, true when lower is better)
    type Measure = (fn(&EvalReport) -> f64, bool);
    if reports.len() < 2 {
        return Err(Error::EmptyInput("average rank needs at least two methods".into()));
    }
    let measures: [Measure; 6] = [
        (|r| r.chebyshev, true),
        (|r| r.clark, true),
        (|r| r.canberra, true),
        (|r| r.kl_div, true),
        (|r| r.cosine, false),
        (|r| r.intersection, false),
    ];
    let mut totals = vec![0.0; reports.len()];
    for (value_of, lower_better) in measures {
        for (i, (_, report)) in reports.iter().enumerate() {
            let v = value_of(report);
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("measure value {v} cannot be ranked")));
            }
            let better = reports
                .iter()
                .filter(|(_, other)| {
                    let o = value_of(other);
                    if lower_better {
                        o < v
                    } else {
                        o > v
                    }
                })
                .count();
            totals[i] += (better + 1) as f64;
        }
    }
    Ok(reports
        .iter()
        .zip(totals)
        .map(|((name, _), total)| (name.clone(), total / measures.len() as f64))
        .collect())
}
