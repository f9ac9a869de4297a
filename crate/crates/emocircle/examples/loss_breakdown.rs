//! Compute every loss component for a toy batch and show how the combined
//! objective interpolates between the KL loss and the circular term.
//!
//! Run with `cargo run --example loss_breakdown`.

use emocircle::circle::{map_distribution, CircleConfig, EmotionDistribution};
use emocircle::losses::{
    batch_loss_report, softmax_predict, AngleDifference, BatchPrediction, LossConfig,
};

fn main() {
    let circle = CircleConfig::mikel_wheel();
    let labeled = vec![
        EmotionDistribution::new(vec![0.7, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap(),
        EmotionDistribution::new(vec![0.0, 0.0, 0.5, 0.4, 0.1, 0.0, 0.0, 0.0]).unwrap(),
        EmotionDistribution::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.2, 0.5, 0.3]).unwrap(),
    ];
    // An imperfect predictor: logits that roughly point at the labels.
    let logits = vec![
        vec![1.2, 0.8, 0.0, 0.0, -0.5, 0.0, 0.3, 0.0],
        vec![0.0, 0.4, 1.0, 0.6, 0.0, 0.0, 0.0, -0.2],
        vec![0.3, 0.0, 0.0, 0.0, 0.2, 0.4, 0.9, 0.6],
    ];
    println!("predicted rows (softmax of the logits):");
    for d in softmax_predict(&logits).unwrap() {
        let row: Vec<String> = d.degrees().iter().map(|p| format!("{p:.3}")).collect();
        println!("  [{}]", row.join(", "));
    }

    let batch = BatchPrediction::from_logits(logits, labeled).unwrap();
    let labels: Vec<_> =
        batch.labeled.iter().map(|d| map_distribution(d, &circle).unwrap()).collect();

    println!("\nloss components as mu varies:");
    println!("  {:>4} {:>8} {:>8} {:>8} {:>8} {:>8}", "mu", "kl", "polar", "type", "pc", "combined");
    for mu in [0.0, 0.3, 0.7, 1.0] {
        let config = LossConfig { mu, ..LossConfig::default() };
        let report = batch_loss_report(&batch, &labels, &circle, &config).unwrap();
        println!(
            "  {mu:>4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            report.kl, report.polar, report.type_, report.pc, report.combined
        );
    }

    // The raw angle difference penalizes near-zero vs near-2pi angles
    // heavily; the wrapped option treats them as neighbors.
    let config = LossConfig { angle_difference: AngleDifference::Wrapped, ..LossConfig::default() };
    let wrapped = batch_loss_report(&batch, &labels, &circle, &config).unwrap();
    println!("\npc loss with raw angle differences:     {:.4}", config_pc_raw(&batch, &labels, &circle));
    println!("pc loss with wrapped angle differences: {:.4}", wrapped.pc);
}

fn config_pc_raw(
    batch: &BatchPrediction,
    labels: &[emocircle::circle::EmotionVector],
    circle: &CircleConfig,
) -> f64 {
    let config = LossConfig::default();
    batch_loss_report(batch, labels, circle, &config).unwrap().pc
}
