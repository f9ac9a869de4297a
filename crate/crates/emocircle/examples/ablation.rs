//! Ablate the circular-loss components: KL alone, then adding the polar
//! loss, the type loss, both, and the full intensity-weighted PC loss.
//!
//! Run with `cargo run --example ablation`.

use emocircle::circle::CircleConfig;
use emocircle::cli::ablation_variants;
use emocircle::data::{split, synth_generate};
use emocircle::losses::LossConfig;
use emocircle::model::{train, TrainConfig};

fn main() {
    let circle = CircleConfig::mikel_wheel();
    let dataset = synth_generate(1500, 16, 1.0, 0.05, 19).unwrap();
    let (train_set, heldout) = split(&dataset, 0.8, 19).unwrap();

    println!(
        "{:<14} {:>9} {:>8} {:>9} {:>8} {:>8} {:>13} {:>9}",
        "variant", "chebyshev", "clark", "canberra", "kl", "cosine", "intersection", "accuracy"
    );
    for (label, mu, term) in ablation_variants(0.7) {
        let config = TrainConfig {
            epochs: 50,
            seed: 19,
            loss: LossConfig { mu, term, ..LossConfig::default() },
            ..TrainConfig::desk_scale()
        };
        let outcome = train(&train_set, &heldout, &circle, &config).unwrap();
        let e = outcome.trace.eval_reports.last().unwrap();
        println!(
            "{label:<14} {:>9.4} {:>8.4} {:>9.4} {:>8.4} {:>8.4} {:>13.4} {:>9.4}",
            e.chebyshev, e.clark, e.canberra, e.kl_div, e.cosine, e.intersection, e.top1_accuracy
        );
    }
}
