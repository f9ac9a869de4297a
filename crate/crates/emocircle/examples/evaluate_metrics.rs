//! Score predictors with the six distribution measures plus top-1
//! accuracy, and aggregate methods with the direction-aware average rank.
//!
//! Run with `cargo run --example evaluate_metrics`.

use emocircle::circle::{CircleConfig, EmotionDistribution};
use emocircle::data::{split, synth_generate};
use emocircle::losses::LossConfig;
use emocircle::metrics::{average_rank, evaluate_all, EvalReport};
use emocircle::model::{forward, train, TrainConfig};

fn uniform_predictions(n: usize) -> Vec<EmotionDistribution> {
    (0..n).map(|_| EmotionDistribution::uniform(8).unwrap()).collect()
}

fn main() {
    let circle = CircleConfig::mikel_wheel();
    let dataset = synth_generate(800, 10, 1.0, 0.05, 3).unwrap();
    let (train_set, heldout) = split(&dataset, 0.8, 3).unwrap();
    let labeled = heldout.distributions();

    // Three predictors of very different quality.
    let uniform = evaluate_all(&labeled, &uniform_predictions(heldout.len())).unwrap();

    let quick = TrainConfig { epochs: 3, seed: 3, ..TrainConfig::desk_scale() };
    let quick_model = train(&train_set, &heldout, &circle, &quick).unwrap().model;
    let quick_eval = score(&quick_model, &heldout, &labeled);

    let tuned = TrainConfig {
        epochs: 40,
        seed: 3,
        loss: LossConfig { mu: 0.7, ..LossConfig::default() },
        ..TrainConfig::desk_scale()
    };
    let tuned_model = train(&train_set, &heldout, &circle, &tuned).unwrap().model;
    let tuned_eval = score(&tuned_model, &heldout, &labeled);

    for (name, report) in
        [("uniform", &uniform), ("3 epochs", &quick_eval), ("40 epochs", &tuned_eval)]
    {
        println!("{name}:\n{}\n", report.table());
    }

    let ranks = average_rank(&[
        ("uniform".into(), uniform),
        ("3 epochs".into(), quick_eval),
        ("40 epochs".into(), tuned_eval),
    ])
    .unwrap();
    println!("average rank over the six distribution measures (1 = best):");
    for (name, rank) in ranks {
        println!("  {name:<10} {rank:.2}");
    }
}

fn score(
    model: &emocircle::model::LinearModel,
    heldout: &emocircle::data::Dataset,
    labeled: &[EmotionDistribution],
) -> EvalReport {
    let batch = forward(model, &heldout.features(), labeled).unwrap();
    evaluate_all(labeled, &batch.predicted).unwrap()
}
