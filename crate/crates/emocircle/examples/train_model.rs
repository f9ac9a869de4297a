//! Train the linear-softmax predictor with the combined objective on
//! synthetic data and checkpoint the result.
//!
//! Run with `cargo run --example train_model`.

use emocircle::circle::CircleConfig;
use emocircle::data::{split, synth_generate};
use emocircle::losses::LossConfig;
use emocircle::model::{train, Checkpoint, TrainConfig};

fn main() {
    let circle = CircleConfig::mikel_wheel();
    let dataset = synth_generate(2000, 16, 1.0, 0.05, 1234).unwrap();
    let (train_set, heldout) = split(&dataset, 0.8, 7).unwrap();
    println!("training on {} samples, evaluating on {}", train_set.len(), heldout.len());

    let config = TrainConfig {
        epochs: 50,
        seed: 7,
        loss: LossConfig { mu: 0.7, ..LossConfig::default() },
        ..TrainConfig::desk_scale()
    };
    let outcome = train(&train_set, &heldout, &circle, &config).unwrap();

    println!("\nepoch  combined-loss  heldout-kl  heldout-accuracy");
    for (k, (loss, eval)) in outcome
        .trace
        .loss_reports
        .iter()
        .zip(&outcome.trace.eval_reports)
        .enumerate()
        .step_by(5)
    {
        println!("{k:>5}  {:>13.4}  {:>10.4}  {:>16.4}", loss.combined, eval.kl_div, eval.top1_accuracy);
    }

    let final_eval = outcome.trace.eval_reports.last().unwrap();
    println!("\nfinal held-out evaluation:\n{}", final_eval.table());

    let path = std::env::temp_dir().join("emocircle_example_model.txt");
    outcome.checkpoint().save(&path).unwrap();
    let restored = Checkpoint::load(&path).unwrap();
    println!(
        "\ncheckpoint saved to {} and reloaded (identical: {})",
        path.display(),
        restored.model == outcome.model
    );
}
