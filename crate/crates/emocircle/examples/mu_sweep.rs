//! Sweep the loss weight mu and watch the three headline measures respond.
//!
//! Run with `cargo run --example mu_sweep`.

use emocircle::circle::CircleConfig;
use emocircle::data::{split, synth_generate};
use emocircle::losses::LossConfig;
use emocircle::model::{train, TrainConfig};

fn main() {
    let circle = CircleConfig::mikel_wheel();
    let dataset = synth_generate(1500, 16, 1.0, 0.05, 11).unwrap();
    let (train_set, heldout) = split(&dataset, 0.8, 11).unwrap();

    println!("{:>4} {:>10} {:>10} {:>10}", "mu", "kl", "cosine", "accuracy");
    for mu in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
        let config = TrainConfig {
            epochs: 50,
            seed: 11,
            loss: LossConfig { mu, ..LossConfig::default() },
            ..TrainConfig::desk_scale()
        };
        let outcome = train(&train_set, &heldout, &circle, &config).unwrap();
        let eval = outcome.trace.eval_reports.last().unwrap();
        println!("{mu:>4} {:>10.4} {:>10.4} {:>10.4}", eval.kl_div, eval.cosine, eval.top1_accuracy);
    }
    println!("\n(mu = 0 is the KL loss alone, mu = 1 the circular term alone)");
}
