//! Acceptance suite: one test per criterion, each printing a PASS line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::{circ_dist, complex_oracle, exit_code, read, run_cli, run_cli_with_env, stdout_of};
use emocircle::circle::{
    basic_vectors, map_distribution, map_to_cartesian, CircleConfig, EmotionDistribution, Polarity,
};
use emocircle::cli::gradcheck::{run as gradcheck_run, GradCheckOptions};
use emocircle::data::{split, synth_generate};
use emocircle::losses::{combined_loss, kl_loss, pc_loss, LossConfig, PredictedVector};
use emocircle::metrics::{
    canberra, chebyshev, clark, cosine, intersection, kl_divergence, KL_EPSILON,
};
use emocircle::model::{train, TrainConfig};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn pass(number: u32, name: &str) {
    println!("ACCEPTANCE {number:02} {name}: PASS");
}

fn random_simplex(rng: &mut ChaCha8Rng, len: usize) -> EmotionDistribution {
    let raw: Vec<f64> = (0..len).map(|_| rng.random_range(1e-6..1.0)).collect();
    EmotionDistribution::normalized(raw).unwrap()
}

#[test]
fn criterion_01_mapping_oracle_equivalence() {
    let config = CircleConfig::mikel_wheel();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let started = Instant::now();
    for _ in 0..1000 {
        let d = random_simplex(&mut rng, 8);
        let cart = map_to_cartesian(&d, &config).unwrap();
        let v = map_distribution(&d, &config).unwrap();
        let (oracle_cart, oracle_theta, oracle_r) = complex_oracle(d.degrees(), &config);
        assert!((cart.x - oracle_cart.x).abs() < 1e-12);
        assert!((cart.y - oracle_cart.y).abs() < 1e-12);
        assert!(!v.degenerate);
        assert!(circ_dist(v.angle, oracle_theta) < 1e-9);
        assert!((v.intensity - oracle_r).abs() < 1e-9);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
    pass(1, "mapping oracle equivalence (1000 points, <1s)");
}

#[test]
fn criterion_02_basic_vector_fidelity() {
    let config = CircleConfig::mikel_wheel();
    // Construction reproduces the basic vectors bit for bit.
    for (j, v) in basic_vectors(&config).iter().enumerate() {
        assert_eq!(v.angle, (2.0 * j as f64 + 1.0) * PI / 8.0);
        assert_eq!(v.intensity, 1.0);
        assert!(!v.degenerate);
    }
    // One-hot inputs through the full mapping pipeline reproduce them to
    // within a few ulp.
    for j in 0..8 {
        let d = EmotionDistribution::one_hot(j, 8).unwrap();
        let v = map_distribution(&d, &config).unwrap();
        assert!(circ_dist(v.angle, (2.0 * j as f64 + 1.0) * PI / 8.0) < 1e-12);
        assert!((v.intensity - 1.0).abs() < 1e-12);
        assert!(!v.degenerate);
    }
    let uniform = map_distribution(&EmotionDistribution::uniform(8).unwrap(), &config).unwrap();
    assert!(uniform.intensity < 1e-12);
    assert!(uniform.degenerate);
    pass(2, "basic-vector fidelity and uniform degeneracy");
}

#[test]
fn criterion_03_polarity_cone() {
    let config = CircleConfig::mikel_wheel();
    let positive_idx = [0usize, 1, 6, 7];
    let negative_idx = [2usize, 3, 4, 5];
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for (idx, want) in [(positive_idx, Polarity::Positive), (negative_idx, Polarity::Negative)] {
        for _ in 0..1000 {
            let mut degrees = vec![0.0; 8];
            for &j in &idx {
                degrees[j] = rng.random_range(1e-6..1.0);
            }
            let d = EmotionDistribution::normalized(degrees).unwrap();
            let v = map_distribution(&d, &config).unwrap();
            assert!(!v.degenerate, "single-half support must not be degenerate");
            assert!(v.intensity > 1e-9);
            assert_eq!(v.polarity, want);
        }
    }
    pass(3, "polarity cone (1000 single-half supports per half)");
}

#[test]
fn criterion_04_cartesian_linearity() {
    let config = CircleConfig::mikel_wheel();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..1000 {
        let d1 = random_simplex(&mut rng, 8);
        let d2 = random_simplex(&mut rng, 8);
        let alpha: f64 = rng.random_range(0.0..=1.0);
        let mixed: Vec<f64> = d1
            .degrees()
            .iter()
            .zip(d2.degrees())
            .map(|(&a, &b)| alpha * a + (1.0 - alpha) * b)
            .collect();
        let mixed = EmotionDistribution::normalized(mixed).unwrap();
        let cm = map_to_cartesian(&mixed, &config).unwrap();
        let c1 = map_to_cartesian(&d1, &config).unwrap();
        let c2 = map_to_cartesian(&d2, &config).unwrap();
        assert!((cm.x - (alpha * c1.x + (1.0 - alpha) * c2.x)).abs() < 1e-12);
        assert!((cm.y - (alpha * c1.y + (1.0 - alpha) * c2.y)).abs() < 1e-12);
    }
    pass(4, "Cartesian linearity (1000 convex combinations)");
}

#[test]
fn criterion_05_gradient_check() {
    let started = Instant::now();
    let report = gradcheck_run(&GradCheckOptions::default()).unwrap();
    assert_eq!(report.points, 100);
    assert!(
        report.passed() && report.max_relative_error <= 1e-5,
        "max relative error {}",
        report.max_relative_error
    );
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}, budget 30 s");
    pass(5, "gradient check (100 configurations, mu in {0, 0.3, 0.7, 1})");
}

#[test]
fn criterion_06_loss_closed_forms() {
    let one_hot = EmotionDistribution::one_hot(0, 8).unwrap();
    let uniform = EmotionDistribution::uniform(8).unwrap();
    let kl = kl_loss(&[one_hot], &[uniform]).unwrap();
    assert!((kl - 8f64.ln()).abs() < 1e-10);

    let config = LossConfig::default();
    let label = emocircle::circle::EmotionVector {
        polarity: Polarity::Positive,
        angle: PI / 8.0,
        intensity: 1.0,
        degenerate: false,
    };
    let predicted = PredictedVector { polarity: 1.0, angle: 9.0 * PI / 8.0 };
    let single = pc_loss(&[label], &[predicted], &config);
    assert!((single.value - (1.0 + PI * PI)).abs() < 1e-10);

    assert_eq!(combined_loss(2.0, 10.0, 0.7), 7.6);

    // Intensity scaling is exactly linear (power-of-two factors are exact
    // in floating point).
    for factor in [0.5f64, 2.0, 4.0] {
        let scaled_label = emocircle::circle::EmotionVector {
            intensity: label.intensity * factor,
            ..label
        };
        let scaled = pc_loss(&[scaled_label], &[predicted], &config);
        assert_eq!(scaled.value, factor * single.value);
    }
    pass(6, "loss closed forms (ln 8, 1+pi^2, 7.6, linear intensity)");
}

#[test]
fn criterion_07_metric_suite() {
    let d = EmotionDistribution::new(vec![0.3, 0.2, 0.15, 0.1, 0.1, 0.05, 0.05, 0.05]).unwrap();
    assert!(chebyshev(&d, &d).unwrap() <= 1e-8);
    assert!(clark(&d, &d, true).unwrap() <= 1e-8);
    assert!(canberra(&d, &d, true).unwrap() <= 1e-8);
    assert!(kl_divergence(&d, &d, KL_EPSILON).unwrap().abs() <= 1e-8);
    assert!(cosine(&d, &d).unwrap() >= 1.0 - 1e-12);
    assert!(intersection(&d, &d).unwrap() >= 1.0 - 1e-12);

    let a = EmotionDistribution::one_hot(0, 8).unwrap();
    let b = EmotionDistribution::one_hot(5, 8).unwrap();
    assert_eq!(chebyshev(&a, &b).unwrap(), 1.0);
    assert!((clark(&a, &b, true).unwrap() - 2f64.sqrt() / 8f64.sqrt()).abs() < 1e-12);
    assert!((canberra(&a, &b, true).unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(cosine(&a, &b).unwrap(), 0.0);
    assert_eq!(intersection(&a, &b).unwrap(), 0.0);
    assert!((kl_divergence(&a, &b, KL_EPSILON).unwrap() - 1e10f64.ln()).abs() < 1e-6);
    pass(7, "metric suite closed forms and epsilon convention");
}

#[test]
fn criterion_08_learnability() {
    let circle = CircleConfig::mikel_wheel();
    let dataset = synth_generate(2000, 16, 1.0, 0.05, 1234).unwrap();
    let started = Instant::now();
    let mut winners = 0;
    for seed in 0..5u64 {
        let (train_set, heldout) = split(&dataset, 0.8, seed).unwrap();
        let config = TrainConfig {
            seed,
            loss: LossConfig { mu: 0.7, ..LossConfig::default() },
            ..TrainConfig::desk_scale()
        };
        assert_eq!(config.epochs, 50);
        let outcome = train(&train_set, &heldout, &circle, &config).unwrap();
        let eval = outcome.trace.eval_reports.last().unwrap();
        if eval.top1_accuracy >= 0.85 && eval.kl_div <= 0.5 {
            winners += 1;
        }
    }
    let elapsed = started.elapsed();
    assert!(winners >= 4, "only {winners} of 5 seeds reached the target");
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}, budget 60 s");
    pass(8, "learnability (accuracy >= 0.85, KL <= 0.5 for >= 4/5 seeds, <60s)");
}

#[test]
fn criterion_09_protocol_reproduction() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let config = dir.path().join("run.conf");
    std::fs::write(
        &config,
        "epochs = 12\nlearning_rate = 0.01\nseed = 3\nmu = 0.7\n",
    )
    .unwrap();
    let synth = run_cli([
        "synth",
        "--n",
        "400",
        "--features",
        "8",
        "--noise",
        "0.05",
        "--seed",
        "11",
        "--out",
        data.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&synth), 0);

    // Full 11-point grid, run twice; the second run under a different
    // worker-thread cap must still be byte-identical.
    let sweep_args = [
        "sweep-mu",
        "--data",
        data.to_str().unwrap(),
        "--grid",
        "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1",
        "--config",
        config.to_str().unwrap(),
    ];
    let first = run_cli_with_env(sweep_args, "EMOCIRCLE_THREADS", "1");
    assert_eq!(exit_code(&first), 0);
    let second = run_cli_with_env(sweep_args, "EMOCIRCLE_THREADS", "3");
    assert_eq!(exit_code(&second), 0);
    assert_eq!(stdout_of(&first), stdout_of(&second), "sweep runs differ");

    let sweep_out = stdout_of(&first);
    let sweep_csv: Vec<&str> =
        sweep_out.lines().skip_while(|l| *l != "mu,kl,cosine,accuracy").collect();
    assert_eq!(sweep_csv[0], "mu,kl,cosine,accuracy");
    assert_eq!(sweep_csv.len(), 1 + 11, "11 grid rows expected");
    for row in &sweep_csv[1..] {
        let fields: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(fields.len(), 4);
        assert!((0.0..=1.0).contains(&fields[0]));
    }

    let ablate_args = [
        "ablate",
        "--data",
        data.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
    ];
    let first = run_cli(ablate_args);
    assert_eq!(exit_code(&first), 0);
    let second = run_cli(ablate_args);
    assert_eq!(stdout_of(&first), stdout_of(&second), "ablate runs differ");
    let out = stdout_of(&first);
    let mut rows = out
        .lines()
        .skip_while(|l| !l.starts_with("variant,"));
    assert_eq!(
        rows.next().unwrap(),
        "variant,chebyshev,clark,canberra,kl,cosine,intersection,accuracy"
    );
    let labels: Vec<&str> = rows.clone().map(|r| r.split(',').next().unwrap()).collect();
    assert_eq!(labels, ["L_KL", "L_KL+L_p", "L_KL+L_t", "L_KL+L_p+L_t", "L_KL+L_PC"]);
    for row in rows {
        assert_eq!(row.split(',').count(), 8);
        for v in row.split(',').skip(1) {
            let _: f64 = v.parse().unwrap();
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}, budget 10 min");
    pass(9, "protocol reproduction (11-point sweep + 5-variant ablation, byte-identical)");
}

#[test]
fn criterion_10_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let synth_args = [
        "synth",
        "--n",
        "60",
        "--features",
        "4",
        "--noise",
        "0.1",
        "--seed",
        "5",
        "--out",
        data.to_str().unwrap(),
    ];
    let first = run_cli(synth_args);
    assert_eq!(exit_code(&first), 0);
    let first_bytes = read(&data);
    let second = run_cli(synth_args);
    assert_eq!(stdout_of(&first), stdout_of(&second));
    assert_eq!(first_bytes, read(&data), "synth output not reproducible");

    let map_args = ["map", "--input", data.to_str().unwrap()];
    assert_eq!(stdout_of(&run_cli(map_args)), stdout_of(&run_cli(map_args)));

    let config = dir.path().join("run.conf");
    std::fs::write(&config, "epochs = 3\nlearning_rate = 0.01\nseed = 2\n").unwrap();
    let out_dir = dir.path().join("run");
    let train_args = [
        "train",
        "--data",
        data.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ];
    let first = run_cli(train_args);
    assert_eq!(exit_code(&first), 0);
    let checkpoint = read(&out_dir.join("checkpoint.txt"));
    let trace = read(&out_dir.join("trace.csv"));
    let eval = read(&out_dir.join("eval.csv"));
    let second = run_cli(train_args);
    assert_eq!(stdout_of(&first), stdout_of(&second));
    assert_eq!(checkpoint, read(&out_dir.join("checkpoint.txt")));
    assert_eq!(trace, read(&out_dir.join("trace.csv")));
    assert_eq!(eval, read(&out_dir.join("eval.csv")));

    let gradcheck_args = ["gradcheck", "--points", "6", "--seed", "9"];
    assert_eq!(stdout_of(&run_cli(gradcheck_args)), stdout_of(&run_cli(gradcheck_args)));
    pass(10, "determinism (synth, map, train, gradcheck byte-identical)");
}
