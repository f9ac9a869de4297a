//! End-to-end tests of the command-line surface: flags, exit codes, output
//! formats, and the cross-command consistency promises.

mod common;

use std::path::Path;

use common::{exit_code, read, run_cli, stdout_of};
use emocircle::circle::CircleConfig;
use emocircle::data::load_csv;
use emocircle::model::{Checkpoint, LinearModel};

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

/// A small CSV with one-hot labels and F=2 features.
fn one_hot_csv(rows: usize) -> String {
    let mut out = String::from("id,f1,f2,d1,d2,d3,d4,d5,d6,d7,d8\n");
    for i in 0..rows {
        let mut degrees = ["0"; 8];
        degrees[i % 8] = "1";
        out.push_str(&format!("s{i},0.5,-0.5,{}\n", degrees.join(",")));
    }
    out
}

#[test]
fn map_single_distribution_prints_the_vector() {
    let out = run_cli(["map", "--dist", "1,0,0,0,0,0,0,0"]);
    assert_eq!(exit_code(&out), 0);
    let stdout = stdout_of(&out);
    assert!(stdout.contains("resolved configuration:"));
    assert!(
        stdout.contains("p=0 theta=0.392699 r=1.000000 degenerate=false"),
        "unexpected output:\n{stdout}"
    );
}

#[test]
fn map_uniform_distribution_is_degenerate() {
    let out = run_cli(["map", "--dist", "0.125,0.125,0.125,0.125,0.125,0.125,0.125,0.125"]);
    assert_eq!(exit_code(&out), 0);
    let stdout = stdout_of(&out);
    assert!(stdout.contains("r=0.000000"));
    assert!(stdout.contains("degenerate=true"));
}

#[test]
fn map_parse_failures_exit_2() {
    assert_eq!(exit_code(&run_cli(["map", "--dist", "one,0,0,0,0,0,0,0"])), 2);
    assert_eq!(exit_code(&run_cli(["map", "--dist", "0.5,0.5"])), 2);
    assert_eq!(exit_code(&run_cli(["map", "--dist", "0.9,0,0,0,0,0,0,0"])), 2);
    assert_eq!(exit_code(&run_cli(["map"])), 2);
    // Unknown flags are a usage error.
    assert_eq!(exit_code(&run_cli(["map", "--bogus", "1"])), 2);
}

#[test]
fn map_batch_emits_one_row_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    write(&data, &one_hot_csv(5));
    let out_path = dir.path().join("mapped.csv");
    let out = run_cli([
        "map",
        "--input",
        data.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let mapped = read(&out_path);
    let lines: Vec<&str> = mapped.lines().collect();
    assert_eq!(lines[0], "id,p,theta,r,degenerate");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[1], "s0,0,0.392699,1.000000,false");
    assert_eq!(lines[3], "s2,1,1.963495,1.000000,false");
}

#[test]
fn synth_writes_a_loadable_deterministic_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("synth.csv");
    let args = [
        "synth",
        "--n",
        "100",
        "--features",
        "3",
        "--concentration",
        "1.5",
        "--noise",
        "0.1",
        "--seed",
        "8",
        "--out",
        data.to_str().unwrap(),
    ];
    assert_eq!(exit_code(&run_cli(args)), 0);
    let first = read(&data);
    assert_eq!(first.lines().count(), 101, "header plus one line per sample");
    assert_eq!(exit_code(&run_cli(args)), 0);
    assert_eq!(first, read(&data));

    let dataset = load_csv(&data, &CircleConfig::mikel_wheel()).unwrap();
    assert_eq!(dataset.len(), 100);
    assert_eq!(dataset.feature_dim(), 3);

    let bad = run_cli([
        "synth",
        "--n",
        "5",
        "--features",
        "2",
        "--out",
        "/nonexistent-dir/file.csv",
    ]);
    assert_eq!(exit_code(&bad), 2);
}

#[test]
fn train_writes_checkpoint_trace_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    write(&data, &one_hot_csv(20));
    let config = dir.path().join("run.conf");
    write(&config, "epochs = 4\nlearning_rate = 0.01\nseed = 1\n");
    let out_dir = dir.path().join("out");
    let out = run_cli([
        "train",
        "--data",
        data.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let trace = read(&out_dir.join("trace.csv"));
    let lines: Vec<&str> = trace.lines().collect();
    assert!(lines[0].starts_with("epoch,kl,polar,type,pc,combined,"));
    assert_eq!(lines.len(), 1 + 4, "one row per epoch");

    let eval = read(&out_dir.join("eval.csv"));
    assert!(eval.starts_with("chebyshev,clark,canberra,kl,cosine,intersection,accuracy\n"));

    let checkpoint = Checkpoint::load(&out_dir.join("checkpoint.txt")).unwrap();
    assert_eq!(checkpoint.model.feature_dim(), 2);
    assert_eq!(checkpoint.model.category_count(), 8);
    assert_eq!(checkpoint.epoch, 4);
    assert!(checkpoint.optimizer.is_some());
}

#[test]
fn train_traces_differ_between_mu_values() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    write(&data, &one_hot_csv(20));
    let mut traces = Vec::new();
    for mu in ["0", "0.7"] {
        let config = dir.path().join(format!("mu{mu}.conf"));
        write(&config, &format!("epochs = 3\nlearning_rate = 0.01\nseed = 4\nmu = {mu}\n"));
        let out_dir = dir.path().join(format!("out{mu}"));
        let out = run_cli([
            "train",
            "--data",
            data.to_str().unwrap(),
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0);
        traces.push(read(&out_dir.join("trace.csv")));
    }
    assert_ne!(traces[0], traces[1], "PC gradient path left no mark");
}

#[test]
fn train_resume_matches_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    write(&data, &one_hot_csv(25));
    let short = dir.path().join("short.conf");
    write(&short, "epochs = 3\nlearning_rate = 0.01\nseed = 6\n");
    let long = dir.path().join("long.conf");
    write(&long, "epochs = 6\nlearning_rate = 0.01\nseed = 6\n");

    let full_dir = dir.path().join("full");
    run_cli([
        "train",
        "--data",
        data.to_str().unwrap(),
        "--config",
        long.to_str().unwrap(),
        "--out",
        full_dir.to_str().unwrap(),
    ]);

    let half_dir = dir.path().join("half");
    run_cli([
        "train",
        "--data",
        data.to_str().unwrap(),
        "--config",
        short.to_str().unwrap(),
        "--out",
        half_dir.to_str().unwrap(),
    ]);
    let resumed_dir = dir.path().join("resumed");
    let resumed = run_cli([
        "train",
        "--data",
        data.to_str().unwrap(),
        "--config",
        long.to_str().unwrap(),
        "--out",
        resumed_dir.to_str().unwrap(),
        "--resume",
        half_dir.join("checkpoint.txt").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&resumed), 0);

    assert_eq!(
        read(&full_dir.join("checkpoint.txt")),
        read(&resumed_dir.join("checkpoint.txt")),
        "resumed parameters diverged from the uninterrupted run"
    );
    assert_eq!(read(&full_dir.join("eval.csv")), read(&resumed_dir.join("eval.csv")));
    // The resumed trace covers exactly the remaining epochs and matches the
    // tail of the full trace row for row.
    let full_trace = read(&full_dir.join("trace.csv"));
    let resumed_trace = read(&resumed_dir.join("trace.csv"));
    let full_rows: Vec<&str> = full_trace.lines().collect();
    let resumed_rows: Vec<&str> = resumed_trace.lines().collect();
    assert_eq!(resumed_rows.len(), 1 + 3);
    assert_eq!(resumed_rows[1..], full_rows[4..]);
}

#[test]
fn train_aborts_with_exit_3_on_non_finite_loss() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    let mut csv = String::from("id,f1,d1,d2,d3,d4,d5,d6,d7,d8\n");
    for i in 0..6 {
        let mut degrees = ["0"; 8];
        degrees[i % 8] = "1";
        csv.push_str(&format!("s{i},1e100,{}\n", degrees.join(",")));
    }
    write(&data, &csv);
    let config = dir.path().join("run.conf");
    write(&config, "epochs = 2\nlearning_rate = 1e250\nseed = 0\n");
    let out = run_cli([
        "train",
        "--data",
        data.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 3);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("epoch"), "diagnostic should name the epoch: {stderr}");
}

#[test]
fn eval_uniform_predictor_on_one_hot_labels() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    write(&data, &one_hot_csv(8));
    // Zero weights give uniform predictions everywhere.
    let model_path = dir.path().join("zero.ckpt");
    Checkpoint::weights_only(LinearModel::zeros(2, 8)).save(&model_path).unwrap();
    let out = run_cli([
        "eval",
        "--data",
        data.to_str().unwrap(),
        "--model",
        model_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let stdout = stdout_of(&out);
    assert!(stdout.contains("2.079442"), "KL of ln 8 expected:\n{stdout}");
    assert!(stdout.contains("0.353553"), "cosine of 1/sqrt(8) expected:\n{stdout}");
}

#[test]
fn eval_perfect_model_on_its_own_labels() {
    let dir = tempfile::tempdir().unwrap();
    // Features equal the one-hot label; a scaled identity saturates the
    // softmax onto it.
    let data = dir.path().join("d.csv");
    let mut csv = String::from("id,f1,f2,f3,f4,f5,f6,f7,f8,d1,d2,d3,d4,d5,d6,d7,d8\n");
    for i in 0..8 {
        let mut row = ["0"; 8];
        row[i] = "1";
        csv.push_str(&format!("s{i},{},{}\n", row.join(","), row.join(",")));
    }
    write(&data, &csv);
    let mut model = LinearModel::zeros(8, 8);
    for j in 0..8 {
        model.weights[j][j] = 1e3;
    }
    let model_path = dir.path().join("perfect.ckpt");
    Checkpoint::weights_only(model).save(&model_path).unwrap();
    let out = run_cli([
        "eval",
        "--data",
        data.to_str().unwrap(),
        "--model",
        model_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let stdout = stdout_of(&out);
    assert!(stdout.contains("Chebyshev    (down) 0.000000"), "{stdout}");
    assert!(stdout.contains("Cosine       (up)   1.000000"), "{stdout}");
    assert!(stdout.contains("Intersection (up)   1.000000"), "{stdout}");
    assert!(stdout.contains("Accuracy     (up)   1.000000"), "{stdout}");
}

#[test]
fn eval_error_paths_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let model_path = dir.path().join("zero.ckpt");
    Checkpoint::weights_only(LinearModel::zeros(2, 8)).save(&model_path).unwrap();

    let empty = dir.path().join("empty.csv");
    write(&empty, "id,f1,f2,d1,d2,d3,d4,d5,d6,d7,d8\n");
    let out = run_cli([
        "eval",
        "--data",
        empty.to_str().unwrap(),
        "--model",
        model_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);

    let mismatched = dir.path().join("wide.csv");
    write(&mismatched, "id,f1,f2,f3,d1,d2,d3,d4,d5,d6,d7,d8\na,1,2,3,1,0,0,0,0,0,0,0\nb,1,2,3,0,1,0,0,0,0,0,0\n");
    let out = run_cli([
        "eval",
        "--data",
        mismatched.to_str().unwrap(),
        "--model",
        model_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn gradcheck_passes_and_honors_the_tolerance_flag() {
    let out = run_cli(["gradcheck", "--points", "8", "--seed", "3"]);
    assert_eq!(exit_code(&out), 0);
    let stdout = stdout_of(&out);
    assert!(stdout.contains("max relative error"));
    assert!(stdout.contains("PASS"));

    let mu_zero = run_cli(["gradcheck", "--points", "6", "--mu", "0"]);
    assert_eq!(exit_code(&mu_zero), 0);
    assert!(stdout_of(&mu_zero).contains("PASS"));

    // An unattainable tolerance flips the verdict and the exit code.
    let strict = run_cli(["gradcheck", "--points", "4", "--tolerance", "1e-30"]);
    assert_eq!(exit_code(&strict), 1);
    assert!(stdout_of(&strict).contains("FAIL"));
}

#[test]
fn sweep_single_point_matches_standalone_train() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    write(&data, &one_hot_csv(30));
    let config = dir.path().join("run.conf");
    write(&config, "epochs = 3\nlearning_rate = 0.01\nseed = 9\nmu = 0.5\n");

    let sweep = run_cli([
        "sweep-mu",
        "--data",
        data.to_str().unwrap(),
        "--grid",
        "0.5",
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&sweep), 0);
    let sweep_out = stdout_of(&sweep);
    let row = sweep_out
        .lines()
        .skip_while(|l| *l != "mu,kl,cosine,accuracy")
        .nth(1)
        .expect("one data row");

    let out_dir = dir.path().join("out");
    run_cli([
        "train",
        "--data",
        data.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    let eval = read(&out_dir.join("eval.csv"));
    let eval_fields: Vec<&str> = eval.lines().nth(1).unwrap().split(',').collect();
    let row_fields: Vec<&str> = row.split(',').collect();
    assert_eq!(row_fields[0], "0.5");
    // kl, cosine, accuracy columns of eval.csv are 3, 4, 6.
    assert_eq!(row_fields[1], eval_fields[3]);
    assert_eq!(row_fields[2], eval_fields[4]);
    assert_eq!(row_fields[3], eval_fields[6]);
}

#[test]
fn sweep_rejects_invalid_grids() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    write(&data, &one_hot_csv(10));
    let out = run_cli(["sweep-mu", "--data", data.to_str().unwrap(), "--grid", "0,1.5"]);
    assert_eq!(exit_code(&out), 2);
    let out = run_cli(["sweep-mu", "--data", data.to_str().unwrap(), "--grid", "half"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn ablate_endpoints_match_standalone_training() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    write(&data, &one_hot_csv(30));
    let config = dir.path().join("run.conf");
    write(&config, "epochs = 3\nlearning_rate = 0.01\nseed = 12\nmu = 0.7\n");

    let ablate = run_cli([
        "ablate",
        "--data",
        data.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&ablate), 0);
    let out = stdout_of(&ablate);
    let rows: Vec<&str> = out.lines().skip_while(|l| !l.starts_with("variant,")).collect();
    assert_eq!(rows.len(), 1 + 5);

    // The KL-only row equals a standalone mu = 0 run, the full-PC row a
    // standalone mu = 0.7 run.
    for (label, mu, row_index) in [("L_KL", "0", 1), ("L_KL+L_PC", "0.7", 5)] {
        let cfg = dir.path().join(format!("mu{mu}.conf"));
        write(&cfg, &format!("epochs = 3\nlearning_rate = 0.01\nseed = 12\nmu = {mu}\n"));
        let out_dir = dir.path().join(format!("out{mu}"));
        run_cli([
            "train",
            "--data",
            data.to_str().unwrap(),
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        let eval = read(&out_dir.join("eval.csv"));
        let expected = format!("{label},{}", eval.lines().nth(1).unwrap());
        assert_eq!(rows[row_index], expected, "{label} row mismatch");
    }
}

#[test]
fn config_file_round_trips_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    write(
        &config,
        "category_names = a,b,c,d\nmu = 0.4\nangle_difference = wrapped\nepochs = 2\n",
    );
    let out = run_cli([
        "map",
        "--config",
        config.to_str().unwrap(),
        "--dist",
        "1,0,0,0",
    ]);
    assert_eq!(exit_code(&out), 0);
    let stdout = stdout_of(&out);
    assert!(stdout.contains("category_names = a,b,c,d"));
    assert!(stdout.contains("mu = 0.4"));
    assert!(stdout.contains("angle_difference = wrapped"));
    // Four categories put position 1 at pi/4.
    assert!(stdout.contains("p=0 theta=0.785398 r=1.000000"));

    let bad = dir.path().join("bad.conf");
    write(&bad, "unheard_of = 3\n");
    assert_eq!(exit_code(&run_cli(["map", "--config", bad.to_str().unwrap(), "--dist", "1,0"])), 2);
}
