//! Command-line surface.
//!
//! Subcommands: `map`, `train`, `eval`, `gradcheck`, `sweep-mu`, `ablate`,
//! `synth`. Every run prints its resolved configuration before executing,
//! all randomness is seeded, and repeated runs with identical flags produce
//! byte-identical outputs.
//!
//! Exit codes: 0 success, 1 verification failure (failed gradient check),
//! 2 usage or input error, 3 numerical failure.

pub mod gradcheck;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::circle::{map_distribution, EmotionDistribution, EmotionVector};
use crate::config::RunConfig;
use crate::data::{load_csv, save_csv, split, synth_generate_with, Dataset, SynthParams};
use crate::error::{Error, Result};
use crate::losses::{AngleDifference, CircularTerm, LossConfig, PolarityMode};
use crate::metrics::{evaluate_all, EvalReport};
use crate::model::{forward, resume, train, Checkpoint, TrainConfig};

/// Environment variable capping `sweep-mu` worker threads (default 1).
pub const THREADS_ENV: &str = "EMOCIRCLE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "emocircle",
    version,
    about = "Circular emotion representation for label distribution learning"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Map emotion distributions to compound emotion vectors.
    Map(MapArgs),
    /// Train the linear-softmax predictor with the combined objective.
    Train(TrainArgs),
    /// Evaluate a checkpoint with the seven measures.
    Eval(EvalArgs),
    /// Verify analytic gradients against central finite differences.
    Gradcheck(GradcheckArgs),
    /// Train one model per mu on a grid and report KL, cosine, accuracy.
    SweepMu(SweepMuArgs),
    /// Run the five loss-variant ablations under one seed.
    Ablate(AblateArgs),
    /// Generate a synthetic dataset CSV.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// Comma-separated description degrees, e.g. "1,0,0,0,0,0,0,0".
    #[arg(long, conflicts_with = "input")]
    pub dist: Option<String>,
    /// Dataset CSV; every row is mapped.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Configuration file (key = value).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write batch output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Configuration file (key = value).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory for checkpoint.txt, trace.csv, eval.csv.
    #[arg(long)]
    pub out: PathBuf,
    /// Continue from a previously written checkpoint.
    #[arg(long)]
    pub resume: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Dataset CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Model checkpoint.
    #[arg(long)]
    pub model: PathBuf,
    /// Configuration file (key = value).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also write the report as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random model/batch configurations.
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Comma-separated mu values cycled across configurations.
    #[arg(long, default_value = "0,0.3,0.7,1")]
    pub mu: String,
    /// Polarity mode: soft or hard_subgradient.
    #[arg(long, default_value = "soft")]
    pub mode: String,
    /// Angle difference: raw or wrapped.
    #[arg(long, default_value = "raw")]
    pub angles: String,
    /// Central-difference step.
    #[arg(long, default_value_t = 1e-6)]
    pub step: f64,
    /// Largest acceptable relative error.
    #[arg(long, default_value_t = 1e-5)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct SweepMuArgs {
    /// Dataset CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Comma-separated mu grid, each value in [0, 1].
    #[arg(long, default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1")]
    pub grid: String,
    /// Configuration file (key = value).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also write the sweep table as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    /// Dataset CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Configuration file (key = value).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also write the ablation table as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Number of samples.
    #[arg(long)]
    pub n: usize,
    /// Feature dimension.
    #[arg(long)]
    pub features: usize,
    /// Category count.
    #[arg(long, default_value_t = 8)]
    pub categories: usize,
    /// Dirichlet concentration over the supported categories.
    #[arg(long, default_value_t = 1.0)]
    pub concentration: f64,
    /// Gaussian feature-noise standard deviation.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

/// Runs a parsed command and returns the process exit code.
pub fn run(command: &Command) -> i32 {
    let outcome = match command {
        Command::Map(args) => cmd_map(args),
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Gradcheck(args) => cmd_gradcheck(args),
        Command::SweepMu(args) => cmd_sweep_mu(args),
        Command::Ablate(args) => cmd_ablate(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NonFinite(_) => 3,
                _ => 2,
            }
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::from_file(p),
        None => Ok(RunConfig::default()),
    }
}

fn print_resolved(command: &str, extras: &[(&str, String)], config: Option<&RunConfig>) {
    println!("resolved configuration:");
    println!("  command = {command}");
    for (key, value) in extras {
        println!("  {key} = {value}");
    }
    if let Some(cfg) = config {
        for line in cfg.to_text().lines() {
            println!("  {line}");
        }
    }
    println!();
}

fn format_vector(v: &EmotionVector) -> String {
    format!(
        "p={} theta={:.6} r={:.6} degenerate={}",
        v.polarity, v.angle, v.intensity, v.degenerate
    )
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_map(args: &MapArgs) -> Result<i32> {
    let cfg = load_config(&args.config)?;
    let mut extras = Vec::new();
    if let Some(dist) = &args.dist {
        extras.push(("dist", dist.clone()));
    }
    if let Some(input) = &args.input {
        extras.push(("input", input.display().to_string()));
    }
    print_resolved("map", &extras, Some(&cfg));

    if let Some(dist) = &args.dist {
        let degrees: Vec<f64> = dist
            .split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: 1,
                    msg: format!("`{s}` is not a number"),
                })
            })
            .collect::<Result<_>>()?;
        if degrees.len() != cfg.circle.category_count() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} degrees, found {}",
                cfg.circle.category_count(),
                degrees.len()
            )));
        }
        let d = EmotionDistribution::new(degrees)?;
        println!("{}", format_vector(&map_distribution(&d, &cfg.circle)?));
        return Ok(0);
    }

    if let Some(input) = &args.input {
        let dataset = load_csv(input, &cfg.circle)?;
        let mut out = String::from("id,p,theta,r,degenerate\n");
        for sample in dataset.samples() {
            let v = map_distribution(&sample.distribution, &cfg.circle)?;
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{}",
                sample.id, v.polarity, v.angle, v.intensity, v.degenerate
            );
        }
        write_or_print(&args.out, &out)?;
        return Ok(0);
    }

    Err(Error::InvalidConfig("provide --dist or --input".into()))
}

fn cmd_train(args: &TrainArgs) -> Result<i32> {
    let cfg = load_config(&args.config)?;
    let mut extras = vec![
        ("data", args.data.display().to_string()),
        ("out", args.out.display().to_string()),
    ];
    if let Some(resume_from) = &args.resume {
        extras.push(("resume", resume_from.display().to_string()));
    }
    print_resolved("train", &extras, Some(&cfg));

    let dataset = load_csv(&args.data, &cfg.circle)?;
    let (train_set, heldout) = split(&dataset, 0.8, cfg.train.seed)?;
    let outcome = match &args.resume {
        Some(path) => {
            resume(&train_set, &heldout, &cfg.circle, &cfg.train, Checkpoint::load(path)?)?
        }
        None => train(&train_set, &heldout, &cfg.circle, &cfg.train)?,
    };

    std::fs::create_dir_all(&args.out)?;
    outcome.checkpoint().save(&args.out.join("checkpoint.txt"))?;
    std::fs::write(args.out.join("trace.csv"), outcome.trace.to_csv())?;
    let final_eval = outcome
        .trace
        .eval_reports
        .last()
        .ok_or_else(|| Error::EmptyInput("trace has no epochs".into()))?;
    std::fs::write(
        args.out.join("eval.csv"),
        format!("{}\n{}\n", EvalReport::csv_header(), final_eval.csv_row()),
    )?;

    println!(
        "trained epochs {}..{} ({} optimizer steps) on {} samples",
        outcome.trace.start_epoch,
        outcome.epochs_completed,
        outcome.optimizer.step,
        train_set.len()
    );
    println!("held-out evaluation ({} samples):", heldout.len());
    println!("{}", final_eval.table());
    println!("wrote checkpoint.txt, trace.csv, eval.csv under {}", args.out.display());
    Ok(0)
}

fn cmd_eval(args: &EvalArgs) -> Result<i32> {
    let cfg = load_config(&args.config)?;
    print_resolved(
        "eval",
        &[
            ("data", args.data.display().to_string()),
            ("model", args.model.display().to_string()),
        ],
        Some(&cfg),
    );
    let dataset = load_csv(&args.data, &cfg.circle)?;
    let checkpoint = Checkpoint::load(&args.model)?;
    let batch = forward(&checkpoint.model, &dataset.features(), &dataset.distributions())?;
    let report = evaluate_all(&batch.labeled, &batch.predicted)?;
    println!("evaluation over {} samples:", report.sample_count);
    println!("{}", report.table());
    if args.out.is_some() {
        write_or_print(
            &args.out,
            &format!("{}\n{}\n", EvalReport::csv_header(), report.csv_row()),
        )?;
    }
    Ok(0)
}

fn parse_mu_list(text: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| {
            let v: f64 = s.trim().parse().map_err(|_| Error::Parse {
                line: 1,
                msg: format!("`{s}` is not a number"),
            })?;
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("mu {v} outside [0, 1]")));
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(Error::EmptyInput("empty mu list".into()));
    }
    Ok(values)
}

fn cmd_gradcheck(args: &GradcheckArgs) -> Result<i32> {
    let options = gradcheck::GradCheckOptions {
        seed: args.seed,
        points: args.points,
        mus: parse_mu_list(&args.mu)?,
        polarity_mode: match args.mode.as_str() {
            "soft" => PolarityMode::Soft,
            "hard_subgradient" => PolarityMode::HardSubgradient,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "mode must be soft or hard_subgradient, found `{other}`"
                )))
            }
        },
        angle_difference: match args.angles.as_str() {
            "raw" => AngleDifference::Raw,
            "wrapped" => AngleDifference::Wrapped,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "angles must be raw or wrapped, found `{other}`"
                )))
            }
        },
        step: args.step,
        tolerance: args.tolerance,
    };
    print_resolved(
        "gradcheck",
        &[
            ("seed", args.seed.to_string()),
            ("points", args.points.to_string()),
            ("mu", args.mu.clone()),
            ("mode", args.mode.clone()),
            ("angles", args.angles.clone()),
            ("step", args.step.to_string()),
            ("tolerance", args.tolerance.to_string()),
        ],
        None,
    );
    let report = gradcheck::run(&options)?;
    println!(
        "checked {} configurations ({} parameters)",
        report.points, report.parameters_checked
    );
    if let Some(worst) = &report.worst {
        println!(
            "max relative error {:e} at point {} (mu={}) {}: analytic {:e} vs numeric {:e}",
            worst.relative_error, worst.point, worst.mu, worst.parameter, worst.analytic,
            worst.numeric
        );
    }
    if report.passed() {
        println!("PASS (tolerance {:e})", report.tolerance);
        Ok(0)
    } else {
        println!("FAIL (tolerance {:e})", report.tolerance);
        Ok(1)
    }
}

fn worker_threads(points: usize) -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(1)
        .min(points.max(1))
}

fn train_final_eval(
    train_set: &Dataset,
    heldout: &Dataset,
    cfg: &RunConfig,
    train_config: &TrainConfig,
) -> Result<EvalReport> {
    let outcome = train(train_set, heldout, &cfg.circle, train_config)?;
    outcome
        .trace
        .eval_reports
        .last()
        .copied()
        .ok_or_else(|| Error::EmptyInput("trace has no epochs".into()))
}

fn cmd_sweep_mu(args: &SweepMuArgs) -> Result<i32> {
    let cfg = load_config(&args.config)?;
    print_resolved(
        "sweep-mu",
        &[("data", args.data.display().to_string()), ("grid", args.grid.clone())],
        Some(&cfg),
    );
    let mut grid = parse_mu_list(&args.grid)?;
    grid.sort_by(|a, b| a.partial_cmp(b).expect("validated finite"));
    grid.dedup();

    let dataset = load_csv(&args.data, &cfg.circle)?;
    let (train_set, heldout) = split(&dataset, 0.8, cfg.train.seed)?;

    let threads = worker_threads(grid.len());
    let mut results: Vec<Option<Result<EvalReport>>> = Vec::new();
    results.resize_with(grid.len(), || None);
    if threads <= 1 {
        for (slot, &mu) in results.iter_mut().zip(&grid) {
            let train_config =
                TrainConfig { loss: LossConfig { mu, ..cfg.train.loss.clone() }, ..cfg.train.clone() };
            *slot = Some(train_final_eval(&train_set, &heldout, &cfg, &train_config));
        }
    } else {
        // Grid points are independent and fully seeded, so the result is
        // identical for any thread count; rows are emitted in grid order.
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots = std::sync::Mutex::new(&mut results);
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if i >= grid.len() {
                        break;
                    }
                    let train_config = TrainConfig {
                        loss: LossConfig { mu: grid[i], ..cfg.train.loss.clone() },
                        ..cfg.train.clone()
                    };
                    let result = train_final_eval(&train_set, &heldout, &cfg, &train_config);
                    slots.lock().expect("no panics while locked")[i] = Some(result);
                });
            }
        });
    }

    let mut out = String::from("mu,kl,cosine,accuracy\n");
    for (&mu, result) in grid.iter().zip(results) {
        let report = result.expect("every grid point ran")?;
        let _ = writeln!(out, "{},{},{},{}", mu, report.kl_div, report.cosine, report.top1_accuracy);
    }
    print!("{out}");
    if args.out.is_some() {
        write_or_print(&args.out, &out)?;
    }
    Ok(0)
}

/// The five loss-variant rows of the ablation table.
pub fn ablation_variants(mu: f64) -> [(&'static str, f64, CircularTerm); 5] {
    [
        ("L_KL", 0.0, CircularTerm::Pc),
        ("L_KL+L_p", mu, CircularTerm::Polar),
        ("L_KL+L_t", mu, CircularTerm::Type),
        ("L_KL+L_p+L_t", mu, CircularTerm::PolarType),
        ("L_KL+L_PC", mu, CircularTerm::Pc),
    ]
}

fn cmd_ablate(args: &AblateArgs) -> Result<i32> {
    let cfg = load_config(&args.config)?;
    print_resolved("ablate", &[("data", args.data.display().to_string())], Some(&cfg));
    let dataset = load_csv(&args.data, &cfg.circle)?;
    let (train_set, heldout) = split(&dataset, 0.8, cfg.train.seed)?;

    let mut out = String::from("variant,chebyshev,clark,canberra,kl,cosine,intersection,accuracy\n");
    for (label, mu, term) in ablation_variants(cfg.train.loss.mu) {
        let train_config = TrainConfig {
            loss: LossConfig { mu, term, ..cfg.train.loss.clone() },
            ..cfg.train.clone()
        };
        let report = train_final_eval(&train_set, &heldout, &cfg, &train_config)?;
        let _ = writeln!(out, "{},{}", label, report.csv_row());
    }
    print!("{out}");
    if args.out.is_some() {
        write_or_print(&args.out, &out)?;
    }
    Ok(0)
}

fn cmd_synth(args: &SynthArgs) -> Result<i32> {
    print_resolved(
        "synth",
        &[
            ("n", args.n.to_string()),
            ("features", args.features.to_string()),
            ("categories", args.categories.to_string()),
            ("concentration", args.concentration.to_string()),
            ("noise", args.noise.to_string()),
            ("seed", args.seed.to_string()),
            ("out", args.out.display().to_string()),
        ],
        None,
    );
    let params = SynthParams {
        category_count: args.categories,
        ..SynthParams::new(args.n, args.features, args.concentration, args.noise, args.seed)
    };
    let dataset = synth_generate_with(&params)?;
    save_csv(&dataset, &args.out)?;
    println!(
        "wrote {} samples ({} features, {} categories) to {}",
        dataset.len(),
        dataset.feature_dim(),
        dataset.category_count(),
        args.out.display()
    );
    Ok(0)
}
