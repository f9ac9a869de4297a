//! Dataset ingestion, the 80/20 split protocol, and a synthetic generator.
//!
//! Datasets live in a plain CSV format with the header
//! `id,f1,...,fF,d1,...,dC`: one sample per line, UTF-8, `.` decimal
//! separator, ids restricted to `[A-Za-z0-9_-]` so no quoting is needed.
//! Writing uses the shortest round-trip float formatting, so
//! save -> load -> save reproduces files byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, Normal};

use crate::circle::{CircleConfig, EmotionDistribution};
use crate::error::{Error, Result};

/// A row-sum may deviate from 1 by up to this before the row is rejected;
/// deviations within it are renormalized (vote ratios arrive rounded).
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

/// One labeled sample: an id, a feature vector, and a distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub id: String,
    pub features: Vec<f64>,
    pub distribution: EmotionDistribution,
}

/// An immutable collection of samples with consistent dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    category_names: Vec<String>,
    feature_dim: usize,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>, category_names: Vec<String>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("dataset has no samples".into()));
        }
        let feature_dim = samples[0].features.len();
        let category_count = category_names.len();
        let mut seen = std::collections::HashSet::new();
        for (i, s) in samples.iter().enumerate() {
            if s.features.len() != feature_dim {
                return Err(Error::ShapeMismatch(format!(
                    "sample {i} has {} features, expected {feature_dim}",
                    s.features.len()
                )));
            }
            if s.distribution.len() != category_count {
                return Err(Error::ShapeMismatch(format!(
                    "sample {i} has {} degrees, expected {category_count}",
                    s.distribution.len()
                )));
            }
            if !seen.insert(s.id.as_str()) {
                return Err(Error::InvalidConfig(format!("duplicate sample id `{}`", s.id)));
            }
        }
        Ok(Self { samples, category_names, feature_dim })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn category_names(&self) -> &[String] {
        &self.category_names
    }

    pub fn category_count(&self) -> usize {
        self.category_names.len()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn features(&self) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.features.clone()).collect()
    }

    pub fn distributions(&self) -> Vec<EmotionDistribution> {
        self.samples.iter().map(|s| s.distribution.clone()).collect()
    }
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Loads a dataset from CSV, validating the header against the circle's
/// category names and count. Row sums within [`ROW_SUM_TOLERANCE`] of 1 are
/// renormalized; anything further off is rejected with its line number.
pub fn load_csv(path: &Path, config: &CircleConfig) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    load_csv_str(&text, config)
}

pub fn load_csv_str(text: &str, config: &CircleConfig) -> Result<Dataset> {
    let c = config.category_count();
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "file is empty".into() })?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 2 + c || columns[0] != "id" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header id,f1,...,fF,d1,...,d{c}"),
        });
    }
    let feature_dim = columns.len() - 1 - c;
    for (k, col) in columns[1..=feature_dim].iter().enumerate() {
        if *col != format!("f{}", k + 1) {
            return Err(Error::Parse {
                line: 1,
                msg: format!("feature column {} is named `{col}`, expected `f{}`", k + 1, k + 1),
            });
        }
    }
    for (k, col) in columns[1 + feature_dim..].iter().enumerate() {
        if *col != format!("d{}", k + 1) {
            return Err(Error::Parse {
                line: 1,
                msg: format!("degree column {} is named `{col}`, expected `d{}`", k + 1, k + 1),
            });
        }
    }

    let mut samples = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {} columns, found {}", columns.len(), fields.len()),
            });
        }
        let id = fields[0];
        if !valid_id(id) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("invalid id `{id}` (allowed: [A-Za-z0-9_-])"),
            });
        }
        let parse = |s: &str, what: &str| -> Result<f64> {
            let v: f64 = s.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("{what} `{s}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("{what} `{s}` is not finite"),
                });
            }
            Ok(v)
        };
        let features = fields[1..=feature_dim]
            .iter()
            .map(|s| parse(s, "feature"))
            .collect::<Result<Vec<f64>>>()?;
        let degrees = fields[1 + feature_dim..]
            .iter()
            .map(|s| parse(s, "degree"))
            .collect::<Result<Vec<f64>>>()?;
        for &d in &degrees {
            if d < 0.0 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("negative description degree {d}"),
                });
            }
        }
        let sum: f64 = degrees.iter().sum();
        // The extra ulp-scale slack keeps literals like 0.999999, whose
        // parsed deviation is a shade over 1e-6, inside the tolerance.
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE + 1e-12 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("degrees sum to {sum}, outside 1 ± {ROW_SUM_TOLERANCE:e}"),
            });
        }
        // Renormalize only rows that need it, so loading is idempotent and
        // save -> load round trips reproduce degrees bit for bit.
        let distribution = EmotionDistribution::new(degrees.clone())
            .or_else(|_| EmotionDistribution::normalized(degrees))
            .map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
        samples.push(Sample { id: id.to_string(), features, distribution });
    }
    Dataset::new(samples, config.category_names().to_vec())
}

/// Serializes a dataset in the CSV format, bit-exact under round trips.
pub fn to_csv_string(dataset: &Dataset) -> String {
    let mut out = String::from("id");
    for k in 1..=dataset.feature_dim() {
        let _ = write!(out, ",f{k}");
    }
    for k in 1..=dataset.category_count() {
        let _ = write!(out, ",d{k}");
    }
    out.push('\n');
    for s in dataset.samples() {
        out.push_str(&s.id);
        for v in &s.features {
            let _ = write!(out, ",{v}");
        }
        for v in s.distribution.degrees() {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn save_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv_string(dataset))?;
    Ok(())
}

/// Seeded uniform shuffle split: the first `ceil(fraction * N)` samples go
/// to the training set, the rest to the test set.
pub fn split(dataset: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(0.0..=1.0).contains(&train_fraction) {
        return Err(Error::InvalidConfig(format!(
            "train fraction must be in [0, 1], got {train_fraction}"
        )));
    }
    let n = dataset.len();
    if n < 2 {
        return Err(Error::EmptyInput("split needs at least two samples".into()));
    }
    let train_count = (train_fraction * n as f64).ceil() as usize;
    if train_count == 0 || train_count >= n {
        return Err(Error::InvalidConfig(format!(
            "degenerate split: {train_count} train / {} test from {n} samples",
            n - train_count
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let pick = |indices: &[usize]| -> Result<Dataset> {
        Dataset::new(
            indices.iter().map(|&i| dataset.samples()[i].clone()).collect(),
            dataset.category_names().to_vec(),
        )
    };
    Ok((pick(&order[..train_count])?, pick(&order[train_count..])?))
}

/// Parameters of the synthetic generator.
#[derive(Debug, Clone)]
pub struct SynthParams {
    pub n: usize,
    pub feature_dim: usize,
    pub category_count: usize,
    /// Dirichlet concentration over the supported categories.
    pub concentration: f64,
    /// Standard deviation of the Gaussian feature noise.
    pub noise: f64,
    pub seed: u64,
    /// Widest contiguous support a label may have (1..=3 by default).
    pub max_support: usize,
    /// When false, support positions are scattered uniformly instead of
    /// contiguous; adjacent basic vectors reinforce while scattered ones
    /// cancel, so this knob controls the mean mapped intensity.
    pub contiguous_support: bool,
}

impl SynthParams {
    pub fn new(n: usize, feature_dim: usize, concentration: f64, noise: f64, seed: u64) -> Self {
        Self {
            n,
            feature_dim,
            category_count: 8,
            concentration,
            noise,
            seed,
            max_support: 3,
            contiguous_support: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("sample count must be at least 1".into()));
        }
        if self.feature_dim == 0 || self.category_count < 2 {
            return Err(Error::InvalidConfig("need features and at least two categories".into()));
        }
        if self.concentration <= 0.0 || !self.concentration.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "concentration must be positive, got {}",
                self.concentration
            )));
        }
        if self.noise < 0.0 || !self.noise.is_finite() {
            return Err(Error::InvalidConfig(format!("noise must be >= 0, got {}", self.noise)));
        }
        if self.max_support == 0 || self.max_support > self.category_count {
            return Err(Error::InvalidConfig("support width out of range".into()));
        }
        Ok(())
    }
}

/// Dirichlet draw over the given support indices, zeros elsewhere.
fn dirichlet_on_support(
    support: &[usize],
    len: usize,
    concentration: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let mut degrees = vec![0.0; len];
    if support.len() == 1 {
        degrees[support[0]] = 1.0;
        return degrees;
    }
    let gamma = Gamma::new(concentration, 1.0).expect("validated concentration");
    let mut sum = 0.0;
    for &j in support {
        let v: f64 = gamma.sample(rng);
        degrees[j] = v;
        sum += v;
    }
    if sum <= f64::MIN_POSITIVE {
        // Vanishingly unlikely except at extreme concentrations; collapse
        // to the first supported category.
        degrees.iter_mut().for_each(|d| *d = 0.0);
        degrees[support[0]] = 1.0;
        return degrees;
    }
    for d in &mut degrees {
        *d /= sum;
    }
    degrees
}

/// Generates a synthetic dataset whose labels concentrate on a few circle
/// positions (contiguous by default) and whose features are a fixed random
/// linear image of the label distribution plus Gaussian noise, so a linear
/// model can recover the labels.
pub fn synth_generate_with(params: &SynthParams) -> Result<Dataset> {
    params.validate()?;
    let c = params.category_count;
    let f = params.feature_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    // Teacher matrix (F x C), fixed per seed.
    let teacher: Vec<Vec<f64>> =
        (0..f).map(|_| (0..c).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");

    let width = params.max_support.min(c);
    let mut samples = Vec::with_capacity(params.n);
    for i in 0..params.n {
        let support_len = rng.random_range(1..=width);
        let support: Vec<usize> = if params.contiguous_support {
            let start = rng.random_range(0..c);
            (0..support_len).map(|k| (start + k) % c).collect()
        } else {
            let mut all: Vec<usize> = (0..c).collect();
            all.shuffle(&mut rng);
            all.truncate(support_len);
            all
        };
        let degrees = dirichlet_on_support(&support, c, params.concentration, &mut rng);
        let distribution = EmotionDistribution::normalized(degrees)?;
        let features: Vec<f64> = teacher
            .iter()
            .map(|row| {
                let clean: f64 =
                    row.iter().zip(distribution.degrees()).map(|(&t, &d)| t * d).sum();
                clean + params.noise * normal.sample(&mut rng)
            })
            .collect();
        samples.push(Sample { id: format!("synth{i:05}"), features, distribution });
    }

    let names = if c == 8 {
        crate::circle::MIKEL_WHEEL_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        (1..=c).map(|j| format!("cat{j}")).collect()
    };
    Dataset::new(samples, names)
}

/// [`synth_generate_with`] with the default 8-category circle and
/// contiguous supports of width 1 to 3.
pub fn synth_generate(
    n: usize,
    feature_dim: usize,
    concentration: f64,
    noise: f64,
    seed: u64,
) -> Result<Dataset> {
    synth_generate_with(&SynthParams::new(n, feature_dim, concentration, noise, seed))
}
