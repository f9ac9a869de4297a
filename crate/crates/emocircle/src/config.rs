//! The shared plain-text configuration format: one `key = value` per line,
//! `#` comments, unknown keys rejected. Every key is optional and falls
//! back to its default, so a file may configure just the circle, just the
//! loss, or a whole training run.
//!
//! ```text
//! # circle
//! category_count = 8
//! category_names = contentment,excitement,anger,disgust,fear,sad,amusement,awe
//! degeneracy_threshold = 0.000000001
//! # loss
//! mu = 0.7
//! polarity_mode = soft
//! angle_difference = raw
//! term = pc
//! # training
//! learning_rate = 0.00001
//! weight_decay = 0.00005
//! lr_decay_every = 10
//! epochs = 50
//! batch_size = 32
//! seed = 0
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::circle::{CircleConfig, MIKEL_WHEEL_NAMES};
use crate::error::{Error, Result};
use crate::losses::{AngleDifference, CircularTerm, LossConfig, PolarityMode};
use crate::model::TrainConfig;

/// A fully resolved run configuration: circle layout plus training
/// hyperparameters (the loss settings live inside [`TrainConfig`]).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub circle: CircleConfig,
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { circle: CircleConfig::mikel_wheel(), train: TrainConfig::default() }
    }
}

const KEYS: [&str; 13] = [
    "category_count",
    "category_names",
    "degeneracy_threshold",
    "mu",
    "polarity_mode",
    "angle_difference",
    "term",
    "learning_rate",
    "weight_decay",
    "lr_decay_every",
    "epochs",
    "batch_size",
    "seed",
];

fn parse_key_values(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("expected `key = value`, found `{line}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Parse { line: line_no, msg: format!("unknown key `{key}`") });
        }
        if map.insert(key.to_string(), (line_no, value.to_string())).is_some() {
            return Err(Error::Parse { line: line_no, msg: format!("duplicate key `{key}`") });
        }
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid value `{value}` for {key}"),
    })
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let map = parse_key_values(text)?;
        let get = |key: &str| map.get(key).map(|(line, value)| (*line, value.as_str()));

        let names: Option<Vec<String>> = get("category_names")
            .map(|(_, v)| v.split(',').map(|s| s.trim().to_string()).collect());
        let count: Option<usize> = match get("category_count") {
            Some((line, v)) => Some(parse_value(line, "category_count", v)?),
            None => None,
        };
        let category_names = match (names, count) {
            (Some(names), Some(count)) => {
                if names.len() != count {
                    return Err(Error::InvalidConfig(format!(
                        "category_count is {count} but {} names were listed",
                        names.len()
                    )));
                }
                names
            }
            (Some(names), None) => names,
            (None, Some(8)) | (None, None) => {
                MIKEL_WHEEL_NAMES.iter().map(|s| s.to_string()).collect()
            }
            (None, Some(count)) => (1..=count).map(|j| format!("cat{j}")).collect(),
        };
        let threshold = match get("degeneracy_threshold") {
            Some((line, v)) => parse_value(line, "degeneracy_threshold", v)?,
            None => crate::circle::DEFAULT_DEGENERACY_THRESHOLD,
        };
        let circle = CircleConfig::new(category_names, threshold)?;

        let mut loss = LossConfig { degeneracy_threshold: threshold, ..LossConfig::default() };
        if let Some((line, v)) = get("mu") {
            loss.mu = parse_value(line, "mu", v)?;
        }
        if let Some((line, v)) = get("polarity_mode") {
            loss.polarity_mode = match v {
                "soft" => PolarityMode::Soft,
                "hard_subgradient" => PolarityMode::HardSubgradient,
                other => {
                    return Err(Error::Parse {
                        line,
                        msg: format!(
                            "polarity_mode must be `soft` or `hard_subgradient`, found `{other}`"
                        ),
                    })
                }
            };
        }
        if let Some((line, v)) = get("angle_difference") {
            loss.angle_difference = match v {
                "raw" => AngleDifference::Raw,
                "wrapped" => AngleDifference::Wrapped,
                other => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("angle_difference must be `raw` or `wrapped`, found `{other}`"),
                    })
                }
            };
        }
        if let Some((line, v)) = get("term") {
            loss.term = match v {
                "polar" => CircularTerm::Polar,
                "type" => CircularTerm::Type,
                "polar_type" => CircularTerm::PolarType,
                "pc" => CircularTerm::Pc,
                other => {
                    return Err(Error::Parse {
                        line,
                        msg: format!(
                            "term must be one of polar, type, polar_type, pc; found `{other}`"
                        ),
                    })
                }
            };
        }
        loss.validate()?;

        let mut train = TrainConfig { loss, ..TrainConfig::default() };
        if let Some((line, v)) = get("learning_rate") {
            train.learning_rate = parse_value(line, "learning_rate", v)?;
        }
        if let Some((line, v)) = get("weight_decay") {
            train.weight_decay = parse_value(line, "weight_decay", v)?;
        }
        if let Some((line, v)) = get("lr_decay_every") {
            train.lr_decay_every = parse_value(line, "lr_decay_every", v)?;
        }
        if let Some((line, v)) = get("epochs") {
            train.epochs = parse_value(line, "epochs", v)?;
        }
        if let Some((line, v)) = get("batch_size") {
            train.batch_size = parse_value(line, "batch_size", v)?;
        }
        if let Some((line, v)) = get("seed") {
            train.seed = parse_value(line, "seed", v)?;
        }
        train.validate()?;

        Ok(Self { circle, train })
    }

    /// Serializes every key in a fixed order; the output parses back to an
    /// equal configuration.
    pub fn to_text(&self) -> String {
        let loss = &self.train.loss;
        let mut out = String::new();
        let _ = writeln!(out, "category_count = {}", self.circle.category_count());
        let _ = writeln!(out, "category_names = {}", self.circle.category_names().join(","));
        let _ = writeln!(out, "degeneracy_threshold = {}", self.circle.degeneracy_threshold());
        let _ = writeln!(out, "mu = {}", loss.mu);
        let _ = writeln!(
            out,
            "polarity_mode = {}",
            match loss.polarity_mode {
                PolarityMode::Soft => "soft",
                PolarityMode::HardSubgradient => "hard_subgradient",
            }
        );
        let _ = writeln!(
            out,
            "angle_difference = {}",
            match loss.angle_difference {
                AngleDifference::Raw => "raw",
                AngleDifference::Wrapped => "wrapped",
            }
        );
        let _ = writeln!(
            out,
            "term = {}",
            match loss.term {
                CircularTerm::Polar => "polar",
                CircularTerm::Type => "type",
                CircularTerm::PolarType => "polar_type",
                CircularTerm::Pc => "pc",
            }
        );
        let _ = writeln!(out, "learning_rate = {}", self.train.learning_rate);
        let _ = writeln!(out, "weight_decay = {}", self.train.weight_decay);
        let _ = writeln!(out, "lr_decay_every = {}", self.train.lr_decay_every);
        let _ = writeln!(out, "epochs = {}", self.train.epochs);
        let _ = writeln!(out, "batch_size = {}", self.train.batch_size);
        let _ = writeln!(out, "seed = {}", self.train.seed);
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

impl CircleConfig {
    /// Loads the circle part of a `key = value` configuration file.
    pub fn from_file(path: &Path) -> Result<Self> {
        Ok(RunConfig::from_file(path)?.circle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let config = RunConfig::default();
        let parsed = RunConfig::parse(&config.to_text()).unwrap();
        assert_eq!(parsed, config);
        assert_eq!(parsed.to_text(), config.to_text());
    }

    #[test]
    fn empty_text_gives_defaults() {
        let parsed = RunConfig::parse("").unwrap();
        assert_eq!(parsed, RunConfig::default());
    }

    #[test]
    fn parses_circle_keys() {
        let text = "category_count = 4\ncategory_names = a,b,c,d\ndegeneracy_threshold = 0.001\n";
        let parsed = RunConfig::parse(text).unwrap();
        assert_eq!(parsed.circle.category_count(), 4);
        assert_eq!(parsed.circle.degeneracy_threshold(), 1e-3);
        assert_eq!(parsed.train.loss.degeneracy_threshold, 1e-3);

        // Count without names synthesizes labels.
        let parsed = RunConfig::parse("category_count = 6\n").unwrap();
        assert_eq!(parsed.circle.category_names()[5], "cat6");
    }

    #[test]
    fn parses_loss_and_train_keys() {
        let text = "mu = 0.3\npolarity_mode = hard_subgradient\nangle_difference = wrapped\n\
                    term = polar_type\nlearning_rate = 0.01\nepochs = 7\nbatch_size = 16\nseed = 5\n";
        let parsed = RunConfig::parse(text).unwrap();
        assert_eq!(parsed.train.loss.mu, 0.3);
        assert_eq!(parsed.train.loss.polarity_mode, PolarityMode::HardSubgradient);
        assert_eq!(parsed.train.loss.angle_difference, AngleDifference::Wrapped);
        assert_eq!(parsed.train.loss.term, CircularTerm::PolarType);
        assert_eq!(parsed.train.learning_rate, 0.01);
        assert_eq!(parsed.train.epochs, 7);
        assert_eq!(parsed.train.batch_size, 16);
        assert_eq!(parsed.train.seed, 5);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# a comment\n\nmu = 0.5  # trailing\n";
        assert_eq!(RunConfig::parse(text).unwrap().train.loss.mu, 0.5);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(
            RunConfig::parse("mysterious = 1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(RunConfig::parse("mu\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            RunConfig::parse("mu = 0.5\nmu = 0.6\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            RunConfig::parse("mu = plenty\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(RunConfig::parse("mu = 1.5\n").is_err());
        assert!(RunConfig::parse("category_count = 3\ncategory_names = a,b\n").is_err());
        assert!(RunConfig::parse("polarity_mode = mellow\n").is_err());
    }
}
