//! Helpers shared by the integration suites: invoking the CLI binary and
//! independent oracles kept separate from the library code they check.
#![allow(dead_code)] // each test binary uses a different subset

use std::path::Path;
use std::process::{Command, Output};

use emocircle::circle::{CartesianEmotion, CircleConfig};
use num_complex::Complex64;

pub const TAU: f64 = std::f64::consts::TAU;

/// Runs the `emocircle` binary with the given arguments.
pub fn run_cli<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_emocircle"))
        .args(args)
        .env_remove("EMOCIRCLE_THREADS")
        .output()
        .expect("binary runs")
}

pub fn run_cli_with_env<I, S>(args: I, key: &str, value: &str) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_emocircle"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

pub fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

pub fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process exited")
}

pub fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

/// Brute-force mapping oracle: sum the complex numbers `d_j * e^(i angle_j)`
/// and take modulus/argument.
pub fn complex_oracle(degrees: &[f64], config: &CircleConfig) -> (CartesianEmotion, f64, f64) {
    let z: Complex64 = degrees
        .iter()
        .enumerate()
        .map(|(j, &w)| w * Complex64::new(0.0, config.angle_of(j)).exp())
        .sum();
    let r = z.norm();
    let mut theta = z.arg();
    if theta < 0.0 {
        theta += TAU;
    }
    if theta >= TAU {
        theta = 0.0;
    }
    (CartesianEmotion { x: z.re, y: z.im }, theta, r)
}

pub fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(TAU - d)
}
