//! Verify the analytic gradients of the combined objective against central
//! finite differences.
//!
//! Run with `cargo run --example gradient_check`.

use emocircle::cli::gradcheck::{run, GradCheckOptions};

fn main() {
    let options = GradCheckOptions { points: 40, seed: 7, ..GradCheckOptions::default() };
    println!(
        "checking {} random configurations, mu cycle {:?}, step {:e}",
        options.points, options.mus, options.step
    );
    let report = run(&options).unwrap();
    println!("parameters checked: {}", report.parameters_checked);
    println!("max relative error: {:e}", report.max_relative_error);
    if let Some(worst) = &report.worst {
        println!(
            "worst coordinate:   point {} (mu={}) {} analytic={:e} numeric={:e}",
            worst.point, worst.mu, worst.parameter, worst.analytic, worst.numeric
        );
    }
    println!("verdict: {}", if report.passed() { "PASS" } else { "FAIL" });
}
