//! Build the emotion circle and map distributions to compound vectors.
//!
//! Run with `cargo run --example map_distribution`.

use emocircle::circle::{
    basic_vectors, map_distribution, soft_polarity, CircleConfig, EmotionDistribution,
};

fn main() {
    let circle = CircleConfig::mikel_wheel();

    println!("basic vectors ({} categories):", circle.category_count());
    for (name, v) in circle.category_names().iter().zip(basic_vectors(&circle)) {
        println!("  {name:<12} p={} theta={:.6} r={:.3}", v.polarity, v.angle, v.intensity);
    }

    let cases = [
        ("pure contentment", vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        ("contentment + excitement", vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        ("mostly fear, some sadness", vec![0.0, 0.0, 0.0, 0.1, 0.6, 0.3, 0.0, 0.0]),
        ("mixed polarity", vec![0.4, 0.0, 0.0, 0.0, 0.35, 0.0, 0.0, 0.25]),
        ("uniform (cancels out)", vec![0.125; 8]),
    ];
    println!("\nmapped distributions:");
    for (label, degrees) in cases {
        let d = EmotionDistribution::new(degrees).unwrap();
        let v = map_distribution(&d, &circle).unwrap();
        println!(
            "  {label:<28} p={} theta={:.4} r={:.4} degenerate={} negative-mass={:.2}",
            v.polarity,
            v.angle,
            v.intensity,
            v.degenerate,
            soft_polarity(&d, &circle),
        );
    }
}
