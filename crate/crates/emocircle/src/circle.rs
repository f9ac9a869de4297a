//! The emotion circle and the distribution-to-vector mapping.
//!
//! `C` emotion categories sit at evenly spaced angles `(2j - 1) * pi / C`
//! (1-based position `j`) on the unit circle, each as a unit *basic vector*.
//! The circle is split into a positive half `[0, pi/2) ∪ [3pi/2, 2pi)` and a
//! negative half `[pi/2, 3pi/2)`. An emotion distribution is mapped to a
//! single *compound vector* by weighting every basic vector with its
//! description degree and summing in Cartesian coordinates; the resultant's
//! polar form gives the emotion type (angle) and intensity (radius), and the
//! half containing the angle gives the polarity.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};

/// Resultants with a magnitude below this are treated as having no defined
/// angle (e.g. the uniform distribution, whose basic vectors cancel exactly).
pub const DEFAULT_DEGENERACY_THRESHOLD: f64 = 1e-9;

/// Tolerance for the "degrees sum to one" invariant at construction.
pub const SUM_TOLERANCE: f64 = 1e-9;

const NEGATIVE_HALF_START: f64 = FRAC_PI_2;
const NEGATIVE_HALF_END: f64 = 3.0 * FRAC_PI_2;

/// The eight Mikel categories in circular order, position 1 first.
/// This rotation of the wheel puts the four positive emotions in the
/// positive half and keeps the wheel's adjacency intact.
pub const MIKEL_WHEEL_NAMES: [&str; 8] = [
    "contentment",
    "excitement",
    "anger",
    "disgust",
    "fear",
    "sad",
    "amusement",
    "awe",
];

/// Emotion polarity: which half of the circle an angle falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// `p = 0`, angles in `[0, pi/2) ∪ [3pi/2, 2pi)`.
    Positive,
    /// `p = 1`, angles in `[pi/2, 3pi/2)`.
    Negative,
}

impl Polarity {
    /// Numeric value used by the losses: 0 for positive, 1 for negative.
    pub fn as_f64(self) -> f64 {
        match self {
            Polarity::Positive => 0.0,
            Polarity::Negative => 1.0,
        }
    }

    fn of_angle(angle: f64) -> Polarity {
        if (NEGATIVE_HALF_START..NEGATIVE_HALF_END).contains(&angle) {
            Polarity::Negative
        } else {
            Polarity::Positive
        }
    }
}

impl std::fmt::Display for Polarity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", *self as u8)
    }
}

/// Polarity of an angle per the half-open circle halves.
///
/// Boundaries follow the interval definitions exactly: `pi/2` is negative,
/// `3pi/2` is positive. Rejects angles outside `[0, 2pi)`.
pub fn polarity_of_angle(angle: f64) -> Result<Polarity> {
    if !angle.is_finite() || !(0.0..TAU).contains(&angle) {
        return Err(Error::AngleOutOfRange(angle));
    }
    Ok(Polarity::of_angle(angle))
}

/// Layout of the emotion circle: category names in circular order plus the
/// degeneracy threshold used when a resultant's angle is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleConfig {
    category_names: Vec<String>,
    degeneracy_threshold: f64,
}

impl CircleConfig {
    /// Builds a circle from category names given in circular order:
    /// the j-th name (0-based) sits at angle `(2j + 1) * pi / C`.
    pub fn new(category_names: Vec<String>, degeneracy_threshold: f64) -> Result<Self> {
        if category_names.is_empty() {
            return Err(Error::InvalidConfig("category list is empty".into()));
        }
        for (i, a) in category_names.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::InvalidConfig(format!("category {i} has an empty name")));
            }
            if category_names[..i].contains(a) {
                return Err(Error::InvalidConfig(format!("duplicate category name `{a}`")));
            }
        }
        if degeneracy_threshold <= 0.0 || !degeneracy_threshold.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "degeneracy_threshold must be a positive finite number, got {degeneracy_threshold}"
            )));
        }
        Ok(Self { category_names, degeneracy_threshold })
    }

    /// The default eight-category circle in Mikel order.
    pub fn mikel_wheel() -> Self {
        Self::new(
            MIKEL_WHEEL_NAMES.iter().map(|s| s.to_string()).collect(),
            DEFAULT_DEGENERACY_THRESHOLD,
        )
        .expect("default circle is valid")
    }

    pub fn category_count(&self) -> usize {
        self.category_names.len()
    }

    pub fn category_names(&self) -> &[String] {
        &self.category_names
    }

    pub fn degeneracy_threshold(&self) -> f64 {
        self.degeneracy_threshold
    }

    /// Angle of the category at 0-based index `j`: `(2j + 1) * pi / C`.
    pub fn angle_of(&self, j: usize) -> f64 {
        debug_assert!(j < self.category_count());
        (2.0 * j as f64 + 1.0) * PI / self.category_count() as f64
    }

    /// Polarity of the category at index `j` (by which half its angle is in).
    pub fn polarity_of(&self, j: usize) -> Polarity {
        Polarity::of_angle(self.angle_of(j))
    }

    pub fn is_negative(&self, j: usize) -> bool {
        self.polarity_of(j) == Polarity::Negative
    }
}

/// A vector of description degrees: nonnegative, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionDistribution {
    degrees: Vec<f64>,
}

impl EmotionDistribution {
    /// Validates the simplex invariants: every degree finite and
    /// nonnegative, degrees summing to one within [`SUM_TOLERANCE`].
    pub fn new(degrees: Vec<f64>) -> Result<Self> {
        for (j, &d) in degrees.iter().enumerate() {
            if !d.is_finite() {
                return Err(Error::InvalidDistribution(format!("degree {j} is not finite: {d}")));
            }
            if d < 0.0 {
                return Err(Error::InvalidDistribution(format!("degree {j} is negative: {d}")));
            }
        }
        let sum: f64 = degrees.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "degrees sum to {sum}, expected 1 within {SUM_TOLERANCE:e}"
            )));
        }
        Ok(Self { degrees })
    }

    /// Accepts any nonnegative vector with positive mass and rescales it to
    /// sum to one.
    pub fn normalized(mut degrees: Vec<f64>) -> Result<Self> {
        for (j, &d) in degrees.iter().enumerate() {
            if !d.is_finite() || d < 0.0 {
                return Err(Error::InvalidDistribution(format!("degree {j} is invalid: {d}")));
            }
        }
        let sum: f64 = degrees.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidDistribution("total mass is zero".into()));
        }
        for d in &mut degrees {
            *d /= sum;
        }
        Self::new(degrees)
    }

    pub fn one_hot(index: usize, len: usize) -> Result<Self> {
        if index >= len {
            return Err(Error::InvalidDistribution(format!(
                "one-hot index {index} out of range for {len} categories"
            )));
        }
        let mut degrees = vec![0.0; len];
        degrees[index] = 1.0;
        Ok(Self { degrees })
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidDistribution("zero categories".into()));
        }
        Ok(Self { degrees: vec![1.0 / len as f64; len] })
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// Index of the dominant category; ties broken by lowest index.
    pub fn dominant(&self) -> usize {
        let mut best = 0;
        for (j, &d) in self.degrees.iter().enumerate() {
            if d > self.degrees[best] {
                best = j;
            }
        }
        best
    }
}

/// Cartesian image of an emotional state on the circle plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianEmotion {
    pub x: f64,
    pub y: f64,
}

/// A compound emotion vector: polarity, type angle in `[0, 2pi)`, and
/// intensity in `[0, 1]`.
///
/// When the resultant magnitude falls below the degeneracy threshold the
/// angle is undefined; `degenerate` is set and `angle = 0`, `polarity`
/// positive by convention, `intensity` keeps the exact tiny magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmotionVector {
    pub polarity: Polarity,
    pub angle: f64,
    pub intensity: f64,
    pub degenerate: bool,
}

/// Partial derivatives of the distribution-to-vector mapping, one entry per
/// category, evaluated at a non-degenerate distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingJacobian {
    /// d(angle)/d(degree_j)
    pub dtheta_dd: Vec<f64>,
    /// d(intensity)/d(degree_j)
    pub dr_dd: Vec<f64>,
    /// d(soft polarity)/d(degree_j): the negative-half membership indicator.
    pub dsoft_polarity_dd: Vec<f64>,
}

/// The unit basic vectors, one per category, in circular order.
pub fn basic_vectors(config: &CircleConfig) -> Vec<EmotionVector> {
    (0..config.category_count())
        .map(|j| {
            let angle = config.angle_of(j);
            EmotionVector {
                polarity: Polarity::of_angle(angle),
                angle,
                intensity: 1.0,
                degenerate: false,
            }
        })
        .collect()
}

/// Polar-to-Cartesian conversion: `(r cos theta, r sin theta)`.
pub fn to_cartesian(angle: f64, intensity: f64) -> CartesianEmotion {
    CartesianEmotion { x: intensity * angle.cos(), y: intensity * angle.sin() }
}

/// Cartesian-to-polar conversion with a quadrant-aware angle in `[0, 2pi)`.
///
/// Returns `(theta, r)`. Below `degeneracy_threshold` the angle is
/// undefined and reported as 0.
pub fn to_polar(c: &CartesianEmotion, degeneracy_threshold: f64) -> (f64, f64) {
    let r = c.x.hypot(c.y);
    if r < degeneracy_threshold {
        return (0.0, r);
    }
    let mut theta = c.y.atan2(c.x);
    if theta < 0.0 {
        theta += TAU;
    }
    // Adding 2*pi to a tiny negative atan2 result can round to exactly 2*pi.
    if theta >= TAU {
        theta = 0.0;
    }
    (theta, r)
}

/// Cartesian image of a distribution: degree-weighted basic vectors summed
/// componentwise. Linear in the degrees.
pub fn map_to_cartesian(d: &EmotionDistribution, config: &CircleConfig) -> Result<CartesianEmotion> {
    if d.len() != config.category_count() {
        return Err(Error::ShapeMismatch(format!(
            "distribution has {} degrees, circle has {} categories",
            d.len(),
            config.category_count()
        )));
    }
    let mut x = 0.0;
    let mut y = 0.0;
    for (j, &w) in d.degrees().iter().enumerate() {
        let angle = config.angle_of(j);
        x += w * angle.cos();
        y += w * angle.sin();
    }
    Ok(CartesianEmotion { x, y })
}

/// Maps an emotion distribution to its compound emotion vector.
pub fn map_distribution(d: &EmotionDistribution, config: &CircleConfig) -> Result<EmotionVector> {
    let cartesian = map_to_cartesian(d, config)?;
    let (angle, r) = to_polar(&cartesian, config.degeneracy_threshold());
    if r < config.degeneracy_threshold() {
        return Ok(EmotionVector {
            polarity: Polarity::Positive,
            angle: 0.0,
            intensity: r,
            degenerate: true,
        });
    }
    // A convex combination of unit vectors has magnitude at most 1; clip the
    // few-ulp overshoot from rounding so the invariant holds exactly.
    let intensity = r.min(1.0);
    Ok(EmotionVector { polarity: Polarity::of_angle(angle), angle, intensity, degenerate: false })
}

/// Differentiable polarity surrogate: the description mass on the
/// negative-half categories.
pub fn soft_polarity(d: &EmotionDistribution, config: &CircleConfig) -> f64 {
    assert_eq!(
        d.len(),
        config.category_count(),
        "distribution length must match the circle's category count"
    );
    d.degrees()
        .iter()
        .enumerate()
        .filter(|&(j, _)| config.is_negative(j))
        .map(|(_, &w)| w)
        .sum()
}

/// Partial derivatives of angle, intensity, and soft polarity with respect
/// to each description degree.
///
/// Signals [`Error::Degenerate`] when the resultant magnitude is below the
/// threshold, where the angle derivative is unbounded.
pub fn mapping_jacobian(d: &EmotionDistribution, config: &CircleConfig) -> Result<MappingJacobian> {
    let CartesianEmotion { x, y } = map_to_cartesian(d, config)?;
    let r_squared = x * x + y * y;
    let r = r_squared.sqrt();
    let threshold = config.degeneracy_threshold();
    if r < threshold {
        return Err(Error::Degenerate { intensity: r, threshold });
    }
    let c = config.category_count();
    let mut dtheta_dd = Vec::with_capacity(c);
    let mut dr_dd = Vec::with_capacity(c);
    let mut dsoft_polarity_dd = Vec::with_capacity(c);
    for j in 0..c {
        let angle = config.angle_of(j);
        let (sin_j, cos_j) = angle.sin_cos();
        // theta = atan2(y, x): dtheta/dx = -y/r^2, dtheta/dy = x/r^2,
        // with dx/dd_j = cos(angle_j) and dy/dd_j = sin(angle_j).
        dtheta_dd.push((x * sin_j - y * cos_j) / r_squared);
        dr_dd.push((x * cos_j + y * sin_j) / r);
        dsoft_polarity_dd.push(if config.is_negative(j) { 1.0 } else { 0.0 });
    }
    Ok(MappingJacobian { dtheta_dd, dr_dd, dsoft_polarity_dd })
}
