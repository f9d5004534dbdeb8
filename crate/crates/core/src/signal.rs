//! Deterministic mean components and the jump functionals of the step part.
//!
//! The regression mean is `μ_i = f(x_i) + g(x_i)` on the grid `x_i = i/n`,
//! `i = 1..n`, where `f` is a smooth component and `g` a piecewise-constant
//! step signal with levels `a_0..a_{K-1}` and breakpoint fractions
//! `0 = τ_0 < τ_1 < ... < τ_K = 1`.
//!
//! Conventions
//! -----------
//! - Breakpoints map to grid positions `t_j = ⌊n τ_j⌋`; sample index `i`
//!   belongs to segment `j` when `t_j <= i < t_{j+1}`. The last segment is
//!   closed on the right so that `i = n` is always covered.
//! - A signal with a single level (no change points) is valid; every jump
//!   functional is then zero.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute slack used when flooring `n τ` so that fractions such as
/// `3/6 + 2/36` land on the intended integer despite rounding.
const GRID_SLACK: f64 = 1e-9;

/// Grid position `⌊n τ⌋` of a breakpoint fraction.
pub fn grid_position(n: usize, tau: f64) -> usize {
    (n as f64 * tau + GRID_SLACK).floor().max(0.0) as usize
}

/// Piecewise-constant component `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStepSignal", into = "RawStepSignal")]
pub struct StepSignal {
    levels: Vec<f64>,
    breakpoints: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawStepSignal {
    levels: Vec<f64>,
    breakpoints: Vec<f64>,
}

impl TryFrom<RawStepSignal> for StepSignal {
    type Error = Error;

    fn try_from(raw: RawStepSignal) -> Result<Self> {
        StepSignal::new(raw.levels, raw.breakpoints)
    }
}

impl From<StepSignal> for RawStepSignal {
    fn from(s: StepSignal) -> Self {
        RawStepSignal {
            levels: s.levels,
            breakpoints: s.breakpoints,
        }
    }
}

impl StepSignal {
    pub fn new(levels: Vec<f64>, breakpoints: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidSignal("at least one level is required".into()));
        }
        if breakpoints.len() != levels.len() + 1 {
            return Err(Error::InvalidSignal(format!(
                "expected {} breakpoints for {} levels, got {}",
                levels.len() + 1,
                levels.len(),
                breakpoints.len()
            )));
        }
        if levels.iter().chain(&breakpoints).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal("levels and breakpoints must be finite".into()));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::InvalidSignal("breakpoints must start at 0 and end at 1".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSignal("breakpoints must be strictly increasing".into()));
        }
        if let Some(j) = levels.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::InvalidSignal(format!(
                "adjacent levels {} and {} are equal",
                j,
                j + 1
            )));
        }
        Ok(StepSignal { levels, breakpoints })
    }

    /// The single-segment signal `g ≡ level`.
    pub fn constant(level: f64) -> Self {
        StepSignal {
            levels: vec![level],
            breakpoints: vec![0.0, 1.0],
        }
    }

    /// Six change points at `1/6 ± 1/36`, `3/6 ± 2/36`, `5/6 ± 3/36` with
    /// levels `0, 10, 0, 1, 0, 1, 0`.
    pub fn six_jump() -> Self {
        let centres = [
            (1.0 / 6.0, 1.0 / 36.0),
            (3.0 / 6.0, 2.0 / 36.0),
            (5.0 / 6.0, 3.0 / 36.0),
        ];
        let mut breakpoints = vec![0.0];
        for (c, w) in centres {
            breakpoints.push(c - w);
            breakpoints.push(c + w);
        }
        breakpoints.push(1.0);
        StepSignal::new(vec![0.0, 10.0, 0.0, 1.0, 0.0, 1.0, 0.0], breakpoints).expect("six-jump signal is valid")
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Number of segments `K`.
    pub fn segments(&self) -> usize {
        self.levels.len()
    }

    pub fn jump_count(&self) -> usize {
        self.levels.len() - 1
    }

    /// Interior change-point grid positions `t_1..t_{K-1}`.
    pub fn change_positions(&self, n: usize) -> Vec<usize> {
        self.breakpoints[1..self.breakpoints.len() - 1]
            .iter()
            .map(|&tau| grid_position(n, tau))
            .collect()
    }

    pub fn max_jump(&self) -> f64 {
        jumps(&self.levels).map(f64::abs).fold(0.0, f64::max)
    }

    /// Level of `g` at sample index `i` (1-based) on a grid of size `n`.
    pub fn level_at(&self, i: usize, n: usize) -> f64 {
        let positions = self.change_positions(n);
        let segment = positions.partition_point(|&t| t <= i);
        self.levels[segment]
    }

    /// `g(i/n)` for `i = 1..n`.
    pub fn evaluate(&self, n: usize) -> Vec<f64> {
        let positions = self.change_positions(n);
        let mut out = Vec::with_capacity(n);
        let mut segment = 0;
        for i in 1..=n {
            while segment < positions.len() && positions[segment] <= i {
                segment += 1;
            }
            out.push(self.levels[segment]);
        }
        out
    }
}

fn jumps(levels: &[f64]) -> impl Iterator<Item = f64> + '_ {
    levels.windows(2).map(|w| w[1] - w[0])
}

/// Smooth component `f`. Built-ins integrate to zero over `[0, 1]`.
///
/// Custom functions are accepted as-is; the zero-integral identifiability
/// condition is the caller's responsibility and is not checked.
#[derive(Clone, Default)]
pub enum SmoothComponent {
    #[default]
    Zero,
    /// `f₁(x) = 1 − 2x`
    Linear,
    /// `f₂(x) = 4(x − 0.5)² − 1/3`
    Quadratic,
    /// `f₃(x) = sin(16πx)`
    Periodic,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl SmoothComponent {
    pub const NAMES: [&'static str; 4] = ["zero", "f1", "f2", "f3"];

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "zero" | "none" => Ok(SmoothComponent::Zero),
            "f1" | "linear" => Ok(SmoothComponent::Linear),
            "f2" | "quadratic" => Ok(SmoothComponent::Quadratic),
            "f3" | "periodic" => Ok(SmoothComponent::Periodic),
            other => Err(Error::Config(format!(
                "unknown smooth component {other:?}; valid options: {}",
                Self::NAMES.join(", ")
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SmoothComponent::Zero => "zero",
            SmoothComponent::Linear => "f1",
            SmoothComponent::Quadratic => "f2",
            SmoothComponent::Periodic => "f3",
            SmoothComponent::Custom(_) => "custom",
        }
    }

    /// Value on `[0, 1]`; built-ins are zero outside that interval.
    pub fn eval(&self, x: f64) -> f64 {
        if !matches!(self, SmoothComponent::Custom(_)) && !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        match self {
            SmoothComponent::Zero => 0.0,
            SmoothComponent::Linear => 1.0 - 2.0 * x,
            SmoothComponent::Quadratic => 4.0 * (x - 0.5).powi(2) - 1.0 / 3.0,
            SmoothComponent::Periodic => (16.0 * PI * x).sin(),
            SmoothComponent::Custom(f) => f(x),
        }
    }
}

impl fmt::Debug for SmoothComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl PartialEq for SmoothComponent {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (SmoothComponent::Custom(a), SmoothComponent::Custom(b)) => Arc::ptr_eq(a, b),
            _ => self.name() == other.name(),
        }
    }
}

impl Serialize for SmoothComponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for SmoothComponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        SmoothComponent::from_name(&name).map_err(serde::de::Error::custom)
    }
}

/// Full mean specification `f + g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanSpec {
    pub step: StepSignal,
    #[serde(default)]
    pub smooth: SmoothComponent,
}

impl MeanSpec {
    pub fn evaluate(&self, n: usize) -> Result<Vec<f64>> {
        evaluate_mean(&self.step, &self.smooth, n)
    }
}

/// Returns `μ_i = f(i/n) + g(i/n)` for `i = 1..n`.
pub fn evaluate_mean(step: &StepSignal, smooth: &SmoothComponent, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::SeriesTooShort { required: 2, actual: n });
    }
    let mut mean = step.evaluate(n);
    for (i, v) in mean.iter_mut().enumerate() {
        *v += smooth.eval((i + 1) as f64 / n as f64);
    }
    Ok(mean)
}

/// `J_K`: sum of squared jump sizes.
pub fn quadratic_variation(step: &StepSignal) -> f64 {
    jumps(&step.levels).map(|d| d * d).sum()
}

/// `J_K^||`: sum of absolute jump sizes.
pub fn total_variation(step: &StepSignal) -> f64 {
    jumps(&step.levels).map(f64::abs).sum()
}

/// `H_{K,h}^|| = Σ_j (t_j − h/2) |a_{j−1} − a_j|` over the interior change
/// points, with `t_j = ⌊n τ_j⌋`.
pub fn weighted_jump_functional(step: &StepSignal, n: usize, h: usize) -> f64 {
    step.change_positions(n)
        .into_iter()
        .zip(jumps(&step.levels))
        .map(|(t, d)| (t as f64 - h as f64 / 2.0) * d.abs())
        .sum()
}

/// `κ_{j,l} = t_{j+1} − t_j − l(m+1)` for each segment `j = 0..K-1`.
pub fn segment_slack(step: &StepSignal, n: usize, l: usize, m: usize) -> Vec<i64> {
    let positions: Vec<i64> = step
        .breakpoints
        .iter()
        .map(|&tau| grid_position(n, tau) as i64)
        .collect();
    positions
        .windows(2)
        .map(|w| w[1] - w[0] - (l * (m + 1)) as i64)
        .collect()
}

/// Whether every segment is longer than `l(m+1)/n`. Single-segment signals
/// always pass.
pub fn check_jump_separation(step: &StepSignal, n: usize, l: usize, m: usize) -> bool {
    if step.segments() == 1 {
        return true;
    }
    let threshold = (l * (m + 1)) as f64 / n as f64;
    step.breakpoints.windows(2).all(|w| w[1] - w[0] > threshold)
}

/// Weights `d_0..d_l` applied to observations `gap` apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScheme", into = "RawScheme")]
pub struct DifferenceScheme {
    weights: Vec<f64>,
    gap: usize,
}

#[derive(Serialize, Deserialize)]
struct RawScheme {
    weights: Vec<f64>,
    gap: usize,
}

impl TryFrom<RawScheme> for DifferenceScheme {
    type Error = Error;

    fn try_from(raw: RawScheme) -> Result<Self> {
        DifferenceScheme::new(raw.weights, raw.gap)
    }
}

impl From<DifferenceScheme> for RawScheme {
    fn from(s: DifferenceScheme) -> Self {
        RawScheme {
            weights: s.weights,
            gap: s.gap,
        }
    }
}

impl DifferenceScheme {
    pub fn new(weights: Vec<f64>, gap: usize) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::InvalidScheme("order l must be at least 1".into()));
        }
        if gap == 0 {
            return Err(Error::InvalidScheme("gap must be at least 1".into()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidScheme("weights must be finite".into()));
        }
        let scheme = DifferenceScheme { weights, gap };
        if scheme.norm_sq() <= 0.0 {
            return Err(Error::InvalidScheme("weights must not all be zero".into()));
        }
        Ok(scheme)
    }

    /// First-order scheme `(d_0, d_1)` with the given gap.
    pub fn first_order(d0: f64, d1: f64, gap: usize) -> Result<Self> {
        Self::new(vec![d0, d1], gap)
    }

    /// `(1, −1)` at the given gap.
    pub fn unit_difference(gap: usize) -> Self {
        Self::new(vec![1.0, -1.0], gap).expect("gap checked by caller")
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn gap(&self) -> usize {
        self.gap
    }

    /// Order `l`.
    pub fn order(&self) -> usize {
        self.weights.len() - 1
    }

    /// Distance between the first and last observation of one difference.
    pub fn span(&self) -> usize {
        self.order() * self.gap
    }

    /// `p(d) = Σ d_s²`.
    pub fn norm_sq(&self) -> f64 {
        self.weights.iter().map(|d| d * d).sum()
    }

    /// Whether `Σ d_s = 0` up to rounding.
    pub fn is_contrast(&self) -> bool {
        let scale = self.weights.iter().map(|d| d.abs()).fold(0.0, f64::max);
        self.weights.iter().sum::<f64>().abs() <= 1e-12 * scale
    }

    /// Partial sums `Σ_{q<=r} d_q` for `r = 0..l-1`.
    pub fn partial_sums(&self) -> Vec<f64> {
        self.weights[..self.order()]
            .iter()
            .scan(0.0, |acc, &d| {
                *acc += d;
                Some(*acc)
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        let w: Vec<String> = self.weights.iter().map(|d| format!("{d}")).collect();
        format!("d=({}) gap={}", w.join(","), self.gap)
    }
}

/// `P_l(d) = Σ_{r<l} (r+1) S_r² + 2 Σ_{r<l-1} (r+1) S_r Σ_{s=r+1}^{l-1} S_s`
/// where `S_r = Σ_{q<=r} d_q`.
pub fn scheme_bias_polynomial(scheme: &DifferenceScheme) -> f64 {
    let sums = scheme.partial_sums();
    let l = scheme.order();
    let diagonal: f64 = sums.iter().enumerate().map(|(r, s)| (r + 1) as f64 * s * s).sum();
    let mut cross = 0.0;
    for r in 0..l.saturating_sub(1) {
        let tail: f64 = sums[r + 1..l].iter().sum();
        cross += (r + 1) as f64 * sums[r] * tail;
    }
    diagonal + 2.0 * cross
}
