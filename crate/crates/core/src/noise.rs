//! Stationary error processes with reproducible, order-independent seeding.
//!
//! Two families are supported:
//!
//! - `ma1`: the 1-dependent moving average `ε_i = r₀ δ_i + r₁ δ_{i−1}` with
//!   `r₀, r₁` chosen so that `r₀² + r₁² = 1` and `r₀ r₁ = γ₁`. Innovations are
//!   standard Gaussian or Student t with 4 degrees of freedom. The t₄ draws
//!   are not rescaled, so their variance is 2 and `true_acf` reports the
//!   autocovariances on that scale.
//! - `ar1`: `ε_i = φ ε_{i−1} + ζ_i` with Gaussian `ζ_i`, started from the exact
//!   stationary law `N(0, 1/(1 − φ²))`.
//!
//! Every stream is a ChaCha8 generator keyed by `(seed, replication, role)`,
//! so replication `r` sees the same draws no matter which thread runs it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Innovation {
    #[default]
    Gaussian,
    T4,
}

impl Innovation {
    pub const NAMES: [&'static str; 2] = ["gaussian", "t4"];

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "gaussian" | "normal" => Ok(Innovation::Gaussian),
            "t4" => Ok(Innovation::T4),
            other => Err(Error::Config(format!(
                "unknown innovation {other:?}; valid options: {}",
                Self::NAMES.join(", ")
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Innovation::Gaussian => "gaussian",
            Innovation::T4 => "t4",
        }
    }

    pub fn variance(self) -> f64 {
        match self {
            Innovation::Gaussian => 1.0,
            // ν/(ν−2) with ν = 4
            Innovation::T4 => 2.0,
        }
    }
}

/// Description of the error process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawModel")]
pub enum ErrorModel {
    Ma1 {
        gamma1: f64,
        #[serde(default)]
        innovation: Innovation,
    },
    Ar1 {
        phi: f64,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawModel {
    Ma1 {
        gamma1: f64,
        #[serde(default)]
        innovation: Innovation,
    },
    Ar1 {
        phi: f64,
    },
}

impl TryFrom<RawModel> for ErrorModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        match raw {
            RawModel::Ma1 { gamma1, innovation } => ErrorModel::ma1(gamma1, innovation),
            RawModel::Ar1 { phi } => ErrorModel::ar1(phi),
        }
    }
}

impl ErrorModel {
    pub const NAMES: [&'static str; 2] = ["ma1", "ar1"];

    pub fn ma1(gamma1: f64, innovation: Innovation) -> Result<Self> {
        ma_coefficients(gamma1)?;
        Ok(ErrorModel::Ma1 { gamma1, innovation })
    }

    pub fn ar1(phi: f64) -> Result<Self> {
        if !phi.is_finite() || phi.abs() >= 1.0 {
            return Err(Error::InvalidModel(format!(
                "AR(1) coefficient must satisfy |phi| < 1, got {phi}"
            )));
        }
        Ok(ErrorModel::Ar1 { phi })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ErrorModel::Ma1 { .. } => "ma1",
            ErrorModel::Ar1 { .. } => "ar1",
        }
    }

    /// Largest lag with non-zero autocovariance, `None` for AR(1).
    pub fn dependence_depth(&self) -> Option<usize> {
        match self {
            ErrorModel::Ma1 { .. } => Some(1),
            ErrorModel::Ar1 { .. } => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ErrorModel::Ma1 { gamma1, innovation } => {
                format!("ma1(gamma1={gamma1}, innovation={})", innovation.name())
            }
            ErrorModel::Ar1 { phi } => format!("ar1(phi={phi})"),
        }
    }
}

/// `(r₀, r₁)` of the 1-dependent moving average with lag-one correlation `γ₁`.
pub fn ma_coefficients(gamma1: f64) -> Result<(f64, f64)> {
    if !gamma1.is_finite() || gamma1.abs() > 0.5 {
        return Err(Error::InvalidModel(format!(
            "MA(1) parameter must satisfy |gamma1| <= 1/2, got {gamma1}"
        )));
    }
    let plus = (1.0 + 2.0 * gamma1).sqrt();
    let minus = (1.0 - 2.0 * gamma1).sqrt();
    Ok(((plus + minus) / 2.0, (plus - minus) / 2.0))
}

/// Autocovariances `γ_0..γ_maxlag`.
pub fn true_acf(model: &ErrorModel, maxlag: usize) -> Vec<f64> {
    match *model {
        ErrorModel::Ma1 { gamma1, innovation } => {
            let scale = innovation.variance();
            (0..=maxlag)
                .map(|k| match k {
                    0 => scale,
                    1 => scale * gamma1,
                    _ => 0.0,
                })
                .collect()
        }
        ErrorModel::Ar1 { phi } => {
            let var = 1.0 / (1.0 - phi * phi);
            (0..=maxlag).map(|k| var * phi.powi(k as i32)).collect()
        }
    }
}

/// Autocorrelations `ρ_0..ρ_maxlag`.
pub fn true_acr(model: &ErrorModel, maxlag: usize) -> Vec<f64> {
    let acf = true_acf(model, maxlag);
    acf.iter().map(|g| g / acf[0]).collect()
}

/// Purpose of a random stream within one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamRole {
    Noise = 1,
    Auxiliary = 2,
}

/// Key of an independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub replication: u64,
    pub role: StreamRole,
}

impl StreamKey {
    pub fn new(seed: u64, replication: u64, role: StreamRole) -> Self {
        StreamKey {
            seed,
            replication,
            role,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.replication.to_le_bytes());
        key[16..24].copy_from_slice(&(self.role as u64).to_le_bytes());
        key[24..].copy_from_slice(b"acovdiff");
        ChaCha8Rng::from_seed(key)
    }
}

/// An error model bound to a stream key.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseStream {
    pub model: ErrorModel,
    pub key: StreamKey,
}

impl NoiseStream {
    pub fn new(model: ErrorModel, seed: u64, replication: u64) -> Self {
        NoiseStream {
            model,
            key: StreamKey::new(seed, replication, StreamRole::Noise),
        }
    }

    pub fn generate(&self, n: usize) -> Vec<f64> {
        generate_with(&self.model, n, &mut self.key.rng())
    }
}

/// Draws `n` consecutive values of the stationary process.
pub fn generate(model: &ErrorModel, n: usize, key: StreamKey) -> Vec<f64> {
    generate_with(model, n, &mut key.rng())
}

pub fn generate_with<R: Rng + ?Sized>(model: &ErrorModel, n: usize, rng: &mut R) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    match *model {
        ErrorModel::Ma1 { gamma1, innovation } => {
            let (r0, r1) = ma_coefficients(gamma1).expect("validated model");
            let deltas = innovations(innovation, n + 1, rng);
            deltas.windows(2).map(|w| r0 * w[1] + r1 * w[0]).collect()
        }
        ErrorModel::Ar1 { phi } => {
            let mut out = Vec::with_capacity(n);
            let z: f64 = rng.sample(StandardNormal);
            let mut prev = z / (1.0 - phi * phi).sqrt();
            out.push(prev);
            for _ in 1..n {
                let z: f64 = rng.sample(StandardNormal);
                prev = phi * prev + z;
                out.push(prev);
            }
            out
        }
    }
}

fn innovations<R: Rng + ?Sized>(kind: Innovation, len: usize, rng: &mut R) -> Vec<f64> {
    match kind {
        Innovation::Gaussian => (0..len).map(|_| rng.sample(StandardNormal)).collect(),
        Innovation::T4 => {
            let t = StudentT::new(4.0).expect("4 degrees of freedom");
            (0..len).map(|_| t.sample(rng)).collect()
        }
    }
}
