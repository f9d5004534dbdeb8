//! Difference-based autocovariance estimators.
//!
//! The building block is the quadratic form
//!
//! ```text
//! Q(y; d, gap) = 1 / (p(d) · N) · Σ_{i=1}^{N} ( Σ_{s=0}^{l} d_s y_{i + s·gap} )²,
//! N = n − l·gap,   p(d) = Σ d_s²
//! ```
//!
//! With a first-order contrast `(d_0, d_1)` at gap `m + 1` this estimates
//! `γ_0` for any `m`-dependent error process, because every difference pairs
//! two uncorrelated observations. Lagged autocovariances follow from
//!
//! ```text
//! γ̂_h = Q(y; d, m + 1) − Q(y; (1, −1), h),   h = 1..m,
//! ```
//!
//! using `E[(ε_i − ε_{i+h})²] / 2 = γ_0 − γ_h`.
//!
//! The Hall–Van Keilegom baseline replaces the first term by an average of
//! lag-`k` half mean squared differences over `k ∈ [⌊n^0.4⌋, ⌊√n⌋]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::DifferenceScheme;

/// `Q(y; d)` evaluated in one pass over the series.
pub fn quadratic_form(y: &[f64], scheme: &DifferenceScheme) -> Result<f64> {
    let span = scheme.span();
    if y.len() <= span {
        return Err(Error::SeriesTooShort {
            required: span + 1,
            actual: y.len(),
        });
    }
    let count = y.len() - span;
    let weights = scheme.weights();
    let gap = scheme.gap();
    let total: f64 = if let [d0, d1] = *weights {
        y.iter()
            .zip(&y[gap..])
            .map(|(a, b)| {
                let delta = d0 * a + d1 * b;
                delta * delta
            })
            .sum()
    } else {
        (0..count)
            .map(|i| {
                let delta: f64 = weights.iter().enumerate().map(|(s, d)| d * y[i + s * gap]).sum();
                delta * delta
            })
            .sum()
    };
    Ok(total / (scheme.norm_sq() * count as f64))
}

/// Half mean squared lag-`k` difference, `Σ (y_{i+k} − y_i)² / (2(n − k))`.
pub fn lag_variogram(y: &[f64], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("lag must be positive".into()));
    }
    quadratic_form(y, &DifferenceScheme::unit_difference(k))
}

fn first_order_scheme(d0: f64, d1: f64, gap: usize) -> Result<DifferenceScheme> {
    if d0 == 0.0 || !d0.is_finite() || !d1.is_finite() {
        return Err(Error::InvalidScheme(format!(
            "d0 must be finite and non-zero, got ({d0}, {d1})"
        )));
    }
    let scheme = DifferenceScheme::first_order(d0, d1, gap)?;
    if !scheme.is_contrast() {
        return Err(Error::InvalidScheme(format!(
            "weights must sum to zero, got d0 + d1 = {}",
            d0 + d1
        )));
    }
    Ok(scheme)
}

fn require_length(y: &[f64], m: usize) -> Result<()> {
    if y.len() <= m + 1 {
        return Err(Error::SeriesTooShort {
            required: m + 2,
            actual: y.len(),
        });
    }
    Ok(())
}

/// `γ̂_0`: first-order difference at gap `m + 1`.
pub fn estimate_gamma0(y: &[f64], m: usize, d0: f64, d1: f64) -> Result<f64> {
    let scheme = first_order_scheme(d0, d1, m + 1)?;
    require_length(y, m)?;
    quadratic_form(y, &scheme)
}

/// `γ̂_h` for `1 <= h <= m`. May be negative.
pub fn estimate_gamma_h(y: &[f64], m: usize, h: usize, d0: f64, d1: f64) -> Result<f64> {
    if h == 0 || h > m {
        return Err(Error::InvalidArgument(format!("lag h must lie in 1..={m}, got {h}")));
    }
    let gamma0 = estimate_gamma0(y, m, d0, d1)?;
    Ok(gamma0 - lag_variogram(y, h)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Difference,
    Hvk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateStatus {
    Ok,
    /// `γ̂_0 = 0`; autocorrelations are undefined.
    DegenerateVariance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateMeta {
    pub n: usize,
    /// Largest estimated lag.
    pub m: usize,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<[f64; 2]>,
    /// `(m₁, m₂)` averaging window of the HvK estimator.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<(usize, usize)>,
}

/// Autocovariances `γ̂_0..γ̂_m` and, when `γ̂_0 > 0`, autocorrelations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfEstimate {
    pub gamma: Vec<f64>,
    /// `ρ̂_0..ρ̂_m` with `ρ̂_0 = 1`.
    pub rho: Option<Vec<f64>>,
    pub status: EstimateStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    pub meta: EstimateMeta,
}

impl AcfEstimate {
    fn from_gamma(gamma: Vec<f64>, meta: EstimateMeta) -> Self {
        if gamma[0] > 0.0 {
            let rho = gamma.iter().map(|g| g / gamma[0]).collect();
            AcfEstimate {
                gamma,
                rho: Some(rho),
                status: EstimateStatus::Ok,
                warning: None,
                meta,
            }
        } else {
            AcfEstimate {
                gamma,
                rho: None,
                status: EstimateStatus::DegenerateVariance,
                warning: Some("estimated variance is zero; autocorrelations undefined".into()),
                meta,
            }
        }
    }

    pub fn rho_at(&self, lag: usize) -> Option<f64> {
        self.rho.as_ref().and_then(|r| r.get(lag).copied())
    }

    pub fn is_flagged(&self) -> bool {
        self.status != EstimateStatus::Ok
    }
}

/// `γ̂_0..γ̂_m` from the difference estimators with scheme `(d_0, d_1)`.
pub fn estimate_acf(y: &[f64], m: usize, d0: f64, d1: f64) -> Result<AcfEstimate> {
    let gamma0 = estimate_gamma0(y, m, d0, d1)?;
    let mut gamma = Vec::with_capacity(m + 1);
    gamma.push(gamma0);
    for h in 1..=m {
        gamma.push(gamma0 - lag_variogram(y, h)?);
    }
    Ok(AcfEstimate::from_gamma(
        gamma,
        EstimateMeta {
            n: y.len(),
            m,
            method: Method::Difference,
            scheme: Some([d0, d1]),
            window: None,
        },
    ))
}

/// `(⌊n^0.4⌋, ⌊√n⌋)`.
pub fn hvk_window(n: usize) -> (usize, usize) {
    let nf = n as f64;
    let m1 = (nf.powf(0.4) + 1e-9).floor() as usize;
    let m2 = (nf.sqrt() + 1e-9).floor() as usize;
    (m1, m2)
}

/// Hall–Van Keilegom baseline up to lag `maxlag`.
pub fn estimate_acf_hvk(y: &[f64], maxlag: usize) -> Result<AcfEstimate> {
    let n = y.len();
    let (m1, m2) = hvk_window(n);
    if m1 == 0 || m1 >= m2 || maxlag >= m1 || m2 >= n {
        // smallest n with maxlag < ⌊n^0.4⌋ < ⌊√n⌋
        let required = (2..)
            .find(|&k: &usize| {
                let (a, b) = hvk_window(k);
                a > 0 && a < b && maxlag < a && b < k
            })
            .unwrap_or(usize::MAX);
        return Err(Error::SeriesTooShort {
            required: required.max(n + 1),
            actual: n,
        });
    }
    let mut total = 0.0;
    for k in m1..=m2 {
        total += lag_variogram(y, k)?;
    }
    let gamma0 = total / (m2 - m1 + 1) as f64;
    let mut gamma = Vec::with_capacity(maxlag + 1);
    gamma.push(gamma0);
    for h in 1..=maxlag {
        gamma.push(gamma0 - lag_variogram(y, h)?);
    }
    Ok(AcfEstimate::from_gamma(
        gamma,
        EstimateMeta {
            n,
            m: maxlag,
            method: Method::Hvk,
            scheme: None,
            window: Some((m1, m2)),
        },
    ))
}

/// Estimator configuration as used by the experiment runner and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum EstimatorConfig {
    Difference {
        m: usize,
        #[serde(default = "default_d0")]
        d0: f64,
        #[serde(default = "default_d1")]
        d1: f64,
    },
    Hvk {
        maxlag: usize,
    },
}

fn default_d0() -> f64 {
    1.0
}

fn default_d1() -> f64 {
    -1.0
}

impl EstimatorConfig {
    pub fn difference(m: usize) -> Self {
        EstimatorConfig::Difference { m, d0: 1.0, d1: -1.0 }
    }

    pub fn hvk(maxlag: usize) -> Self {
        EstimatorConfig::Hvk { maxlag }
    }

    pub fn max_lag(&self) -> usize {
        match *self {
            EstimatorConfig::Difference { m, .. } => m,
            EstimatorConfig::Hvk { maxlag } => maxlag,
        }
    }

    pub fn method(&self) -> Method {
        match self {
            EstimatorConfig::Difference { .. } => Method::Difference,
            EstimatorConfig::Hvk { .. } => Method::Hvk,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            EstimatorConfig::Difference { m, d0, d1 } if d0 == 1.0 && d1 == -1.0 => {
                format!("difference(m={m})")
            }
            EstimatorConfig::Difference { m, d0, d1 } => {
                format!("difference(m={m},d=({d0},{d1}))")
            }
            EstimatorConfig::Hvk { maxlag } => format!("hvk(maxlag={maxlag})"),
        }
    }

    pub fn apply(&self, y: &[f64]) -> Result<AcfEstimate> {
        match *self {
            EstimatorConfig::Difference { m, d0, d1 } => estimate_acf(y, m, d0, d1),
            EstimatorConfig::Hvk { maxlag } => estimate_acf_hvk(y, maxlag),
        }
    }

    /// Checks that a series of length `n` satisfies the length preconditions.
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            EstimatorConfig::Difference { m, d0, d1 } => {
                first_order_scheme(d0, d1, m + 1)?;
                if n <= m + 1 {
                    return Err(Error::SeriesTooShort {
                        required: m + 2,
                        actual: n,
                    });
                }
                Ok(())
            }
            EstimatorConfig::Hvk { .. } => self.apply(&vec![0.0; n]).map(|_| ()),
        }
    }
}
