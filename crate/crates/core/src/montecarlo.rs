//! Replication engine for MSE studies.
//!
//! Each replication `r` draws its noise from the stream keyed by
//! `(seed, r)`, so results do not depend on how replications are scheduled.
//! Per-replication outputs are collected in index order and folded
//! sequentially; running with one worker or many gives bit-identical reports.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::EstimatorConfig;
use crate::format::sig17;
use crate::noise::{true_acf, ErrorModel, NoiseStream};
use crate::signal::{quadratic_variation, total_variation, MeanSpec};
use crate::theory;

/// Full description of one Monte Carlo scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub signal: MeanSpec,
    pub noise: ErrorModel,
    pub n: usize,
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    pub estimators: Vec<EstimatorConfig>,
    /// Autocorrelation lags to score.
    #[serde(default = "default_lags")]
    pub target_lags: Vec<usize>,
}

fn default_lags() -> Vec<usize> {
    vec![1, 2]
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidArgument("replications must be at least 1".into()));
        }
        if self.n < 2 {
            return Err(Error::SeriesTooShort {
                required: 2,
                actual: self.n,
            });
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidArgument("at least one estimator is required".into()));
        }
        for est in &self.estimators {
            est.validate(self.n)?;
        }
        Ok(())
    }
}

/// Scored quantity: an autocovariance `γ_h` or an autocorrelation `ρ_h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    Gamma(usize),
    Rho(usize),
}

impl Quantity {
    pub fn label(&self) -> String {
        match self {
            Quantity::Gamma(h) => format!("gamma{h}"),
            Quantity::Rho(h) => format!("rho{h}"),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        if let Some(h) = s.strip_prefix("gamma") {
            h.parse().ok().map(Quantity::Gamma)
        } else if let Some(h) = s.strip_prefix("rho") {
            h.parse().ok().map(Quantity::Rho)
        } else {
            None
        }
    }
}

impl Serialize for Quantity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Quantity::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad quantity {s:?}")))
    }
}

/// Closed-form predictions attached to a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellPrediction {
    pub mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
}

/// Moments of one estimator at one quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub estimator: String,
    pub quantity: Quantity,
    pub truth: f64,
    pub mean: f64,
    /// `sd(estimates)/√R`.
    pub mean_se: f64,
    pub bias: f64,
    /// Population variance (divisor `R`), so that `mse = bias² + variance`.
    pub variance: f64,
    pub mse: f64,
    /// `sd(squared errors)/√R`.
    pub mse_se: f64,
    pub replications: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction: Option<CellPrediction>,
}

impl CellReport {
    fn from_values(
        estimator: String,
        quantity: Quantity,
        truth: f64,
        values: &[f64],
        prediction: Option<CellPrediction>,
    ) -> Self {
        let r = values.len() as f64;
        let mean = values.iter().sum::<f64>() / r;
        let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / r;
        let bias = mean - truth;
        let sq: Vec<f64> = values.iter().map(|v| (v - truth).powi(2)).collect();
        let mse = sq.iter().sum::<f64>() / r;
        let (mean_se, mse_se) = if values.len() > 1 {
            let sd_sq = (sq.iter().map(|s| (s - mse).powi(2)).sum::<f64>() / (r - 1.0)).sqrt();
            ((variance * r / (r - 1.0)).sqrt() / r.sqrt(), sd_sq / r.sqrt())
        } else {
            (f64::NAN, f64::NAN)
        };
        CellReport {
            estimator,
            quantity,
            truth,
            mean,
            mean_se,
            bias,
            variance,
            mse,
            mse_se,
            replications: values.len(),
            prediction,
        }
    }

    /// Unbiased sample variance (divisor `R − 1`).
    pub fn sample_variance(&self) -> f64 {
        let r = self.replications as f64;
        self.variance * r / (r - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureCount {
    pub estimator: String,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseReport {
    pub spec: ExperimentSpec,
    pub cells: Vec<CellReport>,
    pub failures: Vec<FailureCount>,
}

impl MseReport {
    pub fn cell(&self, estimator: usize, quantity: Quantity) -> Option<&CellReport> {
        let label = self.spec.estimators.get(estimator)?.label();
        self.cells
            .iter()
            .find(|c| c.estimator == label && c.quantity == quantity)
    }

    pub const CSV_HEADER: [&'static str; 13] = [
        "estimator",
        "quantity",
        "truth",
        "mean",
        "mean_se",
        "bias",
        "variance",
        "mse",
        "mse_se",
        "replications",
        "failed",
        "predicted_mean",
        "predicted_variance",
    ];

    /// One row per (estimator, quantity), raw numbers at 17 significant digits.
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.cells
            .iter()
            .map(|c| {
                let failed = self
                    .failures
                    .iter()
                    .find(|f| f.estimator == c.estimator)
                    .map_or(0, |f| f.failed);
                vec![
                    c.estimator.clone(),
                    c.quantity.label(),
                    sig17(c.truth),
                    sig17(c.mean),
                    sig17(c.mean_se),
                    sig17(c.bias),
                    sig17(c.variance),
                    sig17(c.mse),
                    sig17(c.mse_se),
                    c.replications.to_string(),
                    failed.to_string(),
                    c.prediction.map(|p| sig17(p.mean)).unwrap_or_default(),
                    c.prediction.and_then(|p| p.variance).map(sig17).unwrap_or_default(),
                ]
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        for row in self.csv_rows() {
            w.write_record(row)?;
        }
        w.flush()
    }
}

/// Worker pool selection. `None` uses rayon's global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Per-replication outcome of one estimator.
type Draw = Option<Vec<f64>>;

fn cell_layout(spec: &ExperimentSpec, est: &EstimatorConfig) -> Vec<Quantity> {
    let maxlag = est.max_lag();
    let mut out: Vec<Quantity> = (0..=maxlag).map(Quantity::Gamma).collect();
    let mut lags: Vec<usize> = spec.target_lags.iter().copied().filter(|&h| h <= maxlag).collect();
    lags.sort_unstable();
    lags.dedup();
    out.extend(lags.into_iter().map(Quantity::Rho));
    out
}

fn prediction_for(spec: &ExperimentSpec, est: &EstimatorConfig, q: Quantity, acf: &[f64]) -> Option<CellPrediction> {
    let EstimatorConfig::Difference { m, .. } = *est else {
        return None;
    };
    if spec.n <= m + 1 {
        return None;
    }
    let jk = quadratic_variation(&spec.signal.step);
    match q {
        Quantity::Gamma(0) => Some(CellPrediction {
            mean: theory::predict_mean_gamma0(acf[0], m, spec.n, jk),
            variance: Some(theory::predict_var_gamma0(acf[0], m, spec.n, jk)),
        }),
        Quantity::Gamma(h) => Some(CellPrediction {
            mean: theory::predict_mean_gamma_h(acf[0], acf[h], m, h, spec.n, jk),
            variance: None,
        }),
        Quantity::Rho(_) => None,
    }
}

/// Runs every replication of `spec` and aggregates the estimator moments.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<MseReport> {
    run_experiment_with(spec, None)
}

pub fn run_experiment_with(spec: &ExperimentSpec, workers: Option<usize>) -> Result<MseReport> {
    spec.validate()?;
    let mean = spec.signal.evaluate(spec.n)?;
    let layouts: Vec<Vec<Quantity>> = spec.estimators.iter().map(|e| cell_layout(spec, e)).collect();

    let draws: Vec<Vec<Draw>> = with_workers(workers, || {
        (0..spec.replications)
            .into_par_iter()
            .map(|r| replicate(spec, &mean, &layouts, r as u64))
            .collect()
    })?;

    let maxlag = spec.estimators.iter().map(|e| e.max_lag()).max().unwrap_or(0);
    let acf = true_acf(&spec.noise, maxlag);
    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for (k, est) in spec.estimators.iter().enumerate() {
        let label = est.label();
        let ok: Vec<&Vec<f64>> = draws.iter().filter_map(|d| d[k].as_ref()).collect();
        let failed = spec.replications - ok.len();
        if failed * 100 > spec.replications {
            return Err(Error::TooManyFailures {
                failed,
                total: spec.replications,
            });
        }
        failures.push(FailureCount {
            estimator: label.clone(),
            failed,
        });
        if ok.is_empty() {
            continue;
        }
        for (slot, &q) in layouts[k].iter().enumerate() {
            let truth = match q {
                Quantity::Gamma(h) => acf[h],
                Quantity::Rho(h) => acf[h] / acf[0],
            };
            let values: Vec<f64> = ok.iter().map(|v| v[slot]).collect();
            cells.push(CellReport::from_values(
                label.clone(),
                q,
                truth,
                &values,
                prediction_for(spec, est, q, &acf),
            ));
        }
    }
    Ok(MseReport {
        spec: spec.clone(),
        cells,
        failures,
    })
}

fn replicate(spec: &ExperimentSpec, mean: &[f64], layouts: &[Vec<Quantity>], r: u64) -> Vec<Draw> {
    let noise = NoiseStream::new(spec.noise, spec.seed, r).generate(spec.n);
    let y: Vec<f64> = mean.iter().zip(&noise).map(|(m, e)| m + e).collect();
    spec.estimators
        .iter()
        .zip(layouts)
        .map(|(est, layout)| {
            let acf = est.apply(&y).ok()?;
            if acf.is_flagged() {
                return None;
            }
            Some(
                layout
                    .iter()
                    .map(|q| match *q {
                        Quantity::Gamma(h) => acf.gamma[h],
                        Quantity::Rho(h) => acf.rho_at(h).expect("flag checked"),
                    })
                    .collect(),
            )
        })
        .collect()
}

/// Summary statistics of the step component used in reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSummary {
    pub jumps: usize,
    pub quadratic_variation: f64,
    pub total_variation: f64,
    pub max_jump: f64,
}

impl SignalSummary {
    pub fn of(spec: &MeanSpec) -> Self {
        SignalSummary {
            jumps: spec.step.jump_count(),
            quadratic_variation: quadratic_variation(&spec.step),
            total_variation: total_variation(&spec.step),
            max_jump: spec.step.max_jump(),
        }
    }
}

/// Least-squares slope of `log(mse)` on `log(n)` for one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCell {
    pub estimator: String,
    pub quantity: Quantity,
    pub mse: Vec<f64>,
    pub slope: f64,
    /// `max(n·MSE) / min(n·MSE)` over the grid.
    pub scaled_mse_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub n_grid: Vec<usize>,
    pub cells: Vec<RateCell>,
    pub reports: Vec<MseReport>,
}

impl RateReport {
    pub fn cell(&self, estimator: &str, quantity: Quantity) -> Option<&RateCell> {
        self.cells
            .iter()
            .find(|c| c.estimator == estimator && c.quantity == quantity)
    }
}

pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Runs `base` at every sample size in `n_grid` and fits MSE decay rates.
pub fn run_rate_study(base: &ExperimentSpec, n_grid: &[usize], workers: Option<usize>) -> Result<RateReport> {
    if n_grid.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "rate study needs at least 3 sample sizes, got {}",
            n_grid.len()
        )));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "sample sizes must be strictly increasing".into(),
        ));
    }
    let mut reports = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let spec = ExperimentSpec { n, ..base.clone() };
        reports.push(run_experiment_with(&spec, workers)?);
    }
    let ns: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
    let cells = reports[0]
        .cells
        .iter()
        .filter_map(|c0| {
            let mse: Vec<f64> = reports
                .iter()
                .map(|r| {
                    r.cells
                        .iter()
                        .find(|c| c.estimator == c0.estimator && c.quantity == c0.quantity)
                        .map(|c| c.mse)
                })
                .collect::<Option<_>>()?;
            let scaled: Vec<f64> = mse.iter().zip(&ns).map(|(m, n)| m * n).collect();
            let hi = scaled.iter().copied().fold(f64::MIN, f64::max);
            let lo = scaled.iter().copied().fold(f64::MAX, f64::min);
            Some(RateCell {
                estimator: c0.estimator.clone(),
                quantity: c0.quantity,
                slope: log_log_slope(&ns, &mse),
                scaled_mse_ratio: hi / lo,
                mse,
            })
        })
        .collect();
    Ok(RateReport {
        n_grid: n_grid.to_vec(),
        cells,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::Innovation;
    use crate::signal::{SmoothComponent, StepSignal};

    fn pure_noise(model: ErrorModel, n: usize, r: usize, estimators: Vec<EstimatorConfig>) -> ExperimentSpec {
        ExperimentSpec {
            name: None,
            signal: MeanSpec {
                step: StepSignal::constant(0.0),
                smooth: SmoothComponent::Zero,
            },
            noise: model,
            n,
            replications: r,
            seed: 17,
            estimators,
            target_lags: vec![1, 2],
        }
    }

    #[test]
    fn mse_decomposes_into_bias_and_variance() {
        let spec = pure_noise(
            ErrorModel::ma1(0.3, Innovation::Gaussian).unwrap(),
            300,
            64,
            vec![EstimatorConfig::difference(2), EstimatorConfig::hvk(2)],
        );
        let report = run_experiment(&spec).unwrap();
        assert_eq!(report.cells.len(), 2 * (3 + 2));
        for c in &report.cells {
            let rel = (c.mse - (c.bias * c.bias + c.variance)).abs() / c.mse.max(1e-300);
            assert!(rel < 1e-10, "{c:?}");
            assert_eq!(c.replications, 64);
        }
    }

    #[test]
    fn layout_skips_lags_beyond_estimator_range() {
        let spec = pure_noise(
            ErrorModel::ar1(0.2).unwrap(),
            200,
            4,
            vec![EstimatorConfig::difference(1)],
        );
        let report = run_experiment(&spec).unwrap();
        let qs: Vec<Quantity> = report.cells.iter().map(|c| c.quantity).collect();
        assert_eq!(qs, vec![Quantity::Gamma(0), Quantity::Gamma(1), Quantity::Rho(1)]);
        assert!(report.cell(0, Quantity::Rho(2)).is_none());
        assert!(report.cell(0, Quantity::Gamma(0)).unwrap().prediction.is_some());
    }

    #[test]
    fn schedule_independence() {
        let spec = pure_noise(
            ErrorModel::ma1(-0.2, Innovation::T4).unwrap(),
            400,
            40,
            vec![EstimatorConfig::difference(2)],
        );
        let one = run_experiment_with(&spec, Some(1)).unwrap();
        let many = run_experiment_with(&spec, Some(4)).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = pure_noise(
            ErrorModel::ma1(0.0, Innovation::Gaussian).unwrap(),
            100,
            10,
            vec![EstimatorConfig::difference(1)],
        );
        spec.replications = 0;
        assert!(run_experiment(&spec).is_err());
        spec.replications = 3;
        spec.estimators = vec![EstimatorConfig::hvk(9)];
        assert!(matches!(run_experiment(&spec), Err(Error::SeriesTooShort { .. })));
    }

    #[test]
    fn quantity_labels_round_trip() {
        for q in [Quantity::Gamma(0), Quantity::Rho(12)] {
            assert_eq!(Quantity::parse(&q.label()), Some(q));
        }
        assert_eq!(Quantity::parse("beta1"), None);
    }

    #[test]
    fn spec_toml_round_trip() {
        let spec = pure_noise(
            ErrorModel::ar1(0.4).unwrap(),
            1600,
            500,
            vec![EstimatorConfig::difference(2), EstimatorConfig::hvk(2)],
        );
        let back = ExperimentSpec::from_toml(&spec.to_toml()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn rate_study_rejects_short_grid() {
        let spec = pure_noise(
            ErrorModel::ma1(0.0, Innovation::Gaussian).unwrap(),
            100,
            5,
            vec![EstimatorConfig::difference(1)],
        );
        assert!(matches!(
            run_rate_study(&spec, &[100, 200], None),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            run_rate_study(&spec, &[100, 300, 200], None),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn slope_of_power_law() {
        let ns = [100.0, 400.0, 1600.0];
        let ys: Vec<f64> = ns.iter().map(|n: &f64| 3.0 * n.powf(-1.0)).collect();
        assert!((log_log_slope(&ns, &ys) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_has_one_row_per_cell() {
        let spec = pure_noise(
            ErrorModel::ma1(0.1, Innovation::Gaussian).unwrap(),
            200,
            8,
            vec![EstimatorConfig::difference(1)],
        );
        let report = run_experiment(&spec).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + report.cells.len());
        assert!(text.starts_with("estimator,quantity,truth"));
    }
}
