//! Difference-based autocovariance estimation for a regression with a smooth
//! trend, a step signal and `m`-dependent errors, plus the Monte Carlo
//! machinery used to score the estimators.
//!
//! ```
//! use acovdiff::{estimate_acf, ErrorModel, Innovation, NoiseStream};
//!
//! let model = ErrorModel::ma1(0.3, Innovation::Gaussian).unwrap();
//! let y = NoiseStream::new(model, 7, 0).generate(5000);
//! let est = estimate_acf(&y, 1, 1.0, -1.0).unwrap();
//! assert!((est.rho_at(1).unwrap() - 0.3).abs() < 0.1);
//! ```

pub mod error;
pub mod estimators;
pub mod format;
pub mod montecarlo;
pub mod noise;
pub mod reference;
pub mod signal;
pub mod tables;
pub mod theory;

pub use error::{Error, Result};
pub use estimators::{
    estimate_acf, estimate_acf_hvk, estimate_gamma0, estimate_gamma_h, hvk_window, lag_variogram, quadratic_form,
    AcfEstimate, EstimateMeta, EstimateStatus, EstimatorConfig, Method,
};
pub use montecarlo::{
    run_experiment, run_experiment_with, run_rate_study, CellReport, ExperimentSpec, MseReport, Quantity, RateReport,
};
pub use noise::{true_acf, true_acr, ErrorModel, Innovation, NoiseStream, StreamKey, StreamRole};
pub use signal::{
    check_jump_separation, evaluate_mean, quadratic_variation, total_variation, DifferenceScheme, MeanSpec,
    SmoothComponent, StepSignal,
};
pub use tables::{run_table, TableId, TableReport};
