//! Reproduction grids for the seven published MSE tables.
//!
//! Every table crosses the smooth components `f1, f2, f3` (only `f1` for
//! T7) with a grid of error parameters, adds the six-jump step signal and
//! scores `ρ̂₁, ρ̂₂` over `R` replications at `n = 1600` (`n = 3000` for T3).
//!
//! | table | errors | estimator |
//! |---|---|---|
//! | T1 | MA(1), Gaussian | difference, m = 2 |
//! | T2 | MA(1), t₄ | difference, m = 2 |
//! | T3 | MA(1), Gaussian, n = 3000 | difference, m = 2 |
//! | T4 | AR(1) | difference, m = 2 |
//! | T5 | AR(1) | HvK |
//! | T6 | AR(1) | difference m = 2 and HvK on shared replications |
//! | T7 | AR(1), f1 only | difference, m = 3 |

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::EstimatorConfig;
use crate::format::{dec4, sig17};
use crate::montecarlo::{run_experiment_with, ExperimentSpec, Quantity};
use crate::noise::{ErrorModel, Innovation};
use crate::reference;
use crate::signal::{MeanSpec, SmoothComponent, StepSignal};

pub const DEFAULT_REPLICATIONS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TableId {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
}

impl TableId {
    pub const ALL: [TableId; 7] = [
        TableId::T1,
        TableId::T2,
        TableId::T3,
        TableId::T4,
        TableId::T5,
        TableId::T6,
        TableId::T7,
    ];

    fn index(self) -> u64 {
        self as u64 + 1
    }

    pub fn title(self) -> &'static str {
        match self {
            TableId::T1 => "MA(1) errors, Gaussian innovations, n = 1600, difference estimator m = 2",
            TableId::T2 => "MA(1) errors, t4 innovations, n = 1600, difference estimator m = 2",
            TableId::T3 => "MA(1) errors, Gaussian innovations, n = 3000, difference estimator m = 2",
            TableId::T4 => "AR(1) errors, n = 1600, difference estimator m = 2",
            TableId::T5 => "AR(1) errors, n = 1600, HvK estimator",
            TableId::T6 => "AR(1) errors, n = 1600, difference m = 2 against HvK on shared replications",
            TableId::T7 => "AR(1) errors, n = 1600, f1, difference estimator m = 3",
        }
    }

    pub fn sample_size(self) -> usize {
        match self {
            TableId::T3 => 3000,
            _ => 1600,
        }
    }

    pub fn smooths(self) -> Vec<SmoothComponent> {
        match self {
            TableId::T7 => vec![SmoothComponent::Linear],
            _ => vec![
                SmoothComponent::Linear,
                SmoothComponent::Quadratic,
                SmoothComponent::Periodic,
            ],
        }
    }

    /// Column parameter: `γ₁` for the MA tables, `φ` for the AR tables.
    pub fn parameters(self) -> &'static [f64] {
        match self {
            TableId::T1 | TableId::T2 | TableId::T3 => &reference::GAMMA1_GRID,
            _ => &reference::PHI_GRID,
        }
    }

    pub fn parameter_name(self) -> &'static str {
        match self {
            TableId::T1 | TableId::T2 | TableId::T3 => "gamma1",
            _ => "phi",
        }
    }

    pub fn model(self, parameter: f64) -> Result<ErrorModel> {
        match self {
            TableId::T1 | TableId::T3 => ErrorModel::ma1(parameter, Innovation::Gaussian),
            TableId::T2 => ErrorModel::ma1(parameter, Innovation::T4),
            _ => ErrorModel::ar1(parameter),
        }
    }

    pub fn estimators(self) -> Vec<EstimatorConfig> {
        match self {
            TableId::T5 => vec![EstimatorConfig::hvk(2)],
            TableId::T6 => vec![EstimatorConfig::difference(2), EstimatorConfig::hvk(2)],
            TableId::T7 => vec![EstimatorConfig::difference(3)],
            _ => vec![EstimatorConfig::difference(2)],
        }
    }

    /// Published `(ρ₁, ρ₂)` MSE for one cell, when the table has one.
    pub fn reference(self, estimator: &EstimatorConfig, smooth: usize, param: usize) -> Option<[f64; 2]> {
        match (self, estimator) {
            (TableId::T1, _) => Some(reference::MA_GAUSSIAN_1600[smooth][param]),
            (TableId::T2, _) => Some(reference::MA_T4_1600[smooth][param]),
            (TableId::T3, _) => Some(reference::MA_GAUSSIAN_3000[smooth][param]),
            (TableId::T4, _) => Some(reference::AR_DIFFERENCE_M2[smooth][param]),
            (TableId::T5, _) => Some(reference::AR_HVK[smooth][param]),
            (TableId::T6, EstimatorConfig::Difference { .. }) => Some(reference::AR_DIFFERENCE_M2[smooth][param]),
            (TableId::T6, EstimatorConfig::Hvk { .. }) => Some(reference::AR_HVK[smooth][param]),
            (TableId::T7, _) => (smooth == 0).then(|| reference::AR_DIFFERENCE_M3_F1[param]),
        }
    }

    /// Experiment for one grid cell, with a seed derived from `(seed, table, cell)`.
    pub fn cell_spec(self, smooth: usize, param: usize, seed: u64, replications: usize) -> Result<ExperimentSpec> {
        let smooths = self.smooths();
        let f = smooths
            .get(smooth)
            .ok_or_else(|| Error::InvalidArgument(format!("{self} has no smooth row {smooth}")))?
            .clone();
        let p = *self
            .parameters()
            .get(param)
            .ok_or_else(|| Error::InvalidArgument(format!("{self} has no column {param}")))?;
        Ok(ExperimentSpec {
            name: Some(format!("{self} {} {}={p}", f.name(), self.parameter_name())),
            signal: MeanSpec {
                step: StepSignal::six_jump(),
                smooth: f,
            },
            noise: self.model(p)?,
            n: self.sample_size(),
            replications,
            seed: cell_seed(seed, self.index(), smooth as u64, param as u64),
            estimators: self.estimators(),
            target_lags: vec![1, 2],
        })
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.index())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown table {s:?}, expected one of T1..T7")))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn cell_seed(seed: u64, table: u64, smooth: u64, param: u64) -> u64 {
    splitmix64(seed ^ splitmix64((table << 32) | (smooth << 16) | param))
}

/// One estimator in one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub smooth: String,
    pub parameter: f64,
    pub estimator: String,
    pub seed: u64,
    pub mse: [f64; 2],
    pub mse_se: [f64; 2],
    pub truth: [f64; 2],
    pub failed: usize,
    pub reference: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub id: TableId,
    pub seed: u64,
    pub replications: usize,
    pub cells: Vec<TableCell>,
}

impl TableReport {
    pub fn find(&self, smooth: &str, parameter: f64, estimator: &str) -> Option<&TableCell> {
        self.cells.iter().find(|c| {
            c.smooth == smooth && (c.parameter - parameter).abs() < 1e-12 && c.estimator.starts_with(estimator)
        })
    }

    /// Markdown grid in the published layout: one row per smooth component
    /// and estimator, `ρ̂₁ | ρ̂₂` per parameter value. Published values follow
    /// in brackets when known.
    pub fn render_markdown(&self) -> String {
        let params = self.id.parameters();
        let mut out = format!(
            "### {}: {}\n\nseed = {}, R = {}; cells show `simulated [published]` MSE\n\n",
            self.id,
            self.id.title(),
            self.seed,
            self.replications
        );
        out.push_str("| f | estimator |");
        for p in params {
            out.push_str(&format!(
                " {}={p} ρ1 | {}={p} ρ2 |",
                self.id.parameter_name(),
                self.id.parameter_name()
            ));
        }
        out.push('\n');
        out.push_str("|---|---|");
        out.push_str(&"---|".repeat(2 * params.len()));
        out.push('\n');
        let mut rows: Vec<(String, String)> = Vec::new();
        for c in &self.cells {
            let key = (c.smooth.clone(), c.estimator.clone());
            if !rows.contains(&key) {
                rows.push(key);
            }
        }
        for (smooth, est) in rows {
            out.push_str(&format!("| {smooth} | {est} |"));
            for &p in params {
                match self.find(&smooth, p, &est) {
                    Some(c) => {
                        for k in 0..2 {
                            match c.reference {
                                Some(r) => out.push_str(&format!(" {} [{}] |", dec4(c.mse[k]), dec4(r[k]))),
                                None => out.push_str(&format!(" {} |", dec4(c.mse[k]))),
                            }
                        }
                    }
                    None => out.push_str(" | |"),
                }
            }
            out.push('\n');
        }
        out.push_str("\nMonte Carlo standard errors of the MSE (ρ1 / ρ2):\n\n");
        for c in &self.cells {
            out.push_str(&format!(
                "- {} {} {}={}: {} / {}\n",
                c.smooth,
                c.estimator,
                self.id.parameter_name(),
                c.parameter,
                dec4(c.mse_se[0]),
                dec4(c.mse_se[1])
            ));
        }
        out
    }

    pub const CSV_HEADER: [&'static str; 14] = [
        "table",
        "smooth",
        "parameter",
        "estimator",
        "seed",
        "lag",
        "truth",
        "mse",
        "mse_se",
        "published",
        "replications",
        "failed",
        "parameter_name",
        "n",
    ];

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        for c in &self.cells {
            for k in 0..2 {
                w.write_record([
                    self.id.to_string(),
                    c.smooth.clone(),
                    sig17(c.parameter),
                    c.estimator.clone(),
                    c.seed.to_string(),
                    (k + 1).to_string(),
                    sig17(c.truth[k]),
                    sig17(c.mse[k]),
                    sig17(c.mse_se[k]),
                    c.reference.map(|r| sig17(r[k])).unwrap_or_default(),
                    self.replications.to_string(),
                    c.failed.to_string(),
                    self.id.parameter_name().to_string(),
                    self.id.sample_size().to_string(),
                ])?;
            }
        }
        w.flush()
    }
}

/// Runs every cell of table `id`.
pub fn run_table(id: TableId, seed: u64, replications: usize, workers: Option<usize>) -> Result<TableReport> {
    let smooths = id.smooths();
    let mut cells = Vec::new();
    for (si, f) in smooths.iter().enumerate() {
        for pi in 0..id.parameters().len() {
            let spec = id.cell_spec(si, pi, seed, replications)?;
            let report = run_experiment_with(&spec, workers)?;
            for (k, est) in spec.estimators.iter().enumerate() {
                let mut mse = [0.0; 2];
                let mut mse_se = [0.0; 2];
                let mut truth = [0.0; 2];
                for lag in 1..=2 {
                    let c = report.cell(k, Quantity::Rho(lag)).ok_or_else(|| {
                        Error::InvalidArgument(format!("{} does not estimate lag {lag}", est.label()))
                    })?;
                    mse[lag - 1] = c.mse;
                    mse_se[lag - 1] = c.mse_se;
                    truth[lag - 1] = c.truth;
                }
                cells.push(TableCell {
                    smooth: f.name().to_string(),
                    parameter: id.parameters()[pi],
                    estimator: est.label(),
                    seed: spec.seed,
                    mse,
                    mse_se,
                    truth,
                    failed: report.failures[k].failed,
                    reference: id.reference(est, si, pi),
                });
            }
        }
    }
    Ok(TableReport {
        id,
        seed,
        replications,
        cells,
    })
}
