//! Benchmark harness: Monte-Carlo MSE curves over a (measure × level × k × N)
//! grid, and the convergence analytics computed from them.

pub mod analytics;
pub mod config;
pub mod export;
pub mod grid;
pub mod report;

use std::path::{Path, PathBuf};

pub use analytics::{auc, auc_filtered, flattening_point, ratio, ratio_table, slope_and_norm, Fp};
pub use config::ExperimentConfig;
pub use export::{export_reports, read_mse_csv};
pub use grid::{run_grid, MseCurve};
pub use report::{analyze, ConvergenceReport};

use crate::error::Result;
use crate::synth::Measure;

/// Reports for every measure present in `curves`.
pub fn analyze_all(
    curves: &[MseCurve],
    fb: f64,
    penalty: u32,
) -> Vec<(Measure, Vec<ConvergenceReport>)> {
    let mut measures: Vec<Measure> = curves.iter().map(|c| c.measure).collect();
    measures.sort();
    measures.dedup();
    measures.into_iter().map(|m| (m, analyze(curves, m, fb, penalty))).collect()
}

/// Runs the grid, analyzes it, and writes all CSV tables to `out_dir`.
pub fn run_and_export(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let curves = run_grid(cfg)?;
    let reports = analyze_all(&curves, cfg.flattening_bound, cfg.penalty_exponent);
    export_reports(&curves, &reports, out_dir)
}
