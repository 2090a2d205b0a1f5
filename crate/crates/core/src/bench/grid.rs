use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::EstimatorId;
use crate::shannon::EntropyTerms;
use crate::synth::{
    derive_seed, exact_measure, generate_scenario, sample_joint, GroundTruthScenario, Level, Measure,
};

use super::config::ExperimentConfig;

/// Mean squared error of one estimator against the sample-size grid, averaged
/// over repetitions and ground-truth levels.
#[derive(Debug, Clone, PartialEq)]
pub struct MseCurve {
    pub estimator: EstimatorId,
    pub measure: Measure,
    pub k: usize,
    pub n_grid: Vec<u64>,
    /// One entry per sample size; NaN if any contributing run was NaN.
    pub mse: Vec<f64>,
}

/// One (measure, level, k, repetition) cell: squared errors indexed
/// `[estimator][n]`.
struct CellResult {
    sq_err: Vec<Vec<f64>>,
}

fn measure_tag(m: Measure) -> u64 {
    m as u64
}

fn level_tag(l: Level) -> u64 {
    l as u64
}

/// Seed of the ground-truth draw in one grid cell.
pub fn cell_seed(master: u64, measure: Measure, level: Level, k: usize, rep: u32) -> u64 {
    derive_seed(master, &[measure_tag(measure), level_tag(level), k as u64, rep as u64])
}

fn run_cell(
    cfg: &ExperimentConfig,
    measure: Measure,
    level: Level,
    k: usize,
    rep: u32,
) -> Result<CellResult> {
    let seed = cell_seed(cfg.master_seed, measure, level, k, rep);
    let scenario = GroundTruthScenario::new(measure, level);
    let cell = |e: Error| match e {
        Error::Generation { what, attempts } => Error::Generation {
            what: format!("{what} (cell {measure}/{level}/k={k}/rep={rep})"),
            attempts,
        },
        other => other,
    };
    let truth_pmf = generate_scenario(k, scenario, seed).map_err(cell)?;
    let truth = exact_measure(&truth_pmf, measure)?;

    let mut sq_err = vec![Vec::with_capacity(cfg.n_grid.len()); cfg.estimators.len()];
    for &n in &cfg.n_grid {
        let sample = sample_joint(&truth_pmf, n, derive_seed(seed, &[n]))?;
        let terms = EntropyTerms::with_policy(&sample, measure, cfg.alphabet)?;
        for (i, &id) in cfg.estimators.iter().enumerate() {
            let est = terms.estimate(&id.into())?;
            let d = est - truth;
            sq_err[i].push(d * d);
        }
    }
    Ok(CellResult { sq_err })
}

/// Runs the full grid and returns one curve per (measure, k, estimator), in
/// config order.
pub fn run_grid(cfg: &ExperimentConfig) -> Result<Vec<MseCurve>> {
    cfg.validate()?;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = cfg.threads {
            b = b.num_threads(t);
        }
        b.build().map_err(|e| Error::Numerical(format!("thread pool: {e}")))?
    };

    let mut curves = Vec::new();
    for &measure in &cfg.measures {
        for &k in &cfg.k_grid {
            let jobs: Vec<(Level, u32)> = cfg
                .gt_levels
                .iter()
                .flat_map(|&l| (0..cfg.repetitions).map(move |r| (l, r)))
                .collect();
            // collect keeps job order, so the reduction below is deterministic
            let results: Vec<CellResult> = pool.install(|| {
                jobs.par_iter()
                    .map(|&(level, rep)| run_cell(cfg, measure, level, k, rep))
                    .collect::<Result<_>>()
            })?;

            let runs = results.len() as f64;
            for (i, &id) in cfg.estimators.iter().enumerate() {
                let mse = (0..cfg.n_grid.len())
                    .map(|j| results.iter().map(|c| c.sq_err[i][j]).sum::<f64>() / runs)
                    .collect();
                curves.push(MseCurve { estimator: id, measure, k, n_grid: cfg.n_grid.clone(), mse });
            }
        }
    }
    Ok(curves)
}
