use crate::estimators::EstimatorId;
use crate::synth::Measure;

use super::analytics::{auc, auc_filtered, flattening_point, ratio_table, slope_and_norm, Fp};
use super::grid::MseCurve;

/// Per-estimator convergence summary across the domain-size grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub estimator: EstimatorId,
    pub measure: Measure,
    pub k_grid: Vec<usize>,
    pub fps: Vec<Fp>,
    pub slope: f64,
    pub l2_norm: f64,
    pub ratios: Vec<Option<f64>>,
    pub auc: Vec<f64>,
    /// (below, from) split of the AUC at the CS/CW safe sample size.
    pub auc_split: Vec<Option<(f64, f64)>>,
}

/// Builds one report per estimator from the curves of a single measure.
pub fn analyze(curves: &[MseCurve], measure: Measure, fb: f64, penalty: u32) -> Vec<ConvergenceReport> {
    let mine: Vec<&MseCurve> = curves.iter().filter(|c| c.measure == measure).collect();
    let mut k_grid: Vec<usize> = mine.iter().map(|c| c.k).collect();
    k_grid.sort_unstable();
    k_grid.dedup();
    let mut ids: Vec<EstimatorId> = Vec::new();
    for c in &mine {
        if !ids.contains(&c.estimator) {
            ids.push(c.estimator);
        }
    }
    let curve = |id: EstimatorId, k: usize| mine.iter().copied().find(|c| c.estimator == id && c.k == k);
    let exps = |c: &MseCurve| c.n_grid.iter().map(|n| n.trailing_zeros()).collect::<Vec<u32>>();
    let fp_of = |id: EstimatorId, k: usize| match curve(id, k) {
        Some(c) => flattening_point(&c.mse, &exps(c), fb),
        None => Fp::NotConverged,
    };

    // split point per k: the earlier of the CS and CW flattening points
    let splits: Vec<Option<u32>> = k_grid
        .iter()
        .map(|&k| {
            [EstimatorId::CS, EstimatorId::CW]
                .iter()
                .filter(|id| curve(**id, k).is_some())
                .filter_map(|&id| fp_of(id, k).exponent())
                .min()
        })
        .collect();

    ids.iter()
        .map(|&id| {
            let fps: Vec<Fp> = k_grid.iter().map(|&k| fp_of(id, k)).collect();
            let (slope, l2_norm) = slope_and_norm(&fps, penalty);
            let mut aucs = Vec::new();
            let mut split = Vec::new();
            for (i, &k) in k_grid.iter().enumerate() {
                match curve(id, k) {
                    Some(c) => {
                        aucs.push(auc(&c.mse));
                        split.push(splits[i].map(|e| auc_filtered(&c.mse, &exps(c), e)));
                    }
                    None => {
                        aucs.push(f64::NAN);
                        split.push(None);
                    }
                }
            }
            ConvergenceReport {
                estimator: id,
                measure,
                ratios: ratio_table(&fps, &k_grid),
                k_grid: k_grid.clone(),
                fps,
                slope,
                l2_norm,
                auc: aucs,
                auc_split: split,
            }
        })
        .collect()
}
