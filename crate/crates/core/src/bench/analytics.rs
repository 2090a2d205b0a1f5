//! Convergence analytics on MSE curves: flattening-off points, slope and ℓ2
//! summaries, safe-sample ratios and trapezoidal AUC.

use std::fmt;

/// Flattening-off point of a curve, as a sample-size exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fp {
    Converged(u32),
    NotConverged,
}

impl Fp {
    pub fn exponent(self) -> Option<u32> {
        match self {
            Fp::Converged(e) => Some(e),
            Fp::NotConverged => None,
        }
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fp::Converged(e) => write!(f, "{e}"),
            Fp::NotConverged => f.write_str("NC"),
        }
    }
}

/// Smallest exponent from which every consecutive MSE delta stays below `fb`.
///
/// `exponents[i]` is log2 of the sample size behind `mse[i]`. At least one
/// delta must follow the returned point, and NaN deltas never count as small.
pub fn flattening_point(mse: &[f64], exponents: &[u32], fb: f64) -> Fp {
    assert_eq!(mse.len(), exponents.len(), "one exponent per MSE entry");
    if mse.len() < 2 {
        return Fp::NotConverged;
    }
    let small: Vec<bool> = mse.windows(2).map(|w| (w[1] - w[0]).abs() < fb).collect();
    // walk back from the end while deltas stay small
    let mut start = small.len();
    while start > 0 && small[start - 1] {
        start -= 1;
    }
    if start == small.len() {
        Fp::NotConverged
    } else {
        Fp::Converged(exponents[start])
    }
}

/// Least-squares slope of the padded exponents against indices 1..n, and the
/// Euclidean norm of the padded vector. Non-converged entries count as
/// `penalty`.
pub fn slope_and_norm(fps: &[Fp], penalty: u32) -> (f64, f64) {
    let ys: Vec<f64> = fps.iter().map(|f| f.exponent().unwrap_or(penalty) as f64).collect();
    let norm = ys.iter().map(|y| y * y).sum::<f64>().sqrt();
    let n = ys.len() as f64;
    if ys.len() < 2 {
        return (0.0, norm);
    }
    let mean_x = (n + 1.0) / 2.0;
    let mean_y = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = (i + 1) as f64 - mean_x;
        sxy += dx * (y - mean_y);
        sxx += dx * dx;
    }
    (sxy / sxx, norm)
}

/// 2^Fp / k rounded to two decimals; `None` when not converged.
pub fn ratio(fp: Fp, k: usize) -> Option<f64> {
    fp.exponent().map(|e| ((2f64.powi(e as i32) / k as f64) * 100.0).round() / 100.0)
}

pub fn ratio_table(fps: &[Fp], k_grid: &[usize]) -> Vec<Option<f64>> {
    fps.iter().zip(k_grid).map(|(&f, &k)| ratio(f, k)).collect()
}

/// Trapezoid of the curve with unit spacing in the exponent. NaN in, NaN out.
pub fn auc(mse: &[f64]) -> f64 {
    mse.windows(2).map(|w| 0.5 * (w[0] + w[1])).sum()
}

/// AUC split at `from_exponent`: the part over exponents up to it, and the
/// part from it onward. The two halves add up to [`auc`].
pub fn auc_filtered(mse: &[f64], exponents: &[u32], from_exponent: u32) -> (f64, f64) {
    if mse.is_empty() {
        return (0.0, 0.0);
    }
    let cut = exponents.iter().position(|&e| e >= from_exponent).unwrap_or(exponents.len());
    let cut = cut.min(mse.len() - 1);
    (auc(&mse[..=cut]), auc(&mse[cut..]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exps() -> Vec<u32> {
        (3..=14).collect()
    }

    #[test]
    fn flattening_examples() {
        let ml = [1.0186, 1.1612, 1.0402, 0.6740, 0.3274, 0.1241, 0.0370, 0.0105, 0.0030, 0.0009, 0.0003, 0.0001];
        assert_eq!(flattening_point(&ml, &exps(), 0.1), Fp::Converged(8));
        let b = [1.0439, 1.149, 0.5166, 0.0477, 0.4098, 0.7663, 0.6473, 0.3188, 0.1154, 0.0366, 0.0115, 0.0039];
        assert_eq!(flattening_point(&b, &exps(), 0.1), Fp::Converged(11));
    }

    #[test]
    fn flattening_edge_cases() {
        let e = [3, 4, 5];
        assert_eq!(flattening_point(&[0.5, 0.5, 0.5], &e, 0.1), Fp::Converged(3));
        assert_eq!(flattening_point(&[5.0, 3.0, 1.0], &e, 0.1), Fp::NotConverged);
        assert_eq!(flattening_point(&[0.5, 0.5, f64::NAN], &e, 0.1), Fp::NotConverged);
        assert_eq!(flattening_point(&[f64::NAN; 3], &e, 0.1), Fp::NotConverged);
        assert_eq!(flattening_point(&[f64::NAN, 0.5, 0.5], &e, 0.1), Fp::Converged(4));
        assert_eq!(flattening_point(&[0.5], &[3], 0.1), Fp::NotConverged);
    }

    #[test]
    fn norms_and_slopes() {
        let cs: Vec<Fp> = [9, 9, 10, 9, 10, 12].into_iter().map(Fp::Converged).collect();
        let (_, l2) = slope_and_norm(&cs, 15);
        assert!((l2 - 587f64.sqrt()).abs() < 1e-12);

        let mut mm: Vec<Fp> = [9, 9, 11, 13].into_iter().map(Fp::Converged).collect();
        mm.extend([Fp::NotConverged, Fp::NotConverged]);
        let (_, l2) = slope_and_norm(&mm, 15);
        assert!((l2 - 902f64.sqrt()).abs() < 1e-12);

        let cw: Vec<Fp> = [6, 7, 9, 10, 12, 13].into_iter().map(Fp::Converged).collect();
        let (slope, _) = slope_and_norm(&cw, 15);
        assert!((slope - 1.457_142_857_142_857).abs() < 1e-12);
    }

    #[test]
    fn ratios() {
        assert_eq!(ratio(Fp::Converged(9), 16384), Some(0.03));
        assert_eq!(ratio(Fp::Converged(13), 262144), Some(0.03));
        assert_eq!(ratio(Fp::Converged(7), 256), Some(0.5));
        assert_eq!(ratio(Fp::NotConverged, 256), None);
    }

    #[test]
    fn auc_examples() {
        let cs = [1.9331, 0.4205, 0.284, 0.0856, 0.0256, 0.0073, 0.0055, 0.0024, 0.0009, 0.0006, 0.0004, 0.0002];
        assert!((auc(&cs) - 1.7994).abs() < 1e-4);
        assert_eq!(auc(&[0.25; 12]), 11.0 * 0.25);
        assert!(auc(&[1.0, f64::NAN, 1.0]).is_nan());
    }

    #[test]
    fn auc_split() {
        let v = [4.0, 2.0, 1.0, 0.5, 0.25];
        let e = [3, 4, 5, 6, 7];
        assert_eq!(auc_filtered(&v, &e, 3), (0.0, auc(&v)));
        assert_eq!(auc_filtered(&v, &e, 7), (auc(&v), 0.0));
        let (lo, hi) = auc_filtered(&v, &e, 5);
        assert_eq!(lo, 3.0 + 1.5);
        assert_eq!(hi, 0.75 + 0.375);
    }
}
