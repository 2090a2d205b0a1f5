//! Leakage of a secret side through a triangle classifier: the CMI between the
//! secret input and the output, given the two public inputs.

use std::ops::RangeInclusive;

use rand::Rng;

use crate::counts::JointHistogram;
use crate::error::{Error, Result};
use crate::estimators::EstimatorId;
use crate::shannon::{AlphabetPolicy, EntropyTerms};
use crate::synth::{rng_from_seed, Measure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriangleType {
    Equilateral,
    Isosceles,
    Scalene,
}

impl TriangleType {
    fn id(self) -> u32 {
        self as u32
    }
}

pub fn type_of(high: i64, low1: i64, low2: i64) -> TriangleType {
    if high == low1 && low1 == low2 {
        TriangleType::Equilateral
    } else if high == low1 || high == low2 || low1 == low2 {
        TriangleType::Isosceles
    } else {
        TriangleType::Scalene
    }
}

/// Input ranges of the three sides, each drawn uniformly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleInputs {
    pub high: RangeInclusive<i64>,
    pub low1: RangeInclusive<i64>,
    pub low2: RangeInclusive<i64>,
}

impl Default for TriangleInputs {
    fn default() -> Self {
        Self::uniform(1..=100)
    }
}

impl TriangleInputs {
    pub fn uniform(r: RangeInclusive<i64>) -> Self {
        Self { high: r.clone(), low1: r.clone(), low2: r }
    }

    fn validate(&self) -> Result<()> {
        for r in [&self.high, &self.low1, &self.low2] {
            if r.is_empty() {
                return Err(Error::Parameter(format!("empty input range {r:?}")));
            }
        }
        Ok(())
    }
}

fn width(r: &RangeInclusive<i64>) -> u64 {
    (r.end() - r.start()) as u64 + 1
}

/// `n` random runs as a (high, output, (low1, low2)) histogram with the full
/// input domain declared.
pub fn triangle_sample(n: u64, seed: u64, inputs: &TriangleInputs) -> Result<JointHistogram> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    inputs.validate()?;
    let mut rng = rng_from_seed(seed);
    let w2 = width(&inputs.low2);
    let runs = (0..n).map(|_| {
        let h = rng.random_range(inputs.high.clone());
        let l1 = rng.random_range(inputs.low1.clone());
        let l2 = rng.random_range(inputs.low2.clone());
        let z = (l1 - inputs.low1.start()) as u64 * w2 + (l2 - inputs.low2.start()) as u64;
        (vec![(h - inputs.high.start()) as u32, type_of(h, l1, l2).id(), z as u32], 1)
    });
    let dims = vec![width(&inputs.high), 3, width(&inputs.low1) * w2];
    JointHistogram::from_cells(3, runs.collect::<Vec<_>>())?.with_dims(dims)
}

/// Exact leakage under uniform inputs. The output is a function of all three
/// sides, so the CMI equals H(output | low1, low2).
pub fn exact_triangle_cmi(inputs: &TriangleInputs) -> Result<f64> {
    inputs.validate()?;
    let nh = width(&inputs.high) as f64;
    let pairs = (width(&inputs.low1) * width(&inputs.low2)) as f64;
    let mut total = 0.0;
    for l1 in inputs.low1.clone() {
        for l2 in inputs.low2.clone() {
            let mut tally = [0u64; 3];
            for h in inputs.high.clone() {
                tally[type_of(h, l1, l2).id() as usize] += 1;
            }
            let h_y: f64 = tally
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| {
                    let p = c as f64 / nh;
                    -p * p.ln()
                })
                .sum();
            total += h_y;
        }
    }
    Ok(total / pairs)
}

/// Estimators compared by the triangle demo.
pub const TRIANGLE_ESTIMATORS: [EstimatorId; 4] =
    [EstimatorId::ML, EstimatorId::CS, EstimatorId::SHR, EstimatorId::B];

/// CMI estimates of the leakage from one batch of `n` runs. Estimators that
/// take an alphabet size see the observed support of each term.
pub fn triangle_report(n: u64, seed: u64, inputs: &TriangleInputs) -> Result<Vec<(EstimatorId, f64)>> {
    let joint = triangle_sample(n, seed, inputs)?;
    let terms = EntropyTerms::with_policy(&joint, Measure::CMI, AlphabetPolicy::Observed)?;
    TRIANGLE_ESTIMATORS.iter().map(|&id| Ok((id, terms.estimate(&id.into())?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifier() {
        assert_eq!(type_of(3, 3, 3), TriangleType::Equilateral);
        assert_eq!(type_of(2, 2, 3), TriangleType::Isosceles);
        assert_eq!(type_of(3, 2, 3), TriangleType::Isosceles);
        assert_eq!(type_of(4, 2, 2), TriangleType::Isosceles);
        assert_eq!(type_of(4, 2, 3), TriangleType::Scalene);
    }

    #[test]
    fn constant_secret_leaks_nothing_under_ml() {
        let inputs = TriangleInputs { high: 7..=7, low1: 1..=100, low2: 1..=100 };
        let r = triangle_report(500, 1, &inputs).unwrap();
        assert_eq!(r[0].0, EstimatorId::ML);
        assert!(r[0].1.abs() < 1e-12);
        assert_eq!(exact_triangle_cmi(&inputs).unwrap(), 0.0);
    }

    #[test]
    fn exact_leakage_small_domain() {
        // sides in {1, 2}: output is scalene-free; for low1 == low2 the output
        // is Equilateral or Isosceles with equal odds, otherwise always Isosceles
        let inputs = TriangleInputs::uniform(1..=2);
        let want = 0.5 * std::f64::consts::LN_2;
        assert!((exact_triangle_cmi(&inputs).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn sample_shape() {
        let j = triangle_sample(500, 3, &TriangleInputs::default()).unwrap();
        assert_eq!(j.total(), 500);
        assert_eq!(j.dims(), Some(&[100, 3, 10_000][..]));
    }

    #[test]
    fn empty_range_is_rejected() {
        #[allow(clippy::reversed_empty_ranges)]
        let inputs = TriangleInputs { high: 5..=4, low1: 1..=3, low2: 1..=3 };
        assert!(triangle_sample(10, 0, &inputs).is_err());
    }
}
