//! Mutual information and conditional mutual information as sums of entropy
//! estimates on marginals of a joint histogram.
//!
//! No clamping is applied: a negative or non-finite estimate is returned as
//! computed, so estimator bias stays visible.

use crate::counts::{CountHistogram, JointHistogram};
use crate::error::{Error, Result};
use crate::estimators::{entropy, EstimatorId, EstimatorSpec};
use crate::synth::Measure;

/// Where the alphabet size `K` of each entropy term comes from, for estimators
/// that use one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphabetPolicy {
    /// Product of the kept axes' dimensions when the histogram declares them,
    /// else the observed support.
    #[default]
    Domain,
    /// Always the observed support of the term.
    Observed,
}

/// Entropy of the marginal of `joint` over `axes`. For estimators that use an
/// alphabet size, `K` is the product of the known dimensions of `axes`.
pub fn marginal_entropy(joint: &JointHistogram, axes: &[usize], spec: &EstimatorSpec) -> Result<f64> {
    let marginal = joint.marginalize(axes)?;
    entropy(&marginal.to_counts(), &with_domain(spec, marginal.domain_size()))
}

fn with_domain(spec: &EstimatorSpec, k: Option<u64>) -> EstimatorSpec {
    let mut spec = *spec;
    if spec.id.uses_alphabet_size() && spec.k.is_none() {
        spec.k = k;
    }
    spec
}

/// The signed entropy terms of H, MI or CMI, marginalized once so that many
/// estimators can be evaluated on the same sample.
#[derive(Debug, Clone)]
pub struct EntropyTerms {
    terms: Vec<(f64, CountHistogram, Option<u64>)>,
}

impl EntropyTerms {
    pub fn new(joint: &JointHistogram, measure: Measure) -> Result<Self> {
        Self::with_policy(joint, measure, AlphabetPolicy::Domain)
    }

    pub fn with_policy(joint: &JointHistogram, measure: Measure, policy: AlphabetPolicy) -> Result<Self> {
        if joint.arity() != measure.arity() {
            return Err(Error::Dimension(format!(
                "{measure} needs a {}-axis histogram, got {} axes",
                measure.arity(),
                joint.arity()
            )));
        }
        const MI_TERMS: &[(f64, &[usize])] = &[(1.0, &[0]), (1.0, &[1]), (-1.0, &[0, 1])];
        let layout: &[(f64, &[usize])] = match measure {
            Measure::H => &[(1.0, &[0])],
            Measure::MI => MI_TERMS,
            // a single observed z conditions on nothing: use the MI of the XY marginal
            Measure::CMI if joint.marginalize(&[2])?.occupied() == 1 => {
                return Self::with_policy(&joint.marginalize(&[0, 1])?, Measure::MI, policy);
            }
            Measure::CMI => &[(1.0, &[0, 2]), (1.0, &[1, 2]), (-1.0, &[0, 1, 2]), (-1.0, &[2])],
        };
        let terms = layout
            .iter()
            .map(|&(sign, axes)| {
                let m = joint.marginalize(axes)?;
                let k = match policy {
                    AlphabetPolicy::Domain => m.domain_size(),
                    AlphabetPolicy::Observed => None,
                };
                Ok((sign, m.to_counts(), k))
            })
            .collect::<Result<_>>()?;
        Ok(Self { terms })
    }

    pub fn estimate(&self, spec: &EstimatorSpec) -> Result<f64> {
        let mut out = 0.0;
        for (sign, h, k) in &self.terms {
            out += sign * entropy(h, &with_domain(spec, *k))?;
        }
        Ok(out)
    }

    /// Estimates with every id in `ids`, in order.
    pub fn estimate_all(&self, ids: &[EstimatorId]) -> Result<Vec<f64>> {
        ids.iter().map(|&id| self.estimate(&id.into())).collect()
    }
}

/// Estimate of `measure` on a histogram of matching arity.
pub fn measure_estimate(joint: &JointHistogram, measure: Measure, spec: &EstimatorSpec) -> Result<f64> {
    EntropyTerms::new(joint, measure)?.estimate(spec)
}

/// Î(X;Y) = Ĥ(X) + Ĥ(Y) − Ĥ(X,Y) on a two-axis histogram.
pub fn mutual_information(joint: &JointHistogram, spec: &EstimatorSpec) -> Result<f64> {
    measure_estimate(joint, Measure::MI, spec)
}

/// Î(X;Y|Z) = Ĥ(X,Z) + Ĥ(Y,Z) − Ĥ(X,Y,Z) − Ĥ(Z) on a three-axis histogram
/// ordered (X, Y, Z). When only one z is observed this is Î(X;Y) of the XY
/// marginal.
pub fn conditional_mutual_information(joint: &JointHistogram, spec: &EstimatorSpec) -> Result<f64> {
    measure_estimate(joint, Measure::CMI, spec)
}
