//! Entropy, mutual information and conditional mutual information estimation
//! from discrete count data, with a synthetic benchmark harness.

pub mod bench;
pub mod counts;
pub mod error;
pub mod estimators;
pub mod io;
pub mod qif;
pub mod shannon;
pub mod special;
pub mod synth;

pub use counts::{CountHistogram, JointHistogram, MultiplicityProfile};
pub use error::{Error, Result};
pub use estimators::{entropy, estimate, EntropyEstimate, EstimatorId, EstimatorSpec};
pub use shannon::{conditional_mutual_information, measure_estimate, mutual_information, EntropyTerms};
pub use synth::{GroundTruthScenario, Level, Measure};
