//! The eighteen entropy estimators, each mapping a [`CountHistogram`] to an
//! estimate in nats.
//!
//! The first ten ([`EstimatorId::frequentist`]) work from the counts alone.
//! The Bayesian family (Dirichlet plug-ins, NSB, PYM) optionally take the
//! alphabet size `K`; without it they assume the observed support.

mod bayesian;
mod frequentist;

use std::fmt;
use std::str::FromStr;

pub use bayesian::{
    ansb, dirichlet_plugin, jeffreys, laplace, minimax, nsb, pym, schurmann_grassberger,
    DEFAULT_BAY_ALPHA,
};
pub use frequentist::{
    bonachela, chao_shen, chao_wang_jost, grassberger_03, grassberger_88, maximum_likelihood,
    miller_madow, schurmann, shrink, zhang, DEFAULT_SCHURMANN_XI,
};

use crate::counts::CountHistogram;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorId {
    ML,
    MM,
    GSB88,
    GSB03,
    SHU,
    CS,
    Z,
    SHR,
    B,
    CW,
    PYM,
    BAY,
    LAP,
    JEF,
    SG,
    MIN,
    NSB,
    ANSB,
}

impl EstimatorId {
    /// All estimators, in table order.
    pub const ALL: [EstimatorId; 18] = [
        EstimatorId::ML,
        EstimatorId::MM,
        EstimatorId::GSB88,
        EstimatorId::GSB03,
        EstimatorId::SHU,
        EstimatorId::CS,
        EstimatorId::Z,
        EstimatorId::SHR,
        EstimatorId::B,
        EstimatorId::CW,
        EstimatorId::PYM,
        EstimatorId::BAY,
        EstimatorId::LAP,
        EstimatorId::JEF,
        EstimatorId::SG,
        EstimatorId::MIN,
        EstimatorId::NSB,
        EstimatorId::ANSB,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorId::ML => "ML",
            EstimatorId::MM => "MM",
            EstimatorId::GSB88 => "GSB88",
            EstimatorId::GSB03 => "GSB03",
            EstimatorId::SHU => "SHU",
            EstimatorId::CS => "CS",
            EstimatorId::Z => "Z",
            EstimatorId::SHR => "SHR",
            EstimatorId::B => "B",
            EstimatorId::CW => "CW",
            EstimatorId::PYM => "PYM",
            EstimatorId::BAY => "BAY",
            EstimatorId::LAP => "LAP",
            EstimatorId::JEF => "JEF",
            EstimatorId::SG => "SG",
            EstimatorId::MIN => "MIN",
            EstimatorId::NSB => "NSB",
            EstimatorId::ANSB => "ANSB",
        }
    }

    pub fn is_frequentist(self) -> bool {
        Self::ALL[..10].contains(&self)
    }

    pub fn frequentist() -> &'static [EstimatorId] {
        &Self::ALL[..10]
    }

    /// Whether the estimator reads the alphabet size `K`.
    pub fn uses_alphabet_size(self) -> bool {
        matches!(
            self,
            EstimatorId::SHR
                | EstimatorId::BAY
                | EstimatorId::LAP
                | EstimatorId::JEF
                | EstimatorId::SG
                | EstimatorId::MIN
                | EstimatorId::NSB
        )
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        let id = match upper.as_str() {
            "J" => EstimatorId::JEF,
            "BN" => EstimatorId::B,
            "GS88" => EstimatorId::GSB88,
            "GS03" => EstimatorId::GSB03,
            other => *Self::ALL
                .iter()
                .find(|id| id.as_str() == other)
                .ok_or_else(|| Error::Parameter(format!("unknown estimator '{s}'")))?,
        };
        Ok(id)
    }
}

/// Which estimator to run, with its optional parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorSpec {
    pub id: EstimatorId,
    /// Dirichlet concentration for BAY.
    pub alpha: Option<f64>,
    /// Schürmann parameter for SHU.
    pub xi: Option<f64>,
    /// Assumed alphabet size.
    pub k: Option<u64>,
}

impl EstimatorSpec {
    pub fn new(id: EstimatorId) -> Self {
        Self { id, alpha: None, xi: None, k: None }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = Some(xi);
        self
    }

    pub fn with_k(mut self, k: u64) -> Self {
        self.k = Some(k);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Parameter(format!("alpha must be positive, got {a}")));
            }
        }
        if let Some(xi) = self.xi {
            if !(xi > 0.0 && xi.is_finite()) {
                return Err(Error::Parameter(format!("xi must be positive, got {xi}")));
            }
        }
        if self.k == Some(0) {
            return Err(Error::Parameter("K must be at least 1".into()));
        }
        Ok(())
    }
}

impl From<EstimatorId> for EstimatorSpec {
    fn from(id: EstimatorId) -> Self {
        Self::new(id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate {
    /// Nats. NaN or +∞ are possible for PYM and ANSB on degenerate data.
    pub value: f64,
    pub estimator: EstimatorSpec,
}

/// Runs the estimator selected by `spec` on `h`.
pub fn estimate(h: &CountHistogram, spec: &EstimatorSpec) -> Result<EntropyEstimate> {
    spec.validate()?;
    let value = match spec.id {
        EstimatorId::ML => maximum_likelihood(h),
        EstimatorId::MM => miller_madow(h),
        EstimatorId::GSB88 => grassberger_88(h),
        EstimatorId::GSB03 => grassberger_03(h),
        EstimatorId::SHU => schurmann(h, spec.xi.unwrap_or(DEFAULT_SCHURMANN_XI))?,
        EstimatorId::CS => chao_shen(h),
        EstimatorId::Z => zhang(h),
        EstimatorId::SHR => shrink(h, spec.k)?,
        EstimatorId::B => bonachela(h),
        EstimatorId::CW => chao_wang_jost(h),
        EstimatorId::PYM => pym(h)?,
        EstimatorId::BAY => dirichlet_plugin(h, spec.alpha.unwrap_or(DEFAULT_BAY_ALPHA), spec.k)?,
        EstimatorId::LAP => laplace(h, spec.k)?,
        EstimatorId::JEF => jeffreys(h, spec.k)?,
        EstimatorId::SG => schurmann_grassberger(h, spec.k)?,
        EstimatorId::MIN => minimax(h, spec.k)?,
        EstimatorId::NSB => nsb(h, spec.k)?,
        EstimatorId::ANSB => ansb(h),
    };
    Ok(EntropyEstimate { value, estimator: *spec })
}

/// Shorthand for `estimate(h, spec)?.value`.
pub fn entropy(h: &CountHistogram, spec: &EstimatorSpec) -> Result<f64> {
    estimate(h, spec).map(|e| e.value)
}

/// Resolves the alphabet size, defaulting to the observed support.
pub(crate) fn alphabet_size(h: &CountHistogram, k: Option<u64>) -> Result<u64> {
    let m = h.support() as u64;
    match k {
        None => Ok(m),
        Some(k) if k < m => Err(Error::Parameter(format!(
            "alphabet size K = {k} is smaller than the observed support {m}"
        ))),
        Some(k) => Ok(k),
    }
}
