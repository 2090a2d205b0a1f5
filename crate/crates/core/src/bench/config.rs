use std::path::Path;

use crate::error::{Error, Result};
use crate::estimators::EstimatorId;
use crate::shannon::AlphabetPolicy;
use crate::synth::{Level, Measure};

/// Domain sizes of the full-scale grid.
pub const FULL_K_GRID: [usize; 6] = [256, 1024, 4096, 16384, 65536, 262144];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub measures: Vec<Measure>,
    pub k_grid: Vec<usize>,
    /// Sample sizes; each must be a power of two.
    pub n_grid: Vec<u64>,
    pub repetitions: u32,
    pub gt_levels: Vec<Level>,
    pub estimators: Vec<EstimatorId>,
    pub master_seed: u64,
    pub flattening_bound: f64,
    pub penalty_exponent: u32,
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
    /// Opts in to domain sizes above 4096.
    pub full_scale: bool,
    /// Alphabet size handed to the Bayesian estimators.
    pub alphabet: AlphabetPolicy,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            measures: vec![Measure::MI],
            k_grid: vec![256],
            n_grid: (3..=14).map(|e| 1u64 << e).collect(),
            repetitions: 200,
            gt_levels: Level::ALL.to_vec(),
            estimators: EstimatorId::ALL.to_vec(),
            master_seed: 0,
            flattening_bound: 0.1,
            penalty_exponent: 15,
            threads: None,
            full_scale: false,
            alphabet: AlphabetPolicy::Observed,
        }
    }
}

impl ExperimentConfig {
    /// The full grid: every measure, every domain size in FULL_K_GRID, 1000 repetitions.
    pub fn full() -> Self {
        Self {
            measures: Measure::ALL.to_vec(),
            k_grid: FULL_K_GRID.to_vec(),
            repetitions: 1000,
            full_scale: true,
            ..Self::default()
        }
    }

    /// Exponents log2(N) of the sample-size grid.
    pub fn exponents(&self) -> Vec<u32> {
        self.n_grid.iter().map(|n| n.trailing_zeros()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        if self.measures.is_empty() || self.gt_levels.is_empty() || self.estimators.is_empty() {
            return bad("measures, gt_levels and estimators must be nonempty".into());
        }
        if self.k_grid.is_empty() || self.n_grid.is_empty() {
            return bad("k_grid and n_grid must be nonempty".into());
        }
        if !self.k_grid.windows(2).all(|w| w[0] < w[1]) || !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return bad("k_grid and n_grid must be strictly ascending".into());
        }
        if let Some(k) = self.k_grid.iter().find(|k| !k.is_power_of_two() || **k < 8) {
            return bad(format!("domain size {k} must be a power of two of at least 8"));
        }
        if let Some(n) = self.n_grid.iter().find(|n| !n.is_power_of_two()) {
            return bad(format!("sample size {n} must be a power of two"));
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if !(self.flattening_bound > 0.0) {
            return bad(format!("flattening_bound must be positive, got {}", self.flattening_bound));
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        if !self.full_scale && self.k_grid.iter().any(|&k| k > 4096) {
            return bad("domain sizes above 4096 need full_scale = true".into());
        }
        Ok(())
    }

    /// Parses the flat `key = value` format. Lists are comma separated; `#`
    /// starts a comment. `master_seed` is required.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen_seed = false;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("expected 'key = value', got '{line}'"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let err = |msg: String| Error::Parse { line: line_no, msg };
            match key {
                "measures" => cfg.measures = list(value, line_no)?,
                "k_grid" => cfg.k_grid = list(value, line_no)?,
                "n_grid" => cfg.n_grid = list(value, line_no)?,
                "repetitions" => cfg.repetitions = scalar(value, line_no)?,
                "gt_levels" => cfg.gt_levels = list(value, line_no)?,
                "estimators" => {
                    cfg.estimators = if value.eq_ignore_ascii_case("all") {
                        EstimatorId::ALL.to_vec()
                    } else {
                        list(value, line_no)?
                    }
                }
                "master_seed" => {
                    cfg.master_seed = scalar(value, line_no)?;
                    seen_seed = true;
                }
                "flattening_bound" => cfg.flattening_bound = scalar(value, line_no)?,
                "penalty_exponent" => cfg.penalty_exponent = scalar(value, line_no)?,
                "threads" => {
                    cfg.threads = if value.eq_ignore_ascii_case("auto") {
                        None
                    } else {
                        Some(scalar(value, line_no)?)
                    }
                }
                "full_scale" => cfg.full_scale = scalar(value, line_no)?,
                "alphabet" => {
                    cfg.alphabet = match value.to_ascii_lowercase().as_str() {
                        "observed" => AlphabetPolicy::Observed,
                        "domain" => AlphabetPolicy::Domain,
                        _ => return Err(err(format!("alphabet must be 'observed' or 'domain', got '{value}'"))),
                    }
                }
                other => return Err(err(format!("unknown key '{other}'"))),
            }
        }
        if !seen_seed {
            return Err(Error::Parameter("config must set master_seed".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Renders the config in the format read by [`ExperimentConfig::parse`].
    pub fn to_text(&self) -> String {
        fn join<T: ToString>(v: &[T]) -> String {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        }
        let threads = self.threads.map_or("auto".to_string(), |t| t.to_string());
        format!(
            "measures = {}\nk_grid = {}\nn_grid = {}\nrepetitions = {}\ngt_levels = {}\n\
             estimators = {}\nmaster_seed = {}\nflattening_bound = {}\npenalty_exponent = {}\n\
             threads = {}\nfull_scale = {}\nalphabet = {}\n",
            join(&self.measures),
            join(&self.k_grid),
            join(&self.n_grid),
            self.repetitions,
            join(&self.gt_levels),
            join(&self.estimators),
            self.master_seed,
            self.flattening_bound,
            self.penalty_exponent,
            threads,
            self.full_scale,
            match self.alphabet {
                AlphabetPolicy::Observed => "observed",
                AlphabetPolicy::Domain => "domain",
            }
        )
    }
}

fn scalar<T: std::str::FromStr>(value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse { line, msg: format!("invalid value '{value}'") })
}

fn list<T: std::str::FromStr>(value: &str, line: usize) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| scalar(s, line))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let cfg = ExperimentConfig {
            measures: vec![Measure::H, Measure::CMI],
            k_grid: vec![256, 1024],
            n_grid: vec![8, 16, 32],
            repetitions: 7,
            estimators: vec![EstimatorId::ML, EstimatorId::CS],
            master_seed: 42,
            threads: Some(3),
            alphabet: AlphabetPolicy::Domain,
            ..ExperimentConfig::default()
        };
        assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn comments_and_defaults() {
        let cfg = ExperimentConfig::parse("# desk run\nmaster_seed = 5 # fixed\nestimators = all\n").unwrap();
        assert_eq!(cfg.master_seed, 5);
        assert_eq!(cfg.estimators.len(), 18);
        assert_eq!(cfg.exponents(), (3..=14).collect::<Vec<_>>());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = ExperimentConfig::parse("master_seed = 1\nrepetitions = many\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = ExperimentConfig::parse("master_seed = 1\nbogus = 3\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn seed_is_required() {
        assert!(ExperimentConfig::parse("repetitions = 3\n").is_err());
    }

    #[test]
    fn invalid_grids_are_rejected() {
        assert!(ExperimentConfig::parse("master_seed = 1\nn_grid = 16, 8\n").is_err());
        assert!(ExperimentConfig::parse("master_seed = 1\nk_grid = 100\n").is_err());
        assert!(ExperimentConfig::parse("master_seed = 1\nk_grid = 16384\n").is_err());
        assert!(ExperimentConfig::parse("master_seed = 1\nk_grid = 16384\nfull_scale = true\n").is_ok());
        assert!(ExperimentConfig::parse("master_seed = 1\nflattening_bound = 0\n").is_err());
    }
}
