//! Random ground-truth distributions with a controlled amount of entropy,
//! mutual information or conditional mutual information, and i.i.d. sampling
//! from them.
//!
//! Entropy targets are reached by tuning the concentration of a symmetric
//! Dirichlet draw. Dependence targets mix a deterministic coupling
//! `y = σ(x mod n_y)` with the product of its marginals, and tune the mixing
//! weight λ.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::counts::{CountHistogram, JointHistogram};
use crate::error::{Error, Result};
use crate::special::digamma;

/// Attempts before a generator gives up on a band.
pub const MAX_ATTEMPTS: usize = 1000;

const NORM_TOL: f64 = 1e-12;

/// Symmetric Dirichlet concentration of the marginals drawn for MI and CMI
/// joints.
pub const MARGINAL_CONCENTRATION: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    H,
    MI,
    CMI,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::H, Measure::MI, Measure::CMI];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::H => "H",
            Measure::MI => "MI",
            Measure::CMI => "CMI",
        }
    }

    /// Number of variables in the underlying joint.
    pub fn arity(self) -> usize {
        match self {
            Measure::H => 1,
            Measure::MI => 2,
            Measure::CMI => 3,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "H" => Ok(Measure::H),
            "MI" => Ok(Measure::MI),
            "CMI" => Ok(Measure::CMI),
            _ => Err(Error::Parameter(format!("unknown measure '{s}' (expected H, MI or CMI)"))),
        }
    }
}

/// Ground-truth level: small, medium or large relative to the maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    S,
    M,
    L,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::S, Level::M, Level::L];

    /// Band as fractions of the measure's maximum.
    pub fn fractions(self) -> (f64, f64) {
        match self {
            Level::S => (0.0, 0.15),
            Level::M => (0.35, 0.65),
            Level::L => (0.85, 1.0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Level::S => "S",
            Level::M => "M",
            Level::L => "L",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "S" => Ok(Level::S),
            "M" => Ok(Level::M),
            "L" => Ok(Level::L),
            _ => Err(Error::Parameter(format!("unknown level '{s}' (expected S, M or L)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundTruthScenario {
    pub level: Level,
    pub measure: Measure,
}

impl GroundTruthScenario {
    pub fn new(measure: Measure, level: Level) -> Self {
        Self { level, measure }
    }

    /// The closed target interval for a measure whose maximum is `max`.
    pub fn band(&self, max: f64) -> (f64, f64) {
        let (lo, hi) = self.level.fractions();
        (lo * max, hi * max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePmf {
    probs: Vec<f64>,
}

impl DiscretePmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        validate_probs(&probs)?;
        Ok(Self { probs })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Dimension("empty domain".into()));
        }
        Ok(Self { probs: vec![1.0 / k as f64; k] })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    /// `index,prob` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,prob\n");
        for (i, p) in self.probs.iter().enumerate() {
            let _ = writeln!(out, "{i},{p:e}");
        }
        out
    }
}

/// Dense row-major probability table over two or three variables.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&dims.len()) || dims.contains(&0) {
            return Err(Error::Dimension(format!("invalid joint dims {dims:?}")));
        }
        let k: usize = dims.iter().product();
        if k != probs.len() {
            return Err(Error::Dimension(format!(
                "dims {dims:?} need {k} cells, got {}",
                probs.len()
            )));
        }
        validate_probs(&probs)?;
        Ok(Self { dims, probs })
    }

    pub fn product(p: &DiscretePmf, q: &DiscretePmf) -> Self {
        let probs = p.probs.iter().flat_map(|&a| q.probs.iter().map(move |&b| a * b)).collect();
        Self { dims: vec![p.k(), q.k()], probs }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn arity(&self) -> usize {
        self.dims.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    /// Marginal over the kept `axes` (in the given order).
    pub fn marginal(&self, axes: &[usize]) -> Result<JointPmf> {
        if axes.is_empty() || axes.iter().any(|&a| a >= self.arity()) {
            return Err(Error::Dimension(format!("bad axes {axes:?} for arity {}", self.arity())));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].contains(a) {
                return Err(Error::Dimension(format!("duplicate axis {a}")));
            }
        }
        let dims: Vec<usize> = axes.iter().map(|&a| self.dims[a]).collect();
        let mut out = vec![0.0; dims.iter().product()];
        let mut idx = vec![0usize; self.arity()];
        for &p in &self.probs {
            let mut flat = 0;
            for &a in axes {
                flat = flat * self.dims[a] + idx[a];
            }
            out[flat] += p;
            for ax in (0..idx.len()).rev() {
                idx[ax] += 1;
                if idx[ax] < self.dims[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        Ok(JointPmf { dims, probs: out })
    }

    pub fn flatten(&self) -> DiscretePmf {
        DiscretePmf { probs: self.probs.clone() }
    }

    /// `x,y[,z],prob` lines with a header.
    pub fn to_csv(&self) -> String {
        let names = ["x", "y", "z"];
        let mut out = names[..self.arity()].join(",");
        out.push_str(",prob\n");
        let mut idx = vec![0usize; self.arity()];
        for &p in &self.probs {
            for i in &idx {
                let _ = write!(out, "{i},");
            }
            let _ = writeln!(out, "{p:e}");
            for ax in (0..idx.len()).rev() {
                idx[ax] += 1;
                if idx[ax] < self.dims[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        out
    }
}

fn validate_probs(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::Dimension("empty domain".into()));
    }
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::Parameter("probabilities must be finite and nonnegative".into()));
    }
    let s: f64 = probs.iter().sum();
    if (s - 1.0).abs() > NORM_TOL {
        return Err(Error::Parameter(format!("probabilities sum to {s}, not 1")));
    }
    Ok(())
}

fn entropy_of(probs: &[f64]) -> f64 {
    let h: f64 = probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum();
    h.max(0.0)
}

pub fn exact_entropy(p: &DiscretePmf) -> f64 {
    entropy_of(&p.probs)
}

pub fn exact_joint_entropy(j: &JointPmf, axes: &[usize]) -> Result<f64> {
    Ok(entropy_of(&j.marginal(axes)?.probs))
}

/// I(X;Y) = H(X) + H(Y) − H(X,Y).
pub fn exact_mi(j: &JointPmf) -> Result<f64> {
    if j.arity() != 2 {
        return Err(Error::Dimension(format!("MI needs a 2-axis joint, got {}", j.arity())));
    }
    let v = exact_joint_entropy(j, &[0])? + exact_joint_entropy(j, &[1])? - entropy_of(&j.probs);
    Ok(v.max(0.0))
}

/// I(X;Y|Z) = H(X,Z) + H(Y,Z) − H(X,Y,Z) − H(Z).
pub fn exact_cmi(j: &JointPmf) -> Result<f64> {
    if j.arity() != 3 {
        return Err(Error::Dimension(format!("CMI needs a 3-axis joint, got {}", j.arity())));
    }
    let v = exact_joint_entropy(j, &[0, 2])? + exact_joint_entropy(j, &[1, 2])?
        - entropy_of(&j.probs)
        - exact_joint_entropy(j, &[2])?;
    Ok(v.max(0.0))
}

/// Exact value of `measure` on `j` (an arity-1 joint for H).
pub fn exact_measure(j: &JointPmf, measure: Measure) -> Result<f64> {
    match measure {
        Measure::H => Ok(entropy_of(&j.probs)),
        Measure::MI => exact_mi(j),
        Measure::CMI => exact_cmi(j),
    }
}

/// Splits a power-of-two domain size into `arity` power-of-two dimensions as
/// evenly as possible, larger dimensions first.
pub fn split_dims(k: usize, arity: usize) -> Result<Vec<usize>> {
    if !(1..=3).contains(&arity) {
        return Err(Error::Dimension(format!("arity {arity} is not 1, 2 or 3")));
    }
    if !k.is_power_of_two() || k.trailing_zeros() < arity as u32 - 1 {
        return Err(Error::Dimension(format!(
            "k = {k} cannot be split into {arity} power-of-two dimensions"
        )));
    }
    let e = k.trailing_zeros() as usize;
    let base = e / arity;
    let extra = e % arity;
    Ok((0..arity).map(|i| 1usize << (base + usize::from(i < extra))).collect())
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a master seed and cell coordinates.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix(master), |acc, &p| mix(acc ^ mix(p)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric Dirichlet(c) draw. Small shapes are sampled in log space so that
/// the gamma variates do not underflow to zero.
fn dirichlet<R: Rng + ?Sized>(rng: &mut R, k: usize, c: f64) -> Vec<f64> {
    let logs: Vec<f64> = if c >= 1.0 {
        let g = Gamma::new(c, 1.0).expect("positive shape");
        (0..k).map(|_| g.sample(rng).ln()).collect()
    } else {
        // G(c) = G(c + 1)·U^{1/c}
        let g = Gamma::new(c + 1.0, 1.0).expect("positive shape");
        (0..k)
            .map(|_| {
                let u: f64 = rng.random::<f64>();
                g.sample(rng).ln() + (1.0 - u).ln() / c
            })
            .collect()
    };
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = logs.iter().map(|&l| (l - top).exp()).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    p
}

/// Expected entropy of a symmetric Dirichlet(c) pmf on k cells.
fn dirichlet_mean_entropy(k: usize, c: f64) -> f64 {
    digamma(k as f64 * c + 1.0) - digamma(c + 1.0)
}

/// Concentration whose expected entropy equals `target`, by bisection in ln c.
fn concentration_for(k: usize, target: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dirichlet_mean_entropy(k, mid.exp()) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

fn in_band(v: f64, band: (f64, f64)) -> bool {
    v >= band.0 && v <= band.1
}

/// A random pmf on `k` cells whose entropy lies in the scenario band
/// (relative to ln k).
pub fn generate_pmf(k: usize, scenario: GroundTruthScenario, seed: u64) -> Result<DiscretePmf> {
    if k < 2 {
        return Err(Error::Dimension(format!("domain size must be at least 2, got {k}")));
    }
    if scenario.measure != Measure::H {
        return Err(Error::Parameter(format!(
            "generate_pmf produces entropy scenarios, got {}",
            scenario.measure
        )));
    }
    let band = scenario.band((k as f64).ln());
    let mut rng = rng_from_seed(seed);
    for _ in 0..MAX_ATTEMPTS {
        let target = rng.random_range(band.0..=band.1);
        let c = concentration_for(k, target);
        let probs = dirichlet(&mut rng, k, c);
        if in_band(entropy_of(&probs), band) {
            return Ok(DiscretePmf { probs });
        }
    }
    Err(Error::Generation { what: format!("{} pmf, k = {k}", scenario.level), attempts: MAX_ATTEMPTS })
}

/// Mixing weight in [0, 1] for which `f(λ)` hits `target`; `f` is increasing.
fn solve_lambda(f: impl Fn(f64) -> f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// λ·coupling + (1 − λ)·product on one (n_x × n_y) slice, scaled by `mass`.
fn mix_slice(px: &[f64], perm: &[usize], ny: usize, lambda: f64, mass: f64, out: &mut [f64]) {
    let mut qy = vec![0.0; ny];
    for (x, &p) in px.iter().enumerate() {
        qy[perm[x % ny]] += p;
    }
    for (x, &p) in px.iter().enumerate() {
        let yc = perm[x % ny];
        for (y, &q) in qy.iter().enumerate() {
            let coupled = if y == yc { p } else { 0.0 };
            out[x * ny + y] = mass * (lambda * coupled + (1.0 - lambda) * p * q);
        }
    }
}

fn permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

/// A random joint over `dims` (two axes for MI, three for CMI) whose exact
/// dependence lies in the scenario band, relative to min(H(X), H(Y)) or its
/// conditional counterpart.
pub fn generate_joint(dims: &[usize], scenario: GroundTruthScenario, seed: u64) -> Result<JointPmf> {
    let arity = scenario.measure.arity();
    if dims.len() != arity || arity < 2 {
        return Err(Error::Dimension(format!(
            "{} needs {arity} dimensions, got {dims:?}",
            scenario.measure
        )));
    }
    if dims.iter().any(|&d| d < 2) {
        return Err(Error::Dimension(format!("every dimension must be at least 2, got {dims:?}")));
    }
    let (nx, ny) = (dims[0], dims[1]);
    let nz = if arity == 3 { dims[2] } else { 1 };
    let mut rng = rng_from_seed(seed);
    let (flo, fhi) = scenario.level.fractions();

    let c = MARGINAL_CONCENTRATION;
    for _ in 0..MAX_ATTEMPTS {
        let pz = if nz > 1 { dirichlet(&mut rng, nz, c) } else { vec![1.0] };
        let slices: Vec<(Vec<f64>, Vec<usize>)> =
            (0..nz).map(|_| (dirichlet(&mut rng, nx, c), permutation(&mut rng, ny))).collect();
        let frac = rng.random_range(flo..=fhi);

        let build = |lambda: f64| -> JointPmf {
            let mut probs = vec![0.0; nx * ny * nz];
            let mut slice = vec![0.0; nx * ny];
            for (z, (px, perm)) in slices.iter().enumerate() {
                mix_slice(px, perm, ny, lambda, pz[z], &mut slice);
                for (xy, &p) in slice.iter().enumerate() {
                    probs[xy * nz + z] = p;
                }
            }
            let s: f64 = probs.iter().sum();
            probs.iter_mut().for_each(|p| *p /= s);
            JointPmf { dims: dims.to_vec(), probs }
        };
        let value = |j: &JointPmf| exact_measure(j, scenario.measure).unwrap_or(f64::NAN);

        let full = build(1.0);
        let max = if arity == 2 {
            let hx = exact_joint_entropy(&full, &[0])?;
            let hy = exact_joint_entropy(&full, &[1])?;
            hx.min(hy)
        } else {
            let hz = exact_joint_entropy(&full, &[2])?;
            let hxz = exact_joint_entropy(&full, &[0, 2])? - hz;
            let hyz = exact_joint_entropy(&full, &[1, 2])? - hz;
            hxz.min(hyz)
        };
        if !(max > 0.0) {
            continue;
        }
        let band = (flo * max, fhi * max);
        let lambda = solve_lambda(|l| value(&build(l)), frac * max);
        let joint = build(lambda);
        if in_band(value(&joint), band) {
            return Ok(joint);
        }
    }
    Err(Error::Generation {
        what: format!("{} {} joint, dims {dims:?}", scenario.level, scenario.measure),
        attempts: MAX_ATTEMPTS,
    })
}

/// Generates the ground truth for `measure` on a domain of `k` cells. H uses a
/// single axis; MI and CMI split `k` with [`split_dims`].
pub fn generate_scenario(k: usize, scenario: GroundTruthScenario, seed: u64) -> Result<JointPmf> {
    match scenario.measure {
        Measure::H => {
            let p = generate_pmf(k, scenario, seed)?;
            Ok(JointPmf { dims: vec![k], probs: p.probs })
        }
        m => generate_joint(&split_dims(k, m.arity())?, scenario, seed),
    }
}

/// Inverse-CDF sampler over a fixed cumulative table.
#[derive(Debug, Clone)]
pub struct Sampler {
    cdf: Vec<f64>,
}

impl Sampler {
    pub fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = probs
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        // the last cell with mass absorbs rounding in the running sum
        if let Some(last) = probs.iter().rposition(|&p| p > 0.0) {
            cdf[last..].iter_mut().for_each(|c| *c = f64::INFINITY);
        }
        Self { cdf }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random::<f64>();
        self.cdf.partition_point(|&c| c <= u)
    }

    /// Dense cell counts of `n` draws.
    pub fn counts<R: Rng + ?Sized>(&self, rng: &mut R, n: u64) -> Vec<u64> {
        let mut out = vec![0u64; self.cdf.len()];
        for _ in 0..n {
            out[self.draw(rng)] += 1;
        }
        out
    }
}

pub fn sample_pmf(p: &DiscretePmf, n: u64, seed: u64) -> Result<CountHistogram> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mut rng = rng_from_seed(seed);
    CountHistogram::from_counts(Sampler::new(&p.probs).counts(&mut rng, n))
}

/// `n` i.i.d. draws from `j`, as a histogram carrying `j`'s dimensions.
pub fn sample_joint(j: &JointPmf, n: u64, seed: u64) -> Result<JointHistogram> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mut rng = rng_from_seed(seed);
    let dims: Vec<u64> = j.dims.iter().map(|&d| d as u64).collect();
    JointHistogram::from_dense(&dims, &Sampler::new(&j.probs).counts(&mut rng, n))
}
