//! Observed data: count histograms, multiplicity profiles and sparse joint
//! count tables.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use crate::error::{Error, Result};

/// Counts of the distinct symbols seen in a sample.
///
/// Zero bins are never stored. Symbol identity is dropped: every estimator is
/// a symmetric function of the counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountHistogram {
    counts: Vec<u64>,
    total: u64,
}

impl CountHistogram {
    /// Builds a histogram from per-symbol counts. Zero entries are dropped.
    pub fn from_counts<I: IntoIterator<Item = u64>>(counts: I) -> Result<Self> {
        let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
        let total = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptySample);
        }
        Ok(Self { counts, total })
    }

    /// Tallies a sample. Symbols are numbered in first-seen order.
    pub fn from_samples<T, I>(samples: I) -> Result<Self>
    where
        T: Hash + Eq,
        I: IntoIterator<Item = T>,
    {
        let mut ids: HashMap<T, usize> = HashMap::new();
        let mut counts: Vec<u64> = Vec::new();
        for s in samples {
            let next = ids.len();
            let id = *ids.entry(s).or_insert(next);
            if id == counts.len() {
                counts.push(0);
            }
            counts[id] += 1;
        }
        Self::from_counts(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Sample size N.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Observed support m.
    pub fn support(&self) -> usize {
        self.counts.len()
    }

    /// Number of coincidences N − m.
    pub fn coincidences(&self) -> u64 {
        self.total - self.counts.len() as u64
    }

    pub fn multiplicities(&self) -> MultiplicityProfile {
        MultiplicityProfile::from_counts(&self.counts)
    }

    /// Expands back into a sample of symbol ids `0..m`, each repeated by its count.
    pub fn expand(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(id, &c)| std::iter::repeat_n(id, c as usize))
            .collect()
    }
}

/// The "histogram of the histogram": how many symbols were seen exactly j times.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultiplicityProfile {
    freq: BTreeMap<u64, u64>,
}

impl MultiplicityProfile {
    pub fn from_counts(counts: &[u64]) -> Self {
        let mut freq = BTreeMap::new();
        for &c in counts.iter().filter(|&&c| c > 0) {
            *freq.entry(c).or_insert(0) += 1;
        }
        Self { freq }
    }

    /// f_j, the number of symbols observed exactly `j` times.
    pub fn f(&self, j: u64) -> u64 {
        self.freq.get(&j).copied().unwrap_or(0)
    }

    pub fn singletons(&self) -> u64 {
        self.f(1)
    }

    pub fn doubletons(&self) -> u64 {
        self.f(2)
    }

    /// `(j, f_j)` pairs with f_j > 0, in increasing j.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.freq.iter().map(|(&j, &f)| (j, f))
    }

    /// Σ j·f_j.
    pub fn total(&self) -> u64 {
        self.iter().map(|(j, f)| j * f).sum()
    }

    /// Σ f_j.
    pub fn support(&self) -> u64 {
        self.freq.values().sum()
    }

    pub fn max_count(&self) -> u64 {
        self.freq.keys().next_back().copied().unwrap_or(0)
    }
}

/// Sparse count table over symbol tuples.
///
/// Joint samples have arity 2 or 3; marginals down to a single axis are kept in
/// the same type so the composition code can treat every term alike.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointHistogram {
    arity: usize,
    cells: BTreeMap<Vec<u32>, u64>,
    total: u64,
    /// Known alphabet size of each axis, when the data came from a known domain.
    dims: Option<Vec<u64>>,
}

impl JointHistogram {
    /// Builds a table from `(tuple, count)` cells. Zero counts are dropped and
    /// repeated tuples are summed.
    pub fn from_cells<I>(arity: usize, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, u64)>,
    {
        if !(1..=3).contains(&arity) {
            return Err(Error::Dimension(format!("arity {arity} is not 1, 2 or 3")));
        }
        let mut map = BTreeMap::new();
        let mut total = 0u64;
        for (key, count) in cells {
            if key.len() != arity {
                return Err(Error::Dimension(format!(
                    "tuple of length {} in a table of arity {arity}",
                    key.len()
                )));
            }
            if count == 0 {
                continue;
            }
            *map.entry(key).or_insert(0) += count;
            total += count;
        }
        if total == 0 {
            return Err(Error::EmptySample);
        }
        Ok(Self { arity, cells: map, total, dims: None })
    }

    /// Tallies a sample of tuples. Each axis is canonicalised to dense ids in
    /// first-seen order.
    pub fn from_tuples<T, I, R>(samples: I) -> Result<Self>
    where
        T: Hash + Eq,
        R: IntoIterator<Item = T>,
        I: IntoIterator<Item = R>,
    {
        let mut axis_ids: Vec<HashMap<T, u32>> = Vec::new();
        let mut cells: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        let mut arity = None;
        for tuple in samples {
            let mut key = Vec::with_capacity(3);
            for (axis, sym) in tuple.into_iter().enumerate() {
                if axis_ids.len() <= axis {
                    axis_ids.push(HashMap::new());
                }
                let ids = &mut axis_ids[axis];
                let next = ids.len() as u32;
                key.push(*ids.entry(sym).or_insert(next));
            }
            match arity {
                None => arity = Some(key.len()),
                Some(a) if a != key.len() => {
                    return Err(Error::Dimension(format!(
                        "mixed tuple lengths {a} and {}",
                        key.len()
                    )))
                }
                _ => {}
            }
            *cells.entry(key).or_insert(0) += 1;
        }
        let arity = arity.ok_or(Error::EmptySample)?;
        Self::from_cells(arity, cells)
    }

    /// Builds a table from a dense row-major array over a known domain.
    pub fn from_dense(dims: &[u64], counts: &[u64]) -> Result<Self> {
        let size: u64 = dims.iter().product();
        if size as usize != counts.len() {
            return Err(Error::Dimension(format!(
                "dense table has {} entries, dims multiply to {size}",
                counts.len()
            )));
        }
        let cells = counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(idx, &c)| {
            let mut rest = idx as u64;
            let mut key = vec![0u32; dims.len()];
            for axis in (0..dims.len()).rev() {
                key[axis] = (rest % dims[axis]) as u32;
                rest /= dims[axis];
            }
            (key, c)
        });
        let mut out = Self::from_cells(dims.len(), cells)?;
        out.dims = Some(dims.to_vec());
        Ok(out)
    }

    /// Declares the alphabet size of every axis.
    pub fn with_dims(mut self, dims: Vec<u64>) -> Result<Self> {
        if dims.len() != self.arity {
            return Err(Error::Dimension(format!(
                "{} dims for a table of arity {}",
                dims.len(),
                self.arity
            )));
        }
        for key in self.cells.keys() {
            if key.iter().zip(&dims).any(|(&s, &d)| u64::from(s) >= d) {
                return Err(Error::Dimension(format!("cell {key:?} lies outside dims {dims:?}")));
            }
        }
        self.dims = Some(dims);
        Ok(self)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn dims(&self) -> Option<&[u64]> {
        self.dims.as_deref()
    }

    /// Size of the full domain when the axis alphabets are known.
    pub fn domain_size(&self) -> Option<u64> {
        self.dims.as_ref().map(|d| d.iter().product())
    }

    pub fn cells(&self) -> impl Iterator<Item = (&[u32], u64)> + '_ {
        self.cells.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn occupied(&self) -> usize {
        self.cells.len()
    }

    /// Sums out every axis not listed in `axes`. The kept axes appear in the
    /// order given, so `[1, 0]` transposes a 2-D table.
    pub fn marginalize(&self, axes: &[usize]) -> Result<JointHistogram> {
        if axes.is_empty() {
            return Err(Error::Dimension("no axes to keep".into()));
        }
        for (i, &a) in axes.iter().enumerate() {
            if a >= self.arity {
                return Err(Error::Dimension(format!(
                    "axis {a} out of range for arity {}",
                    self.arity
                )));
            }
            if axes[..i].contains(&a) {
                return Err(Error::Dimension(format!("axis {a} listed twice")));
            }
        }
        let mut cells: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for (key, &count) in &self.cells {
            let sub: Vec<u32> = axes.iter().map(|&a| key[a]).collect();
            *cells.entry(sub).or_insert(0) += count;
        }
        Ok(JointHistogram {
            arity: axes.len(),
            cells,
            total: self.total,
            dims: self.dims.as_ref().map(|d| axes.iter().map(|&a| d[a]).collect()),
        })
    }

    /// Flattens the table into a count histogram over its occupied cells.
    pub fn to_counts(&self) -> CountHistogram {
        CountHistogram {
            counts: self.cells.values().copied().collect(),
            total: self.total,
        }
    }
}
