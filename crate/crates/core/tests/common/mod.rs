#![allow(dead_code)]

use std::path::PathBuf;

use infoest::bench::export::parse_float;
use infoest::{CountHistogram, EstimatorId, EstimatorSpec};

pub struct GoldenRow {
    pub counts: Vec<u64>,
    pub k: u64,
    pub bay_alpha: f64,
    pub values: Vec<(EstimatorId, f64)>,
}

impl GoldenRow {
    pub fn histogram(&self) -> CountHistogram {
        CountHistogram::from_counts(self.counts.iter().copied()).unwrap()
    }

    pub fn spec(&self, id: EstimatorId) -> EstimatorSpec {
        let mut spec = EstimatorSpec::new(id);
        if id.uses_alphabet_size() {
            spec = spec.with_k(self.k);
        }
        if id == EstimatorId::BAY {
            spec = spec.with_alpha(self.bay_alpha);
        }
        spec
    }
}

pub fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/reference_golden.csv")
}

pub fn load_golden() -> Vec<GoldenRow> {
    let text = std::fs::read_to_string(golden_path()).expect("golden file");
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().expect("header").split(',').collect();
    let ids: Vec<EstimatorId> = header[3..].iter().map(|s| s.parse().unwrap()).collect();
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            GoldenRow {
                counts: f[0].split_whitespace().map(|c| c.parse().unwrap()).collect(),
                k: f[1].parse().unwrap(),
                bay_alpha: f[2].parse().unwrap(),
                values: ids.iter().zip(&f[3..]).map(|(&id, v)| (id, parse_float(v).unwrap())).collect(),
            }
        })
        .collect()
}

/// Absolute tolerance, relative once the magnitude exceeds one.
pub fn tolerance(id: EstimatorId) -> f64 {
    match id {
        EstimatorId::NSB => 1e-4,
        EstimatorId::PYM => 1e-3,
        _ => 1e-6,
    }
}

pub fn matches(got: f64, want: f64, tol: f64) -> bool {
    if want.is_nan() || got.is_nan() {
        return want.is_nan() && got.is_nan();
    }
    if want.is_infinite() || got.is_infinite() {
        return got == want;
    }
    (got - want).abs() <= tol * want.abs().max(1.0)
}

/// Every mismatch in the golden corpus as a readable line.
pub fn golden_mismatches() -> Vec<String> {
    let mut out = Vec::new();
    for row in load_golden() {
        let h = row.histogram();
        for &(id, want) in &row.values {
            let got = infoest::entropy(&h, &row.spec(id)).unwrap();
            if !matches(got, want, tolerance(id)) {
                out.push(format!("{id} on {:?} (K={}): got {got}, want {want}", row.counts, row.k));
            }
        }
    }
    out
}
