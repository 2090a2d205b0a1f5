use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::estimators::EstimatorId;
use crate::synth::Measure;

use super::analytics::Fp;
use super::grid::MseCurve;
use super::report::ConvergenceReport;

/// Shortest round-trip decimal, with non-finite values spelled `NaN`, `Inf`
/// and `-Inf`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v == f64::INFINITY {
        "Inf".into()
    } else if v == f64::NEG_INFINITY {
        "-Inf".into()
    } else {
        format!("{v}")
    }
}

pub fn parse_float(s: &str) -> Option<f64> {
    match s.trim() {
        "NaN" | "nan" => Some(f64::NAN),
        "Inf" | "inf" | "+Inf" => Some(f64::INFINITY),
        "-Inf" | "-inf" => Some(f64::NEG_INFINITY),
        other => other.parse().ok(),
    }
}

fn write(path: PathBuf, body: &str) -> Result<PathBuf> {
    fs::write(&path, body).map_err(|source| Error::Io { path: path.clone(), source })?;
    Ok(path)
}

pub fn mse_file_name(measure: Measure, k: usize) -> String {
    format!("mse_{measure}_k{k}.csv")
}

/// `estimator,<N>...` with one row per curve.
pub fn mse_csv(curves: &[&MseCurve]) -> String {
    let mut out = String::from("estimator");
    if let Some(c) = curves.first() {
        for n in &c.n_grid {
            let _ = write!(out, ",{n}");
        }
    }
    out.push('\n');
    for c in curves {
        out.push_str(c.estimator.as_str());
        for &v in &c.mse {
            let _ = write!(out, ",{}", format_float(v));
        }
        out.push('\n');
    }
    out
}

/// Reads an MSE table written by [`mse_csv`].
pub fn read_mse_csv(path: &Path, measure: Measure, k: usize) -> Result<Vec<MseCurve>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty MSE table".into() })?;
    let n_grid = header
        .split(',')
        .skip(1)
        .map(|s| s.trim().parse::<u64>().map_err(|_| Error::Parse { line: 1, msg: format!("bad sample size '{s}'") }))
        .collect::<Result<Vec<_>>>()?;
    let mut curves = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let id: EstimatorId = fields.next().unwrap_or("").parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("unknown estimator in '{line}'"),
        })?;
        let mse = fields
            .map(|s| parse_float(s).ok_or_else(|| Error::Parse { line: i + 1, msg: format!("bad value '{s}'") }))
            .collect::<Result<Vec<_>>>()?;
        if mse.len() != n_grid.len() {
            return Err(Error::Parse { line: i + 1, msg: format!("expected {} values", n_grid.len()) });
        }
        curves.push(MseCurve { estimator: id, measure, k, n_grid: n_grid.clone(), mse });
    }
    Ok(curves)
}

fn fp_cell(fp: Fp) -> String {
    fp.to_string()
}

/// `estimator,<k>...,slope,l2_norm`.
pub fn fp_csv(reports: &[ConvergenceReport]) -> String {
    let mut out = String::from("estimator");
    if let Some(r) = reports.first() {
        for k in &r.k_grid {
            let _ = write!(out, ",{k}");
        }
    }
    out.push_str(",slope,l2_norm\n");
    for r in reports {
        out.push_str(r.estimator.as_str());
        for &fp in &r.fps {
            let _ = write!(out, ",{}", fp_cell(fp));
        }
        let _ = writeln!(out, ",{},{}", format_float(round(r.slope, 2)), format_float(round(r.l2_norm, 2)));
    }
    out
}

/// `estimator,<k>...`; empty cells where not converged.
pub fn ratios_csv(reports: &[ConvergenceReport]) -> String {
    let mut out = String::from("estimator");
    if let Some(r) = reports.first() {
        for k in &r.k_grid {
            let _ = write!(out, ",{k}");
        }
    }
    out.push('\n');
    for r in reports {
        out.push_str(r.estimator.as_str());
        for ratio in &r.ratios {
            match ratio {
                Some(v) => {
                    let _ = write!(out, ",{v:.2}");
                }
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

/// `estimator,<k>,<k>_below_fp,<k>_from_fp...`. The split point per k is the
/// smaller converged Fp of CS and CW; split cells are empty if neither
/// converged.
pub fn auc_csv(reports: &[ConvergenceReport]) -> String {
    let mut out = String::from("estimator");
    if let Some(r) = reports.first() {
        for k in &r.k_grid {
            let _ = write!(out, ",{k},{k}_below_fp,{k}_from_fp");
        }
    }
    out.push('\n');
    for r in reports {
        out.push_str(r.estimator.as_str());
        for (i, &a) in r.auc.iter().enumerate() {
            let _ = write!(out, ",{}", format_float(round(a, 4)));
            match r.auc_split[i] {
                Some((lo, hi)) => {
                    let _ = write!(out, ",{},{}", format_float(round(lo, 4)), format_float(round(hi, 4)));
                }
                None => out.push_str(",,"),
            }
        }
        out.push('\n');
    }
    out
}

fn round(v: f64, digits: i32) -> f64 {
    if !v.is_finite() {
        return v;
    }
    let s = 10f64.powi(digits);
    (v * s).round() / s
}

/// Writes every MSE table plus the fp/ratios/auc tables for each measure into
/// `out_dir`, creating it if needed. Returns the written paths.
pub fn export_reports(
    curves: &[MseCurve],
    reports: &[(Measure, Vec<ConvergenceReport>)],
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|source| Error::Io { path: out_dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    let mut keys: Vec<(Measure, usize)> = curves.iter().map(|c| (c.measure, c.k)).collect();
    keys.dedup();
    for (measure, k) in keys {
        let rows: Vec<&MseCurve> = curves.iter().filter(|c| c.measure == measure && c.k == k).collect();
        written.push(write(out_dir.join(mse_file_name(measure, k)), &mse_csv(&rows))?);
    }
    for (measure, rep) in reports {
        written.push(write(out_dir.join(format!("fp_{measure}.csv")), &fp_csv(rep))?);
        written.push(write(out_dir.join(format!("ratios_{measure}.csv")), &ratios_csv(rep))?);
        written.push(write(out_dir.join(format!("auc_{measure}.csv")), &auc_csv(rep))?);
    }
    Ok(written)
}
