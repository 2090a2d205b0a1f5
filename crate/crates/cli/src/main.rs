use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use infoest::bench::{self, export, ExperimentConfig, Fp, MseCurve};
use infoest::io::{read_counts, read_samples};
use infoest::qif::{exact_triangle_cmi, triangle_report, TriangleInputs};
use infoest::synth::{exact_measure, generate_scenario, sample_joint};
use infoest::{
    EntropyTerms, Error, EstimatorId, EstimatorSpec, GroundTruthScenario, JointHistogram, Level,
    Measure,
};

#[derive(Parser)]
#[command(name = "infoest", version, about = "Entropy, mutual information and CMI estimation from counts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate H, MI or CMI from a counts or samples file.
    Estimate(EstimateArgs),
    /// Generate a ground-truth distribution and optionally sample from it.
    Simulate(SimulateArgs),
    /// Run a benchmark grid and write the CSV tables.
    Bench(BenchArgs),
    /// Recompute the fp/ratios/auc tables from existing MSE tables.
    Report(ReportArgs),
    /// Leakage of the triangle classifier's secret side.
    DemoTriangle(TriangleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    /// `symbol[,symbol...],count` per line
    Counts,
    /// one observation per line
    Samples,
}

#[derive(Args)]
struct EstimateArgs {
    input: PathBuf,
    #[arg(long, default_value = "H")]
    measure: Measure,
    #[arg(long, default_value = "ML", conflicts_with = "all")]
    estimator: EstimatorId,
    /// Dirichlet concentration (BAY)
    #[arg(long)]
    alpha: Option<f64>,
    /// Schürmann parameter (SHU)
    #[arg(long)]
    xi: Option<f64>,
    /// Assumed alphabet size (H only)
    #[arg(long = "K")]
    k: Option<u64>,
    /// Print every estimator as a table
    #[arg(long)]
    all: bool,
    #[arg(long, value_enum, default_value = "counts")]
    format: InputFormat,
}

#[derive(Args)]
struct SimulateArgs {
    /// Domain size of the (joint) distribution
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "H")]
    measure: Measure,
    #[arg(long, default_value = "M")]
    gt: Level,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also draw a sample of this size
    #[arg(long = "N")]
    n: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory holding mse_<measure>_k<k>.csv tables; outputs go here too
    #[arg(long)]
    out: PathBuf,
    /// Config supplying flattening_bound and penalty_exponent
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TriangleArgs {
    #[arg(long = "N", default_value_t = 500)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Integer range of every side, `a..b` inclusive
    #[arg(long, default_value = "1..100", value_parser = parse_range)]
    ranges: (i64, i64),
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got '{s}'"))?;
    let a: i64 = a.trim().parse().map_err(|_| format!("bad range start '{a}'"))?;
    let b: i64 = b.trim().parse().map_err(|_| format!("bad range end '{b}'"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

fn fmt6(v: f64) -> String {
    if v.is_finite() {
        // no "-0.000000" for values that round to zero
        let v = if v.abs() < 5e-7 { 0.0 } else { v };
        format!("{v:.6}")
    } else {
        export::format_float(v)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Generation { .. } | Error::Numerical(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Report(a) => cmd_report(a),
        Command::DemoTriangle(a) => cmd_demo_triangle(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn cmd_estimate(a: EstimateArgs) -> infoest::Result<()> {
    let arity = Some(a.measure.arity());
    let joint = match a.format {
        InputFormat::Counts => read_counts(&a.input, arity)?,
        InputFormat::Samples => read_samples(&a.input, arity)?,
    };
    if a.k.is_some() && a.measure != Measure::H {
        return Err(Error::Parameter(
            "--K applies to H only; MI and CMI take each term's observed support".into(),
        ));
    }
    let spec_for = |id: EstimatorId| {
        let mut s = EstimatorSpec::new(id);
        if let (Some(alpha), EstimatorId::BAY) = (a.alpha, id) {
            s = s.with_alpha(alpha);
        }
        if let (Some(xi), EstimatorId::SHU) = (a.xi, id) {
            s = s.with_xi(xi);
        }
        if let Some(k) = a.k.filter(|_| id.uses_alphabet_size()) {
            s = s.with_k(k);
        }
        s
    };
    let terms = EntropyTerms::new(&joint, a.measure)?;
    if a.all {
        println!("estimator,{}", a.measure);
        for id in EstimatorId::ALL {
            println!("{id},{}", fmt6(terms.estimate(&spec_for(id))?));
        }
    } else {
        let spec = spec_for(a.estimator);
        spec.validate()?;
        println!("{}", fmt6(terms.estimate(&spec)?));
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> infoest::Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn histogram_csv(h: &JointHistogram) -> String {
    let names = ["x", "y", "z"];
    let mut out = names[..h.arity()].join(",");
    out.push_str(",count\n");
    let mut cells: Vec<(&[u32], u64)> = h.cells().collect();
    cells.sort();
    for (key, n) in cells {
        let key: Vec<String> = key.iter().map(u32::to_string).collect();
        out.push_str(&format!("{},{n}\n", key.join(",")));
    }
    out
}

fn cmd_simulate(a: SimulateArgs) -> infoest::Result<()> {
    let scenario = GroundTruthScenario::new(a.measure, a.gt);
    let pmf = generate_scenario(a.k, scenario, a.seed)?;
    let truth = exact_measure(&pmf, a.measure)?;
    fs::create_dir_all(&a.out).map_err(|source| Error::Io { path: a.out.clone(), source })?;
    let pmf_path = a.out.join("pmf.csv");
    write_file(&pmf_path, &pmf.to_csv())?;
    println!("{} {} = {}", a.measure, a.gt, fmt6(truth));
    println!("wrote {}", pmf_path.display());
    if let Some(n) = a.n {
        let sample = sample_joint(&pmf, n, a.seed)?;
        let path = a.out.join("counts.csv");
        write_file(&path, &histogram_csv(&sample))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> infoest::Result<()> {
    let cfg = ExperimentConfig::from_file(&a.config)?;
    let cells = cfg.measures.len() * cfg.k_grid.len() * cfg.gt_levels.len() * cfg.repetitions as usize;
    eprintln!(
        "running {cells} cells ({} sample sizes, {} estimators each)",
        cfg.n_grid.len(),
        cfg.estimators.len()
    );
    for path in bench::run_and_export(&cfg, &a.out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Finds `mse_<measure>_k<k>.csv` tables in `dir`, sorted by measure then k.
fn mse_tables(dir: &Path) -> infoest::Result<Vec<(Measure, usize, PathBuf)>> {
    let entries = fs::read_dir(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let mut found = Vec::new();
    for entry in entries.flatten() {
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some(stem) = name.strip_prefix("mse_").and_then(|s| s.strip_suffix(".csv")) else {
            continue;
        };
        let Some((m, k)) = stem.split_once("_k") else { continue };
        if let (Ok(m), Ok(k)) = (m.parse::<Measure>(), k.parse::<usize>()) {
            found.push((m, k, entry.path()));
        }
    }
    found.sort();
    Ok(found)
}

fn cmd_report(a: ReportArgs) -> infoest::Result<()> {
    let cfg = match &a.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    let tables = mse_tables(&a.out)?;
    if tables.is_empty() {
        return Err(Error::Parameter(format!("no mse_*.csv tables in {}", a.out.display())));
    }
    let mut curves: Vec<MseCurve> = Vec::new();
    for (m, k, path) in &tables {
        curves.extend(bench::read_mse_csv(path, *m, *k)?);
    }
    let reports = bench::analyze_all(&curves, cfg.flattening_bound, cfg.penalty_exponent);
    for (measure, reps) in &reports {
        println!("{measure}");
        println!("{:<6} {:>8} {:>8} {:>8}  auc", "est", "fp", "slope", "l2");
        for r in reps {
            let fps: Vec<String> = r
                .fps
                .iter()
                .map(|f| match f {
                    Fp::Converged(e) => e.to_string(),
                    Fp::NotConverged => "NC".into(),
                })
                .collect();
            let aucs: Vec<String> = r.auc.iter().map(|v| fmt6(*v)).collect();
            println!(
                "{:<6} {:>8} {:>8.2} {:>8.2}  {}",
                r.estimator.as_str(),
                fps.join("/"),
                r.slope,
                r.l2_norm,
                aucs.join("/")
            );
        }
    }
    for path in bench::export_reports(&curves, &reports, &a.out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_demo_triangle(a: TriangleArgs) -> infoest::Result<()> {
    let inputs = TriangleInputs::uniform(a.ranges.0..=a.ranges.1);
    let report = triangle_report(a.n, a.seed, &inputs)?;
    println!("exact,{}", fmt6(exact_triangle_cmi(&inputs)?));
    for (id, v) in report {
        println!("{id},{}", fmt6(v));
    }
    Ok(())
}
