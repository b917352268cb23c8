//! Acceptance checks, one line per criterion. Criteria 6 to 8 need the
//! published feature CSVs in `RFFP_DATASET_DIR` and are skipped otherwise.

mod common;

use std::cell::Cell;
use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rffp::cli::{expand_inputs, RunManifest};
use rffp::dataset::{read_features, read_preambles, write_preambles, CsvSchemaDescriptor, ParseMode};
use rffp::features::{extract_batch, extract_features, fractal_dimension};
use rffp::fft::dft64;
use rffp::forest::{cross_validate, pearson_correlation_matrix, CvConfig};
use rffp::kalman::KalmanConfig;
use rffp::signal::ComplexSample;
use rffp::synth::{cfo_ladder_fleet, generate_fleet, ImpairmentSpec};
use rffp::{Error, LabeledFeatureMatrix};

use common::{direct_dft_centered, fractal_oracle, frame, ideal_phasors};

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Verdict::*;

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn within(elapsed: Duration, limit: Duration) -> (bool, String) {
    (elapsed < limit, format!("{:.1}s of {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()))
}

fn oracle_closure() -> Verdict {
    let start = Instant::now();
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: 1000,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let strategy = (-0.18f64..0.18, -PI..PI, 0.1f64..10.0);
    let worst_cfo = Cell::new(0.0f64);
    let worst_mean = Cell::new(0.0f64);
    let result = runner.run(&strategy, |(cfo, common_phase, amplitude)| {
        let spec = ImpairmentSpec {
            cfo,
            common_phase,
            amplitude,
            ..Default::default()
        };
        let f = extract_features(&frame(&spec, 0)).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let e_cfo = (f.cfo - cfo).abs();
        let e_mean = [f.phase_error_mean_1, f.phase_error_mean_2, f.mag_error_mean_1, f.mag_error_mean_2]
            .into_iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        worst_cfo.set(worst_cfo.get().max(e_cfo));
        worst_mean.set(worst_mean.get().max(e_mean));
        prop_assert!(e_cfo < 1e-9, "cfo {cfo}: recovered {}", f.cfo);
        prop_assert!(e_mean < 1e-9, "cfo {cfo}: error mean {e_mean:e}");
        Ok(())
    });
    let (fast, t) = within(start.elapsed(), Duration::from_secs(10));
    match result {
        Ok(()) => verdict(
            fast,
            format!("1000 specs, max |cfo err| {:.1e}, max |error mean| {:.1e}, {t}",
                worst_cfo.get(),
                worst_mean.get()),
        ),
        Err(e) => Fail(e.to_string()),
    }
}

fn cfo_noise_floor() -> Verdict {
    let start = Instant::now();
    let spec = ImpairmentSpec {
        cfo: 0.01,
        snr_db: Some(30.0),
        ..Default::default()
    };
    let records: Vec<_> = (0..1000).map(|i| frame(&spec, 1000 + i)).collect();
    let errors: Vec<f64> = extract_batch(&records)
        .into_iter()
        .map(|f| (f.unwrap().cfo - 0.01).abs())
        .collect();
    let hits = errors.iter().filter(|e| **e < 1e-4).count();
    let frac = hits as f64 / errors.len() as f64;
    let rms = (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt();
    let (fast, t) = within(start.elapsed(), Duration::from_secs(30));
    verdict(
        frac >= 0.99 && fast,
        format!("{:.1}% of frames within 1e-4 (need 99%), rms error {rms:.2e}, {t}", 100.0 * frac),
    )
}

fn dft_correctness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut worst_parseval = 0.0f64;
    for _ in 0..1000 {
        let x: Vec<ComplexSample> = (0..64)
            .map(|_| ComplexSample::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let fast = dft64(&x);
        for (a, b) in fast.iter().zip(direct_dft_centered(&x)) {
            worst = worst.max((a - b).norm());
        }
        let ex: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let ey: f64 = fast.iter().map(|v| v.norm_sqr()).sum::<f64>() / 64.0;
        worst_parseval = worst_parseval.max((ey - ex).abs() / ex);
    }
    verdict(
        worst < 1e-10 && worst_parseval < 1e-9,
        format!("max |fast - direct| {worst:.1e}, max Parseval rel err {worst_parseval:.1e}"),
    )
}

fn fractal_closed_forms() -> Verdict {
    let ideal = ideal_phasors();
    let (mut ramp, mut alt) = (ideal, ideal);
    for n in 0..64 {
        ramp[n] += ComplexSample::new(0.5 * n as f64, 0.25 * n as f64);
        alt[n] += ComplexSample::new(if n % 2 == 0 { 0.3 } else { -0.3 }, 0.0);
    }
    let d_ramp = fractal_dimension(&ramp).unwrap();
    let d_alt = fractal_dimension(&alt).unwrap();
    let residual = |l: &[ComplexSample; 64]| -> Vec<ComplexSample> { l.iter().zip(&ideal).map(|(a, b)| a - b).collect() };
    let agrees = (fractal_oracle(&residual(&ramp), 3) - d_ramp).abs() < 1e-12
        && (fractal_oracle(&residual(&alt), 3) - d_alt).abs() < 1e-12;
    verdict(
        (d_ramp - 1.5).abs() < 1e-12 && (d_alt - 2.0).abs() < 1e-12 && agrees,
        format!("ramp {d_ramp:.15}, alternating {d_alt:.15}"),
    )
}

fn matrix_of(records: &[rffp::PreambleRecord]) -> LabeledFeatureMatrix {
    let feats: Vec<_> = extract_batch(records).into_iter().map(|f| f.unwrap()).collect();
    let (m, skipped) = LabeledFeatureMatrix::from_records(&feats).unwrap();
    assert_eq!(skipped, 0);
    m
}

fn synthetic_fleet_benchmark() -> Verdict {
    let start = Instant::now();
    let fleet = generate_fleet(&cfo_ladder_fleet(10, 0.002, 1e-4, Some(25.0)), 1000, 42).unwrap();
    let data = matrix_of(&fleet);
    let plain = cross_validate(&data, &CvConfig::default()).unwrap();
    let smoothed = cross_validate(
        &data,
        &CvConfig {
            smoothing: Some(KalmanConfig::default()),
            ..CvConfig::default()
        },
    )
    .unwrap();
    let (fast, t) = within(start.elapsed(), Duration::from_secs(300));
    verdict(
        plain.accuracy > 0.95 && smoothed.accuracy >= plain.accuracy && fast,
        format!(
            "accuracy {:.2}% unsmoothed, {:.2}% smoothed, {t}",
            100.0 * plain.accuracy,
            100.0 * smoothed.accuracy
        ),
    )
}

fn published_dataset() -> Option<LabeledFeatureMatrix> {
    let dir = std::env::var_os("RFFP_DATASET_DIR")?;
    let files = expand_inputs(&[PathBuf::from(dir)]).expect("dataset directory readable");
    let load = read_features(&files, &CsvSchemaDescriptor::feature_full(), false, ParseMode::Lenient)
        .expect("dataset loads");
    Some(load.matrix)
}

const NO_DATASET: &str = "RFFP_DATASET_DIR not set";

fn table1(data: Option<&LabeledFeatureMatrix>) -> Verdict {
    let Some(data) = data else { return Skip(NO_DATASET.into()) };
    let plain = cross_validate(data, &CvConfig::default()).unwrap();
    let smoothed = cross_validate(
        data,
        &CvConfig {
            smoothing: Some(KalmanConfig::default()),
            ..CvConfig::default()
        },
    )
    .unwrap();
    let (a, b): (f64, f64) = (100.0 * plain.accuracy, 100.0 * smoothed.accuracy);
    verdict(
        (a - 82.18).abs() <= 3.0 && (b - 89.06).abs() <= 3.0,
        format!("{a:.2}% without smoothing (82.18 +/- 3), {b:.2}% with (89.06 +/- 3)"),
    )
}

fn table2(data: Option<&LabeledFeatureMatrix>) -> Verdict {
    let Some(data) = data else { return Skip(NO_DATASET.into()) };
    let report = cross_validate(data, &CvConfig::default()).unwrap();
    let top: Vec<(&str, f64)> = report.importance_ranking().into_iter().take(3).collect();
    let want = [("cfo", 0.2199), ("short_freq", 0.1760), ("long_freq", 0.1442)];
    let ok = top.iter().zip(&want).all(|((n, v), (wn, wv))| n == wn && (v - wv).abs() <= 0.05);
    verdict(ok, format!("top 3 {top:?}"))
}

fn figure6(data: Option<&LabeledFeatureMatrix>) -> Verdict {
    let Some(data) = data else { return Skip(NO_DATASET.into()) };
    let corr = pearson_correlation_matrix(data).unwrap();
    let r_cfo = corr.get("cfo", "short_freq").unwrap_or(f64::NAN);
    let r_frac = corr.get("frac_dimension_1", "frac_dimension_2").unwrap_or(f64::NAN);
    verdict(
        (r_cfo - 0.89).abs() <= 0.05 && r_frac >= 0.95,
        format!("r(cfo, short_freq) {r_cfo:.3}, r(frac_dimension_1, frac_dimension_2) {r_frac:.3}"),
    )
}

fn rffp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rffp"))
        .args(args)
        .output()
        .expect("rffp binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn replay_is_bit_identical(manifest: &Path) -> Result<usize, String> {
    let m = RunManifest::load(manifest).map_err(|e| e.to_string())?;
    let before: Vec<Vec<u8>> = m.outputs.iter().map(|p| std::fs::read(p).unwrap()).collect();
    for p in &m.outputs {
        std::fs::remove_file(p).unwrap();
    }
    let o = rffp(&["-q", "replay", s(manifest)]);
    if !o.status.success() {
        return Err(String::from_utf8_lossy(&o.stderr).into_owned());
    }
    for (p, b) in m.outputs.iter().zip(&before) {
        if std::fs::read(p).ok().as_ref() != Some(b) {
            return Err(format!("{} differs after replay", p.display()));
        }
    }
    Ok(m.outputs.len())
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let d = |n: &str| dir.path().join(n);
    let runs: Vec<(&str, Vec<String>, PathBuf)> = vec![
        (
            "synth",
            vec!["synth", "--ladder", "4", "--snr", "25", "--frames", "150", "--seed", "9", "-o", s(&d("raw"))]
                .into_iter()
                .map(String::from)
                .collect(),
            d("raw").join("run_manifest.json"),
        ),
        (
            "extract",
            ["extract", s(&d("raw")), "-o", s(&d("feat"))].map(String::from).to_vec(),
            d("feat").join("run_manifest.json"),
        ),
        (
            "benchmark",
            ["benchmark", s(&d("feat")), "-o", s(&d("bench")), "--smoothing", "on"]
                .map(String::from)
                .to_vec(),
            d("bench").join("run_manifest.json"),
        ),
        (
            "correlate",
            ["correlate", s(&d("feat")), "-o", s(&d("corr"))].map(String::from).to_vec(),
            d("corr").join("run_manifest.json"),
        ),
        (
            "smooth",
            ["smooth", s(&d("feat")), "-o", s(&d("smooth.csv"))].map(String::from).to_vec(),
            d("smooth.csv.manifest.json"),
        ),
    ];
    let mut files = 0;
    for (name, args, manifest) in &runs {
        let mut full = vec!["-q"];
        full.extend(args.iter().map(String::as_str));
        let o = rffp(&full);
        if !o.status.success() {
            return Fail(format!("{name} failed: {}", String::from_utf8_lossy(&o.stderr)));
        }
        match replay_is_bit_identical(manifest) {
            Ok(n) => files += n,
            Err(e) => return Fail(format!("{name}: {e}")),
        }
    }
    Pass(format!("{} subcommands replayed, {files} output files bit-identical", runs.len()))
}

fn parser_robustness() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fuzzed.csv");
    let fleet = generate_fleet(&cfo_ladder_fleet(10, 0.002, 1e-4, Some(25.0)), 1000, 5).unwrap();
    write_preambles(&fleet, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut corrupt = BTreeSet::new();
    while corrupt.len() < 500 {
        corrupt.insert(rng.random_range(1..=10_000usize));
    }
    for &row in &corrupt {
        let line = &mut lines[row];
        let (mac, cell) = line.split_once(',').unwrap();
        let cell = cell.trim_matches('"');
        let samples: Vec<&str> = cell[1..cell.len() - 1].split("),(").collect();
        let broken = match rng.random_range(0..5) {
            // drop one sample
            0 => format!("\"[{})]\"", samples[..287].join("),(")),
            // unparseable literal
            1 => {
                let mut s = samples.clone();
                let k = rng.random_range(1..287);
                let bad = format!("{}zz", s[k]);
                s[k] = &bad;
                format!("\"[{}]\"", s.join("),("))
            }
            // empty cell
            2 => String::new(),
            // extra sample
            3 => format!("\"[{},(0.0,0.0)]\"", samples.join("),(")),
            // non-finite value
            _ => format!("\"[(nan,0.0),{}]\"", samples[1..].join("),(")).replacen("[(nan,0.0),", "[(nan,0.0),(", 1),
        };
        *line = format!("{mac},{broken}");
    }
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();

    let reported: BTreeSet<usize> = read_preambles(&path, &CsvSchemaDescriptor::raw_preamble(), ParseMode::Lenient)
        .unwrap()
        .filter_map(|r| match r {
            Err(Error::Row { row, .. }) => Some(row as usize),
            _ => None,
        })
        .collect();
    if reported != corrupt {
        let missed = corrupt.difference(&reported).count();
        let extra = reported.difference(&corrupt).count();
        return Fail(format!("reader: {missed} corrupted rows missed, {extra} clean rows flagged"));
    }

    let o = rffp(&["extract", s(&path), "-o", s(&dir.path().join("lenient"))]);
    let err = String::from_utf8_lossy(&o.stderr);
    let cli_rows: BTreeSet<usize> = err
        .lines()
        .filter_map(|l| l.split(": row ").nth(1)?.split(':').next()?.parse().ok())
        .collect();
    if !o.status.success() || cli_rows != corrupt || !err.contains("9500 ok, 500 row errors") {
        return Fail(format!("lenient extract: exit {:?}, {} rows reported", o.status.code(), cli_rows.len()));
    }

    let first = *corrupt.first().unwrap();
    let o = rffp(&["extract", s(&path), "-o", s(&dir.path().join("strict")), "--strict"]);
    let err = String::from_utf8_lossy(&o.stderr);
    let stopped_at_first = err.contains(&format!("row {first}:"));
    verdict(
        !o.status.success() && stopped_at_first,
        format!(
            "500 of 10000 rows corrupted, all reported in lenient mode; strict exit {:?} at row {first}",
            o.status.code()
        ),
    )
}

fn main() {
    let dataset = published_dataset();
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict>)> = vec![
        ("oracle closure", Box::new(oracle_closure)),
        ("CFO noise floor at 30 dB", Box::new(cfo_noise_floor)),
        ("DFT correctness", Box::new(dft_correctness)),
        ("fractal dimension closed forms", Box::new(fractal_closed_forms)),
        ("synthetic fleet benchmark", Box::new(synthetic_fleet_benchmark)),
        ("published accuracies", Box::new(|| table1(dataset.as_ref()))),
        ("published importances", Box::new(|| table2(dataset.as_ref()))),
        ("published correlations", Box::new(|| figure6(dataset.as_ref()))),
        ("manifest replay determinism", Box::new(determinism)),
        ("parser robustness", Box::new(parser_robustness)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Fail(format!("panicked: {msg}"))
        });
        let (tag, detail) = match v {
            Pass(d) => ("PASS", d),
            Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Skip(d) => ("SKIP", d),
        };
        println!("criterion {:>2} {tag} {name}: {detail}", i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
