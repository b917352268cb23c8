//! Command-line driver.
//!
//! Every subcommand writes a `RunManifest` next to its outputs; `replay`
//! re-runs a manifest and reproduces the same output files.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{
    device_file_name, fmt_f64, read_features, ComplexFormat, CsvSchemaDescriptor, FeatureWriter, ParseMode,
    PreambleReader, PreambleWriter, SchemaKind, MAC_COLUMN,
};
use crate::error::{Error, Result};
use crate::features::extract_features;
use crate::forest::{cross_validate, pearson_correlation_matrix, CvConfig, LabeledFeatureMatrix, SmoothingOrder};
use crate::kalman::{smooth_dataset, KalmanConfig, MeasurementVariance};
use crate::synth::{cfo_ladder_fleet, generate_frame, FleetSpec};

pub const MANIFEST_FILE: &str = "run_manifest.json";
pub const COMBINED_FILE: &str = "features.csv";

/// Records handed to the worker pool at a time by `extract`.
const EXTRACT_CHUNK: usize = 4096;

#[derive(Debug, Parser)]
#[command(name = "rffp", version, about = "802.11g preamble RF fingerprinting")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Suppress progress messages.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Raw-preamble CSVs to per-device feature CSVs.
    Extract(ExtractArgs),
    /// Generate a synthetic fleet of raw preambles.
    Synth(SynthArgs),
    /// Cross-validated Random Forest accuracy and feature importance.
    Benchmark(BenchmarkArgs),
    /// Pearson correlation matrix of the 15 scalar features.
    Correlate(CorrelateArgs),
    /// Kalman-smooth the scalar features of each device.
    Smooth(SmoothArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemaArg {
    RawPreamble,
    FeatureFull,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothingOrderArg {
    PreSplit,
    PostSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RModeArg {
    Empirical,
    Fixed,
}

/// Input parsing flags shared by every reader.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ParseArgs {
    /// Input schema; each subcommand accepts exactly one.
    #[arg(long, value_enum)]
    pub schema: Option<SchemaArg>,
    /// Complex literal spelling: paren-pair, a-plus-bj or json-list (default: detect).
    #[arg(long)]
    pub complex_format: Option<ComplexFormat>,
    /// Stop at the first bad row and exit nonzero.
    #[arg(long, conflicts_with = "lenient")]
    pub strict: bool,
    /// Report bad rows and continue (default).
    #[arg(long)]
    pub lenient: bool,
}

impl ParseArgs {
    fn mode(&self) -> ParseMode {
        if self.strict {
            ParseMode::Strict
        } else {
            ParseMode::Lenient
        }
    }

    fn schema(&self, expected: SchemaArg, command: &str) -> Result<CsvSchemaDescriptor> {
        let kind = self.schema.unwrap_or(expected);
        if kind != expected {
            return Err(Error::InvalidConfig(format!(
                "{command} reads the {:?} schema, not {:?}",
                expected, kind
            )));
        }
        let base = match kind {
            SchemaArg::RawPreamble => CsvSchemaDescriptor::raw_preamble(),
            SchemaArg::FeatureFull => CsvSchemaDescriptor::feature_full(),
        };
        Ok(base.with_complex_format(self.complex_format))
    }
}

/// Kalman flags shared by `benchmark` and `smooth`.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct KalmanArgs {
    /// Process variance as a multiple of the sequence variance.
    #[arg(long, default_value_t = 1e-4)]
    pub q_scale: f64,
    /// Measurement variance: the sequence variance, or --r-fixed.
    #[arg(long, value_enum, default_value_t = RModeArg::Empirical)]
    pub r_mode: RModeArg,
    #[arg(long)]
    pub r_fixed: Option<f64>,
}

impl KalmanArgs {
    fn config(&self) -> Result<KalmanConfig> {
        let cfg = KalmanConfig {
            process_variance_scale: self.q_scale,
            measurement_variance_mode: match self.r_mode {
                RModeArg::Empirical => MeasurementVariance::Empirical,
                RModeArg::Fixed => MeasurementVariance::Fixed,
            },
            fixed_measurement_variance: self.r_fixed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExtractArgs {
    /// Raw-preamble CSV files or directories of them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output directory for `<mac>_pre.csv` feature files.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Write one combined `features.csv` instead of one file per device.
    #[arg(long)]
    pub combined: bool,
    #[command(flatten)]
    pub parse: ParseArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SynthArgs {
    /// JSON fleet specification.
    #[arg(long, conflicts_with = "ladder", required_unless_present = "ladder")]
    pub fleet: Option<PathBuf>,
    /// Instead of a spec file: this many devices with evenly spaced mean CFOs.
    #[arg(long)]
    pub ladder: Option<usize>,
    /// Mean CFO spacing of the ladder fleet (rad/sample).
    #[arg(long, default_value_t = 0.002)]
    pub spacing: f64,
    /// Per-frame CFO std-dev of the ladder fleet (rad/sample).
    #[arg(long, default_value_t = 1e-4)]
    pub cfo_jitter: f64,
    /// SNR of the ladder fleet in dB (omit for noiseless frames).
    #[arg(long)]
    pub snr: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub frames: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output directory for per-device raw-preamble files.
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BenchmarkArgs {
    /// Feature CSV files or directories of them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Directory for the report CSVs.
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = OnOff::Off)]
    pub smoothing: OnOff,
    #[arg(long, value_enum, default_value_t = SmoothingOrderArg::PreSplit)]
    pub smoothing_order: SmoothingOrderArg,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 128)]
    pub trees: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub kalman: KalmanArgs,
    #[command(flatten)]
    pub parse: ParseArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CorrelateArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Directory for `correlation.csv`.
    #[arg(long, short)]
    pub output: PathBuf,
    #[command(flatten)]
    pub parse: ParseArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SmoothArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output CSV of `mac_address` plus the 15 smoothed scalars.
    #[arg(long, short)]
    pub output: PathBuf,
    #[command(flatten)]
    pub kalman: KalmanArgs,
    #[command(flatten)]
    pub parse: ParseArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

/// Reproducibility record written beside every run's outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Fully resolved parameters, paths made absolute.
    pub command: Command,
    pub threads: Option<usize>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub duration_secs: f64,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text + "\n").map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// What a subcommand produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub manifest: Option<PathBuf>,
    /// Rows or records rejected in lenient mode.
    pub row_errors: u64,
}

struct Progress {
    quiet: bool,
}

impl Progress {
    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

/// Parse `args` (program name first) and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(_) => 0,
        Err(e @ Error::InvalidConfig(_)) | Err(e @ Error::DuplicateLabel(_)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Run a parsed command line on a pool of `cli.threads` workers.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let progress = Progress { quiet: cli.quiet };
    if let Command::Replay(r) = &cli.command {
        let m = RunManifest::load(&r.manifest)?;
        progress.say(format!("replaying {} from {}", m.subcommand, r.manifest.display()));
        return run_in_pool(m.threads.or(cli.threads), &m.command, &progress);
    }
    run_in_pool(cli.threads, &cli.command, &progress)
}

fn run_in_pool(threads: Option<usize>, command: &Command, progress: &Progress) -> Result<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let command = absolutize(command.clone())?;
    let start = Instant::now();
    let (mut outcome, manifest_path, inputs, seed) = pool.install(|| dispatch(&command, progress))?;
    let manifest = RunManifest {
        subcommand: subcommand_name(&command).to_string(),
        command,
        threads,
        inputs,
        outputs: outcome.outputs.clone(),
        seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        duration_secs: start.elapsed().as_secs_f64(),
    };
    manifest.save(&manifest_path)?;
    progress.say(format!("manifest: {}", manifest_path.display()));
    outcome.manifest = Some(manifest_path);
    Ok(outcome)
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Extract(_) => "extract",
        Command::Synth(_) => "synth",
        Command::Benchmark(_) => "benchmark",
        Command::Correlate(_) => "correlate",
        Command::Smooth(_) => "smooth",
        Command::Replay(_) => "replay",
    }
}

fn abs(p: &mut PathBuf) -> Result<()> {
    *p = std::path::absolute(&*p).map_err(|source| Error::Io { path: p.clone(), source })?;
    Ok(())
}

fn absolutize(mut c: Command) -> Result<Command> {
    match &mut c {
        Command::Extract(a) => {
            a.inputs.iter_mut().try_for_each(abs)?;
            abs(&mut a.output)?;
        }
        Command::Synth(a) => {
            if let Some(f) = a.fleet.as_mut() {
                abs(f)?;
            }
            abs(&mut a.output)?;
        }
        Command::Benchmark(a) => {
            a.inputs.iter_mut().try_for_each(abs)?;
            abs(&mut a.output)?;
        }
        Command::Correlate(a) => {
            a.inputs.iter_mut().try_for_each(abs)?;
            abs(&mut a.output)?;
        }
        Command::Smooth(a) => {
            a.inputs.iter_mut().try_for_each(abs)?;
            abs(&mut a.output)?;
        }
        Command::Replay(_) => return Err(Error::InvalidConfig("a manifest cannot record a replay".into())),
    }
    Ok(c)
}

type Dispatched = (Outcome, PathBuf, Vec<PathBuf>, Option<u64>);

fn dispatch(c: &Command, progress: &Progress) -> Result<Dispatched> {
    match c {
        Command::Extract(a) => cmd_extract(a, progress),
        Command::Synth(a) => cmd_synth(a, progress),
        Command::Benchmark(a) => cmd_benchmark(a, progress),
        Command::Correlate(a) => cmd_correlate(a, progress),
        Command::Smooth(a) => cmd_smooth(a, progress),
        Command::Replay(_) => unreachable!("replay is resolved before dispatch"),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Files as given, directories expanded to their `*.csv` entries in name order.
pub fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let rd = std::fs::read_dir(p).map_err(|source| Error::Io { path: p.clone(), source })?;
            let mut files = Vec::new();
            for entry in rd {
                let path = entry.map_err(|source| Error::Io { path: p.clone(), source })?.path();
                if path.is_file() && path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
                    files.push(path);
                }
            }
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn cmd_extract(a: &ExtractArgs, progress: &Progress) -> Result<Dispatched> {
    let schema = a.parse.schema(SchemaArg::RawPreamble, "extract")?;
    let mode = a.parse.mode();
    let inputs = expand_inputs(&a.inputs)?;
    create_dir(&a.output)?;

    let mut writers: BTreeMap<String, FeatureWriter<File>> = BTreeMap::new();
    let mut total_errors = 0u64;
    for path in &inputs {
        let mut reader = PreambleReader::from_path(path, &schema, mode)?;
        let (mut ok, mut bad_rows, mut bad_frames) = (0u64, 0u64, 0u64);
        loop {
            let mut chunk = Vec::with_capacity(EXTRACT_CHUNK);
            for item in reader.by_ref().take(EXTRACT_CHUNK) {
                match item {
                    Ok(rec) => chunk.push(rec),
                    Err(e @ Error::Row { .. }) => {
                        bad_rows += 1;
                        progress.say(format!("{}: {e}", path.display()));
                        if mode == ParseMode::Strict {
                            return Err(e);
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
            if chunk.is_empty() {
                break;
            }
            let results: Vec<_> = chunk.par_iter().map(extract_features).collect();
            for res in results {
                match res {
                    Ok(feat) => {
                        let key = if a.combined {
                            COMBINED_FILE.to_string()
                        } else {
                            device_file_name(&feat.device_label)
                        };
                        let w = match writers.entry(key) {
                            std::collections::btree_map::Entry::Occupied(o) => o.into_mut(),
                            std::collections::btree_map::Entry::Vacant(v) => {
                                let p = a.output.join(v.key());
                                v.insert(FeatureWriter::create(&p)?)
                            }
                        };
                        w.write(&feat)?;
                        ok += 1;
                    }
                    Err(e) => {
                        bad_frames += 1;
                        progress.say(format!("{}: {e}", path.display()));
                        if mode == ParseMode::Strict {
                            return Err(e);
                        }
                    }
                }
            }
            progress.say(format!("{}: {ok} records extracted", path.display()));
        }
        progress.say(format!(
            "{}: {ok} ok, {bad_rows} row errors, {bad_frames} extraction errors",
            path.display()
        ));
        total_errors += bad_rows + bad_frames;
    }
    let mut outputs = Vec::with_capacity(writers.len());
    for (name, w) in writers {
        w.finish()?;
        outputs.push(a.output.join(name));
    }
    progress.say(format!("wrote {} feature files", outputs.len()));
    let outcome = Outcome {
        outputs,
        manifest: None,
        row_errors: total_errors,
    };
    Ok((outcome, a.output.join(MANIFEST_FILE), inputs, None))
}

fn cmd_synth(a: &SynthArgs, progress: &Progress) -> Result<Dispatched> {
    let (profiles, inputs) = match (&a.fleet, a.ladder) {
        (Some(path), _) => (FleetSpec::load(path)?.devices, vec![path.clone()]),
        (None, Some(n)) => (cfo_ladder_fleet(n, a.spacing, a.cfo_jitter, a.snr), Vec::new()),
        (None, None) => return Err(Error::InvalidConfig("synth needs --fleet or --ladder".into())),
    };
    FleetSpec {
        devices: profiles.clone(),
    }
    .validate()
    .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    create_dir(&a.output)?;

    let mut outputs = Vec::with_capacity(profiles.len());
    for (d, p) in profiles.iter().enumerate() {
        let frames: Vec<_> = (0..a.frames)
            .into_par_iter()
            .map(|f| generate_frame(p, d, f, a.seed))
            .collect();
        let path = a.output.join(device_file_name(&p.label));
        let mut w = PreambleWriter::create(&path)?;
        for r in &frames {
            w.write(r)?;
        }
        w.finish()?;
        outputs.push(path);
        progress.say(format!("{}: {} frames ({}/{})", p.label, a.frames, d + 1, profiles.len()));
    }
    if a.fleet.is_none() {
        let spec_path = a.output.join("fleet.json");
        FleetSpec { devices: profiles }.save(&spec_path)?;
    }
    let outcome = Outcome {
        outputs,
        ..Default::default()
    };
    Ok((outcome, a.output.join(MANIFEST_FILE), inputs, Some(a.seed)))
}

fn load_matrix(inputs: &[PathBuf], parse: &ParseArgs, command: &str, progress: &Progress) -> Result<(LabeledFeatureMatrix, u64, Vec<PathBuf>)> {
    let schema = parse.schema(SchemaArg::FeatureFull, command)?;
    let files = expand_inputs(inputs)?;
    let load = read_features(&files, &schema, false, parse.mode())?;
    for (path, e) in &load.row_errors {
        progress.say(format!("{}: {e}", path.display()));
    }
    progress.say(format!(
        "loaded {} rows x {} features from {} files ({} rows rejected)",
        load.matrix.n_rows(),
        load.matrix.n_features(),
        files.len(),
        load.row_errors.len()
    ));
    Ok((load.matrix, load.row_errors.len() as u64, files))
}

fn cmd_benchmark(a: &BenchmarkArgs, progress: &Progress) -> Result<Dispatched> {
    let smoothing = match a.smoothing {
        OnOff::On => Some(a.kalman.config()?),
        OnOff::Off => None,
    };
    let (data, row_errors, inputs) = load_matrix(&a.inputs, &a.parse, "benchmark", progress)?;
    create_dir(&a.output)?;
    let cfg = CvConfig {
        folds: a.folds,
        trees: a.trees,
        seed: a.seed,
        smoothing,
        smoothing_order: match a.smoothing_order {
            SmoothingOrderArg::PreSplit => SmoothingOrder::PreSplit,
            SmoothingOrderArg::PostSplit => SmoothingOrder::PostSplit,
        },
    };
    progress.say(format!(
        "{}-fold cross-validation, {} trees, smoothing {:?}",
        cfg.folds, cfg.trees, a.smoothing
    ));
    let report = cross_validate(&data, &cfg)?;
    print!("{}", report.to_table());
    report.write_csv(&a.output)?;
    let json = a.output.join("report.json");
    std::fs::write(&json, serde_json::to_string_pretty(&report).expect("report serializes") + "\n")
        .map_err(|source| Error::Io {
            path: json.clone(),
            source,
        })?;
    let outputs = ["accuracy.csv", "importance.csv", "confusion.csv", "report.json"]
        .iter()
        .map(|f| a.output.join(f))
        .collect();
    let outcome = Outcome {
        outputs,
        manifest: None,
        row_errors,
    };
    Ok((outcome, a.output.join(MANIFEST_FILE), inputs, Some(a.seed)))
}

fn cmd_correlate(a: &CorrelateArgs, progress: &Progress) -> Result<Dispatched> {
    let (data, row_errors, inputs) = load_matrix(&a.inputs, &a.parse, "correlate", progress)?;
    create_dir(&a.output)?;
    let m = pearson_correlation_matrix(&data)?;
    let undefined = m.undefined();
    if !undefined.is_empty() {
        progress.say(format!("constant columns (correlation undefined): {}", undefined.join(", ")));
    }
    print!("{}", m.to_table());
    let path = a.output.join("correlation.csv");
    m.write_csv(&path)?;
    let outcome = Outcome {
        outputs: vec![path],
        manifest: None,
        row_errors,
    };
    Ok((outcome, a.output.join(MANIFEST_FILE), inputs, None))
}

fn cmd_smooth(a: &SmoothArgs, progress: &Progress) -> Result<Dispatched> {
    let cfg = a.kalman.config()?;
    let (data, row_errors, inputs) = load_matrix(&a.inputs, &a.parse, "smooth", progress)?;
    let smoothed = smooth_dataset(&data, &cfg)?;
    if let Some(dir) = a.output.parent() {
        create_dir(dir)?;
    }
    write_matrix(&smoothed, &a.output)?;
    progress.say(format!("wrote {} smoothed rows", smoothed.n_rows()));
    let outcome = Outcome {
        outputs: vec![a.output.clone()],
        manifest: None,
        row_errors,
    };
    let mut manifest = a.output.clone().into_os_string();
    manifest.push(".manifest.json");
    Ok((outcome, PathBuf::from(manifest), inputs, None))
}

/// `mac_address` followed by one column per feature.
pub fn write_matrix(data: &LabeledFeatureMatrix, path: &Path) -> Result<()> {
    let wrap = |source: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    let mut header = vec![MAC_COLUMN.to_string()];
    header.extend(data.feature_names.iter().cloned());
    w.write_record(&header).map_err(wrap)?;
    for (label, row) in data.labels.iter().zip(&data.rows) {
        let mut rec = vec![label.clone()];
        rec.extend(row.iter().map(|v| fmt_f64(*v)));
        w.write_record(&rec).map_err(wrap)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

impl From<SchemaArg> for SchemaKind {
    fn from(s: SchemaArg) -> Self {
        match s {
            SchemaArg::RawPreamble => SchemaKind::RawPreamble,
            SchemaArg::FeatureFull => SchemaKind::FeatureFull,
        }
    }
}
