//! The `cowvox` command line.
//!
//! Exit codes: 0 success, 64 usage error, 2 nothing extracted, 3 the
//! evaluation protocol cannot be applied to the data (for example a class
//! smaller than k), 1 any other failure. Diagnostics go to stderr; stdout
//! carries only the summary line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dsp::AnalysisConfig;
use crate::features::{extract_corpus, FeatureError};
use crate::importance::{lofo_importance, render_importance_chart};
use crate::io::{read_features_csv, write_features_csv, write_wav, Manifest};
use crate::learn::{
    cross_validate, holdout_evaluate, CvConfig, CvReport, GridScope, LearnError, StackConfig, Subset, Target,
    TaskSpec,
};
use crate::synth;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_EMPTY: i32 = 2;
pub const EXIT_PROTOCOL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "cowvox", version, about = "Acoustic features and explainable classification of cattle calls")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract the 23 acoustic features of every call in a manifest.
    Extract(ExtractArgs),
    /// k-fold cross-validation of the bagged stacked ensemble.
    Evaluate(EvalArgs),
    /// Leave-one-feature-out importance with a bar chart.
    Importance(EvalArgs),
    /// Single stratified 80/20 train/test split.
    Split(EvalArgs),
    /// Generate synthetic test signals or feature tables.
    Synth(SynthArgs),
}

#[derive(Debug, Args, Serialize)]
struct ExtractArgs {
    /// CSV with header `file,cow_id,call_type`.
    #[arg(long)]
    manifest: PathBuf,
    /// Directory that manifest paths are relative to.
    #[arg(long)]
    audio_root: PathBuf,
    /// Output feature table.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TaskArg {
    Calltype,
    Cowid,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SubsetArg {
    All,
    Hf,
    Lf,
}

#[derive(Debug, Args, Serialize)]
struct EvalArgs {
    /// Feature table written by `extract` (or `synth blobs-corpus`).
    #[arg(long)]
    features: PathBuf,
    #[arg(long, value_enum)]
    task: TaskArg,
    #[arg(long, value_enum, default_value = "all")]
    subset: SubsetArg,
    /// Cross-validation folds.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(2..))]
    k: u32,
    /// Bagged instances per ensemble.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    r: u32,
    /// Fraction of the training rows in each bag.
    #[arg(long, default_value_t = 0.9)]
    fraction: f64,
    /// Minimum bags per training row (default r/2).
    #[arg(long)]
    min_inclusion: Option<usize>,
    /// Internal folds for stacking and grid search.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(2..))]
    internal_folds: u32,
    /// Meta-learner grid search in every bag, or once per ensemble.
    #[arg(long, value_enum, default_value = "per-bag")]
    grid: GridArg,
    #[arg(long, default_value_t = 20220711)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GridArg {
    PerBag,
    Shared,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SynthKind {
    Sine,
    Sawtooth,
    AmTone,
    Formant,
    Noise,
    BlobsCorpus,
}

#[derive(Debug, Args, Serialize)]
struct SynthArgs {
    #[arg(value_enum)]
    kind: SynthKind,
    /// Tone, fundamental or carrier frequency in Hz.
    #[arg(long, default_value_t = 440.0)]
    freq: f64,
    /// Duration in seconds.
    #[arg(long, default_value_t = 1.0)]
    dur: f64,
    #[arg(long, default_value_t = 44100)]
    sr: u32,
    /// Peak amplitude in (0, 1].
    #[arg(long, default_value_t = 0.8)]
    amp: f64,
    /// Resonance centres in Hz for `formant` (comma separated).
    #[arg(long = "f", value_delimiter = ',', default_values_t = [800.0, 1600.0])]
    formants: Vec<f64>,
    /// Resonance bandwidths in Hz; the last value is repeated as needed.
    #[arg(long, value_delimiter = ',', default_values_t = [80.0])]
    bw: Vec<f64>,
    /// Fundamental of the `formant` source; omit for a noise source.
    #[arg(long, default_value_t = 150.0)]
    f0: f64,
    /// Use white noise instead of a pulse train as the `formant` source.
    #[arg(long)]
    noise_source: bool,
    /// Modulation rate (Hz) for `am-tone`.
    #[arg(long, default_value_t = 5.0)]
    am_rate: f64,
    /// Peak-to-trough modulation depth (dB) for `am-tone`.
    #[arg(long, default_value_t = 6.0)]
    am_depth_db: f64,
    /// Harmonics in the `sawtooth`.
    #[arg(long, default_value_t = 20)]
    harmonics: usize,
    #[arg(long, default_value_t = 20)]
    classes: usize,
    #[arg(long, default_value_t = 50)]
    per_class: usize,
    /// Distance between blob centres in standard deviations.
    #[arg(long, default_value_t = 6.0)]
    separation: f64,
    #[arg(long, default_value_t = 20220711)]
    seed: u64,
    /// Output WAV (signals) or CSV (`blobs-corpus`).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn failure(message: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: message.to_string(),
        }
    }
}

impl From<LearnError> for CliError {
    fn from(e: LearnError) -> Self {
        let code = match e {
            LearnError::ClassTooSmall { .. }
            | LearnError::InfeasibleCoverage { .. }
            | LearnError::DegenerateBag => EXIT_PROTOCOL,
            LearnError::BadK(_) | LearnError::BadConfig(_) | LearnError::InvalidTask(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::failure(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::failure(e)
    }
}

#[derive(Serialize)]
struct RunRecord<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    jobs: Option<usize>,
    params: &'a T,
    #[serde(skip_serializing_if = "Option::is_none")]
    cv: Option<CvConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stack: Option<&'a StackConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    analysis: Option<&'a AnalysisConfig>,
}

fn write_run<T: Serialize>(dir: &Path, record: &RunRecord<'_, T>) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("run.json"), serde_json::to_string_pretty(record)? + "\n")?;
    Ok(())
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let jobs = cli.jobs;
    let result = match jobs {
        Some(0) => Err(CliError::usage("--jobs must be at least 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command, jobs)),
            Err(e) => Err(CliError::failure(e)),
        },
        None => dispatch(cli.command, jobs),
    };
    match result {
        Ok(summary) => {
            println!("{summary}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("cowvox: {}", e.message);
            e.code
        }
    }
}

fn dispatch(command: Command, jobs: Option<usize>) -> Result<String, CliError> {
    match command {
        Command::Extract(a) => cmd_extract(&a, jobs),
        Command::Evaluate(a) => cmd_evaluate(&a, jobs),
        Command::Importance(a) => cmd_importance(&a, jobs),
        Command::Split(a) => cmd_split(&a, jobs),
        Command::Synth(a) => cmd_synth(&a, jobs),
    }
}

fn cmd_extract(a: &ExtractArgs, jobs: Option<usize>) -> Result<String, CliError> {
    let cfg = AnalysisConfig::default();
    let dir = parent_dir(&a.out);
    write_run(
        &dir,
        &RunRecord {
            tool: "cowvox",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: "extract",
            jobs,
            params: a,
            cv: None,
            stack: None,
            analysis: Some(&cfg),
        },
    )?;
    let manifest = Manifest::parse(&a.manifest, &a.audio_root).map_err(CliError::failure)?;
    let log_path = a.out.with_extension("log.json");
    let extraction = match extract_corpus(&manifest, &cfg) {
        Ok(x) => x,
        Err(FeatureError::NothingExtracted) => {
            return Err(CliError {
                code: EXIT_EMPTY,
                message: format!("no call of {} could be extracted", manifest.entries.len()),
            })
        }
        Err(e) => return Err(CliError::failure(e)),
    };
    for f in &extraction.failures {
        eprintln!("skipped row {} ({}): {}: {}", f.row, f.path, f.kind, f.message);
    }
    write_features_csv(&extraction.corpus, &a.out).map_err(CliError::failure)?;
    let log = serde_json::json!({
        "extracted": extraction.corpus.len(),
        "failed": extraction.failures.len(),
        "failures": extraction.failures,
        "formant_medians_hz": extraction.formant_medians_hz,
        "imputed": extraction.imputation.iter().filter(|f| f.imputed.iter().any(|&b| b)).collect::<Vec<_>>(),
    });
    std::fs::write(&log_path, serde_json::to_string_pretty(&log)? + "\n")?;
    Ok(format!(
        "extracted {} of {} calls -> {}",
        extraction.corpus.len(),
        manifest.entries.len(),
        a.out.display()
    ))
}

fn task_spec(a: &EvalArgs) -> Result<TaskSpec, CliError> {
    let target = match a.task {
        TaskArg::Calltype => Target::CallType,
        TaskArg::Cowid => Target::CowId,
    };
    let subset = match a.subset {
        SubsetArg::All => Subset::All,
        SubsetArg::Hf => Subset::Hf,
        SubsetArg::Lf => Subset::Lf,
    };
    TaskSpec::new(target, subset).map_err(|e| CliError::usage(e.to_string()))
}

fn configs(a: &EvalArgs) -> Result<(CvConfig, StackConfig), CliError> {
    let cv = CvConfig {
        k: a.k as usize,
        r: a.r as usize,
        subsample_fraction: a.fraction,
        min_inclusion: a.min_inclusion,
        seed: a.seed,
    };
    cv.validate().map_err(|e| CliError::usage(e.to_string()))?;
    let stack = StackConfig {
        internal_folds: a.internal_folds as usize,
        grid_scope: match a.grid {
            GridArg::PerBag => GridScope::PerBag,
            GridArg::Shared => GridScope::Shared,
        },
        ..StackConfig::default()
    };
    Ok((cv, stack))
}

struct Prepared {
    task: TaskSpec,
    cv: CvConfig,
    stack: StackConfig,
    data: crate::learn::Dataset,
    source_ids: Vec<String>,
}

fn prepare(a: &EvalArgs, name: &str, jobs: Option<usize>) -> Result<Prepared, CliError> {
    let task = task_spec(a)?;
    let (cv, stack) = configs(a)?;
    write_run(
        &a.out_dir,
        &RunRecord {
            tool: "cowvox",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: name,
            jobs,
            params: a,
            cv: Some(cv),
            stack: Some(&stack),
            analysis: None,
        },
    )?;
    let corpus = read_features_csv(&a.features).map_err(CliError::failure)?;
    let data = task.dataset(&corpus).map_err(|e| CliError {
        code: EXIT_PROTOCOL,
        message: e.to_string(),
    })?;
    let source_ids = task.source_ids(&corpus);
    Ok(Prepared {
        task,
        cv,
        stack,
        data,
        source_ids,
    })
}

/// `source_id,fold` for every row, in table order.
pub fn fold_assignment_csv(source_ids: &[String], assignment: &[usize]) -> String {
    let mut s = String::from("source_id,fold\n");
    for (id, f) in source_ids.iter().zip(assignment) {
        let _ = writeln!(s, "{id},{f}");
    }
    s
}

/// Confusion matrix with true classes as rows.
pub fn confusion_csv(classes: &[String], confusion: &[Vec<usize>]) -> String {
    let mut s = String::from("true\\predicted");
    for c in classes {
        let _ = write!(s, ",{c}");
    }
    s.push('\n');
    for (c, row) in classes.iter().zip(confusion) {
        s.push_str(c);
        for v in row {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

fn write_report(dir: &Path, report: &CvReport, source_ids: &[String]) -> Result<(), CliError> {
    std::fs::write(dir.join("cv_report.json"), serde_json::to_string_pretty(report)? + "\n")?;
    std::fs::write(
        dir.join("fold_assignment.csv"),
        fold_assignment_csv(source_ids, &report.fold_assignment),
    )?;
    for f in &report.folds {
        std::fs::write(
            dir.join(format!("confusion_fold{}.csv", f.fold)),
            confusion_csv(&report.classes, &f.confusion),
        )?;
    }
    Ok(())
}

fn cmd_evaluate(a: &EvalArgs, jobs: Option<usize>) -> Result<String, CliError> {
    let p = prepare(a, "evaluate", jobs)?;
    let report = cross_validate(&p.data, &p.task.to_string(), &p.cv, &p.stack)?;
    write_report(&a.out_dir, &report, &p.source_ids)?;
    Ok(report.summary_line())
}

fn cmd_importance(a: &EvalArgs, jobs: Option<usize>) -> Result<String, CliError> {
    let p = prepare(a, "importance", jobs)?;
    let report = lofo_importance(&p.data, &p.task.to_string(), &p.cv, &p.stack)?;
    report.write_csv(&a.out_dir.join("importance.csv"))?;
    std::fs::write(
        a.out_dir.join("importance.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    std::fs::write(a.out_dir.join("importance.svg"), render_importance_chart(&report))?;
    let top = report.ranked()[0];
    Ok(format!("top feature: {} ({:.2}%)", top.feature, top.mean_pct))
}

fn cmd_split(a: &EvalArgs, jobs: Option<usize>) -> Result<String, CliError> {
    let p = prepare(a, "split", jobs)?;
    let report = holdout_evaluate(&p.data, &p.task.to_string(), &p.cv, &p.stack)?;
    std::fs::write(
        a.out_dir.join("holdout_report.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    std::fs::write(
        a.out_dir.join("confusion_holdout.csv"),
        confusion_csv(&report.classes, &report.confusion),
    )?;
    Ok(format!(
        "{} 80/20 split: test accuracy {:.1}% (train {:.1}%), macro-F1 {:.3}",
        report.task,
        100.0 * report.test.accuracy,
        100.0 * report.train.accuracy,
        report.test.f1
    ))
}

fn cmd_synth(a: &SynthArgs, jobs: Option<usize>) -> Result<String, CliError> {
    if !(a.dur > 0.0 && a.dur <= 600.0) {
        return Err(CliError::usage("--dur must lie in (0, 600] seconds"));
    }
    if !(a.amp > 0.0 && a.amp <= 1.0) {
        return Err(CliError::usage("--amp must lie in (0, 1]"));
    }
    if a.sr < 1000 {
        return Err(CliError::usage("--sr must be at least 1000 Hz"));
    }
    let nyquist = a.sr as f64 / 2.0;
    let in_band = |f: f64| f > 0.0 && f < nyquist;
    write_run(
        &parent_dir(&a.out),
        &RunRecord {
            tool: "cowvox",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: "synth",
            jobs,
            params: a,
            cv: None,
            stack: None,
            analysis: None,
        },
    )?;
    let samples = match a.kind {
        SynthKind::Sine | SynthKind::Sawtooth | SynthKind::AmTone if !in_band(a.freq) => {
            return Err(CliError::usage("--freq must lie between 0 and the Nyquist frequency"))
        }
        SynthKind::Sine => synth::sine(a.freq, a.dur, a.sr, a.amp),
        SynthKind::Sawtooth => synth::sawtooth(a.freq, a.dur, a.sr, a.harmonics.max(1), a.amp),
        SynthKind::AmTone => {
            if !(a.am_rate > 0.0 && a.am_depth_db >= 0.0) {
                return Err(CliError::usage("--am-rate must be positive and --am-depth-db non-negative"));
            }
            synth::am_tone_db(a.freq, a.am_rate, a.am_depth_db, a.dur, a.sr, a.amp)
        }
        SynthKind::Noise => synth::white_noise(a.dur, a.sr, a.amp, a.seed),
        SynthKind::Formant => {
            if a.formants.is_empty() || !a.formants.iter().all(|&f| in_band(f)) {
                return Err(CliError::usage("--f needs resonance centres below the Nyquist frequency"));
            }
            if a.bw.is_empty() || a.bw.iter().any(|&b| b <= 0.0) {
                return Err(CliError::usage("--bw values must be positive"));
            }
            let bw: Vec<f64> = (0..a.formants.len())
                .map(|i| a.bw[i.min(a.bw.len() - 1)])
                .collect();
            let (x, truth) = if a.noise_source {
                synth::resonated_noise(&a.formants, &bw, a.dur, a.sr, a.amp, a.seed)
            } else {
                if !in_band(a.f0) {
                    return Err(CliError::usage("--f0 must lie between 0 and the Nyquist frequency"));
                }
                synth::source_filter(a.f0, &a.formants, &bw, a.dur, a.sr, a.amp)
            };
            std::fs::write(
                a.out.with_extension("json"),
                serde_json::to_string_pretty(&truth)? + "\n",
            )?;
            x
        }
        SynthKind::BlobsCorpus => {
            if a.classes < 2 || a.per_class < 1 {
                return Err(CliError::usage("--classes must be at least 2 and --per-class at least 1"));
            }
            let corpus = synth::blobs_corpus(a.classes, a.per_class, a.separation, a.seed);
            write_features_csv(&corpus, &a.out).map_err(CliError::failure)?;
            return Ok(format!("wrote {} synthetic rows -> {}", corpus.len(), a.out.display()));
        }
    };
    write_wav(&a.out, &samples, a.sr)?;
    Ok(format!("wrote {} samples at {} Hz -> {}", samples.len(), a.sr, a.out.display()))
}
