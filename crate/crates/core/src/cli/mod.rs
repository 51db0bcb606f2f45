//! Command-line front end. Data goes to files or stdout, logs to stderr.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 partial success (some
//! items were skipped and reported).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::config::{load_config, RunConfig};
use crate::eval::{
    self, classification_accuracy, mcd, mos_aggregate, pir_confusion, CepstraSequence, ErrorRate,
    EvalError, EvalReport, UtteranceScore,
};
use crate::formats::{
    self, Batch, FormatError, PlanRecord, Transcript, MODEL_SCHEMA_VERSION, PLAN_SCHEMA_VERSION,
    REPORT_SCHEMA_VERSION, TRACK_SCHEMA_VERSION,
};
use crate::prompt::{request_plan, ControlMode, PromptRequest, ProviderError, ProviderKind};
use crate::prompt::PromptError;
use crate::prosody::{scale_track, ProsodyTrack, RawScalingPlan};
use crate::rank::{self, annotate_corpus, AnnotateOptions, Emotion, IntensityLevel, RankError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

fn version_text() -> &'static str {
    static TEXT: OnceLock<String> = OnceLock::new();
    TEXT.get_or_init(|| {
        format!(
            "{} (schemas: track {TRACK_SCHEMA_VERSION}, plan {PLAN_SCHEMA_VERSION}, \
             model {MODEL_SCHEMA_VERSION}, report {REPORT_SCHEMA_VERSION})",
            env!("CARGO_PKG_VERSION")
        )
    })
}

#[derive(Debug, Parser)]
#[command(name = "emoprosody", version = version_text(), about = "Emotion-intensity ranking and LLM-guided prosody scaling")]
pub struct Cli {
    /// TOML run configuration; relative paths inside resolve against its directory.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides `rank.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 means one per logical CPU.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// stub, stub:neutral, http or replay:<path>.
    #[arg(long, global = true)]
    pub provider: Option<String>,
    /// none, gl or local.
    #[arg(long = "prompt-control", global = true)]
    pub prompt_control: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one intensity ranker per (speaker, emotion).
    TrainRank {
        #[arg(long)]
        features: PathBuf,
        /// Directory receiving one model file per trained pair.
        #[arg(long)]
        out: PathBuf,
        /// Training summary CSV; defaults to `<out>/summary.csv`.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Score emotional utterances and bucket them into Low/Medium/High.
    Annotate {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        models: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also score neutral utterances under every model of their speaker.
        #[arg(long)]
        include_neutral: bool,
    },
    /// Ask the provider for a scaling plan per track.
    Prompt {
        #[arg(long)]
        tracks: PathBuf,
        /// Plans JSON-Lines output.
        #[arg(long)]
        out: PathBuf,
        /// Target emotion for tracks without an entry in `--targets`.
        #[arg(long)]
        emotion: Option<Emotion>,
        /// Annotation CSV giving per-utterance emotion and intensity bucket.
        #[arg(long)]
        targets: Option<PathBuf>,
        /// Overrides `provider.max_retries`.
        #[arg(long)]
        max_retries: Option<u32>,
    },
    /// Apply plans to tracks.
    Scale {
        #[arg(long)]
        tracks: PathBuf,
        /// Not needed with `--prompt-control none`.
        #[arg(long)]
        plans: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute a metric report.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(subcommand)]
    pub metric: Metric,
    /// Report JSON path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Plot-ready CSV; defaults to the report path with a `.csv` extension.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Metric {
    /// Word error rate between transcript CSVs.
    Wer {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        hypothesis: PathBuf,
    },
    /// Character error rate between transcript CSVs.
    Cer {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        hypothesis: PathBuf,
    },
    /// Mel cepstral distortion between two directories of cepstra.
    Mcd {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        synthesized: PathBuf,
    },
    /// Emotion classification accuracy from a label CSV.
    Eca {
        #[arg(long)]
        labels: PathBuf,
    },
    /// Perceptual intensity ranking confusion and accuracy.
    Pir {
        #[arg(long)]
        responses: PathBuf,
    },
    /// Mean opinion score with 95% confidence intervals.
    Mos {
        #[arg(long)]
        ratings: PathBuf,
        /// Attribute columns to group by.
        #[arg(long, value_delimiter = ',')]
        group_by: Vec<String>,
    },
}

/// A failure that ends the command with exit code 1.
#[derive(Debug)]
pub struct CliError(pub String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

macro_rules! from_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError(e.to_string())
            }
        }
    )*};
}
from_error!(FormatError, crate::config::ConfigError, PromptError, EvalError, RankError, rayon::ThreadPoolBuildError);

type CmdResult = Result<i32, CliError>;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            tracing::error!("{e}");
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

pub fn execute(cli: &Cli) -> CmdResult {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.rank.seed = seed;
    }
    if let Some(p) = &cli.provider {
        cfg.run.provider = p.clone();
    }
    if let Some(m) = &cli.prompt_control {
        cfg.run.prompt_control = m.clone();
    }
    let mode: ControlMode = cfg.run.prompt_control.parse()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build()?;
    pool.install(|| match &cli.command {
        Command::TrainRank { features, out, summary } => {
            train_rank_cmd(&cfg, features, out, summary.as_deref())
        }
        Command::Annotate {
            features,
            models,
            out,
            include_neutral,
        } => annotate_cmd(&cfg, features, models, out, *include_neutral || cfg.rank.include_neutral),
        Command::Prompt {
            tracks,
            out,
            emotion,
            targets,
            max_retries,
        } => prompt_cmd(&cfg, mode, tracks, out, *emotion, targets.as_deref(), *max_retries),
        Command::Scale { tracks, plans, out } => scale_cmd(&cfg, mode, tracks, plans.as_deref(), out),
        Command::Eval(args) => eval_cmd(&cfg, args),
    })
}

fn log_ledger<T>(path: &Path, batch: &Batch<T>) -> bool {
    for e in &batch.errors {
        tracing::warn!("{}: line {}: {}", path.display(), e.line, e.message);
    }
    !batch.errors.is_empty()
}

fn exit_for(partial: bool) -> i32 {
    if partial {
        EXIT_PARTIAL
    } else {
        EXIT_OK
    }
}

fn train_rank_cmd(cfg: &RunConfig, features: &Path, out: &Path, summary: Option<&Path>) -> CmdResult {
    let batch = formats::read_features(features, &cfg.features)?;
    let mut partial = log_ledger(features, &batch);
    let corpus = batch.items;
    if rank::training_keys(&corpus).is_empty() {
        return Err(CliError(format!(
            "{}: no emotional utterances, nothing to train",
            features.display()
        )));
    }
    let jobs = rank::train_all(&corpus, &cfg.rank.rank_config());

    let mut w = csv::Writer::from_writer(Vec::new());
    let header = [
        "speaker", "emotion", "status", "ordered_pairs", "similar_pairs", "training_utterances",
        "objective", "grad_norm", "iterations", "converged", "message",
    ];
    w.write_record(header).map_err(|e| CliError(e.to_string()))?;
    let mut trained = 0usize;
    for ((speaker, emotion), result) in &jobs {
        let record: Vec<String> = match result {
            Ok(model) => {
                let path = out.join(formats::model_file_name(speaker, *emotion));
                formats::write_model(&path, model)?;
                trained += 1;
                let m = &model.metadata;
                tracing::info!(%speaker, %emotion, objective = m.final_objective, "trained");
                vec![
                    speaker.clone(),
                    emotion.to_string(),
                    "trained".into(),
                    m.ordered_pairs.to_string(),
                    m.similar_pairs.to_string(),
                    m.training_utterances.to_string(),
                    m.final_objective.to_string(),
                    m.grad_norm.to_string(),
                    m.iterations.to_string(),
                    m.converged.to_string(),
                    String::new(),
                ]
            }
            Err(e) => {
                partial = true;
                tracing::warn!(%speaker, %emotion, "skipped: {e}");
                let mut r = vec![speaker.clone(), emotion.to_string(), "skipped".into()];
                r.extend(std::iter::repeat_n(String::new(), 7));
                r.push(e.to_string());
                r
            }
        };
        w.write_record(&record).map_err(|e| CliError(e.to_string()))?;
    }
    let summary_path = summary.map_or_else(|| out.join("summary.csv"), Path::to_path_buf);
    let bytes = w.into_inner().map_err(|e| CliError(e.to_string()))?;
    write_text(&summary_path, &String::from_utf8_lossy(&bytes))?;
    if trained == 0 {
        return Err(CliError("no (speaker, emotion) pair could be trained".into()));
    }
    Ok(exit_for(partial))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, text).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn annotate_cmd(cfg: &RunConfig, features: &Path, models: &Path, out: &Path, include_neutral: bool) -> CmdResult {
    let batch = formats::read_features(features, &cfg.features)?;
    let mut partial = log_ledger(features, &batch);
    let mut set = formats::read_model_dir(models)?;
    if set.is_empty() {
        return Err(CliError(format!("{}: no model files", models.display())));
    }
    if let Some(t) = cfg.rank.override_thresholds()? {
        for m in set.values_mut() {
            m.thresholds = t;
        }
    }
    let ann = annotate_corpus(&batch.items, &set, AnnotateOptions { include_neutral });
    for e in &ann.errors {
        partial = true;
        tracing::warn!(utterance = %e.utterance_id, "not annotated: {}", e.message);
    }
    formats::write_annotations(out, &ann.rows)?;
    Ok(exit_for(partial))
}

fn read_tracks_logged(path: &Path) -> Result<(Vec<ProsodyTrack<f64>>, bool), CliError> {
    let batch = formats::read_tracks(path)?;
    let partial = log_ledger(path, &batch);
    Ok((batch.items, partial))
}

fn prompt_cmd(
    cfg: &RunConfig,
    mode: ControlMode,
    tracks: &Path,
    out: &Path,
    emotion: Option<Emotion>,
    targets: Option<&Path>,
    max_retries: Option<u32>,
) -> CmdResult {
    let (tracks, mut partial) = read_tracks_logged(tracks)?;
    let mut target_map: BTreeMap<String, (Emotion, Option<IntensityLevel>)> = BTreeMap::new();
    if let Some(path) = targets {
        let batch = formats::read_annotations(path)?;
        partial |= log_ledger(path, &batch);
        for row in batch.items {
            target_map.insert(row.utterance_id, (row.emotion, Some(row.bucket)));
        }
    }
    let kind: ProviderKind = cfg.run.provider.parse()?;
    let provider = kind.build(&cfg.provider)?;
    let retries = max_retries.unwrap_or(cfg.provider.max_retries);
    let ranges = cfg.raw_ranges();

    let results: Vec<Result<PlanRecord, CliError>> = tracks
        .par_iter()
        .map(|track| {
            let (target, level) = match target_map.get(&track.utterance_id) {
                Some(&(e, l)) => (e, l),
                None => match emotion {
                    Some(e) => (e, None),
                    None => {
                        return Err(CliError(format!(
                            "{}: no target emotion (pass --emotion or list it in --targets)",
                            track.utterance_id
                        )))
                    }
                },
            };
            let mut req = PromptRequest::new(&track.utterance_id, &track.text, track.word_strings(), target, mode);
            req.intensity_bucket = level;
            match request_plan(&req, provider.as_ref(), retries, &ranges) {
                Ok(outcome) => {
                    for w in &outcome.warnings {
                        tracing::warn!(utterance = %track.utterance_id, "{w}");
                    }
                    if outcome.degraded {
                        tracing::warn!(utterance = %track.utterance_id, "falling back to the neutral plan");
                    }
                    Ok(PlanRecord {
                        utterance_id: track.utterance_id.clone(),
                        degraded: outcome.degraded,
                        attempts: outcome.attempts,
                        plan: outcome.plan,
                    })
                }
                Err(PromptError::Provider(e @ (ProviderError::Transport(_) | ProviderError::MissingReplay(_)))) => {
                    tracing::warn!(utterance = %track.utterance_id, "{e}; falling back to the neutral plan");
                    Ok(PlanRecord {
                        utterance_id: track.utterance_id.clone(),
                        degraded: true,
                        attempts: 0,
                        plan: RawScalingPlan::neutral(&req.words),
                    })
                }
                Err(e) => Err(CliError(format!("{}: {e}", track.utterance_id))),
            }
        })
        .collect();

    let mut plans = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(p) => {
                partial |= p.degraded;
                plans.push(p);
            }
            Err(e) if e.0.contains("authentication") || e.0.contains("configuration") => return Err(e),
            Err(e) => {
                partial = true;
                tracing::warn!("{e}");
            }
        }
    }
    formats::write_plans(out, &plans)?;
    Ok(exit_for(partial))
}

fn scale_cmd(cfg: &RunConfig, mode: ControlMode, tracks: &Path, plans: Option<&Path>, out: &Path) -> CmdResult {
    let (tracks, mut partial) = read_tracks_logged(tracks)?;
    if mode == ControlMode::None {
        formats::write_tracks(out, &tracks)?;
        return Ok(exit_for(partial));
    }
    let plans_path = plans.ok_or_else(|| CliError("--plans is required unless --prompt-control none".into()))?;
    let batch = formats::read_plans(plans_path)?;
    partial |= log_ledger(plans_path, &batch);
    let plan_map: BTreeMap<&str, &RawScalingPlan<f64>> =
        batch.items.iter().map(|r| (r.utterance_id.as_str(), &r.plan)).collect();
    let ranges = cfg.scaling_ranges();

    let results: Vec<Result<ProsodyTrack<f64>, String>> = tracks
        .par_iter()
        .map(|track| {
            let plan = plan_map
                .get(track.utterance_id.as_str())
                .ok_or_else(|| format!("{}: no plan", track.utterance_id))?;
            let plan = if mode == ControlMode::LocalOnly {
                (*plan).clone().local_only()
            } else {
                (*plan).clone()
            };
            let scaled = scale_track(track, &plan, &ranges).map_err(|e| e.to_string())?;
            for w in &scaled.warnings {
                tracing::warn!(utterance = %track.utterance_id, "{w}");
            }
            Ok(scaled.track)
        })
        .collect();
    let mut scaled = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(t) => scaled.push(t),
            Err(e) => {
                partial = true;
                tracing::warn!("skipped: {e}");
            }
        }
    }
    formats::write_tracks(out, &scaled)?;
    Ok(exit_for(partial))
}

fn eval_cmd(cfg: &RunConfig, args: &EvalArgs) -> CmdResult {
    let (mut report, partial) = match &args.metric {
        Metric::Wer { reference, hypothesis } => edit_report("wer", reference, hypothesis, eval::wer)?,
        Metric::Cer { reference, hypothesis } => edit_report("cer", reference, hypothesis, eval::cer)?,
        Metric::Mcd { reference, synthesized } => mcd_report(cfg, reference, synthesized)?,
        Metric::Eca { labels } => {
            let batch = formats::read_labels(labels)?;
            let partial = log_ledger(labels, &batch);
            let pred: Vec<&str> = batch.items.iter().map(|r| r.pred.as_str()).collect();
            let truth: Vec<&str> = batch.items.iter().map(|r| r.truth.as_str()).collect();
            let acc = classification_accuracy(&pred, &truth)?;
            let scores = batch
                .items
                .iter()
                .map(|r| UtteranceScore {
                    utterance_id: r.utterance_id.clone(),
                    value: if r.pred == r.truth { 1.0 } else { 0.0 },
                })
                .collect();
            let mut report = EvalReport::from_scores("eca", scores);
            report.accuracy = Some(acc);
            (report, partial)
        }
        Metric::Pir { responses } => {
            let batch = formats::read_pir_responses(responses)?;
            let partial = log_ledger(responses, &batch);
            (EvalReport::pir(pir_confusion(&batch.items)?), partial)
        }
        Metric::Mos { ratings, group_by } => {
            let batch = formats::read_mos_ratings(ratings)?;
            let partial = log_ledger(ratings, &batch);
            let mut report = EvalReport::mos(mos_aggregate(&batch.items, group_by)?);
            if !group_by.is_empty() {
                report = report.with_config("group_by", group_by.join(","));
            }
            (report, partial)
        }
    };
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}_report.json", report.metric)));
    let csv_path = args.csv.clone().unwrap_or_else(|| out.with_extension("csv"));
    report.errors.sort();
    formats::write_report(&out, &report)?;
    formats::write_report_csv(&csv_path, &report)?;
    tracing::info!(metric = %report.metric, mean = report.aggregate.mean, count = report.aggregate.count, "report written");
    Ok(exit_for(partial || !report.errors.is_empty()))
}

type EditFn = fn(&str, &str) -> Result<ErrorRate, EvalError>;

fn edit_report(metric: &str, reference: &Path, hypothesis: &Path, f: EditFn) -> Result<(EvalReport, bool), CliError> {
    let refs = formats::read_transcripts(reference)?;
    let hyps = formats::read_transcripts(hypothesis)?;
    let partial = log_ledger(reference, &refs) | log_ledger(hypothesis, &hyps);
    let hyp_map: BTreeMap<&str, &Transcript> = hyps.items.iter().map(|t| (t.utterance_id.as_str(), t)).collect();
    let results: Vec<Result<(String, ErrorRate), String>> = refs
        .items
        .par_iter()
        .map(|r| {
            let h = hyp_map
                .get(r.utterance_id.as_str())
                .ok_or_else(|| format!("{}: no hypothesis transcript", r.utterance_id))?;
            f(&r.text, &h.text)
                .map(|rate| (r.utterance_id.clone(), rate))
                .map_err(|e| format!("{}: {e}", r.utterance_id))
        })
        .collect();
    let (mut edits, mut len) = (0usize, 0usize);
    let mut scores = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok((id, rate)) => {
                edits += rate.edits;
                len += rate.reference_len;
                scores.push(UtteranceScore { utterance_id: id, value: rate.rate });
            }
            Err(e) => errors.push(e),
        }
    }
    if scores.is_empty() {
        return Err(CliError(format!("{metric}: no utterance could be scored")));
    }
    let mut report = EvalReport::from_scores(metric, scores).with_config("normalization", "lowercase, punctuation stripped");
    report.pooled = Some(edits as f64 / len as f64);
    report.errors = errors;
    Ok((report, partial))
}

fn mcd_report(cfg: &RunConfig, reference: &Path, synthesized: &Path) -> Result<(EvalReport, bool), CliError> {
    let refs = formats::read_cepstra_dir(reference)?;
    let syns = formats::read_cepstra_dir(synthesized)?;
    let syn_map: BTreeMap<&str, &CepstraSequence<f64>> = syns.iter().map(|s| (s.utterance_id.as_str(), s)).collect();
    let mcd_cfg = cfg.eval.mcd_config();
    let results: Vec<Result<UtteranceScore, String>> = refs
        .par_iter()
        .map(|r| {
            let s = syn_map
                .get(r.utterance_id.as_str())
                .ok_or_else(|| format!("{}: no synthesized cepstra", r.utterance_id))?;
            mcd(r, s, mcd_cfg)
                .map(|m| UtteranceScore { utterance_id: r.utterance_id.clone(), value: m.mcd })
                .map_err(|e| format!("{}: {e}", r.utterance_id))
        })
        .collect();
    let (scores, errors): (Vec<_>, Vec<_>) = results.into_iter().partition(Result::is_ok);
    let scores: Vec<UtteranceScore> = scores.into_iter().map(Result::unwrap).collect();
    if scores.is_empty() {
        return Err(CliError("mcd: no utterance could be scored".into()));
    }
    let mut report = EvalReport::from_scores("mcd", scores)
        .with_config("mcd_exclude_c0", mcd_cfg.exclude_c0)
        .with_config("mcd_dtw", mcd_cfg.dtw);
    report.errors = errors.into_iter().map(Result::unwrap_err).collect();
    Ok((report, false))
}

/// Logging to stderr, filtered by `EMOPROSODY_LOG` (default `info`).
pub fn init_logging() {
    let filter = tracing_subscriber::EnvFilter::try_from_env("EMOPROSODY_LOG")
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info"));
    let _ = tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .try_init();
}
