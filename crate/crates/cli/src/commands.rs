use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use flamescope::classifier::{self, build_model, load_model, save_model, ConvSpec, Example};
use flamescope::corpus::{load_jsonl, CleanComment, Corpus};
use flamescope::embedding::{self, load_embeddings, save_embeddings, LookupMode, SubwordConfig};
use flamescope::flaming::{self, BucketWidth, CommentLabel, DetectConfig, FlamingReport, Hostile, Sigma};
use flamescope::io::{atomic_write, read_jsonl, write_jsonl};
use flamescope::lexicon::{label_corpus, Denominator, EmojiTable, LabeledComment, Lexicon, SentimentLabel};
use flamescope::metrics::{macro_metrics, ConfusionMatrix, MetricsTable, Orientation};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::Io;

/// A user-facing input problem detected by the command layer itself.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_err(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

fn require(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(input_err(format!("{}: no such file", path.display())))
    }
}

fn pick(flag: Option<PathBuf>, file: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
    flag.or_else(|| file.clone())
        .ok_or_else(|| input_err(format!("no {what} given (flag or config [paths])")))
}

fn summary(value: serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string(&value)?);
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let bytes = serde_json::to_vec_pretty(value)?;
    atomic_write(path, |w| {
        w.write_all(&bytes)?;
        w.write_all(b"\n")
    })?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct PreprocessArgs {
    #[command(flatten)]
    io: Io,
}

pub fn preprocess(a: PreprocessArgs) -> Result<()> {
    require(&a.io.input)?;
    let report = load_jsonl(&a.io.input)?;
    for s in &report.skipped {
        eprintln!("{}:{}: skipped: {}", a.io.input.display(), s.line, s.reason);
    }
    let corpus = Corpus::from_raw(&report.comments, Some(a.io.input.clone()));
    corpus.save(&a.io.output)?;
    let c = corpus.counts;
    eprintln!("kept={} dropped={}", c.kept, c.dropped);
    summary(json!({
        "command": "preprocess",
        "input": a.io.input,
        "output": a.io.output,
        "loaded": c.loaded,
        "kept": c.kept,
        "dropped": c.dropped,
        "skipped_lines": report.skipped.len(),
    }))
}

#[derive(Args, Debug)]
pub struct LabelArgs {
    #[command(flatten)]
    io: Io,
    /// Tab-separated phrase/score lexicon.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Emoji polarity table (default: the built-in table).
    #[arg(long)]
    emoji: Option<PathBuf>,
    /// Longest lexicon phrase to match, in tokens.
    #[arg(long)]
    max_n: Option<usize>,
    /// Divide by N + C + S + E as signed values instead of magnitudes.
    #[arg(long)]
    strict_eq1: bool,
}

pub fn label(a: LabelArgs, cfg: &RunConfig) -> Result<()> {
    require(&a.io.input)?;
    let lex_path = pick(a.lexicon, &cfg.paths.lexicon, "lexicon")?;
    require(&lex_path)?;
    let mut lexicon = Lexicon::load(&lex_path)?;
    if let Some(n) = a.max_n.or(cfg.label.max_n) {
        lexicon = lexicon.with_max_n(n)?;
    }
    let emojis = match a.emoji.or_else(|| cfg.paths.emoji.clone()) {
        Some(p) => {
            require(&p)?;
            EmojiTable::load(&p)?
        }
        None => EmojiTable::shipped(),
    };
    let mode = if a.strict_eq1 || cfg.label.strict_eq1 == Some(true) {
        Denominator::Literal
    } else {
        Denominator::Absolute
    };
    let corpus = Corpus::load(&a.io.input)?;
    let labeled = label_corpus(&corpus, &lexicon, &emojis, mode)?;
    write_jsonl(&a.io.output, &labeled.comments)?;
    let dist: serde_json::Map<String, serde_json::Value> = SentimentLabel::ALL
        .iter()
        .map(|l| (l.name().to_owned(), json!(labeled.distribution.count(*l))))
        .collect();
    summary(json!({
        "command": "label",
        "input": a.io.input,
        "output": a.io.output,
        "comments": labeled.comments.len(),
        "distribution": dist,
        "lexicon_entries": lexicon.len(),
        "duplicate_lexicon_lines": lexicon.duplicate_lines(),
    }))
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    #[command(flatten)]
    io: Io,
    /// word2vec or fasttext.
    #[arg(long)]
    method: Option<LookupMode>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    min_count: Option<u64>,
    /// Shortest character n-gram (fasttext).
    #[arg(long)]
    subword_min: Option<usize>,
    /// Longest character n-gram (fasttext).
    #[arg(long)]
    subword_max: Option<usize>,
    /// Hash buckets for n-grams (fasttext).
    #[arg(long)]
    buckets: Option<u32>,
}

pub fn train_embed(a: EmbedArgs, cfg: RunConfig) -> Result<()> {
    require(&a.io.input)?;
    let method = a.method.or(cfg.embed.method).unwrap_or_default();
    let mut ec = cfg.embed.config;
    macro_rules! set {
        ($($f:ident <- $v:expr),*) => { $(if let Some(v) = $v { ec.$f = v; })* };
    }
    set!(dim <- a.dim, window <- a.window, negatives <- a.negatives, epochs <- a.epochs,
         initial_lr <- a.lr, min_count <- a.min_count);
    if method == LookupMode::FastText {
        let mut sw = ec.subword.unwrap_or_default();
        set_opt(&mut sw.min_n, a.subword_min);
        set_opt(&mut sw.max_n, a.subword_max);
        set_opt(&mut sw.buckets, a.buckets);
        ec.subword = Some(sw);
    } else {
        ec.subword = None;
    }
    let sentences: Vec<CleanComment> = read_jsonl(&a.io.input)?;
    let tokens: Vec<&[String]> = sentences.iter().map(|c| c.tokens.as_slice()).collect();
    let trained = embedding::train::<f32, _>(&tokens, &ec)?;
    save_embeddings(&trained.matrix, &a.io.output)?;
    summary(json!({
        "command": "train-embed",
        "input": a.io.input,
        "output": a.io.output,
        "method": method,
        "vocab": trained.vocab.len(),
        "dim": ec.dim,
        "epoch_losses": trained.epoch_losses,
        "subword": ec.subword.map(|s: SubwordConfig| json!({
            "min_n": s.min_n, "max_n": s.max_n, "buckets": s.buckets,
            "stored_buckets": trained.matrix.subword().map_or(0, |t| t.bucket_ids.len()),
        })),
    }))
}

fn set_opt<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

#[derive(Args, Debug)]
pub struct ClfArgs {
    /// Labeled comments (output of `label`).
    #[arg(long)]
    input: PathBuf,
    /// Word vectors (output of `train-embed`).
    #[arg(long)]
    embeddings: PathBuf,
    /// Model checkpoint to write.
    #[arg(long)]
    output: PathBuf,
    /// Where to write the per-epoch training report.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    max_tokens: Option<usize>,
    /// Filters in each of the three conv layers.
    #[arg(long)]
    filters: Option<usize>,
    #[arg(long)]
    kernel_width: Option<usize>,
    #[arg(long)]
    pool: Option<usize>,
    #[arg(long)]
    lstm_hidden: Option<usize>,
    /// Two comma-separated sizes, e.g. 128,64.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    dense: Option<Vec<usize>>,
    #[arg(long)]
    dropout_lstm: Option<f64>,
    #[arg(long)]
    dropout_dense: Option<f64>,
    /// Update the embedding table during training.
    #[arg(long)]
    fine_tune: bool,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    val_split: Option<f64>,
}

pub fn train_clf(a: ClfArgs, cfg: RunConfig) -> Result<()> {
    require(&a.input)?;
    require(&a.embeddings)?;
    let emb = load_embeddings::<f32>(&a.embeddings)?;
    let mut mc = cfg.model;
    mc.embed_dim = emb.dim();
    set_opt(&mut mc.max_tokens, a.max_tokens);
    set_opt(&mut mc.pool, a.pool);
    set_opt(&mut mc.lstm_hidden, a.lstm_hidden);
    set_opt(&mut mc.dropout_lstm, a.dropout_lstm);
    set_opt(&mut mc.dropout_dense, a.dropout_dense);
    if let Some(d) = a.dense {
        mc.dense_sizes = [d[0], d[1]];
    }
    if a.filters.is_some() || a.kernel_width.is_some() {
        for c in &mut mc.conv_layers {
            *c = ConvSpec {
                filters: a.filters.unwrap_or(c.filters),
                kernel_width: a.kernel_width.unwrap_or(c.kernel_width),
            };
        }
    }
    mc.fine_tune_embeddings |= a.fine_tune;
    let mut tc = cfg.train;
    set_opt(&mut tc.epochs, a.epochs);
    set_opt(&mut tc.batch_size, a.batch_size);
    set_opt(&mut tc.lr, a.lr);
    set_opt(&mut tc.val_split, a.val_split);

    let mut model = build_model(&mc, &emb)?;
    let labeled: Vec<LabeledComment> = read_jsonl(&a.input)?;
    let examples: Vec<Example> = labeled
        .iter()
        .filter_map(|c| Example::from_tokens(&model, &c.comment.tokens, c.label))
        .collect();
    let report = classifier::train(&mut model, examples, &tc)?;
    save_model(&model, &a.output)?;
    if let Some(p) = &a.report {
        write_json(p, &report)?;
    }
    let last = report.epochs.last().expect("at least one epoch");
    summary(json!({
        "command": "train-clf",
        "input": a.input,
        "output": a.output,
        "parameters": model.params.len(),
        "trainable_parameters": model.params.trainable_len(),
        "train_size": report.train_size,
        "val_size": report.val_size,
        "epochs_run": report.epochs.len(),
        "chosen_epoch": report.chosen_epoch,
        "selection": report.selection,
        "final_train_loss": last.train_loss,
        "final_train_accuracy": last.train_accuracy,
    }))
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long)]
    model: PathBuf,
}

#[derive(Serialize)]
struct Prediction {
    post_id: String,
    comment_id: String,
    created_time: String,
    label: SentimentLabel,
    probabilities: [f32; classifier::CLASSES],
}

pub fn predict(a: PredictArgs) -> Result<()> {
    require(&a.io.input)?;
    require(&a.model)?;
    let model = load_model::<f32>(&a.model)?;
    let comments: Vec<CleanComment> = read_jsonl(&a.io.input)?;
    let mut out = Vec::with_capacity(comments.len());
    for c in &comments {
        let (label, probabilities) = model
            .predict_comment(&c.tokens)
            .with_context(|| format!("comment {}", c.comment_id))?;
        out.push(Prediction {
            post_id: c.post_id.clone(),
            comment_id: c.comment_id.clone(),
            created_time: c.created_time.to_rfc3339(),
            label,
            probabilities,
        });
    }
    write_jsonl(&a.io.output, &out)?;
    let dist = flamescope::lexicon::ClassDistribution::from_labels(out.iter().map(|p| p.label));
    summary(json!({
        "command": "predict",
        "input": a.io.input,
        "output": a.io.output,
        "comments": out.len(),
        "distribution": dist,
    }))
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Confusion matrix JSON: {"classes": [...], "rows": [[...], ...]}.
    #[arg(long, conflicts_with_all = ["model", "input"])]
    matrix: Option<PathBuf>,
    /// Model checkpoint, evaluated on --input.
    #[arg(long, requires = "input")]
    model: Option<PathBuf>,
    /// Labeled comments to evaluate the model on.
    #[arg(long)]
    input: Option<PathBuf>,
    /// standard (rows = actual) or paper (per-class rates swapped).
    #[arg(long)]
    orientation: Option<Orientation>,
    /// Also write the metrics JSON here.
    #[arg(long)]
    output: Option<PathBuf>,
}

pub fn evaluate(a: EvaluateArgs, cfg: &RunConfig) -> Result<()> {
    let orientation = a.orientation.or(cfg.evaluate.orientation).unwrap_or_default();
    let (matrix, accuracy) = match (&a.matrix, &a.model, &a.input) {
        (Some(p), _, _) => {
            require(p)?;
            let bytes = std::fs::read(p).with_context(|| p.display().to_string())?;
            let m: ConfusionMatrix =
                serde_json::from_slice(&bytes).map_err(|e| input_err(format!("{}: {e}", p.display())))?;
            m.validate()?;
            let acc = m.accuracy::<f64>();
            (m, acc)
        }
        (None, Some(model), Some(input)) => {
            require(model)?;
            require(input)?;
            let model = load_model::<f32>(model)?;
            let labeled: Vec<LabeledComment> = read_jsonl(input)?;
            let data: Vec<(Vec<String>, SentimentLabel)> = labeled
                .into_iter()
                .filter(|c| !c.comment.tokens.is_empty())
                .map(|c| (c.comment.tokens, c.label))
                .collect();
            let e = classifier::evaluate(&model, &data)?;
            (e.matrix, e.accuracy)
        }
        _ => return Err(input_err("evaluate needs --matrix, or --model with --input")),
    };
    let metrics = macro_metrics::<f64>(&matrix, orientation)?;
    eprint!("{}", MetricsTable { matrix: &matrix, metrics: &metrics });
    let value = json!({
        "command": "evaluate",
        "orientation": orientation,
        "accuracy": accuracy,
        "matrix": matrix,
        "metrics": metrics,
    });
    if let Some(p) = &a.output {
        write_json(p, &value)?;
    }
    summary(value)
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    /// Labeled comments or predictions (needs post_id, created_time, label).
    #[arg(long)]
    input: PathBuf,
    /// Directory for report.json and timeseries.csv.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    z_threshold: Option<f64>,
    #[arg(long)]
    share_threshold: Option<f64>,
    #[arg(long)]
    window_hours: Option<f64>,
    /// Use the n-1 standard deviation.
    #[arg(long)]
    sample_sigma: bool,
    /// Count Negative as well as Very Negative comments as hostile.
    #[arg(long)]
    include_negative: bool,
    /// Compute z-scores within each page (post id prefix before '_').
    #[arg(long)]
    group_by_page: bool,
    /// Time-series bucket: day or hour.
    #[arg(long)]
    bucket: Option<BucketWidth>,
}

pub fn detect(a: DetectArgs, cfg: &RunConfig) -> Result<()> {
    require(&a.input)?;
    let d = &cfg.detect;
    let defaults = DetectConfig::default();
    let config = DetectConfig {
        z_threshold: a.z_threshold.or(d.z_threshold).unwrap_or(defaults.z_threshold),
        share_threshold: a.share_threshold.or(d.share_threshold).unwrap_or(defaults.share_threshold),
        window_hours: a.window_hours.or(d.window_hours).unwrap_or(defaults.window_hours),
        sigma: if a.sample_sigma {
            Sigma::Sample
        } else {
            d.sigma.unwrap_or(defaults.sigma)
        },
        hostile: if a.include_negative {
            Hostile::NegativeOrWorse
        } else {
            d.hostile.unwrap_or(defaults.hostile)
        },
    };
    let out_dir = pick(a.out_dir, &cfg.paths.out_dir, "output directory")?;
    let comments: Vec<CommentLabel> = read_jsonl(&a.input)?;
    let stats = flaming::post_stats(&comments, config.hostile);
    let mut events = if a.group_by_page || d.group_by_page == Some(true) {
        flaming::detect_per_page::<f64>(&stats, &config)?
    } else {
        flaming::detect::<f64>(&stats, &config)?
    };
    flaming::annotate_bursts(&mut events, &comments, &config);
    let z = flaming::zscores::<f64>(&stats, config.sigma)?;
    let report = FlamingReport {
        config,
        posts: stats.len(),
        comments: comments.len(),
        mean_vn: z.mean,
        std_vn: z.std,
        events,
    };
    let buckets = flaming::aggregate(&comments, a.bucket.or(d.bucket).unwrap_or_default());
    let paths = flaming::write_report(&report, &buckets, &out_dir)?;
    summary(json!({
        "command": "detect",
        "input": a.input,
        "report": paths.report,
        "timeseries": paths.timeseries,
        "posts": report.posts,
        "comments": report.comments,
        "events": report.events.iter().map(|e| json!({
            "post_id": e.post_id,
            "z": e.z,
            "vn_count": e.vn_count,
            "vn_share": e.vn_share,
            "above_share_threshold": e.above_share_threshold,
        })).collect::<Vec<_>>(),
    }))
}
