//! Acceptance suite: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use chrono::{DateTime, TimeZone, Utc};
use flamescope::classifier::{
    build_model, loss, Batch, ConvSpec, Example, Model, ModelConfig, TrainConfig, Trainer, CLASSES,
};
use flamescope::corpus::{preprocess, RawComment};
use flamescope::embedding::{train_fasttext, train_word2vec, EmbedConfig, EmbeddingMatrix, LookupMode, SubwordConfig};
use flamescope::flaming::{detect, post_stats, CommentLabel, DetectConfig, Hostile};
use flamescope::lexicon::{
    classify, score_comment, Denominator, EmojiTable, Lexicon, LexiconEntry, SentimentLabel, SentimentScore,
};
use flamescope::metrics::{macro_metrics, ConfusionMatrix, MacroMetrics, Orientation};
use flamescope::num::cosine;
use flamescope::Scalar;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn published_matrix(name: &str) -> ConfusionMatrix {
    let text = std::fs::read_to_string(fixtures().join(name)).unwrap();
    let m: ConfusionMatrix = serde_json::from_str(&text).unwrap();
    m.validate().unwrap();
    m
}

fn pct(x: f64) -> f64 {
    100.0 * x
}

fn criterion_1() -> Outcome {
    let m = published_matrix("tbl_lexicon.json");
    let r: MacroMetrics<f64> = macro_metrics(&m, Orientation::Paper).unwrap();
    let printed_p = [70.33, 46.89, 64.75];
    let printed_r = [57.66, 72.81, 55.56];
    let mut worst_class: f64 = 0.0;
    for i in 0..3 {
        worst_class = worst_class
            .max((pct(r.per_class[i].precision) - printed_p[i]).abs())
            .max((pct(r.per_class[i].recall) - printed_r[i]).abs());
    }
    let macros = [
        (pct(r.macro_precision), 60.66),
        (pct(r.macro_recall), 62.01),
        (pct(r.macro_f1), 61.31),
    ];
    let worst_macro = macros.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    check(
        worst_class <= 0.01 && worst_macro <= 0.1,
        format!(
            "macro P/R/F1 {:.2}/{:.2}/{:.2}; worst per-class gap {worst_class:.4}, worst macro gap {worst_macro:.4}",
            macros[0].0, macros[1].0, macros[2].0
        ),
    )
}

fn criterion_2() -> Outcome {
    let m = published_matrix("tbl_vadar.json");
    let r: MacroMetrics<f64> = macro_metrics(&m, Orientation::Paper).unwrap();
    let neg = pct(r.per_class[1].recall);
    let neu = pct(r.per_class[2].recall);
    let mp = pct(r.macro_precision);
    let cols = (neg - 53.57).abs() <= 0.01 && (neu - 30.11).abs() <= 0.01;
    let macro_ok = (mp - 37.85).abs() <= 0.1;
    check(
        cols && macro_ok,
        format!(
            "Neg {neg:.2} Neu {neu:.2} ({}); macro precision {mp:.2} vs printed 37.85 ({})",
            if cols { "ok" } else { "off" },
            if macro_ok {
                "ok".to_string()
            } else {
                format!("Neu row gives {:.2}, printed 92.57", pct(r.per_class[2].precision))
            }
        ),
    )
}

const PROPERTY_LEXICON: &str = "good\t0.6\nbad\t-0.6\nawful\t-0.9\nfine\t0.2\nnot good\t-0.5\n\
    very nice day\t0.8\nwould be very easy\t0.472\nhalf\t0.5\nminus\t-0.5\nmeh\t0\nlove\t1\nhate\t-1\n";
const PROPERTY_WORDS: &[&str] = &[
    "good", "bad", "awful", "fine", "not", "very", "nice", "day", "would", "be", "easy", "half", "minus", "meh",
    "love", "hate", "the", "news", "river", "people", "today",
];
const FILLERS: &[&str] = &["the", "news", "river", "people", "today"];

fn raw(text: String) -> RawComment {
    RawComment {
        post_id: "p".into(),
        comment_id: "c".into(),
        created_time: Utc.timestamp_opt(1_517_443_200, 0).unwrap(),
        text,
    }
}

fn oracle_label(v: f64) -> SentimentLabel {
    if v >= 0.5 {
        SentimentLabel::VeryPositive
    } else if v > 0.0 {
        SentimentLabel::Positive
    } else if v == 0.0 {
        SentimentLabel::Neutral
    } else if v > -0.5 {
        SentimentLabel::Negative
    } else {
        SentimentLabel::VeryNegative
    }
}

fn random_comment(rng: &mut ChaCha8Rng, fillers_only: bool) -> String {
    let pool = if fillers_only { FILLERS } else { PROPERTY_WORDS };
    let n = rng.gen_range(1..=12);
    let mut parts: Vec<String> = (0..n)
        .map(|_| {
            let w = *pool.choose(rng).unwrap();
            let mut w = if rng.gen_bool(0.25) { w.to_uppercase() } else { w.to_string() };
            if rng.gen_bool(0.15) {
                w.push('!');
            }
            w
        })
        .collect();
    for _ in 0..rng.gen_range(0..=2) {
        let e = if fillers_only { "🙂" } else { *["😀", "😡", "🙂"].choose(rng).unwrap() };
        parts.push(e.to_string());
    }
    parts.join(" ")
}

fn criterion_3() -> Outcome {
    let lex = Lexicon::parse(PROPERTY_LEXICON, Path::new("properties.tsv")).unwrap();
    let emojis = EmojiTable::from_pairs([("😀", 1), ("😡", -1)]);
    let score = |text: String| {
        let c = preprocess(&raw(text)).expect("non-empty comment");
        score_comment(&c, &lex, &emojis, Denominator::Absolute).unwrap()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut counts = [0usize; 5];
    let mut neutral_fixed = 0;
    for i in 0..10_000 {
        let fillers_only = i % 5 == 0;
        let text = random_comment(&mut rng, fillers_only);
        let (b, s) = score(text.clone());
        let v = s.value;
        if !v.is_finite() {
            return Err(format!("non-finite score for {text:?}"));
        }
        let anything = b.n > 0 || b.c != 0 || b.s != 0 || b.e != 0;
        if anything && v.abs() > 1.0 + 1e-12 {
            return Err(format!("|score| = {} > 1 for {text:?}", v.abs()));
        }
        if !anything || fillers_only {
            if v != 0.0 || classify(s) != SentimentLabel::Neutral {
                return Err(format!("neutral fixed point broken for {text:?}: {v}"));
            }
            neutral_fixed += 1;
        }
        let label = classify(s);
        if label != oracle_label(v) {
            return Err(format!("score {v} mapped to {label} for {text:?}"));
        }
        counts[label.index()] += 1;
        let (_, up) = score(format!("{text} 😀"));
        let (_, down) = score(format!("{text} 😡"));
        if up.value < v || down.value > v {
            return Err(format!("emoji monotonicity broken for {text:?}: {} / {v} / {}", down.value, up.value));
        }
        if b.n > 0 && b.matches.iter().all(|m| m.score > 0.0) && score(text.to_uppercase()).1.value < v {
            return Err(format!("capitals lowered a positive comment: {text:?}"));
        }
        if b.n > 0 && b.matches.iter().all(|m| m.score < 0.0) && score(text.to_uppercase()).1.value > v {
            return Err(format!("capitals raised a negative comment: {text:?}"));
        }
    }
    for (text, want) in [
        ("half", SentimentLabel::VeryPositive),
        ("minus", SentimentLabel::VeryNegative),
        ("meh", SentimentLabel::Neutral),
    ] {
        let (_, s) = score(text.to_string());
        if classify(s) != want {
            return Err(format!("boundary comment {text:?} scored {} -> {}", s.value, classify(s)));
        }
    }
    for (v, want) in [
        (0.5, SentimentLabel::VeryPositive),
        (0.0, SentimentLabel::Neutral),
        (-0.5, SentimentLabel::VeryNegative),
        (0.4999999, SentimentLabel::Positive),
        (-0.4999999, SentimentLabel::Negative),
    ] {
        if classify(SentimentScore { value: v }) != want {
            return Err(format!("threshold {v} not mapped to {want}"));
        }
    }
    check(
        counts.iter().all(|&c| c > 0),
        format!("10000 comments, labels {counts:?}, {neutral_fixed} neutral fixed points"),
    )
}

/// Leftmost-longest spans found by trying every span against every entry.
fn exhaustive_spans(entries: &[LexiconEntry], tokens: &[String], max_n: usize) -> Vec<(usize, usize, usize)> {
    let lookup = |span: &[String]| {
        let mut seen: Vec<&[String]> = Vec::new();
        let mut id = 0;
        for e in entries {
            if seen.contains(&e.phrase.as_slice()) {
                continue;
            }
            if e.phrase == span {
                return Some(id);
            }
            seen.push(&e.phrase);
            id += 1;
        }
        None
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let longest = (1..=max_n.min(tokens.len() - i))
            .rev()
            .find_map(|n| lookup(&tokens[i..i + n]).map(|id| (i, i + n, id)));
        match longest {
            Some(span) => {
                out.push(span);
                i = span.1;
            }
            None => i += 1,
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let alphabet = ["a", "b", "c", "d", "e"];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut total_matches = 0;
    for case in 0..5000 {
        let entries: Vec<LexiconEntry> = (0..rng.gen_range(1..=12))
            .map(|_| LexiconEntry {
                phrase: (0..rng.gen_range(1..=4))
                    .map(|_| alphabet.choose(&mut rng).unwrap().to_string())
                    .collect(),
                score: rng.gen_range(-1.0..=1.0),
            })
            .collect();
        let max_n = rng.gen_range(1..=4);
        let lex = Lexicon::from_entries(entries.clone()).unwrap().with_max_n(max_n).unwrap();
        let tokens: Vec<String> = (0..rng.gen_range(0..=12))
            .map(|_| alphabet.choose(&mut rng).unwrap().to_string())
            .collect();
        let got: Vec<(usize, usize, usize)> =
            lex.match_tokens(&tokens).iter().map(|m| (m.start, m.end, m.entry)).collect();
        let want = exhaustive_spans(&entries, &tokens, max_n);
        if got != want {
            return Err(format!("case {case}: {tokens:?} max_n {max_n}: greedy {got:?}, reference {want:?}"));
        }
        total_matches += got.len();
    }
    Ok(format!("5000 cases agree, {total_matches} spans matched"))
}

fn class_word(class: usize, k: usize) -> String {
    format!("w{class}x{k}")
}

fn class_embeddings<T: Scalar>(dim: usize, seed: u64) -> EmbeddingMatrix<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words: Vec<String> = (0..5).flat_map(|c| (0..4).map(move |k| class_word(c, k))).collect();
    words.extend((0..4).map(|k| format!("filler{k}")));
    let vectors = (0..words.len() * dim).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
    EmbeddingMatrix::new(words, dim, vectors).unwrap()
}

/// `n` comments of 3..=8 tokens, each mixing fillers with words of its class.
fn separable_set(n: usize, seed: u64) -> Vec<(Vec<String>, SentimentLabel)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let c = i % 5;
            let len = rng.gen_range(3..=8);
            let tokens = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        format!("filler{}", rng.gen_range(0..4))
                    } else {
                        class_word(c, rng.gen_range(0..4))
                    }
                })
                .collect();
            (tokens, SentimentLabel::ALL[c])
        })
        .collect()
}

fn batch_of<T: Scalar>(model: &Model<T>, data: &[(Vec<String>, SentimentLabel)]) -> Batch<T> {
    let ids: Vec<Vec<u32>> = data.iter().map(|(t, _)| model.encode(t)).collect();
    let seqs: Vec<&[u32]> = ids.iter().map(|v| v.as_slice()).collect();
    let labels: Vec<SentimentLabel> = data.iter().map(|(_, l)| *l).collect();
    Batch::new(model.config().max_tokens, &seqs, &labels).unwrap()
}

fn toy_config() -> ModelConfig {
    ModelConfig {
        max_tokens: 12,
        embed_dim: 8,
        conv_layers: vec![
            ConvSpec {
                filters: 4,
                kernel_width: 3,
            };
            3
        ],
        pool: 2,
        lstm_hidden: 8,
        dense_sizes: [16, 8],
        dropout_lstm: 0.0,
        dropout_dense: 0.0,
        fine_tune_embeddings: true,
        seed: 3,
        ..Default::default()
    }
}

fn criterion_5() -> Outcome {
    let mut m = build_model(&toy_config(), &class_embeddings::<f64>(8, 1)).unwrap();
    // Zero biases leave ReLUs fed by all-zero inputs exactly on their kink.
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let biases: Vec<String> = m.params.specs().iter().map(|s| s.name.clone()).filter(|n| n.ends_with("bias")).collect();
    for n in biases {
        for x in m.params.tensor_mut(&n).unwrap() {
            *x += rng.gen_range(-0.1..0.1);
        }
    }
    let batch = batch_of(&m, &separable_set(6, 11));
    let (_, analytic) = m.backward(&batch, None).unwrap();
    let eps = 1e-4;
    let mut worst = (0.0f64, 0usize);
    for i in 0..m.params.len() {
        let orig = m.params.values[i];
        m.params.values[i] = orig + eps;
        let up = loss(&m.forward(&batch).unwrap(), &batch.targets);
        m.params.values[i] = orig - eps;
        let down = loss(&m.forward(&batch).unwrap(), &batch.targets);
        m.params.values[i] = orig;
        let numeric = (up - down) / (2.0 * eps);
        let err = (analytic[i] - numeric).abs() / analytic[i].abs().max(numeric.abs()).max(1e-7);
        if err > worst.0 {
            worst = (err, i);
        }
    }
    let tensor = m
        .params
        .specs()
        .iter()
        .find(|s| m.params.range(&s.name).unwrap().contains(&worst.1))
        .unwrap()
        .name
        .clone();
    check(
        worst.0 <= 1e-4,
        format!("{} parameters, max relative error {:.2e} in {tensor}", m.params.len(), worst.0),
    )
}

fn criterion_6() -> Outcome {
    let cfg = ModelConfig {
        embed_dim: 16,
        ..Default::default()
    };
    let mut m = build_model(&cfg, &class_embeddings::<f32>(16, 1)).unwrap();
    let data = separable_set(64, 5);
    let examples: Vec<Example> = data.iter().filter_map(|(t, l)| Example::from_tokens(&m, t, *l)).collect();
    let tc = TrainConfig {
        epochs: 200,
        batch_size: 4,
        lr: 1e-4,
        val_split: 0.0,
        ..Default::default()
    };
    let batch = batch_of(&m, &data);
    let mut trainer = Trainer::new(&mut m, examples, tc).unwrap();
    let mut worst_sum: f64 = 0.0;
    for epoch in 1..=200 {
        let acc = trainer.run_epoch().unwrap().train_accuracy;
        for row in trainer.model().forward(&batch).unwrap() {
            let s: f64 = row.iter().map(|&p| p as f64).sum();
            worst_sum = worst_sum.max((s - 1.0).abs());
        }
        if worst_sum > 1e-6 {
            return Err(format!("softmax row sum off by {worst_sum:.2e} at epoch {epoch}"));
        }
        if acc >= 0.95 {
            return Ok(format!(
                "training accuracy {:.1}% at epoch {epoch}; max |row sum - 1| {worst_sum:.1e}",
                100.0 * acc
            ));
        }
    }
    Err("training accuracy below 95% after 200 epochs".into())
}

fn criterion_7() -> Outcome {
    let cfg = ModelConfig {
        embed_dim: 8,
        max_tokens: 30,
        ..toy_config()
    };
    let m = build_model(&cfg, &class_embeddings::<f64>(8, 2)).unwrap();
    for (tokens, _) in separable_set(50, 9) {
        let (_, p) = m.predict_comment(&tokens).unwrap();
        let direct = m.forward(&batch_of(&m, &[(tokens.clone(), SentimentLabel::Neutral)])).unwrap()[0];
        if p.iter().zip(&direct).any(|(a, b)| a.to_bits() != b.to_bits()) {
            return Err(format!("short comment {tokens:?} differs from a direct forward pass"));
        }
    }
    let long: Vec<String> = separable_set(40, 3).into_iter().flat_map(|(t, _)| t).take(65).collect();
    assert_eq!(long.len(), 65);
    let (_, p) = m.predict_comment(&long).unwrap();
    let mut mean = [0.0f64; CLASSES];
    for chunk in long.chunks(30) {
        let out = m.forward(&batch_of(&m, &[(chunk.to_vec(), SentimentLabel::Neutral)])).unwrap()[0];
        for k in 0..CLASSES {
            mean[k] += out[k] / 3.0;
        }
    }
    let gap = (0..CLASSES).map(|k| (p[k] - mean[k]).abs()).fold(0.0, f64::max);
    check(gap <= 1e-9, format!("50 short comments bitwise equal; 65-token gap to chunk mean {gap:.1e}"))
}

const TEMPLATES: &[&[&str]] = &[
    &["sunny", "beach", "holiday", "swim"],
    &["angry", "traffic", "horn", "jam"],
    &["happy", "birthday", "cake", "party"],
    &["cold", "winter", "snow", "scarf"],
    &["loud", "music", "concert", "crowd"],
    &["fresh", "bread", "bakery", "morning"],
    &["slow", "internet", "router", "reboot"],
    &["green", "forest", "hiking", "trail"],
];

fn template_corpus(tokens: usize, seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut n = 0;
    while n < tokens {
        let k = rng.gen_range(2..=3);
        let mut s = Vec::new();
        for t in TEMPLATES.choose_multiple(&mut rng, k) {
            let mut words: Vec<&str> = t.to_vec();
            words.shuffle(&mut rng);
            s.extend(words.into_iter().map(String::from));
        }
        n += s.len();
        out.push(s);
    }
    out
}

fn criterion_8() -> Outcome {
    let corpus = template_corpus(10_000, 7);
    let base = EmbedConfig {
        dim: 20,
        window: 3,
        min_count: 1,
        ..Default::default()
    };
    for seed in 1..=5 {
        let t = train_word2vec::<f64, _>(&corpus, &EmbedConfig { seed, ..base.clone() }).unwrap();
        if t.epoch_losses.windows(2).any(|w| w[1] >= w[0]) {
            return Err(format!("seed {seed}: losses {:?}", t.epoch_losses));
        }
    }
    let ft = EmbedConfig {
        seed: 2,
        subword: Some(SubwordConfig {
            min_n: 3,
            max_n: 6,
            buckets: 200_000,
        }),
        ..base
    };
    let t = train_fasttext::<f64, _>(&template_corpus(10_000, 4), &ft).unwrap();
    let m = &t.matrix;
    let sim = cosine(&m.lookup("happyy", LookupMode::FastText), m.get("happy").unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pairs: Vec<f64> = (0..2000)
        .map(|_| {
            let a = rng.gen_range(0..m.len());
            let b = (a + rng.gen_range(1..m.len())) % m.len();
            cosine(m.row(a), m.row(b))
        })
        .collect();
    pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = pairs[pairs.len() / 2];
    check(
        m.get("happyy").is_none() && sim > median,
        format!("loss falls every epoch for 5 seeds; cos(happyy, happy) {sim:.3} vs median pair {median:.3}"),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let start: DateTime<Utc> = Utc.with_ymd_and_hms(2018, 2, 1, 0, 0, 0).unwrap();
    let planted = ["post_041", "post_117", "post_188"];
    let mut comments = Vec::new();
    for p in 0..200 {
        let id = format!("post_{p:03}");
        let posted = start + chrono::Duration::minutes(rng.gen_range(0..27 * 24 * 60));
        let (vn, other) = if planted.contains(&id.as_str()) {
            (rng.gen_range(30..=40), rng.gen_range(20..=60))
        } else {
            (rng.gen_range(0..=3), rng.gen_range(2..=25))
        };
        for k in 0..vn + other {
            let label = if k < vn {
                SentimentLabel::VeryNegative
            } else {
                SentimentLabel::ALL[rng.gen_range(1..5)]
            };
            comments.push(CommentLabel {
                post_id: id.clone(),
                created_time: posted + chrono::Duration::minutes(rng.gen_range(0..2880)),
                label,
            });
        }
    }
    let stats = post_stats(&comments, Hostile::VeryNegative);
    let events = detect::<f64>(&stats, &DetectConfig::default()).unwrap();
    let mut found: Vec<&str> = events.iter().map(|e| e.post_id.as_str()).collect();
    found.sort();
    if found != planted {
        return Err(format!("detected {found:?}"));
    }
    let xs: Vec<f64> = stats.iter().map(|s| s.vn_count as f64).collect();
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let std = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
    let mut worst: f64 = 0.0;
    for e in &events {
        let want = (e.vn_count as f64 - mean) / std;
        worst = worst.max((e.z - want).abs());
        if !(e.z > 5.0 && e.vn_share > 0.2 && e.above_share_threshold) {
            return Err(format!("{} has z {} share {}", e.post_id, e.z, e.vn_share));
        }
    }
    check(
        worst <= 1e-12,
        format!("exactly the 3 planted posts among 200; max z gap to two-pass formula {worst:.1e}"),
    )
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_flamescope"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{} exited {:?}: {}",
            args[4],
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn pipeline(dir: &Path, threads: &str) -> Result<Vec<(String, Vec<u8>)>, String> {
    let cfg = fixtures().join("run.toml");
    let f = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let corpus = fixtures().join("corpus.jsonl");
    let steps: Vec<Vec<String>> = vec![
        vec!["preprocess".into(), "--input".into(), corpus.to_str().unwrap().into(), "--output".into(), f("clean.jsonl")],
        vec!["label".into(), "--input".into(), f("clean.jsonl"), "--output".into(), f("labeled.jsonl")],
        vec!["train-embed".into(), "--input".into(), f("clean.jsonl"), "--output".into(), f("vectors.txt")],
        vec![
            "train-clf".into(),
            "--input".into(),
            f("labeled.jsonl"),
            "--embeddings".into(),
            f("vectors.txt"),
            "--output".into(),
            f("model.bin"),
            "--report".into(),
            f("training.json"),
        ],
        vec![
            "evaluate".into(),
            "--model".into(),
            f("model.bin"),
            "--input".into(),
            f("labeled.jsonl"),
            "--output".into(),
            f("evaluation.json"),
        ],
        vec!["detect".into(), "--input".into(), f("labeled.jsonl"), "--out-dir".into(), f("detect")],
    ];
    for step in &steps {
        let mut args = vec!["--config", cfg.to_str().unwrap(), "--threads", threads];
        args.extend(step.iter().map(String::as_str));
        run_cli(&args)?;
    }
    ["vectors.txt", "model.bin", "training.json", "evaluation.json", "detect/report.json", "detect/timeseries.csv"]
        .iter()
        .map(|name| {
            std::fs::read(dir.join(name))
                .map(|bytes| (name.to_string(), bytes))
                .map_err(|e| format!("{name}: {e}"))
        })
        .collect()
}

fn criterion_10() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = pipeline(a.path(), "1")?;
    let second = pipeline(b.path(), "4")?;
    for ((name, x), (_, y)) in first.iter().zip(&second) {
        if x != y {
            return Err(format!("{name} differs between runs"));
        }
    }
    let report: serde_json::Value = serde_json::from_slice(&first[4].1).unwrap();
    let mut events: Vec<&str> = report["events"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["post_id"].as_str().unwrap())
        .collect();
    events.sort();
    let planted = std::fs::read_to_string(fixtures().join("planted_posts.txt")).unwrap();
    let planted: Vec<&str> = planted.lines().collect();
    check(
        events == planted,
        format!("6 stages exit 0, artifacts identical across runs (1 and 4 threads), events {events:?}"),
    )
}

fn main() {
    let criteria: [(fn() -> Outcome, Duration); 10] = [
        (criterion_1, Duration::from_secs(1)),
        (criterion_2, Duration::from_secs(1)),
        (criterion_3, Duration::from_secs(10)),
        (criterion_4, Duration::from_secs(30)),
        (criterion_5, Duration::from_secs(120)),
        (criterion_6, Duration::from_secs(300)),
        (criterion_7, Duration::from_secs(60)),
        (criterion_8, Duration::from_secs(120)),
        (criterion_9, Duration::from_secs(5)),
        (criterion_10, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (i, (run, limit)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = started.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > *limit => Err(format!("{d}; took {elapsed:.2?}, limit {limit:?}")),
            o => o,
        };
        match outcome {
            Ok(d) => println!("criterion {:>2}: PASS ({elapsed:.2?}) {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2}: FAIL ({elapsed:.2?}) {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
