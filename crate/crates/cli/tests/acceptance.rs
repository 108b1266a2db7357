//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod support;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use revscope::config::{load_pipeline, ModelPath, ServiceConfig};
use revscope::gateway::{build_engine, router, SimilarityResponse};
use revscope_core::corpus::ingest_at;
use revscope_core::embedding::{read_text_model, write_text_model};
use revscope_core::evaluation::{evaluate_models, spearman, AnnotatedCorpus, QueryInputs};
use revscope_core::{
    cosine, distance, load_text_model, precision_recall_at_k, rank_by_research_questions, Aggregation, Corpus,
    EmbeddingError, EmbeddingModel, ModelRegistry, Pipeline, RankedList,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

const TIMESTAMP: &str = "2024-01-01T00:00:00Z";

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let scale = 10f64.powf(rng.random_range(-3.0..3.0));
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0) * scale).collect();
        if v.iter().any(|x| *x != 0.0) {
            return v;
        }
    }
}

fn c1_distance_conformance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..1000)
        .map(|_| {
            let d = rng.random_range(1..=64);
            (random_vector(&mut rng, d), random_vector(&mut rng, d))
        })
        .collect();
    let start = Instant::now();
    let got: Vec<f64> = pairs.iter().map(|(a, b)| distance(a, b).unwrap()).collect();
    let elapsed = start.elapsed();
    let mut worst = 0f64;
    for ((a, b), d) in pairs.iter().zip(&got) {
        ensure!((0.0..=2.0).contains(d), "distance {d} outside [0, 2]");
        let reference = 1.0 - support::reference_cosine(a, b).unwrap().clamp(-1.0, 1.0);
        worst = worst.max((d - reference).abs());
    }
    ensure!(worst <= 1e-9, "max |error| {worst:e} exceeds 1e-9");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("1000 pairs, max |error| {worst:.1e}, {elapsed:.1?}"))
}

fn c2_cosine_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut raw_out_of_range = 0;
    let mut worst_scale = 0f64;
    for i in 0..1000 {
        let d = rng.random_range(1..=64);
        let a = random_vector(&mut rng, d);
        let b = if i % 2 == 0 {
            random_vector(&mut rng, d)
        } else {
            // Near-parallel or near-anti-parallel, where rounding pushes the
            // unclamped quotient past +/-1.
            let c = rng.random_range(0.1..10.0) * if i % 4 == 1 { 1.0 } else { -1.0 };
            a.iter().map(|x| x * c).collect()
        };
        let ab = cosine(&a, &b).unwrap();
        ensure!(
            ab.to_bits() == cosine(&b, &a).unwrap().to_bits(),
            "asymmetric at case {i}"
        );
        ensure!((-1.0..=1.0).contains(&ab), "cosine {ab} out of range at case {i}");

        let alpha = 10f64.powf(rng.random_range(-3.0..3.0));
        let beta = 10f64.powf(rng.random_range(-3.0..3.0));
        let sa: Vec<f64> = a.iter().map(|x| x * alpha).collect();
        let sb: Vec<f64> = b.iter().map(|x| x * beta).collect();
        worst_scale = worst_scale.max((cosine(&sa, &sb).unwrap() - ab).abs());

        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let na: f64 = a.iter().map(|x| x * x).sum();
        let nb: f64 = b.iter().map(|x| x * x).sum();
        let raw = dot / (na.sqrt() * nb.sqrt());
        if raw.abs() > 1.0 {
            raw_out_of_range += 1;
        }
    }
    ensure!(worst_scale <= 1e-12, "scale invariance error {worst_scale:e}");
    ensure!(raw_out_of_range > 0, "no case exercised clamping");
    Ok(format!(
        "1000 cases symmetric, scale error {worst_scale:.1e}, {raw_out_of_range} unclamped quotients beyond +/-1 clamped"
    ))
}

fn c3_spearman() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0f64;
    let mut undefined = 0;
    for _ in 0..200 {
        let n = rng.random_range(3..=50);
        let levels = rng.random_range(2..=8);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
        match (spearman(&x, &y), support::oracle_spearman(&x, &y)) {
            (Ok(got), Some(want)) => worst = worst.max((got - want).abs()),
            (Err(_), None) => undefined += 1,
            (got, want) => return Err(format!("defined-ness differs: {got:?} vs {want:?}")),
        }
    }
    ensure!(worst <= 1e-9, "max |error| {worst:e}");
    for _ in 0..50 {
        let n = rng.random_range(3..=50);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-100.0..100.0)).collect();
        let up: Vec<f64> = x.iter().map(|v| v.powi(3) + 7.0).collect();
        let down: Vec<f64> = x.iter().map(|v| -2.0 * v).collect();
        ensure!(spearman(&x, &up) == Ok(1.0), "monotone pair did not give exactly 1");
        ensure!(spearman(&x, &down) == Ok(-1.0), "reversed pair did not give exactly -1");
    }
    Ok(format!(
        "200 tied vectors, max |error| {worst:.1e} ({undefined} constant); +/-1 exact"
    ))
}

const CLUSTER_A: [&str; 10] = [
    "amber", "apple", "arrow", "alder", "anvil", "aspen", "acorn", "amigo", "attic", "axle",
];
const CLUSTER_B: [&str; 10] = [
    "birch", "brook", "bison", "banjo", "bugle", "baker", "bingo", "bloom", "brick", "blade",
];

fn c4_synthetic_retrieval() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let dim = 16;
    let mut vectors = Vec::new();
    for (offset, words) in [(0, CLUSTER_A), (8, CLUSTER_B)] {
        for w in words {
            let mut v = vec![0.0; dim];
            for x in &mut v[offset..offset + 8] {
                *x = rng.random_range(0.05..1.0);
            }
            vectors.push((w.to_string(), v));
        }
    }
    let model = EmbeddingModel::from_vectors("synthetic", vectors.clone()).map_err(|e| e.to_string())?;
    let table: BTreeMap<String, Vec<f64>> = vectors.into_iter().collect();

    let mut text = |words: &[&str]| -> String {
        let n = rng.random_range(6..=10);
        (0..n)
            .map(|_| words[rng.random_range(0..words.len())])
            .collect::<Vec<_>>()
            .join(" ")
    };
    let docs: Vec<(String, String)> = (0..20)
        .map(|i| {
            (
                format!("doc{i:02}"),
                text(if i % 4 == 0 { &CLUSTER_A } else { &CLUSTER_B }),
            )
        })
        .collect();
    let query = text(&CLUSTER_A);

    let start = Instant::now();
    let pipeline = Pipeline::default();
    let processed: Vec<(String, Vec<String>)> = docs
        .iter()
        .map(|(id, t)| (id.clone(), pipeline.preprocess(t, id).ngrams))
        .collect();
    let corpus =
        revscope_core::VectorizedCorpus::build(&model, processed.iter().map(|(id, g)| (id.as_str(), g.as_slice())));
    let ranked = rank_by_research_questions(
        std::slice::from_ref(&query),
        &corpus,
        &model,
        &pipeline,
        Aggregation::Concat,
    )
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let labels: BTreeMap<String, u8> = docs
        .iter()
        .enumerate()
        .map(|(i, (id, _))| (id.clone(), u8::from(i % 4 == 0)))
        .collect();
    let (p, r) = precision_recall_at_k(&ranked, &labels, 5).map_err(|e| e.to_string())?;
    ensure!(p == 1.0 && r == 1.0, "P@5 = {p}, R@5 = {r}");

    let stop = support::bundled_stopwords();
    let q = support::oracle_vector(&table, &support::oracle_ngrams(&query, &stop)).unwrap();
    let oracle_docs: Vec<(String, Vec<f64>)> = docs
        .iter()
        .map(|(id, t)| {
            (
                id.clone(),
                support::oracle_vector(&table, &support::oracle_ngrams(t, &stop)).unwrap(),
            )
        })
        .collect();
    let expected: Vec<String> = support::oracle_rank(&q, &oracle_docs)
        .into_iter()
        .map(|(id, _)| id)
        .collect();
    ensure!(
        ranked.doc_ids() == expected,
        "order {:?} differs from reference {expected:?}",
        ranked.doc_ids()
    );
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("P@5 = R@5 = 1, order matches reference, {elapsed:.1?}"))
}

/// Values printed by `tests/fixtures/gen_fixture.py`.
struct Frozen {
    rho: f64,
    order: [&'static str; 9],
    precision: [f64; 3],
    recall: [f64; 3],
}

const FROZEN_K: [usize; 3] = [3, 5, 9];

const FROZEN_RQ: Frozen = Frozen {
    rho: 0.9746794344808964,
    order: ["d01", "d04", "d02", "d07", "d03", "d09", "d08", "d05", "d06"],
    precision: [1.0, 0.8, 0.4444444444444444],
    recall: [0.75, 1.0, 1.0],
};

const FROZEN_SEED: Frozen = Frozen {
    rho: 0.8806314188730906,
    order: ["d02", "d01", "d04", "d07", "d03", "d08", "d09", "d05", "d06"],
    precision: [1.0, 0.8, 0.4444444444444444],
    recall: [0.75, 1.0, 1.0],
};

fn fixture_pipeline() -> Pipeline {
    load_pipeline(Some(&support::annotated_dir().join("pipeline.toml"))).unwrap()
}

fn fixture_corpus(pipeline: &Pipeline) -> Corpus {
    ingest_at(
        support::annotated_dir().join("records.jsonl"),
        pipeline,
        TIMESTAMP.into(),
    )
    .unwrap()
}

fn questions() -> Vec<String> {
    support::read_lines(&support::annotated_dir().join("questions.txt"))
}

fn seed() -> String {
    std::fs::read_to_string(support::annotated_dir().join("seed.txt")).unwrap()
}

/// Independent re-computation of rho, order and P/R from raw files.
fn rust_oracle(query: &str) -> (f64, Vec<String>, Vec<(f64, f64)>) {
    let table = support::parse_model(&std::fs::read_to_string(support::models_dir().join("toy.txt")).unwrap());
    let stop = support::bundled_stopwords();
    let q = support::oracle_vector(&table, &support::oracle_ngrams(query, &stop)).unwrap();
    let records = std::fs::read_to_string(support::annotated_dir().join("records.jsonl")).unwrap();
    let docs: Vec<(String, Vec<f64>)> = records
        .lines()
        .filter(|l| !l.trim().is_empty())
        .filter_map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            let grams = support::oracle_ngrams(v["abstract"].as_str().unwrap(), &stop);
            support::oracle_vector(&table, &grams).map(|vec| (v["doc_id"].as_str().unwrap().to_string(), vec))
        })
        .collect();
    let ranked = support::oracle_rank(&q, &docs);
    let mut ann: BTreeMap<String, (u8, f64)> = BTreeMap::new();
    for line in support::read_lines(&support::annotated_dir().join("annotations.csv"))
        .iter()
        .skip(1)
    {
        let f: Vec<&str> = line.split(',').collect();
        ann.insert(f[0].into(), (f[1].parse().unwrap(), f[2].parse().unwrap()));
    }
    let (sims, ratings): (Vec<f64>, Vec<f64>) =
        ranked.iter().filter_map(|(d, s)| ann.get(d).map(|a| (*s, a.1))).unzip();
    let rho = support::oracle_spearman(&sims, &ratings).unwrap();
    let relevant = ann.values().filter(|a| a.0 == 1).count() as f64;
    let pr = FROZEN_K
        .iter()
        .map(|&k| {
            let hits = ranked
                .iter()
                .take(k)
                .filter(|(d, _)| ann.get(d).is_some_and(|a| a.0 == 1))
                .count() as f64;
            (hits / k as f64, hits / relevant)
        })
        .collect();
    (rho, ranked.into_iter().map(|(d, _)| d).collect(), pr)
}

fn c5_end_to_end() -> Outcome {
    let pipeline = fixture_pipeline();
    let corpus = fixture_corpus(&pipeline);
    let annotated =
        AnnotatedCorpus::load(&corpus, support::annotated_dir().join("annotations.csv")).map_err(|e| e.to_string())?;
    let registry = ModelRegistry::load_dir(support::models_dir()).map_err(|e| e.to_string())?;
    ensure!(registry.names() == ["toy", "toy_x2"], "models {:?}", registry.names());
    let mut ks = FROZEN_K.to_vec();
    ks.push(10);

    let cases = [
        (
            "rq",
            QueryInputs::ResearchQuestions {
                questions: questions(),
                aggregation: Aggregation::Concat,
            },
            questions().join(" "),
            &FROZEN_RQ,
        ),
        ("seed", QueryInputs::SeedAbstract(seed()), seed(), &FROZEN_SEED),
    ];
    for (label, inputs, raw_query, frozen) in cases {
        let report = evaluate_models(&annotated, &registry, &pipeline, &inputs, &ks);
        let (oracle_rho, oracle_order, oracle_pr) = rust_oracle(&raw_query);
        ensure!(
            oracle_order == frozen.order,
            "{label}: reference order {oracle_order:?}"
        );
        let ranked = inputs
            .rank(&corpus, registry.get("toy").unwrap(), &pipeline)
            .map_err(|e| e.to_string())?;
        ensure!(
            ranked.doc_ids() == frozen.order,
            "{label}: order {:?}",
            ranked.doc_ids()
        );
        ensure!(
            ranked.skipped.iter().map(|s| s.doc_id.as_str()).eq(["d10"]),
            "{label}: skipped {:?}",
            ranked.skipped
        );

        for row in &report.per_model {
            ensure!(row.error.is_none(), "{label}/{}: {:?}", row.model_name, row.error);
            let rho = row
                .spearman_rho
                .ok_or(format!("{label}/{}: rho undefined", row.model_name))?;
            ensure!(
                (rho - frozen.rho).abs() <= 1e-9,
                "{label}/{}: rho {rho} vs {}",
                row.model_name,
                frozen.rho
            );
            ensure!(
                (rho - oracle_rho).abs() <= 1e-9,
                "{label}/{}: rho {rho} vs oracle {oracle_rho}",
                row.model_name
            );
            for (i, k) in FROZEN_K.iter().enumerate() {
                let p = row.precision_at_k[k].ok_or(format!("{label}: P@{k} undefined"))?;
                let r = row.recall_at_k[k].ok_or(format!("{label}: R@{k} undefined"))?;
                ensure!((p - frozen.precision[i]).abs() <= 1e-9, "{label}: P@{k} {p}");
                ensure!((r - frozen.recall[i]).abs() <= 1e-9, "{label}: R@{k} {r}");
                ensure!(
                    (p - oracle_pr[i].0).abs() <= 1e-9 && (r - oracle_pr[i].1).abs() <= 1e-9,
                    "{label}: oracle P/R@{k}"
                );
            }
            ensure!(
                row.precision_at_k[&10].is_none(),
                "{label}: P@10 beyond the ranked list should be null"
            );
        }
        let (a, b) = (&report.per_model[0], &report.per_model[1]);
        ensure!(
            a.spearman_rho == b.spearman_rho && a.precision_at_k == b.precision_at_k && a.recall_at_k == b.recall_at_k,
            "{label}: scaled model disagrees"
        );
    }
    Ok(format!(
        "rho {:.6} / {:.6}, P/R@{FROZEN_K:?} match reference; toy and toy_x2 identical",
        FROZEN_RQ.rho, FROZEN_SEED.rho
    ))
}

fn run_cli(args: &[&str], threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(support::bin())
        .args(args)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(out.stdout)
}

struct Workspace {
    _dir: tempfile::TempDir,
    corpus: String,
    models: String,
    questions: String,
}

fn workspace() -> Result<Workspace, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = dir.path().join("corpus.jsonl").display().to_string();
    let input = support::annotated_dir().join("records.jsonl").display().to_string();
    let config = support::annotated_dir().join("pipeline.toml").display().to_string();
    run_cli(
        &["ingest", "--input", &input, "--output", &corpus, "--config", &config],
        "1",
    )?;
    Ok(Workspace {
        _dir: dir,
        corpus,
        models: support::models_dir().display().to_string(),
        questions: support::annotated_dir().join("questions.txt").display().to_string(),
    })
}

fn cli_rank(ws: &Workspace, threads: &str) -> Result<Vec<u8>, String> {
    run_cli(
        &[
            "rank",
            "--mode",
            "rq",
            "--questions-file",
            &ws.questions,
            "--corpus",
            &ws.corpus,
            "--models-dir",
            &ws.models,
            "--model",
            "toy",
        ],
        threads,
    )
}

fn c6_determinism() -> Outcome {
    let ws = workspace()?;
    let first = cli_rank(&ws, "1")?;
    let second = cli_rank(&ws, "1")?;
    let parallel = cli_rank(&ws, "8")?;
    ensure!(first == second, "two runs differ");
    ensure!(first == parallel, "single- and multi-threaded runs differ");

    let pipeline = fixture_pipeline();
    let save = |c: &Corpus| {
        let mut buf = Vec::new();
        c.write(&mut buf).map(|_| buf).map_err(|e| e.to_string())
    };
    let a = save(&fixture_corpus(&pipeline))?;
    let b = save(&fixture_corpus(&pipeline))?;
    ensure!(a == b, "corpus serialization differs between runs");
    let reread = Corpus::read(a.as_slice(), Path::new("memory")).map_err(|e| e.to_string())?;
    ensure!(save(&reread)? == a, "corpus does not round-trip byte-for-byte");
    Ok(format!(
        "3 rank runs byte-identical ({} bytes), corpus save stable",
        first.len()
    ))
}

async fn c7_service(ws: &Workspace, cli_output: &[u8]) -> Outcome {
    let config = ServiceConfig {
        listen_address: "127.0.0.1".into(),
        port: 1,
        corpus_path: ws.corpus.clone().into(),
        model_paths: ["toy", "toy_x2"]
            .iter()
            .map(|n| ModelPath {
                name: n.to_string(),
                path: support::models_dir().join(format!("{n}.txt")),
            })
            .collect(),
        default_model: "toy".into(),
        pipeline_config_path: None,
        request_size_limit: 1 << 20,
    };
    let engine = Arc::new(build_engine(&config).map_err(|e| format!("{e:#}"))?);
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0")
        .await
        .map_err(|e| e.to_string())?;
    let addr = listener.local_addr().map_err(|e| e.to_string())?;
    let app = router(engine, config.request_size_limit);
    tokio::spawn(async move { axum::serve(listener, app).await });

    let url = format!("http://{addr}/v1/similarity/research-questions");
    let body = serde_json::json!({ "model": "toy", "questions": questions() });
    let client = reqwest::Client::new();
    let tasks: Vec<_> = (0..32)
        .map(|_| {
            let (client, url, body) = (client.clone(), url.clone(), body.clone());
            tokio::spawn(async move {
                let resp = client.post(&url).json(&body).send().await.map_err(|e| e.to_string())?;
                ensure!(resp.status() == 200, "status {}", resp.status());
                resp.bytes().await.map_err(|e| e.to_string())
            })
        })
        .collect();
    let mut bodies = Vec::new();
    for t in tasks {
        bodies.push(t.await.map_err(|e| e.to_string())??);
    }
    ensure!(bodies.windows(2).all(|w| w[0] == w[1]), "concurrent responses differ");

    let service: SimilarityResponse = serde_json::from_slice(&bodies[0]).map_err(|e| e.to_string())?;
    let cli: RankedList = serde_json::from_slice(cli_output).map_err(|e| e.to_string())?;
    let key = |r: &revscope_core::SimilarityResult| (r.doc_id.clone(), r.distance.to_bits(), r.rank);
    ensure!(
        service.results.iter().map(key).eq(cli.results.iter().map(key)),
        "service and CLI rankings differ"
    );
    ensure!(service.skipped == cli.skipped, "skipped documents differ");
    Ok(format!(
        "service matches CLI on {} results; 32 concurrent responses identical",
        cli.results.len()
    ))
}

fn c7_parity() -> Outcome {
    let ws = workspace()?;
    let cli_output = cli_rank(&ws, "4")?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    runtime.block_on(c7_service(&ws, &cli_output))
}

fn c8_loader() -> Outcome {
    let model = load_text_model(support::models_dir().join("toy.txt"), "toy").map_err(|e| e.to_string())?;
    let mut worst = 0f64;
    for header in [true, false] {
        let mut buf = Vec::new();
        write_text_model(&model, &mut buf, header).map_err(|e| e.to_string())?;
        let back = read_text_model(buf.as_slice(), "toy", "memory").map_err(|e| e.to_string())?;
        ensure!(
            back.dimension == model.dimension && back.vocab_size() == model.vocab_size(),
            "shape changed"
        );
        for (token, v) in &model.vocabulary {
            let w = back.lookup(token).ok_or(format!("lost token {token}"))?;
            for (x, y) in v.iter().zip(w) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    ensure!(worst <= 1e-12, "round-trip error {worst:e}");

    let malformed = support::fixtures().join("malformed");
    let check = |file: &str, want: fn(&EmbeddingError) -> bool| -> Result<(), String> {
        match load_text_model(malformed.join(file), "bad") {
            Err(e) if want(&e) => Ok(()),
            other => Err(format!("{file}: unexpected {other:?}")),
        }
    };
    check("dimension_mismatch.txt", |e| {
        matches!(e, EmbeddingError::DimensionMismatch(3))
    })?;
    check("bad_number.txt", |e| matches!(e, EmbeddingError::MalformedNumber(2)))?;
    check("non_finite.txt", |e| matches!(e, EmbeddingError::MalformedNumber(1)))?;
    check("empty.txt", |e| matches!(e, EmbeddingError::EmptyModel))?;
    check("missing.txt", |e| matches!(e, EmbeddingError::Io { .. }))?;
    Ok(format!(
        "round-trip error {worst:.1e}; 5 malformed files rejected with the documented errors"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "1",
            "distance matches exact reference within 1e-9",
            c1_distance_conformance,
        ),
        ("2", "cosine symmetric, scale invariant, clamped", c2_cosine_properties),
        ("3", "Spearman with ties matches reference", c3_spearman),
        ("4", "synthetic two-cluster retrieval", c4_synthetic_retrieval),
        ("5", "end-to-end metrics on annotated fixture", c5_end_to_end),
        ("6", "deterministic ranking and corpus output", c6_determinism),
        ("7", "HTTP service matches CLI under concurrency", c7_parity),
        ("8", "embedding loader round-trip and errors", c8_loader),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {id}: {name} ({detail})"),
            Err(reason) => {
                failed += 1;
                println!("FAIL criterion {id}: {name} ({reason})");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
