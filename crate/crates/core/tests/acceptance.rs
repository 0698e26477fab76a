//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.
//!
//! cargo test --release --test acceptance

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use intent_miner::corpus::{generate_synthetic, GeneratorSpec, Ticket, TicketCollection};
use intent_miner::demo;
use intent_miner::embeddings::{
    cosine_similarity, gradient_check, train, train_with_stats, Architecture, EmbeddingModel, TrainingConfig,
};
use intent_miner::eval::{compare_models, evaluate, EvalReport};
use intent_miner::intent::{
    embed_taxonomy, rank_intents, EmbeddedTaxonomy, IntentDomain, IntentUseCase, Mapper, MappingConfig,
    RankingRecord, Taxonomy,
};
use intent_miner::preprocess::{run_pipeline, PatternLibrary, PipelineMode};
use intent_miner::topics::{grid_search, BowCorpus, GibbsSampler, GridSpec, LdaParams};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn naive_cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut ab = 0.0;
    let mut aa = 0.0;
    let mut bb = 0.0;
    for i in 0..a.len() {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    ab / (aa.sqrt() * bb.sqrt())
}

fn naive_sentence(vectors: &[&[f64]]) -> Option<Vec<f64>> {
    if vectors.is_empty() {
        return None;
    }
    let mut sum = vec![0.0; vectors[0].len()];
    for v in vectors {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for i in 0..v.len() {
            sum[i] += v[i] / n;
        }
    }
    Some(sum.into_iter().map(|x| x / vectors.len() as f64).collect())
}

fn within(elapsed: Duration, secs: u64) -> bool {
    elapsed < Duration::from_secs(secs)
}

// ---------------------------------------------------------------------------

fn c1_cosine() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut exact = true;
    for _ in 0..1000 {
        let dim = rng.gen_range(2..=300);
        let a: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c = cosine_similarity(&a, &b).unwrap();
        worst = worst.max((c - naive_cosine(&a, &b)).abs());
        exact &= c == cosine_similarity(&b, &a).unwrap();
        exact &= cosine_similarity(&a, &a).unwrap() == 1.0;
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-12 && exact && within(t, 1),
        format!("max |diff| {worst:.2e}, symmetry/self exact: {exact}, {t:.2?}"),
    )
}

fn c2_gradients() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let words = ["order", "late", "refund", "box", "parcel", "account", "close", "card", "tax", "return", "hi", "team"];
    for arch in [Architecture::SkipGram, Architecture::Cbow] {
        for seed in 0..20 {
            let corpus: Vec<Vec<String>> = (0..4)
                .map(|_| {
                    let n = rng.gen_range(3..8);
                    (0..n).map(|_| words.choose(&mut rng).unwrap().to_string()).collect()
                })
                .collect();
            let cfg = TrainingConfig {
                architecture: arch,
                dim: rng.gen_range(2..=16),
                window: rng.gen_range(1..=3),
                negatives: rng.gen_range(1..=6),
                min_count: 1,
                seed,
                ..TrainingConfig::default()
            };
            let r = gradient_check(&cfg, &corpus, 1e-5).unwrap();
            worst = worst.max(r.max_relative_error);
        }
    }
    let t = start.elapsed();
    outcome(worst < 1e-4 && within(t, 5), format!("max relative error {worst:.2e} over 40 checks, {t:.2?}"))
}

fn planted_embedding_corpus() -> (Vec<Vec<String>>, Vec<String>, Vec<String>) {
    let a: Vec<String> = (0..20).map(|i| format!("alpha{}", char::from(b'a' + i))).collect();
    let b: Vec<String> = (0..20).map(|i| format!("beta{}", char::from(b'a' + i))).collect();
    let ar: Vec<&str> = a.iter().map(String::as_str).collect();
    let br: Vec<&str> = b.iter().map(String::as_str).collect();
    let spec = GeneratorSpec::new(2000, 3).cluster("a", &ar).cluster("b", &br).noise(0.1);
    let corpus = generate_synthetic(&spec).unwrap();
    let docs = corpus.iter().map(|t| t.body.split(' ').map(str::to_string).collect()).collect();
    (docs, a, b)
}

fn planted_config(arch: Architecture, seed: u64) -> TrainingConfig {
    TrainingConfig {
        architecture: arch,
        dim: 50,
        window: 2,
        negatives: 5,
        epochs: 15,
        min_count: 1,
        seed,
        ..TrainingConfig::default()
    }
}

fn cluster_margin(model: &EmbeddingModel, a: &[String], b: &[String]) -> f64 {
    let cos = |x: &str, y: &str| cosine_similarity(model.word_vector(x).unwrap(), model.word_vector(y).unwrap()).unwrap();
    let mut intra = Vec::new();
    for c in [a, b] {
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                intra.push(cos(&c[i], &c[j]));
            }
        }
    }
    let inter: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| (x, y))).map(|(x, y)| cos(x, y)).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    mean(&intra) - mean(&inter)
}

fn c3_semantics(docs: &[Vec<String>], a: &[String], b: &[String]) -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (arch, need) in [(Architecture::SkipGram, 0.2), (Architecture::Cbow, 0.1)] {
        let start = Instant::now();
        let model = train(docs, &planted_config(arch, 1)).unwrap();
        let t = start.elapsed();
        let m = cluster_margin(&model, a, b);
        pass &= m >= need && within(t, 60);
        parts.push(format!("{arch} margin {m:.3} (need {need}) in {t:.2?}"));
    }
    outcome(pass, parts.join("; "))
}

fn c4_progress(docs: &[Vec<String>]) -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for arch in [Architecture::SkipGram, Architecture::Cbow] {
        let mut ok = 0;
        for seed in 1..=5 {
            let (_, stats) = train_with_stats(docs, &planted_config(arch, seed)).unwrap();
            if stats.epoch_losses.last().unwrap() < stats.epoch_losses.first().unwrap() {
                ok += 1;
            }
        }
        pass &= ok >= 4;
        parts.push(format!("{arch} {ok}/5 seeds"));
    }
    let t = start.elapsed();
    pass &= within(t, 300);
    outcome(pass, format!("{} decreasing, {t:.2?}", parts.join(", ")))
}

fn c5_neighbors(docs: &[Vec<String>]) -> Outcome {
    let model = train(docs, &planted_config(Architecture::SkipGram, 1)).unwrap();
    let start = Instant::now();
    let k = 7;
    let query = "alphaa";
    let rows = model.nearest_neighbors(query, k).unwrap();
    let sorted = rows.windows(2).all(|w| w[0].1 >= w[1].1);
    let excluded = rows.iter().all(|(w, _)| w != query);
    let q = model.word_vector(query).unwrap();
    let worst = rows
        .iter()
        .map(|(w, s)| (s - naive_cosine(q, model.word_vector(w).unwrap())).abs())
        .fold(0.0, f64::max);
    let t = start.elapsed();
    outcome(
        rows.len() == k && sorted && excluded && worst <= 1e-12 && within(t, 1),
        format!("{} rows, sorted {sorted}, query excluded {excluded}, max recompute diff {worst:.2e}, {t:.2?}", rows.len()),
    )
}

fn c6_sentence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let dim = 12;
    let words: Vec<(String, Vec<f64>)> = (0..30)
        .map(|i| (format!("w{i}"), (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect()))
        .collect();
    let model = EmbeddingModel::from_vectors(&words).unwrap();
    let lookup: HashMap<&str, &[f64]> = words.iter().map(|(w, v)| (w.as_str(), v.as_slice())).collect();
    let mut worst: f64 = 0.0;
    let mut shape_ok = true;
    for case in 0..100 {
        let len = if case < 10 { 1 } else { rng.gen_range(1..8) };
        let mut tokens: Vec<String> = (0..len)
            .map(|_| {
                if rng.gen_bool(0.2) {
                    format!("oov{}", rng.gen_range(0..5))
                } else {
                    words.choose(&mut rng).unwrap().0.clone()
                }
            })
            .collect();
        let known: Vec<&[f64]> = tokens.iter().filter_map(|t| lookup.get(t.as_str()).copied()).collect();
        let got = model.sentence_embedding(&tokens);
        match (got, naive_sentence(&known)) {
            (Some(g), Some(e)) => {
                worst = worst.max(g.iter().zip(&e).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
                tokens.shuffle(&mut rng);
                let p = model.sentence_embedding(&tokens).unwrap();
                worst = worst.max(p.iter().zip(&e).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
            }
            (None, None) => {}
            _ => shape_ok = false,
        }
    }
    let all_oov = model.sentence_embedding(&["oov1", "oov2"]).is_none();
    let t = start.elapsed();
    outcome(
        worst <= 1e-12 && shape_ok && all_oov && within(t, 1),
        format!("max diff {worst:.2e}, presence agrees {shape_ok}, all-OOV absent {all_oov}, {t:.2?}"),
    )
}

fn planted_topic_corpus(topics: usize, docs: usize, words_per_topic: usize, seed: u64) -> (BowCorpus, HashMap<String, usize>) {
    let vocab: Vec<Vec<String>> = (0..topics)
        .map(|t| (0..words_per_topic).map(|i| format!("topic{t}word{i}")).collect())
        .collect();
    let mut spec = GeneratorSpec::new(docs, seed);
    for (t, words) in vocab.iter().enumerate() {
        let w: Vec<&str> = words.iter().map(String::as_str).collect();
        spec = spec.cluster(&format!("t{t}"), &w);
    }
    let corpus = generate_synthetic(&spec).unwrap();
    let tokens: Vec<Vec<&str>> = corpus.iter().map(|t| t.body.split(' ').collect()).collect();
    let owner = vocab
        .iter()
        .enumerate()
        .flat_map(|(t, ws)| ws.iter().map(move |w| (w.clone(), t)))
        .collect();
    (BowCorpus::from_token_docs(&tokens), owner)
}

fn lda_run() -> (intent_miner::topics::LdaModel, HashMap<String, usize>, bool) {
    let (bow, owner) = planted_topic_corpus(2, 200, 15, 7);
    let params = LdaParams {
        k: 2,
        alpha: 0.1,
        beta: 0.01,
        iterations: 500,
        seed: 7,
    };
    let mut sampler = GibbsSampler::new(&bow, params).unwrap();
    let mut consistent = sampler.model().counts_consistent();
    for _ in 0..500 {
        sampler.sweep();
        consistent &= sampler.model().counts_consistent();
    }
    (sampler.into_model(), owner, consistent)
}

fn c7_lda() -> (Outcome, String) {
    let start = Instant::now();
    let (model, owner, consistent) = lda_run();
    let mut table = [[0usize; 2]; 2];
    for (d, z) in model.assignments().iter().enumerate() {
        for (&w, &k) in model.doc_tokens(d).iter().zip(z) {
            table[owner[&model.vocabulary()[w]]][k] += 1;
        }
    }
    let majority: usize = table.iter().map(|r| *r.iter().max().unwrap()).sum();
    let total: usize = table.iter().flatten().sum();
    let purity = majority as f64 / total as f64;
    let t = start.elapsed();
    let bytes = serde_json::to_string(&model).unwrap();
    (
        outcome(
            purity >= 0.9 && consistent && within(t, 30),
            format!("purity {purity:.4}, counts consistent after every sweep {consistent}, {t:.2?}"),
        ),
        bytes,
    )
}

fn c8_model_selection() -> Outcome {
    let start = Instant::now();
    let (bow, _) = planted_topic_corpus(3, 600, 15, 8);
    let spec = GridSpec {
        ks: (1..=6).collect(),
        alphas: vec![0.1],
        betas: vec![0.01],
        seed: 8,
        ..GridSpec::default()
    };
    let result = grid_search(&bow, &spec).unwrap();
    let best = result.best_row();
    let k1 = result.row_for(1, 0.1, 0.01).unwrap().perplexity;
    let t = start.elapsed();
    let curve: Vec<String> = (1..=6)
        .map(|k| format!("K{k}={:.2}", result.row_for(k, 0.1, 0.01).unwrap().perplexity))
        .collect();
    outcome(
        best.perplexity < k1 && (3..=4).contains(&best.k) && within(t, 300),
        format!("best K={} ({}), {t:.2?}", best.k, curve.join(" ")),
    )
}

// Words that every pipeline stage leaves untouched.
fn opaque_word(i: usize) -> String {
    const LETTERS: &[u8] = b"bcdfghjkmnpqrtvwxz";
    let mut s = String::from("zq");
    let mut n = i;
    loop {
        s.push(LETTERS[n % LETTERS.len()] as char);
        n /= LETTERS.len();
        if n == 0 {
            break;
        }
    }
    s
}

struct BruteEntry {
    use_case: String,
    score: f64,
}

/// Cosine restricted to its mathematical range [-1, 1].
fn bounded_cosine(a: &[f64], b: &[f64]) -> f64 {
    naive_cosine(a, b).clamp(-1.0, 1.0)
}

/// Triple loop over use cases, sentences and variations, then a selection sort.
fn brute_force_rank(
    taxonomy: &Taxonomy,
    variation_vecs: &[Vec<Vec<f64>>],
    sentence_vecs: &[Vec<f64>],
    subject_vec: Option<&[f64]>,
    config: &MappingConfig,
) -> Vec<BruteEntry> {
    let flat: Vec<(usize, &IntentUseCase)> = taxonomy
        .domains
        .iter()
        .enumerate()
        .flat_map(|(d, dom)| dom.use_cases.iter().map(move |u| (d, u)))
        .collect();
    let mut domain = None;
    if let (Some(s), true) = (subject_vec, config.subject_narrowing) {
        let mut best = vec![f64::NEG_INFINITY; taxonomy.domains.len()];
        for (i, (d, _)) in flat.iter().enumerate() {
            for v in &variation_vecs[i] {
                best[*d] = best[*d].max(bounded_cosine(s, v));
            }
        }
        let mut arg = 0;
        for d in 1..best.len() {
            if best[d] > best[arg] {
                arg = d;
            }
        }
        if best[arg] >= config.subject_threshold {
            domain = Some(arg);
        }
    }
    let mut cands: Vec<BruteEntry> = Vec::new();
    if sentence_vecs.is_empty() {
        return cands;
    }
    for (i, (d, u)) in flat.iter().enumerate() {
        if domain.is_some_and(|x| x != *d) {
            continue;
        }
        let mut best = f64::NEG_INFINITY;
        for s in sentence_vecs {
            for v in &variation_vecs[i] {
                best = best.max(bounded_cosine(s, v));
            }
        }
        if best >= config.min_score {
            cands.push(BruteEntry {
                use_case: u.name.clone(),
                score: best,
            });
        }
    }
    let mut out = Vec::new();
    while !cands.is_empty() && out.len() < config.top_n {
        let mut arg = 0;
        for j in 1..cands.len() {
            if cands[j].score > cands[arg].score {
                arg = j;
            }
        }
        out.push(cands.remove(arg));
    }
    out
}

fn c9_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut order_ok = true;
    let mut narrowed_seen = 0;
    for _ in 0..100 {
        let dim = 6;
        let pool: Vec<(String, Vec<f64>)> = (0..15)
            .map(|i| (opaque_word(i), (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()))
            .collect();
        let model = EmbeddingModel::from_vectors(&pool).unwrap();
        let phrase = |rng: &mut ChaCha8Rng| -> Vec<usize> { (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..pool.len())).collect() };
        let text = |ids: &[usize]| ids.iter().map(|&i| pool[i].0.clone()).collect::<Vec<_>>().join(" ");
        let vec_of = |ids: &[usize]| naive_sentence(&ids.iter().map(|&i| pool[i].1.as_slice()).collect::<Vec<_>>()).unwrap();

        let mut domains = Vec::new();
        let mut variation_vecs = Vec::new();
        let mut n = 0;
        for d in 0..rng.gen_range(1..=3) {
            let mut ucs = Vec::new();
            for _ in 0..rng.gen_range(1..=4) {
                let mut vs = Vec::new();
                let mut vv = Vec::new();
                for _ in 0..rng.gen_range(1..=5) {
                    let ids = phrase(&mut rng);
                    vs.push(text(&ids));
                    vv.push(vec_of(&ids));
                }
                ucs.push(IntentUseCase {
                    name: format!("use case {n}"),
                    variations: vs,
                });
                variation_vecs.push(vv);
                n += 1;
            }
            domains.push(IntentDomain {
                name: format!("domain {d}"),
                use_cases: ucs,
            });
        }
        let taxonomy = Taxonomy::new(domains).unwrap();
        let etx: EmbeddedTaxonomy = embed_taxonomy(&taxonomy, &model).unwrap();
        let sentences: Vec<Vec<usize>> = (0..rng.gen_range(1..=6)).map(|_| phrase(&mut rng)).collect();
        let body = sentences.iter().map(|s| text(s)).collect::<Vec<_>>().join(". ");
        let sentence_vecs: Vec<Vec<f64>> = sentences.iter().map(|s| vec_of(s)).collect();
        let subject = phrase(&mut rng);
        let ticket = Ticket::new("t", body).with_subject(text(&subject));
        let subject_vec = vec_of(&subject);

        let narrowed = MappingConfig {
            subject_threshold: rng.gen_range(-0.2..0.9),
            top_n: rng.gen_range(1..=16),
            min_score: rng.gen_range(-1.0..0.3),
            subject_narrowing: true,
        };
        let all = MappingConfig {
            subject_narrowing: false,
            ..narrowed.clone()
        };
        for cfg in [&narrowed, &all] {
            let got = rank_intents(&ticket, &etx, &model, cfg).unwrap();
            narrowed_seen += got.subject_narrowed as usize;
            let want = brute_force_rank(&taxonomy, &variation_vecs, &sentence_vecs, Some(&subject_vec), cfg);
            order_ok &= got.entries.len() == want.len();
            for (g, w) in got.entries.iter().zip(&want) {
                order_ok &= g.use_case == w.use_case;
                worst = worst.max((g.score - w.score).abs());
            }
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-9 && order_ok && narrowed_seen > 0 && within(t, 5),
        format!("max |diff| {worst:.2e}, order identical {order_ok}, narrowed in {narrowed_seen}/100, {t:.2?}"),
    )
}

struct C10Run {
    report: EvalReport,
    rankings: String,
    model_bytes: Vec<u8>,
}

fn c10_train(docs: &[Vec<String>], arch: Architecture, dim: usize) -> EmbeddingModel {
    let cfg = TrainingConfig {
        architecture: arch,
        dim,
        min_count: 1,
        seed: 10,
        ..TrainingConfig::default()
    };
    train(docs, &cfg).unwrap()
}

fn c10_data() -> (Vec<Vec<String>>, TicketCollection, intent_miner::eval::LabelledSet) {
    let corpus = generate_synthetic(&demo::training_spec(10_000, 10)).unwrap();
    let lib = PatternLibrary::default();
    let docs = corpus.iter().map(|t| run_pipeline(t, PipelineMode::Embedding, &lib).tokens).collect();
    let (tickets, labels) = demo::labelled_tickets(400, 0.3, 11).unwrap();
    (docs, tickets, labels)
}

fn c10_run(docs: &[Vec<String>], tickets: &TicketCollection, labels: &intent_miner::eval::LabelledSet, arch: Architecture, dim: usize) -> C10Run {
    let model = c10_train(docs, arch, dim);
    let etx = embed_taxonomy(&demo::taxonomy(), &model).unwrap();
    let config = MappingConfig::default();
    let report = evaluate(labels, tickets, &etx, &model, &config, 3).unwrap();
    let mapper = Mapper::new(&model, &etx, config.clone()).unwrap();
    let rankings = tickets
        .iter()
        .zip(mapper.rank_batch(tickets))
        .map(|(t, r)| RankingRecord::new(&t.id, &config, &r).to_json_line() + "\n")
        .collect();
    C10Run {
        report,
        rankings,
        model_bytes: model.to_bytes(),
    }
}

fn c10_accuracy() -> (Outcome, C10Run) {
    let start = Instant::now();
    let (docs, tickets, labels) = c10_data();
    let primary = c10_run(&docs, &tickets, &labels, Architecture::SkipGram, 100);

    // independent confusion tally from the rankings
    let mut tally: HashMap<String, (usize, usize)> = HashMap::new();
    let gold: HashMap<&str, &str> = labels.labels().iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    for line in primary.rankings.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let id = v["id"].as_str().unwrap();
        let top = v["intents"].get(0).map(|e| e["use_case"].as_str().unwrap().to_string());
        let e = tally.entry(gold[id].to_string()).or_default();
        e.0 += 1;
        e.1 += (top.as_deref() == Some(gold[id])) as usize;
    }
    let tally_ok = primary
        .report
        .rows
        .iter()
        .all(|r| tally.get(&r.use_case) == Some(&(r.count, r.correct)))
        && tally.len() == primary.report.rows.len();

    let overall = primary.report.micro_accuracy();
    let worst = primary
        .report
        .rows
        .iter()
        .map(|r| (r.accuracy(), r.use_case.as_str()))
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .unwrap_or((0.0, "none"));

    let mut reports = Vec::new();
    for arch in [Architecture::SkipGram, Architecture::Cbow] {
        for dim in [100, 200, 300] {
            if arch == Architecture::SkipGram && dim == 100 {
                reports.push(primary.report.clone());
            } else {
                let model = c10_train(&docs, arch, dim);
                let etx = embed_taxonomy(&demo::taxonomy(), &model).unwrap();
                reports.push(evaluate(&labels, &tickets, &etx, &model, &MappingConfig::default(), 3).unwrap());
            }
        }
    }
    let table = compare_models(&reports).unwrap();
    let shape_ok = table.rows.len() == 6
        && table.rows.iter().all(|r| r.1.len() == 8)
        && table.to_csv().lines().count() == 8
        && table.counts.iter().sum::<usize>() == 400;
    let t = start.elapsed();
    let others: Vec<String> = table.rows.iter().map(|r| format!("{}={:.3}", r.0, r.2)).collect();
    (
        outcome(
            overall >= 0.9 && worst.0 >= 0.8 && tally_ok && shape_ok && within(t, 600),
            format!(
                "skipgram-100 top-1 {overall:.4}, worst use case {} {:.3}, tally matches {tally_ok}, 6-row table {shape_ok} [{}], {t:.2?}",
                worst.1,
                worst.0,
                others.join(" ")
            ),
        ),
        primary,
    )
}

fn c11_determinism(c3_docs: &[Vec<String>], lda_bytes: &str, c10: &C10Run) -> Outcome {
    let start = Instant::now();
    let a = train(c3_docs, &planted_config(Architecture::SkipGram, 1)).unwrap().to_bytes();
    let b = train(c3_docs, &planted_config(Architecture::SkipGram, 1)).unwrap().to_bytes();
    let emb = a == b;
    let lda = serde_json::to_string(&lda_run().0).unwrap() == lda_bytes;
    let (docs, tickets, labels) = c10_data();
    let again = c10_run(&docs, &tickets, &labels, Architecture::SkipGram, 100);
    let model = again.model_bytes == c10.model_bytes;
    let report = again.report.to_csv_string() == c10.report.to_csv_string();
    let rankings = again.rankings == c10.rankings;
    let t = start.elapsed();
    outcome(
        emb && lda && model && report && rankings,
        format!("embedding model {emb}, lda model {lda}, intent model {model}, report {report}, rankings {rankings}, {t:.2?}"),
    )
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let report = |name: &'static str, o: Outcome, results: &mut Vec<(&str, Outcome)>| {
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((name, o));
    };
    report("C1 cosine matches naive oracle", c1_cosine(), &mut results);
    report("C2 gradient check", c2_gradients(), &mut results);
    let (docs, a, b) = planted_embedding_corpus();
    report("C3 planted embedding clusters", c3_semantics(&docs, &a, &b), &mut results);
    report("C4 training loss decreases", c4_progress(&docs), &mut results);
    report("C5 nearest neighbours", c5_neighbors(&docs), &mut results);
    report("C6 sentence embedding oracle", c6_sentence(), &mut results);
    let (c7, lda_bytes) = c7_lda();
    report("C7 planted LDA topics", c7, &mut results);
    report("C8 perplexity model selection", c8_model_selection(), &mut results);
    report("C9 ranking oracle equivalence", c9_oracle(), &mut results);
    let (c10, run) = c10_accuracy();
    report("C10 planted intent accuracy", c10, &mut results);
    report("C11 determinism", c11_determinism(&docs, &lda_bytes, &run), &mut results);

    let failed = results.iter().filter(|(_, o)| !o.pass).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
