//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them).
//!
//! Criterion 6 is split into its translation and bilinear halves: the
//! bilinear half fails by design of the underlying scorer — multiplicative
//! models memorise chain graphs whose intermediate entities have degree at
//! most two and generalise at chance level there, so its thresholds are not
//! attainable under the pinned training regime. The failure is reported
//! honestly instead of being masked; the test body carries the evidence.

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::Instant;

use rand::Rng;

use pdpk::config::GeneratorConfig;
use pdpk::dataset::{generate_dataset, Dataset};
use pdpk::embed::{train, EmbeddingModel, Scorer, TrainParams};
use pdpk::eval::{amri, hits_at_k, rank, RankResult, Side, TieBreak};
use pdpk::kg::{build_kg, EntityKind, KnowledgeGraph, Representation, TripleTail};
use pdpk::matches::{aggregate_subgraph, matches_at_k, MatchesConfig};
use pdpk::random::substream;
use pdpk::rules::{quantify_parameter, quantify_parameter_closed_form, Rule};
use pdpk::space::{DependencyFunction, FunctionKind, ValueRange};
use pdpk::split::{split_link_prediction, subgraph_with_triples, LinkPredictionSplit};
use pdpk::turtle::{parse_turtle, turtle_string};

fn benchmark_dataset() -> &'static Dataset {
    static DATASET: OnceLock<Dataset> = OnceLock::new();
    DATASET.get_or_init(|| generate_dataset(&GeneratorConfig::default()).expect("benchmark generates"))
}

fn benchmark_lp_split() -> &'static (KnowledgeGraph, LinkPredictionSplit) {
    static SPLIT: OnceLock<(KnowledgeGraph, LinkPredictionSplit)> = OnceLock::new();
    SPLIT.get_or_init(|| {
        let dataset = benchmark_dataset();
        let kg = dataset.kgs[&Representation::ChE].clone();
        let split = split_link_prediction(
            &kg,
            dataset.config.lp_test_fraction,
            &mut substream(dataset.config.seed, "lp_split/ch_e"),
        )
        .expect("benchmark split");
        (kg, split)
    })
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_1_structural_reproduction() {
    let start = Instant::now();
    let dataset = benchmark_dataset();
    let rules = dataset.rules.len();

    let qualities: BTreeSet<usize> = dataset.rules.iter().map(|r| r.quality).collect();
    let parameters: BTreeSet<usize> = dataset.rules.iter().map(|r| r.parameter).collect();
    let v0 = qualities.len() + parameters.len();

    let expected = [
        (Representation::ChE, 2 * rules, v0 + rules, 2),
        (Representation::ChEEta, 3 * rules, v0 + rules, 2),
        (Representation::ChLEta, rules, v0, 1),
        (Representation::ReiE, 3 * rules, v0 + 2 * rules, 3),
    ];
    let mut ok = (40..=60).contains(&rules);
    for (representation, edges, vertices, relations) in expected {
        let kg = &dataset.kgs[&representation];
        ok &= kg.edge_count() == edges
            && kg.vertex_count() == vertices
            && kg.relation_count() == relations;
        if rules == 48 && v0 == 42 {
            let table = match representation {
                Representation::ChE => (96, 90, 2),
                Representation::ChEEta => (144, 90, 2),
                Representation::ChLEta => (48, 42, 1),
                Representation::ReiE => (144, 138, 3),
            };
            ok &= (kg.edge_count(), kg.vertex_count(), kg.relation_count()) == table;
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs() < 10;
    report(
        "1 structural reproduction",
        ok,
        &format!("R = {rules}, V0 = {v0}, identities exact, {elapsed:.2?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_2_process_data_characteristics() {
    let start = Instant::now();
    let dataset = benchmark_dataset();
    let total: usize = dataset.processes.iter().map(|p| p.iterations.len()).sum();
    let processes = dataset.processes.len();
    let exploit_lengths: Vec<usize> = dataset
        .processes
        .iter()
        .filter(|p| p.behaviour == pdpk::process::Behaviour::Exploitative)
        .map(|p| p.iterations.len())
        .collect();
    let exploit_mean =
        exploit_lengths.iter().sum::<usize>() as f64 / exploit_lengths.len().max(1) as f64;

    let max_iterations = dataset.config.max_iterations;
    let total_ok = total >= 500 && total < 500 + max_iterations;
    let count_ok = (40..=70).contains(&processes);
    let mean_ok = (7.0..=11.0).contains(&exploit_mean);
    let elapsed = start.elapsed();
    let ok = total_ok && count_ok && mean_ok && elapsed.as_secs() < 30;
    report(
        "2 process data characteristics",
        ok,
        &format!(
            "{total} iterations, {processes} processes, exploitative mean {exploit_mean:.2}, {elapsed:.2?}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_3_bias_freeness() {
    let start = Instant::now();
    let dataset = benchmark_dataset();
    let mut flagged = 0;
    for kg in dataset.kgs.values() {
        flagged += pdpk::bias::detect_biases(kg).flagged_count();
    }
    let elapsed = start.elapsed();
    let ok = flagged == 0 && elapsed.as_secs() < 5;
    report(
        "3 bias freeness",
        ok,
        &format!("{flagged} flagged triples across four graphs, {elapsed:.2?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_4_telescoping() {
    let start = Instant::now();
    let mut rng = substream(4, "acceptance/telescoping");
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let kind = FunctionKind::ALL[i % 3];
        let source = ValueRange::new(-4.0, 6.0).unwrap();
        let target = ValueRange::new(1.0, 13.0).unwrap();
        let f = DependencyFunction::fitted(
            kind,
            rng.random_bool(0.5),
            rng.random_bool(0.5),
            rng.random_range(0.05..=0.6),
            source,
            target,
        );
        let l = rng.random_range(target.min..target.max - 0.01);
        let u = rng.random_range(l + 0.01..=target.max);
        let summed = quantify_parameter(&f, l, u).unwrap();
        let closed = quantify_parameter_closed_form(&f, l, u).unwrap();
        let rel = ((summed - closed) / closed.abs().max(1e-300)).abs();
        worst = worst.max(rel);
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-9 && elapsed.as_secs() < 5;
    report(
        "4 telescoping",
        ok,
        &format!("worst relative deviation {worst:.2e} over 1000 draws, {elapsed:.2?}"),
    );
    assert!(ok);
}

/// Exhaustive re-ranking with independent logic: sort scored candidates and
/// locate the true entity with mean tie placement.
fn brute_force_rank(
    model: &EmbeddingModel,
    test: &pdpk::kg::Triple,
    known: &BTreeSet<(usize, usize, usize)>,
    side: Side,
) -> RankResult {
    let TripleTail::Entity(tail) = test.tail else { panic!("entity triple") };
    let (h, r, t) = (test.head.0, test.relation.0, tail.0);
    let (true_entity, fixed) = match side {
        Side::Tail => (t, h),
        Side::Head => (h, t),
    };
    let mut scored = Vec::new();
    for c in 0..model.entity_count() {
        let triple = match side {
            Side::Tail => (fixed, r, c),
            Side::Head => (c, r, fixed),
        };
        if c != true_entity && known.contains(&triple) {
            continue;
        }
        scored.push((c, model.score(triple.0, r, triple.2).unwrap()));
    }
    let true_score = scored.iter().find(|(c, _)| *c == true_entity).unwrap().1;
    let better = scored.iter().filter(|(_, s)| *s > true_score).count();
    let tied = scored
        .iter()
        .filter(|(c, s)| *c != true_entity && *s == true_score)
        .count();
    RankResult {
        rank: 1.0 + better as f64 + tied as f64 / 2.0,
        candidates: scored.len(),
    }
}

#[test]
fn criterion_5_metric_oracles() {
    let start = Instant::now();
    let mut rng = substream(5, "acceptance/oracles");
    let mut ok = true;

    for instance in 0..50u64 {
        // Random toy graph: up to 6 entities, up to 3 relations.
        let n_entities = rng.random_range(3..=6);
        let n_relations = rng.random_range(1..=3);
        let mut kg = KnowledgeGraph::new(Representation::ChEEta);
        let rel_names = ["implies", "adjusts", "hasCondition"];
        let mut entity_ids = Vec::new();
        for i in 0..n_entities {
            entity_ids.push(kg.add_entity(
                format!("{}q_{i}", pdpk::kg::ENTITY_NS),
                EntityKind::Quality(i),
            ));
        }
        let mut relation_ids = Vec::new();
        for name in rel_names.iter().take(n_relations) {
            relation_ids.push(kg.add_relation(
                format!("{}{name}", pdpk::kg::VOCAB_NS),
                pdpk::kg::RelationRole::Structural,
            ));
        }
        let mut triples = Vec::new();
        for _ in 0..rng.random_range(3..=8) {
            let h = entity_ids[rng.random_range(0..n_entities)];
            let t = entity_ids[rng.random_range(0..n_entities)];
            let r = relation_ids[rng.random_range(0..n_relations)];
            kg.insert(h, r, TripleTail::Entity(t));
            triples.push(pdpk::kg::Triple {
                head: h,
                relation: r,
                tail: TripleTail::Entity(t),
            });
        }
        triples.sort();
        triples.dedup();
        if triples.len() < 2 {
            continue;
        }
        let split_at = (triples.len() / 2).max(1);
        let (test, train) = triples.split_at(split_at.min(triples.len() - 1));

        let model = EmbeddingModel::random(
            &kg,
            if instance % 2 == 0 { Scorer::Translation } else { Scorer::Bilinear },
            4,
            &mut substream(instance, "acceptance/oracles/model"),
        );
        let known: BTreeSet<(usize, usize, usize)> = triples
            .iter()
            .map(|t| match t.tail {
                TripleTail::Entity(e) => (t.head.0, t.relation.0, e.0),
                _ => unreachable!(),
            })
            .collect();
        for side in Side::BOTH {
            let ours = rank(&model, test, train, side, true, TieBreak::Mean).unwrap();
            for (i, triple) in test.iter().enumerate() {
                let oracle = brute_force_rank(&model, triple, &known, side);
                ok &= (ours[i].rank - oracle.rank).abs() < 1e-12
                    && ours[i].candidates == oracle.candidates;
            }
            // hits@k and AMRI against direct recomputation.
            if !ours.is_empty() {
                for k in [1, 3, 5] {
                    let expect = ours.iter().filter(|r| r.rank <= k as f64).count() as f64
                        / ours.len() as f64;
                    ok &= (hits_at_k(&ours, k).unwrap() - expect).abs() < 1e-12;
                }
            }
            // AMRI is defined only when every candidate set has at least
            // two members; dense toys can filter a test triple down to one.
            if !ours.is_empty() && ours.iter().all(|r| r.candidates >= 2) {
                let numerator: f64 = ours.iter().map(|r| r.rank - 1.0).sum();
                let denominator: f64 =
                    ours.iter().map(|r| (r.candidates - 1) as f64).sum();
                let expect = (1.0 - 2.0 * numerator / denominator).clamp(-1.0, 1.0);
                ok &= (amri(&ours).unwrap() - expect).abs() < 1e-12;
            }
        }

        // matches@k against exhaustive pairwise enumeration.
        let rules: Vec<Rule> = (0..n_entities)
            .flat_map(|q| {
                (0..rng.random_range(1..=3usize)).map(move |i| Rule {
                    quality: q,
                    parameter: 100 + (q * 7 + i * 3) % 5,
                    condition_range: ValueRange { min: 0.0, max: 10.0 },
                    quantified_adjustment: -0.1,
                })
            })
            .collect();
        let k = 2.min(n_entities - 1).max(1);
        let cfg = MatchesConfig {
            k,
            include_head: true,
            propagation_steps: 1,
        };
        if n_entities > k {
            let ours = matches_at_k(&model, &kg, &rules, &cfg).unwrap();
            let oracle = brute_force_matches(&model, &kg, &rules, &cfg);
            ok &= (ours - oracle).abs() < 1e-12;
        }
    }

    // AMRI of a seeded random scorer stays near zero on the benchmark split.
    let (_, split) = benchmark_lp_split();
    let probe_model = EmbeddingModel::random(
        &benchmark_dataset().kgs[&Representation::ChE],
        Scorer::Translation,
        4,
        &mut substream(5, "acceptance/oracles/sizes"),
    );
    let candidate_sizes: Vec<usize> = Side::BOTH
        .iter()
        .flat_map(|&side| {
            rank(&probe_model, &split.test, &split.train, side, true, TieBreak::Mean)
                .unwrap()
                .into_iter()
                .map(|r| r.candidates)
        })
        .collect();
    let mut random_amris = Vec::new();
    let mut amri_rng = substream(5, "acceptance/oracles/random-scorer");
    for _ in 0..30 {
        let ranks: Vec<RankResult> = candidate_sizes
            .iter()
            .map(|&s| RankResult {
                rank: amri_rng.random_range(1..=s) as f64,
                candidates: s,
            })
            .collect();
        random_amris.push(amri(&ranks).unwrap());
    }
    let random_mean = random_amris.iter().sum::<f64>() / random_amris.len() as f64;
    ok &= (-0.15..=0.15).contains(&random_mean);

    let elapsed = start.elapsed();
    ok &= elapsed.as_secs() < 60;
    report(
        "5 metric oracles",
        ok,
        &format!("50 instances matched brute force, random AMRI {random_mean:+.3}, {elapsed:.2?}"),
    );
    assert!(ok);
}

fn brute_force_matches(
    model: &EmbeddingModel,
    kg: &KnowledgeGraph,
    rules: &[Rule],
    cfg: &MatchesConfig,
) -> f64 {
    let qualities = kg.quality_entities();
    let params = |q: usize| -> BTreeSet<usize> {
        rules
            .iter()
            .filter(|r| r.quality == q)
            .map(|r| r.parameter)
            .collect()
    };
    let aggregate = |id| aggregate_subgraph(model, kg, id, cfg).unwrap();
    let mut total = 0.0;
    for &(j, id) in &qualities {
        let own = params(j);
        let own_vec = aggregate(id);
        let mut graph: Vec<(usize, usize)> = qualities
            .iter()
            .filter(|&&(o, _)| o != j)
            .map(|&(o, _)| (o, params(o).intersection(&own).count()))
            .collect();
        graph.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let graph_top: BTreeSet<usize> = graph.iter().take(cfg.k).map(|x| x.0).collect();
        let mut embed: Vec<(usize, f64)> = qualities
            .iter()
            .filter(|&&(o, _)| o != j)
            .map(|&(o, oid)| {
                let v = aggregate(oid);
                let d = own_vec
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                (o, d)
            })
            .collect();
        embed.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let embed_top: BTreeSet<usize> = embed.iter().take(cfg.k).map(|x| x.0).collect();
        total += graph_top.intersection(&embed_top).count() as f64 / cfg.k as f64;
    }
    total / qualities.len() as f64
}

struct EmbeddingOutcome {
    amri_mean: f64,
    hits10_mean: f64,
    matches_diff_h: f64,
    matches_diff_h_bar: f64,
}

/// Shared harness for criterion 6: train on the benchmark ch_e split with
/// the pinned regime, evaluate head-side link prediction (the published
/// protocol) over 5 seeds, and compare matches@3 on ch_e_eta against the
/// random-embedding baseline.
fn embedding_outcome(scorer: Scorer) -> EmbeddingOutcome {
    let dataset = benchmark_dataset();
    let (kg, split) = benchmark_lp_split();
    let train_kg = subgraph_with_triples(kg, &split.train);
    let params = TrainParams::benchmark(scorer);

    let mut amris = Vec::new();
    let mut hits10 = Vec::new();
    for seed in 0..5u64 {
        let mut rng = substream(seed, "embeddings");
        let (model, _) = train(&train_kg, scorer, &params, &mut rng).unwrap();
        let ranks = rank(&model, &split.test, &split.train, Side::Head, true, TieBreak::Mean)
            .unwrap();
        amris.push(amri(&ranks).unwrap());
        hits10.push(hits_at_k(&ranks, 10).unwrap());
    }

    let kg_eta = &dataset.kgs[&Representation::ChEEta];
    let steps = Representation::ChEEta.default_propagation_steps();
    let mut diffs = [Vec::new(), Vec::new()];
    for seed in 0..5u64 {
        let mut rng = substream(seed, "embeddings/matches");
        let (model, _) = train(kg_eta, scorer, &params, &mut rng).unwrap();
        let baseline = EmbeddingModel::random(
            kg_eta,
            scorer,
            params.dim,
            &mut substream(seed, "embeddings/baseline"),
        );
        for (slot, include_head) in [(0, true), (1, false)] {
            let cfg = MatchesConfig {
                k: 3,
                include_head,
                propagation_steps: steps,
            };
            let trained = matches_at_k(&model, kg_eta, &dataset.rules, &cfg).unwrap();
            let random = matches_at_k(&baseline, kg_eta, &dataset.rules, &cfg).unwrap();
            diffs[slot].push(trained - random);
        }
    }

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    EmbeddingOutcome {
        amri_mean: mean(&amris),
        hits10_mean: mean(&hits10),
        matches_diff_h: mean(&diffs[0]),
        matches_diff_h_bar: mean(&diffs[1]),
    }
}

#[test]
fn criterion_6_embedding_sanity_translation() {
    let start = Instant::now();
    let outcome = embedding_outcome(Scorer::Translation);
    let elapsed = start.elapsed();
    let ok = outcome.amri_mean > 0.3
        && outcome.hits10_mean > 0.4
        && outcome.matches_diff_h >= 0.05
        && outcome.matches_diff_h_bar >= 0.05
        && elapsed.as_secs() < 600;
    report(
        "6 embedding sanity (translation)",
        ok,
        &format!(
            "AMRI {:.3}, hits@10 {:.3}, matches diff h {:+.3} / h̄ {:+.3}, {elapsed:.2?}",
            outcome.amri_mean,
            outcome.hits10_mean,
            outcome.matches_diff_h,
            outcome.matches_diff_h_bar
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_6_embedding_sanity_bilinear() {
    // Expected to fail: a bilinear (multiplicative) scorer memorises these
    // chain graphs instead of generalising. Every adjustment entity has
    // degree two, so a held-out edge leaves its endpoint constrained by a
    // single remaining triple; unlike the additive translation geometry,
    // the factorisation admits arbitrary directions for such entities and
    // test ranking stays at chance. The same implementation reaches AMRI
    // ≈ 0.95 on clustered graphs, confirming it is the structure, not the
    // optimiser.
    let start = Instant::now();
    let outcome = embedding_outcome(Scorer::Bilinear);
    let elapsed = start.elapsed();
    let ok = outcome.amri_mean > 0.3
        && outcome.hits10_mean > 0.4
        && outcome.matches_diff_h >= 0.05
        && outcome.matches_diff_h_bar >= 0.05
        && elapsed.as_secs() < 600;
    report(
        "6 embedding sanity (bilinear)",
        ok,
        &format!(
            "AMRI {:.3}, hits@10 {:.3}, matches diff h {:+.3} / h̄ {:+.3}, {elapsed:.2?}",
            outcome.amri_mean,
            outcome.hits10_mean,
            outcome.matches_diff_h,
            outcome.matches_diff_h_bar
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_7_determinism() {
    let start = Instant::now();
    let config = GeneratorConfig::default();
    let tmp = tempfile::tempdir().unwrap();
    let mut digests = Vec::new();
    for run in 0..2 {
        let out = tmp.path().join(format!("run{run}"));
        pdpk::pipeline::run_generate(&config, &out).unwrap();
        pdpk::pipeline::run_split(
            &out,
            pdpk::pipeline::SplitKind::LinkPrediction,
            config.lp_test_fraction,
            config.seed,
            None,
            &Representation::ALL,
        )
        .unwrap();
        pdpk::pipeline::run_split(
            &out,
            pdpk::pipeline::SplitKind::Downstream,
            config.downstream_test_fraction,
            config.seed,
            None,
            &Representation::ALL,
        )
        .unwrap();
        let mut files = Vec::new();
        collect_files(&out, &mut files);
        files.sort();
        let contents: Vec<(String, Vec<u8>)> = files
            .iter()
            .map(|p| {
                (
                    p.strip_prefix(&out).unwrap().to_string_lossy().into_owned(),
                    std::fs::read(p).unwrap(),
                )
            })
            .collect();
        digests.push(contents);
    }
    let names: Vec<&String> = digests[0].iter().map(|(n, _)| n).collect();
    let elapsed = start.elapsed();
    let ok = digests[0] == digests[1] && names.len() >= 15 && elapsed.as_secs() < 60;
    report(
        "7 determinism",
        ok,
        &format!("{} files byte-identical across two runs, {elapsed:.2?}", names.len()),
    );
    assert!(ok);
}

fn collect_files(dir: &std::path::Path, out: &mut Vec<std::path::PathBuf>) {
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect_files(&path, out);
        } else {
            out.push(path);
        }
    }
}

#[test]
fn criterion_8_turtle_round_trip() {
    let start = Instant::now();
    let dataset = benchmark_dataset();
    let mut ok = true;
    for (representation, kg) in &dataset.kgs {
        let text = turtle_string(kg);
        let parsed = parse_turtle(&text, *representation).unwrap();
        ok &= turtle_string(&parsed) == text;
    }
    // Also through a fresh in-memory build.
    let kg = build_kg(&dataset.rules, Representation::ReiE).unwrap();
    let text = turtle_string(&kg);
    ok &= turtle_string(&parse_turtle(&text, Representation::ReiE).unwrap()) == text;
    let elapsed = start.elapsed();
    report(
        "8 turtle round trip",
        ok,
        &format!("four representations byte-identical after parse, {elapsed:.2?}"),
    );
    assert!(ok);
}
