//! End-to-end pipeline: generation, statistics and bias reporting,
//! splitting, embedding training and evaluation, all driven from one
//! configuration and writing deterministic artifacts.
//!
//! Stage order is validated (generation first, splitting before embedding,
//! embedding before evaluation). Generation writes through a staging
//! directory renamed into place, so aborted runs leave no partial output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bias::{detect_biases, BiasReport};
use crate::config::{load_config, ConfigError, GeneratorConfig};
use crate::dataset::{generate_dataset, kg_file_name, write_dataset, Dataset, GenerateError};
use crate::embed::{train, EmbeddingModel, Scorer, TrainParams};
use crate::eval::{amri, hits_at_k, rank, EvalError, RankResult, Side, TieBreak};
use crate::kg::{KgError, KnowledgeGraph, Representation, Triple, TripleTail};
use crate::matches::{matches_at_k, MatchesConfig};
use crate::random::substream;
use crate::rules::Rule;
use crate::split::{
    split_downstream, split_link_prediction, subgraph_with_triples, SplitError,
};
use crate::stats::{compute_stats, DegreeCentralityMode, GraphStats, StatsError};
use crate::turtle::{parse_turtle, write_turtle, TurtleError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Turtle(#[from] TurtleError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Kg(#[from] KgError),
    #[error("missing dataset artifact: {0}")]
    MissingFile(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Generate,
    Stats,
    Bias,
    Split,
    Embed,
    Eval,
}

/// One configured pipeline execution over an output directory.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub config: GeneratorConfig,
    pub output_dir: PathBuf,
    pub stages: Vec<Stage>,
}

impl PipelineRun {
    /// Stages must respect dependency order: generation before everything,
    /// splitting before embedding, embedding before evaluation.
    pub fn validate_stages(&self) -> Result<(), ConfigError> {
        let position = |stage: Stage| self.stages.iter().position(|&s| s == stage);
        let order_ok = |before: Stage, after: Stage| match (position(before), position(after)) {
            (Some(b), Some(a)) => b < a,
            (None, Some(_)) => false,
            _ => true,
        };
        for later in [Stage::Stats, Stage::Bias, Stage::Split, Stage::Embed, Stage::Eval] {
            if !order_ok(Stage::Generate, later) {
                return Err(ConfigError::invalid(
                    "stages",
                    "generate must come before every other stage",
                ));
            }
        }
        if !order_ok(Stage::Split, Stage::Embed) {
            return Err(ConfigError::invalid("stages", "split must come before embed"));
        }
        if !order_ok(Stage::Embed, Stage::Eval) {
            return Err(ConfigError::invalid("stages", "embed must come before eval"));
        }
        Ok(())
    }

    /// Run the configured stages in order.
    pub fn execute(&self) -> Result<(), PipelineError> {
        self.validate_stages()?;
        for &stage in &self.stages {
            match stage {
                Stage::Generate => {
                    run_generate(&self.config, &self.output_dir)?;
                }
                Stage::Stats | Stage::Bias => {
                    run_stats(&self.output_dir)?;
                }
                Stage::Split => {
                    run_split(
                        &self.output_dir,
                        SplitKind::LinkPrediction,
                        self.config.lp_test_fraction,
                        self.config.seed,
                        None,
                        &Representation::ALL,
                    )?;
                    run_split(
                        &self.output_dir,
                        SplitKind::Downstream,
                        self.config.downstream_test_fraction,
                        self.config.seed,
                        None,
                        &Representation::ALL,
                    )?;
                }
                Stage::Embed | Stage::Eval => {
                    run_embed_eval(
                        &self.output_dir,
                        &Scorer::ALL,
                        1,
                        self.config.seed,
                        &Representation::ALL,
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// Generate the dataset and write it atomically: everything lands in a
/// sibling staging directory first, which is renamed over the target only
/// once complete.
pub fn run_generate(config: &GeneratorConfig, out_dir: &Path) -> Result<Dataset, PipelineError> {
    let dataset = generate_dataset(config)?;
    let staging = out_dir.with_file_name(format!(
        "{}.partial",
        out_dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    ));
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    write_dataset(&dataset, &staging)?;
    if out_dir.exists() {
        fs::remove_dir_all(out_dir)?;
    }
    fs::rename(&staging, out_dir)?;
    Ok(dataset)
}

/// Read a dataset's config back from its manifest.
pub fn load_manifest_config(dataset_dir: &Path) -> Result<GeneratorConfig, PipelineError> {
    let path = dataset_dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(|_| PipelineError::MissingFile(path))?;
    let manifest: crate::dataset::Manifest =
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    Ok(manifest.config)
}

fn load_rules(dataset_dir: &Path) -> Result<Vec<Rule>, PipelineError> {
    let path = dataset_dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(|_| PipelineError::MissingFile(path))?;
    let manifest: crate::dataset::Manifest =
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    Ok(manifest.rules)
}

/// Parse one representation's Turtle file from a dataset directory.
pub fn load_kg(dataset_dir: &Path, representation: Representation) -> Result<KnowledgeGraph, PipelineError> {
    let path = dataset_dir.join(kg_file_name(representation));
    let text = fs::read_to_string(&path).map_err(|_| PipelineError::MissingFile(path))?;
    Ok(parse_turtle(&text, representation)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TripleBiasRecord {
    pub triple: String,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiasSection {
    pub thresholds: [f64; 3],
    pub flagged_b1: Vec<String>,
    pub flagged_b2: Vec<String>,
    pub flagged_b3: Vec<String>,
    pub flagged_total: usize,
    pub scores: Vec<TripleBiasRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepresentationReport {
    pub stats: GraphStats,
    pub bias: BiasSection,
}

pub type StatsReport = BTreeMap<String, RepresentationReport>;

fn triple_token(kg: &KnowledgeGraph, t: &Triple) -> String {
    let tail = match &t.tail {
        TripleTail::Entity(e) => kg.entity(*e).iri.clone(),
        TripleTail::Literal(lit) => lit.lexical(),
    };
    format!("{} {} {}", kg.entity(t.head).iri, kg.relation(t.relation).iri, tail)
}

fn bias_section(kg: &KnowledgeGraph, report: &BiasReport) -> BiasSection {
    let names = |set: &std::collections::BTreeSet<Triple>| {
        set.iter().map(|t| triple_token(kg, t)).collect::<Vec<_>>()
    };
    BiasSection {
        thresholds: [report.thresholds.0, report.thresholds.1, report.thresholds.2],
        flagged_b1: names(&report.flagged_b1),
        flagged_b2: names(&report.flagged_b2),
        flagged_b3: names(&report.flagged_b3),
        flagged_total: report.flagged_count(),
        scores: report
            .scores
            .iter()
            .map(|s| TripleBiasRecord {
                triple: triple_token(kg, &s.triple),
                b1: s.b1,
                b2: s.b2,
                b3: s.b3,
            })
            .collect(),
    }
}

/// Compute graph statistics and bias reports for every representation in
/// the dataset directory and write `stats.json`.
pub fn run_stats(dataset_dir: &Path) -> Result<StatsReport, PipelineError> {
    let mut report = StatsReport::new();
    for representation in Representation::ALL {
        let kg = load_kg(dataset_dir, representation)?;
        let stats = compute_stats(&kg, DegreeCentralityMode::Reciprocal)?;
        let bias = bias_section(&kg, &detect_biases(&kg));
        report.insert(
            representation.as_str().to_string(),
            RepresentationReport { stats, bias },
        );
    }
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    fs::write(dataset_dir.join("stats.json"), text)?;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitKind {
    LinkPrediction,
    Downstream,
}

impl SplitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SplitKind::LinkPrediction => "lp",
            SplitKind::Downstream => "downstream",
        }
    }

    pub fn from_str(s: &str) -> Option<SplitKind> {
        match s {
            "lp" | "link_prediction" => Some(SplitKind::LinkPrediction),
            "downstream" => Some(SplitKind::Downstream),
            _ => None,
        }
    }
}

/// Write train/ and test/ artifacts for the requested split kind.
///
/// Link-prediction splits emit per-representation Turtle files holding the
/// train and test triples. Downstream splits emit train and test process
/// CSVs plus the (no-op) pruned knowledge graphs on the train side.
pub fn run_split(
    dataset_dir: &Path,
    kind: SplitKind,
    fraction: f64,
    seed: u64,
    out_dir: Option<&Path>,
    representations: &[Representation],
) -> Result<PathBuf, PipelineError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(ConfigError::invalid(
            "fraction",
            format!("{fraction} outside (0, 1)"),
        )
        .into());
    }
    let out = out_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| dataset_dir.join(format!("split_{}", kind.as_str())));
    let train_dir = out.join("train");
    let test_dir = out.join("test");
    fs::create_dir_all(&train_dir)?;
    fs::create_dir_all(&test_dir)?;

    match kind {
        SplitKind::LinkPrediction => {
            for &representation in representations {
                let kg = load_kg(dataset_dir, representation)?;
                let mut rng = substream(seed, &format!("lp_split/{representation}"));
                let split = split_link_prediction(&kg, fraction, &mut rng)?;
                for (dir, triples) in [(&train_dir, &split.train), (&test_dir, &split.test)] {
                    let sub = subgraph_with_triples(&kg, triples);
                    let mut file = fs::File::create(dir.join(kg_file_name(representation)))?;
                    write_turtle(&sub, &mut file)?;
                }
            }
        }
        SplitKind::Downstream => {
            let config = load_manifest_config(dataset_dir)?;
            let dataset = generate_dataset(&config)?;
            let mut rng = substream(seed, "downstream_split");
            let split = split_downstream(&dataset, fraction, &mut rng);
            for (dir, rows) in [(&train_dir, &split.train), (&test_dir, &split.test)] {
                let keep: std::collections::BTreeSet<(usize, usize)> =
                    rows.iter().copied().collect();
                let mut file = fs::File::create(dir.join("process_data.csv"))?;
                crate::dataset::write_process_csv_filtered(&dataset, Some(&keep), &mut file)?;
            }
            for &representation in representations {
                let kg = load_kg(dataset_dir, representation)?;
                let (pruned, _no_op) = crate::split::prune_kg(&kg, &split.test);
                let mut file = fs::File::create(train_dir.join(kg_file_name(representation)))?;
                write_turtle(&pruned, &mut file)?;
            }
        }
    }
    Ok(out)
}

/// Map triples from a parsed split file onto the registry ids of the full
/// graph they were split from.
pub fn align_triples(target: &KnowledgeGraph, source: &KnowledgeGraph) -> Result<Vec<Triple>, PipelineError> {
    source
        .triples()
        .map(|t| {
            let head_iri = &source.entity(t.head).iri;
            let rel_iri = &source.relation(t.relation).iri;
            let head = target
                .entity_id(head_iri)
                .ok_or_else(|| PipelineError::Kg(KgError::MalformedEntity(head_iri.clone())))?;
            let relation = target
                .relation_id(rel_iri)
                .ok_or_else(|| PipelineError::Kg(KgError::MalformedEntity(rel_iri.clone())))?;
            let tail = match &t.tail {
                TripleTail::Entity(e) => {
                    let iri = &source.entity(*e).iri;
                    TripleTail::Entity(target.entity_id(iri).ok_or_else(|| {
                        PipelineError::Kg(KgError::MalformedEntity(iri.clone()))
                    })?)
                }
                TripleTail::Literal(lit) => TripleTail::Literal(*lit),
            };
            Ok(Triple { head, relation, tail })
        })
        .collect()
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MetricBlock {
    pub amri_mean: f64,
    pub amri_std: f64,
    pub hits1_mean: f64,
    pub hits1_std: f64,
    pub hits5_mean: f64,
    pub hits5_std: f64,
    pub hits10_mean: f64,
    pub hits10_std: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MatchesBlock {
    pub h_mean: f64,
    pub h_std: f64,
    pub h_bar_mean: f64,
    pub h_bar_std: f64,
    pub random_h_mean: f64,
    pub random_h_bar_mean: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EvalReport {
    pub runs: usize,
    /// representation → scorer → side → metrics.
    pub link_prediction: BTreeMap<String, BTreeMap<String, BTreeMap<String, MetricBlock>>>,
    /// representation → scorer → matches@3 blocks.
    pub matches: BTreeMap<String, BTreeMap<String, MatchesBlock>>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    (mean, var.sqrt())
}

fn metric_block(per_run_ranks: &[Vec<RankResult>]) -> Result<MetricBlock, EvalError> {
    let mut amris = Vec::new();
    let mut hits = [Vec::new(), Vec::new(), Vec::new()];
    for ranks in per_run_ranks {
        amris.push(amri(ranks)?);
        for (slot, k) in [(0, 1), (1, 5), (2, 10)] {
            hits[slot].push(hits_at_k(ranks, k)?);
        }
    }
    let (amri_mean, amri_std) = mean_std(&amris);
    let (hits1_mean, hits1_std) = mean_std(&hits[0]);
    let (hits5_mean, hits5_std) = mean_std(&hits[1]);
    let (hits10_mean, hits10_std) = mean_std(&hits[2]);
    Ok(MetricBlock {
        amri_mean,
        amri_std,
        hits1_mean,
        hits1_std,
        hits5_mean,
        hits5_std,
        hits10_mean,
        hits10_std,
    })
}

/// Train embedding models and evaluate link prediction (on the prepared
/// split) and matches@3 (in-sample on the full graph), writing `eval.json`.
///
/// Link-prediction models are trained on the train split; the retention
/// metric trains on the full graph since it is evaluated in-sample.
pub fn run_embed_eval(
    dataset_dir: &Path,
    scorers: &[Scorer],
    runs: usize,
    seed: u64,
    representations: &[Representation],
) -> Result<EvalReport, PipelineError> {
    let rules = load_rules(dataset_dir)?;
    let split_dir = dataset_dir.join("split_lp");
    let mut report = EvalReport {
        runs,
        ..EvalReport::default()
    };

    for &representation in representations {
        let kg = load_kg(dataset_dir, representation)?;
        let train_file = split_dir.join("train").join(kg_file_name(representation));
        if !train_file.exists() {
            return Err(PipelineError::MissingFile(train_file));
        }
        let train_split = parse_turtle(&fs::read_to_string(&train_file)?, representation)?;
        let test_file = split_dir.join("test").join(kg_file_name(representation));
        let test_split = parse_turtle(
            &fs::read_to_string(&test_file).map_err(|_| PipelineError::MissingFile(test_file))?,
            representation,
        )?;
        let train_triples = align_triples(&kg, &train_split)?;
        let test_triples = align_triples(&kg, &test_split)?;
        let train_kg = subgraph_with_triples(&kg, &train_triples);

        for &scorer in scorers {
            let params = TrainParams::benchmark(scorer);

            let mut side_ranks: BTreeMap<&str, Vec<Vec<RankResult>>> = BTreeMap::new();
            for run in 0..runs {
                let mut rng = substream(
                    seed,
                    &format!("embeddings/{representation}/{scorer}/lp/{run}"),
                );
                let (model, _) = train(&train_kg, scorer, &params, &mut rng)?;
                for side in Side::BOTH {
                    let ranks = rank(
                        &model,
                        &test_triples,
                        &train_triples,
                        side,
                        true,
                        TieBreak::Mean,
                    )?;
                    side_ranks.entry(side.as_str()).or_default().push(ranks);
                }
            }
            let scorer_entry = report
                .link_prediction
                .entry(representation.as_str().to_string())
                .or_default()
                .entry(scorer.as_str().to_string())
                .or_default();
            for (side, per_run) in side_ranks {
                scorer_entry.insert(side.to_string(), metric_block(&per_run)?);
            }

            let steps = representation.default_propagation_steps();
            let mut h_scores = Vec::new();
            let mut h_bar_scores = Vec::new();
            let mut random_h = Vec::new();
            let mut random_h_bar = Vec::new();
            for run in 0..runs {
                let mut rng = substream(
                    seed,
                    &format!("embeddings/{representation}/{scorer}/matches/{run}"),
                );
                let (model, _) = train(&kg, scorer, &params, &mut rng)?;
                let baseline = EmbeddingModel::random(
                    &kg,
                    scorer,
                    params.dim,
                    &mut substream(
                        seed,
                        &format!("embeddings/{representation}/{scorer}/baseline/{run}"),
                    ),
                );
                for (include_head, trained_bucket, random_bucket) in [
                    (true, &mut h_scores, &mut random_h),
                    (false, &mut h_bar_scores, &mut random_h_bar),
                ] {
                    let cfg = MatchesConfig {
                        k: 3,
                        include_head,
                        propagation_steps: steps,
                    };
                    trained_bucket.push(matches_at_k(&model, &kg, &rules, &cfg)?);
                    random_bucket.push(matches_at_k(&baseline, &kg, &rules, &cfg)?);
                }
            }
            let (h_mean, h_std) = mean_std(&h_scores);
            let (h_bar_mean, h_bar_std) = mean_std(&h_bar_scores);
            report
                .matches
                .entry(representation.as_str().to_string())
                .or_default()
                .insert(
                    scorer.as_str().to_string(),
                    MatchesBlock {
                        h_mean,
                        h_std,
                        h_bar_mean,
                        h_bar_std,
                        random_h_mean: mean_std(&random_h).0,
                        random_h_bar_mean: mean_std(&random_h_bar).0,
                    },
                );
        }
    }

    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    fs::write(dataset_dir.join("eval.json"), text)?;
    Ok(report)
}

/// Seed precedence: explicit flag, then the `PDPK_SEED` environment
/// variable, then the config value.
pub fn resolve_seed(flag: Option<u64>, config_seed: u64) -> u64 {
    if let Some(seed) = flag {
        return seed;
    }
    if let Ok(value) = std::env::var("PDPK_SEED") {
        if let Ok(seed) = value.parse() {
            return seed;
        }
    }
    config_seed
}

/// Read and validate a config file, or fall back to defaults when absent.
pub fn load_config_file(path: Option<&Path>) -> Result<GeneratorConfig, PipelineError> {
    match path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|_| PipelineError::MissingFile(path.to_path_buf()))?;
            Ok(load_config(&text)?)
        }
        None => Ok(GeneratorConfig::default()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_config() -> GeneratorConfig {
        GeneratorConfig {
            total_iterations: 60,
            ..GeneratorConfig::default()
        }
    }

    #[test]
    fn stage_order_is_validated() {
        let run = |stages: Vec<Stage>| PipelineRun {
            config: quick_config(),
            output_dir: PathBuf::from("unused"),
            stages,
        };
        assert!(run(vec![Stage::Generate, Stage::Stats]).validate_stages().is_ok());
        assert!(run(vec![Stage::Generate, Stage::Split, Stage::Embed, Stage::Eval])
            .validate_stages()
            .is_ok());
        assert!(run(vec![Stage::Stats, Stage::Generate]).validate_stages().is_err());
        assert!(run(vec![Stage::Generate, Stage::Embed]).validate_stages().is_err());
        assert!(run(vec![Stage::Generate, Stage::Split, Stage::Eval])
            .validate_stages()
            .is_err());
    }

    #[test]
    fn generate_writes_the_seven_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("dataset");
        run_generate(&quick_config(), &out).unwrap();
        let mut names: Vec<String> = fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        assert_eq!(names.len(), 7);
        assert!(!dir.path().join("dataset.partial").exists());
    }

    #[test]
    fn generate_replaces_existing_output_atomically() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("dataset");
        run_generate(&quick_config(), &out).unwrap();
        let before = fs::read(out.join("process_data.csv")).unwrap();
        run_generate(&quick_config(), &out).unwrap();
        let after = fs::read(out.join("process_data.csv")).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn stats_report_covers_all_representations() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("dataset");
        run_generate(&quick_config(), &out).unwrap();
        let report = run_stats(&out).unwrap();
        assert_eq!(report.len(), 4);
        assert!(out.join("stats.json").exists());
        for entry in report.values() {
            assert_eq!(entry.bias.flagged_total, 0);
        }
    }

    #[test]
    fn split_writes_train_and_test_directories() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("dataset");
        run_generate(&quick_config(), &out).unwrap();
        let split_dir =
            run_split(&out, SplitKind::LinkPrediction, 0.2, 42, None, &Representation::ALL).unwrap();
        for side in ["train", "test"] {
            for representation in Representation::ALL {
                assert!(split_dir.join(side).join(kg_file_name(representation)).exists());
            }
        }
        let ds_dir =
            run_split(&out, SplitKind::Downstream, 0.2, 42, None, &Representation::ALL).unwrap();
        assert!(ds_dir.join("train/process_data.csv").exists());
        assert!(ds_dir.join("test/process_data.csv").exists());
    }

    #[test]
    fn split_files_reassemble_into_the_full_graph() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("dataset");
        run_generate(&quick_config(), &out).unwrap();
        let split_dir = run_split(&out, SplitKind::LinkPrediction, 0.2, 42, None, &Representation::ALL).unwrap();
        for representation in Representation::ALL {
            let full = load_kg(&out, representation).unwrap();
            let train = parse_turtle(
                &fs::read_to_string(split_dir.join("train").join(kg_file_name(representation)))
                    .unwrap(),
                representation,
            )
            .unwrap();
            let test = parse_turtle(
                &fs::read_to_string(split_dir.join("test").join(kg_file_name(representation)))
                    .unwrap(),
                representation,
            )
            .unwrap();
            let train_triples = align_triples(&full, &train).unwrap();
            let test_triples = align_triples(&full, &test).unwrap();
            assert_eq!(train_triples.len() + test_triples.len(), full.triple_count());
            let all: std::collections::BTreeSet<Triple> = train_triples
                .into_iter()
                .chain(test_triples)
                .collect();
            assert_eq!(all.len(), full.triple_count());
        }
    }

    #[test]
    fn embed_eval_requires_a_split() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("dataset");
        run_generate(&quick_config(), &out).unwrap();
        assert!(matches!(
            run_embed_eval(&out, &[Scorer::Translation], 1, 42, &Representation::ALL),
            Err(PipelineError::MissingFile(_))
        ));
    }

    #[test]
    fn seed_precedence_is_flag_env_config() {
        // No env var set in tests unless exported; flag wins regardless.
        assert_eq!(resolve_seed(Some(7), 42), 7);
        assert_eq!(resolve_seed(None, 42), 42);
    }
}
