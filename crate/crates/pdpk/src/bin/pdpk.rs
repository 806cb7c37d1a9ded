//! Command-line pipeline: generation, statistics, splitting and embedding
//! evaluation over one dataset directory.
//!
//! Exit codes: 1 configuration error, 2 i/o or missing artifacts,
//! 3 infeasible split, 4 diverged training.

use std::path::PathBuf;
use std::sync::OnceLock;

use clap::{Parser, Subcommand};

use pdpk::config::{config_key_docs, ConfigError, GeneratorConfig};
use pdpk::dataset::GenerateError;
use pdpk::embed::Scorer;
use pdpk::eval::EvalError;
use pdpk::kg::Representation;
use pdpk::pipeline::{
    load_config_file, load_manifest_config, resolve_seed, run_embed_eval, run_generate,
    run_split, run_stats, PipelineError, SplitKind,
};
use pdpk::space::SpaceError;

fn config_help() -> &'static str {
    static HELP: OnceLock<String> = OnceLock::new();
    HELP.get_or_init(|| {
        let defaults = serde_json::to_value(GeneratorConfig::default()).expect("serializable");
        let mut out = String::from("Config keys (JSON, all optional; defaults shown):\n");
        for (key, doc) in config_key_docs() {
            let default = defaults
                .get(*key)
                .map(|v| serde_json::to_string(v).unwrap_or_default())
                .unwrap_or_default();
            out.push_str(&format!("  {key} = {default}\n      {doc}\n"));
        }
        out.push_str("\nThe PDPK_SEED environment variable overrides the config seed; a --seed flag overrides both.\n");
        out
    })
}

#[derive(Parser)]
#[command(
    name = "pdpk",
    about = "Synthesise manufacturing process data with procedural knowledge graphs and evaluate embeddings on them",
    after_long_help = config_help(),
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate process data, knowledge graphs, manifest and metadata
    Generate {
        /// JSON config file; omitted keys take benchmark defaults
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (written atomically)
        #[arg(long)]
        out: PathBuf,
        /// Override the config seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Graph statistics and bias report over a generated dataset
    Stats {
        dataset_dir: PathBuf,
    },
    /// Prepare train/ and test/ artifacts
    Split {
        dataset_dir: PathBuf,
        /// Split kind: lp (triples) or downstream (process iterations)
        #[arg(long, default_value = "lp")]
        kind: String,
        /// Test fraction in (0, 1)
        #[arg(long, default_value_t = 0.2)]
        fraction: f64,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory, defaults to <dataset_dir>/split_<kind>
        #[arg(long)]
        out: Option<PathBuf>,
        /// Restrict to one representation (ch_e, ch_e_eta, ch_l_eta, rei_e)
        #[arg(long)]
        representation: Option<String>,
    },
    /// Train embeddings, evaluate link prediction and matches@3, write eval.json
    EmbedEval {
        dataset_dir: PathBuf,
        /// translation or bilinear; both when omitted
        #[arg(long)]
        scorer: Option<String>,
        /// Independent training runs per configuration
        #[arg(long, default_value_t = 30)]
        runs: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Restrict to one representation
        #[arg(long)]
        representation: Option<String>,
    },
}

fn parse_representations(flag: &Option<String>) -> Result<Vec<Representation>, PipelineError> {
    match flag {
        None => Ok(Representation::ALL.to_vec()),
        Some(name) => Representation::from_str(name)
            .map(|r| vec![r])
            .ok_or_else(|| {
                ConfigError::invalid("representation", format!("unknown representation {name}"))
                    .into()
            }),
    }
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Generate { config, out, seed } => {
            let mut config = load_config_file(config.as_deref())?;
            config.seed = resolve_seed(seed, config.seed);
            let dataset = run_generate(&config, &out)?;
            let counts = &dataset.manifest.counts;
            println!(
                "generated {} processes / {} iterations, {} rules, {} graphs into {}",
                counts.processes,
                counts.process_iterations,
                counts.rules,
                counts.graphs.len(),
                out.display()
            );
        }
        Command::Stats { dataset_dir } => {
            let report = run_stats(&dataset_dir)?;
            for (representation, entry) in &report {
                println!(
                    "{representation}: {} edges, {} vertices, {} relations, {} biased triples",
                    entry.stats.edge_count,
                    entry.stats.vertex_count,
                    entry.stats.relation_count,
                    entry.bias.flagged_total
                );
            }
            println!("written to {}", dataset_dir.join("stats.json").display());
        }
        Command::Split {
            dataset_dir,
            kind,
            fraction,
            seed,
            out,
            representation,
        } => {
            let kind = SplitKind::from_str(&kind).ok_or_else(|| {
                PipelineError::from(ConfigError::invalid(
                    "kind",
                    format!("unknown split kind {kind}, expected lp or downstream"),
                ))
            })?;
            let config = load_manifest_config(&dataset_dir)?;
            let seed = resolve_seed(seed, config.seed);
            let representations = parse_representations(&representation)?;
            let dir = run_split(
                &dataset_dir,
                kind,
                fraction,
                seed,
                out.as_deref(),
                &representations,
            )?;
            println!("split written to {}", dir.display());
        }
        Command::EmbedEval {
            dataset_dir,
            scorer,
            runs,
            seed,
            representation,
        } => {
            let scorers: Vec<Scorer> = match &scorer {
                None => Scorer::ALL.to_vec(),
                Some(name) => vec![Scorer::from_str(name).ok_or_else(|| {
                    PipelineError::from(ConfigError::invalid(
                        "scorer",
                        format!("unknown scorer {name}, expected translation or bilinear"),
                    ))
                })?],
            };
            let config = load_manifest_config(&dataset_dir)?;
            let seed = resolve_seed(seed, config.seed);
            let representations = parse_representations(&representation)?;
            let report = run_embed_eval(&dataset_dir, &scorers, runs, seed, &representations)?;
            for (representation, by_scorer) in &report.link_prediction {
                for (scorer, by_side) in by_scorer {
                    for (side, block) in by_side {
                        println!(
                            "{representation} {scorer} {side}: AMRI {:.3}±{:.3}, hits@10 {:.3}±{:.3}",
                            block.amri_mean, block.amri_std, block.hits10_mean, block.hits10_std
                        );
                    }
                }
            }
            println!("written to {}", dataset_dir.join("eval.json").display());
        }
    }
    Ok(())
}

fn exit_code(error: &PipelineError) -> i32 {
    match error {
        PipelineError::Config(_) => 1,
        PipelineError::Generate(GenerateError::Config(_)) => 1,
        PipelineError::Generate(GenerateError::Space(SpaceError::Config(_))) => 1,
        PipelineError::Split(_) => 3,
        PipelineError::Eval(EvalError::TrainingDiverged(_)) => 4,
        _ => 2,
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(error) = run(cli) {
        eprintln!("error: {error}");
        std::process::exit(exit_code(&error));
    }
}
