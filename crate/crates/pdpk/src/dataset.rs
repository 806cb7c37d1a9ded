//! Dataset assembly and serialization: CSV process data, Turtle knowledge
//! graphs, a JSON manifest carrying the full ground truth, and a small
//! Turtle metadata document.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, GeneratorConfig};
use crate::kg::{build_kg, KgError, KnowledgeGraph, Representation};
use crate::process::{generate_processes, ParametrisationProcess, ProcessError};
use crate::random::substream;
use crate::rules::{extract_rules, ConditionStrategy, Rule, RuleError};
use crate::space::{build_pq_space, FunctionKind, PQSpace, SpaceError, ValueRange};
use crate::turtle::{write_turtle, XSD_NS};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Kg(#[from] KgError),
}

/// A fully generated dataset: the ground-truth space, the simulated
/// processes, the extracted rules, all four knowledge graphs and the
/// manifest describing them.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub config: GeneratorConfig,
    pub space: PQSpace,
    pub processes: Vec<ParametrisationProcess>,
    pub rules: Vec<Rule>,
    pub kgs: BTreeMap<Representation, KnowledgeGraph>,
    pub manifest: Manifest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisRecord {
    pub id: usize,
    pub name: String,
    pub domain: ValueRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependencyRecord {
    pub parameter: usize,
    pub quality: usize,
    pub kind: FunctionKind,
    pub coefficients: Vec<f64>,
    pub known: bool,
}

/// Serializable image of a [`PQSpace`]; replaces opaque binary artifacts as
/// the dataset's ground-truth export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceRecord {
    pub parameters: Vec<AxisRecord>,
    pub qualities: Vec<AxisRecord>,
    pub dependencies: Vec<DependencyRecord>,
}

impl SpaceRecord {
    pub fn from_space(space: &PQSpace) -> Self {
        SpaceRecord {
            parameters: space
                .parameters()
                .iter()
                .map(|p| AxisRecord {
                    id: p.id,
                    name: p.name.clone(),
                    domain: p.domain,
                })
                .collect(),
            qualities: space
                .qualities()
                .iter()
                .map(|q| AxisRecord {
                    id: q.id,
                    name: q.name.clone(),
                    domain: q.domain,
                })
                .collect(),
            dependencies: space
                .dependencies()
                .iter()
                .map(|(&(k, j), f)| DependencyRecord {
                    parameter: k,
                    quality: j,
                    kind: f.kind,
                    coefficients: f.coefficients.clone(),
                    known: space.is_known(k, j),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphCounts {
    pub edges: usize,
    pub vertices: usize,
    pub relations: usize,
    pub triples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestCounts {
    pub dependencies: usize,
    pub known_dependencies: usize,
    pub processes: usize,
    pub process_iterations: usize,
    pub exploitative_processes: usize,
    pub explorative_processes: usize,
    pub converged_processes: usize,
    pub rules: usize,
    pub graphs: BTreeMap<String, GraphCounts>,
}

/// Provenance record written next to the data files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: GeneratorConfig,
    pub counts: ManifestCounts,
    /// Qualities whose condition estimator fell back to a single bin.
    pub estimator_fallbacks: Vec<usize>,
    /// The quantified rules, including the values carried only as entity
    /// annotations in the entity-based graph representations.
    pub rules: Vec<Rule>,
    pub space: SpaceRecord,
}

/// Generate the full dataset from a validated configuration. Byte-identical
/// output is guaranteed for identical configurations.
pub fn generate_dataset(config: &GeneratorConfig) -> Result<Dataset, GenerateError> {
    config.validate()?;
    let space = build_pq_space(config, &mut substream(config.seed, "space"))?;
    let processes = generate_processes(&space, config, &mut substream(config.seed, "processes"))?;

    let observations: Vec<Vec<f64>> =
        if config.condition_strategy == ConditionStrategy::FreedmanDiaconis {
            let mut per_quality = vec![Vec::new(); space.qualities().len()];
            for process in &processes {
                for iteration in &process.iterations {
                    for (j, &value) in iteration.qualities.iter().enumerate() {
                        per_quality[j].push(value);
                    }
                }
            }
            per_quality
        } else {
            Vec::new()
        };
    let extraction = extract_rules(&space, &config.condition_strategy, &observations)?;

    let mut kgs = BTreeMap::new();
    if !extraction.rules.is_empty() {
        for representation in Representation::ALL {
            kgs.insert(representation, build_kg(&extraction.rules, representation)?);
        }
    }

    let counts = ManifestCounts {
        dependencies: space.dependencies().len(),
        known_dependencies: space.known().len(),
        processes: processes.len(),
        process_iterations: processes.iter().map(|p| p.iterations.len()).sum(),
        exploitative_processes: processes
            .iter()
            .filter(|p| p.behaviour == crate::process::Behaviour::Exploitative)
            .count(),
        explorative_processes: processes
            .iter()
            .filter(|p| p.behaviour == crate::process::Behaviour::Explorative)
            .count(),
        converged_processes: processes.iter().filter(|p| p.converged).count(),
        rules: extraction.rules.len(),
        graphs: kgs
            .iter()
            .map(|(repr, kg)| {
                (
                    repr.as_str().to_string(),
                    GraphCounts {
                        edges: kg.edge_count(),
                        vertices: kg.vertex_count(),
                        relations: kg.relation_count(),
                        triples: kg.triple_count(),
                    },
                )
            })
            .collect(),
    };

    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        counts,
        estimator_fallbacks: extraction.estimator_fallbacks.clone(),
        rules: extraction.rules.clone(),
        space: SpaceRecord::from_space(&space),
    };

    Ok(Dataset {
        config: config.clone(),
        space,
        processes,
        rules: extraction.rules,
        kgs,
        manifest,
    })
}

/// Reals in CSV output: nine significant digits, scientific notation.
pub fn format_real(value: f64) -> String {
    format!("{value:.8e}")
}

/// Write the process data as CSV: one row per process iteration, ordered by
/// process id then iteration index.
pub fn write_process_csv(dataset: &Dataset, sink: &mut impl Write) -> std::io::Result<()> {
    write_process_csv_filtered(dataset, None, sink)
}

/// CSV writer restricted to the given (process id, iteration index) pairs;
/// `None` writes everything.
pub fn write_process_csv_filtered(
    dataset: &Dataset,
    keep: Option<&std::collections::BTreeSet<(usize, usize)>>,
    sink: &mut impl Write,
) -> std::io::Result<()> {
    let p_count = dataset.space.parameters().len();
    let q_count = dataset.space.qualities().len();
    let mut header = String::from("process_id,behaviour,iteration,score");
    for k in 0..p_count {
        header.push_str(&format!(",p_{k}"));
    }
    for j in 0..q_count {
        header.push_str(&format!(",q_{j}"));
    }
    header.push('\n');
    sink.write_all(header.as_bytes())?;

    for process in &dataset.processes {
        for iteration in &process.iterations {
            if let Some(keep) = keep {
                if !keep.contains(&(process.id, iteration.index)) {
                    continue;
                }
            }
            let mut row = format!(
                "{},{},{},{}",
                process.id,
                process.behaviour,
                iteration.index,
                format_real(iteration.score)
            );
            for value in &iteration.parametrisation {
                row.push_str(&format!(",{}", format_real(*value)));
            }
            for value in &iteration.qualities {
                row.push_str(&format!(",{}", format_real(*value)));
            }
            row.push('\n');
            sink.write_all(row.as_bytes())?;
        }
    }
    Ok(())
}

/// The dataset-level provenance triples (`metadata.ttl`).
pub fn metadata_string(dataset: &Dataset) -> String {
    let c = &dataset.manifest.counts;
    let subject = "<http://purl.org/pdpk/dataset>";
    let mut out = String::new();
    out.push_str(&format!("@prefix pdpk: <{}> .\n", crate::kg::VOCAB_NS));
    out.push_str(&format!("@prefix xsd: <{XSD_NS}> .\n\n"));
    let mut facts: Vec<(&str, String)> = vec![
        ("convergedProcessCount", c.converged_processes.to_string()),
        ("dependencyCount", c.dependencies.to_string()),
        ("iterationCount", c.process_iterations.to_string()),
        ("knownDependencyCount", c.known_dependencies.to_string()),
        ("parameterCount", dataset.config.p_count.to_string()),
        ("processCount", c.processes.to_string()),
        ("qualityCount", dataset.config.q_count.to_string()),
        ("ruleCount", c.rules.to_string()),
        ("seed", dataset.config.seed.to_string()),
    ];
    facts.sort();
    for (prop, value) in facts {
        out.push_str(&format!(
            "{subject} pdpk:{prop} \"{value}\"^^xsd:integer .\n"
        ));
    }
    out.push_str(&format!(
        "{subject} pdpk:version \"{}\" .\n",
        dataset.manifest.version
    ));
    out
}

/// Pretty-printed manifest JSON with a trailing newline.
pub fn manifest_string(dataset: &Dataset) -> String {
    let mut text = serde_json::to_string_pretty(&dataset.manifest).expect("manifest serializes");
    text.push('\n');
    text
}

pub fn kg_file_name(representation: Representation) -> String {
    format!("kg_{representation}.ttl")
}

/// Write every dataset artifact into `dir`: `process_data.csv`, one
/// `kg_<representation>.ttl` per graph, `manifest.json` and `metadata.ttl`.
pub fn write_dataset(dataset: &Dataset, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut csv = fs::File::create(dir.join("process_data.csv"))?;
    write_process_csv(dataset, &mut csv)?;
    for (representation, kg) in &dataset.kgs {
        let mut file = fs::File::create(dir.join(kg_file_name(*representation)))?;
        write_turtle(kg, &mut file)?;
    }
    fs::write(dir.join("manifest.json"), manifest_string(dataset))?;
    fs::write(dir.join("metadata.ttl"), metadata_string(dataset))?;
    Ok(())
}
