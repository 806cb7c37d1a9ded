//! Procedural-knowledge retention metric: for every quality, compare its k
//! nearest qualities in graph space (overlap of adjusted parameters, from
//! the rules) with its k nearest in embedding space (Euclidean distance
//! between sum-aggregated sub-graph vectors).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::embed::EmbeddingModel;
use crate::eval::EvalError;
use crate::kg::{EntityId, KnowledgeGraph, RelationId, TripleTail};
use crate::rules::Rule;

#[derive(Debug, Clone, Copy)]
pub struct MatchesConfig {
    pub k: usize,
    /// Include the quality node's own vector in its aggregate (`h`) or not
    /// (`h̄`).
    pub include_head: bool,
    /// Breadth-first hops from the quality node; representation specific
    /// (see [`crate::kg::Representation::default_propagation_steps`]).
    pub propagation_steps: usize,
}

fn adjacency(kg: &KnowledgeGraph) -> BTreeMap<EntityId, BTreeSet<EntityId>> {
    let mut adj: BTreeMap<EntityId, BTreeSet<EntityId>> = BTreeMap::new();
    for t in kg.entity_triples() {
        if let TripleTail::Entity(e) = t.tail {
            adj.entry(t.head).or_default().insert(e);
            adj.entry(e).or_default().insert(t.head);
        }
    }
    adj
}

/// Entities within `steps` undirected hops of `start`, including it.
fn reachable(kg: &KnowledgeGraph, start: EntityId, steps: usize) -> BTreeSet<EntityId> {
    let adj = adjacency(kg);
    let mut seen: BTreeSet<EntityId> = [start].into();
    let mut queue: VecDeque<(EntityId, usize)> = [(start, 0)].into();
    while let Some((v, d)) = queue.pop_front() {
        if d == steps {
            continue;
        }
        if let Some(neighbours) = adj.get(&v) {
            for &n in neighbours {
                if seen.insert(n) {
                    queue.push_back((n, d + 1));
                }
            }
        }
    }
    seen
}

/// Sum the vectors of all entities reachable from the quality node within
/// the configured hops. With `include_head` unset the quality's own vector
/// is left out of the sum.
///
/// Literal attachments in the reached sub-graph are folded in as one extra
/// summed coordinate per literal-bearing relation (ordered by relation
/// IRI), so literal-carrying representations stay comparable under
/// Euclidean distance.
pub fn aggregate_subgraph(
    model: &EmbeddingModel,
    kg: &KnowledgeGraph,
    quality: EntityId,
    cfg: &MatchesConfig,
) -> Result<Vec<f64>, EvalError> {
    if quality.0 >= kg.entities().len() {
        return Err(EvalError::UnknownId(format!("entity {}", quality.0)));
    }
    let reached = reachable(kg, quality, cfg.propagation_steps);

    let mut sum = vec![0.0; model.dim];
    for &entity in &reached {
        if !cfg.include_head && entity == quality {
            continue;
        }
        let vector = model
            .entity_vectors
            .get(entity.0)
            .ok_or_else(|| EvalError::UnknownId(format!("entity {}", entity.0)))?;
        for (acc, v) in sum.iter_mut().zip(vector) {
            *acc += v;
        }
    }

    let mut literal_relations: Vec<(String, RelationId)> = kg
        .relations()
        .iter()
        .enumerate()
        .filter(|(idx, _)| {
            kg.triples().any(|t| {
                t.relation.0 == *idx && matches!(t.tail, TripleTail::Literal(_))
            })
        })
        .map(|(idx, info)| (info.iri.clone(), RelationId(idx)))
        .collect();
    literal_relations.sort();
    for (_, relation) in literal_relations {
        let mut total = 0.0;
        for t in kg.triples() {
            if t.relation == relation && reached.contains(&t.head) {
                if let TripleTail::Literal(lit) = t.tail {
                    total += lit.value();
                }
            }
        }
        sum.push(total);
    }
    Ok(sum)
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Mean overlap between the k closest qualities in graph space and in
/// embedding space, over all qualities present in the graph. Evaluated
/// in-sample on the graph the model was trained on.
pub fn matches_at_k(
    model: &EmbeddingModel,
    kg: &KnowledgeGraph,
    rules: &[Rule],
    cfg: &MatchesConfig,
) -> Result<f64, EvalError> {
    let qualities = kg.quality_entities();
    if qualities.len() < cfg.k + 1 {
        return Err(EvalError::InsufficientQualities {
            got: qualities.len(),
            k: cfg.k,
        });
    }

    let mut params_of: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for rule in rules {
        params_of.entry(rule.quality).or_default().insert(rule.parameter);
    }
    let empty = BTreeSet::new();

    let aggregates: BTreeMap<usize, Vec<f64>> = qualities
        .iter()
        .map(|&(j, id)| Ok((j, aggregate_subgraph(model, kg, id, cfg)?)))
        .collect::<Result<_, EvalError>>()?;

    let mut total = 0.0;
    for &(j, _) in &qualities {
        let own_params = params_of.get(&j).unwrap_or(&empty);

        // Graph space: overlap in adjusted parameters, descending; ties by
        // ascending quality id.
        let mut graph_ranked: Vec<(usize, usize)> = qualities
            .iter()
            .filter(|&&(other, _)| other != j)
            .map(|&(other, _)| {
                let overlap = params_of
                    .get(&other)
                    .map(|p| p.intersection(own_params).count())
                    .unwrap_or(0);
                (other, overlap)
            })
            .collect();
        graph_ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let graph_top: BTreeSet<usize> =
            graph_ranked.iter().take(cfg.k).map(|(q, _)| *q).collect();

        // Embedding space: Euclidean distance between aggregates,
        // ascending; ties by ascending quality id.
        let own_vector = &aggregates[&j];
        let mut embed_ranked: Vec<(usize, f64)> = qualities
            .iter()
            .filter(|&&(other, _)| other != j)
            .map(|&(other, _)| (other, euclidean(own_vector, &aggregates[&other])))
            .collect();
        embed_ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let embed_top: BTreeSet<usize> =
            embed_ranked.iter().take(cfg.k).map(|(q, _)| *q).collect();

        total += graph_top.intersection(&embed_top).count() as f64 / cfg.k as f64;
    }
    Ok(total / qualities.len() as f64)
}
