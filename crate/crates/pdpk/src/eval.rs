//! Link-prediction evaluation: candidate ranking and the hits@k and
//! adjusted arithmetic mean rank index metrics.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::embed::EmbeddingModel;
use crate::kg::{Triple, TripleTail};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("training diverged: loss became non-finite in epoch {0}")]
    TrainingDiverged(usize),
    #[error("unknown id: {0}")]
    UnknownId(String),
    #[error("metric needs at least one rank")]
    EmptyInput,
    #[error("adjusted mean rank index needs candidate sets of size at least 2")]
    DegenerateCandidateSet,
    #[error("matches@{k} needs at least {} qualities, got {got}", k + 1)]
    InsufficientQualities { got: usize, k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Head,
    Tail,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Head, Side::Tail];

    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Head => "head",
            Side::Tail => "tail",
        }
    }
}

/// How rank ties are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Mean rank over the tied block.
    #[default]
    Mean,
    /// Best rank in the tied block.
    Optimistic,
    /// Worst rank in the tied block.
    Pessimistic,
}

/// The rank of one test triple's true entity among the surviving
/// candidates. Mean tie-breaking can produce half-integer ranks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankResult {
    pub rank: f64,
    pub candidates: usize,
}

fn as_ids(triple: &Triple) -> Option<(usize, usize, usize)> {
    match triple.tail {
        TripleTail::Entity(e) => Some((triple.head.0, triple.relation.0, e.0)),
        TripleTail::Literal(_) => None,
    }
}

/// Rank the true entity of each test triple against all candidate
/// substitutions on one side.
///
/// In the filtered setting (the default reported by the toolkit),
/// candidates forming a triple known from train or test are excluded, so a
/// true triple never outranks the one under evaluation. Literal-tailed
/// test triples cannot be ranked by entity scorers and are skipped.
pub fn rank(
    model: &EmbeddingModel,
    test: &[Triple],
    train: &[Triple],
    side: Side,
    filtered: bool,
    tie: TieBreak,
) -> Result<Vec<RankResult>, EvalError> {
    let known: BTreeSet<(usize, usize, usize)> = train
        .iter()
        .chain(test)
        .filter_map(as_ids)
        .collect();

    let mut results = Vec::new();
    for triple in test {
        let Some((h, r, t)) = as_ids(triple) else {
            continue;
        };
        let (true_entity, fixed_entity) = match side {
            Side::Tail => (t, h),
            Side::Head => (h, t),
        };
        let true_score = model.score(h, r, t)?;

        let mut better = 0usize;
        let mut tied = 0usize;
        let mut survivors = 1usize;
        for candidate in 0..model.entity_count() {
            if candidate == true_entity {
                continue;
            }
            let candidate_triple = match side {
                Side::Tail => (fixed_entity, r, candidate),
                Side::Head => (candidate, r, fixed_entity),
            };
            if filtered && known.contains(&candidate_triple) {
                continue;
            }
            let score = model.score(candidate_triple.0, r, candidate_triple.2)?;
            survivors += 1;
            if score > true_score {
                better += 1;
            } else if score == true_score {
                tied += 1;
            }
        }
        let rank = match tie {
            TieBreak::Mean => 1.0 + better as f64 + tied as f64 / 2.0,
            TieBreak::Optimistic => 1.0 + better as f64,
            TieBreak::Pessimistic => 1.0 + better as f64 + tied as f64,
        };
        results.push(RankResult {
            rank,
            candidates: survivors,
        });
    }
    Ok(results)
}

/// Share of ranks at or below `k`.
pub fn hits_at_k(ranks: &[RankResult], k: usize) -> Result<f64, EvalError> {
    if ranks.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let hits = ranks.iter().filter(|r| r.rank <= k as f64).count();
    Ok(hits as f64 / ranks.len() as f64)
}

/// Adjusted arithmetic mean rank index,
/// `1 − 2·Σ(rᵢ − 1) / Σ(|Sᵢ| − 1)`, clamped to `[−1, 1]`.
///
/// 1 is optimal, 0 matches the expectation of random scoring, negative is
/// worse than random.
pub fn amri(ranks: &[RankResult]) -> Result<f64, EvalError> {
    if ranks.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    if ranks.iter().any(|r| r.candidates < 2) {
        return Err(EvalError::DegenerateCandidateSet);
    }
    let numerator: f64 = ranks.iter().map(|r| r.rank - 1.0).sum();
    let denominator: f64 = ranks.iter().map(|r| (r.candidates - 1) as f64).sum();
    Ok((1.0 - 2.0 * numerator / denominator).clamp(-1.0, 1.0))
}
