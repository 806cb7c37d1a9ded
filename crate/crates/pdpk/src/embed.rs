//! Desk-scale knowledge-graph embeddings: a translation scorer (relation
//! vectors as additive offsets, L2 distance) and a bilinear scorer
//! (element-wise triple product), trained with one uniform negative sample
//! per positive and adaptive-moment updates with decoupled weight decay.

use rand::Rng;

use crate::eval::EvalError;
use crate::kg::{KnowledgeGraph, TripleTail};
use crate::random::SeededRng;

/// Margin of the translation scorer's ranking loss.
const MARGIN: f64 = 1.0;
const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scorer {
    Translation,
    Bilinear,
}

impl Scorer {
    pub const ALL: [Scorer; 2] = [Scorer::Translation, Scorer::Bilinear];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scorer::Translation => "translation",
            Scorer::Bilinear => "bilinear",
        }
    }

    pub fn from_str(s: &str) -> Option<Scorer> {
        Scorer::ALL.into_iter().find(|x| x.as_str() == s)
    }
}

impl std::fmt::Display for Scorer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TrainParams {
    pub dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    /// Project entity vectors onto the unit sphere after each update, as
    /// the cited translation and bilinear methods prescribe.
    pub normalize_entities: bool,
    pub batch_mode: BatchMode,
}

impl TrainParams {
    /// The benchmark regime: 46 dimensions, learning rate 4e-4, weight
    /// decay 1e-5, 400 epochs for the translation scorer and 800 for the
    /// bilinear one.
    ///
    /// The translation scorer keeps the hard unit-norm entity constraint of
    /// its method and steps once per positive; the bilinear scorer relies
    /// on weight decay instead of the hard constraint and accumulates each
    /// epoch into one step.
    pub fn benchmark(scorer: Scorer) -> TrainParams {
        match scorer {
            Scorer::Translation => TrainParams {
                dim: 46,
                epochs: 400,
                learning_rate: 4e-4,
                weight_decay: 1e-5,
                normalize_entities: true,
                batch_mode: BatchMode::PerPositive,
            },
            Scorer::Bilinear => TrainParams {
                dim: 46,
                epochs: 800,
                learning_rate: 4e-4,
                weight_decay: 1e-5,
                normalize_entities: false,
                batch_mode: BatchMode::FullEpoch,
            },
        }
    }
}

/// Per-entity and per-relation vectors of fixed dimension, tagged with the
/// scoring function they were trained for. Indices follow the knowledge
/// graph's registries.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub scorer: Scorer,
    pub dim: usize,
    pub entity_vectors: Vec<Vec<f64>>,
    pub relation_vectors: Vec<Vec<f64>>,
}

impl EmbeddingModel {
    /// Uniform vectors in `[−6/√dim, +6/√dim]` for every registered entity
    /// and relation; the initial state of training and the random baseline
    /// for the aggregation metric.
    pub fn random(kg: &KnowledgeGraph, scorer: Scorer, dim: usize, rng: &mut SeededRng) -> Self {
        let bound = 6.0 / (dim as f64).sqrt();
        let mut vector = |_: usize| -> Vec<f64> {
            (0..dim).map(|_| rng.random_range(-bound..=bound)).collect()
        };
        let entity_vectors: Vec<Vec<f64>> = (0..kg.entities().len()).map(&mut vector).collect();
        // Bilinear relations start at the identity scaling so early training
        // scores read as plain similarity; translation offsets start random.
        let relation_vectors: Vec<Vec<f64>> = match scorer {
            Scorer::Translation => (0..kg.relations().len()).map(&mut vector).collect(),
            Scorer::Bilinear => (0..kg.relations().len()).map(|_| vec![1.0; dim]).collect(),
        };
        EmbeddingModel {
            scorer,
            dim,
            entity_vectors,
            relation_vectors,
        }
    }

    pub fn entity_count(&self) -> usize {
        self.entity_vectors.len()
    }

    /// Plausibility of a triple; higher is more plausible.
    pub fn score(&self, head: usize, relation: usize, tail: usize) -> Result<f64, EvalError> {
        let h = self
            .entity_vectors
            .get(head)
            .ok_or_else(|| EvalError::UnknownId(format!("entity {head}")))?;
        let r = self
            .relation_vectors
            .get(relation)
            .ok_or_else(|| EvalError::UnknownId(format!("relation {relation}")))?;
        let t = self
            .entity_vectors
            .get(tail)
            .ok_or_else(|| EvalError::UnknownId(format!("entity {tail}")))?;
        Ok(match self.scorer {
            Scorer::Translation => {
                let d: f64 = h
                    .iter()
                    .zip(r)
                    .zip(t)
                    .map(|((hv, rv), tv)| (hv + rv - tv).powi(2))
                    .sum();
                -d.sqrt()
            }
            Scorer::Bilinear => h.iter().zip(r).zip(t).map(|((hv, rv), tv)| hv * rv * tv).sum(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    /// Mean loss per epoch.
    pub epoch_losses: Vec<f64>,
    /// Literal-tailed triples that were excluded from training.
    pub dropped_literal_triples: usize,
    /// Whether the mean loss over the final tenth of the epochs kept from
    /// rising, the convergence check.
    pub final_window_non_increasing: bool,
}

struct AdamW {
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    step: usize,
}

impl AdamW {
    fn new(rows: usize, dim: usize) -> Self {
        AdamW {
            m: vec![vec![0.0; dim]; rows],
            v: vec![vec![0.0; dim]; rows],
            step: 0,
        }
    }

    fn apply(&mut self, row: usize, params: &mut [f64], grad: &[f64], lr: f64, wd: f64) {
        let bc1 = 1.0 - ADAM_BETA1.powi(self.step as i32);
        let bc2 = 1.0 - ADAM_BETA2.powi(self.step as i32);
        let (m, v) = (&mut self.m[row], &mut self.v[row]);
        for i in 0..params.len() {
            m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * grad[i];
            v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * grad[i] * grad[i];
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            params[i] -= lr * (m_hat / (v_hat.sqrt() + ADAM_EPS) + wd * params[i]);
        }
    }
}

fn project_to_unit_sphere(v: &mut [f64]) {
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Gradient buffers per embedding row, accumulated over a batch.
#[derive(Default)]
struct GradBatch {
    entity: std::collections::BTreeMap<usize, Vec<f64>>,
    relation: std::collections::BTreeMap<usize, Vec<f64>>,
    samples: usize,
}

impl GradBatch {
    fn add(&mut self, map: Which, row: usize, grad: &[f64]) {
        let buffer = match map {
            Which::Entity => self.entity.entry(row).or_insert_with(|| vec![0.0; grad.len()]),
            Which::Relation => self
                .relation
                .entry(row)
                .or_insert_with(|| vec![0.0; grad.len()]),
        };
        for (b, g) in buffer.iter_mut().zip(grad) {
            *b += g;
        }
    }
}

#[derive(Clone, Copy)]
enum Which {
    Entity,
    Relation,
}

/// How many positives share one optimizer step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BatchMode {
    /// One adaptive step per positive sample.
    PerPositive,
    /// Accumulate the whole epoch into a single step, the regime of batched
    /// trainers whose batch size exceeds these desk-scale graphs.
    #[default]
    FullEpoch,
}

/// Train embeddings on the entity triples of a knowledge graph.
///
/// One uniform negative per positive and epoch, corrupting head or tail
/// with equal probability. The translation scorer minimises the margin
/// ranking loss over L2 distances; the bilinear scorer the softplus loss.
pub fn train(
    kg: &KnowledgeGraph,
    scorer: Scorer,
    params: &TrainParams,
    rng: &mut SeededRng,
) -> Result<(EmbeddingModel, TrainReport), EvalError> {
    let triples: Vec<(usize, usize, usize)> = kg
        .entity_triples()
        .map(|t| match t.tail {
            TripleTail::Entity(e) => (t.head.0, t.relation.0, e.0),
            TripleTail::Literal(_) => unreachable!("entity_triples yields entity tails"),
        })
        .collect();
    let dropped_literal_triples = kg.triple_count() - triples.len();

    let mut model = EmbeddingModel::random(kg, scorer, params.dim, rng);
    let n_entities = model.entity_count();
    let mut entity_opt = AdamW::new(n_entities, params.dim);
    let mut relation_opt = AdamW::new(model.relation_vectors.len(), params.dim);
    let mut epoch_losses = Vec::with_capacity(params.epochs);
    let mut order: Vec<usize> = (0..triples.len()).collect();

    let flush = |batch: &mut GradBatch, model: &mut EmbeddingModel,
                 entity_opt: &mut AdamW, relation_opt: &mut AdamW| {
        let scale = 1.0 / batch.samples.max(1) as f64;
        entity_opt.step += 1;
        relation_opt.step += 1;
        for (row, grad) in &mut batch.entity {
            for g in grad.iter_mut() {
                *g *= scale;
            }
            entity_opt.apply(
                *row,
                &mut model.entity_vectors[*row],
                grad,
                params.learning_rate,
                params.weight_decay,
            );
            if params.normalize_entities {
                project_to_unit_sphere(&mut model.entity_vectors[*row]);
            }
        }
        for (row, grad) in &mut batch.relation {
            for g in grad.iter_mut() {
                *g *= scale;
            }
            relation_opt.apply(
                *row,
                &mut model.relation_vectors[*row],
                grad,
                params.learning_rate,
                params.weight_decay,
            );
        }
        *batch = GradBatch::default();
    };

    for epoch in 0..params.epochs {
        for i in 0..order.len() {
            let j = rng.random_range(i..order.len());
            order.swap(i, j);
        }
        let mut epoch_loss = 0.0;
        let mut batch = GradBatch::default();
        for &idx in &order {
            let (h, r, t) = triples[idx];
            let corrupt_head = rng.random_bool(0.5);
            let replaced = if corrupt_head { h } else { t };
            // Uniform over the other entities; replacing an entity with
            // itself would be a positive, not a corruption.
            let candidate = if n_entities > 1 {
                let draw = rng.random_range(0..n_entities - 1);
                if draw >= replaced {
                    draw + 1
                } else {
                    draw
                }
            } else {
                replaced
            };
            let (nh, nt) = if corrupt_head { (candidate, t) } else { (h, candidate) };

            let dim = params.dim;
            let loss = match scorer {
                Scorer::Translation => {
                    let diff = |a: usize, b: usize| -> Vec<f64> {
                        (0..dim)
                            .map(|i| {
                                model.entity_vectors[a][i] + model.relation_vectors[r][i]
                                    - model.entity_vectors[b][i]
                            })
                            .collect()
                    };
                    let pos = diff(h, t);
                    let neg = diff(nh, nt);
                    let d_pos = pos.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let d_neg = neg.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let loss = (MARGIN + d_pos - d_neg).max(0.0);
                    if loss > 0.0 {
                        let u_pos: Vec<f64> =
                            pos.iter().map(|x| x / d_pos.max(1e-12)).collect();
                        let u_neg: Vec<f64> =
                            neg.iter().map(|x| x / d_neg.max(1e-12)).collect();
                        let neg_u_pos: Vec<f64> = u_pos.iter().map(|x| -x).collect();
                        let neg_u_neg: Vec<f64> = u_neg.iter().map(|x| -x).collect();
                        let r_grad: Vec<f64> =
                            u_pos.iter().zip(&u_neg).map(|(p, n)| p - n).collect();
                        batch.add(Which::Entity, h, &u_pos);
                        batch.add(Which::Entity, t, &neg_u_pos);
                        batch.add(Which::Entity, nh, &neg_u_neg);
                        batch.add(Which::Entity, nt, &u_neg);
                        batch.add(Which::Relation, r, &r_grad);
                    } else {
                        // Keep the rows on the decay schedule even when the
                        // margin is already satisfied.
                        let zeros = vec![0.0; dim];
                        for row in [h, t, nh, nt] {
                            batch.add(Which::Entity, row, &zeros);
                        }
                        batch.add(Which::Relation, r, &zeros);
                    }
                    loss
                }
                Scorer::Bilinear => {
                    let score = |a: usize, b: usize| -> f64 {
                        (0..dim)
                            .map(|i| {
                                model.entity_vectors[a][i]
                                    * model.relation_vectors[r][i]
                                    * model.entity_vectors[b][i]
                            })
                            .sum()
                    };
                    let s_pos = score(h, t);
                    let s_neg = score(nh, nt);
                    let loss = softplus(-s_pos) + softplus(s_neg);
                    let g_pos = -sigmoid(-s_pos);
                    let g_neg = sigmoid(s_neg);
                    let mut part = |a: usize, b: usize, g: f64| {
                        let mut ga = vec![0.0; dim];
                        let mut gb = vec![0.0; dim];
                        let mut gr = vec![0.0; dim];
                        for i in 0..dim {
                            let (av, rv, bv) = (
                                model.entity_vectors[a][i],
                                model.relation_vectors[r][i],
                                model.entity_vectors[b][i],
                            );
                            ga[i] = g * rv * bv;
                            gb[i] = g * av * rv;
                            gr[i] = g * av * bv;
                        }
                        batch.add(Which::Entity, a, &ga);
                        batch.add(Which::Entity, b, &gb);
                        batch.add(Which::Relation, r, &gr);
                    };
                    part(h, t, g_pos);
                    part(nh, nt, g_neg);
                    loss
                }
            };
            batch.samples += 1;
            epoch_loss += loss;
            if params.batch_mode == BatchMode::PerPositive {
                flush(&mut batch, &mut model, &mut entity_opt, &mut relation_opt);
            }
        }
        if params.batch_mode == BatchMode::FullEpoch {
            flush(&mut batch, &mut model, &mut entity_opt, &mut relation_opt);
        }
        let mean_loss = epoch_loss / triples.len().max(1) as f64;
        if !mean_loss.is_finite() {
            return Err(EvalError::TrainingDiverged(epoch));
        }
        epoch_losses.push(mean_loss);
    }

    let window = (params.epochs / 10).max(2).min(epoch_losses.len());
    let tail = &epoch_losses[epoch_losses.len() - window..];
    let half = window / 2;
    let first = tail[..half].iter().sum::<f64>() / half.max(1) as f64;
    let second = tail[half..].iter().sum::<f64>() / (window - half).max(1) as f64;
    let final_window_non_increasing = second <= first + 1e-6 * (1.0 + first.abs());

    Ok((
        model,
        TrainReport {
            epoch_losses,
            dropped_literal_triples,
            final_window_non_increasing,
        },
    ))
}
