//! Synthetic manufacturing datasets with matching procedural knowledge.
//!
//! The crate simulates parametrisation processes over a causal
//! parameter-quality space, extracts the quantified rules the simulated
//! expert relies on, renders them as RDF knowledge graphs in four
//! representation patterns, and ships the evaluation toolkit used on top:
//! graph statistics, sample-selection bias checks, link-prediction metrics
//! over desk-scale embeddings, and sub-graph aggregation matching.
//!
//! Start with [`config::GeneratorConfig`] and [`dataset::generate_dataset`];
//! the `examples/` directory walks through every major capability.

pub mod bias;
pub mod config;
pub mod dataset;
pub mod embed;
pub mod eval;
pub mod kg;
pub mod matches;
pub mod pipeline;
pub mod process;
pub mod random;
pub mod rules;
pub mod space;
pub mod split;
pub mod stats;
pub mod turtle;
