//! Procedural-knowledge retention: compare the k nearest qualities in graph
//! space (shared adjusted parameters) and in embedding space (distances
//! between sum-aggregated sub-graph vectors).
//!
//! ```sh
//! cargo run --release --example subgraph_matches
//! ```

use pdpk::config::GeneratorConfig;
use pdpk::dataset::generate_dataset;
use pdpk::embed::{train, EmbeddingModel, Scorer, TrainParams};
use pdpk::kg::Representation;
use pdpk::matches::{aggregate_subgraph, matches_at_k, MatchesConfig};
use pdpk::random::substream;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dataset = generate_dataset(&GeneratorConfig::default())?;
    let representation = Representation::ChEEta;
    let kg = &dataset.kgs[&representation];
    let scorer = Scorer::Translation;
    let params = TrainParams::benchmark(scorer);

    let (model, _) = train(kg, scorer, &params, &mut substream(0, "embeddings"))?;

    // One aggregated sub-graph vector per quality.
    let cfg = MatchesConfig {
        k: 3,
        include_head: true,
        propagation_steps: representation.default_propagation_steps(),
    };
    let first_quality = kg.quality_entities()[0];
    let aggregate = aggregate_subgraph(&model, kg, first_quality.1, &cfg)?;
    println!(
        "quality q_{} aggregates its reachable sub-graph into a {}-dimensional vector",
        first_quality.0,
        aggregate.len()
    );

    for include_head in [true, false] {
        let cfg = MatchesConfig {
            include_head,
            ..cfg
        };
        let trained = matches_at_k(&model, kg, &dataset.rules, &cfg)?;
        let baseline = EmbeddingModel::random(kg, scorer, params.dim, &mut substream(0, "baseline"));
        let random = matches_at_k(&baseline, kg, &dataset.rules, &cfg)?;
        println!(
            "matches@3 ({}): trained {:.3} vs random {:.3} ({:+.3})",
            if include_head { "h" } else { "h̄" },
            trained,
            random,
            trained - random
        );
    }
    Ok(())
}
