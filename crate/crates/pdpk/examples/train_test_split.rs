//! Prepare link-prediction and downstream train/test splits.
//!
//! The link-prediction split transfers triples under the evaluability
//! constraint (every test entity and relation stays visible in training);
//! the downstream split transfers whole process iterations.
//!
//! ```sh
//! cargo run --example train_test_split
//! ```

use std::collections::BTreeSet;

use pdpk::config::GeneratorConfig;
use pdpk::dataset::generate_dataset;
use pdpk::kg::TripleTail;
use pdpk::random::substream;
use pdpk::split::{split_downstream, split_link_prediction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = GeneratorConfig::default();
    let dataset = generate_dataset(&config)?;

    for (representation, kg) in &dataset.kgs {
        let mut rng = substream(config.seed, &format!("lp_split/{representation}"));
        let split = split_link_prediction(kg, config.lp_test_fraction, &mut rng)?;
        println!(
            "{representation}: {} train / {} test triples (requested {:.0}%, achieved {:.1}%)",
            split.train.len(),
            split.test.len(),
            100.0 * split.requested_fraction,
            100.0 * split.achieved_fraction
        );

        // Every test entity is covered by some train triple.
        let mut train_entities = BTreeSet::new();
        for t in &split.train {
            train_entities.insert(t.head);
            if let TripleTail::Entity(e) = t.tail {
                train_entities.insert(e);
            }
        }
        let covered = split.test.iter().all(|t| {
            train_entities.contains(&t.head)
                && match t.tail {
                    TripleTail::Entity(e) => train_entities.contains(&e),
                    TripleTail::Literal(_) => true,
                }
        });
        assert!(covered);
    }

    let downstream = split_downstream(
        &dataset,
        config.downstream_test_fraction,
        &mut substream(config.seed, "downstream_split"),
    );
    println!(
        "downstream: {} train / {} test iterations, pruning no-op: {}",
        downstream.train.len(),
        downstream.test.len(),
        downstream.pruning_no_op
    );
    Ok(())
}
