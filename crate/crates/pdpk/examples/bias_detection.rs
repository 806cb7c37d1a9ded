//! Sample-selection bias checks: the benchmark graphs come out clean, and a
//! deliberately skewed toy graph shows what detection and debiasing do.
//!
//! ```sh
//! cargo run --example bias_detection
//! ```

use pdpk::bias::{debias, detect_biases};
use pdpk::config::GeneratorConfig;
use pdpk::dataset::generate_dataset;
use pdpk::kg::{EntityKind, KnowledgeGraph, RelationRole, Representation, TripleTail};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dataset = generate_dataset(&GeneratorConfig::default())?;
    for (representation, kg) in &dataset.kgs {
        let report = detect_biases(kg);
        println!(
            "{representation}: {} triples, {} flagged (thresholds {:?})",
            kg.triple_count(),
            report.flagged_count(),
            report.thresholds
        );
    }

    // A relation where one parameter serves as the default answer.
    let mut toy = KnowledgeGraph::new(Representation::ChE);
    let adjusts = toy.add_relation(
        format!("{}adjusts", pdpk::kg::VOCAB_NS),
        RelationRole::Structural,
    );
    let favourite = toy.add_entity(format!("{}p_0", pdpk::kg::ENTITY_NS), EntityKind::Parameter(0));
    for i in 0..10 {
        let q = toy.add_entity(format!("{}q_{i}", pdpk::kg::ENTITY_NS), EntityKind::Quality(i));
        toy.insert(q, adjusts, TripleTail::Entity(favourite));
    }
    for i in 10..12 {
        let q = toy.add_entity(format!("{}q_{i}", pdpk::kg::ENTITY_NS), EntityKind::Quality(i));
        let p = toy.add_entity(format!("{}p_{i}", pdpk::kg::ENTITY_NS), EntityKind::Parameter(i));
        toy.insert(q, adjusts, TripleTail::Entity(p));
    }

    let report = detect_biases(&toy);
    println!(
        "\ntoy graph: {} of {} triples share one tail, {} flagged as type-1",
        10,
        toy.triple_count(),
        report.flagged_b1.len()
    );
    let clean = debias(&toy);
    println!(
        "debias keeps {} triples; residual flags: {}",
        clean.triple_count(),
        detect_biases(&clean).flagged_count()
    );
    Ok(())
}
