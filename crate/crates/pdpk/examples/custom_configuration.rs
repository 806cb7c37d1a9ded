//! Drive the generator from a JSON configuration: a smaller space,
//! per-quality domains, observation noise and data-driven condition
//! binning.
//!
//! ```sh
//! cargo run --example custom_configuration
//! ```

use pdpk::config::load_config;
use pdpk::dataset::generate_dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = load_config(
        r#"{
            "seed": 7,
            "p_count": 12,
            "q_count": 5,
            "pq_causal_share": 0.35,
            "pq_known_share": 0.8,
            "fanout_min": 1,
            "fanout_max": 3,
            "quality_domains": [
                {"min": 0.0, "max": 10.0},
                {"min": 0.0, "max": 10.0},
                {"min": 2.0, "max": 8.0},
                {"min": 0.0, "max": 20.0},
                {"min": 0.0, "max": 10.0}
            ],
            "noise_sigma_rel": 0.02,
            "total_iterations": 120,
            "condition_strategy": "freedman_diaconis"
        }"#,
    )?;

    let dataset = generate_dataset(&config)?;
    let counts = &dataset.manifest.counts;
    println!(
        "{} dependencies ({} known) over {}×{} space",
        counts.dependencies, counts.known_dependencies, config.p_count, config.q_count
    );
    println!(
        "{} processes, {} iterations, {} rules",
        counts.processes, counts.process_iterations, counts.rules
    );
    if !dataset.manifest.estimator_fallbacks.is_empty() {
        println!(
            "condition estimator fell back to one bin for qualities {:?}",
            dataset.manifest.estimator_fallbacks
        );
    }

    // Freedman-Diaconis binning usually yields several condition ranges per
    // quality; show the rules extracted for the first known dependency.
    if let Some(first) = dataset.rules.first() {
        let (q, p) = (first.quality, first.parameter);
        println!("rules for quality {q} and parameter {p}:");
        for rule in dataset.rules.iter().filter(|r| r.quality == q && r.parameter == p) {
            println!(
                "  if q_{} in [{:.2}, {:.2}] adjust p_{} by {:+.4}",
                rule.quality,
                rule.condition_range.min,
                rule.condition_range.max,
                rule.parameter,
                rule.quantified_adjustment
            );
        }
    }
    Ok(())
}
