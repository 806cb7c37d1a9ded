//! Generate the benchmark dataset and write every artifact to disk.
//!
//! ```sh
//! cargo run --example generate_dataset -- [output_dir]
//! ```

use pdpk::config::GeneratorConfig;
use pdpk::dataset::{generate_dataset, write_dataset};
use pdpk::process::Behaviour;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "pdpk_dataset".to_string());

    let config = GeneratorConfig::default();
    let dataset = generate_dataset(&config)?;

    let counts = &dataset.manifest.counts;
    println!("seed                 {}", config.seed);
    println!("dependencies         {} ({} known)", counts.dependencies, counts.known_dependencies);
    println!("rules                {}", counts.rules);
    println!(
        "processes            {} ({} exploitative, {} explorative, {} converged)",
        counts.processes,
        counts.exploitative_processes,
        counts.explorative_processes,
        counts.converged_processes
    );
    println!("process iterations   {}", counts.process_iterations);

    let mean_len = |behaviour: Behaviour| {
        let lens: Vec<usize> = dataset
            .processes
            .iter()
            .filter(|p| p.behaviour == behaviour)
            .map(|p| p.iterations.len())
            .collect();
        if lens.is_empty() {
            0.0
        } else {
            lens.iter().sum::<usize>() as f64 / lens.len() as f64
        }
    };
    println!("mean episode length  exploitative {:.2}, explorative {:.2}",
        mean_len(Behaviour::Exploitative),
        mean_len(Behaviour::Explorative)
    );

    for (repr, kg) in &dataset.kgs {
        println!(
            "kg {:<10} {:>4} edges, {:>4} vertices, {} relations",
            repr.to_string(),
            kg.edge_count(),
            kg.vertex_count(),
            kg.relation_count()
        );
    }

    write_dataset(&dataset, std::path::Path::new(&out))?;
    println!("written to {out}/");
    Ok(())
}
