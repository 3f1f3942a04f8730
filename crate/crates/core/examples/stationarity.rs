//! How often MD3 raises a suspicion when nothing changes: twenty seeds of a
//! stationary stream twenty chunks long.
//!
//! ```text
//! cargo run --release --example stationarity -- [graded|scenario] [chunk]
//! ```

use driftbench::harness::{run_stream, DetectorKind, RunConfig};
use driftbench::synth::{generate_blobs, generate_scenario, graded_relevance_spec, ScenarioId};

fn main() -> driftbench::Result<()> {
    let mut args = std::env::args().skip(1);
    // "graded" is the 16-feature benchmark source; anything else a scenario id.
    let source = args.next().unwrap_or_else(|| "graded".into());
    let scenario: Option<ScenarioId> = if source == "graded" { None } else { Some(source.parse()?) };
    let chunk: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    for detector in [DetectorKind::Md3Svm, DetectorKind::Md3Rs] {
        let mut quiet = 0;
        for seed in 1..=20u64 {
            let data = match scenario {
                Some(id) => generate_scenario(id, 10 * chunk, seed)?,
                None => generate_blobs(&graded_relevance_spec(10 * chunk), seed)?,
            };
            let report = run_stream(&data, &RunConfig::new(detector, chunk, seed))?;
            if report.suspected + report.unresolved == 0 {
                quiet += 1;
            } else {
                let at: Vec<usize> = report.events.iter().map(|e| e.position).collect();
                println!(
                    "{detector} seed {seed}: md_ref {:.3} ± {:.3}, events at {at:?}",
                    report.reference.md_ref, report.reference.sigma_md
                );
            }
        }
        println!("{detector} on {source}: {quiet}/20 runs without a suspicion");
    }
    Ok(())
}
