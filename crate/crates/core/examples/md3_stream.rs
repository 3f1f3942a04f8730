//! MD3 step by step: a stationary stream followed by the same source with
//! drift induced at the midpoint. Prints every event and a coarse trace.
//!
//! ```text
//! cargo run --release --example md3_stream -- [seed]
//! ```

use driftbench::harness::{run_stream, DetectorKind, RunConfig};
use driftbench::induction::{induce, InductionMode};
use driftbench::synth::{generate_blobs, graded_relevance_spec};
use driftbench::data::Label;

fn main() -> driftbench::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let chunk = 100;
    let stationary = generate_blobs(&graded_relevance_spec(10 * chunk), seed)?;
    let (drifting, plan) = induce(&stationary, InductionMode::TopFraction, 0.25, 0.5, Label::Negative, 10)?;

    for (name, data) in [("stationary", &stationary), ("drifting", &drifting)] {
        let report = run_stream(data, &RunConfig::new(DetectorKind::Md3Svm, chunk, seed))?;
        println!(
            "{name}: {} rows, reference md {:.4} ± {:.4}, acc {:.4} ± {:.4}",
            data.len(),
            report.reference.md_ref,
            report.reference.sigma_md,
            report.reference.acc_ref,
            report.reference.sigma_acc
        );
        for e in &report.events {
            println!("  {:>5}  {:<12} metric {:.4}  labels {}", e.position, e.kind, e.metric, e.labels_so_far);
        }
        for row in report.trace.iter().step_by(chunk) {
            println!(
                "  step {:>5}  running acc {:.4}  md_t {:.4}",
                row.step, row.running_accuracy, row.metric_value
            );
        }
        println!("  final accuracy {:.4}, labeling {:.2}%", report.accuracy, report.labeling_percent);
    }
    println!("rotated features {:?} of class -1 from row {}", plan.feature_subset, plan.start_index(drifting.len()));
    Ok(())
}
