//! Every detector on the induced 16-feature benchmark, one row per
//! (detector, seed).
//!
//! ```text
//! cargo run --release --example detector_comparison -- [top|bottom] [seeds]
//! ```

use driftbench::harness::{induced_benchmark, run_suite, DetectorKind, RunConfig, BENCHMARK_ROWS};
use driftbench::induction::InductionMode;

fn main() -> driftbench::Result<()> {
    let mut args = std::env::args().skip(1);
    let mode: InductionMode = args.next().as_deref().unwrap_or("top").parse()?;
    let seeds: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let chunk = BENCHMARK_ROWS / 10;
    let detectors = [
        DetectorKind::NoChange,
        DetectorKind::AccTr,
        DetectorKind::Md3Svm,
        DetectorKind::Md3Rs,
        DetectorKind::Hdddm,
    ];
    println!("change point at row {}", BENCHMARK_ROWS / 2);
    println!(
        "{:<12} {:>4} {:>8} {:>6} {:>6} {:>6} {:>8}  decisions",
        "detector", "seed", "acc", "drift", "false", "susp", "label%"
    );
    for seed in 1..=seeds {
        let (data, plan) = induced_benchmark(mode, seed)?;
        let base = RunConfig::new(DetectorKind::NoChange, chunk, seed);
        let name = format!("{mode}-{seed}");
        println!("seed {seed}: rotated features {:?}", plan.feature_subset);
        for (row, report) in run_suite(&[(name, data)], &detectors, &[seed], &base)? {
            let at: Vec<String> = report
                .events
                .iter()
                .filter(|e| e.kind != driftbench::detectors::DriftEventKind::Suspected)
                .map(|e| format!("{}@{}", e.kind, e.position))
                .collect();
            println!(
                "{:<12} {:>4} {:>8.4} {:>6} {:>6} {:>6} {:>8.2}  {}",
                row.detector,
                seed,
                row.accuracy,
                row.drifts_confirmed,
                row.false_alarms,
                row.suspected,
                row.labeling_percent,
                at.join(" ")
            );
        }
    }
    Ok(())
}
