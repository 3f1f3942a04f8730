//! Margin-width and sensitivity sweeps for MD3-RS on the top-quarter
//! induced benchmark.
//!
//! ```text
//! cargo run --release --example sweeps -- [seed]
//! ```

use driftbench::harness::{
    induced_benchmark, margin_width_sweep, sensitivity_sweep, write_summary_csv, DetectorKind, RunConfig,
    BENCHMARK_ROWS,
};
use driftbench::induction::InductionMode;

fn main() -> driftbench::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let (data, _) = induced_benchmark(InductionMode::TopFraction, seed)?;
    let base = RunConfig::new(DetectorKind::Md3Rs, BENCHMARK_ROWS / 10, seed);

    let mut rows = margin_width_sweep(&data, &base, &[0.05, 0.25, 0.5, 0.75])?;
    rows.extend(sensitivity_sweep(&data, &base, &[0.0, 1.0, 2.0, 3.0])?);
    write_summary_csv(&rows, std::io::stdout().lock())
}
