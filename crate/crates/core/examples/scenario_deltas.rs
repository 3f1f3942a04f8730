//! Metric changes between the initial 2-D/3-D distributions and their drifted
//! variants, for a linear SVM and a two-tree subspace ensemble.
//!
//! ```text
//! cargo run --example scenario_deltas -- [seed]
//! ```

use driftbench::harness::scenario_deltas;
use driftbench::synth::ScenarioId;

fn main() -> driftbench::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    use ScenarioId::*;
    println!("{:<8} {:>9} {:>9} {:>9} {:>9} {:>9}", "change", "dErr_svm", "dMD_svm", "dErr_rs", "dMD_rs", "dHD");
    for (from, to) in [(A0, A1), (A0, A2), (A0, A3), (A0, A4), (B0, B1), (C0, C1)] {
        let d = scenario_deltas(from, to, 500, seed)?;
        println!(
            "{:<8} {:>9.3} {:>9.3} {:>9.3} {:>9.3} {:>9.3}",
            format!("{from}-{to}"),
            d.svm.err,
            d.svm.md,
            d.rs.err,
            d.rs.md,
            d.hd
        );
    }
    Ok(())
}
