//! Ranks the graded-relevance features by information gain, then induces
//! drift on the top and the bottom quarter and saves both plans.
//!
//! ```text
//! cargo run --release --example induction -- [seed] [out_dir]
//! ```

use driftbench::data::{write_csv, Label};
use driftbench::induction::{induce, rank_by_information_gain, InductionMode, DEFAULT_BINS};
use driftbench::synth::{generate_blobs, graded_relevance_spec};
use std::fs::File;
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| std::env::temp_dir().display().to_string()));

    let data = generate_blobs(&graded_relevance_spec(500), seed)?;
    let ranking = rank_by_information_gain(&data, DEFAULT_BINS)?;
    for (f, gain) in &ranking.entries {
        println!("feature {f:>2}  gain {gain:.4}");
    }

    for (name, mode) in [("top", InductionMode::TopFraction), ("bottom", InductionMode::BottomFraction)] {
        let (induced, plan) = induce(&data, mode, 0.25, 0.5, Label::Negative, DEFAULT_BINS)?;
        let csv = out.join(format!("induced_{name}.csv"));
        write_csv(&induced, File::create(&csv)?)?;
        serde_json::to_writer_pretty(File::create(out.join(format!("induced_{name}.plan.json")))?, &plan)?;
        println!(
            "{name}: rotated {:?} from row {}, wrote {}",
            plan.feature_subset,
            plan.start_index(induced.len()),
            csv.display()
        );
    }
    Ok(())
}
