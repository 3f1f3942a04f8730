//! How soon each metric reacts as more HD20 features drift.
//!
//! ```text
//! cargo run --release --example table8_sweep -- [seed]
//! ```

use driftbench::harness::{table8_sweep, TABLE8_REPEATS};

fn main() -> driftbench::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let (rows, summary) = table8_sweep(500, seed, TABLE8_REPEATS)?;
    println!("{:>3} {:>8} {:>8} {:>8} {:>8}", "i", "dErr", "dMD", "dUnc", "dHD");
    for r in &rows {
        println!(
            "{:>3} {:>8.3} {:>8.3} {:>8.3} {:>8.3}",
            r.drifted, r.d_err, r.d_md, r.d_uncertain, r.d_hd
        );
    }
    let show = |o: Option<usize>| o.map_or("-".to_string(), |v| v.to_string());
    println!(
        "first nonzero: HD {}  Uncertain {}  MD {}  Err {}",
        show(summary.hd),
        show(summary.uncertain),
        show(summary.md),
        show(summary.err)
    );
    Ok(())
}
