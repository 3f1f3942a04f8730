//! Feeds HDDDM a stream whose irrelevant features drift halfway through, and
//! prints the episodes where the Hellinger distance leaves its reference band.
//! Nothing resets the detector here, so an episode lasts as long as the
//! sliding chunk stays far from the reference; the harness instead rebuilds
//! the reference after each decision.
//!
//! ```text
//! cargo run --release --example hdddm -- [seed] [chunk]
//! ```

use driftbench::detectors::Hdddm;
use driftbench::synth::{generate_scenario, ScenarioId};

fn main() -> driftbench::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let chunk = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);

    let a = generate_scenario(ScenarioId::B0, 500, seed)?;
    let b = generate_scenario(ScenarioId::B1, 500, seed + 1)?;
    let stream = a.concat(&b)?;
    let mut h = Hdddm::pending(chunk, 2.0, 1e-3)?;
    let mut alarms = Vec::new();
    for (i, x) in stream.instances().iter().enumerate() {
        if h.observe(&x.features)? {
            alarms.push(i);
        }
    }
    println!("change at row {}, warm-up {} rows", a.len(), h.warmup_len());
    let mut episodes: Vec<(usize, usize)> = Vec::new();
    for i in alarms {
        match episodes.last_mut() {
            Some((_, end)) if *end + 1 == i => *end = i,
            _ => episodes.push((i, i)),
        }
    }
    for (start, end) in episodes {
        let side = if start >= a.len() { "after" } else { "before" };
        println!("alarm {start:>5}..={end:<5} {side} the change");
    }
    Ok(())
}
