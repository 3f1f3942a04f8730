//! Margin density of the three model families on a scenario before and after
//! the boundary moves into a populated region.
//!
//! ```text
//! cargo run --release --example margin_density -- [from] [to] [seed]
//! ```

use driftbench::classifiers::{train_linear_svm, train_logistic, train_subspace_ensemble, EnsembleConfig, Model, Penalty};
use driftbench::margin::{margin_density, MarginSpec};
use driftbench::synth::{generate_scenario, ScenarioId};

fn main() -> driftbench::Result<()> {
    let mut args = std::env::args().skip(1);
    let from: ScenarioId = args.next().as_deref().unwrap_or("a0").parse()?;
    let to: ScenarioId = args.next().as_deref().unwrap_or("a3").parse()?;
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);

    let train = generate_scenario(from, 500, seed)?;
    let before = generate_scenario(from, 500, seed + 1)?;
    let after = generate_scenario(to, 500, seed + 1)?;

    let models: [(&str, Model, MarginSpec); 3] = [
        ("svm", Model::Linear(train_linear_svm(&train, 1.0, seed)?), MarginSpec::svm()),
        (
            "logistic",
            Model::Linear(train_logistic(&train, Penalty::L2, 0.01, 0)?),
            MarginSpec::probabilistic(0.5)?,
        ),
        (
            "subspace",
            Model::Ensemble(train_subspace_ensemble(&train, &EnsembleConfig::default(), seed)?),
            MarginSpec::ensemble(0.5)?,
        ),
    ];
    println!("{from} -> {to}");
    for (name, model, spec) in &models {
        let b = margin_density(model, spec, before.instances())?;
        let a = margin_density(model, spec, after.instances())?;
        let (eb, ea) = (1.0 - model.accuracy(before.instances())?, 1.0 - model.accuracy(after.instances())?);
        println!("{name:<9} md {b:.3} -> {a:.3}   err {eb:.3} -> {ea:.3}");
    }
    Ok(())
}
