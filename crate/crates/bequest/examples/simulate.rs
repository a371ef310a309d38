//! Monte Carlo cross-check: replay each optimal strategy path by path and
//! compare the simulated success probability and mean bequest against the
//! closed forms.
//!
//! The simulator shares no formulas with the closed-form layer. It draws an
//! exponential death time, evolves wealth through each strategy phase with
//! exact flows, and scores the bequest at death — so agreement within Monte
//! Carlo noise is genuine evidence the formulas are right.
//!
//! Run with: `cargo run --release --example simulate`

use bequest::model::{ModelParams, WealthState};
use bequest::oracle::{closed_form_bequest, closed_form_phi, simulate, Product, StrategySpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::new(1.0, 0.03, 0.08, 0.25, 0.25, 0.3)?;
    let n_paths = 200_000;
    let seed = 2024;

    let runs = [
        (Product::SinglePremium, StrategySpec::OptimalSP, 0.4, 0.3),
        (Product::SinglePremiumCash, StrategySpec::OptimalSPCash, 0.4, 0.3),
        (Product::Term, StrategySpec::OptimalTerm, 0.4, 0.0),
        (Product::Whole, StrategySpec::OptimalWhole, 0.75, 0.05),
    ];

    println!("{n_paths} paths per run, master seed {seed}");
    println!();
    println!(
        "{:<8} {:>5} {:>5} {:>10} {:>10} {:>8} {:>11} {:>11} {:>8}",
        "product", "w", "D", "sim phi", "true phi", "z", "sim E[bq]", "true E[bq]", "z"
    );
    for (product, strategy, w, d) in runs {
        let state = WealthState::new(w, d)?;
        let report = simulate(&params, product, strategy, &state, n_paths, seed)?;
        let phi = closed_form_phi(&params, product, &state)?;
        let e = closed_form_bequest(&params, product, &state)?;
        let z_phi = (report.success_prob - phi) / report.success_se;
        let z_e = (report.mean_bequest - e) / report.bequest_se;
        println!(
            "{:<8} {w:>5.2} {d:>5.2} {:>10.6} {phi:>10.6} {z_phi:>8.2} {:>11.6} {e:>11.6} {z_e:>8.2}",
            product.to_string(),
            report.success_prob,
            report.mean_bequest,
        );
    }
    println!();
    println!("|z| stays within ~3 across seeds; rerun with a different seed to see it move.");

    Ok(())
}
