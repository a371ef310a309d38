//! Analytic verification: finite-difference residuals of the variational
//! inequalities and boundary-value problems every closed form must satisfy.
//!
//! Each success probability must make its product's variational inequality
//! bind (the best action's generator term is zero, no action's is positive),
//! and each expected-bequest function must solve its boundary-value problem
//! with the right boundary conditions. The residuals are computed by central
//! finite differences on a grid, entirely independent of how the closed
//! forms were derived.
//!
//! Run with: `cargo run --example verify`

use bequest::model::ModelParams;
use bequest::oracle::{check_bvp_expected_bequest, check_variational_inequality, GridSpec, Product};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::new(1.0, 0.03, 0.08, 0.25, 0.25, 0.3)?;
    let grid = GridSpec { n_w: 200, n_d: 200 };
    let products = [
        Product::SinglePremium,
        Product::SinglePremiumCash,
        Product::Term,
        Product::Whole,
    ];

    let mut all_pass = true;
    for product in products {
        for report in [
            check_variational_inequality(&params, product, &grid)?,
            check_bvp_expected_bequest(&params, product, &grid)?,
        ] {
            for entry in &report.entries {
                all_pass &= entry.pass;
                println!(
                    "{:<4} {:<8} {:<22} {:>9} pts  max |res| {:>9.2e}  (tol {:.0e})  at (w={:.4}, d={:.4})",
                    if entry.pass { "PASS" } else { "FAIL" },
                    product.to_string(),
                    entry.name,
                    entry.n_points,
                    entry.max_abs,
                    entry.threshold,
                    entry.worst_w,
                    entry.worst_d,
                );
            }
        }
    }
    println!();
    println!(
        "{}",
        if all_pass {
            "all residual checks passed"
        } else {
            "RESIDUAL CHECKS FAILED"
        }
    );
    std::process::exit(if all_pass { 0 } else { 3 });
}
