//! Premium rates and safe wealth levels for all four product designs.
//!
//! The *safe level* is the wealth at which the bequest goal can be met with
//! certainty: buy (or keep) enough coverage and the goal is locked in. Every
//! optimal strategy in this library is organized around reaching it.
//!
//! Run with: `cargo run --example premium_rates`

use bequest::model::ModelParams;
use bequest::single_premium::{safe_level_sp, surrender_threshold};
use bequest::term_life::solve_term;
use bequest::whole_life::safe_level_whole;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Goal b = 1, riskless rate 3%, force of mortality 8%,
    // 25% loading on both premium styles, 30% surrender charge.
    let params = ModelParams::new(1.0, 0.03, 0.08, 0.25, 0.25, 0.3)?;

    println!("goal b = {}, r = {}, lambda = {}", params.b, params.r, params.lambda);
    println!();

    // -- Single premium -----------------------------------------------------
    // One dollar of death benefit costs H = (1 + theta) lambda / (r + lambda)
    // up front. The strategy only makes sense when H < 1: otherwise a dollar
    // of benefit costs more than a dollar of wealth and insurance can never
    // help reach the goal.
    let h_single = params.single_premium_rate()?;
    println!("single premium (theta = {}):", params.theta);
    println!("  price per dollar of benefit  H = {h_single:.6}");
    for d in [0.0, 0.3, 0.6] {
        let safe = safe_level_sp(&params, d)?;
        println!("  benefit in force D = {d:.1}  ->  safe level {safe:.6}");
    }
    println!();

    // -- Single premium with cash value --------------------------------------
    // Surrendering returns (1 - rho) H per dollar of benefit. Below the
    // surrender threshold it is optimal to cash out and restart.
    println!("single premium with cash value (rho = {}):", params.rho);
    let cash_rate = (1.0 - params.rho) * h_single;
    println!("  cash value per dollar of benefit = {cash_rate:.6}");
    for d in [0.3, 0.6] {
        let thr = surrender_threshold(&params, d)?;
        println!("  benefit in force D = {d:.1}  ->  surrender below w = {thr:.6}");
    }
    println!();

    // -- Instantaneous term -------------------------------------------------
    // Coverage is rented at h = (1 + theta_bar) lambda per dollar per year.
    // The safe level h b / (r + h) is where the interest on wealth exactly
    // carries the premium on the remaining shortfall forever.
    let h_term = params.continuous_premium_rate()?;
    let term = solve_term(&params)?;
    println!("instantaneous term (theta_bar = {}):", params.theta_bar);
    println!("  premium rate per dollar of coverage  h = {h_term:.6}");
    println!("  safe level = {:.6}", term.safe_level);
    match term.w_star {
        Some(ws) => println!("  critical wealth w* = {ws:.6} (full coverage below, none above)"),
        None => println!("  no interior critical wealth: coverage is optimal at every wealth"),
    }
    println!();

    // -- Irreversible whole life ---------------------------------------------
    // Same premium rate as term, but coverage can never be dropped, so the
    // safe level also has to out-earn the premium drag of what is already
    // in force: max(h b / (r + h), h D / r).
    println!("irreversible whole life (theta_bar = {}):", params.theta_bar);
    for d in [0.0, 0.2, 0.5] {
        let safe = safe_level_whole(&params, d)?;
        println!("  benefit in force D = {d:.1}  ->  safe level {safe:.6}");
    }

    Ok(())
}
