//! Single-premium coverage: success probabilities, optimal actions, hitting
//! times, and the value of a cash-value (surrender) rider.
//!
//! The no-cash-value strategy is pure patience: wait until wealth reaches
//! the safe level, then buy the whole shortfall at once. The success
//! probability is the chance of surviving that wait. A cash-value rider adds
//! one more move — below a threshold wealth, surrender existing coverage and
//! fold the cash back into wealth — and can only help.
//!
//! Run with: `cargo run --example single_premium`

use bequest::model::{ModelParams, WealthState};
use bequest::single_premium::{
    expected_bequest_cash, expected_bequest_no_cash, hitting_time_safe_sp, optimal_action_cash,
    optimal_action_no_cash, phi_cash, phi_no_cash, safe_level_sp, surrender_threshold, SpAction,
};

fn describe(action: &SpAction) -> String {
    match action {
        SpAction::Wait => "wait".into(),
        SpAction::BuyAdditional { amount } => format!("buy {amount:.6} of benefit now"),
        SpAction::SurrenderAll { cash_received } => {
            format!("surrender everything for {cash_received:.6} cash")
        }
        SpAction::AlreadyFunded => "goal already funded".into(),
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::new(1.0, 0.03, 0.08, 0.25, 0.25, 0.3)?;
    let d = 0.3; // death benefit already in force

    let safe = safe_level_sp(&params, d)?;
    println!("safe level for D = {d}: {safe:.6}");
    println!();

    // -- No cash value --------------------------------------------------------
    println!("no cash value:");
    println!("{:>6} {:>12} {:>16} {:>14}  action", "w", "phi", "E[bequest]", "wait (years)");
    for w in [0.0, 0.2, 0.4, 0.6, safe] {
        let state = WealthState::new(w, d)?;
        let phi = phi_no_cash(&params, state)?;
        let e = expected_bequest_no_cash(&params, state)?;
        let action = optimal_action_no_cash(&params, state)?;
        let wait = hitting_time_safe_sp(&params, state)?;
        println!(
            "{w:>6.3} {phi:>12.6} {e:>16.6} {wait:>14.4}  {}",
            describe(&action)
        );
    }
    println!();

    // At w = 0 wealth never grows past 0, so the goal is unreachable: phi = 0.
    // At the safe level the purchase succeeds with certainty: phi = 1.

    // -- With cash value ------------------------------------------------------
    let thr = surrender_threshold(&params, d)?;
    println!("with cash value (rho = {}): surrender below w = {thr:.6}", params.rho);
    println!("{:>6} {:>12} {:>12} {:>16}  action", "w", "phi", "phi gain", "E[bequest]");
    for w in [0.0, 0.2, 0.4, thr, 0.5, 0.6] {
        let state = WealthState::new(w, d)?;
        let base = phi_no_cash(&params, state)?;
        let phi = phi_cash(&params, state)?;
        let e = expected_bequest_cash(&params, state)?;
        let action = optimal_action_cash(&params, state)?;
        println!(
            "{w:>6.3} {phi:>12.6} {:>12.6} {e:>16.6}  {}",
            phi - base,
            describe(&action)
        );
    }
    println!();
    println!("the surrender option strictly helps below the threshold and never hurts above it");

    Ok(())
}
