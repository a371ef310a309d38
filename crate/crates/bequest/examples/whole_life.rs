//! Irreversible whole life: region classification of the (wealth, benefit)
//! plane and the success probability / expected bequest at representative
//! states.
//!
//! In-force coverage can never be dropped, so the state is two-dimensional:
//! wealth w and death benefit D. The plane splits into
//!
//! * `R0`      — D already covers the goal; never buy again.
//! * `Ra`      — bequest line w + D >= b with D above the goal kink; wait,
//!   then track the goal line w + D = b downward as wealth grows.
//! * `Rb-wait` — under-covered but buying now would be premature; wait.
//! * `Rb-jump` — under-covered and the free boundary says buy: jump straight
//!   to full coverage of the shortfall and track the goal line.
//! * `safe`    — wealth at/above the safe level; the goal is certain.
//!
//! Run with: `cargo run --example whole_life`

use bequest::model::{ModelParams, WealthState};
use bequest::whole_life::{
    buy_trigger_d0, classify_region, expected_bequest_whole, jump_boundary, optimal_action_whole,
    phi_whole, safe_level_whole, RegionLabel, WlAction,
};

fn label(region: RegionLabel) -> &'static str {
    match region {
        RegionLabel::R0 => "R0",
        RegionLabel::Ra => "Ra",
        RegionLabel::RbWait => "Rb-wait",
        RegionLabel::RbJump => "Rb-jump",
        RegionLabel::Safe => "safe",
    }
}

fn describe(action: &WlAction) -> String {
    match action {
        WlAction::NoMoreInsurance => "no more insurance".into(),
        WlAction::WaitThenTrack => "wait, then track the goal line".into(),
        WlAction::Wait => "wait".into(),
        WlAction::JumpToFullThenTrack { amount } => {
            format!("buy {amount:.6} now, then track the goal line")
        }
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::new(1.0, 0.03, 0.08, 0.25, 0.25, 1.0)?;
    let h = params.continuous_premium_rate()?;
    let kink = params.r * params.b / (params.r + h);
    let term_safe = h * params.b / (params.r + h);

    println!("premium rate h = {h:.6}");
    println!("goal kink r b / (r + h) = {kink:.6} (benefit level where premium drag and interest balance)");
    println!();

    // The two free boundaries live on w in [0, h b / (r + h)]:
    //  - jump boundary D_j(w): below it, under-covered states buy immediately;
    //  - buy trigger D_0(w): where the jump region first touches D = 0.
    println!("free boundaries at sample wealth levels:");
    println!("{:>6} {:>12} {:>12}", "w", "D_jump", "D_buy");
    for w in [0.0, 0.4, 0.7, 0.72, 0.75, term_safe] {
        let dj = jump_boundary(&params, w)?;
        let d0 = buy_trigger_d0(&params, w)?;
        println!("{w:>6.4} {dj:>12.6} {d0:>12.6}");
    }
    println!();

    println!(
        "{:>6} {:>6} {:>9} {:>12} {:>12}  action",
        "w", "D", "region", "phi", "E[bequest]"
    );
    let states = [
        (0.5, 1.2),  // R0: benefit alone already covers the goal
        (0.6, 0.85), // Ra: over the goal line, benefit above the kink
        (0.75, 0.05), // Rb-wait: under-covered, but waiting beats buying
        (0.4, 0.1),  // Rb-jump: under-covered and the boundary says buy now
        (0.3, 0.05), // Rb-jump deeper in
    ];
    for (w, d) in states {
        let state = WealthState::new(w, d)?;
        let safe = safe_level_whole(&params, d)?;
        let region = if w >= safe {
            RegionLabel::Safe
        } else {
            classify_region(&params, &state)?
        };
        let phi = phi_whole(&params, &state)?;
        let e = expected_bequest_whole(&params, &state)?;
        let action = optimal_action_whole(&params, &state)?;
        println!(
            "{w:>6.2} {d:>6.2} {:>9} {phi:>12.6} {e:>12.6}  {}",
            label(region),
            describe(&action)
        );
    }
    println!();

    // A whole-life investor holding nothing (D = 0) faces exactly the term
    // problem: irreversibility costs nothing if you never plan to sell.
    use bequest::term_life::phi_term;
    let w = 0.55;
    let whole = phi_whole(&params, &WealthState::new(w, 0.0)?)?;
    let term = phi_term(&params, w)?;
    println!("at D = 0 whole life reduces to term: phi_whole = {whole:.12}, phi_term = {term:.12}");

    Ok(())
}
