//! Instantaneous term life: the critical wealth w*, optimal coverage, ruin
//! versus safety, and how the solution changes across mortality regimes.
//!
//! Term coverage is rented continuously, so the investor re-decides at every
//! instant. The surprising feature is a *critical wealth* w* when mortality
//! outpaces interest (lambda > r): below w* the investor insures the whole
//! shortfall and accepts a premium drag that may ruin them; above w* they
//! drop coverage entirely and race wealth to the safe level.
//!
//! Run with: `cargo run --example term_life`

use bequest::model::ModelParams;
use bequest::term_life::{
    expected_bequest_term, hitting_times_term, optimal_coverage_term, phi_term, solve_term,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::new(1.0, 0.03, 0.08, 0.25, 0.25, 1.0)?;
    let sol = solve_term(&params)?;
    let ws = sol.w_star.expect("lambda > r has an interior critical wealth");

    println!("premium rate h = {:.6}", params.continuous_premium_rate()?);
    println!("safe level     = {:.6}", sol.safe_level);
    println!("critical w*    = {ws:.6}");
    println!();

    println!(
        "{:>6} {:>10} {:>10} {:>12} {:>12} {:>12}",
        "w", "coverage", "phi", "E[bequest]", "t to ruin", "t to safe"
    );
    for w in [0.1, 0.4, 0.65, ws, 0.72, sol.safe_level] {
        let coverage = optimal_coverage_term(&params, w)?;
        let phi = phi_term(&params, w)?;
        let e = expected_bequest_term(&params, w)?;
        let (tau_ruin, tau_safe) = hitting_times_term(&params, w)?;
        let fmt = |t: Option<f64>| t.map_or("-".to_string(), |t| format!("{t:.4}"));
        println!(
            "{w:>6.4} {coverage:>10.4} {phi:>10.6} {e:>12.6} {:>12} {:>12}",
            fmt(tau_ruin),
            fmt(tau_safe)
        );
    }
    println!();
    println!("below w* the investor holds full coverage and drifts toward ruin;");
    println!("above w* they hold none and wealth compounds to the safe level.");
    println!();

    // At w* exactly, both branches price the same outcome: the survival
    // discounts of the time-to-ruin (covered) and time-to-safety (uncovered)
    // split one between them.
    let (tau_ruin, tau_safe) = hitting_times_term(&params, ws)?;
    let split = (-params.lambda * tau_ruin.unwrap()).exp()
        + (-params.lambda * tau_safe.unwrap()).exp();
    println!("identity at w*: e^(-lambda tau_ruin) + e^(-lambda tau_safe) = {split:.12}");
    println!();

    // When interest keeps up with mortality (lambda <= r) the critical wealth
    // vanishes: coverage is optimal at every wealth level below safety.
    let slow = ModelParams::new(1.0, 0.06, 0.05, 0.25, 0.4, 1.0)?;
    let slow_sol = solve_term(&slow)?;
    println!(
        "lambda <= r regime (r = {}, lambda = {}): w* = {:?}, safe level = {:.6}",
        slow.r, slow.lambda, slow_sol.w_star, slow_sol.safe_level
    );
    println!("  full coverage of the shortfall is optimal at every w below the safe level");

    Ok(())
}
