//! Sensitivity of the term-life critical wealth w* to mortality, interest,
//! premium loading, and the size of the goal.
//!
//! w* is where the investor switches from full coverage to none. The sweeps
//! show its comparative statics: more mortality raises it (insurance pays
//! off sooner), more interest lowers it (self-funding wins), more loading
//! first raises then lowers it, and it scales linearly with the goal.
//!
//! Run with: `cargo run --example sweep_w_star`

use bequest::model::ModelParams;
use bequest::term_life::{w_star_sensitivities, SweepAxis, TermRegime};

fn print_sweep(
    title: &str,
    axis_name: &str,
    params: &ModelParams,
    axis: SweepAxis,
    values: &[f64],
) -> Result<(), Box<dyn std::error::Error>> {
    println!("{title}");
    println!("{:>8} {:>10} {:>12} {:>10}", axis_name, "w*", "safe level", "regime");
    for point in w_star_sensitivities(params, axis, values)? {
        let ws = point
            .w_star
            .map_or("-".to_string(), |v| format!("{v:.4}"));
        let regime = match point.regime {
            TermRegime::LambdaGtR => "lambda>r",
            TermRegime::LambdaLeR => "lambda<=r",
        };
        println!(
            "{:>8.3} {ws:>10} {:>12.4} {regime:>10}",
            point.axis_value, point.safe_level
        );
    }
    println!();
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::new(1.0, 0.03, 0.08, 0.25, 0.25, 1.0)?;

    print_sweep(
        "mortality sweep (r = 0.03, h = 0.10): w* rises with lambda",
        "lambda",
        &params,
        SweepAxis::Lambda,
        &[0.04, 0.05, 0.06, 0.08],
    )?;

    print_sweep(
        "interest sweep (lambda = 0.08, h = 0.10): w* falls as r rises",
        "r",
        &params,
        SweepAxis::R,
        &[0.00, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07],
    )?;

    // Premium sweep at higher mortality; the premium enters both the cost of
    // coverage and the safe level, so the effect on w* is not monotone.
    let fast = ModelParams::new(1.0, 0.03, 0.12, 0.25, 0.25, 1.0)?;
    print_sweep(
        "premium sweep (lambda = 0.12, r = 0.03): w* peaks at an interior h",
        "h",
        &fast,
        SweepAxis::H,
        &[0.12, 0.15, 0.20, 0.25],
    )?;

    print_sweep(
        "goal sweep (everything else fixed): w* is proportional to b",
        "b",
        &params,
        SweepAxis::B,
        &[0.5, 1.0, 1.5, 2.0],
    )?;

    Ok(())
}
