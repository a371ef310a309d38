//! Exports the whole-life purchase boundaries as CSV, ready for plotting.
//!
//! Writes three columns: wealth `w`, the jump boundary `D_j(w)` separating
//! wait from buy for under-covered states, and the buy trigger `D_0(w)`
//! marking where a benefit-free investor should first purchase. Where the
//! curves are negative the jump region has swallowed the whole benefit axis
//! (every under-covered state at that wealth buys immediately).
//!
//! Run with: `cargo run --example boundary_csv > boundaries.csv`

use bequest::model::ModelParams;
use bequest::whole_life::{buy_trigger_d0, jump_boundary};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::new(1.0, 0.03, 0.08, 0.25, 0.25, 1.0)?;
    let h = params.continuous_premium_rate()?;
    let w_max = h * params.b / (params.r + h);
    let n = 200;

    println!("w,d_jump,d_buy");
    for i in 0..=n {
        // Fraction first: hits exactly 1.0 at the endpoint, so w never
        // rounds past the domain edge w_max.
        let w = w_max * (f64::from(i) / f64::from(n));
        let dj = jump_boundary(&params, w)?;
        let d0 = buy_trigger_d0(&params, w)?;
        // Full double precision so the file round-trips exactly.
        println!("{w},{dj},{d0}");
    }
    Ok(())
}
