//! Independent verification tools: Monte Carlo simulation of controlled
//! wealth paths until death or ruin, residual checks of the variational
//! inequalities and boundary-value problems the closed forms must satisfy,
//! and strategy-dominance tests.
//!
//! Everything here deliberately avoids the closed-form success
//! probabilities and expected bequests when producing its own numbers, so
//! agreement between the two is evidence, not circularity.

mod residual;
mod sim;

pub use residual::{
    check_bvp_expected_bequest, check_variational_inequality, GridSpec, ResidualReport,
};
pub use sim::{
    closed_form_bequest, closed_form_phi, dominance_test, simulate, DominanceReport, DominanceRow,
    OracleError, Product, SimReport, StrategySpec,
};
