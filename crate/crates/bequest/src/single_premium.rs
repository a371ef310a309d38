//! Single-premium whole life: lump-sum purchases at price `H` per dollar.
//!
//! Coverage can only be added, never shed, except in the cash-value variant
//! where the whole position may be surrendered for `(1 - rho) * H * D`.
//! Because `H < 1`, postponing a purchase and letting wealth grow at `r`
//! dominates buying early: the optimal strategy waits until wealth reaches
//! the safe level
//!
//! ```text
//! safe(D) = H * (b - D)
//! ```
//!
//! then spends exactly that much to top coverage up to the goal. The success
//! probability below the safe level is the chance of outliving the wait:
//!
//! ```text
//! phi(w, D) = (w / (H (b - D)))^(lambda / r)
//! ```
//!
//! With cash value, states below `(1 - rho) * H * (b - D)` surrender
//! immediately (the refund buys more progress toward the goal than the
//! coverage it gives up) and then follow the no-cash strategy from the
//! boosted wealth `w + (1 - rho) * H * D` with zero coverage.

use serde::Serialize;

use crate::model::{DomainError, ModelParams, ParamError, WealthState};

/// Errors from single-premium operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// What to do right now at a given state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "action")]
pub enum SpAction {
    /// Let wealth grow; no trade.
    Wait,
    /// Spend `H * amount` immediately to raise coverage by `amount`.
    BuyAdditional { amount: f64 },
    /// Give up all coverage for the cash refund.
    SurrenderAll { cash_received: f64 },
    /// Existing benefit already meets the goal.
    AlreadyFunded,
}

fn checked_rate(params: &ModelParams) -> Result<f64, SpError> {
    Ok(params.single_premium_rate()?)
}

/// Wealth level at which topping coverage up to the goal is exactly
/// affordable: `H * (b - d)`.
pub fn safe_level_sp(params: &ModelParams, d: f64) -> Result<f64, SpError> {
    let price = checked_rate(params)?;
    if !(d.is_finite() && d >= 0.0) {
        return Err(DomainError::Benefit(d).into());
    }
    if d >= params.b {
        return Err(DomainError::GoalAlreadyMet { d, b: params.b }.into());
    }
    Ok(price * (params.b - d))
}

/// Wealth below which surrendering all coverage is optimal:
/// `(1 - rho) * H * (b - d)`.
pub fn surrender_threshold(params: &ModelParams, d: f64) -> Result<f64, SpError> {
    Ok((1.0 - params.rho) * safe_level_sp(params, d)?)
}

/// Probability of reaching the goal under the optimal no-cash-value strategy.
/// Returns 1 for states at or above the safe level and for `d >= b`.
pub fn phi_no_cash(params: &ModelParams, state: WealthState) -> Result<f64, SpError> {
    let price = checked_rate(params)?;
    if state.d >= params.b {
        return Ok(1.0);
    }
    let safe = price * (params.b - state.d);
    if state.w >= safe {
        return Ok(1.0);
    }
    Ok((state.w / safe).powf(params.lambda / params.r))
}

/// Optimal trade at `state` when coverage has no cash value.
pub fn optimal_action_no_cash(
    params: &ModelParams,
    state: WealthState,
) -> Result<SpAction, SpError> {
    let price = checked_rate(params)?;
    if state.d >= params.b {
        return Ok(SpAction::AlreadyFunded);
    }
    let safe = price * (params.b - state.d);
    if state.w >= safe {
        Ok(SpAction::BuyAdditional { amount: params.b - state.d })
    } else {
        Ok(SpAction::Wait)
    }
}

/// Time for wealth to grow to the safe level with no trading:
/// `ln(safe / w) / r`. Zero at or above the safe level, infinite from `w = 0`.
pub fn hitting_time_safe_sp(params: &ModelParams, state: WealthState) -> Result<f64, SpError> {
    let price = checked_rate(params)?;
    if state.d >= params.b {
        return Ok(0.0);
    }
    let safe = price * (params.b - state.d);
    if state.w >= safe {
        return Ok(0.0);
    }
    if state.w == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((safe / state.w).ln() / params.r)
}

/// Expected wealth-plus-benefit at death under the optimal no-cash strategy.
///
/// ```text
/// lambda != r:  (b-D) [1 - lambda H / (lambda - r)] phi + lambda w / (lambda - r) + D
/// lambda == r:  w [1/H + ln(H (b-D) / w)] + D
/// ```
///
/// Defined on `0 <= w <= safe(D)`, `0 <= D < b`; clamps to `b` above the safe
/// level and errors once the benefit alone meets the goal.
pub fn expected_bequest_no_cash(
    params: &ModelParams,
    state: WealthState,
) -> Result<f64, SpError> {
    let price = checked_rate(params)?;
    if state.d >= params.b {
        return Err(DomainError::GoalAlreadyMet { d: state.d, b: params.b }.into());
    }
    let safe = price * (params.b - state.d);
    if state.w >= safe {
        return Ok(params.b);
    }
    Ok(bequest_after_wait(params, price, state.w, params.b - state.d) + state.d)
}

/// Expected bequest for the wait-then-buy plan toward a residual goal `gap`,
/// excluding any benefit already in force.
fn bequest_after_wait(params: &ModelParams, price: f64, w: f64, gap: f64) -> f64 {
    let (r, lambda) = (params.r, params.lambda);
    let safe = price * gap;
    if lambda != r {
        let phi = (w / safe).powf(lambda / r);
        gap * (1.0 - lambda * price / (lambda - r)) * phi + lambda * w / (lambda - r)
    } else if w == 0.0 {
        0.0
    } else {
        w * (1.0 / price + (safe / w).ln())
    }
}

/// Success probability when surrender for cash value is allowed.
/// At least [`phi_no_cash`]; strictly greater below the surrender threshold
/// when any coverage is in force.
pub fn phi_cash(params: &ModelParams, state: WealthState) -> Result<f64, SpError> {
    let price = checked_rate(params)?;
    if state.d >= params.b {
        return Ok(1.0);
    }
    let safe = price * (params.b - state.d);
    if state.w >= safe {
        return Ok(1.0);
    }
    let exponent = params.lambda / params.r;
    if state.w < (1.0 - params.rho) * safe {
        let boosted = state.w + (1.0 - params.rho) * price * state.d;
        Ok((boosted / (price * params.b)).powf(exponent))
    } else {
        Ok((state.w / safe).powf(exponent))
    }
}

/// Optimal trade at `state` when surrender refunds `(1 - rho) * H * d`.
/// At the surrender threshold exactly, holding dominates weakly: `Wait`.
pub fn optimal_action_cash(params: &ModelParams, state: WealthState) -> Result<SpAction, SpError> {
    let price = checked_rate(params)?;
    if state.d >= params.b {
        return Ok(SpAction::AlreadyFunded);
    }
    let safe = price * (params.b - state.d);
    if state.w >= safe {
        return Ok(SpAction::BuyAdditional { amount: params.b - state.d });
    }
    if state.w < (1.0 - params.rho) * safe && state.d > 0.0 {
        return Ok(SpAction::SurrenderAll { cash_received: (1.0 - params.rho) * price * state.d });
    }
    Ok(SpAction::Wait)
}

/// Expected bequest under the optimal cash-value strategy.
///
/// Below the surrender threshold the position is cashed in at once, so the
/// bequest is the no-cash value started from the boosted wealth with no
/// coverage; elsewhere it matches [`expected_bequest_no_cash`]. The two
/// branches generally disagree at the threshold itself (the function jumps
/// upward in `w` there).
pub fn expected_bequest_cash(params: &ModelParams, state: WealthState) -> Result<f64, SpError> {
    let price = checked_rate(params)?;
    if state.d >= params.b {
        return Err(DomainError::GoalAlreadyMet { d: state.d, b: params.b }.into());
    }
    let safe = price * (params.b - state.d);
    if state.w >= safe {
        return Ok(params.b);
    }
    if state.w < (1.0 - params.rho) * safe {
        let boosted = state.w + (1.0 - params.rho) * price * state.d;
        Ok(bequest_after_wait(params, price, boosted, params.b))
    } else {
        Ok(bequest_after_wait(params, price, state.w, params.b - state.d) + state.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ModelParams {
        ModelParams::new(1.0, 0.03, 0.08, 0.25, 0.25, 0.3).unwrap()
    }

    fn equal_rates() -> ModelParams {
        ModelParams::new(1.0, 0.05, 0.05, 0.25, 0.25, 0.3).unwrap()
    }

    fn st(w: f64, d: f64) -> WealthState {
        WealthState::new(w, d).unwrap()
    }

    #[test]
    fn safe_level_values() {
        let p = base();
        assert!((safe_level_sp(&p, 0.0).unwrap() - 0.9090909090909091).abs() < 1e-15);
        assert!((safe_level_sp(&p, 0.3).unwrap() - 0.6363636363636364).abs() < 1e-15);
        assert!(matches!(
            safe_level_sp(&p, 1.0),
            Err(SpError::Domain(DomainError::GoalAlreadyMet { .. }))
        ));
        let p0 = ModelParams::new(1.0, 0.0, 0.08, 0.25, 0.25, 1.0).unwrap();
        assert!(matches!(
            safe_level_sp(&p0, 0.0),
            Err(SpError::Param(ParamError::ZeroInterestRate { .. }))
        ));
    }

    #[test]
    fn phi_matches_closed_form() {
        let p = base();
        assert!((phi_no_cash(&p, st(0.4, 0.0)).unwrap() - 0.11199719281127334).abs() < 1e-15);
        assert!((phi_no_cash(&p, st(0.4, 0.3)).unwrap() - 0.2899205704987383).abs() < 1e-15);
        assert_eq!(phi_no_cash(&p, st(0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(phi_no_cash(&p, st(0.6363636363636364, 0.3)).unwrap(), 1.0);
        assert_eq!(phi_no_cash(&p, st(2.0, 0.3)).unwrap(), 1.0);
        assert_eq!(phi_no_cash(&p, st(0.0, 1.7)).unwrap(), 1.0);
    }

    #[test]
    fn hitting_time_and_discount_identity() {
        let p = base();
        let tau = hitting_time_safe_sp(&p, st(0.4, 0.0)).unwrap();
        assert!((tau - 27.366018402327674).abs() < 1e-12);
        let phi = phi_no_cash(&p, st(0.4, 0.0)).unwrap();
        assert!(((-p.lambda * tau).exp() - phi).abs() < 1e-15);
        assert_eq!(hitting_time_safe_sp(&p, st(0.0, 0.0)).unwrap(), f64::INFINITY);
        assert_eq!(hitting_time_safe_sp(&p, st(0.95, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn actions_and_tie_breaks() {
        let p = base();
        assert_eq!(optimal_action_no_cash(&p, st(0.4, 0.3)).unwrap(), SpAction::Wait);
        assert_eq!(
            optimal_action_no_cash(&p, st(0.6363636363636364, 0.3)).unwrap(),
            SpAction::BuyAdditional { amount: 0.7 }
        );
        assert_eq!(optimal_action_no_cash(&p, st(0.1, 1.0)).unwrap(), SpAction::AlreadyFunded);

        // Surrender threshold at d = 0.3 is 0.44545...; just below surrenders,
        // exactly at it waits.
        let thr = surrender_threshold(&p, 0.3).unwrap();
        assert!((thr - 0.44545454545454544).abs() < 1e-15);
        match optimal_action_cash(&p, st(thr - 1e-9, 0.3)).unwrap() {
            SpAction::SurrenderAll { cash_received } => {
                assert!((cash_received - 0.7 * 0.9090909090909091 * 0.3).abs() < 1e-15)
            }
            other => panic!("expected surrender, got {other:?}"),
        }
        assert_eq!(optimal_action_cash(&p, st(thr, 0.3)).unwrap(), SpAction::Wait);
        // No coverage means nothing to surrender.
        assert_eq!(optimal_action_cash(&p, st(0.1, 0.0)).unwrap(), SpAction::Wait);
    }

    #[test]
    fn cash_value_phi_branches() {
        let p = base();
        // Below the threshold: boosted-wealth branch.
        assert!((phi_cash(&p, st(0.4, 0.3)).unwrap() - 0.31703140427021373).abs() < 1e-15);
        // rho = 0.5 moves the same state above the threshold: plain branch.
        let p5 = ModelParams::new(1.0, 0.03, 0.08, 0.25, 0.25, 0.5).unwrap();
        assert!((phi_cash(&p5, st(0.4, 0.3)).unwrap() - 0.2899205704987383).abs() < 1e-15);
        // rho = 1 collapses to the no-cash value everywhere.
        let p1 = ModelParams::new(1.0, 0.03, 0.08, 0.25, 0.25, 1.0).unwrap();
        assert_eq!(
            phi_cash(&p1, st(0.4, 0.3)).unwrap(),
            phi_no_cash(&p1, st(0.4, 0.3)).unwrap()
        );
        // With no coverage both branches coincide.
        assert!(
            (phi_cash(&p, st(0.2, 0.0)).unwrap() - phi_no_cash(&p, st(0.2, 0.0)).unwrap()).abs()
                < 1e-15
        );
    }

    #[test]
    fn expected_bequest_values() {
        let p = base();
        assert!(
            (expected_bequest_no_cash(&p, st(0.4, 0.3)).unwrap() - 0.8477525457504015).abs()
                < 1e-14
        );
        assert_eq!(expected_bequest_no_cash(&p, st(0.9, 0.3)).unwrap(), 1.0);
        assert!(matches!(
            expected_bequest_no_cash(&p, st(0.4, 1.0)),
            Err(SpError::Domain(DomainError::GoalAlreadyMet { .. }))
        ));
        // Cash-value surrender branch.
        assert!(
            (expected_bequest_cash(&p, st(0.4, 0.3)).unwrap() - 0.8013493616953574).abs() < 1e-14
        );
        // Equal rates, no-cash branch.
        let pe = equal_rates();
        assert!(
            (expected_bequest_no_cash(&pe, st(0.3, 0.2)).unwrap() - 0.8332476871297972).abs()
                < 1e-14
        );
        // At w = 0 with lambda = r the bequest is the benefit alone.
        assert!((expected_bequest_no_cash(&pe, st(0.0, 0.2)).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn bequest_jump_at_surrender_threshold_is_upward() {
        let p = base();
        let thr = surrender_threshold(&p, 0.3).unwrap();
        let below = expected_bequest_cash(&p, st(thr * (1.0 - 1e-9), 0.3)).unwrap();
        let above = expected_bequest_cash(&p, st(thr, 0.3)).unwrap();
        assert!(below <= above, "bequest must step up across the surrender threshold");
    }
}
