//! Irreversible whole life insurance funded by a continuously paid premium.
//!
//! Benefit `D` can only be increased, never reduced or surrendered, and an
//! in-force benefit costs premium at rate `h * D` forever. Wealth obeys
//! `dW = (rW - hD) dt`, so large benefits drain wealth while small ones let
//! it compound. If wealth hits zero the policy lapses and the bequest is
//! forfeited; at death the bequest is wealth plus benefit. The buyer
//! maximizes the probability that the bequest reaches the goal `b`.
//!
//! The state space splits into regions with distinct optimal actions:
//!
//! * `R0` (`D >= b`): the benefit alone covers the goal; never buy more.
//!   Success means dying before wealth runs out.
//! * `Ra` (`D` above the kink `rb/(r+h)` but below `b`, wealth at least
//!   `b - D`): wealth drifts down; do nothing until it reaches `b - D`,
//!   then buy continuously to hold `W + D = b` (dying on that line pays
//!   exactly `b`).
//! * `RbWait` (small benefit, `D` at or below the jump boundary `D_j(w)`):
//!   wealth drifts up; wait until it reaches `hb/(r+h)`, then buy
//!   `rb/(r+h) - D` at once and sit at the stationary point of the line.
//! * `RbJump` (the rest): immediately buy `b - (w + D)`, landing on the
//!   line `W + D = b`, and track it downward.
//! * `Safe` (`w` equal to the safe level `max(hb/(r+h), hD/r)`): success is
//!   certain.
//!
//! When `lambda > r` the wait region additionally requires wealth at or
//! above the term-life critical wealth `w_star`; the benefit-free slice
//! `D = 0` of this model reproduces the term-life solution exactly.

use serde::Serialize;

use crate::model::{DomainError, ModelParams, ParamError, WealthState};
use crate::numerics::RootError;
use crate::term_life::solve_term;

/// Error surfaced by whole-life operations.
#[derive(Debug, thiserror::Error)]
pub enum WholeError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    /// A theorem-backed root bracket failed; indicates a defect, not bad input.
    #[error("internal root-finding defect: {0}")]
    Root(#[from] RootError),
}

impl From<crate::term_life::TermError> for WholeError {
    fn from(e: crate::term_life::TermError) -> Self {
        match e {
            crate::term_life::TermError::Param(p) => WholeError::Param(p),
            crate::term_life::TermError::Domain(d) => WholeError::Domain(d),
            crate::term_life::TermError::Root(r) => WholeError::Root(r),
        }
    }
}

/// Which optimal-action region a state `(w, D)` belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionLabel {
    /// Benefit already covers the goal; never buy more.
    R0,
    /// Wait for wealth to fall to `b - D`, then track the line `W + D = b`.
    Ra,
    /// Wait for wealth to grow to `hb/(r+h)`, then jump onto the line.
    RbWait,
    /// Immediately buy `b - (w + D)` and track the line downward.
    RbJump,
    /// Wealth at the safe level; the goal is certain.
    Safe,
}

/// Optimal action for a whole-life state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "action")]
pub enum WlAction {
    /// Hold the current benefit forever.
    NoMoreInsurance,
    /// Buy nothing until wealth falls to `b - D`, then buy continuously to
    /// stay on the line `W + D = b`.
    WaitThenTrack,
    /// Buy nothing until wealth reaches the safe level `hb/(r+h)`, then
    /// buy `rb/(r+h) - D` at once.
    Wait,
    /// Immediately buy `amount = b - (w + D)` and track the line downward.
    JumpToFullThenTrack {
        /// Additional benefit purchased now.
        amount: f64,
    },
}

fn check_state(state: &WealthState) -> Result<(), WholeError> {
    WealthState::new(state.w, state.d)?;
    Ok(())
}

/// Wealth level from which the goal is reached with certainty while holding
/// benefit `D`: `max(hb/(r+h), hD/r)`. Requires `r > 0` (with no interest
/// income, premiums on any positive benefit eventually exhaust wealth).
pub fn safe_level_whole(params: &ModelParams, d: f64) -> Result<f64, WholeError> {
    params.require_positive_rate("whole-life safe level")?;
    let h = params.continuous_premium_rate()?;
    if !(d.is_finite() && d >= 0.0) {
        return Err(DomainError::Benefit(d).into());
    }
    Ok((h * params.b / (params.r + h)).max(h * d / params.r))
}

/// Benefit level below which waiting beats jumping, as a function of wealth.
///
/// Defined for `0 <= w <= hb/(r+h)`. Negative values (possible below the
/// term-life critical wealth when `lambda > r`) mean the jump is optimal
/// for every benefit `D >= 0`. The removable singularity at the safe level
/// is patched with its continuity value `rb/(r+h)`.
pub fn jump_boundary(params: &ModelParams, w: f64) -> Result<f64, WholeError> {
    params.require_positive_rate("whole-life jump boundary")?;
    let h = params.continuous_premium_rate()?;
    let (b, r, lambda) = (params.b, params.r, params.lambda);
    let safe = h * b / (r + h);
    if !(w.is_finite() && (0.0..=safe).contains(&w)) {
        return Err(DomainError::WealthRange { w, lo: 0.0, hi: safe }.into());
    }
    // Evaluate as (r/h) * (safe - eps/s) with eps = safe - w and
    // s = 1 - f_j, where f_j = (1 - ratio^{lambda/(r+h)})^{r/lambda}.
    // The subtraction safe - w is exact near the safe level, and s is
    // computed through ln_1p/exp_m1 so it keeps full relative precision
    // as it vanishes there; the direct form (w - safe f_j)/(1 - f_j)
    // loses most of its digits in that corner. The clamps absorb the
    // one-ulp excursions of the ratio past [0, 1] at the domain ends.
    let eps = safe - w;
    let ratio = ((r + h) * eps / (h * b)).max(0.0);
    let y = ratio.powf(lambda / (r + h)).min(1.0);
    let s = -f64::exp_m1((r / lambda) * f64::ln_1p(-y));
    if s <= 0.0 {
        // Removable singularity at the safe level: continuity value.
        return Ok(r * b / (r + h));
    }
    Ok((r / h) * (safe - eps / s))
}

/// Benefit level at which an immediate jump to the line `W + D = b` stops
/// improving on never buying; a diagnostic companion to [`jump_boundary`]
/// (it stays at or below it, and at or below zero wherever the jump region
/// covers every benefit level).
pub fn buy_trigger_d0(params: &ModelParams, w: f64) -> Result<f64, WholeError> {
    params.require_positive_rate("whole-life buy trigger")?;
    let h = params.continuous_premium_rate()?;
    let (b, r, lambda) = (params.b, params.r, params.lambda);
    let safe = h * b / (r + h);
    if !(w.is_finite() && (0.0..=safe).contains(&w)) {
        return Err(DomainError::WealthRange { w, lo: 0.0, hi: safe }.into());
    }
    // Clamp: at w = safe the numerator can round one ulp negative, and the
    // exponent is always in (0, 1) since h >= lambda, so 0^exp = 0 gives
    // the exact endpoint value (b - safe), the goal kink.
    let ratio = ((h * b - (r + h) * w) / (h * b)).max(0.0);
    Ok((b - w) - b * ratio.powf(1.0 - lambda / (r + h)))
}

/// Classifies an admissible state. Errors when `w` exceeds the safe level;
/// [`phi_whole`] and [`expected_bequest_whole`] stay total there instead.
pub fn classify_region(params: &ModelParams, state: &WealthState) -> Result<RegionLabel, WholeError> {
    check_state(state)?;
    let safe = safe_level_whole(params, state.d)?;
    if state.w > safe {
        return Err(DomainError::AboveSafeLevel { w: state.w, safe }.into());
    }
    if state.w == safe {
        return Ok(RegionLabel::Safe);
    }
    classify_below_safe(params, state)
}

/// Classification for states strictly below the safe level.
fn classify_below_safe(params: &ModelParams, state: &WealthState) -> Result<RegionLabel, WholeError> {
    let h = params.continuous_premium_rate()?;
    let (b, r) = (params.b, params.r);
    let (w, d) = (state.w, state.d);
    if d >= b {
        return Ok(RegionLabel::R0);
    }
    if d > r * b / (r + h) && w >= b - d {
        return Ok(RegionLabel::Ra);
    }
    // Remaining states satisfy w < hb/(r+h), where the jump boundary is
    // defined. Ties D = D_j(w) go to the wait region.
    let dj = jump_boundary(params, w)?;
    let wait_allowed = match solve_term(params)?.w_star {
        Some(ws) => w >= ws,
        None => true,
    };
    if wait_allowed && d <= dj.max(0.0) {
        Ok(RegionLabel::RbWait)
    } else {
        Ok(RegionLabel::RbJump)
    }
}

/// Probability of reaching the bequest goal from `(w, D)` under the optimal
/// purchasing strategy. Total in `w`: states at or beyond the safe level
/// return 1.
pub fn phi_whole(params: &ModelParams, state: &WealthState) -> Result<f64, WholeError> {
    check_state(state)?;
    let safe = safe_level_whole(params, state.d)?;
    if state.w >= safe {
        return Ok(1.0);
    }
    let h = params.continuous_premium_rate()?;
    let (b, r, lambda) = (params.b, params.r, params.lambda);
    let (w, d) = (state.w, state.d);
    match classify_below_safe(params, state)? {
        RegionLabel::R0 => {
            // Never buy; wealth declines, ruin at tau0. Success = die first.
            Ok(1.0 - ((h * d - r * w) / (h * d)).powf(lambda / r))
        }
        RegionLabel::Ra => {
            // Decline to b-D, then track the line down to ruin.
            let tau1 = ((h * d - r * (b - d)) / (h * d - r * w)).ln() / r;
            // For d just above the kink the denominator can round negative;
            // clamping to zero yields the correct infinite line time.
            let tau_line =
                ((h * b) / (h * b - (r + h) * (b - d)).max(0.0)).ln() / (r + h);
            Ok(1.0 - (-lambda * (tau1 + tau_line)).exp())
        }
        RegionLabel::RbWait => {
            // Grow to the safe level, then jump onto the line's stationary
            // point. Success = survive the wait.
            Ok(((r * w - h * d) / (h * (r * b / (r + h) - d))).powf(lambda / r))
        }
        RegionLabel::RbJump => {
            // Jump onto the line now; identical to full term coverage.
            Ok(1.0 - ((h * b - (r + h) * w) / (h * b)).powf(lambda / (r + h)))
        }
        RegionLabel::Safe => unreachable!("safe level handled above"),
    }
}

/// Optimal action at `(w, D)`. States beyond the safe level follow the same
/// convention as the safe level itself: buy the goal shortfall, if any, at
/// once.
pub fn optimal_action_whole(params: &ModelParams, state: &WealthState) -> Result<WlAction, WholeError> {
    check_state(state)?;
    let safe = safe_level_whole(params, state.d)?;
    let (w, d) = (state.w, state.d);
    if w >= safe {
        let shortfall = params.b - (w + d);
        return Ok(if shortfall > 0.0 {
            WlAction::JumpToFullThenTrack { amount: shortfall }
        } else {
            WlAction::NoMoreInsurance
        });
    }
    Ok(match classify_below_safe(params, state)? {
        RegionLabel::R0 => WlAction::NoMoreInsurance,
        RegionLabel::Ra => WlAction::WaitThenTrack,
        RegionLabel::RbWait => WlAction::Wait,
        RegionLabel::RbJump => WlAction::JumpToFullThenTrack { amount: params.b - (w + d) },
        RegionLabel::Safe => unreachable!("safe level handled above"),
    })
}

/// Expected value of `lambda e^{-lambda t} (A + B e^{rt})` integrated over
/// `[0, T]`: the mean bequest contribution of a wealth flow `A + B e^{rt}`
/// over an exponential death time truncated at `T`.
fn flow_bequest(lambda: f64, r: f64, a: f64, b_coef: f64, t: f64) -> f64 {
    let base = a * (1.0 - (-lambda * t).exp());
    let drift = if lambda == r {
        b_coef * lambda * t
    } else {
        b_coef * (lambda / (lambda - r)) * (1.0 - ((r - lambda) * t).exp())
    };
    base + drift
}

/// Expected bequest at death under the optimal strategy.
///
/// On the line `W + D = b` the bequest is exactly `b` on death and 0 on
/// lapse; off the line it is `W(t) + D`. States at the safe level pay `b`
/// when `D` is at or below the kink `rb/(r+h)` and `D + hD/r` above it
/// (wealth sits still at `hD/r` forever); states beyond the safe level
/// return `max(b, w + D)` by convention.
pub fn expected_bequest_whole(params: &ModelParams, state: &WealthState) -> Result<f64, WholeError> {
    check_state(state)?;
    let safe = safe_level_whole(params, state.d)?;
    let h = params.continuous_premium_rate()?;
    let (b, r, lambda) = (params.b, params.r, params.lambda);
    let (w, d) = (state.w, state.d);
    if w > safe {
        return Ok(b.max(w + d));
    }
    if w == safe {
        return Ok(if d <= r * b / (r + h) { b } else { d + h * d / r });
    }
    match classify_below_safe(params, state)? {
        RegionLabel::R0 => {
            // Bequest D + W(t) until ruin at tau0; nothing after.
            let tau0 = ((h * d) / (h * d - r * w)).ln() / r;
            Ok(flow_bequest(lambda, r, d + h * d / r, w - h * d / r, tau0))
        }
        RegionLabel::Ra => {
            // Bequest D + W(t) while declining to b-D, then exactly b while
            // on the line, then 0 after lapse.
            let tau1 = ((h * d - r * (b - d)) / (h * d - r * w)).ln() / r;
            // For d just above the kink the denominator can round negative;
            // clamping to zero yields the correct infinite line time.
            let tau_line =
                ((h * b) / (h * b - (r + h) * (b - d)).max(0.0)).ln() / (r + h);
            let on_line = (-lambda * tau1).exp() * b * (1.0 - (-lambda * tau_line).exp());
            Ok(flow_bequest(lambda, r, d + h * d / r, w - h * d / r, tau1) + on_line)
        }
        RegionLabel::RbWait => {
            // Bequest D + W(t) while growing to the safe level; exactly b
            // once parked on the line's stationary point.
            let tau_s = ((h * (r * b / (r + h) - d)) / (r * w - h * d)).ln() / r;
            Ok(flow_bequest(lambda, r, d + h * d / r, w - h * d / r, tau_s)
                + (-lambda * tau_s).exp() * b)
        }
        RegionLabel::RbJump => Ok(b * phi_whole(params, state)?),
        RegionLabel::Safe => unreachable!("safe level handled above"),
    }
}
