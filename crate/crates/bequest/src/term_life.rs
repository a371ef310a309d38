//! Instantaneous term life insurance funded by a continuously paid premium.
//!
//! Coverage `D` may be adjusted at every instant and costs premium at rate
//! `h * D`, where `h = (1 + theta_bar) * lambda` is the continuous premium
//! rate. Wealth earns interest `r` between adjustments. The buyer maximizes
//! the probability that wealth plus death benefit reaches the goal `b` at
//! death.
//!
//! The solution splits along the sign of `lambda - r`:
//!
//! * `lambda <= r`: never buy coverage; wait for wealth to compound to the
//!   safe level `hb/(r+h)`, from which the goal is certain. The success
//!   probability is `(w / safe_level)^(lambda/r)`.
//! * `lambda > r`: below a critical wealth `w_star` it is optimal to hold
//!   full gap coverage `D = b - w` (bequest pinned at `b` until wealth is
//!   exhausted); at or above `w_star` it is optimal to wait. `w_star`
//!   equals `safe_level * x_star` where `x_star` is the interior zero of
//!   `x^(lambda/r) + (1 - x)^(lambda/(r+h)) - 1`.
//! * `r = 0` is the limit where the wait region vanishes: `w_star = b` and
//!   the success probability is the full-coverage branch
//!   `1 - ((b - w)/b)^(lambda/h)`.

use serde::Serialize;

use crate::model::{DomainError, ModelParams, ParamError};
use crate::numerics::{x_star, RootError};

/// Error surfaced by term-life operations.
#[derive(Debug, thiserror::Error)]
pub enum TermError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    /// A theorem-backed root bracket failed; indicates a defect, not bad input.
    #[error("internal root-finding defect: {0}")]
    Root(#[from] RootError),
}

/// Which side of `lambda = r` the parameters fall on.
///
/// At `lambda <= r` waiting dominates and no critical wealth exists; at
/// `lambda > r` a full-coverage region appears below [`TermSolution::w_star`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TermRegime {
    /// `lambda <= r`: never buy; no critical wealth.
    LambdaLeR,
    /// `lambda > r`: full gap coverage below `w_star`, wait above.
    LambdaGtR,
}

/// Solved structure of the term-life problem for one parameter set.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TermSolution {
    /// Safe level `hb/(r+h)`: wealth from which waiting reaches the goal
    /// with certainty.
    pub safe_level: f64,
    /// Critical wealth separating full coverage (below) from waiting
    /// (at/above). Present iff the regime is `LambdaGtR`; equals
    /// `safe_level` (which equals `b`) in the `r = 0` limit.
    pub w_star: Option<f64>,
    /// Parameter regime.
    pub regime: TermRegime,
}

/// Axis along which [`w_star_sensitivities`] varies the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepAxis {
    /// Vary the force of mortality `lambda`.
    Lambda,
    /// Vary the interest rate `r`.
    R,
    /// Vary the continuous premium rate `h` (by adjusting `theta_bar`).
    H,
    /// Vary the bequest goal `b`.
    B,
}

/// One row of a critical-wealth sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WStarPoint {
    /// Value taken by the swept parameter.
    pub axis_value: f64,
    /// Critical wealth, absent when the row's regime has none.
    pub w_star: Option<f64>,
    /// Safe level for the row's parameters.
    pub safe_level: f64,
    /// Regime for the row's parameters.
    pub regime: TermRegime,
}

/// Solves for the safe level, regime, and critical wealth.
pub fn solve_term(params: &ModelParams) -> Result<TermSolution, TermError> {
    let h = params.continuous_premium_rate()?;
    let b = params.b;
    let r = params.r;
    let lambda = params.lambda;
    let safe_level = h * b / (r + h);
    if lambda <= r {
        return Ok(TermSolution {
            safe_level,
            w_star: None,
            regime: TermRegime::LambdaLeR,
        });
    }
    if r == 0.0 {
        // Wait region empty: the critical wealth coincides with the safe
        // level, which is b because waiting earns nothing.
        return Ok(TermSolution {
            safe_level,
            w_star: Some(safe_level),
            regime: TermRegime::LambdaGtR,
        });
    }
    let xs = x_star(lambda / r, lambda / (r + h))?;
    Ok(TermSolution {
        safe_level,
        w_star: Some(safe_level * xs),
        regime: TermRegime::LambdaGtR,
    })
}

/// Probability of reaching the bequest goal from wealth `w` under the
/// optimal coverage policy. Wealth at or above the safe level yields 1.
pub fn phi_term(params: &ModelParams, w: f64) -> Result<f64, TermError> {
    if !(w.is_finite() && w >= 0.0) {
        return Err(DomainError::Wealth(w).into());
    }
    let sol = solve_term(params)?;
    let h = params.continuous_premium_rate()?;
    let (b, r, lambda) = (params.b, params.r, params.lambda);
    if w >= sol.safe_level {
        return Ok(1.0);
    }
    if r == 0.0 {
        return Ok(1.0 - ((b - w) / b).powf(lambda / h));
    }
    let covered = match sol.w_star {
        Some(ws) => w < ws,
        None => false,
    };
    if covered {
        // Full gap coverage: ruin races death.
        Ok(1.0 - ((h * b - (r + h) * w) / (h * b)).powf(lambda / (r + h)))
    } else {
        // Wait: compounding races death.
        Ok((w / sol.safe_level).powf(lambda / r))
    }
}

/// Optimal coverage at wealth `w`: the full gap `b - w` below the critical
/// wealth, zero at or above it (and zero everywhere when `lambda <= r`).
pub fn optimal_coverage_term(params: &ModelParams, w: f64) -> Result<f64, TermError> {
    if !(w.is_finite() && w >= 0.0) {
        return Err(DomainError::Wealth(w).into());
    }
    let sol = solve_term(params)?;
    if w >= sol.safe_level {
        return Ok(0.0);
    }
    match sol.w_star {
        // Ties break toward not buying: coverage is zero at w_star exactly.
        Some(ws) if w < ws => Ok(params.b - w),
        _ => Ok(0.0),
    }
}

/// Expected bequest at death under the optimal coverage policy.
///
/// In the full-coverage region the bequest is the goal `b` on success and 0
/// on ruin, so the expectation is `b` times the success probability. In the
/// wait region the bequest is the wealth at death, averaged against the
/// exponential death time. Requires `r > 0`.
pub fn expected_bequest_term(params: &ModelParams, w: f64) -> Result<f64, TermError> {
    if !(w.is_finite() && w >= 0.0) {
        return Err(DomainError::Wealth(w).into());
    }
    params.require_positive_rate("expected bequest for term coverage")?;
    let sol = solve_term(params)?;
    let h = params.continuous_premium_rate()?;
    let (b, r, lambda) = (params.b, params.r, params.lambda);
    if w >= sol.safe_level {
        return Ok(b);
    }
    let covered = match sol.w_star {
        Some(ws) => w < ws,
        None => false,
    };
    if covered {
        return Ok(b * phi_term(params, w)?);
    }
    if w == 0.0 {
        return Ok(0.0);
    }
    if lambda == r {
        Ok(w * ((r + h) / h + (sol.safe_level / w).ln()))
    } else {
        let x = w / sol.safe_level;
        Ok(b * (1.0 - (h / (r + h)) * (lambda / (lambda - r))) * x.powf(lambda / r)
            + lambda * w / (lambda - r))
    }
}

/// Characteristic hitting times from wealth `w` in `[0, safe_level]`.
///
/// Returns `(tau_zero, tau_safe)`:
///
/// * `tau_zero` — time for wealth to reach 0 while holding full gap
///   coverage; absent at the safe level, where premiums exactly offset
///   interest and wealth never falls.
/// * `tau_safe` — time for wealth to compound to the safe level while
///   holding no coverage; absent at `w = 0` or when `r = 0` (wealth never
///   grows), except that it is 0 at the safe level itself.
///
/// Both are reported regardless of which action is optimal at `w`, so the
/// identity `e^(-lambda tau_zero) + e^(-lambda tau_safe) = 1` can be checked
/// at the critical wealth.
pub fn hitting_times_term(
    params: &ModelParams,
    w: f64,
) -> Result<(Option<f64>, Option<f64>), TermError> {
    let sol = solve_term(params)?;
    if !(w.is_finite() && w >= 0.0) {
        return Err(DomainError::Wealth(w).into());
    }
    if w > sol.safe_level {
        return Err(DomainError::AboveSafeLevel {
            w,
            safe: sol.safe_level,
        }
        .into());
    }
    let h = params.continuous_premium_rate()?;
    let (b, r) = (params.b, params.r);
    let tau_zero = if w < sol.safe_level {
        Some(((h * b) / (h * b - (r + h) * w)).ln() / (r + h))
    } else {
        None
    };
    let tau_safe = if w == sol.safe_level {
        Some(0.0)
    } else if w > 0.0 && r > 0.0 {
        Some((sol.safe_level / w).ln() / r)
    } else {
        None
    };
    Ok((tau_zero, tau_safe))
}

/// Evaluates the critical wealth across a sweep of one parameter.
///
/// Rows whose parameters fall in the `LambdaLeR` regime report no critical
/// wealth rather than failing. For ascending sweep values, the known
/// monotonicity facts are asserted in debug builds: `w_star` increases in
/// `lambda` and `b` and decreases in `r` (no general direction in `h`).
pub fn w_star_sensitivities(
    params: &ModelParams,
    axis: SweepAxis,
    values: &[f64],
) -> Result<Vec<WStarPoint>, TermError> {
    let mut rows = Vec::with_capacity(values.len());
    for &v in values {
        let p = match axis {
            SweepAxis::Lambda => ModelParams::new(
                params.b,
                params.r,
                v,
                params.theta,
                params.theta_bar,
                params.rho,
            )?,
            SweepAxis::R => ModelParams::new(
                params.b,
                v,
                params.lambda,
                params.theta,
                params.theta_bar,
                params.rho,
            )?,
            SweepAxis::H => {
                // Target premium rate v = (1 + theta_bar) * lambda.
                if v < params.lambda {
                    return Err(ParamError::Loading {
                        name: "theta_bar",
                        value: v / params.lambda - 1.0,
                    }
                    .into());
                }
                ModelParams::new(
                    params.b,
                    params.r,
                    params.lambda,
                    params.theta,
                    v / params.lambda - 1.0,
                    params.rho,
                )?
            }
            SweepAxis::B => ModelParams::new(
                v,
                params.r,
                params.lambda,
                params.theta,
                params.theta_bar,
                params.rho,
            )?,
        };
        let sol = solve_term(&p)?;
        rows.push(WStarPoint {
            axis_value: v,
            w_star: sol.w_star,
            safe_level: sol.safe_level,
            regime: sol.regime,
        });
    }
    let ascending = values.windows(2).all(|p| p[0] <= p[1]);
    if ascending {
        for pair in rows.windows(2) {
            if let (Some(a), Some(c)) = (pair[0].w_star, pair[1].w_star) {
                match axis {
                    SweepAxis::Lambda | SweepAxis::B => {
                        debug_assert!(a <= c + 1e-12, "w_star must not decrease along {axis:?}")
                    }
                    SweepAxis::R => {
                        debug_assert!(a + 1e-12 >= c, "w_star must not increase along r")
                    }
                    SweepAxis::H => {}
                }
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn base() -> ModelParams {
        // b=1, r=0.03, lambda=0.08, theta_bar=0.25 => h=0.10.
        ModelParams::new(1.0, 0.03, 0.08, 0.25, 0.25, 1.0).unwrap()
    }

    #[test]
    fn solve_matches_reference_values() {
        let sol = solve_term(&base()).unwrap();
        assert_eq!(sol.regime, TermRegime::LambdaGtR);
        assert_abs_diff_eq!(sol.safe_level, 0.7692307692307693, epsilon = 1e-15);
        assert_abs_diff_eq!(sol.w_star.unwrap(), 0.6948942040116133, epsilon = 1e-11);

        // lambda <= r: no critical wealth.
        let p = ModelParams::new(1.0, 0.06, 0.05, 0.25, 0.4, 1.0).unwrap();
        let sol = solve_term(&p).unwrap();
        assert_eq!(sol.regime, TermRegime::LambdaLeR);
        assert!(sol.w_star.is_none());

        // r = 0 limit: critical wealth collapses onto the safe level b.
        let p = ModelParams::new(1.0, 0.0, 0.08, 0.25, 0.25, 1.0).unwrap();
        let sol = solve_term(&p).unwrap();
        assert_eq!(sol.w_star.unwrap(), 1.0);
        assert_eq!(sol.safe_level, 1.0);
    }

    #[test]
    fn success_probability_branches() {
        let p = base();
        // Full-coverage branch below w_star.
        assert_abs_diff_eq!(
            phi_term(&p, 0.4).unwrap(),
            0.36343792391857964,
            epsilon = 1e-14
        );
        // Wait branch above w_star.
        assert_abs_diff_eq!(
            phi_term(&p, 0.75).unwrap(),
            0.9347144899895148,
            epsilon = 1e-14
        );
        assert_eq!(phi_term(&p, 0.0).unwrap(), 0.0);
        assert_eq!(phi_term(&p, 0.7692307692307693).unwrap(), 1.0);
        assert_eq!(phi_term(&p, 2.0).unwrap(), 1.0);

        // Branches agree at the critical wealth (its defining equation).
        let ws = solve_term(&p).unwrap().w_star.unwrap();
        let h = 0.10;
        let jump = 1.0 - ((h - 0.13 * ws) / h).powf(0.08 / 0.13);
        let wait = (0.13 * ws / h).powf(0.08 / 0.03);
        assert_abs_diff_eq!(jump, wait, epsilon = 1e-9);
        assert_abs_diff_eq!(phi_term(&p, ws).unwrap(), wait, epsilon = 1e-12);

        // lambda = r: exponent lambda/r = 1, linear in w.
        let p = ModelParams::new(1.0, 0.05, 0.05, 0.25, 0.25, 1.0).unwrap();
        assert_abs_diff_eq!(phi_term(&p, 0.3).unwrap(), 0.54, epsilon = 1e-15);

        // lambda < r.
        let p = ModelParams::new(1.0, 0.06, 0.05, 0.25, 0.4, 1.0).unwrap();
        assert_abs_diff_eq!(
            phi_term(&p, 0.3).unwrap(),
            0.6141938627655229,
            epsilon = 1e-14
        );

        // r = 0 limit.
        let p = ModelParams::new(1.0, 0.0, 0.08, 0.25, 0.25, 1.0).unwrap();
        assert_abs_diff_eq!(
            phi_term(&p, 0.4).unwrap(),
            0.335460194051026,
            epsilon = 1e-14
        );
    }

    #[test]
    fn coverage_tracks_the_gap_below_critical_wealth() {
        let p = base();
        assert_abs_diff_eq!(optimal_coverage_term(&p, 0.4).unwrap(), 0.6, epsilon = 0.0);
        assert_eq!(optimal_coverage_term(&p, 0.75).unwrap(), 0.0);
        let ws = solve_term(&p).unwrap().w_star.unwrap();
        assert_eq!(optimal_coverage_term(&p, ws).unwrap(), 0.0);
        // lambda <= r: never buy.
        let p = ModelParams::new(1.0, 0.06, 0.05, 0.25, 0.4, 1.0).unwrap();
        assert_eq!(optimal_coverage_term(&p, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn expected_bequest_matches_reference_values() {
        let p = base();
        // Full-coverage region: bequest is b on success, 0 on ruin.
        assert_abs_diff_eq!(
            expected_bequest_term(&p, 0.4).unwrap(),
            0.36343792391857964,
            epsilon = 1e-14
        );
        // Wait region.
        assert_abs_diff_eq!(
            expected_bequest_term(&p, 0.75).unwrap(),
            0.9842966561562658,
            epsilon = 1e-13
        );
        assert_eq!(expected_bequest_term(&p, 0.7692307692307693).unwrap(), 1.0);

        // Upward jump at the critical wealth: waiting preserves wealth on
        // the failure event, full coverage forfeits it.
        let ws = solve_term(&p).unwrap().w_star.unwrap();
        let below = expected_bequest_term(&p, ws - 1e-9).unwrap();
        let at = expected_bequest_term(&p, ws).unwrap();
        assert!(at > below + 1e-3);

        // lambda = r.
        let p = ModelParams::new(1.0, 0.05, 0.05, 0.25, 0.25, 1.0).unwrap();
        assert_abs_diff_eq!(
            expected_bequest_term(&p, 0.3).unwrap(),
            0.7248558418271451,
            epsilon = 1e-14
        );

        // lambda < r.
        let p = ModelParams::new(1.0, 0.06, 0.05, 0.25, 0.4, 1.0).unwrap();
        assert_abs_diff_eq!(
            expected_bequest_term(&p, 0.3).unwrap(),
            0.7677927240573155,
            epsilon = 1e-14
        );

        // r = 0 is rejected.
        let p = ModelParams::new(1.0, 0.0, 0.08, 0.25, 0.25, 1.0).unwrap();
        assert!(matches!(
            expected_bequest_term(&p, 0.4),
            Err(TermError::Param(ParamError::ZeroInterestRate { .. }))
        ));
    }

    #[test]
    fn hitting_times_and_identity_at_critical_wealth() {
        let p = base();
        let (tau0, tau_safe) = hitting_times_term(&p, 0.4).unwrap();
        assert_abs_diff_eq!(tau0.unwrap(), 5.645916731386157, epsilon = 1e-12);
        // Ruin-time consistency: survival of the covered strategy equals
        // the success probability.
        assert_abs_diff_eq!(
            (-0.08 * tau0.unwrap()).exp(),
            1.0 - phi_term(&p, 0.4).unwrap(),
            epsilon = 1e-12
        );
        assert!(tau_safe.is_some());

        let (_, tau_safe) = hitting_times_term(&p, 0.75).unwrap();
        assert_abs_diff_eq!(tau_safe.unwrap(), 0.8439269328096625, epsilon = 1e-12);

        // Boundary conventions.
        let (t0, ts) = hitting_times_term(&p, 0.0).unwrap();
        assert_eq!(t0.unwrap(), 0.0);
        assert!(ts.is_none());
        let (t0, ts) = hitting_times_term(&p, 0.7692307692307693).unwrap();
        assert!(t0.is_none());
        assert_eq!(ts.unwrap(), 0.0);

        // At the critical wealth the two race probabilities sum to one.
        let ws = solve_term(&p).unwrap().w_star.unwrap();
        let (t0, ts) = hitting_times_term(&p, ws).unwrap();
        let total = (-0.08 * t0.unwrap()).exp() + (-0.08 * ts.unwrap()).exp();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn sweeps_match_reference_tables() {
        let p = base();
        let lam = w_star_sensitivities(&p, SweepAxis::Lambda, &[0.04, 0.05, 0.06, 0.08]).unwrap();
        let expect = [
            0.08726798852388317,
            0.3322902147444125,
            0.5118276450528304,
            0.6948942040116133,
        ];
        for (row, e) in lam.iter().zip(expect) {
            assert_abs_diff_eq!(row.w_star.unwrap(), e, epsilon = 1e-11);
        }

        let r = w_star_sensitivities(
            &p,
            SweepAxis::R,
            &[0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07],
        )
        .unwrap();
        let expect = [
            1.0,
            0.9086442094040662,
            0.8192848080689256,
            0.6948942040116133,
            0.5118276450528304,
            0.28637666977574153,
            0.08726798852388317,
            0.0030352816595147236,
        ];
        for (row, e) in r.iter().zip(expect) {
            assert_abs_diff_eq!(row.w_star.unwrap(), e, epsilon = 1e-11);
        }

        // Premium-rate sweep at lambda = 0.12 is non-monotone.
        let p12 = ModelParams::new(1.0, 0.03, 0.12, 0.25, 0.25, 1.0).unwrap();
        let h = w_star_sensitivities(&p12, SweepAxis::H, &[0.12, 0.15, 0.20, 0.25]).unwrap();
        let expect = [
            0.7992129637802413,
            0.8192848080689256,
            0.8101303495930867,
            0.7838019804447594,
        ];
        for (row, e) in h.iter().zip(expect) {
            assert_abs_diff_eq!(row.w_star.unwrap(), e, epsilon = 1e-11);
        }
        assert!(h[1].w_star.unwrap() > h[0].w_star.unwrap());
        assert!(h[2].w_star.unwrap() < h[1].w_star.unwrap());

        // Goal sweep: proportional scaling.
        let b = w_star_sensitivities(&p, SweepAxis::B, &[0.5, 1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(
            b[0].w_star.unwrap() * 4.0,
            b[2].w_star.unwrap() * 1.0,
            epsilon = 1e-11
        );
        assert_abs_diff_eq!(
            b[2].w_star.unwrap(),
            2.0 * b[1].w_star.unwrap(),
            epsilon = 1e-11
        );

        // Sweeping r across lambda reports a regime change, not an error.
        let cross = w_star_sensitivities(&p, SweepAxis::R, &[0.07, 0.08, 0.09]).unwrap();
        assert!(cross[0].w_star.is_some());
        assert_eq!(cross[1].regime, TermRegime::LambdaLeR);
        assert!(cross[2].w_star.is_none());
    }
}
