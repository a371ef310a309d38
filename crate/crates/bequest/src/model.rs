//! Model parameters and wealth state shared by every product.
//!
//! The individual earns the riskless rate `r` on wealth, dies at an
//! exponential time with force of mortality `lambda`, and wants wealth plus
//! death benefit to reach the bequest goal `b` at death. Insurers load the
//! actuarially fair price by `theta` (single premium) or `theta_bar`
//! (continuous premium), and single-premium policies may refund cash value
//! subject to a proportional surrender charge `rho`.
//!
//! Premium scales derived from the loadings:
//!
//! ```text
//! H = (1 + theta) * lambda / (r + lambda)   per dollar of benefit, paid once
//! h = (1 + theta_bar) * lambda              per dollar of benefit, per year
//! ```
//!
//! A single-premium contract is only worth analyzing when `H < 1`; at `H >= 1`
//! a dollar of coverage costs at least a dollar and self-insurance dominates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Violation of a parameter invariant. Each variant names the offending field.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("bequest goal b must be positive and finite, got {0}")]
    BequestGoal(f64),
    #[error("interest rate r must be nonnegative and finite, got {0}")]
    InterestRate(f64),
    #[error("force of mortality lambda must be positive and finite, got {0}")]
    Mortality(f64),
    #[error("premium loading {name} must be nonnegative and finite, got {value}")]
    Loading { name: &'static str, value: f64 },
    #[error("surrender charge rho must lie in [0, 1], got {0}")]
    SurrenderCharge(f64),
    #[error("single premium H = {h} per dollar of benefit is not below 1; no purchase can ever help")]
    PremiumNotBelowOne { h: f64 },
    #[error("operation requires r > 0: {context}")]
    ZeroInterestRate { context: &'static str },
}

/// State outside the region where a requested quantity is defined.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("wealth must be nonnegative and finite, got {0}")]
    Wealth(f64),
    #[error("death benefit must be nonnegative and finite, got {0}")]
    Benefit(f64),
    #[error("benefit {d} already meets the goal {b}; quantity undefined there")]
    GoalAlreadyMet { d: f64, b: f64 },
    #[error("wealth {w} exceeds the safe level {safe}; the goal is already reachable with certainty")]
    AboveSafeLevel { w: f64, safe: f64 },
    #[error("wealth {w} outside admissible range [{lo}, {hi}]")]
    WealthRange { w: f64, lo: f64, hi: f64 },
}

/// Market and contract parameters. Immutable once validated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    /// Bequest goal the individual wants wealth plus benefit to reach at death.
    pub b: f64,
    /// Riskless interest rate earned on wealth.
    pub r: f64,
    /// Force of mortality; lifetime is exponential with this rate.
    pub lambda: f64,
    /// Proportional loading on the single-premium price.
    pub theta: f64,
    /// Proportional loading on the continuous premium rate.
    pub theta_bar: f64,
    /// Fraction of cash value kept by the insurer on surrender.
    pub rho: f64,
}

/// Raw JSON shape: `theta_bar` defaults to `theta`, `rho` defaults to 1
/// (full surrender charge, i.e. no cash value).
#[derive(Deserialize)]
struct RawParams {
    b: f64,
    r: f64,
    lambda: f64,
    theta: f64,
    theta_bar: Option<f64>,
    rho: Option<f64>,
}

impl<'de> Deserialize<'de> for ModelParams {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawParams::deserialize(deserializer)?;
        ModelParams::new(
            raw.b,
            raw.r,
            raw.lambda,
            raw.theta,
            raw.theta_bar.unwrap_or(raw.theta),
            raw.rho.unwrap_or(1.0),
        )
        .map_err(serde::de::Error::custom)
    }
}

impl ModelParams {
    /// Validates and constructs a parameter set.
    pub fn new(
        b: f64,
        r: f64,
        lambda: f64,
        theta: f64,
        theta_bar: f64,
        rho: f64,
    ) -> Result<Self, ParamError> {
        let params = ModelParams { b, r, lambda, theta, theta_bar, rho };
        params.validate()?;
        Ok(params)
    }

    /// Checks every invariant, reporting the first violation.
    ///
    /// `r = 0` passes validation (the continuous-premium products have a
    /// well-defined limit there); operations that need `r > 0` reject it
    /// themselves via [`ModelParams::require_positive_rate`].
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.b.is_finite() && self.b > 0.0) {
            return Err(ParamError::BequestGoal(self.b));
        }
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(ParamError::InterestRate(self.r));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(ParamError::Mortality(self.lambda));
        }
        if !(self.theta.is_finite() && self.theta >= 0.0) {
            return Err(ParamError::Loading { name: "theta", value: self.theta });
        }
        if !(self.theta_bar.is_finite() && self.theta_bar >= 0.0) {
            return Err(ParamError::Loading { name: "theta_bar", value: self.theta_bar });
        }
        if !(self.rho.is_finite() && (0.0..=1.0).contains(&self.rho)) {
            return Err(ParamError::SurrenderCharge(self.rho));
        }
        Ok(())
    }

    /// Errors unless `r > 0`. Single-premium formulas and safe levels divide
    /// by `r`, so those operations call this first.
    pub fn require_positive_rate(&self, context: &'static str) -> Result<(), ParamError> {
        if self.r > 0.0 {
            Ok(())
        } else {
            Err(ParamError::ZeroInterestRate { context })
        }
    }

    fn single_premium_rate_unchecked(&self) -> f64 {
        (1.0 + self.theta) * self.lambda / (self.r + self.lambda)
    }

    /// Single premium `H` per dollar of death benefit.
    ///
    /// Fails when `H >= 1` — nobody pays a dollar or more for a dollar of
    /// benefit — or when `r = 0`, where `H = 1 + theta >= 1` identically.
    /// The bound is checked here rather than in [`ModelParams::validate`]
    /// because products priced by the continuous rate `h` remain meaningful
    /// when `H >= 1`.
    pub fn single_premium_rate(&self) -> Result<f64, ParamError> {
        self.validate()?;
        self.require_positive_rate("single premium H")?;
        let h = self.single_premium_rate_unchecked();
        if h >= 1.0 {
            return Err(ParamError::PremiumNotBelowOne { h });
        }
        Ok(h)
    }

    /// Continuous premium rate `h` per dollar of benefit per year.
    pub fn continuous_premium_rate(&self) -> Result<f64, ParamError> {
        self.validate()?;
        Ok((1.0 + self.theta_bar) * self.lambda)
    }
}

/// Current wealth and death benefit already in force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WealthState {
    /// Liquid wealth.
    pub w: f64,
    /// Death benefit from policies already owned.
    pub d: f64,
}

impl WealthState {
    /// Validates nonnegativity and finiteness of both coordinates.
    pub fn new(w: f64, d: f64) -> Result<Self, DomainError> {
        if !(w.is_finite() && w >= 0.0) {
            return Err(DomainError::Wealth(w));
        }
        if !(d.is_finite() && d >= 0.0) {
            return Err(DomainError::Benefit(d));
        }
        Ok(WealthState { w, d })
    }
}
