//! Optimal life-insurance purchasing strategies for an investor who wants to
//! maximize the probability that their bequest — wealth plus death benefit at
//! the moment of death — reaches a fixed goal `b`.
//!
//! Wealth earns a riskless rate `r` and the investor's remaining lifetime is
//! exponential with force of mortality `lambda`. Four product designs are
//! solved in closed form:
//!
//! * **Single premium, no cash value** ([`single_premium`]): coverage is
//!   bought once, instantly, at `(1 + theta)` times its actuarial value.
//!   The optimal strategy is bang-bang — wait until wealth reaches a *safe
//!   level*, then buy the entire shortfall at once.
//! * **Single premium with cash value** ([`single_premium`]): as above, but
//!   coverage may be surrendered for its cash value less a proportional
//!   charge `rho`. Surrendering is optimal only below an explicit wealth
//!   threshold, and the option can only raise the success probability.
//! * **Instantaneous term life** ([`term_life`]): coverage is rented
//!   continuously at premium rate `h` per dollar. Above a critical wealth
//!   `w*` it is optimal to hold no insurance and let wealth grow; below it,
//!   full coverage of the shortfall is optimal even though the premium drag
//!   can drive wealth to ruin.
//! * **Irreversible whole life** ([`whole_life`]): a continuous premium `h`
//!   per dollar of in-force benefit that can never be dropped. The state
//!   plane `(w, D)` splits into hold and purchase regions separated by
//!   explicit free boundaries.
//!
//! Every closed form ships with an independent verification layer
//! ([`oracle`]): a Monte Carlo simulator that replays the stated strategies
//! path by path, finite-difference residual checks of the variational
//! inequalities and boundary-value problems the value functions must
//! satisfy, and strategy-dominance tests. The [`cli`] module exposes all of
//! it as a small command-line tool; the `examples/` directory shows each
//! capability as a runnable program.
//!
//! # Quick start
//!
//! ```
//! use bequest::model::ModelParams;
//! use bequest::term_life::{phi_term, solve_term};
//!
//! // Goal 1, interest 3%, mortality 8%, term loading 25% (h = 0.10).
//! let params = ModelParams::new(1.0, 0.03, 0.08, 0.25, 0.25, 1.0).unwrap();
//! let solution = solve_term(&params).unwrap();
//! assert!((solution.safe_level - 0.7692307692307693).abs() < 1e-12);
//! let w_star = solution.w_star.unwrap();
//! assert!((w_star - 0.6948942040116133).abs() < 1e-9);
//!
//! // Below w*, buying full coverage beats waiting.
//! let phi = phi_term(&params, 0.4).unwrap();
//! assert!((phi - 0.36343792391857964).abs() < 1e-12);
//! ```

pub mod cli;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod single_premium;
pub mod term_life;
pub mod whole_life;

pub use model::{DomainError, ModelParams, ParamError, WealthState};
pub use oracle::{Product, SimReport, StrategySpec};
pub use term_life::{SweepAxis, TermRegime, TermSolution};
pub use whole_life::RegionLabel;
