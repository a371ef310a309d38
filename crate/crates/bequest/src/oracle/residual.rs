//! Residual checks: the closed-form value functions must satisfy their
//! variational inequalities, and the expected-bequest functions their
//! boundary-value problems, up to finite-difference error.
//!
//! Derivatives are estimated by central differences with a relative step,
//! so every check here exercises only the implemented formulas plus
//! elementary arithmetic — an independent consistency audit, not a
//! comparison of a formula against itself.
//!
//! Grids stay inside each analytic region: a margin keeps stencils away
//! from seams (region boundaries, kinks, the ruin and safe endpoints)
//! where one-sided behavior would pollute a central difference.

use serde::Serialize;

use crate::model::{ModelParams, WealthState};
use crate::numerics::{fd_step, finite_diff, Side};
use crate::oracle::sim::{OracleError, Product};
use crate::single_premium::{phi_cash, phi_no_cash, surrender_threshold};
use crate::term_life::{expected_bequest_term, phi_term, solve_term};
use crate::whole_life::{
    classify_region, expected_bequest_whole, jump_boundary, phi_whole, safe_level_whole,
    RegionLabel,
};
use crate::single_premium::{expected_bequest_cash, expected_bequest_no_cash, safe_level_sp};

/// Grid resolution for residual checks.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    /// Points along the wealth axis.
    pub n_w: usize,
    /// Points along the benefit axis (ignored by one-dimensional checks).
    pub n_d: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n_w: 200, n_d: 200 }
    }
}

/// Worst-case summary of one named residual family.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualEntry {
    /// What the residual measures.
    pub name: &'static str,
    /// Number of grid points evaluated.
    pub n_points: usize,
    /// Largest observed magnitude (normalized by `|value| + 1`).
    pub max_abs: f64,
    /// Pass threshold for `max_abs`.
    pub threshold: f64,
    /// Wealth coordinate of the worst point.
    pub worst_w: f64,
    /// Benefit coordinate of the worst point (0 for 1-D checks).
    pub worst_d: f64,
    /// Whether `max_abs <= threshold`.
    pub pass: bool,
}

/// Outcome of a residual sweep for one product.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    /// Product checked.
    pub product: Product,
    /// Which suite ran: `variational-inequality` or `expected-bequest-bvp`.
    pub check: &'static str,
    /// Per-family worst cases.
    pub entries: Vec<ResidualEntry>,
    /// True when every entry passed.
    pub pass: bool,
}

/// Interior residuals must vanish to finite-difference accuracy.
const TOL_INTERIOR: f64 = 1e-5;
/// Boundary identities hold exactly in the formulas; allow only round-off.
const TOL_BOUNDARY: f64 = 1e-9;
/// One-sided second-order stencil for the reflecting condition.
const TOL_REFLECTING: f64 = 1e-5;

struct Collector {
    name: &'static str,
    threshold: f64,
    n_points: usize,
    max_abs: f64,
    worst: (f64, f64),
}

impl Collector {
    fn new(name: &'static str, threshold: f64) -> Self {
        Collector { name, threshold, n_points: 0, max_abs: 0.0, worst: (f64::NAN, f64::NAN) }
    }

    fn add(&mut self, w: f64, d: f64, value: f64) {
        self.n_points += 1;
        let mag = value.abs();
        // `>=` so even an all-zero sweep records a concrete worst point.
        if mag >= self.max_abs || self.worst.0.is_nan() {
            self.max_abs = mag;
            self.worst = (w, d);
        }
    }

    fn entry(self) -> ResidualEntry {
        ResidualEntry {
            name: self.name,
            n_points: self.n_points,
            max_abs: self.max_abs,
            threshold: self.threshold,
            worst_w: self.worst.0,
            worst_d: self.worst.1,
            pass: self.max_abs <= self.threshold,
        }
    }
}

fn finish(product: Product, check: &'static str, collectors: Vec<Collector>) -> ResidualReport {
    let entries: Vec<ResidualEntry> = collectors.into_iter().map(Collector::entry).collect();
    let pass = entries.iter().all(|e| e.pass);
    ResidualReport { product, check, entries, pass }
}

/// Evenly spaced interior points of `[lo, hi]` with a 2% margin each side.
fn interior_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let span = hi - lo;
    let (a, b) = (lo + 0.02 * span, hi - 0.02 * span);
    (0..n).map(|i| a + (b - a) * (i as f64) / ((n - 1).max(1) as f64)).collect()
}

/// Checks that a product's success probability satisfies its variational
/// inequality on an interior grid: every inequality term stays nonpositive
/// and the largest term vanishes, both to `1e-5` after normalizing by
/// `|phi| + 1`.
pub fn check_variational_inequality(
    params: &ModelParams,
    product: Product,
    grid: &GridSpec,
) -> Result<ResidualReport, OracleError> {
    params.validate()?;
    let mut binding = Collector::new("binding-term", TOL_INTERIOR);
    let mut violation = Collector::new("inequality-violation", TOL_INTERIOR);

    match product {
        Product::SinglePremium | Product::SinglePremiumCash => {
            let cash = product == Product::SinglePremiumCash;
            let hs = params.single_premium_rate()?;
            let (b, r, lambda, rho) = (params.b, params.r, params.lambda, params.rho);
            let phi = |w: f64, d: f64| -> f64 {
                let state = WealthState::new(w, d).unwrap();
                if cash { phi_cash(params, state).unwrap() } else { phi_no_cash(params, state).unwrap() }
            };
            for &d in &interior_grid(0.0, 0.9 * b, grid.n_d) {
                let safe = safe_level_sp(params, d)?;
                let thr = surrender_threshold(params, d)?;
                for &w in &interior_grid(0.0, safe, grid.n_w) {
                    if cash && (w - thr).abs() < 0.03 * safe {
                        continue;
                    }
                    let sw = fd_step(w);
                    let sd = fd_step(d);
                    let f = phi(w, d);
                    let f_w = finite_diff(|x| phi(x, d), w, sw, Side::Central);
                    let f_d = finite_diff(|x| phi(w, x), d, sd, Side::Central);
                    let mut terms = vec![r * w * f_w - lambda * f, f_d - hs * f_w];
                    if cash {
                        terms.push((1.0 - rho) * hs * f_w - f_d);
                    }
                    let max_term = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let scale = f.abs() + 1.0;
                    binding.add(w, d, max_term / scale);
                    violation.add(w, d, max_term.max(0.0) / scale);
                }
            }
        }
        Product::Term => {
            let h = params.continuous_premium_rate()?;
            let (b, lambda, r) = (params.b, params.lambda, params.r);
            params.require_positive_rate("term variational inequality")?;
            let sol = solve_term(params)?;
            let phi = |w: f64| phi_term(params, w).unwrap();
            for &w in &interior_grid(0.0, sol.safe_level, grid.n_w.max(grid.n_d)) {
                if let Some(ws) = sol.w_star {
                    if (w - ws).abs() < 0.01 * sol.safe_level {
                        continue;
                    }
                }
                let s = fd_step(w);
                let f = phi(w);
                let f_w = finite_diff(phi, w, s, Side::Central);
                // Hold-coverage generator (zero while waiting) and
                // full-coverage generator (zero while fully insured);
                // their maximum must vanish and neither may go positive.
                let hold = r * w * f_w - lambda * f;
                let full = ((r + h) * w - h * b) * f_w + lambda * (1.0 - f);
                let max_term = hold.max(full);
                let scale = f.abs() + 1.0;
                binding.add(w, 0.0, max_term / scale);
                violation.add(w, 0.0, max_term.max(0.0) / scale);
            }
        }
        Product::Whole => {
            let h = params.continuous_premium_rate()?;
            let (b, lambda, r) = (params.b, params.lambda, params.r);
            params.require_positive_rate("whole-life variational inequality")?;
            let term_safe = h * b / (r + h);
            let w_star = solve_term(params)?.w_star;
            let phi = |w: f64, d: f64| phi_whole(params, &WealthState::new(w, d).unwrap()).unwrap();
            for &d in &interior_grid(0.0, 1.4 * b, grid.n_d) {
                let safe = safe_level_whole(params, d)?;
                for &w in &interior_grid(0.0, safe, grid.n_w) {
                    // Stay clear of seams: the goal line, the benefit kink
                    // at d = b, the jump boundary, and the critical wealth.
                    if (w + d - b).abs() < 0.02 * b || (d - b).abs() < 0.02 * b {
                        continue;
                    }
                    if let Some(ws) = w_star {
                        if (w - ws).abs() < 0.02 * term_safe {
                            continue;
                        }
                    }
                    if w <= term_safe {
                        let dj = jump_boundary(params, w)?;
                        if (d - dj).abs() < 0.02 * b {
                            continue;
                        }
                    }
                    let sw = fd_step(w);
                    let sd = fd_step(d);
                    // Skip stencils that straddle a region boundary.
                    let center = match classify_region(params, &WealthState::new(w, d).unwrap()) {
                        Ok(label) => label,
                        Err(_) => continue,
                    };
                    let same_region = |w2: f64, d2: f64| -> bool {
                        WealthState::new(w2, d2)
                            .ok()
                            .and_then(|s| classify_region(params, &s).ok())
                            == Some(center)
                    };
                    if !same_region(w - sw, d)
                        || !same_region(w + sw, d)
                        || !same_region(w, (d - sd).max(0.0))
                        || !same_region(w, d + sd)
                    {
                        continue;
                    }
                    let f = phi(w, d);
                    let f_w = finite_diff(|x| phi(x, d), w, sw, Side::Central);
                    let f_d = if d - sd >= 0.0 {
                        finite_diff(|x| phi(w, x), d, sd, Side::Central)
                    } else {
                        finite_diff(|x| phi(w, x), d, sd, Side::Right)
                    };
                    let indicator = if w + d >= b { 1.0 } else { 0.0 };
                    let t1 = (r * w - h * d) * f_w - lambda * (f - indicator);
                    let t2 = f_d;
                    let max_term = t1.max(t2);
                    let scale = f.abs() + 1.0;
                    binding.add(w, d, max_term / scale);
                    violation.add(w, d, max_term.max(0.0) / scale);
                }
            }
        }
    }
    Ok(finish(product, "variational-inequality", vec![binding, violation]))
}

/// Checks that a product's expected-bequest function satisfies its
/// boundary-value problem: the interior ordinary differential equation in
/// each region, exact boundary values, and (for whole life) the reflecting
/// condition along the goal line.
pub fn check_bvp_expected_bequest(
    params: &ModelParams,
    product: Product,
    grid: &GridSpec,
) -> Result<ResidualReport, OracleError> {
    params.validate()?;
    params.require_positive_rate("expected-bequest residual check")?;
    let mut interior = Collector::new("interior-ode", TOL_INTERIOR);
    let mut boundary = Collector::new("boundary-values", TOL_BOUNDARY);

    match product {
        Product::SinglePremium | Product::SinglePremiumCash => {
            let cash = product == Product::SinglePremiumCash;
            let hs = params.single_premium_rate()?;
            let (b, r, lambda, rho) = (params.b, params.r, params.lambda, params.rho);
            let e = |w: f64, d: f64| -> f64 {
                let state = WealthState::new(w, d).unwrap();
                if cash {
                    expected_bequest_cash(params, state).unwrap()
                } else {
                    expected_bequest_no_cash(params, state).unwrap()
                }
            };
            let mut surrender = Collector::new("surrender-direction", TOL_INTERIOR);
            for &d in &interior_grid(0.0, 0.9 * b, grid.n_d) {
                let safe = safe_level_sp(params, d)?;
                let thr = surrender_threshold(params, d)?;
                boundary.add(safe, d, (e(safe, d) - b) / b);
                for &w in &interior_grid(0.0, safe, grid.n_w) {
                    if cash && (w - thr).abs() < 0.03 * safe {
                        continue;
                    }
                    let sw = fd_step(w);
                    let val = e(w, d);
                    let e_w = finite_diff(|x| e(x, d), w, sw, Side::Central);
                    let scale = val.abs() + 1.0;
                    if cash && w < thr {
                        // Surrendering rolls the cash value into wealth; the
                        // value function is flat along that exchange.
                        let sd = fd_step(d);
                        let e_d = finite_diff(|x| e(w, x), d, sd, Side::Central);
                        surrender.add(w, d, (e_d - (1.0 - rho) * hs * e_w) / scale);
                    } else {
                        interior.add(w, d, (lambda * (val - (w + d)) - r * w * e_w) / scale);
                    }
                }
            }
            let collectors = if cash {
                vec![interior, boundary, surrender]
            } else {
                vec![interior, boundary]
            };
            return Ok(finish(product, "expected-bequest-bvp", collectors));
        }
        Product::Term => {
            let h = params.continuous_premium_rate()?;
            let (b, lambda, r) = (params.b, params.lambda, params.r);
            let sol = solve_term(params)?;
            let e = |w: f64| expected_bequest_term(params, w).unwrap();
            boundary.add(sol.safe_level, 0.0, (e(sol.safe_level) - b) / b);
            for &w in &interior_grid(0.0, sol.safe_level, grid.n_w.max(grid.n_d)) {
                if let Some(ws) = sol.w_star {
                    if (w - ws).abs() < 0.01 * sol.safe_level {
                        continue;
                    }
                }
                let s = fd_step(w);
                let val = e(w);
                let e_w = finite_diff(e, w, s, Side::Central);
                let scale = val.abs() + 1.0;
                let covered = matches!(sol.w_star, Some(ws) if w < ws);
                let residual = if covered {
                    // Full coverage: bequest pinned at the goal until ruin.
                    lambda * (val - b) - ((r + h) * w - h * b) * e_w
                } else {
                    lambda * (val - w) - r * w * e_w
                };
                interior.add(w, 0.0, residual / scale);
            }
        }
        Product::Whole => {
            let h = params.continuous_premium_rate()?;
            let (b, lambda, r) = (params.b, params.lambda, params.r);
            let term_safe = h * b / (r + h);
            let kink = r * b / (r + h);
            let w_star = solve_term(params)?.w_star;
            let e = |w: f64, d: f64| {
                expected_bequest_whole(params, &WealthState::new(w, d).unwrap()).unwrap()
            };
            let mut reflecting = Collector::new("goal-line-reflecting", TOL_REFLECTING);
            for &d in &interior_grid(0.0, 1.4 * b, grid.n_d) {
                // Ruin boundary: everything is forfeited.
                boundary.add(0.0, d, e(0.0, d) / b);
                // Reflecting condition along w + d = b inside the tracking
                // region: buying is marginally value-neutral there.
                if d > kink + 0.02 * b && d < b - 0.02 * b {
                    let w_line = b - d;
                    let sd = fd_step(d);
                    let e0 = e(w_line, d);
                    let e1 = e(w_line, d + sd);
                    let e2 = e(w_line, d + 2.0 * sd);
                    let one_sided = (-3.0 * e0 + 4.0 * e1 - e2) / (2.0 * sd);
                    reflecting.add(w_line, d, one_sided / (e0.abs() + 1.0));
                }
                let safe = safe_level_whole(params, d)?;
                for &w in &interior_grid(0.0, safe, grid.n_w) {
                    if (w + d - b).abs() < 0.02 * b || (d - b).abs() < 0.02 * b {
                        continue;
                    }
                    if let Some(ws) = w_star {
                        if (w - ws).abs() < 0.02 * term_safe {
                            continue;
                        }
                    }
                    if w <= term_safe {
                        let dj = jump_boundary(params, w)?;
                        if (d - dj).abs() < 0.02 * b {
                            continue;
                        }
                    }
                    let state = WealthState::new(w, d).unwrap();
                    let region = match classify_region(params, &state) {
                        Ok(x) => x,
                        Err(_) => continue,
                    };
                    let sw = fd_step(w);
                    let val = e(w, d);
                    let e_w = finite_diff(|x| e(x, d), w, sw, Side::Central);
                    let scale = val.abs() + 1.0;
                    let residual = match region {
                        RegionLabel::RbJump => {
                            lambda * (val - b) - ((r + h) * w - h * b) * e_w
                        }
                        RegionLabel::R0 | RegionLabel::Ra | RegionLabel::RbWait => {
                            lambda * (val - (w + d)) - (r * w - h * d) * e_w
                        }
                        RegionLabel::Safe => continue,
                    };
                    interior.add(w, d, residual / scale);
                }
            }
            return Ok(finish(
                product,
                "expected-bequest-bvp",
                vec![interior, boundary, reflecting],
            ));
        }
    }
    Ok(finish(product, "expected-bequest-bvp", vec![interior, boundary]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ModelParams {
        ModelParams::new(1.0, 0.03, 0.08, 0.25, 0.25, 0.3).unwrap()
    }

    fn small() -> GridSpec {
        GridSpec { n_w: 60, n_d: 60 }
    }

    #[test]
    fn variational_inequalities_hold_for_all_products() {
        let p = base();
        for product in [
            Product::SinglePremium,
            Product::SinglePremiumCash,
            Product::Term,
            Product::Whole,
        ] {
            let report = check_variational_inequality(&p, product, &small()).unwrap();
            assert!(report.pass, "{report:?}");
        }
    }

    #[test]
    fn bequest_bvps_hold_for_all_products() {
        let p = base();
        for product in [
            Product::SinglePremium,
            Product::SinglePremiumCash,
            Product::Term,
            Product::Whole,
        ] {
            let report = check_bvp_expected_bequest(&p, product, &small()).unwrap();
            assert!(report.pass, "{report:?}");
        }
    }

    #[test]
    fn checks_cover_other_mortality_regimes() {
        for p in [
            ModelParams::new(1.0, 0.05, 0.05, 0.25, 0.25, 0.3).unwrap(),
            ModelParams::new(1.0, 0.06, 0.05, 0.25, 0.4, 0.3).unwrap(),
        ] {
            for product in [Product::Term, Product::Whole] {
                let vi = check_variational_inequality(&p, product, &small()).unwrap();
                assert!(vi.pass, "{vi:?}");
                let bvp = check_bvp_expected_bequest(&p, product, &small()).unwrap();
                assert!(bvp.pass, "{bvp:?}");
            }
        }
    }
}
