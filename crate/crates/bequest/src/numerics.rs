//! Root finding and finite differences for the threshold analysis.
//!
//! The critical-wealth threshold of the term-life product is the interior
//! zero of
//!
//! ```text
//! f1(x) = x^a + (1 - x)^c - 1        on (0, 1),  a > 1,  0 < c < 1
//! ```
//!
//! with `a = lambda / r` and `c = lambda / (r + h)`. `f1` vanishes at both
//! endpoints, is negative on `(0, x*)` and positive on `(x*, 1)`, so a signed
//! bracket plus bisection pins `x*` deterministically. The companions `f2`
//! and `f3` bound the derivative terms that appear in the optimality proof of
//! the threshold and are exercised by the property suite:
//!
//! ```text
//! f2(x) = 1 - (c/a)(1-x)^(c-1) - (1 - c/a)(1-x)^c    >= 0 on [0, x*]
//! f3(x) = 1 - (a/c) x^(a-1) + (a/c - 1) x^a          <= 0 on [x*, 1]
//! ```

use thiserror::Error;

/// Bisection tolerance in `x` for [`x_star`].
pub const X_STAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {flo}, f(hi) = {fhi}")]
    NoSignChange { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("bracket [{lo}, {hi}] is not an interval")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("no convergence to {tol} within {max_iter} iterations")]
    MaxIterations { tol: f64, max_iter: u32 },
    #[error("exponents must satisfy 0 < c < 1 < a, got a = {a}, c = {c}")]
    ExponentOrder { a: f64, c: f64 },
}

/// Bracketed root-finding request.
#[derive(Debug, Clone, Copy)]
pub struct RootSpec {
    pub lo: f64,
    pub hi: f64,
    /// Absolute tolerance on the bracket width.
    pub tol_abs: f64,
    pub max_iter: u32,
}

impl Default for RootSpec {
    fn default() -> Self {
        RootSpec { lo: 0.0, hi: 1.0, tol_abs: 1e-12, max_iter: 200 }
    }
}

/// Bisection on a signed bracket. Deterministic: the same spec and function
/// always return the same root.
pub fn find_root<F: Fn(f64) -> f64>(f: F, spec: RootSpec) -> Result<f64, RootError> {
    let RootSpec { mut lo, mut hi, tol_abs, max_iter } = spec;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(RootError::InvalidBracket { lo, hi });
    }
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(RootError::NoSignChange { lo, hi, flo, fhi });
    }
    let neg_low = flo < 0.0;
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol_abs || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if (fmid < 0.0) == neg_low {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(RootError::MaxIterations { tol: tol_abs, max_iter })
}

fn check_exponents(a: f64, c: f64) -> Result<(), RootError> {
    if a.is_finite() && c.is_finite() && a > 1.0 && c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(RootError::ExponentOrder { a, c })
    }
}

/// `x^a + (1-x)^c - 1`; zero at both endpoints with a single interior zero.
pub fn f1(a: f64, c: f64, x: f64) -> Result<f64, RootError> {
    check_exponents(a, c)?;
    Ok(x.powf(a) + (1.0 - x).powf(c) - 1.0)
}

/// `1 - (c/a)(1-x)^(c-1) - (1-c/a)(1-x)^c`; nonnegative on `[0, x*]`.
pub fn f2(a: f64, c: f64, x: f64) -> Result<f64, RootError> {
    check_exponents(a, c)?;
    let q = c / a;
    Ok(1.0 - q * (1.0 - x).powf(c - 1.0) - (1.0 - q) * (1.0 - x).powf(c))
}

/// `1 - (a/c) x^(a-1) + (a/c - 1) x^a`; nonpositive on `[x*, 1]`.
pub fn f3(a: f64, c: f64, x: f64) -> Result<f64, RootError> {
    check_exponents(a, c)?;
    let q = a / c;
    Ok(1.0 - q * x.powf(a - 1.0) + (q - 1.0) * x.powf(a))
}

/// Interior zero of `f1` in `(0, 1)`.
///
/// The bracket comes from tangent-line bounds rather than scanning, so it
/// holds even when the zero hugs an endpoint: concavity of `(1-x)^c` gives
/// `f1(x) <= x (x^(a-1) - c)`, hence `f1 < 0` at `x_lo = (c^(1/(a-1))) / 2`,
/// and convexity of `(1-y)^a` gives `f1(1-y) >= y^c - a y`, hence `f1 > 0`
/// at `x_hi = 1 - (a^(-1/(1-c))) / 2`.
/// For extreme exponents the zero can sit closer to an endpoint than any
/// representable double; the nearest interior double is returned then.
pub fn x_star(a: f64, c: f64) -> Result<f64, RootError> {
    check_exponents(a, c)?;
    let lo = (0.5 * c.powf(1.0 / (a - 1.0))).max(f64::MIN_POSITIVE);
    let hi = (1.0 - 0.5 * a.powf(-1.0 / (1.0 - c))).min(1.0 - f64::EPSILON);
    let f = |x: f64| x.powf(a) + (1.0 - x).powf(c) - 1.0;
    if f(lo) >= 0.0 {
        return Ok(lo);
    }
    if f(hi) <= 0.0 {
        return Ok(hi);
    }
    find_root(f, RootSpec { lo, hi, tol_abs: X_STAR_TOL, max_iter: 200 })
}

/// Finite-difference stencil side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Central,
    /// Backward difference, approaching from below.
    Left,
    /// Forward difference, approaching from above.
    Right,
}

/// First-derivative estimate of `f` at `x`.
///
/// `Central` is second-order accurate; `Left`/`Right` are the three-point
/// one-sided stencils, also second-order, for seams and region boundaries
/// where only one side is admissible.
pub fn finite_diff<F: Fn(f64) -> f64>(f: F, x: f64, step: f64, side: Side) -> f64 {
    match side {
        Side::Central => (f(x + step) - f(x - step)) / (2.0 * step),
        Side::Right => (-3.0 * f(x) + 4.0 * f(x + step) - f(x + 2.0 * step)) / (2.0 * step),
        Side::Left => (3.0 * f(x) - 4.0 * f(x - step) + f(x - 2.0 * step)) / (2.0 * step),
    }
}

/// Relative step for finite differences; absolute step is
/// `step * max(1, |x|)`.
pub const FD_REL_STEP: f64 = 1e-6;

/// Absolute finite-difference step at position `x`.
pub fn fd_step(x: f64) -> f64 {
    FD_REL_STEP * x.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_known_roots() {
        let root =
            find_root(|x| x * x - 2.0, RootSpec { lo: 0.0, hi: 2.0, ..Default::default() })
                .unwrap();
        assert!((root - std::f64::consts::SQRT_2).abs() < 1e-11);

        // Re-running on a bracket around the returned root reproduces it.
        let again = find_root(
            |x| x * x - 2.0,
            RootSpec { lo: root - 1e-6, hi: root + 1e-6, ..Default::default() },
        )
        .unwrap();
        assert!((root - again).abs() < 1e-11);
    }

    #[test]
    fn bisection_rejects_bad_brackets() {
        assert!(matches!(
            find_root(|x| x * x + 1.0, RootSpec { lo: -1.0, hi: 1.0, ..Default::default() }),
            Err(RootError::NoSignChange { .. })
        ));
        assert!(matches!(
            find_root(|x| x, RootSpec { lo: 1.0, hi: -1.0, ..Default::default() }),
            Err(RootError::InvalidBracket { .. })
        ));
    }

    #[test]
    fn x_star_golden_case_matches_dense_scan() {
        // At a = 2, c = 1/2 the zero is (sqrt(5) - 1) / 2 in closed form:
        // substituting u = sqrt(1 - x) turns f1 = 0 into a quadratic.
        let expected = (5.0_f64.sqrt() - 1.0) / 2.0;
        let xs = x_star(2.0, 0.5).unwrap();
        assert!((xs - expected).abs() < 1e-11, "x* = {xs}");

        // Independent oracle: dense sign scan at 1e-7 resolution.
        let mut bracket = None;
        let n = 10_000_000u64;
        let mut prev = f1(2.0, 0.5, 1e-7).unwrap();
        for i in 2..n {
            let x = i as f64 * 1e-7;
            let v = f1(2.0, 0.5, x).unwrap();
            if prev < 0.0 && v >= 0.0 {
                bracket = Some((x - 1e-7, x));
                break;
            }
            prev = v;
        }
        let (lo, hi) = bracket.expect("scan must find the sign change");
        assert!(lo <= xs && xs <= hi, "bisection root {xs} outside scanned bracket [{lo}, {hi}]");
    }

    #[test]
    fn x_star_known_values() {
        // a = 8/3, c = 8/13: threshold of the worked term-life parameter set.
        let xs = x_star(8.0 / 3.0, 8.0 / 13.0).unwrap();
        assert!((xs - 0.9033624652150973).abs() < 1e-10);
        // a = 5/3, c = 0.05/0.0925.
        let xs = x_star(5.0 / 3.0, 0.05 / 0.0925).unwrap();
        assert!((xs - 0.4917895178217305).abs() < 1e-10);
    }

    #[test]
    fn x_star_survives_extreme_exponents() {
        // Roots hugging either endpoint still bracket correctly.
        for &(a, c) in &[(1.001, 0.01), (1.01, 0.9), (500.0, 0.99), (2000.0, 0.5), (1.0001, 0.5)]
        {
            let xs = x_star(a, c).unwrap();
            assert!(xs > 0.0 && xs < 1.0);
            let res = f1(a, c, xs).unwrap();
            assert!(res.abs() < 1e-6, "f1 residual {res} at a={a}, c={c}");
        }
    }

    #[test]
    fn exponent_order_enforced() {
        assert!(matches!(x_star(0.9, 0.5), Err(RootError::ExponentOrder { .. })));
        assert!(matches!(f1(2.0, 1.0, 0.5), Err(RootError::ExponentOrder { .. })));
        assert!(matches!(f2(2.0, 0.0, 0.5), Err(RootError::ExponentOrder { .. })));
    }

    #[test]
    fn companion_endpoint_values() {
        // f2(0) = 0 and f3 runs from 1 at x=0 to 0 at x=1.
        assert!(f2(3.0, 0.4, 0.0).unwrap().abs() < 1e-15);
        assert!((f3(3.0, 0.4, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(f3(3.0, 0.4, 1.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn finite_diff_orders() {
        let d = finite_diff(|x| x * x, 1.0, 1e-6, Side::Central);
        assert!((d - 2.0).abs() < 1e-9);
        let d = finite_diff(|x| x.abs(), 0.0, 1e-6, Side::Right);
        assert!((d - 1.0).abs() < 1e-12);
        let d = finite_diff(|x| x.abs(), 0.0, 1e-6, Side::Left);
        assert!((d + 1.0).abs() < 1e-12);
        // Three-point one-sided stencil is exact on quadratics.
        let d = finite_diff(|x| 3.0 * x * x + x, 2.0, 1e-4, Side::Right);
        assert!((d - 13.0).abs() < 1e-8);
    }
}
