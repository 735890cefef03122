//! The function `w0`, inverse of `y = (2x - 1) e^{2x} + 1` on `x >= 0`.
//!
//! Every heat-channel capacity expression goes through `w0`, so it is
//! evaluated with a safeguarded Newton iteration that keeps a bracket
//! around the root and falls back to bisection whenever a Newton step
//! leaves it.
//!
//! The forward map loses all precision near the origin if evaluated
//! literally (two terms of size one cancel to leave `2x^2`), so small
//! arguments use the power series
//! `sum_{n>=2} (n - 1) (2x)^n / n!`. Large arguments switch to log space
//! before `e^{2x}` can overflow.

use crate::error::{domain, invalid, Error, Result};

/// Exponent `2x` above which the forward map is handled in log space.
pub const LOG_SPACE_EXPONENT: f64 = 700.0;

/// Below this exponent `2x` the forward map is summed as a power series.
const SERIES_EXPONENT: f64 = 1.0;

/// Relative tolerance and iteration cap shared by the iterative solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    rel_tol: f64,
    max_iter: usize,
}

impl ToleranceConfig {
    pub const DEFAULT_REL_TOL: f64 = 1e-12;
    pub const DEFAULT_MAX_ITER: usize = 200;

    /// Requires `0 < rel_tol <= 1e-6` and `max_iter >= 10`.
    pub fn new(rel_tol: f64, max_iter: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-6) {
            return Err(invalid(
                "tolerance",
                format!("rel_tol must lie in (0, 1e-6], got {rel_tol:e}"),
            ));
        }
        if max_iter < 10 {
            return Err(invalid(
                "tolerance",
                format!("max_iter must be at least 10, got {max_iter}"),
            ));
        }
        Ok(Self { rel_tol, max_iter })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rel_tol: Self::DEFAULT_REL_TOL,
            max_iter: Self::DEFAULT_MAX_ITER,
        }
    }
}

/// `(2x - 1) e^{2x} + 1` without the cancellation error of the literal form.
fn forward_unchecked(x: f64) -> f64 {
    let z = 2.0 * x;
    if z < SERIES_EXPONENT {
        // (n - 1) z^n / n!, starting at n = 2
        let mut power_over_fact = z * z / 2.0;
        let mut sum = power_over_fact;
        let mut n = 2.0;
        loop {
            n += 1.0;
            power_over_fact *= z / n;
            let term = (n - 1.0) * power_over_fact;
            sum += term;
            if term <= sum * f64::EPSILON * 0.25 {
                break;
            }
        }
        sum
    } else {
        (z - 1.0) * z.exp() + 1.0
    }
}

/// Natural log of the forward map, finite for every `x > 0`.
fn ln_forward_unchecked(x: f64) -> f64 {
    let z = 2.0 * x;
    if z <= LOG_SPACE_EXPONENT {
        forward_unchecked(x).ln()
    } else {
        // ln((z - 1) e^z (1 + e^{-z}/(z - 1)))
        z + (z - 1.0).ln() + ((-z).exp() / (z - 1.0)).ln_1p()
    }
}

/// `y = (2x - 1) e^{2x} + 1` for `x >= 0`. Overflows to `+inf` once the
/// value exceeds `f64::MAX`; use [`ln_forward_map`] there.
pub fn forward_map(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain("forward_map", format!("x must be >= 0, got {x}")));
    }
    if 2.0 * x > LOG_SPACE_EXPONENT {
        return Ok(ln_forward_unchecked(x).exp());
    }
    Ok(forward_unchecked(x))
}

/// `ln((2x - 1) e^{2x} + 1)` for `x > 0`.
pub fn ln_forward_map(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("ln_forward_map", format!("x must be > 0, got {x}")));
    }
    Ok(ln_forward_unchecked(x))
}

/// Derivative of the forward map, `4x e^{2x}`.
fn forward_slope(x: f64) -> f64 {
    4.0 * x * (2.0 * x).exp()
}

/// Inverse of [`forward_map`]: the unique `x >= 0` with
/// `|forward_map(x) - y| <= rel_tol * max(1, y)`.
///
/// When `y` is so large that adjacent floats around the root already
/// differ by more than the tolerance, the closest representable root is
/// returned.
pub fn w0(y: f64, tol: &ToleranceConfig) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(domain("w0", format!("y must be >= 0, got {y}")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y.is_infinite() {
        return Err(domain("w0", "y must be finite"));
    }

    let ln_y = y.ln();

    // Residual in the natural scale while e^{2x} is representable, in log
    // scale beyond. Both are increasing in x.
    let log_scale = ln_y > LOG_SPACE_EXPONENT / 2.0;
    let residual = |x: f64| -> (f64, f64) {
        if log_scale {
            let ln_f = ln_forward_unchecked(x);
            // d/dx ln f = f'/f = 4x / ((2x - 1) + e^{-2x})
            let z = 2.0 * x;
            let slope = 2.0 * z / ((z - 1.0) + (-z).exp());
            (ln_f - ln_y, slope)
        } else {
            (forward_unchecked(x) - y, forward_slope(x))
        }
    };
    // Relative to y, not max(1, y): small arguments keep full relative
    // accuracy in x. Stricter than the documented contract.
    let converged = |r: f64| {
        if log_scale {
            r.abs() <= tol.rel_tol
        } else {
            r.abs() <= tol.rel_tol * y
        }
    };

    let mut lo = 0.0_f64;
    let mut hi = (0.5 * y.ln_1p()).max(1.0) + 1.0;
    while residual(hi).0 < 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Divergence {
                op: "w0",
                limit: f64::MAX,
            });
        }
    }

    let mut x = if y < 1.0 {
        (0.5 * y).sqrt()
    } else {
        // 2x + ln(2x - 1) ~ ln y; one fixed-point pass is a good start
        let z = ln_y.max(1.0);
        0.5 * (z - (z - 1.0).max(1e-3).ln()).max(1.0)
    };
    if !(x > lo && x < hi) {
        x = 0.5 * (lo + hi);
    }

    let mut r = f64::INFINITY;
    for _ in 0..tol.max_iter {
        let (res, slope) = residual(x);
        r = res;
        if converged(r) {
            // one quadratic step more costs nothing and lands on the root
            let polished = x - r / slope;
            if slope > 0.0 && polished > lo && polished < hi && residual(polished).0.abs() <= r.abs() {
                return Ok(polished);
            }
            return Ok(x);
        }
        if r < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // bracket collapsed to adjacent floats
            let (r_lo, _) = residual(lo);
            let (r_hi, _) = residual(hi);
            return Ok(if r_lo.abs() <= r_hi.abs() { lo } else { hi });
        }
        let newton = x - r / slope;
        x = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            mid
        };
    }
    Err(Error::Convergence {
        op: "w0",
        iterations: tol.max_iter,
        residual: r,
    })
}

/// [`w0`] at the default tolerance.
pub fn w0_default(y: f64) -> Result<f64> {
    w0(y, &ToleranceConfig::default())
}
