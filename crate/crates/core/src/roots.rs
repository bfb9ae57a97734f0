//! Bracketing root finders: an upward sign-change scan, and bracket
//! refinement by bisection followed by Illinois-guarded secant steps.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RootError<E> {
    #[error("no sign change found while scanning [{lo}, {hi}] ({found} of {wanted} roots located)")]
    BracketNotFound { lo: f64, hi: f64, found: usize, wanted: usize },
    #[error("root refinement did not converge; best bracket [{lo}, {hi}]")]
    NoConvergence { lo: f64, hi: f64 },
    #[error("function evaluation failed: {0}")]
    Eval(E),
}

/// Refine a root of `f` inside `[lo, hi]`, where `f(lo)` and `f(hi)` have
/// opposite signs (or one of them vanishes). Returns a point whose bracket
/// width is below `tol`.
pub fn refine_bracket<E, F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    mut f_hi: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64, RootError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    debug_assert!(f_lo.signum() != f_hi.signum());
    let initial = (hi - lo).abs();
    // Which end was retained on the previous step (Illinois bookkeeping).
    let mut kept: i8 = 0;
    let mut last_width = initial;
    let mut stalls = 0;
    // Unscaled end values for the final interpolation.
    let (mut true_lo, mut true_hi) = (f_lo, f_hi);
    for _ in 0..max_iter {
        let width = (hi - lo).abs();
        if width <= tol {
            let x = hi - true_hi * (hi - lo) / (true_hi - true_lo);
            return Ok(if x.is_finite() { x.clamp(lo.min(hi), lo.max(hi)) } else { 0.5 * (lo + hi) });
        }
        // Coarse phase: plain bisection until the bracket is small relative
        // to the scan step, then secant.
        let use_secant = width < 0.05 * initial && stalls < 2;
        let mut x = if use_secant { hi - f_hi * (hi - lo) / (f_hi - f_lo) } else { 0.5 * (lo + hi) };
        if !(x > lo.min(hi) && x < lo.max(hi)) {
            x = 0.5 * (lo + hi);
        }
        // Keep trial points away from the ends so the bracket always shrinks.
        let guard = 0.25 * tol;
        if use_secant {
            x = x.clamp(lo.min(hi) + guard, lo.max(hi) - guard);
        }
        let fx = f(x).map_err(RootError::Eval)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
            true_lo = fx;
            if kept == 1 {
                f_hi *= 0.5;
            }
            kept = 1;
        } else {
            hi = x;
            f_hi = fx;
            true_hi = fx;
            if kept == -1 {
                f_lo *= 0.5;
            }
            kept = -1;
        }
        let new_width = (hi - lo).abs();
        if new_width > 0.5 * last_width {
            stalls += 1;
        } else {
            stalls = 0;
        }
        last_width = new_width;
    }
    Err(RootError::NoConvergence { lo: lo.min(hi), hi: lo.max(hi) })
}

/// Locate the first `count` roots of `f` above `start` by stepping upward in
/// increments of `step` and refining every sign change. The scan stops with
/// an error if `limit` is passed before `count` roots are found.
pub fn scan_roots<E, F>(
    mut f: F,
    start: f64,
    step: f64,
    count: usize,
    limit: f64,
    tol: f64,
) -> Result<Vec<f64>, RootError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    assert!(step > 0.0, "scan step must be positive");
    let mut roots = Vec::with_capacity(count);
    let mut x0 = start;
    let mut f0 = f(x0).map_err(RootError::Eval)?;
    let mut k: u64 = 0;
    while roots.len() < count {
        k += 1;
        let x1 = start + step * k as f64;
        if x1 > limit {
            return Err(RootError::BracketNotFound { lo: start, hi: limit, found: roots.len(), wanted: count });
        }
        let f1 = f(x1).map_err(RootError::Eval)?;
        if f0 == 0.0 {
            // Exact hit on the previous grid point, already recorded.
        } else if f1 == 0.0 || f0.signum() != f1.signum() {
            let r = refine_bracket(&mut f, x0, x1, f0, f1, tol, 200)?;
            roots.push(r);
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(roots)
}

/// Sign-change brackets `(lo, hi)` for the first `count` roots above
/// `start`, found by stepping upward in increments of `step`.
pub fn scan_brackets<E, F>(mut f: F, start: f64, step: f64, count: usize, limit: f64) -> Result<Vec<(f64, f64)>, RootError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    assert!(step > 0.0, "scan step must be positive");
    let mut brackets = Vec::with_capacity(count);
    let mut x0 = start;
    let mut f0 = f(x0).map_err(RootError::Eval)?;
    let mut k: u64 = 0;
    while brackets.len() < count {
        k += 1;
        let x1 = start + step * k as f64;
        if x1 > limit {
            return Err(RootError::BracketNotFound { lo: start, hi: limit, found: brackets.len(), wanted: count });
        }
        let f1 = f(x1).map_err(RootError::Eval)?;
        if f0 != 0.0 && (f1 == 0.0 || f0.signum() != f1.signum()) {
            brackets.push((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(brackets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;
    use std::f64::consts::PI;

    fn ok(v: f64) -> Result<f64, Infallible> {
        Ok(v)
    }

    #[test]
    fn refines_cubic_root() {
        let r = refine_bracket(|x| ok(x * x * x - 2.0), 0.0, 2.0, -2.0, 6.0, 1e-13, 200).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn scan_finds_sine_zeros_in_order() {
        let roots = scan_roots(|x: f64| ok((x).sin()), 0.5, 0.3, 5, 100.0, 1e-12).unwrap();
        for (k, r) in roots.iter().enumerate() {
            assert!((r - PI * (k + 1) as f64).abs() < 1e-11, "{k}: {r}");
        }
    }

    #[test]
    fn brackets_enclose_roots() {
        let b = scan_brackets(|x: f64| ok(x.cos()), 0.0, 0.25, 3, 20.0).unwrap();
        for (k, (lo, hi)) in b.iter().enumerate() {
            let r = PI * (k as f64 + 0.5);
            assert!(*lo < r && r <= *hi, "{k}");
        }
    }

    #[test]
    fn scan_reports_missing_bracket() {
        let err = scan_roots(|x: f64| ok(x * x + 1.0), 0.0, 0.1, 1, 5.0, 1e-9).unwrap_err();
        assert!(matches!(err, RootError::BracketNotFound { found: 0, wanted: 1, .. }));
    }

    #[test]
    fn one_sided_function_still_converges() {
        // Regula falsi stalls on this without the Illinois halving.
        let r = refine_bracket(|x: f64| ok(x.powi(10) - 0.5), 0.0, 1.5, -0.5, 1.5f64.powi(10) - 0.5, 1e-12, 300).unwrap();
        assert!((r - 0.5f64.powf(0.1)).abs() < 1e-12);
    }
}
