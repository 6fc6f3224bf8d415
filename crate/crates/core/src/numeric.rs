//! Root bracketing for monotone-ish threshold curves and 1-D maximization.

use thiserror::Error;

/// Absolute width at which bisection stops.
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("no sign change of the function on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("function is not finite at {0}")]
    NotFinite(f64),
}

/// Bisection on a bracket with `f(lo)` and `f(hi)` of opposite sign.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64, SolverError> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if !flo.is_finite() {
        return Err(SolverError::NotFinite(lo));
    }
    if !fhi.is_finite() {
        return Err(SolverError::NotFinite(hi));
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(SolverError::NoBracket { lo, hi });
    }
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if !fm.is_finite() {
            return Err(SolverError::NotFinite(mid));
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// First sign change of `f` on an even scan of `samples` intervals over
/// `[lo, hi]`, refined by bisection.
pub fn first_root(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<f64, SolverError> {
    let samples = samples.max(1);
    let step = (hi - lo) / samples as f64;
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=samples {
        let b = if i == samples { hi } else { lo + step * i as f64 };
        let fb = f(b);
        if fa.is_finite() && fb.is_finite() && (fa == 0.0 || fa.signum() != fb.signum()) {
            return bisect(&mut f, a, b);
        }
        a = b;
        fa = fb;
    }
    Err(SolverError::NoBracket { lo, hi })
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`,
/// returning `(argmax, max)`. Stops when the bracket is narrower than `tol`.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Maximum of `f` over an even grid of `steps` intervals on `[lo, hi]`,
/// refined by golden-section search in the cells around the best node.
pub fn grid_then_golden_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, steps: usize, tol: f64) -> (f64, f64) {
    let steps = steps.max(1);
    let h = (hi - lo) / steps as f64;
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..=steps {
        let v = f(lo + h * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let a = (lo + h * best_i.saturating_sub(1) as f64).max(lo);
    let b = (lo + h * (best_i + 1) as f64).min(hi);
    let (x, v) = golden_max(&mut f, a, b, tol);
    if v >= best {
        (x, v)
    } else {
        (lo + h * best_i as f64, best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn reports_missing_bracket() {
        assert!(matches!(bisect(|x| x * x + 1.0, -1.0, 1.0), Err(SolverError::NoBracket { .. })));
        assert!(first_root(|x| x + 10.0, 0.0, 1.0, 50).is_err());
    }

    #[test]
    fn golden_finds_parabola_peak() {
        // A flat peak pins the argmax only to about sqrt(machine epsilon).
        let (x, v) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7 && (v - 2.0).abs() < 1e-12, "{x} {v}");
        let (x, _) = grid_then_golden_max(|x| (6.0 * x).sin(), 0.0, 2.0, 100, 1e-10);
        assert!((x - std::f64::consts::PI / 12.0).abs() < 1e-7);
    }

    #[test]
    fn first_root_skips_later_crossings() {
        let r = first_root(|x| (x - 0.2) * (x - 0.7), 0.0, 1.0, 100).unwrap();
        assert!((r - 0.2).abs() < 1e-11);
    }
}
