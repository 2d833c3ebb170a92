//! Bracketed scalar minimization and root finding.
//!
//! All routines are derivative-free, deterministic, and converge on fixed
//! tolerances. Value-comparison minimizers can only localize a smooth minimum
//! to about `sqrt(eps)` in the argument, so [`minimize`] finishes with a
//! sign-bisection of a high-order finite-difference derivative, which brings
//! the argument accuracy down to ~1e-9 on well-scaled problems.

/// Result of a scalar minimization.
#[derive(Debug, Clone, Copy)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

/// Golden-section search for the minimum of `f` on `[a, b]`.
///
/// Assumes `f` is unimodal on the bracket; stops when the bracket width drops
/// below `xtol`.
pub fn golden_section_min(f: &dyn Fn(f64) -> f64, a: f64, b: f64, xtol: f64) -> Minimum {
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x1 = b - INV_GOLDEN * (b - a);
    let mut x2 = a + INV_GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > xtol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_GOLDEN * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_GOLDEN * (b - a);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (a + b);
    Minimum { x, value: f(x) }
}

/// Fourth-order central difference of `f` at `x` with step `h`.
fn central_diff(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Locate the minimum of a smooth `f` on `[a, b]` to high argument accuracy.
///
/// Golden-section search narrows to ~1e-6, then the sign change of the
/// finite-difference derivative is bisected. If the derivative does not
/// change sign in the narrowed bracket (flat or boundary minimum) the
/// golden-section result is returned as is.
pub fn minimize(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Minimum {
    let coarse = golden_section_min(f, a, b, 1e-6 * (b - a).abs().max(1.0));
    let span = (b - a).abs();
    let w = (1e-5 * span).max(1e-9);
    let h = (1e-4 * coarse.x.abs()).max(1e-6);
    let lo = (coarse.x - w).max(a.min(b) + 2.0 * h);
    let hi = (coarse.x + w).min(a.max(b) - 2.0 * h);
    if lo >= hi {
        return coarse;
    }
    let d = |x: f64| central_diff(f, x, h);
    let (dlo, dhi) = (d(lo), d(hi));
    if dlo < 0.0 && dhi > 0.0 {
        let x = bisect(&d, lo, hi, 1e-12);
        let value = f(x);
        if value <= coarse.value + 1e-15 * coarse.value.abs() {
            return Minimum { x, value };
        }
    }
    coarse
}

/// Bisect a sign change of `f` on `[a, b]` down to bracket width `xtol`.
///
/// Requires `f(a)` and `f(b)` to have opposite signs (zero counts as either).
pub fn bisect(f: &dyn Fn(f64) -> f64, a: f64, b: f64, xtol: f64) -> f64 {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let fb = f(b);
    debug_assert!(
        fa == 0.0 || fb == 0.0 || (fa < 0.0) != (fb < 0.0),
        "bisect requires a sign change on the bracket"
    );
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= xtol + f64::EPSILON * m.abs() {
            return m;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Find the unique root of `f` on `[0, ∞)` for an `f` that is negative at 0
/// and eventually positive, growing the bracket geometrically first.
pub fn bisect_growing(f: &dyn Fn(f64) -> f64, initial_hi: f64, xtol: f64) -> f64 {
    let mut hi = initial_hi.max(f64::MIN_POSITIVE);
    let mut tries = 0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        tries += 1;
        assert!(tries < 200, "root bracket failed to grow");
    }
    bisect(f, 0.0, hi, xtol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn golden_finds_parabola_vertex() {
        let f = |x: f64| (x - 2.5) * (x - 2.5) + 1.0;
        let m = golden_section_min(&f, 0.0, 10.0, 1e-10);
        assert_abs_diff_eq!(m.x, 2.5, epsilon = 1e-7);
        assert_abs_diff_eq!(m.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn minimize_polish_reaches_tight_accuracy() {
        // shallow minimum, like the efficiency dip: depth ~1e-3 over width ~1
        let f = |x: f64| 1.0 - 1e-3 / (1.0 + (x - 1.3) * (x - 1.3));
        let m = minimize(&f, 0.0, 100.0);
        assert_abs_diff_eq!(m.x, 1.3, epsilon = 1e-8);
    }

    #[test]
    fn minimize_handles_boundary_minimum() {
        let f = |x: f64| x;
        let m = minimize(&f, 0.0, 5.0);
        assert!(m.x < 1e-4);
    }

    #[test]
    fn bisect_root_of_cubic() {
        let f = |x: f64| x * x * x - 2.0;
        let r = bisect(&f, 0.0, 2.0, 1e-14);
        assert_abs_diff_eq!(r, 2.0_f64.powf(1.0 / 3.0), epsilon = 1e-12);
    }

    #[test]
    fn bisect_growing_expands_bracket() {
        let f = |x: f64| x - 123.0;
        let r = bisect_growing(&f, 1.0, 1e-12);
        assert_abs_diff_eq!(r, 123.0, epsilon = 1e-9);
    }
}
