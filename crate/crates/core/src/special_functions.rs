//! Generalized Laguerre polynomials, bracketed root location, and quadrature.
//!
//! Everything here is deliberately plain f64 numerics: the polynomial degrees
//! are small (n ≲ 10), the root finders are used on smooth physics residuals,
//! and determinism matters more than the last factor of 2 in speed.

/// A generalized Laguerre polynomial L_n^r: degree `n` and real order `r`.
///
/// Evaluation is defined for any real order; r > −1 is required only where a
/// weight-function normalization is involved (callers enforce that there).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LaguerreSpec {
    pub degree: u32,
    pub order: f64,
}

/// L_n^r(x) by the stable three-term recurrence
/// k·L_k = (2k−1+r−x)·L_{k−1} − (k−1+r)·L_{k−2}.
pub fn laguerre(n: u32, r: f64, x: f64) -> f64 {
    match n {
        0 => 1.0,
        _ => {
            let mut lm2 = 1.0; // L_0
            let mut lm1 = 1.0 + r - x; // L_1
            for k in 2..=n {
                let k = f64::from(k);
                let l = ((2.0 * k - 1.0 + r - x) * lm1 - (k - 1.0 + r) * lm2) / k;
                lm2 = lm1;
                lm1 = l;
            }
            lm1
        }
    }
}

/// Evaluates a [`LaguerreSpec`] at x.
pub fn laguerre_eval(spec: LaguerreSpec, x: f64) -> f64 {
    laguerre(spec.degree, spec.order, x)
}

/// d/dx L_n^r(x) = −L_{n−1}^{r+1}(x).
pub fn laguerre_deriv(n: u32, r: f64, x: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        -laguerre(n - 1, r + 1.0, x)
    }
}

/// d²/dx² L_n^r(x) = L_{n−2}^{r+2}(x).
pub fn laguerre_second_deriv(n: u32, r: f64, x: f64) -> f64 {
    if n < 2 {
        0.0
    } else {
        laguerre(n - 2, r + 2.0, x)
    }
}

/// An interval [lo, hi] on which a continuous function changes sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl RootBracket {
    /// Checked constructor: requires lo < hi, finite values, and a sign
    /// change (or an exact zero at an endpoint).
    pub fn new(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Option<Self> {
        if !(lo < hi) || !f_lo.is_finite() || !f_hi.is_finite() {
            return None;
        }
        if f_lo == 0.0 || f_hi == 0.0 || (f_lo < 0.0) != (f_hi < 0.0) {
            Some(RootBracket { lo, hi, f_lo, f_hi })
        } else {
            None
        }
    }
}

/// Default absolute tolerance for interval bisection.
pub const ROOT_TOL: f64 = 1e-10;

/// Default panel count for scanning root brackets.
pub const SCAN_PANELS: usize = 400;

/// Bisects a bracketed root to interval width ≤ `tol` (absolute, widened
/// proportionally for roots of large magnitude). Midpoints where `f` is not
/// finite shrink toward the low side, so isolated domain holes inside the
/// bracket cannot wedge the iteration.
pub fn bisect(f: impl Fn(f64) -> f64, bracket: &RootBracket, tol: f64) -> f64 {
    if bracket.f_lo == 0.0 {
        return bracket.lo;
    }
    if bracket.f_hi == 0.0 {
        return bracket.hi;
    }
    let mut lo = bracket.lo;
    let mut hi = bracket.hi;
    let mut f_lo = bracket.f_lo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let width_tol = tol * 1.0_f64.max(mid.abs());
        if hi - lo <= width_tol || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if !f_mid.is_finite() || (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            if f_mid.is_finite() {
                f_lo = f_mid;
            }
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Scans [lo, hi] with `panels` equal panels and bisects every sign change to
/// within `tol`. Panel endpoints where `f` is not finite are skipped (domains
/// with holes are handled by simply not bracketing across them). Exact zeros
/// at panel endpoints are accepted as roots. Returned roots are ascending and
/// deduplicated.
pub fn find_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize, tol: f64) -> Vec<f64> {
    assert!(lo < hi, "find_roots needs lo < hi, got [{lo}, {hi}]");
    assert!(panels >= 1);
    let h = (hi - lo) / panels as f64;
    let mut roots: Vec<f64> = Vec::new();
    let push = |r: f64, roots: &mut Vec<f64>| {
        let sep = tol.max(1e-14) * 10.0 * 1.0_f64.max(r.abs());
        if roots.last().map_or(true, |&p| r - p > sep) {
            roots.push(r);
        }
    };
    let mut prev_x = lo;
    let mut prev_f = f(lo);
    for i in 1..=panels {
        let x = if i == panels { hi } else { lo + i as f64 * h };
        let fx = f(x);
        if prev_f.is_finite() && fx.is_finite() {
            if prev_f == 0.0 {
                push(prev_x, &mut roots);
            } else if fx != 0.0 && (prev_f < 0.0) != (fx < 0.0) {
                let bracket =
                    RootBracket::new(prev_x, x, prev_f, fx).expect("sign change just checked");
                push(bisect(&f, &bracket, tol), &mut roots);
            }
        }
        prev_x = x;
        prev_f = fx;
    }
    if prev_f == 0.0 {
        push(hi, &mut roots);
    }
    roots
}

/// Composite trapezoid rule with `n` panels. Nodes where `f` is not finite
/// contribute zero weight, which amounts to treating integrable endpoint
/// singularities by open truncation.
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n >= 1 && a < b);
    let h = (b - a) / n as f64;
    let mut sum = 0.0;
    for i in 0..=n {
        let x = if i == n { b } else { a + i as f64 * h };
        let fx = f(x);
        if fx.is_finite() {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            sum += w * fx;
        }
    }
    sum * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// Independent series evaluation: L_n^r(x) = Σ_{i=0}^n (−1)^i C(n+r, n−i) x^i / i!
    /// with C(n+r, n−i) expanded as a product — a different algorithm from the
    /// production recurrence.
    fn laguerre_series(n: u32, r: f64, x: f64) -> f64 {
        let n = n as i64;
        let mut total = 0.0;
        for i in 0..=n {
            // C(n+r, n−i) = Π_{j=1}^{n−i} (r + i + j) / j
            let mut binom = 1.0;
            for j in 1..=(n - i) {
                binom *= (r + i as f64 + j as f64) / j as f64;
            }
            let mut x_pow_over_fact = 1.0;
            for j in 1..=i {
                x_pow_over_fact *= x / j as f64;
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * binom * x_pow_over_fact;
        }
        total
    }

    #[test]
    fn low_orders_match_closed_forms() {
        for x in [0.0, 0.3, 1.7, 9.2] {
            assert_eq!(laguerre(0, 2.5, x), 1.0);
            assert_relative_eq!(laguerre(1, 0.0, x), 1.0 - x, max_relative = 1e-15);
            assert_relative_eq!(
                laguerre(2, 0.0, x),
                1.0 - 2.0 * x + 0.5 * x * x,
                max_relative = 1e-13,
                epsilon = 1e-13
            );
        }
        assert_relative_eq!(laguerre(1, 1.5, 0.0), 2.5, max_relative = 1e-15);
    }

    #[test]
    fn recurrence_matches_independent_series() {
        for n in 0..=8u32 {
            for &r in &[0.0, 0.5, 1.7, 3.25] {
                for &x in &[0.0, 0.2, 1.0, 4.5, 11.0, 30.0] {
                    let a = laguerre(n, r, x);
                    let b = laguerre_series(n, r, x);
                    assert_relative_eq!(a, b, max_relative = 1e-10, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn frozen_value_l3_half_at_two() {
        // Hand expansion: L_3^{1/2}(2) = C(3.5,3) − C(3.5,2)·2 + C(3.5,1)·2 − 8/6
        //                = 35/16 − 2·15/8 + 2·7/2 − 4/3 = −43/48.
        assert_relative_eq!(laguerre(3, 0.5, 2.0), -43.0 / 48.0, max_relative = 1e-14);
    }

    #[test]
    fn derivative_identities_match_finite_differences() {
        for n in 0..=9u32 {
            for &r in &[0.0, 0.5, 2.3] {
                for &x in &[0.1f64, 0.9, 3.7, 12.0] {
                    let h = 1e-6 * x.max(1.0);
                    let fd = (laguerre(n, r, x + h) - laguerre(n, r, x - h)) / (2.0 * h);
                    assert_relative_eq!(
                        laguerre_deriv(n, r, x),
                        fd,
                        max_relative = 1e-5,
                        epsilon = 1e-7
                    );
                    let fd2 =
                        (laguerre_deriv(n, r, x + h) - laguerre_deriv(n, r, x - h)) / (2.0 * h);
                    assert_relative_eq!(
                        laguerre_second_deriv(n, r, x),
                        fd2,
                        max_relative = 1e-5,
                        epsilon = 1e-7
                    );
                }
            }
        }
    }

    #[test]
    fn bracket_constructor_requires_sign_change() {
        assert!(RootBracket::new(0.0, 1.0, -1.0, 2.0).is_some());
        assert!(RootBracket::new(0.0, 1.0, 1.0, 2.0).is_none());
        assert!(RootBracket::new(1.0, 0.0, -1.0, 2.0).is_none());
        assert!(RootBracket::new(0.0, 1.0, f64::NAN, 2.0).is_none());
        assert!(RootBracket::new(0.0, 1.0, 0.0, 2.0).is_some());
    }

    #[test]
    fn simple_quadratic_root() {
        let roots = find_roots(|x| x * x - 4.0, 0.0, 10.0, 100, 1e-12);
        assert_eq!(roots.len(), 1);
        assert_abs_diff_eq!(roots[0], 2.0, epsilon = 1e-10);
    }

    #[test]
    fn no_roots_means_empty() {
        assert!(find_roots(|x| x * x + 1.0, -5.0, 5.0, 64, 1e-10).is_empty());
    }

    #[test]
    fn cubic_root_matches_independent_bisection() {
        // (E−1)²(E+1) − 36 = 0: the harmonic quantization anchor cubic.
        let f = |e: f64| (e - 1.0) * (e - 1.0) * (e + 1.0) - 36.0;
        let roots = find_roots(f, 1.0, 10.0, 400, 1e-12);
        assert_eq!(roots.len(), 1);
        // Plain interval halving, coded independently of bisect().
        let (mut lo, mut hi) = (1.0_f64, 10.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let reference = 0.5 * (lo + hi);
        assert_abs_diff_eq!(roots[0], reference, epsilon = 1e-9);
        assert_abs_diff_eq!(roots[0], 3.752_317_474_967_829, epsilon = 1e-9);
    }

    #[test]
    fn nan_panels_are_skipped() {
        // sqrt(x−2) − 1 is NaN below x = 2; the root at 3 must still be found.
        let roots = find_roots(|x| (x - 2.0).sqrt() - 1.0, 0.0, 10.0, 128, 1e-10);
        assert_eq!(roots.len(), 1);
        assert_abs_diff_eq!(roots[0], 3.0, epsilon = 1e-9);
    }

    #[test]
    fn multiple_roots_are_sorted_and_deduplicated() {
        let roots = find_roots(|x| x.sin(), 1.0, 20.0, 500, 1e-11);
        assert_eq!(roots.len(), 6);
        for (j, r) in roots.iter().enumerate() {
            assert_abs_diff_eq!(*r, (j + 1) as f64 * std::f64::consts::PI, epsilon = 1e-9);
        }
        assert!(roots.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn roots_have_small_residuals() {
        let f = |x: f64| (x - 0.5) * (x - 3.25) * (x + 1.0);
        for r in find_roots(f, -2.0, 5.0, 300, 1e-11) {
            let d = 1e-6;
            let slope = (f(r + d) - f(r - d)).abs() / (2.0 * d);
            assert!(
                f(r).abs() <= slope.max(1.0) * 1e-9,
                "residual too large at {r}"
            );
        }
    }

    #[test]
    fn find_roots_is_deterministic() {
        let run = || find_roots(|x| x.cos() - 0.3, 0.0, 30.0, 333, 1e-10);
        assert_eq!(run(), run());
    }

    #[test]
    fn trapezoid_integrates_sine() {
        let integral = trapezoid(|x| x.sin(), 0.0, std::f64::consts::PI, 10_000);
        assert_relative_eq!(integral, 2.0, max_relative = 1e-6);
    }

    #[test]
    fn trapezoid_skips_non_finite_endpoint() {
        // 1/sqrt(x) on (0, 1]: integrable singularity at 0; node skipped.
        let integral = trapezoid(|x| x.powf(-0.5), 0.0, 1.0, 200_000);
        assert_relative_eq!(integral, 2.0, max_relative = 2e-2);
    }
}
