//! Scalar numeric primitives used across the crate: adaptive Simpson
//! quadrature and golden-section minimization.

const MAX_DEPTH: u32 = 70;

/// Adaptive Simpson quadrature of `f` over `[a, b]` with absolute
/// tolerance `tol`.
///
/// The classic bisection scheme with Richardson correction; the tolerance
/// is halved on each split so the accumulated error stays near `tol`.
/// Endpoint singularities of the integrand must be handled by the caller
/// (return the limit value at the endpoint).
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    debug_assert!(a <= b && tol > 0.0);
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    refine(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // Interval too narrow to split further in f64.
    let degenerate = lm <= a || rm <= m || m <= lm || b <= rm;
    if depth == 0 || degenerate || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Golden-section search for the minimum of `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `xtol`. Returns
/// `(x_min, f_min, iterations)`.
pub fn golden_min<F: Fn(f64) -> f64>(
    f: &F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    max_iter: usize,
) -> (f64, f64, usize) {
    debug_assert!(lo < hi && xtol > 0.0);
    const INV_PHI2: f64 = 0.381_966_011_250_105; // 2 - golden ratio

    let mut x1 = lo + INV_PHI2 * (hi - lo);
    let mut x2 = hi - INV_PHI2 * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iters = 0;

    while iters < max_iter && (hi - lo) > xtol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = lo + INV_PHI2 * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = hi - INV_PHI2 * (hi - lo);
            f2 = f(x2);
        }
        iters += 1;
    }

    if f1 < f2 {
        (x1, f1, iters)
    } else {
        (x2, f2, iters)
    }
}
