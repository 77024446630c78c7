//! Scalar quadrature and root finding.

/// Adaptive Simpson quadrature to absolute tolerance `tol`. The interval is
/// first cut into 64 panels so that narrow features are not missed by the
/// initial samples.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    const PANELS: usize = 64;
    let width = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|k| {
            let lo = a + k as f64 * width;
            let hi = if k + 1 == PANELS { b } else { lo + width };
            simpson_panel(f, lo, hi, tol / PANELS as f64)
        })
        .sum()
}

fn simpson_panel(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &impl Fn(f64) -> f64,
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
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Tanh-sinh (double exponential) quadrature on `[a, b]`; tolerates
/// integrable endpoint singularities. `f` receives the point and its distance
/// to the nearer endpoint, so singular factors can be evaluated without
/// cancellation.
pub fn tanh_sinh(f: &impl Fn(f64, f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    let c = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut h = 1.0;
    let mut previous = f64::NAN;
    for _ in 0..12 {
        let mut sum = 0.0;
        let mut k: i64 = -((6.0 / h) as i64);
        let kmax = -k;
        while k <= kmax {
            let t = k as f64 * h;
            let u = FRAC_PI_2 * t.sinh();
            let x = u.tanh();
            let w = FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
            // Distance to the nearer endpoint, 1 - |x| without cancellation.
            let gap = c / (u.abs().exp() * u.cosh());
            if w > 0.0 && gap > 0.0 {
                let point = mid + c * x;
                sum += w * f(point, gap);
            }
            k += 1;
        }
        let estimate = c * h * sum;
        if (estimate - previous).abs() <= tol {
            return estimate;
        }
        previous = estimate;
        h *= 0.5;
    }
    previous
}

/// Root of `f` on `[lo, hi]` by bisection; `f(lo)` and `f(hi)` must differ in
/// sign.
pub fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "root not bracketed");
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
