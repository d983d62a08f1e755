//! One-dimensional minimization.

/// `1/φ`, the golden-section contraction factor.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol`. Returns the best point
/// evaluated, which includes both endpoints and any `seed` supplied, so the
/// result is never worse than the starting information.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64, seed: Option<(f64, f64)>) -> Minimum
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut evaluations = 0;
    let mut eval = |x: f64| {
        evaluations += 1;
        f(x)
    };

    let mut best = seed.unwrap_or((f64::NAN, f64::INFINITY));
    let track = |x: f64, v: f64, best: &mut (f64, f64)| {
        if v < best.1 || best.0.is_nan() {
            *best = (x, v);
        }
    };

    let fa = eval(a);
    track(a, fa, &mut best);
    let fb = eval(b);
    track(b, fb, &mut best);

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    track(c, fc, &mut best);
    track(d, fd, &mut best);

    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
            track(c, fc, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
            track(d, fd, &mut best);
        }
    }

    Minimum { x: best.0, value: best.1, evaluations }
}
